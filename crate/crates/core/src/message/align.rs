/// Aligns a pattern of `n_pat` slots against `n_elems` elements.
///
/// Wildcard slots absorb any run of elements (possibly empty), tried
/// leftmost-shortest: the first wildcard takes as few elements as it can
/// before later slots are allowed to backtrack into it. `accept(p, e)` decides
/// whether non-wildcard slot `p` matches element `e`; callers that do work in
/// `accept` should memoize, since backtracking may ask twice.
///
/// Returns the element index of every non-wildcard slot, in slot order.
pub(crate) fn align(
    n_pat: usize,
    n_elems: usize,
    is_wild: impl Fn(usize) -> bool,
    mut accept: impl FnMut(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    // fixed slots after position p; prunes wildcard spans that cannot fit
    let mut fixed_after = vec![0usize; n_pat + 1];
    for p in (0..n_pat).rev() {
        fixed_after[p] = fixed_after[p + 1] + usize::from(!is_wild(p));
    }
    let mut out = Vec::with_capacity(fixed_after[0]);
    if go(
        0,
        0,
        n_pat,
        n_elems,
        &is_wild,
        &mut accept,
        &fixed_after,
        &mut out,
    ) {
        Some(out)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn go(
    p: usize,
    e: usize,
    n_pat: usize,
    n_elems: usize,
    is_wild: &impl Fn(usize) -> bool,
    accept: &mut impl FnMut(usize, usize) -> bool,
    fixed_after: &[usize],
    out: &mut Vec<usize>,
) -> bool {
    if p == n_pat {
        return e == n_elems;
    }
    if n_elems - e < fixed_after[p] {
        return false;
    }
    if is_wild(p) {
        let max_take = n_elems - e - fixed_after[p + 1];
        (0..=max_take).any(|k| {
            go(
                p + 1,
                e + k,
                n_pat,
                n_elems,
                is_wild,
                accept,
                fixed_after,
                out,
            )
        })
    } else {
        if !accept(p, e) {
            return false;
        }
        out.push(e);
        if go(
            p + 1,
            e + 1,
            n_pat,
            n_elems,
            is_wild,
            accept,
            fixed_after,
            out,
        ) {
            return true;
        }
        out.pop();
        false
    }
}
