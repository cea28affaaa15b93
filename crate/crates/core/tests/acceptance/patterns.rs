use actor_core::message::IntoValue;
use actor_core::pattern::*;
use actor_core::{atom, Atom, DynTuple, Value};

use crate::{check, Verdict};

#[derive(Clone, Copy, PartialEq, Debug)]
enum V {
    I(i32),
    F(f64),
    S(&'static str),
    A(&'static str),
}

impl V {
    fn kind(self) -> u8 {
        match self {
            V::I(_) => 0,
            V::F(_) => 1,
            V::S(_) => 2,
            V::A(_) => 3,
        }
    }

    fn to_value(self) -> Value {
        match self {
            V::I(i) => i.into_value(),
            V::F(f) => f.into_value(),
            V::S(s) => s.into_value(),
            V::A(a) => atom(a).into_value(),
        }
    }
}

const UNIVERSE: [V; 8] = [
    V::I(-1),
    V::I(2),
    V::F(0.5),
    V::F(-1.5),
    V::S("a"),
    V::S("b"),
    V::A("x"),
    V::A("y"),
];

#[derive(Clone, Copy)]
enum P {
    Any,
    Kind(u8),
    Lit(V),
    PositiveI32,
}

#[derive(Clone, Copy)]
enum G {
    None,
    FirstIsA,
    FirstPositive,
}

fn pool() -> Vec<(Vec<P>, G)> {
    use P::*;
    vec![
        (vec![], G::None),
        (vec![Any], G::None),
        (vec![Kind(0)], G::None),
        (vec![Kind(2)], G::None),
        (vec![Lit(V::A("x"))], G::None),
        (vec![Any, Kind(0)], G::None),
        (vec![Kind(0), Any], G::None),
        (vec![Any, Kind(1), Any], G::None),
        (vec![Kind(3), Any, Kind(3)], G::None),
        (vec![Kind(0), Kind(1)], G::None),
        (vec![Any, Kind(2), Any], G::FirstIsA),
        (vec![Kind(0), Any], G::FirstPositive),
        (vec![Any, Any], G::None),
        (vec![Lit(V::I(2)), Any, Lit(V::A("y"))], G::None),
        (vec![Kind(1), Kind(1), Kind(1)], G::None),
        (vec![PositiveI32, Any], G::None),
    ]
}

fn build_case(pattern: &[P], guard: G) -> Case {
    let elems = pattern.iter().map(|p| match *p {
        P::Any => any_vals(),
        P::Kind(0) => val::<i32>(),
        P::Kind(1) => val::<f64>(),
        P::Kind(2) => val::<String>(),
        P::Kind(_) => val::<Atom>(),
        P::Lit(v) => lit(v.to_value()),
        P::PositiveI32 => project(|i: &i32| (*i > 0).then_some(*i)),
    });
    let b = on(elems);
    let b = match guard {
        G::None => b,
        G::FirstIsA => b.when(x1().eq("a")),
        G::FirstPositive => b.when(x1().gt(0)),
    };
    b.handle(|| {})
}

/// Leftmost-shortest alignment by brute force: each wildcard tries lengths in
/// ascending order, earlier wildcards first.
fn align(ps: &[P], vs: &[V], caps: &mut Vec<V>) -> bool {
    let Some((p, rest)) = ps.split_first() else {
        return vs.is_empty();
    };
    match *p {
        P::Any => (0..=vs.len()).any(|k| align(rest, &vs[k..], caps)),
        _ => {
            let Some((v, vrest)) = vs.split_first() else {
                return false;
            };
            let hit = match *p {
                P::Kind(k) => v.kind() == k,
                P::Lit(l) => *v == l,
                P::PositiveI32 => matches!(v, V::I(i) if *i > 0),
                P::Any => unreachable!(),
            };
            if !hit {
                return false;
            }
            caps.push(*v);
            if align(rest, vrest, caps) {
                return true;
            }
            caps.pop();
            false
        }
    }
}

fn oracle_matches(pattern: &[P], guard: G, vs: &[V]) -> bool {
    let mut caps = Vec::new();
    if !align(pattern, vs, &mut caps) {
        return false;
    }
    match guard {
        G::None => true,
        G::FirstIsA => caps[0] == V::S("a"),
        G::FirstPositive => matches!(caps[0], V::I(i) if i > 0),
    }
}

fn tuples() -> Vec<Vec<V>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..3 {
        layer = layer
            .iter()
            .flat_map(|t: &Vec<V>| {
                UNIVERSE.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(*v);
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn case_lists(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer = vec![vec![]];
    for _ in 0..3 {
        layer = layer
            .iter()
            .flat_map(|l: &Vec<usize>| {
                (0..n).map(move |i| {
                    let mut l = l.clone();
                    l.push(i);
                    l
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn oracle_equivalence() -> Verdict {
    let pool = pool();
    let cases: Vec<Case> = pool.iter().map(|(p, g)| build_case(p, *g)).collect();
    let tuples = tuples();
    let dyn_tuples: Vec<DynTuple> = tuples
        .iter()
        .map(|t| DynTuple::new(t.iter().map(|v| v.to_value()).collect()))
        .collect();
    // oracle verdict per (pool entry, tuple)
    let table: Vec<Vec<bool>> = pool
        .iter()
        .map(|(p, g)| tuples.iter().map(|t| oracle_matches(p, *g, t)).collect())
        .collect();
    let mut compared = 0u64;
    let mut mismatches = 0u64;
    for list in case_lists(pool.len()) {
        let pf =
            PartialFunction::try_from_clauses(list.iter().map(|&i| Clause::from(cases[i].clone())))
                .unwrap();
        for (ti, t) in dyn_tuples.iter().enumerate() {
            let expected = list.iter().position(|&i| table[i][ti]);
            let got = match pf.apply(t) {
                Ok(Applied::Matched(i)) => Some(i),
                Ok(Applied::NoMatch) => None,
                Err(_) => Some(usize::MAX),
            };
            compared += 1;
            if got != expected {
                mismatches += 1;
            }
        }
    }
    check(
        mismatches == 0,
        format!(
            "{} tuples x {} case lists = {compared} applications, {mismatches} mismatches",
            tuples.len(),
            compared / tuples.len() as u64
        ),
    )
}
