use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use crate::atom::Atom;
use crate::message::{
    align, tag_of, CastList, CastSlot, DynTuple, Element, IntoValue, TupleError, TypeTag, Value,
};

use super::guard::GuardExpr;
use super::handler::{HandlerFn, IntoHandler};
use super::PatternError;

type ProjectFn = Arc<dyn Fn(&Value) -> Option<Value> + Send + Sync>;

/// Side-effect-free conversion applied while matching. An empty result means
/// the element does not match.
#[derive(Clone)]
pub struct Projection {
    input: TypeTag,
    output: TypeTag,
    f: ProjectFn,
}

impl Projection {
    pub fn try_new<T, R, F>(f: F) -> Result<Projection, PatternError>
    where
        T: Element,
        R: Element,
        F: Fn(&T) -> Option<R> + Send + Sync + 'static,
    {
        let input = tag_of::<T>().ok_or(TupleError::Unregistered(std::any::type_name::<T>()))?;
        let output = tag_of::<R>().ok_or(TupleError::Unregistered(std::any::type_name::<R>()))?;
        let f: ProjectFn = Arc::new(move |v: &Value| {
            let r = f(v.downcast_ref::<T>()?)?;
            Some(Value::new(r).expect("output type registered"))
        });
        Ok(Projection { input, output, f })
    }

    pub fn input(&self) -> TypeTag {
        self.input
    }

    pub fn output(&self) -> TypeTag {
        self.output
    }
}

#[derive(Clone)]
pub enum PatternElement {
    Type(TypeTag),
    Value(Value),
    Anything,
    Projection(Projection),
}

impl PatternElement {
    /// Type of the captured value, `None` for wildcards.
    pub fn capture_tag(&self) -> Option<TypeTag> {
        match self {
            PatternElement::Type(t) => Some(*t),
            PatternElement::Value(v) => Some(v.tag()),
            PatternElement::Anything => None,
            PatternElement::Projection(p) => Some(p.output),
        }
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self, PatternElement::Anything)
    }
}

impl fmt::Debug for PatternElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternElement::Type(t) => write!(f, "val<{t:?}>"),
            PatternElement::Value(v) => write!(f, "{v}"),
            PatternElement::Anything => f.write_str("any_vals"),
            PatternElement::Projection(p) => write!(f, "project<{:?}->{:?}>", p.input, p.output),
        }
    }
}

impl From<Atom> for PatternElement {
    fn from(a: Atom) -> Self {
        PatternElement::Value(a.into())
    }
}

impl From<Projection> for PatternElement {
    fn from(p: Projection) -> Self {
        PatternElement::Projection(p)
    }
}

/// Matches any value of type `T`. Panics if `T` is not registered.
pub fn val<T: Element>() -> PatternElement {
    match tag_of::<T>() {
        Some(t) => PatternElement::Type(t),
        None => panic!("type `{}` is not registered", std::any::type_name::<T>()),
    }
}

/// Matches exactly `v` (type and value).
pub fn lit(v: impl IntoValue) -> PatternElement {
    PatternElement::Value(v.into_value())
}

pub fn any_vals() -> PatternElement {
    PatternElement::Anything
}

/// Projection element. Panics if either type is not registered.
pub fn project<T, R, F>(f: F) -> PatternElement
where
    T: Element,
    R: Element,
    F: Fn(&T) -> Option<R> + Send + Sync + 'static,
{
    match Projection::try_new(f) {
        Ok(p) => PatternElement::Projection(p),
        Err(e) => panic!("{e}"),
    }
}

/// Intermediate builder returned by [`on`] and friends.
#[must_use]
pub struct CaseBuilder {
    pattern: Result<Vec<PatternElement>, PatternError>,
    guard: Option<GuardExpr>,
    arg_match: bool,
}

/// Starts a case from explicit pattern elements.
pub fn on(elements: impl IntoIterator<Item = PatternElement>) -> CaseBuilder {
    CaseBuilder {
        pattern: Ok(elements.into_iter().collect()),
        guard: None,
        arg_match: false,
    }
}

/// Starts a case from a type list, e.g. `on_types::<(i32, Anything)>()`.
pub fn on_types<L: CastList>() -> CaseBuilder {
    let pattern = L::slots()
        .map(|slots| {
            slots
                .into_iter()
                .map(|s| match s {
                    CastSlot::Tag(t) => PatternElement::Type(t),
                    CastSlot::Anything => PatternElement::Anything,
                })
                .collect()
        })
        .ok_or(PatternError::Tuple(TupleError::Unregistered(
            std::any::type_name::<L>(),
        )));
    CaseBuilder {
        pattern,
        guard: None,
        arg_match: false,
    }
}

/// Pattern deduced entirely from the handler's parameters.
pub fn on_arg_match() -> CaseBuilder {
    on([]).arg_match()
}

/// Catch-all case.
pub fn others() -> CaseBuilder {
    on([PatternElement::Anything])
}

impl CaseBuilder {
    pub fn when(mut self, guard: impl Into<GuardExpr>) -> Self {
        self.guard = Some(guard.into());
        self
    }

    /// Appends one type element per handler parameter.
    pub fn arg_match(mut self) -> Self {
        self.arg_match = true;
        self
    }

    /// Finishes the case. Panics on a handler that does not fit the pattern;
    /// see [`try_handle`](Self::try_handle).
    pub fn handle<Args, F: IntoHandler<Args>>(self, f: F) -> Case {
        match self.try_handle(f) {
            Ok(c) => c,
            Err(e) => panic!("invalid case definition: {e}"),
        }
    }

    pub fn try_handle<Args, F: IntoHandler<Args>>(self, f: F) -> Result<Case, PatternError> {
        let mut pattern = self.pattern?;
        let params = F::param_tags()?;
        if self.arg_match {
            pattern.extend(params.iter().map(|t| PatternElement::Type(*t)));
        }
        let captured: Vec<TypeTag> = pattern
            .iter()
            .filter_map(PatternElement::capture_tag)
            .collect();
        if params.len() > captured.len() {
            return Err(PatternError::HandlerArity {
                params: params.len(),
                captures: captured.len(),
            });
        }
        // handlers may only drop captures from the left
        let skip = captured.len() - params.len();
        for (i, (expected, found)) in captured[skip..].iter().zip(&params).enumerate() {
            if expected != found {
                return Err(PatternError::HandlerType {
                    param: i,
                    expected: *expected,
                    found: *found,
                });
            }
        }
        let has_projection = pattern
            .iter()
            .any(|p| matches!(p, PatternElement::Projection(_)));
        Ok(Case {
            inner: Arc::new(CaseInner {
                pattern,
                guard: self.guard,
                handler: f.into_handler(),
                skip,
                has_projection,
            }),
        })
    }
}

struct CaseInner {
    pattern: Vec<PatternElement>,
    guard: Option<GuardExpr>,
    handler: HandlerFn,
    skip: usize,
    has_projection: bool,
}

/// Pattern, optional guard, and handler.
#[derive(Clone)]
pub struct Case {
    inner: Arc<CaseInner>,
}

impl Case {
    pub fn pattern(&self) -> &[PatternElement] {
        &self.inner.pattern
    }

    pub fn guard(&self) -> Option<&GuardExpr> {
        self.inner.guard.as_ref()
    }

    /// Number of leading captures the handler does not receive.
    pub fn skipped_captures(&self) -> usize {
        self.inner.skip
    }

    /// Captured values if `t` matches, including the guard check.
    pub fn try_match(&self, t: &DynTuple) -> Result<Option<Vec<Value>>, PatternError> {
        let pattern = &self.inner.pattern;
        let values = t.values();
        let n = values.len();
        // projection results, computed at most once per (slot, element)
        let mut memo: Vec<Option<Option<Value>>> = if self.inner.has_projection {
            vec![None; pattern.len() * n]
        } else {
            Vec::new()
        };
        let positions = align(
            pattern.len(),
            n,
            |p| pattern[p].is_wildcard(),
            |p, e| match &pattern[p] {
                PatternElement::Type(tag) => values[e].tag() == *tag,
                PatternElement::Value(v) => values[e] == *v,
                PatternElement::Anything => true,
                PatternElement::Projection(proj) => {
                    if values[e].tag() != proj.input {
                        return false;
                    }
                    let slot = &mut memo[p * n + e];
                    if slot.is_none() {
                        *slot = Some((proj.f)(&values[e]));
                    }
                    slot.as_ref().is_some_and(Option::is_some)
                }
            },
        );
        let Some(positions) = positions else {
            return Ok(None);
        };
        let captures: Vec<Value> = pattern
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_wildcard())
            .zip(positions)
            .map(|((p, elem), e)| match elem {
                PatternElement::Projection(_) => memo[p * n + e]
                    .take()
                    .flatten()
                    .expect("projection evaluated during alignment"),
                _ => values[e].clone(),
            })
            .collect();
        if let Some(guard) = &self.inner.guard {
            if !guard.eval(&captures)? {
                return Ok(None);
            }
        }
        Ok(Some(captures))
    }

    /// Runs the handler on captures from [`try_match`](Self::try_match).
    pub fn invoke(&self, mut captures: Vec<Value>) {
        captures.drain(..self.inner.skip);
        (self.inner.handler)(captures)
    }
}

impl fmt::Debug for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Case");
        d.field("pattern", &self.inner.pattern);
        if let Some(g) = &self.inner.guard {
            d.field("guard", g);
        }
        d.finish()
    }
}

/// Zero-argument handler run when a receive waits longer than `duration`.
#[derive(Clone)]
pub struct TimeoutClause {
    duration: Duration,
    handler: Arc<dyn Fn() + Send + Sync>,
}

impl TimeoutClause {
    pub fn duration(&self) -> Duration {
        self.duration
    }

    pub fn invoke(&self) {
        (self.handler)()
    }
}

impl fmt::Debug for TimeoutClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "after({:?})", self.duration)
    }
}

#[must_use]
pub struct AfterBuilder(Duration);

pub fn after(duration: Duration) -> AfterBuilder {
    AfterBuilder(duration)
}

impl AfterBuilder {
    pub fn handle(self, f: impl Fn() + Send + Sync + 'static) -> TimeoutClause {
        TimeoutClause {
            duration: self.0,
            handler: Arc::new(f),
        }
    }
}
