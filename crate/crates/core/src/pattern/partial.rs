use std::fmt;

use crate::message::{DynTuple, Value};

use super::case::{Case, TimeoutClause};
use super::PatternError;

/// Ordered list of cases plus an optional timeout clause. Applying it runs
/// the handler of the first matching case and nothing else.
#[derive(Clone, Default)]
pub struct PartialFunction {
    cases: Vec<Case>,
    timeout: Option<TimeoutClause>,
}

/// Anything that can appear in a [`behavior!`](crate::behavior) list.
pub enum Clause {
    Case(Case),
    Timeout(TimeoutClause),
    Behavior(PartialFunction),
}

impl From<Case> for Clause {
    fn from(c: Case) -> Self {
        Clause::Case(c)
    }
}

impl From<TimeoutClause> for Clause {
    fn from(t: TimeoutClause) -> Self {
        Clause::Timeout(t)
    }
}

impl From<PartialFunction> for Clause {
    fn from(pf: PartialFunction) -> Self {
        Clause::Behavior(pf)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Applied {
    Matched(usize),
    NoMatch,
}

/// A successful lookup, ready to run.
pub struct Match<'a> {
    case: &'a Case,
    index: usize,
    captures: Vec<Value>,
}

impl Match<'_> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn captures(&self) -> &[Value] {
        &self.captures
    }

    pub fn run(self) {
        self.case.invoke(self.captures)
    }
}

impl PartialFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn try_from_clauses(
        clauses: impl IntoIterator<Item = Clause>,
    ) -> Result<Self, PatternError> {
        let mut pf = PartialFunction::default();
        for clause in clauses {
            match clause {
                Clause::Case(c) => pf.cases.push(c),
                Clause::Timeout(t) => pf.set_timeout(t)?,
                Clause::Behavior(other) => {
                    pf.cases.extend(other.cases);
                    if let Some(t) = other.timeout {
                        pf.set_timeout(t)?;
                    }
                }
            }
        }
        Ok(pf)
    }

    fn set_timeout(&mut self, t: TimeoutClause) -> Result<(), PatternError> {
        if self.timeout.is_some() {
            return Err(PatternError::DuplicateTimeout);
        }
        self.timeout = Some(t);
        Ok(())
    }

    /// Sequential composition; at most one operand may carry a timeout.
    pub fn concat(list: impl IntoIterator<Item = PartialFunction>) -> Result<Self, PatternError> {
        Self::try_from_clauses(list.into_iter().map(Clause::Behavior))
    }

    pub fn or_else(self, other: PartialFunction) -> Result<Self, PatternError> {
        Self::concat([self, other])
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn timeout(&self) -> Option<&TimeoutClause> {
        self.timeout.as_ref()
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// First matching case without running it.
    pub fn find(&self, t: &DynTuple) -> Result<Option<Match<'_>>, PatternError> {
        for (index, case) in self.cases.iter().enumerate() {
            if let Some(captures) = case.try_match(t)? {
                return Ok(Some(Match {
                    case,
                    index,
                    captures,
                }));
            }
        }
        Ok(None)
    }

    /// Runs the first matching handler. The timeout clause is not consulted.
    pub fn apply(&self, t: &DynTuple) -> Result<Applied, PatternError> {
        Ok(match self.find(t)? {
            Some(m) => {
                let i = m.index;
                m.run();
                Applied::Matched(i)
            }
            None => Applied::NoMatch,
        })
    }
}

impl fmt::Debug for PartialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        l.entries(&self.cases);
        if let Some(t) = &self.timeout {
            l.entry(t);
        }
        l.finish()
    }
}

/// Builds a [`PartialFunction`] from cases, timeout clauses and other
/// partial functions. Panics if more than one timeout clause is given.
#[macro_export]
macro_rules! behavior {
    ($($c:expr),* $(,)?) => {
        $crate::pattern::PartialFunction::try_from_clauses(
            vec![$($crate::pattern::Clause::from($c)),*]
        ).expect("a behavior carries at most one timeout clause")
    };
}
