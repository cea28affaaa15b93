//! Pattern matching over message tuples.
//!
//! A [`Case`] couples a pattern (a list of [`PatternElement`]s), an optional
//! guard and a handler. Cases are built fluently:
//!
//! ```
//! use actor_core::pattern::*;
//! use actor_core::{atom, behavior, tuple};
//!
//! let pf = behavior![
//!     on([lit(atom("add"))]).arg_match().handle(|a: i32, b: i32| println!("{}", a + b)),
//!     on_types::<(i32,)>().when((x1() % 2).ne(0)).handle(|_i: i32| println!("odd")),
//!     others().handle(|| println!("something else")),
//! ];
//! assert_eq!(pf.apply(&tuple![atom("add"), 1, 2]).unwrap(), Applied::Matched(0));
//! assert_eq!(pf.apply(&tuple![4]).unwrap(), Applied::Matched(2));
//! ```
//!
//! Wildcards ([`any_vals`]) absorb any run of elements and are not captured.
//! Handlers receive the captured values but may drop leading ones: a pattern
//! capturing `(i32, i32, f32)` accepts handlers `(f32)`, `(i32, f32)` and
//! `(i32, i32, f32)`.

mod case;
mod guard;
mod handler;
mod partial;

use thiserror::Error;

use crate::message::{TupleError, TypeTag};

pub use case::{
    after, any_vals, lit, on, on_arg_match, on_types, others, project, val, AfterBuilder, Case,
    CaseBuilder, PatternElement, Projection, TimeoutClause,
};
pub use guard::{
    gcall, gref, x, x1, x2, x3, x4, x5, x6, x7, x8, x9, Guard, GuardCell, GuardError, GuardExpr,
    GuardValue, IntoGuardValue,
};
pub use handler::IntoHandler;
pub use partial::{Applied, Clause, Match, PartialFunction};

pub use crate::message::Anything;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error(transparent)]
    Tuple(#[from] TupleError),
    #[error("handler takes {params} arguments but the pattern captures only {captures}")]
    HandlerArity { params: usize, captures: usize },
    #[error("handler parameter {param} has type {found:?}, pattern captures {expected:?}")]
    HandlerType {
        param: usize,
        expected: TypeTag,
        found: TypeTag,
    },
    #[error(transparent)]
    Guard(#[from] GuardError),
    #[error("more than one timeout clause")]
    DuplicateTimeout,
}
