//! Actor runtime with copy-on-write message tuples, pattern-matching
//! behaviors, a lock-free cached-stack mailbox, pooled and thread-bound
//! actors, synchronous requests and Erlang-style links and monitors.

pub mod atom;
pub mod bench;
pub mod mailbox;
pub mod message;
pub mod pattern;
pub mod runtime;

pub use atom::{atom, Atom};
pub use message::{DynTuple, Value};
pub use pattern::PartialFunction;
pub use runtime::{ActorRef, ExitReason};
