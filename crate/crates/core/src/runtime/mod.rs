//! Actors: spawning, messaging, behaviors, fault propagation and the
//! worker pool.
//!
//! Two kinds of actors exist. Event-based actors ([`spawn`]) run on a shared
//! worker pool and are driven by their behavior stack ([`become_`],
//! [`become_keep`], [`unbecome`]). Detached actors ([`spawn_detached`]) own a
//! thread and may block in [`receive`]. Any plain thread that uses the API
//! becomes a detached-style actor on the fly.

mod api;
mod cell;
mod context;
mod scheduler;
mod timer;

use std::fmt;

use thiserror::Error;

use crate::pattern::PatternError;

pub use api::{
    become_, become_keep, behavior_depth, current_actor, demonitor, do_receive, handle_response,
    last_received, last_sender, link, monitor, quit, receive, receive_for, receive_loop,
    receive_response, reply, send, spawn, spawn_actor, spawn_detached, spawn_sb, sync_send,
    trap_exit, unbecome, unlink, DoReceive, EventBasedActor, ResponseHandle, StateBasedActor,
};
pub use cell::{link_actors, unlink_actors, ActorRef};
pub use context::execution_violations;
pub use scheduler::{Scheduler, SchedulerConfig, SchedulerStats, DEFAULT_BUDGET, POOL_SIZE_ENV};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExitReason {
    Normal,
    Failure(String),
}

impl ExitReason {
    pub fn failure(what: impl Into<String>) -> ExitReason {
        ExitReason::Failure(what.into())
    }

    pub fn is_normal(&self) -> bool {
        *self == ExitReason::Normal
    }
}

impl fmt::Display for ExitReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExitReason::Normal => f.write_str("normal"),
            ExitReason::Failure(s) => write!(f, "failure({s})"),
        }
    }
}

/// Delivered to actors trapping exits when a linked actor terminates.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitMessage {
    pub source: ActorRef,
    pub reason: ExitReason,
}

/// Delivered to monitoring actors when the monitored actor terminates.
#[derive(Debug, Clone, PartialEq)]
pub struct DownMessage {
    pub source: ActorRef,
    pub reason: ExitReason,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error("event-based actors cannot block; install a behavior instead")]
    BlockingInPooled,
    #[error("no message is being processed")]
    NoCurrentMessage,
    #[error("response handlers need a timeout clause")]
    MissingTimeout,
    #[error("response handle belongs to {0}")]
    ForeignHandle(ActorRef),
    #[error("actor exited with reason {0}")]
    Exited(ExitReason),
    #[error("no actor context on this thread")]
    NoContext,
    #[error(transparent)]
    Pattern(#[from] PatternError),
}
