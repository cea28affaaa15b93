use std::sync::Arc;

use crate::message::DynTuple;
use crate::pattern::PartialFunction;

use super::cell::{self, next_id, ActorRef, EnvKind, Envelope};
use super::context::{self, current_scheduler, with_ctx, with_ctx_converting};
use super::scheduler::{spawn_detached_in, spawn_pooled};
use super::{ExitReason, RuntimeError};

/// The calling actor. A plain thread is turned into an actor on first use
/// and stays one until it exits.
pub fn current_actor() -> ActorRef {
    with_ctx_converting(|c| c.me.clone()).expect("thread-local storage is being torn down")
}

/// Spawns an event-based actor on the caller's scheduler (the global one
/// outside actors).
pub fn spawn(init: impl FnOnce() + Send + 'static) -> ActorRef {
    spawn_pooled(&current_scheduler(), init)
}

/// Spawns an actor with its own thread. Its body may block in
/// [`receive`]; if it installs a behavior and returns, the thread keeps
/// serving that behavior.
pub fn spawn_detached(body: impl FnOnce() + Send + 'static) -> ActorRef {
    spawn_detached_in(&current_scheduler(), body)
}

/// Class-style actor whose `init` installs the first behavior via
/// [`become_`].
pub trait EventBasedActor: Send + Sync + 'static {
    fn init(self: Arc<Self>);
}

/// Actor exposing its initial behavior, installed automatically.
pub trait StateBasedActor: Send + Sync + 'static {
    fn init_state(self: &Arc<Self>) -> PartialFunction;
}

pub fn spawn_actor<A: EventBasedActor>(actor: A) -> ActorRef {
    spawn(move || Arc::new(actor).init())
}

pub fn spawn_sb<A: StateBasedActor>(actor: A) -> ActorRef {
    spawn(move || {
        let actor = Arc::new(actor);
        become_(actor.init_state());
    })
}

/// Asynchronous send. Messages to terminated actors are dropped.
pub fn send(target: &ActorRef, msg: DynTuple) {
    let sender = with_ctx_converting(|c| c.me.clone());
    target.deliver(Envelope {
        sender,
        kind: EnvKind::Async,
        msg,
    });
}

/// Answers the message being processed. Replies to synchronous requests
/// are visible only to the requester's response handle.
pub fn reply(msg: DynTuple) -> Result<(), RuntimeError> {
    let (me, sender, request) = with_ctx(|c| {
        c.current
            .as_ref()
            .map(|cur| (c.me.clone(), cur.sender.clone(), cur.request))
    })
    .flatten()
    .ok_or(RuntimeError::NoCurrentMessage)?;
    if let Some(to) = sender {
        to.deliver(Envelope {
            sender: Some(me),
            kind: request.map_or(EnvKind::Async, EnvKind::Response),
            msg,
        });
    }
    Ok(())
}

/// Sends a request whose answer can only be received through the returned
/// handle.
pub fn sync_send(target: &ActorRef, msg: DynTuple) -> ResponseHandle {
    let id = next_id();
    let me = with_ctx_converting(|c| {
        c.outstanding.insert(id);
        c.me.clone()
    })
    .expect("thread-local storage is being torn down");
    target.deliver(Envelope {
        sender: Some(me.clone()),
        kind: EnvKind::Request(id),
        msg,
    });
    ResponseHandle { id, requester: me }
}

/// Pending answer to a [`sync_send`]. Consumed by exactly one of
/// [`then`](Self::then) or [`await_with`](Self::await_with).
#[must_use = "the response is dropped unless awaited or handled"]
#[derive(Debug)]
pub struct ResponseHandle {
    id: u64,
    requester: ActorRef,
}

impl ResponseHandle {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn requester(&self) -> &ActorRef {
        &self.requester
    }

    /// Installs a one-shot handler for the response; ordinary messages wait
    /// until it has run or timed out. `pf` must have a timeout clause.
    pub fn then(self, pf: PartialFunction) -> Result<(), RuntimeError> {
        context::then_impl(&self.requester, self.id, pf)
    }

    /// Blocks until the response arrives or the timeout clause of `pf`
    /// fires. A response arriving later is dropped.
    pub fn await_with(self, pf: &PartialFunction) -> Result<(), RuntimeError> {
        context::await_impl(&self.requester, self.id, pf)
    }
}

pub fn handle_response(handle: ResponseHandle, pf: PartialFunction) -> Result<(), RuntimeError> {
    handle.then(pf)
}

pub fn receive_response(handle: ResponseHandle, pf: &PartialFunction) -> Result<(), RuntimeError> {
    handle.await_with(pf)
}

/// Blocking receive for detached actors and converted threads. Messages not
/// matched by `pf` stay in the mailbox, in order.
pub fn receive(pf: &PartialFunction) -> Result<(), RuntimeError> {
    context::receive_impl(pf)
}

/// Receives forever; returns only on error.
pub fn receive_loop(pf: &PartialFunction) -> RuntimeError {
    loop {
        if let Err(e) = receive(pf) {
            return e;
        }
    }
}

pub fn receive_for(count: usize, pf: &PartialFunction) -> Result<(), RuntimeError> {
    for _ in 0..count {
        receive(pf)?;
    }
    Ok(())
}

/// `do_receive(pf).until(cond)` receives at least once, then until `cond`
/// holds.
pub fn do_receive(pf: &PartialFunction) -> DoReceive<'_> {
    DoReceive { pf }
}

pub struct DoReceive<'a> {
    pf: &'a PartialFunction,
}

impl DoReceive<'_> {
    pub fn until(self, mut cond: impl FnMut() -> bool) -> Result<(), RuntimeError> {
        loop {
            receive(self.pf)?;
            if cond() {
                return Ok(());
            }
        }
    }
}

/// Replaces the current behavior.
pub fn become_(behavior: impl Into<Arc<PartialFunction>>) {
    let b = behavior.into();
    with_ctx_converting(|c| {
        c.behaviors.pop();
        c.behaviors.push(b);
        c.behavior_changed();
    });
}

/// Pushes a behavior, keeping the current one underneath.
pub fn become_keep(behavior: impl Into<Arc<PartialFunction>>) {
    let b = behavior.into();
    with_ctx_converting(|c| {
        c.behaviors.push(b);
        c.behavior_changed();
    });
}

/// Pops the current behavior. An event-based actor left without behavior
/// terminates normally.
pub fn unbecome() {
    with_ctx(|c| {
        c.behaviors.pop();
        c.behavior_changed();
    });
}

pub fn behavior_depth() -> usize {
    with_ctx(|c| c.behaviors.len()).unwrap_or(0)
}

/// Terminates the calling actor with `reason`. Event-based actors stop
/// after the running handler returns; detached actors unwind immediately.
pub fn quit(reason: ExitReason) {
    context::quit_impl(reason)
}

/// When set, exit signals from linked actors arrive as
/// [`ExitMessage`](super::ExitMessage)s instead of terminating this actor.
pub fn trap_exit(enabled: bool) {
    with_ctx_converting(|c| c.trap_exit = enabled);
}

/// The message currently being processed.
pub fn last_received() -> Option<DynTuple> {
    with_ctx(|c| c.current.as_ref().map(|cur| cur.msg.clone())).flatten()
}

pub fn last_sender() -> Option<ActorRef> {
    with_ctx(|c| c.current.as_ref().and_then(|cur| cur.sender.clone())).flatten()
}

/// Links the calling actor with `other`.
pub fn link(other: &ActorRef) {
    cell::link_actors(&current_actor(), other)
}

pub fn unlink(other: &ActorRef) {
    cell::unlink_actors(&current_actor(), other)
}

/// The calling actor receives a [`DownMessage`](super::DownMessage) when
/// `target` terminates (immediately if it already has).
pub fn monitor(target: &ActorRef) {
    cell::add_monitor(&current_actor(), target)
}

pub fn demonitor(target: &ActorRef) {
    cell::remove_monitor(&current_actor(), target)
}
