use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::time::Instant;

use crate::mailbox::{CachedStack, EnqueueResult};
use crate::message::DynTuple;
use crate::tuple;

use super::context::Context;
use super::scheduler::SchedInner;
use super::{DownMessage, ExitReason};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

pub(crate) fn next_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Pooled,
    Detached,
    Converted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TimeoutId {
    Behavior(u64),
    Response(u64),
}

pub(crate) enum EnvKind {
    Async,
    Request(u64),
    Response(u64),
    Timeout(TimeoutId),
    Exit {
        source: ActorRef,
        reason: ExitReason,
    },
}

pub(crate) struct Envelope {
    pub sender: Option<ActorRef>,
    pub kind: EnvKind,
    pub msg: DynTuple,
}

impl Envelope {
    pub fn signal(kind: EnvKind) -> Envelope {
        Envelope {
            sender: None,
            kind,
            msg: DynTuple::empty(),
        }
    }
}

#[derive(Default)]
struct Relations {
    links: Vec<ActorRef>,
    monitors: Vec<ActorRef>,
    exit: Option<ExitReason>,
}

pub(crate) struct ActorCell {
    pub id: u64,
    pub mode: Mode,
    pub mailbox: CachedStack<Envelope>,
    pub sched: Arc<SchedInner>,
    /// Private state of a pooled actor between scheduling turns.
    pub parked: Mutex<Option<Box<Context>>>,
    pub running: AtomicBool,
    alive: AtomicBool,
    relations: Mutex<Relations>,
    signal: Mutex<bool>,
    cond: Condvar,
}

/// Handle to an actor. Cheap to clone and freely sendable; equality and
/// hashing go by actor id.
#[derive(Clone)]
pub struct ActorRef(pub(crate) Arc<ActorCell>);

impl ActorRef {
    pub(crate) fn new(mode: Mode, sched: Arc<SchedInner>) -> ActorRef {
        ActorRef(Arc::new(ActorCell {
            id: next_id(),
            mode,
            mailbox: CachedStack::new(),
            sched,
            parked: Mutex::new(None),
            running: AtomicBool::new(false),
            alive: AtomicBool::new(true),
            relations: Mutex::new(Relations::default()),
            signal: Mutex::new(false),
            cond: Condvar::new(),
        }))
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn is_alive(&self) -> bool {
        self.0.alive.load(Ordering::Acquire)
    }

    /// Recorded exit reason once the actor has terminated.
    pub fn exit_reason(&self) -> Option<ExitReason> {
        self.relations().exit.clone()
    }

    /// True for actors running on their own thread (spawned detached or
    /// converted from a plain thread).
    pub fn is_detached(&self) -> bool {
        self.0.mode != Mode::Pooled
    }

    fn relations(&self) -> MutexGuard<'_, Relations> {
        self.0.relations.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub(crate) fn deliver(&self, env: Envelope) {
        if !self.is_alive() {
            return;
        }
        if self.0.mailbox.enqueue(env) == EnqueueResult::EnqueuedNeedsWakeup {
            self.wake();
        }
    }

    fn wake(&self) {
        match self.0.mode {
            Mode::Pooled => self.0.sched.submit(self.clone()),
            Mode::Detached | Mode::Converted => {
                let mut s = self.0.signal.lock().unwrap();
                *s = true;
                self.0.cond.notify_one();
            }
        }
    }

    /// Blocks a thread-bound actor until woken. Returns false on deadline.
    pub(crate) fn wait_signal(&self, deadline: Option<Instant>) -> bool {
        let mut s = self.0.signal.lock().unwrap();
        while !*s {
            match deadline {
                None => s = self.0.cond.wait(s).unwrap(),
                Some(d) => {
                    let now = Instant::now();
                    if now >= d {
                        return false;
                    }
                    s = self.0.cond.wait_timeout(s, d - now).unwrap().0;
                }
            }
        }
        *s = false;
        true
    }

    /// Marks the actor dead and notifies link partners and monitors. Must be
    /// called by the actor itself (it closes the mailbox as its consumer).
    pub(crate) fn terminate(&self, reason: ExitReason) {
        if !self.0.alive.swap(false, Ordering::AcqRel) {
            return;
        }
        let (links, monitors) = {
            let mut r = self.relations();
            r.exit = Some(reason.clone());
            (
                std::mem::take(&mut r.links),
                std::mem::take(&mut r.monitors),
            )
        };
        // SAFETY: called from the consumer side
        drop(unsafe { self.0.mailbox.close() });
        for partner in links {
            partner.relations().links.retain(|l| l != self);
            partner.deliver(Envelope {
                sender: Some(self.clone()),
                kind: EnvKind::Exit {
                    source: self.clone(),
                    reason: reason.clone(),
                },
                msg: DynTuple::empty(),
            });
        }
        for watcher in monitors {
            watcher.deliver(self.down_envelope(reason.clone()));
        }
        if self.0.mode != Mode::Converted {
            self.0.sched.on_terminated();
        }
    }

    fn down_envelope(&self, reason: ExitReason) -> Envelope {
        Envelope {
            sender: Some(self.clone()),
            kind: EnvKind::Async,
            msg: tuple![DownMessage {
                source: self.clone(),
                reason,
            }],
        }
    }

    fn exit_envelope(&self, reason: ExitReason) -> Envelope {
        Envelope {
            sender: Some(self.clone()),
            kind: EnvKind::Exit {
                source: self.clone(),
                reason,
            },
            msg: DynTuple::empty(),
        }
    }
}

/// Creates a bidirectional link. If either side is already dead, the other
/// receives an exit signal carrying the recorded reason instead.
pub fn link_actors(a: &ActorRef, b: &ActorRef) {
    if a == b {
        return;
    }
    let (first, second) = if a.id() < b.id() { (a, b) } else { (b, a) };
    let mut r1 = first.relations();
    let mut r2 = second.relations();
    match (r1.exit.clone(), r2.exit.clone()) {
        (None, None) => {
            if !r1.links.contains(second) {
                r1.links.push(second.clone());
                r2.links.push(first.clone());
            }
        }
        (Some(reason), None) => {
            drop((r1, r2));
            second.deliver(first.exit_envelope(reason));
        }
        (None, Some(reason)) => {
            drop((r1, r2));
            first.deliver(second.exit_envelope(reason));
        }
        (Some(_), Some(_)) => {}
    }
}

pub fn unlink_actors(a: &ActorRef, b: &ActorRef) {
    if a == b {
        return;
    }
    let (first, second) = if a.id() < b.id() { (a, b) } else { (b, a) };
    let mut r1 = first.relations();
    let mut r2 = second.relations();
    r1.links.retain(|l| l != second);
    r2.links.retain(|l| l != first);
}

pub(crate) fn add_monitor(watcher: &ActorRef, target: &ActorRef) {
    let mut r = target.relations();
    match r.exit.clone() {
        None => r.monitors.push(watcher.clone()),
        Some(reason) => {
            drop(r);
            watcher.deliver(target.down_envelope(reason));
        }
    }
}

pub(crate) fn remove_monitor(watcher: &ActorRef, target: &ActorRef) {
    let mut r = target.relations();
    if let Some(i) = r.monitors.iter().position(|m| m == watcher) {
        r.monitors.remove(i);
    }
}

impl PartialEq for ActorRef {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for ActorRef {}

impl Hash for ActorRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state)
    }
}

impl fmt::Debug for ActorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "actor#{}", self.0.id)
    }
}

impl fmt::Display for ActorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
