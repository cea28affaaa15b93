use std::any::Any;
use std::cell::RefCell;
use std::collections::{HashMap, HashSet, VecDeque};
use std::mem;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crate::message::DynTuple;
use crate::pattern::{Match, PartialFunction, PatternError, TimeoutClause};
use crate::tuple;

use super::cell::{next_id, ActorRef, EnvKind, Envelope, Mode, TimeoutId};
use super::scheduler::{SchedInner, Scheduler};
use super::{timer, ExitMessage, ExitReason, RuntimeError};

static EXEC_VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// How often a pooled actor was found already running when a worker picked
/// it up. Always zero unless the scheduler is broken.
pub fn execution_violations() -> u64 {
    EXEC_VIOLATIONS.load(Ordering::Relaxed)
}

pub(crate) struct Current {
    pub sender: Option<ActorRef>,
    pub request: Option<u64>,
    pub msg: DynTuple,
}

/// Private side of an actor. Lives in the thread-local slot while the actor
/// runs and, for pooled actors, is parked in the cell between turns.
pub(crate) struct Context {
    pub me: ActorRef,
    pub init: Option<Box<dyn FnOnce() + Send>>,
    pub behaviors: Vec<Arc<PartialFunction>>,
    /// Messages taken from the mailbox but not consumed yet, oldest first.
    pub stash: VecDeque<Envelope>,
    /// `stash[..scan_pos]` has already failed against the top behavior.
    pub scan_pos: usize,
    pub trap_exit: bool,
    pub outstanding: HashSet<u64>,
    pub responses: HashMap<u64, Envelope>,
    pub pending_then: Vec<(u64, PartialFunction)>,
    pub current: Option<Current>,
    pub armed: Option<u64>,
    pub exit: Option<ExitReason>,
    pub dead: bool,
}

impl Context {
    pub fn new(me: ActorRef) -> Context {
        Context {
            me,
            init: None,
            behaviors: Vec::new(),
            stash: VecDeque::new(),
            scan_pos: 0,
            trap_exit: false,
            outstanding: HashSet::new(),
            responses: HashMap::new(),
            pending_then: Vec::new(),
            current: None,
            armed: None,
            exit: None,
            dead: false,
        }
    }

    pub fn mode(&self) -> Mode {
        self.me.0.mode
    }

    pub fn behavior_changed(&mut self) {
        self.scan_pos = 0;
        self.armed = None;
    }

    fn classify(&mut self, env: Envelope) -> Intake {
        match env.kind {
            EnvKind::Async | EnvKind::Request(_) => Intake::Normal(env),
            EnvKind::Response(id) => {
                if !self.outstanding.contains(&id) {
                    return Intake::Nothing;
                }
                if let Some(pos) = self.pending_then.iter().position(|(i, _)| *i == id) {
                    let (_, pf) = self.pending_then.remove(pos);
                    self.outstanding.remove(&id);
                    return Intake::Act(Action::RunThen(pf, env));
                }
                self.responses.insert(id, env);
                Intake::Nothing
            }
            EnvKind::Timeout(TimeoutId::Behavior(seq)) => {
                if self.armed != Some(seq) || !self.pending_then.is_empty() {
                    return Intake::Nothing;
                }
                self.armed = None;
                match self.behaviors.last().and_then(|b| b.timeout()) {
                    Some(t) => Intake::Act(Action::RunTimeout(t.clone())),
                    None => Intake::Nothing,
                }
            }
            EnvKind::Timeout(TimeoutId::Response(id)) => {
                let Some(pos) = self.pending_then.iter().position(|(i, _)| *i == id) else {
                    return Intake::Nothing;
                };
                let (_, pf) = self.pending_then.remove(pos);
                self.outstanding.remove(&id);
                self.responses.remove(&id);
                match pf.timeout() {
                    Some(t) => Intake::Act(Action::RunTimeout(t.clone())),
                    None => Intake::Nothing,
                }
            }
            EnvKind::Exit { source, reason } => {
                if self.trap_exit {
                    Intake::Normal(Envelope {
                        sender: Some(source.clone()),
                        kind: EnvKind::Async,
                        msg: tuple![ExitMessage { source, reason }],
                    })
                } else if reason != ExitReason::Normal {
                    Intake::Act(Action::Exit(reason))
                } else {
                    Intake::Nothing
                }
            }
        }
    }

    fn take_ready_then(&mut self) -> Option<Action> {
        let pos = self
            .pending_then
            .iter()
            .position(|(id, _)| self.responses.contains_key(id))?;
        let (id, pf) = self.pending_then.remove(pos);
        self.outstanding.remove(&id);
        let env = self.responses.remove(&id)?;
        Some(Action::RunThen(pf, env))
    }
}

enum Action {
    Exit(ExitReason),
    RunThen(PartialFunction, Envelope),
    RunTimeout(TimeoutClause),
}

enum Intake {
    Normal(Envelope),
    Act(Action),
    Nothing,
}

struct Slot(RefCell<Option<Box<Context>>>);

impl Drop for Slot {
    fn drop(&mut self) {
        if let Some(ctx) = self.0.get_mut().take() {
            if ctx.mode() == Mode::Converted && !ctx.dead {
                ctx.me.terminate(ExitReason::Normal);
            }
        }
    }
}

thread_local! {
    static CURRENT: Slot = const { Slot(RefCell::new(None)) };
}

/// Runs `f` on the calling thread's live actor context, if any.
pub(crate) fn with_ctx<R>(f: impl FnOnce(&mut Context) -> R) -> Option<R> {
    CURRENT
        .try_with(|s| s.0.borrow_mut().as_deref_mut().filter(|c| !c.dead).map(f))
        .ok()
        .flatten()
}

/// Like [`with_ctx`] but converts a plain thread into an actor first.
/// Only fails while thread-local storage is being torn down.
pub(crate) fn with_ctx_converting<R>(f: impl FnOnce(&mut Context) -> R) -> Option<R> {
    CURRENT
        .try_with(|s| {
            let mut slot = s.0.borrow_mut();
            if slot.as_ref().is_none_or(|c| c.dead) {
                let sched = Scheduler::global().inner().clone();
                *slot = Some(Box::new(Context::new(ActorRef::new(
                    Mode::Converted,
                    sched,
                ))));
            }
            f(slot.as_deref_mut().expect("context installed above"))
        })
        .ok()
}

pub(crate) fn current_scheduler() -> Arc<SchedInner> {
    with_ctx(|c| c.me.0.sched.clone()).unwrap_or_else(|| Scheduler::global().inner().clone())
}

fn install(ctx: Box<Context>) {
    CURRENT.with(|s| *s.0.borrow_mut() = Some(ctx));
}

fn uninstall() -> Option<Box<Context>> {
    CURRENT.with(|s| s.0.borrow_mut().take())
}

/// Unwind payload used by `quit` and fatal exit signals on detached actors.
pub(crate) struct QuitSignal(pub ExitReason);

fn panic_reason(payload: Box<dyn Any + Send>) -> ExitReason {
    match payload.downcast::<QuitSignal>() {
        Ok(q) => q.0,
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            ExitReason::Failure(text)
        }
    }
}

fn pattern_failure(e: PatternError) -> ExitReason {
    ExitReason::Failure(e.to_string())
}

/// Runs a matched handler with `env` as the current message.
fn run_match(m: Match<'_>, env: Envelope) {
    let request = match env.kind {
        EnvKind::Request(id) => Some(id),
        _ => None,
    };
    let cur = Current {
        sender: env.sender,
        request,
        msg: env.msg,
    };
    let prev = with_ctx(|c| {
        c.armed = None;
        c.current.replace(cur)
    })
    .flatten();
    m.run();
    with_ctx(|c| c.current = prev);
}

/// First stash entry from `from` on that matches `pf`, removed from the stash.
fn take_match(
    pf: &PartialFunction,
    from: usize,
) -> Result<Option<(Match<'_>, Envelope, usize)>, PatternError> {
    let mut stash = with_ctx(|c| mem::take(&mut c.stash)).unwrap_or_default();
    let mut result = Ok(None);
    for i in from..stash.len() {
        match pf.find(&stash[i].msg) {
            Ok(Some(m)) => {
                let env = stash.remove(i).expect("index in range");
                result = Ok(Some((m, env, i)));
                break;
            }
            Ok(None) => {}
            Err(e) => {
                result = Err(e);
                break;
            }
        }
    }
    with_ctx(|c| {
        // anything stashed meanwhile is newer
        stash.append(&mut c.stash);
        c.stash = stash;
    });
    result
}

fn dequeue(me: &ActorRef) -> Option<Envelope> {
    // SAFETY: only the actor itself calls this, from its current thread
    unsafe { me.0.mailbox.try_dequeue() }
}

fn classify(env: Envelope) -> Intake {
    with_ctx(|c| c.classify(env)).unwrap_or(Intake::Nothing)
}

pub(crate) enum Step {
    Handled,
    Idle,
    Exit(ExitReason),
}

fn perform(a: Action) -> Step {
    match a {
        Action::Exit(r) => Step::Exit(r),
        Action::RunThen(pf, env) => {
            match pf.find(&env.msg) {
                Ok(Some(m)) => run_match(m, env),
                Ok(None) => {}
                Err(e) => return Step::Exit(pattern_failure(e)),
            }
            Step::Handled
        }
        Action::RunTimeout(t) => {
            with_ctx(|c| c.armed = None);
            t.invoke();
            Step::Handled
        }
    }
}

/// One unit of event-based processing: handle at most one message (or
/// signal) with the top behavior.
fn step(me: &ActorRef) -> Step {
    enum Pre {
        Exit(ExitReason),
        Act(Action),
        Go(Option<Arc<PartialFunction>>, usize),
    }
    let pre = with_ctx(|c| {
        if let Some(r) = c.exit.take() {
            return Pre::Exit(r);
        }
        if let Some(a) = c.take_ready_then() {
            return Pre::Act(a);
        }
        if c.behaviors.is_empty() && c.pending_then.is_empty() {
            return Pre::Exit(ExitReason::Normal);
        }
        // while a response handler is pending, ordinary mail waits
        let top = if c.pending_then.is_empty() {
            c.behaviors.last().cloned()
        } else {
            None
        };
        Pre::Go(top, c.scan_pos)
    });
    let (top, from) = match pre {
        None => return Step::Exit(ExitReason::Normal),
        Some(Pre::Exit(r)) => return Step::Exit(r),
        Some(Pre::Act(a)) => return perform(a),
        Some(Pre::Go(top, from)) => (top, from),
    };
    if let Some(pf) = &top {
        match take_match(pf, from) {
            Err(e) => return Step::Exit(pattern_failure(e)),
            Ok(Some((m, env, i))) => {
                with_ctx(|c| c.scan_pos = i);
                run_match(m, env);
                return Step::Handled;
            }
            Ok(None) => {
                with_ctx(|c| c.scan_pos = c.stash.len());
            }
        }
    }
    while let Some(env) = dequeue(me) {
        match classify(env) {
            Intake::Nothing => {}
            Intake::Act(a) => return perform(a),
            Intake::Normal(env) => {
                if let Some(pf) = &top {
                    match pf.find(&env.msg) {
                        Err(e) => return Step::Exit(pattern_failure(e)),
                        Ok(Some(m)) => {
                            run_match(m, env);
                            return Step::Handled;
                        }
                        Ok(None) => {}
                    }
                }
                with_ctx(|c| {
                    c.stash.push_back(env);
                    if top.is_some() {
                        c.scan_pos = c.stash.len();
                    }
                });
            }
        }
    }
    Step::Idle
}

fn arm_behavior_timeout() {
    with_ctx(|c| {
        if c.armed.is_some() || !c.pending_then.is_empty() {
            return;
        }
        if let Some(t) = c.behaviors.last().and_then(|b| b.timeout()) {
            let seq = next_id();
            c.armed = Some(seq);
            timer::schedule(&c.me, t.duration(), TimeoutId::Behavior(seq));
        }
    });
}

enum TurnEnd {
    Idle,
    Yield,
    Exit(ExitReason),
}

fn turn(me: &ActorRef, budget: usize) -> TurnEnd {
    if let Some(init) = with_ctx(|c| c.init.take()).flatten() {
        if let Err(p) = panic::catch_unwind(AssertUnwindSafe(init)) {
            return TurnEnd::Exit(panic_reason(p));
        }
    }
    let mut handled = 0;
    loop {
        match panic::catch_unwind(AssertUnwindSafe(|| step(me))) {
            Err(p) => return TurnEnd::Exit(panic_reason(p)),
            Ok(Step::Exit(r)) => return TurnEnd::Exit(r),
            Ok(Step::Idle) => {
                arm_behavior_timeout();
                return TurnEnd::Idle;
            }
            Ok(Step::Handled) => {
                handled += 1;
                if handled >= budget {
                    return TurnEnd::Yield;
                }
            }
        }
    }
}

fn park(actor: &ActorRef, ctx: Box<Context>) {
    *actor.0.parked.lock().unwrap() = Some(ctx);
    actor.0.running.store(false, Ordering::Release);
}

/// Executes one scheduling turn of a pooled actor on the calling worker.
pub(crate) fn run_turn(actor: ActorRef) {
    let budget = actor.0.sched.config.budget;
    loop {
        if actor.0.running.swap(true, Ordering::AcqRel) {
            EXEC_VIOLATIONS.fetch_add(1, Ordering::Relaxed);
        }
        let Some(ctx) = actor.0.parked.lock().unwrap().take() else {
            actor.0.running.store(false, Ordering::Release);
            return;
        };
        install(ctx);
        let end = turn(&actor, budget);
        let mut ctx = uninstall().expect("context removed during turn");
        match end {
            TurnEnd::Exit(reason) => {
                ctx.dead = true;
                actor.terminate(reason);
                drop(ctx);
                actor.0.running.store(false, Ordering::Release);
                return;
            }
            TurnEnd::Yield => {
                park(&actor, ctx);
                actor.0.sched.submit(actor.clone());
                return;
            }
            TurnEnd::Idle => {
                park(&actor, ctx);
                // SAFETY: no other worker can run this actor until it is
                // blocked or resubmitted, so we are still the consumer
                if unsafe { actor.0.mailbox.mark_blocked_if_empty() } {
                    return;
                }
            }
        }
    }
}

/// Blocks a thread-bound actor until mail arrives. Returns false if the
/// deadline passed first.
fn block_wait(me: &ActorRef, deadline: Option<Instant>) -> bool {
    // SAFETY: consumer side
    if !unsafe { me.0.mailbox.mark_blocked_if_empty() } {
        return true;
    }
    if me.wait_signal(deadline) {
        return true;
    }
    // SAFETY: consumer side
    if unsafe { me.0.mailbox.try_unblock() } {
        return false;
    }
    // a producer saw BLOCKED and is about to signal
    me.wait_signal(None);
    true
}

fn behavior_loop(me: &ActorRef) -> ExitReason {
    loop {
        match step(me) {
            Step::Handled => {}
            Step::Exit(r) => return r,
            Step::Idle => {
                arm_behavior_timeout();
                block_wait(me, None);
            }
        }
    }
}

pub(crate) fn run_detached(me: ActorRef, body: impl FnOnce()) {
    install(Box::new(Context::new(me.clone())));
    let result = panic::catch_unwind(AssertUnwindSafe(|| {
        body();
        behavior_loop(&me)
    }));
    let reason = result.unwrap_or_else(panic_reason);
    let ctx = uninstall();
    me.terminate(reason);
    drop(ctx);
}

/// Ends the calling thread-bound actor. Detached actors unwind out of
/// their body; converted threads get an error back.
fn die(me: &ActorRef, reason: ExitReason) -> RuntimeError {
    match me.0.mode {
        Mode::Detached => panic::resume_unwind(Box::new(QuitSignal(reason))),
        _ => {
            with_ctx(|c| c.dead = true);
            me.terminate(reason.clone());
            RuntimeError::Exited(reason)
        }
    }
}

pub(crate) fn quit_impl(reason: ExitReason) {
    let Some((me, mode)) = with_ctx_converting(|c| (c.me.clone(), c.mode())) else {
        return;
    };
    match mode {
        Mode::Pooled => {
            with_ctx(|c| c.exit = Some(reason));
        }
        _ => {
            die(&me, reason);
        }
    }
}

fn blocking_self() -> Result<ActorRef, RuntimeError> {
    let me = with_ctx_converting(|c| c.me.clone()).ok_or(RuntimeError::NoContext)?;
    if me.0.mode == Mode::Pooled {
        return Err(RuntimeError::BlockingInPooled);
    }
    Ok(me)
}

fn run_action_blocking(me: &ActorRef, a: Action) -> Result<(), RuntimeError> {
    match perform(a) {
        Step::Exit(r) => Err(die(me, r)),
        _ => Ok(()),
    }
}

fn deferring() -> bool {
    with_ctx(|c| !c.pending_then.is_empty()).unwrap_or(false)
}

pub(crate) fn receive_impl(pf: &PartialFunction) -> Result<(), RuntimeError> {
    let me = blocking_self()?;
    let deadline = pf.timeout().map(|t| Instant::now() + t.duration());
    'outer: loop {
        while let Some(a) = with_ctx(|c| c.take_ready_then()).flatten() {
            run_action_blocking(&me, a)?;
        }
        if !deferring() {
            if let Some((m, env, _)) = take_match(pf, 0)? {
                run_match(m, env);
                return Ok(());
            }
        }
        loop {
            match dequeue(&me) {
                Some(env) => match classify(env) {
                    Intake::Nothing => {}
                    Intake::Act(a) => {
                        run_action_blocking(&me, a)?;
                        continue 'outer;
                    }
                    Intake::Normal(env) => {
                        if !deferring() {
                            if let Some(m) = pf.find(&env.msg)? {
                                run_match(m, env);
                                return Ok(());
                            }
                        }
                        with_ctx(|c| c.stash.push_back(env));
                    }
                },
                None => {
                    if !block_wait(&me, deadline) {
                        if let Some(t) = pf.timeout() {
                            t.invoke();
                        }
                        return Ok(());
                    }
                }
            }
        }
    }
}

pub(crate) fn await_impl(
    requester: &ActorRef,
    id: u64,
    pf: &PartialFunction,
) -> Result<(), RuntimeError> {
    let timeout = pf.timeout().ok_or(RuntimeError::MissingTimeout)?.clone();
    let me = blocking_self()?;
    if &me != requester {
        return Err(RuntimeError::ForeignHandle(requester.clone()));
    }
    let deadline = Instant::now() + timeout.duration();
    loop {
        let ready = with_ctx(|c| {
            let env = c.responses.remove(&id);
            if env.is_some() {
                c.outstanding.remove(&id);
            }
            env
        })
        .flatten();
        if let Some(env) = ready {
            if let Some(m) = pf.find(&env.msg)? {
                run_match(m, env);
            }
            return Ok(());
        }
        match dequeue(&me) {
            Some(env) => match classify(env) {
                Intake::Nothing => {}
                Intake::Act(a) => run_action_blocking(&me, a)?,
                Intake::Normal(env) => {
                    with_ctx(|c| c.stash.push_back(env));
                }
            },
            None => {
                if !block_wait(&me, Some(deadline)) {
                    with_ctx(|c| {
                        c.outstanding.remove(&id);
                        c.responses.remove(&id);
                    });
                    timeout.invoke();
                    return Ok(());
                }
            }
        }
    }
}

pub(crate) fn then_impl(
    requester: &ActorRef,
    id: u64,
    pf: PartialFunction,
) -> Result<(), RuntimeError> {
    let duration = pf.timeout().ok_or(RuntimeError::MissingTimeout)?.duration();
    let me = with_ctx(|c| c.me.clone()).ok_or(RuntimeError::NoContext)?;
    if &me != requester {
        return Err(RuntimeError::ForeignHandle(requester.clone()));
    }
    with_ctx(|c| {
        c.pending_then.push((id, pf));
        c.armed = None;
    });
    timer::schedule(&me, duration, TimeoutId::Response(id));
    Ok(())
}
