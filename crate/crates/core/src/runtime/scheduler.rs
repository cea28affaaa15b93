use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};
use std::thread::{self, JoinHandle};

use crossbeam_channel::{unbounded, Receiver, Sender};

use super::cell::{ActorRef, Mode};
use super::context::{self, Context};

/// Environment variable overriding the default pool size.
pub const POOL_SIZE_ENV: &str = "ACTOR_POOL_SIZE";

pub const DEFAULT_BUDGET: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchedulerConfig {
    /// Number of worker threads.
    pub pool_size: usize,
    /// Messages a pooled actor may handle per turn before yielding.
    pub budget: usize,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        let pool_size = std::env::var(POOL_SIZE_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()));
        SchedulerConfig {
            pool_size,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SchedulerStats {
    /// Actors spawned through this scheduler (pooled and detached).
    pub spawned: u64,
    /// Spawned actors that have not terminated yet.
    pub live: u64,
    /// Highest value `live` has reached.
    pub peak: u64,
}

enum Job {
    Run(ActorRef),
    Stop,
}

pub(crate) struct SchedInner {
    tx: Sender<Job>,
    rx: Receiver<Job>,
    pub config: SchedulerConfig,
    spawned: AtomicU64,
    live: AtomicU64,
    peak: AtomicU64,
}

impl SchedInner {
    pub fn submit(&self, actor: ActorRef) {
        // the receiver lives in `self`, so this cannot fail
        let _ = self.tx.send(Job::Run(actor));
    }

    pub fn on_spawned(&self) {
        self.spawned.fetch_add(1, Ordering::Relaxed);
        let live = self.live.fetch_add(1, Ordering::AcqRel) + 1;
        self.peak.fetch_max(live, Ordering::AcqRel);
    }

    pub fn on_terminated(&self) {
        self.live.fetch_sub(1, Ordering::AcqRel);
    }
}

/// Worker pool running event-based actors. Dropping a scheduler stops its
/// workers; actors still waiting for messages are never run again.
pub struct Scheduler {
    inner: Arc<SchedInner>,
    workers: Vec<JoinHandle<()>>,
}

impl Scheduler {
    pub fn new(config: SchedulerConfig) -> Scheduler {
        assert!(config.pool_size > 0, "pool size must be positive");
        assert!(config.budget > 0, "budget must be positive");
        let (tx, rx) = unbounded();
        let inner = Arc::new(SchedInner {
            tx,
            rx,
            config,
            spawned: AtomicU64::new(0),
            live: AtomicU64::new(0),
            peak: AtomicU64::new(0),
        });
        let workers = (0..config.pool_size)
            .map(|i| {
                let rx = inner.rx.clone();
                thread::Builder::new()
                    .name(format!("actor-worker-{i}"))
                    .spawn(move || worker(rx))
                    .expect("failed to start worker thread")
            })
            .collect();
        Scheduler { inner, workers }
    }

    pub fn with_pool_size(pool_size: usize) -> Scheduler {
        Scheduler::new(SchedulerConfig {
            pool_size,
            ..SchedulerConfig::default()
        })
    }

    /// Process-wide default scheduler, sized by [`SchedulerConfig::default`].
    pub fn global() -> &'static Scheduler {
        static GLOBAL: OnceLock<Scheduler> = OnceLock::new();
        GLOBAL.get_or_init(|| Scheduler::new(SchedulerConfig::default()))
    }

    pub fn config(&self) -> SchedulerConfig {
        self.inner.config
    }

    pub fn pool_size(&self) -> usize {
        self.inner.config.pool_size
    }

    pub fn stats(&self) -> SchedulerStats {
        SchedulerStats {
            spawned: self.inner.spawned.load(Ordering::Acquire),
            live: self.inner.live.load(Ordering::Acquire),
            peak: self.inner.peak.load(Ordering::Acquire),
        }
    }

    /// Spawns an event-based actor. `init` runs as the actor's first turn
    /// and should install a behavior with [`become_`](super::become_);
    /// an actor without behavior terminates normally right after `init`.
    pub fn spawn(&self, init: impl FnOnce() + Send + 'static) -> ActorRef {
        spawn_pooled(&self.inner, init)
    }

    /// Spawns an actor on its own thread. It may use blocking receives.
    pub fn spawn_detached(&self, body: impl FnOnce() + Send + 'static) -> ActorRef {
        spawn_detached_in(&self.inner, body)
    }

    pub(crate) fn inner(&self) -> &Arc<SchedInner> {
        &self.inner
    }
}

impl Drop for Scheduler {
    fn drop(&mut self) {
        for _ in &self.workers {
            let _ = self.inner.tx.send(Job::Stop);
        }
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
        while self.inner.rx.try_recv().is_ok() {}
    }
}

fn worker(rx: Receiver<Job>) {
    while let Ok(Job::Run(actor)) = rx.recv() {
        context::run_turn(actor);
    }
}

pub(crate) fn spawn_pooled(
    sched: &Arc<SchedInner>,
    init: impl FnOnce() + Send + 'static,
) -> ActorRef {
    let actor = ActorRef::new(Mode::Pooled, sched.clone());
    let mut ctx = Context::new(actor.clone());
    ctx.init = Some(Box::new(init));
    *actor.0.parked.lock().unwrap() = Some(Box::new(ctx));
    sched.on_spawned();
    sched.submit(actor.clone());
    actor
}

pub(crate) fn spawn_detached_in(
    sched: &Arc<SchedInner>,
    body: impl FnOnce() + Send + 'static,
) -> ActorRef {
    let actor = ActorRef::new(Mode::Detached, sched.clone());
    sched.on_spawned();
    let me = actor.clone();
    thread::Builder::new()
        .name(format!("actor-{}", actor.id()))
        .spawn(move || context::run_detached(me, body))
        .expect("failed to start actor thread");
    actor
}
