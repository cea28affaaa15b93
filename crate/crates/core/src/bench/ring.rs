use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crate::atom::atom;
use crate::pattern::{after, lit, on, val, PartialFunction};
use crate::runtime::{
    become_, current_actor, quit, receive, receive_for, send, spawn, ActorRef, ExitReason,
    Scheduler, SchedulerConfig,
};
use crate::{behavior, tuple};

use super::{peak_rss, prime_factors, BenchError, BenchReport};

/// 329,545,133 × 86,028,157.
pub const DEFAULT_FACTOR_TARGET: u64 = 28_350_160_440_309_881;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingBenchConfig {
    pub rings: usize,
    /// Chain links per ring, not counting the master.
    pub chain_length: usize,
    pub token_initial: u64,
    /// How many times each master builds a fresh ring.
    pub respawns: usize,
    pub factor_target: u64,
    pub pool_size: Option<usize>,
}

impl Default for RingBenchConfig {
    fn default() -> Self {
        RingBenchConfig {
            rings: 20,
            chain_length: 49,
            token_initial: 10_000,
            respawns: 5,
            factor_target: DEFAULT_FACTOR_TARGET,
            pool_size: None,
        }
    }
}

/// Counts a correct run must produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingCounts {
    pub token_messages: u64,
    /// Chain links spawned by all masters together.
    pub master_spawned: u64,
    /// Everything spawned: links, masters, workers and the collector.
    pub actors_created: u64,
    pub peak_concurrent: u64,
}

impl RingBenchConfig {
    pub fn expected(&self) -> RingCounts {
        let (r, l, s) = (
            self.rings as u64,
            self.chain_length as u64,
            self.respawns as u64,
        );
        RingCounts {
            token_messages: r * s * self.token_initial * (l + 1),
            master_spawned: r * l * s,
            actors_created: r * l * s + 2 * r + 1,
            peak_concurrent: r * (l + 1) + r + 1,
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.rings == 0
            || self.chain_length == 0
            || self.token_initial == 0
            || self.respawns == 0
        {
            return Err(BenchError::InvalidConfig(
                "rings, chain, token and respawns must be at least 1".into(),
            ));
        }
        if self.factor_target < 2 {
            return Err(BenchError::Domain(self.factor_target));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingOutcome {
    pub report: BenchReport,
    pub expected: RingCounts,
    pub master_spawned: u64,
    /// Factorization as reported by the workers.
    pub factors: Vec<u64>,
    pub factor_results: u64,
    /// Results whose product did not equal the target.
    pub bad_results: u64,
}

impl RingOutcome {
    pub fn counts_hold(&self) -> bool {
        let r = &self.report;
        let e = &self.expected;
        r.messages_processed == e.token_messages
            && self.master_spawned == e.master_spawned
            && r.actors_created == e.actors_created
            && r.peak_concurrent_actors == e.peak_concurrent
            && self.bad_results == 0
    }
}

/// Bench-level bookkeeping. An actor counts as live from just before it is
/// spawned until it has finished its part of the protocol; chain links stop
/// counting before passing on the final token, so a master never builds a
/// new ring while the old one is still counted.
#[derive(Default)]
struct Counters {
    tokens: AtomicU64,
    live: AtomicU64,
    peak: AtomicU64,
    master_spawned: AtomicU64,
}

impl Counters {
    fn up(&self) {
        let live = self.live.fetch_add(1, Ordering::AcqRel) + 1;
        self.peak.fetch_max(live, Ordering::AcqRel);
    }

    fn down(&self) {
        self.live.fetch_sub(1, Ordering::AcqRel);
    }
}

fn chain_link(next: ActorRef, counters: Arc<Counters>) {
    become_(behavior![on([lit(atom("token")), val::<u64>()]).handle(
        move |n: u64| {
            counters.tokens.fetch_add(1, Ordering::Relaxed);
            if n == 0 {
                counters.down();
                send(&next, tuple![atom("token"), 0u64]);
                quit(ExitReason::Normal);
            } else {
                send(&next, tuple![atom("token"), n]);
            }
        }
    )]);
}

fn spawn_ring(chain_length: usize, counters: &Arc<Counters>) -> ActorRef {
    let mut next = current_actor();
    for _ in 0..chain_length {
        counters.up();
        counters.master_spawned.fetch_add(1, Ordering::Relaxed);
        let (n, c) = (next, counters.clone());
        next = spawn(move || chain_link(n, c));
    }
    next
}

struct Master {
    config: RingBenchConfig,
    worker: ActorRef,
    collector: ActorRef,
    counters: Arc<Counters>,
    round: Mutex<(usize, Option<ActorRef>)>,
}

impl Master {
    fn start_round(self: &Arc<Self>, first: ActorRef) {
        // the injection already counts as handling the initial value
        send(&first, tuple![atom("token"), self.config.token_initial - 1]);
        send(
            &self.worker,
            tuple![atom("calc"), self.config.factor_target],
        );
        self.round.lock().unwrap().1 = Some(first);
        let me = self.clone();
        become_(behavior![
            on([lit(atom("token")), val::<u64>()]).handle(move |x: u64| me.on_token(x))
        ]);
    }

    fn on_token(self: &Arc<Self>, x: u64) {
        self.counters.tokens.fetch_add(1, Ordering::Relaxed);
        if x > 0 {
            let next = self.round.lock().unwrap().1.clone().expect("ring running");
            send(&next, tuple![atom("token"), x - 1]);
            return;
        }
        let round = {
            let mut r = self.round.lock().unwrap();
            r.0 += 1;
            r.0
        };
        if round < self.config.respawns {
            let first = spawn_ring(self.config.chain_length, &self.counters);
            self.start_round(first);
        } else {
            send(&self.worker, tuple![atom("done")]);
            send(&self.collector, tuple![atom("mdone")]);
            self.counters.down();
            quit(ExitReason::Normal);
        }
    }
}

fn worker(collector: ActorRef, counters: Arc<Counters>) -> PartialFunction {
    behavior![
        on([lit(atom("calc")), val::<u64>()]).handle(move |x: u64| {
            let f = prime_factors(x).unwrap_or_default();
            send(&collector, tuple![atom("result"), f]);
        }),
        on([lit(atom("done"))]).handle(move || {
            counters.down();
            quit(ExitReason::Normal);
        }),
    ]
}

#[derive(Default)]
struct Tally {
    results: u64,
    bad: u64,
    masters_done: usize,
    factors: Vec<u64>,
}

fn collector(config: RingBenchConfig, host: ActorRef, counters: Arc<Counters>) -> PartialFunction {
    let tally = Arc::new(Mutex::new(Tally::default()));
    let expected = (config.rings * config.respawns) as u64;
    let finish = move |t: &Tally| {
        if t.results == expected && t.masters_done == config.rings {
            send(
                &host,
                tuple![atom("finished"), t.factors.clone(), t.results, t.bad],
            );
            counters.down();
            quit(ExitReason::Normal);
        }
    };
    let (t1, f1) = (tally.clone(), finish.clone());
    behavior![
        on([lit(atom("result")), val::<Vec<u64>>()]).handle(move |f: Vec<u64>| {
            let mut t = t1.lock().unwrap();
            t.results += 1;
            if f.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p)) != Some(config.factor_target) {
                t.bad += 1;
            }
            t.factors = f;
            f1(&t);
        }),
        on([lit(atom("mdone"))]).handle(move || {
            let mut t = tally.lock().unwrap();
            t.masters_done += 1;
            finish(&t);
        }),
    ]
}

/// Runs `rings` masters, each building a ring of `chain_length` links
/// `respawns` times and circulating a token `token_initial` times around it,
/// while one worker per ring factors `factor_target` once per round.
pub fn run_ring_bench(config: &RingBenchConfig) -> Result<RingOutcome, BenchError> {
    config.validate()?;
    let config = *config;
    let mut sched_config = SchedulerConfig::default();
    if let Some(p) = config.pool_size {
        sched_config.pool_size = p;
    }
    let sched = Scheduler::new(sched_config);
    let counters = Arc::new(Counters::default());
    let host = current_actor();
    let limit = Duration::from_secs(3600);

    let start = Instant::now();
    counters.up();
    let collector = {
        let (h, c) = (host.clone(), counters.clone());
        sched.spawn(move || become_(collector(config, h, c)))
    };
    let mut masters = Vec::with_capacity(config.rings);
    for _ in 0..config.rings {
        counters.up();
        let (col, c) = (collector.clone(), counters.clone());
        let worker = sched.spawn(move || become_(worker(col, c)));
        counters.up();
        let master = Arc::new(Master {
            config,
            worker,
            collector: collector.clone(),
            counters: counters.clone(),
            round: Mutex::new((0, None)),
        });
        let h = host.clone();
        masters.push(sched.spawn(move || {
            // build the first ring, then wait until every master is ready so
            // that all rings are populated at the same time once
            let first = spawn_ring(master.config.chain_length, &master.counters);
            send(&h, tuple![atom("ready")]);
            become_(behavior![
                on([lit(atom("go"))]).handle(move || master.start_round(first.clone()))
            ]);
        }));
    }
    let timed_out = Arc::new(AtomicU64::new(0));
    let t = timed_out.clone();
    receive_for(
        config.rings,
        &behavior![
            on([lit(atom("ready"))]).handle(|| {}),
            after(limit).handle(move || {
                t.store(1, Ordering::Relaxed);
            }),
        ],
    )
    .map_err(|_| BenchError::Timeout(limit))?;
    if timed_out.load(Ordering::Relaxed) != 0 {
        return Err(BenchError::Timeout(limit));
    }
    for m in &masters {
        send(m, tuple![atom("go")]);
    }
    let result = Arc::new(Mutex::new(None));
    let r = result.clone();
    receive(&behavior![
        on([
            lit(atom("finished")),
            val::<Vec<u64>>(),
            val::<u64>(),
            val::<u64>()
        ])
        .handle(move |f: Vec<u64>, n: u64, bad: u64| {
            *r.lock().unwrap() = Some((f, n, bad));
        }),
        after(limit).handle(|| {}),
    ])
    .map_err(|_| BenchError::Timeout(limit))?;
    let wall = start.elapsed();
    let (factors, factor_results, bad_results) = result
        .lock()
        .unwrap()
        .take()
        .ok_or(BenchError::Timeout(limit))?;

    Ok(RingOutcome {
        report: BenchReport {
            wall_time: wall.as_secs_f64(),
            messages_processed: counters.tokens.load(Ordering::Relaxed),
            actors_created: sched.stats().spawned,
            peak_concurrent_actors: counters.peak.load(Ordering::Relaxed),
            pool_size: sched.pool_size(),
            peak_rss: peak_rss(),
        },
        expected: config.expected(),
        master_spawned: counters.master_spawned.load(Ordering::Relaxed),
        factors,
        factor_results,
        bad_results,
    })
}
