use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use crate::pattern::{after, on_arg_match, on_types};
use crate::runtime::{
    become_, current_actor, quit, receive, send, ExitReason, Scheduler, SchedulerConfig,
};
use crate::{behavior, tuple};

use super::{peak_rss, BenchError, BenchReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MailboxBenchConfig {
    pub senders: usize,
    pub messages_per_sender: u64,
    /// Worker threads; `None` uses the default pool size.
    pub pool_size: Option<usize>,
}

impl Default for MailboxBenchConfig {
    fn default() -> Self {
        MailboxBenchConfig {
            senders: 20,
            messages_per_sender: 1_000_000,
            pool_size: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MailboxOutcome {
    pub report: BenchReport,
    pub expected_messages: u64,
    /// Messages that arrived out of their sender's order.
    pub fifo_violations: u64,
}

impl MailboxOutcome {
    pub fn counts_hold(&self) -> bool {
        self.report.messages_processed == self.expected_messages && self.fifo_violations == 0
    }
}

/// `senders` plain threads each send `messages_per_sender` sequence-numbered
/// tuples to one pooled receiver, which audits per-sender order.
pub fn run_mailbox_bench(config: &MailboxBenchConfig) -> Result<MailboxOutcome, BenchError> {
    if config.senders == 0 || config.messages_per_sender == 0 {
        return Err(BenchError::InvalidConfig(
            "senders and messages must be at least 1".into(),
        ));
    }
    let total = config.senders as u64 * config.messages_per_sender;
    let mut sched_config = SchedulerConfig::default();
    if let Some(p) = config.pool_size {
        sched_config.pool_size = p;
    }
    let sched = Scheduler::new(sched_config);
    let host = current_actor();
    let violations = Arc::new(AtomicU64::new(0));
    let processed = Arc::new(AtomicU64::new(0));

    let start = Instant::now();
    let receiver = {
        let (violations, processed, host) = (violations.clone(), processed.clone(), host.clone());
        let senders = config.senders;
        sched.spawn(move || {
            let next = Mutex::new(vec![0u64; senders]);
            become_(behavior![on_types::<(u32, u64)>().handle(
                move |s: u32, seq: u64| {
                    let mut next = next.lock().unwrap();
                    let expected = &mut next[s as usize];
                    if seq != *expected {
                        violations.fetch_add(1, Ordering::Relaxed);
                    }
                    *expected = seq + 1;
                    if processed.fetch_add(1, Ordering::Relaxed) + 1 == total {
                        send(&host, tuple![true]);
                        quit(ExitReason::Normal);
                    }
                }
            )]);
        })
    };
    let producers: Vec<_> = (0..config.senders)
        .map(|s| {
            let receiver = receiver.clone();
            let n = config.messages_per_sender;
            thread::spawn(move || {
                for seq in 0..n {
                    send(&receiver, tuple![s as u32, seq]);
                }
            })
        })
        .collect();

    let limit = Duration::from_secs(3600);
    let finished = Arc::new(AtomicU64::new(0));
    let f = finished.clone();
    receive(&behavior![
        on_arg_match().handle(move |_: bool| {
            f.store(1, Ordering::Relaxed);
        }),
        after(limit).handle(|| {}),
    ])
    .map_err(|_| BenchError::Timeout(limit))?;
    let wall = start.elapsed();
    for p in producers {
        let _ = p.join();
    }
    if finished.load(Ordering::Relaxed) == 0 {
        return Err(BenchError::Timeout(limit));
    }
    let stats = sched.stats();
    Ok(MailboxOutcome {
        report: BenchReport {
            wall_time: wall.as_secs_f64(),
            messages_processed: processed.load(Ordering::Relaxed),
            actors_created: stats.spawned,
            peak_concurrent_actors: stats.peak,
            pool_size: sched.pool_size(),
            peak_rss: peak_rss(),
        },
        expected_messages: total,
        fifo_violations: violations.load(Ordering::Relaxed),
    })
}
