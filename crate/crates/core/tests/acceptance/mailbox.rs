use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Barrier};
use std::thread;
use std::time::{Duration, Instant};

use actor_core::mailbox::{CachedStack, EnqueueResult};

use crate::{check, Verdict};

/// Returns (messages received, per-producer order violations, global order
/// violations).
fn stress(producers: usize, per_producer: u64) -> (u64, u64, u64) {
    let q = Arc::new(CachedStack::<(usize, u64)>::new());
    let start = Arc::new(Barrier::new(producers + 1));
    let hs: Vec<_> = (0..producers)
        .map(|p| {
            let (q, start) = (q.clone(), start.clone());
            thread::spawn(move || {
                start.wait();
                for seq in 0..per_producer {
                    q.enqueue((p, seq));
                }
            })
        })
        .collect();
    start.wait();
    let total = producers as u64 * per_producer;
    let mut next = vec![0u64; producers];
    let (mut received, mut fifo, mut global) = (0u64, 0u64, 0u64);
    let mut last = None;
    while received < total {
        // SAFETY: this thread is the only consumer
        match unsafe { q.try_dequeue() } {
            Some((p, seq)) => {
                if seq != next[p] {
                    fifo += 1;
                }
                next[p] = seq + 1;
                if last.is_some_and(|l| l >= seq) {
                    global += 1;
                }
                last = Some(seq);
                received += 1;
            }
            None => thread::yield_now(),
        }
    }
    for h in hs {
        h.join().unwrap();
    }
    // nothing beyond the expected multiset
    if unsafe { q.try_dequeue() }.is_some() {
        received += 1;
    }
    (received, fifo, global)
}

pub fn linearizability() -> Verdict {
    let start = Instant::now();
    let mut bad_runs = 0;
    for _ in 0..100 {
        let (received, fifo, _) = stress(8, 100_000);
        if received != 800_000 || fifo != 0 {
            bad_runs += 1;
        }
    }
    let (received, fifo, global) = stress(1, 100_000);
    let single_ok = received == 100_000 && fifo == 0 && global == 0;
    let took = start.elapsed();
    check(
        bad_runs == 0 && single_ok && took < Duration::from_secs(30),
        format!("100 runs of 8x100000, {bad_runs} bad; single producer exact FIFO: {single_ok}; {took:?} (limit 30s)"),
    )
}

/// A consumer repeatedly drains and blocks while producers race to enqueue.
/// Each BLOCKED period must end with exactly one `EnqueuedNeedsWakeup`.
pub fn wakeup_exactness() -> Verdict {
    const PERIODS: u64 = 10_000;
    const PRODUCERS: usize = 3;
    let q = Arc::new(CachedStack::<u64>::new());
    let wakeups = Arc::new(AtomicU64::new(0));
    let stop = Arc::new(AtomicBool::new(false));
    let hs: Vec<_> = (0..PRODUCERS)
        .map(|_| {
            let (q, wakeups, stop) = (q.clone(), wakeups.clone(), stop.clone());
            thread::spawn(move || {
                let mut i = 0u64;
                while !stop.load(Ordering::Acquire) {
                    match q.enqueue(i) {
                        EnqueueResult::EnqueuedNeedsWakeup => {
                            wakeups.fetch_add(1, Ordering::AcqRel);
                        }
                        EnqueueResult::Enqueued => {}
                        EnqueueResult::Closed => break,
                    }
                    i += 1;
                    if i.is_multiple_of(4) {
                        thread::yield_now();
                    }
                }
            })
        })
        .collect();
    let mut periods = 0u64;
    let mut violations = 0u64;
    while periods < PERIODS {
        // SAFETY: single consumer
        while unsafe { q.try_dequeue() }.is_some() {}
        if unsafe { q.mark_blocked_if_empty() } {
            periods += 1;
            while wakeups.load(Ordering::Acquire) < periods {
                thread::yield_now();
            }
            // a second wakeup for the same period would show up here, since
            // the mailbox is not blocked again until the next iteration
            while unsafe { q.try_dequeue() }.is_some() {}
            if wakeups.load(Ordering::Acquire) != periods {
                violations += 1;
            }
        }
    }
    stop.store(true, Ordering::Release);
    // SAFETY: single consumer
    unsafe { q.close() };
    for h in hs {
        h.join().unwrap();
    }
    let total = wakeups.load(Ordering::Acquire);
    check(
        violations == 0 && total == PERIODS,
        format!(
            "{periods} blocked periods, {total} wakeups, {violations} periods with extra wakeups"
        ),
    )
}
