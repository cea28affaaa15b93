use std::thread;
use std::time::Duration;

use actor_core::bench::{
    prime_factors, run_mailbox_bench, run_ring_bench, MailboxBenchConfig, RingBenchConfig,
    DEFAULT_FACTOR_TARGET,
};

use crate::{check, Verdict};

pub const FULL_SCALE_ENV: &str = "ACTOR_FULL_SCALE";

pub fn ring_desk_scale() -> Verdict {
    let config = RingBenchConfig {
        rings: 2,
        chain_length: 4,
        token_initial: 100,
        respawns: 2,
        ..RingBenchConfig::default()
    };
    let mut factors = prime_factors(DEFAULT_FACTOR_TARGET).unwrap();
    factors.sort_unstable();
    let factors_ok = factors == [86_028_157, 329_545_133];
    match run_ring_bench(&config) {
        Ok(o) => {
            let ok = o.report.messages_processed == 2_000
                && o.master_spawned == 16
                && o.report.peak_concurrent_actors == 13
                && o.counts_hold()
                && o.factors == factors
                && factors_ok
                && o.report.wall_time < 10.0;
            check(
                ok,
                format!(
                    "{} tokens (want 2000), {} master-spawned (want 16), peak {} (want 13), factors {:?}, {:.2}s (limit 10s)",
                    o.report.messages_processed,
                    o.master_spawned,
                    o.report.peak_concurrent_actors,
                    o.factors,
                    o.report.wall_time
                ),
            )
        }
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

pub fn full_scale() -> Verdict {
    if std::env::var_os(FULL_SCALE_ENV).is_none() {
        return Verdict::Skip(format!("(long run; set {FULL_SCALE_ENV}=1 to enable)"));
    }
    let mailbox = run_mailbox_bench(&MailboxBenchConfig::default());
    let ring = run_ring_bench(&RingBenchConfig::default());
    match (mailbox, ring) {
        (Ok(m), Ok(r)) => check(
            m.report.messages_processed == 20_000_000
                && m.counts_hold()
                && r.report.messages_processed == 50_000_000
                && r.counts_hold(),
            format!(
                "mailbox {} messages in {:.1}s (want 20000000), ring {} tokens in {:.1}s (want 50000000)",
                m.report.messages_processed, m.report.wall_time, r.report.messages_processed, r.report.wall_time
            ),
        ),
        (m, r) => Verdict::Fail(format!("mailbox: {:?}, ring: {:?}", m.err(), r.err())),
    }
}

pub fn scaling_smoke() -> Verdict {
    let cores = thread::available_parallelism().map_or(1, |n| n.get());
    let run = |pool| {
        run_mailbox_bench(&MailboxBenchConfig {
            senders: 8,
            messages_per_sender: 250_000,
            pool_size: Some(pool),
        })
        .map(|o| Duration::from_secs_f64(o.report.wall_time))
    };
    match (run(1), run(4)) {
        (Ok(one), Ok(four)) => {
            let verdict = if cores < 4 {
                format!("not assessed on {cores} core(s)")
            } else if four <= one {
                "pool=4 no slower than pool=1".to_string()
            } else {
                "pool=4 slower than pool=1 (report only)".to_string()
            };
            Verdict::Report(format!(
                "8x250000: pool=1 {one:.2?}, pool=4 {four:.2?}; {verdict}"
            ))
        }
        (a, b) => Verdict::Report(format!("bench error: {:?} / {:?}", a.err(), b.err())),
    }
}
