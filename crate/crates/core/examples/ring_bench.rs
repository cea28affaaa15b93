//! The ring benchmark at a small size, with its expected counts.

use actor_core::bench::{run_ring_bench, RingBenchConfig};

fn main() {
    let config = RingBenchConfig {
        rings: 2,
        chain_length: 4,
        token_initial: 100,
        respawns: 2,
        ..RingBenchConfig::default()
    };
    let outcome = run_ring_bench(&config).unwrap();
    println!("{}", outcome.report);
    println!("expected {:?}", outcome.expected);
    println!("factors of {}: {:?}", config.factor_target, outcome.factors);
    println!("counts hold: {}", outcome.counts_hold());
}
