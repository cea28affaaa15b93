//! Many threads sending to one actor, with per-sender order audited.

use actor_core::bench::{run_mailbox_bench, MailboxBenchConfig};

fn main() {
    for pool in [1, 4] {
        let outcome = run_mailbox_bench(&MailboxBenchConfig {
            senders: 8,
            messages_per_sender: 50_000,
            pool_size: Some(pool),
        })
        .unwrap();
        println!("{}", outcome.report);
        println!("order violations: {}", outcome.fifo_violations);
    }
}
