//! The cached-stack mailbox on its own: several producers, one consumer.

use std::sync::Arc;
use std::thread;

use actor_core::mailbox::{CachedStack, EnqueueResult};

fn main() {
    let q = Arc::new(CachedStack::<(usize, u32)>::new());

    // an idle consumer marks the mailbox blocked; the next producer is told
    // to wake it
    assert!(unsafe { q.mark_blocked_if_empty() });
    assert_eq!(q.enqueue((0, 0)), EnqueueResult::EnqueuedNeedsWakeup);
    assert_eq!(q.enqueue((0, 1)), EnqueueResult::Enqueued);

    let producers: Vec<_> = (1..=3)
        .map(|p| {
            let q = q.clone();
            thread::spawn(move || {
                for i in 0..5 {
                    q.enqueue((p, i));
                }
            })
        })
        .collect();
    for h in producers {
        h.join().unwrap();
    }

    // SAFETY: this thread is the only consumer
    while let Some((p, i)) = unsafe { q.try_dequeue() } {
        print!("{p}:{i} ");
    }
    println!();
    println!("reversed {} nodes in total", unsafe { q.reversed_total() });

    let leftovers = unsafe { q.close() };
    println!(
        "closed with {} leftovers; enqueue now gives {:?}",
        leftovers.len(),
        q.enqueue((9, 9))
    );
}
