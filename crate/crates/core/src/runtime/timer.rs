use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::sync::{Arc, Condvar, Mutex, OnceLock, Weak};
use std::thread;
use std::time::{Duration, Instant};

use super::cell::{ActorCell, ActorRef, EnvKind, Envelope, TimeoutId};

struct Entry {
    at: Instant,
    seq: u64,
    target: Weak<ActorCell>,
    id: TimeoutId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        (self.at, self.seq) == (other.at, other.seq)
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.at, self.seq).cmp(&(other.at, other.seq))
    }
}

#[derive(Default)]
struct Queue {
    heap: BinaryHeap<Reverse<Entry>>,
    seq: u64,
}

struct Timer {
    queue: Mutex<Queue>,
    cond: Condvar,
}

fn timer() -> &'static Arc<Timer> {
    static TIMER: OnceLock<Arc<Timer>> = OnceLock::new();
    TIMER.get_or_init(|| {
        let t = Arc::new(Timer {
            queue: Mutex::new(Queue::default()),
            cond: Condvar::new(),
        });
        let t2 = t.clone();
        thread::Builder::new()
            .name("actor-timer".into())
            .spawn(move || run(&t2))
            .expect("failed to start timer thread");
        t
    })
}

/// Delivers a timeout signal to `target` after `after`. Nothing happens if
/// the actor is gone by then.
pub(crate) fn schedule(target: &ActorRef, after: Duration, id: TimeoutId) {
    let t = timer();
    let mut q = t.queue.lock().unwrap();
    q.seq += 1;
    let seq = q.seq;
    q.heap.push(Reverse(Entry {
        at: Instant::now() + after,
        seq,
        target: Arc::downgrade(&target.0),
        id,
    }));
    t.cond.notify_one();
}

fn run(t: &Timer) {
    let mut q = t.queue.lock().unwrap();
    loop {
        let now = Instant::now();
        let mut due = Vec::new();
        while q.heap.peek().is_some_and(|Reverse(e)| e.at <= now) {
            due.push(q.heap.pop().unwrap().0);
        }
        if !due.is_empty() {
            drop(q);
            for e in due {
                if let Some(cell) = e.target.upgrade() {
                    ActorRef(cell).deliver(Envelope::signal(EnvKind::Timeout(e.id)));
                }
            }
            q = t.queue.lock().unwrap();
            continue;
        }
        q = match q.heap.peek() {
            Some(Reverse(e)) => {
                let wait = e.at.saturating_duration_since(now);
                t.cond.wait_timeout(q, wait).unwrap().0
            }
            None => t.cond.wait(q).unwrap(),
        };
    }
}
