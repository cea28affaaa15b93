//! Cached-stack mailbox: many producers push onto an atomic LIFO intake with a
//! single CAS; the single consumer takes the whole intake at once, reverses it
//! and serves messages from a private FIFO cache.
//!
//! When the intake is empty the head slot doubles as the consumer status:
//! null means READY, a reserved sentinel means BLOCKED (the consumer went idle
//! and must be woken by the next producer), another sentinel means CLOSED.

use std::cell::{Cell, UnsafeCell};
use std::collections::VecDeque;
use std::ptr;
use std::sync::atomic::{AtomicPtr, AtomicU64, Ordering};

struct Node<T> {
    next: *mut Node<T>,
    value: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnqueueResult {
    Enqueued,
    /// The consumer was blocked; the caller must wake it.
    EnqueuedNeedsWakeup,
    /// The mailbox was closed and the value has been dropped.
    Closed,
}

pub struct CachedStack<T> {
    stack_tail: AtomicPtr<Node<T>>,
    cache: UnsafeCell<VecDeque<T>>,
    reversed: Cell<u64>,
    dequeued: Cell<u64>,
    enqueue_cas_failures: AtomicU64,
}

unsafe impl<T: Send> Send for CachedStack<T> {}
// producers only touch `stack_tail`; everything else is consumer-private
unsafe impl<T: Send> Sync for CachedStack<T> {}

fn blocked<T>() -> *mut Node<T> {
    ptr::without_provenance_mut(1)
}

fn closed<T>() -> *mut Node<T> {
    ptr::without_provenance_mut(2)
}

fn is_sentinel<T>(p: *mut Node<T>) -> bool {
    p == blocked() || p == closed()
}

impl<T> Default for CachedStack<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> CachedStack<T> {
    pub fn new() -> Self {
        CachedStack {
            stack_tail: AtomicPtr::new(ptr::null_mut()),
            cache: UnsafeCell::new(VecDeque::new()),
            reversed: Cell::new(0),
            dequeued: Cell::new(0),
            enqueue_cas_failures: AtomicU64::new(0),
        }
    }

    pub fn enqueue(&self, value: T) -> EnqueueResult {
        let node = Box::into_raw(Box::new(Node {
            next: ptr::null_mut(),
            value,
        }));
        let mut cur = self.stack_tail.load(Ordering::Relaxed);
        loop {
            if cur == closed() {
                // SAFETY: the node was never published
                drop(unsafe { Box::from_raw(node) });
                return EnqueueResult::Closed;
            }
            let next = if cur == blocked() {
                ptr::null_mut()
            } else {
                cur
            };
            // SAFETY: the node is still exclusively ours
            unsafe { (*node).next = next };
            match self.stack_tail.compare_exchange_weak(
                cur,
                node,
                Ordering::AcqRel,
                Ordering::Relaxed,
            ) {
                Ok(_) if cur == blocked() => return EnqueueResult::EnqueuedNeedsWakeup,
                Ok(_) => return EnqueueResult::Enqueued,
                Err(actual) => {
                    self.enqueue_cas_failures.fetch_add(1, Ordering::Relaxed);
                    cur = actual;
                }
            }
        }
    }

    /// Pops the oldest message.
    ///
    /// # Safety
    /// Only the single consumer may call this (or any other `unsafe` method),
    /// and never concurrently with itself.
    pub unsafe fn try_dequeue(&self) -> Option<T> {
        let cache = unsafe { &mut *self.cache.get() };
        if cache.is_empty() {
            self.fetch_new_data(cache);
        }
        let v = cache.pop_front();
        if v.is_some() {
            self.dequeued.set(self.dequeued.get() + 1);
        }
        v
    }

    /// Moves the whole intake into the cache. Returns false if there was
    /// nothing to take.
    fn fetch_new_data(&self, cache: &mut VecDeque<T>) -> bool {
        let mut head = self.stack_tail.load(Ordering::Acquire);
        loop {
            if head.is_null() || is_sentinel(head) {
                return false;
            }
            match self.stack_tail.compare_exchange(
                head,
                ptr::null_mut(),
                Ordering::AcqRel,
                Ordering::Acquire,
            ) {
                Ok(_) => break,
                Err(actual) => head = actual,
            }
        }
        // the taken list is newest-first
        let start = cache.len();
        let mut n = 0u64;
        while !head.is_null() {
            // SAFETY: the CAS above transferred ownership of the whole list
            let node = unsafe { Box::from_raw(head) };
            head = node.next;
            cache.push_back(node.value);
            n += 1;
        }
        cache.make_contiguous()[start..].reverse();
        self.reversed.set(self.reversed.get() + n);
        true
    }

    /// Flips an empty, READY mailbox to BLOCKED. Returns false if messages
    /// are available, in which case the consumer must keep draining. Calling
    /// it again while already blocked returns true and changes nothing.
    ///
    /// # Safety
    /// Consumer only.
    pub unsafe fn mark_blocked_if_empty(&self) -> bool {
        let cache = unsafe { &*self.cache.get() };
        if !cache.is_empty() {
            return false;
        }
        match self.stack_tail.compare_exchange(
            ptr::null_mut(),
            blocked(),
            Ordering::AcqRel,
            Ordering::Acquire,
        ) {
            Ok(_) => true,
            Err(actual) => is_sentinel(actual),
        }
    }

    /// Reverts BLOCKED to READY, e.g. when a timed wait expires. Returns
    /// false if a producer got there first (and is responsible for a wakeup).
    ///
    /// # Safety
    /// Consumer only.
    pub unsafe fn try_unblock(&self) -> bool {
        self.stack_tail
            .compare_exchange(
                blocked(),
                ptr::null_mut(),
                Ordering::AcqRel,
                Ordering::Acquire,
            )
            .is_ok()
    }

    pub fn is_blocked(&self) -> bool {
        self.stack_tail.load(Ordering::Acquire) == blocked()
    }

    pub fn is_closed(&self) -> bool {
        self.stack_tail.load(Ordering::Acquire) == closed()
    }

    /// Rejects all further enqueues and returns everything not yet dequeued,
    /// oldest first.
    ///
    /// # Safety
    /// Consumer only.
    pub unsafe fn close(&self) -> Vec<T> {
        let cache = unsafe { &mut *self.cache.get() };
        let mut head = self.stack_tail.swap(closed(), Ordering::AcqRel);
        if is_sentinel(head) {
            head = ptr::null_mut();
        }
        let mut intake = Vec::new();
        while !head.is_null() {
            // SAFETY: the swap transferred ownership of the list
            let node = unsafe { Box::from_raw(head) };
            head = node.next;
            intake.push(node.value);
        }
        intake.reverse();
        let mut out: Vec<T> = cache.drain(..).collect();
        out.extend(intake);
        out
    }

    /// Total number of nodes moved from the intake into the cache.
    ///
    /// # Safety
    /// Consumer only.
    pub unsafe fn reversed_total(&self) -> u64 {
        self.reversed.get()
    }

    /// # Safety
    /// Consumer only.
    pub unsafe fn dequeued_total(&self) -> u64 {
        self.dequeued.get()
    }

    /// Failed enqueue CAS attempts (contention retries) so far.
    pub fn enqueue_retries(&self) -> u64 {
        self.enqueue_cas_failures.load(Ordering::Relaxed)
    }
}

impl<T> Drop for CachedStack<T> {
    fn drop(&mut self) {
        let mut head = *self.stack_tail.get_mut();
        if is_sentinel(head) {
            return;
        }
        while !head.is_null() {
            // SAFETY: exclusive access during drop
            let node = unsafe { Box::from_raw(head) };
            head = node.next;
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::VecDeque;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::{Arc, Barrier};
    use std::thread;

    use proptest::prelude::*;

    use super::*;

    #[test]
    fn empty_and_single() {
        let q = CachedStack::new();
        assert_eq!(unsafe { q.try_dequeue() }, None::<i32>);
        assert_eq!(q.enqueue(1), EnqueueResult::Enqueued);
        assert_eq!(unsafe { q.try_dequeue() }, Some(1));
        assert_eq!(unsafe { q.try_dequeue() }, None);
    }

    #[test]
    fn fifo_single_producer() {
        let q = CachedStack::new();
        for i in 0..1000 {
            q.enqueue(i);
        }
        let out: Vec<i32> = std::iter::from_fn(|| unsafe { q.try_dequeue() }).collect();
        assert_eq!(out, (0..1000).collect::<Vec<_>>());
    }

    #[test]
    fn interleaved() {
        let q = CachedStack::new();
        q.enqueue('a');
        q.enqueue('b');
        assert_eq!(unsafe { q.try_dequeue() }, Some('a'));
        q.enqueue('c');
        assert_eq!(unsafe { q.try_dequeue() }, Some('b'));
        assert_eq!(unsafe { q.try_dequeue() }, Some('c'));
    }

    #[test]
    fn blocked_wakeup() {
        let q = CachedStack::new();
        assert!(unsafe { q.mark_blocked_if_empty() });
        assert!(unsafe { q.mark_blocked_if_empty() });
        assert_eq!(q.enqueue(1), EnqueueResult::EnqueuedNeedsWakeup);
        assert_eq!(q.enqueue(2), EnqueueResult::Enqueued);
        assert!(!unsafe { q.mark_blocked_if_empty() });
        assert_eq!(unsafe { q.try_dequeue() }, Some(1));
        assert!(!unsafe { q.mark_blocked_if_empty() });
    }

    #[test]
    fn unblock_after_timeout() {
        let q = CachedStack::new();
        assert!(unsafe { q.mark_blocked_if_empty() });
        assert!(unsafe { q.try_unblock() });
        assert_eq!(q.enqueue(1), EnqueueResult::Enqueued);
        assert!(!unsafe { q.try_unblock() });
    }

    #[test]
    fn close_returns_leftovers_and_rejects() {
        let q = CachedStack::new();
        q.enqueue(1);
        q.enqueue(2);
        assert_eq!(unsafe { q.try_dequeue() }, Some(1));
        q.enqueue(3);
        assert_eq!(unsafe { q.close() }, vec![2, 3]);
        assert_eq!(q.enqueue(4), EnqueueResult::Closed);
        assert!(q.is_closed());
    }

    #[test]
    fn drop_frees_intake() {
        let live = Arc::new(());
        let q = CachedStack::new();
        for _ in 0..10 {
            q.enqueue(live.clone());
        }
        drop(q);
        assert_eq!(Arc::strong_count(&live), 1);
    }

    #[derive(Debug, Clone)]
    enum Op {
        Enqueue(u8),
        Dequeue,
        Block,
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            any::<u8>().prop_map(Op::Enqueue),
            Just(Op::Dequeue),
            Just(Op::Block)
        ]
    }

    /// Two-container model: a LIFO stack plus a FIFO cache, and a status flag.
    #[derive(Default)]
    struct Model {
        stack: Vec<u8>,
        cache: VecDeque<u8>,
        blocked: bool,
    }

    impl Model {
        fn enqueue(&mut self, v: u8) -> EnqueueResult {
            self.stack.push(v);
            if std::mem::take(&mut self.blocked) {
                EnqueueResult::EnqueuedNeedsWakeup
            } else {
                EnqueueResult::Enqueued
            }
        }

        fn dequeue(&mut self) -> Option<u8> {
            if self.cache.is_empty() {
                while let Some(v) = self.stack.pop() {
                    self.cache.push_front(v);
                }
            }
            self.cache.pop_front()
        }

        fn block(&mut self) -> bool {
            if self.stack.is_empty() && self.cache.is_empty() {
                self.blocked = true;
            }
            self.stack.is_empty() && self.cache.is_empty()
        }
    }

    proptest! {
        #[test]
        fn matches_state_machine(ops in proptest::collection::vec(op(), 0..200)) {
            let q = CachedStack::new();
            let mut m = Model::default();
            for o in ops {
                match o {
                    Op::Enqueue(v) => prop_assert_eq!(q.enqueue(v), m.enqueue(v)),
                    Op::Dequeue => {
                        let got = unsafe { q.try_dequeue() };
                        if got.is_some() {
                            // a successful dequeue implies the consumer is running
                            m.blocked = false;
                        }
                        prop_assert_eq!(got, m.dequeue());
                    }
                    Op::Block => {
                        if unsafe { q.mark_blocked_if_empty() } != m.block() {
                            prop_assert!(false, "blocked status diverged");
                        }
                    }
                }
            }
            let (reversed, dequeued) = unsafe { (q.reversed_total(), q.dequeued_total()) };
            prop_assert!(reversed <= dequeued + m.cache.len() as u64);
        }
    }

    #[test]
    fn concurrent_producers_keep_per_producer_order() {
        const P: usize = 4;
        const N: u32 = 20_000;
        let q = Arc::new(CachedStack::<(usize, u32)>::new());
        let handles: Vec<_> = (0..P)
            .map(|p| {
                let q = q.clone();
                thread::spawn(move || {
                    for i in 0..N {
                        q.enqueue((p, i));
                    }
                })
            })
            .collect();
        let mut next = [0u32; P];
        let mut got = 0;
        while got < P * N as usize {
            if let Some((p, i)) = unsafe { q.try_dequeue() } {
                assert_eq!(i, next[p]);
                next[p] += 1;
                got += 1;
            }
        }
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(unsafe { q.try_dequeue() }, None);
        assert!(unsafe { q.reversed_total() } <= (P * N as usize) as u64);
    }

    #[test]
    fn one_wakeup_per_blocked_period() {
        const PRODUCERS: usize = 3;
        for _ in 0..200 {
            let q = Arc::new(CachedStack::<usize>::new());
            assert!(unsafe { q.mark_blocked_if_empty() });
            let wakeups = Arc::new(AtomicUsize::new(0));
            let barrier = Arc::new(Barrier::new(PRODUCERS));
            let hs: Vec<_> = (0..PRODUCERS)
                .map(|p| {
                    let (q, w, b) = (q.clone(), wakeups.clone(), barrier.clone());
                    thread::spawn(move || {
                        b.wait();
                        if q.enqueue(p) == EnqueueResult::EnqueuedNeedsWakeup {
                            w.fetch_add(1, Ordering::SeqCst);
                        }
                    })
                })
                .collect();
            for h in hs {
                h.join().unwrap();
            }
            assert_eq!(wakeups.load(Ordering::SeqCst), 1);
        }
    }
}
