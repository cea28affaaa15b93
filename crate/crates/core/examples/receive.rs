//! Blocking receive: loops, counted receives and timeouts.

use std::sync::atomic::{AtomicI32, Ordering};
use std::sync::Arc;
use std::time::Duration;

use actor_core::pattern::*;
use actor_core::runtime::*;
use actor_core::{atom, behavior, tuple};

fn main() {
    let me = current_actor();
    for i in 1..=5 {
        send(&me, tuple![i]);
    }
    send(&me, tuple![atom("stop")]);

    let sum = Arc::new(AtomicI32::new(0));
    let s = sum.clone();
    receive_for(
        3,
        &behavior![on_arg_match().handle(move |i: i32| {
            s.fetch_add(i, Ordering::Relaxed);
        })],
    )
    .unwrap();
    println!("first three sum to {}", sum.load(Ordering::Relaxed));

    let done = Arc::new(AtomicI32::new(0));
    let (s, d) = (sum.clone(), done.clone());
    do_receive(&behavior![
        on_arg_match().handle(move |i: i32| {
            s.fetch_add(i, Ordering::Relaxed);
        }),
        on([lit(atom("stop"))]).handle(move || {
            d.store(1, Ordering::Relaxed);
        }),
    ])
    .until(|| done.load(Ordering::Relaxed) == 1)
    .unwrap();
    println!("total {}", sum.load(Ordering::Relaxed));

    receive(&behavior![
        others().handle(|| println!("unexpected")),
        after(Duration::from_millis(50)).handle(|| println!("nothing within 50ms")),
    ])
    .unwrap();
}
