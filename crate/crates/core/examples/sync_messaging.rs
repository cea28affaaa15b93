//! Request/response with handles: blocking await, then-continuations and
//! timeouts.

use std::thread;
use std::time::Duration;

use actor_core::pattern::*;
use actor_core::runtime::*;
use actor_core::{atom, behavior, tuple};

fn main() {
    let calc = spawn(|| {
        become_(behavior![
            on([lit(atom("add")), val::<i32>(), val::<i32>()]).handle(|a: i32, b: i32| {
                reply(tuple![a + b]).unwrap();
            }),
            on([lit(atom("slow"))]).handle(|| {
                thread::sleep(Duration::from_millis(200));
                reply(tuple![0]).unwrap();
            }),
        ])
    });

    let h1 = sync_send(&calc, tuple![atom("add"), 1, 2]);
    let h2 = sync_send(&calc, tuple![atom("add"), 10, 20]);
    // each handle only ever sees its own response
    for (name, h) in [("second", h2), ("first", h1)] {
        h.await_with(&behavior![
            on_arg_match().handle(move |n: i32| println!("{name}: {n}")),
            after(Duration::from_secs(1)).handle(|| println!("timeout")),
        ])
        .unwrap();
    }

    sync_send(&calc, tuple![atom("slow")])
        .await_with(&behavior![
            on_arg_match().handle(|_: i32| println!("too late to matter")),
            after(Duration::from_millis(50)).handle(|| println!("slow request timed out")),
        ])
        .unwrap();

    // an event-based client continues with `then` instead of blocking
    let me = current_actor();
    spawn(move || {
        let me = me.clone();
        sync_send(&calc, tuple![atom("add"), 40, 2])
            .then(behavior![
                on_arg_match().handle(move |n: i32| send(&me, tuple![format!("then got {n}")])),
                after(Duration::from_secs(1)).handle(|| {}),
            ])
            .unwrap();
    });
    receive(&behavior![
        on_arg_match().handle(|s: String| println!("{s}")),
        after(Duration::from_secs(1)).handle(|| println!("timeout")),
    ])
    .unwrap();
}
