//! Pooled, detached and converted actors talking to each other.

use std::time::Duration;

use actor_core::pattern::*;
use actor_core::runtime::*;
use actor_core::{behavior, tuple};

fn main() {
    // main itself becomes an actor the first time it uses the runtime
    let me = current_actor();

    let pooled = spawn(|| {
        become_(behavior![on_arg_match().handle(|s: String| {
            reply(tuple![format!("pooled got {s:?}")]).unwrap();
        })])
    });

    let detached = spawn_detached(move || {
        // a detached actor owns its thread and may block
        std::thread::sleep(Duration::from_millis(10));
        receive(&behavior![on_arg_match().handle(|n: i32| {
            reply(tuple![format!("detached got {n}")]).unwrap();
        })])
        .unwrap();
    });
    println!("detached: {}", detached.is_detached());

    send(&pooled, tuple!["hi"]);
    send(&detached, tuple![7]);
    for _ in 0..2 {
        receive(&behavior![
            on_arg_match().handle(|s: String| println!("{s}")),
            after(Duration::from_secs(2)).handle(|| println!("timed out")),
        ])
        .unwrap();
    }
    let _ = me;
}
