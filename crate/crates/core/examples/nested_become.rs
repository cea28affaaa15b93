//! An int pushes a behavior that waits for a float, then pops itself.

use std::time::Duration;

use actor_core::pattern::*;
use actor_core::runtime::*;
use actor_core::{behavior, tuple};

fn testee(host: ActorRef) {
    become_(behavior![on_arg_match().handle(move |i: i32| {
        let h = host.clone();
        become_keep(behavior![on_arg_match().handle(move |f: f32| {
            send(&h, tuple![format!("{i} => {f}")]);
            unbecome();
        })]);
    })]);
}

fn main() {
    let me = current_actor();
    let t = spawn(move || testee(me));
    // the float arrives first and is skipped until the int installs a
    // behavior that wants it
    send(&t, tuple![2.0f32]);
    send(&t, tuple![1]);
    send(&t, tuple![3]);
    send(&t, tuple![4.5f32]);
    for _ in 0..2 {
        receive(&behavior![
            on_arg_match().handle(|s: String| println!("{s}")),
            after(Duration::from_secs(1)).handle(|| println!("timeout")),
        ])
        .unwrap();
    }
}
