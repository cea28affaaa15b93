//! A supervisor that traps exits and restarts its worker a few times.

use std::time::Duration;

use actor_core::pattern::*;
use actor_core::runtime::*;
use actor_core::{atom, behavior, tuple};

fn flaky_worker() -> ActorRef {
    spawn(|| {
        become_(behavior![on_arg_match().handle(|n: i32| {
            if n % 3 == 0 {
                quit(ExitReason::failure(format!("cannot handle {n}")));
            } else {
                reply(tuple![n * n]).unwrap();
            }
        })])
    })
}

fn main() {
    trap_exit(true);
    let mut worker = flaky_worker();
    link(&worker);
    let mut restarts = 0;

    for n in 1..=7 {
        send(&worker, tuple![n]);
        receive(&behavior![
            on_arg_match().handle(move |sq: i32| println!("{n}^2 = {sq}")),
            on_arg_match().handle(|m: ExitMessage| println!("worker died: {}", m.reason)),
            after(Duration::from_secs(1)).handle(|| println!("timeout")),
        ])
        .unwrap();
        if !worker.is_alive() {
            restarts += 1;
            worker = flaky_worker();
            link(&worker);
        }
    }
    println!("{restarts} restarts");
    send(&worker, tuple![atom("bye")]);
}
