//! Failures spread along links; monitors only get told about them.

use std::time::Duration;

use actor_core::pattern::*;
use actor_core::runtime::*;
use actor_core::{atom, behavior, tuple};

fn idle() -> ActorRef {
    spawn(|| {
        become_(behavior![
            on([lit(atom("crash"))]).handle(|| quit(ExitReason::failure("crashed"))),
            on_arg_match().handle(|m: ExitMessage| println!(
                "trapped exit from {:?}: {}",
                m.source, m.reason
            )),
        ])
    })
}

fn main() {
    let a = idle();
    let b = idle();
    let c = spawn(|| {
        trap_exit(true);
        become_(behavior![on_arg_match().handle(|m: ExitMessage| {
            println!("c trapped exit from {:?}: {}", m.source, m.reason)
        })])
    });
    link_actors(&a, &b);
    link_actors(&b, &c);
    for x in [&a, &b, &c] {
        monitor(x);
    }

    send(&a, tuple![atom("crash")]);
    for _ in 0..2 {
        receive(&behavior![
            on_arg_match().handle(|d: DownMessage| println!("down {:?}: {}", d.source, d.reason)),
            after(Duration::from_secs(1)).handle(|| println!("timeout")),
        ])
        .unwrap();
    }
    println!(
        "a {:?}, b {:?}, c alive: {}",
        a.exit_reason(),
        b.exit_reason(),
        c.is_alive()
    );
}
