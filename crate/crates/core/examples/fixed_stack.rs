//! A bounded stack as a three-state actor. While full, pushes wait in the
//! mailbox until a pop makes room.

use std::sync::{Arc, Mutex};
use std::time::Duration;

use actor_core::pattern::*;
use actor_core::runtime::*;
use actor_core::{atom, behavior, tuple};

type Data = Arc<Mutex<Vec<i32>>>;

fn push(d: &Data, max: usize) -> Case {
    let d = d.clone();
    on([lit(atom("push")), val::<i32>()]).handle(move |v: i32| {
        let len = {
            let mut st = d.lock().unwrap();
            st.push(v);
            st.len()
        };
        become_(if len == max {
            full(d.clone(), max)
        } else {
            filled(d.clone(), max)
        });
    })
}

fn pop(d: &Data, max: usize) -> Case {
    let d = d.clone();
    on([lit(atom("pop"))]).handle(move || {
        let (v, left) = {
            let mut st = d.lock().unwrap();
            (st.pop().unwrap(), st.len())
        };
        reply(tuple![atom("ok"), v]).unwrap();
        become_(if left == 0 {
            empty(d.clone(), max)
        } else {
            filled(d.clone(), max)
        });
    })
}

fn empty(d: Data, max: usize) -> PartialFunction {
    behavior![
        push(&d, max),
        on([lit(atom("pop"))]).handle(|| reply(tuple![atom("failure")]).unwrap()),
    ]
}

fn filled(d: Data, max: usize) -> PartialFunction {
    behavior![push(&d, max), pop(&d, max)]
}

fn full(d: Data, max: usize) -> PartialFunction {
    behavior![pop(&d, max)]
}

fn main() {
    let stack = spawn(|| become_(empty(Arc::default(), 3)));
    for v in 1..=5 {
        send(&stack, tuple![atom("push"), v]);
    }
    for _ in 0..6 {
        sync_send(&stack, tuple![atom("pop")])
            .await_with(&behavior![
                on([lit(atom("ok")), val::<i32>()]).handle(|v: i32| println!("ok {v}")),
                on([lit(atom("failure"))]).handle(|| println!("failure")),
                after(Duration::from_secs(1)).handle(|| println!("timeout")),
            ])
            .unwrap();
    }
}
