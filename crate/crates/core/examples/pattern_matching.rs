//! Ordered cases: the first one that matches wins.

use actor_core::pattern::*;
use actor_core::{atom, behavior, tuple};

fn main() {
    let pf = behavior![
        on([lit(atom("add")), val::<i32>(), val::<i32>()])
            .handle(|a: i32, b: i32| println!("add -> {}", a + b)),
        on_arg_match().handle(|s: String| println!("a string: {s}")),
        // the wildcard swallows everything before the last f64
        on_types::<(Anything, f64)>().handle(|f: f64| println!("ends in {f}")),
        others().handle(|| println!("something else")),
    ];

    for t in [
        tuple![atom("add"), 2, 3],
        tuple!["hello"],
        tuple![1, "x", 2.5],
        tuple![true],
    ] {
        match pf.apply(&t).unwrap() {
            Applied::Matched(i) => println!("  {t} matched case {i}"),
            Applied::NoMatch => println!("  {t} unmatched"),
        }
    }
}
