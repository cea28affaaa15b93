//! Guards filter on captured values; projections convert while matching.

use actor_core::pattern::*;
use actor_core::{behavior, tuple};

fn main() {
    let limit = GuardCell::new(10);
    let pf = behavior![
        on_types::<(i32,)>()
            .when((x1() % 2).eq(0).and(x1().lt(gref(&limit))))
            .handle(|i: i32| { println!("small even {i}") }),
        on([project(|s: &String| s.parse::<i32>().ok())]).handle(|i: i32| println!("parsed {i}")),
        others().handle(|| println!("no match")),
    ];

    for t in [tuple![4], tuple![12], tuple!["42"], tuple!["nope"]] {
        pf.apply(&t).unwrap();
    }
    // guards read the cell when they run, not when they were built
    limit.set(100);
    pf.apply(&tuple![12]).unwrap();
}
