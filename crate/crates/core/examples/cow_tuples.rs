//! Tuples share their payload until someone writes to a shared handle.

use actor_core::message::deep_copies;
use actor_core::tuple;

fn main() {
    let mut a = tuple![1i32, "one", 1.0f64];
    let b = a.clone();
    println!("shared: {} (refs {})", a.shares_payload(&b), a.ref_count());

    let before = deep_copies();
    a.set(0, 2i32).unwrap();
    println!(
        "after write: a = {a}, b = {b}, copies = {}",
        deep_copies() - before
    );

    // a is unique now, so further writes happen in place
    let before = deep_copies();
    *a.get_mut::<i32>(0).unwrap() += 40;
    println!("in place: a = {a}, copies = {}", deep_copies() - before);

    if let Some(view) = b.cast::<(i32, String, f64)>() {
        let (i, s, f) = view.get();
        println!("typed view of b: {i} {s} {f}");
    }
}
