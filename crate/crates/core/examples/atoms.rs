//! Atoms are short names packed into a u64, handy as message tags.

use actor_core::atom::{atom_decode, atom_encode, Atom};

fn main() {
    for text in ["add", "get", "_0Aa z9", ""] {
        let a = atom_encode(text).unwrap();
        println!(
            "{text:>10?} -> {:#018x} -> {:?}",
            a.value(),
            atom_decode(a.value()).unwrap()
        );
    }

    // characters outside the alphabet become spaces
    assert_eq!(atom_encode("!?").unwrap(), atom_encode("?!").unwrap());
    println!("\"!?\" decodes as {:?}", Atom::new("!?").unwrap().text());

    match atom_encode("much_too_long") {
        Ok(_) => unreachable!(),
        Err(e) => println!("error: {e}"),
    }
}
