use std::time::{Duration, Instant};

use actor_core::atom::{atom_decode, atom_encode};
use actor_core::message::deep_copies;
use actor_core::{tuple, DynTuple};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::{check, Verdict};

const LEGAL: &[u8] = b" _0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

pub fn round_trip() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0xA70);
    let start = Instant::now();
    let mut bad = 0;
    for _ in 0..10_000 {
        let len = rng.gen_range(0..=10);
        let s: String = (0..len)
            .map(|_| LEGAL[rng.gen_range(0..LEGAL.len())] as char)
            .collect();
        let ok = atom_encode(&s)
            .and_then(|a| atom_decode(a.value()))
            .is_ok_and(|d| d == s);
        if !ok {
            bad += 1;
        }
    }
    let took = start.elapsed();
    let bang = atom_encode("!?").unwrap() == atom_encode("?!").unwrap();
    check(
        bad == 0 && bang && took < Duration::from_secs(1),
        format!("10000 strings, {bad} mismatches, !? == ?!: {bang}, {took:?} (limit 1s)"),
    )
}

/// Random share/mutate/drop schedules against a model that tracks which
/// handles share a payload.
pub fn cow_exactness() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0xC0);
    let mut violations = 0u64;
    let mut mutations = 0u64;
    for _ in 0..1_000 {
        let mut handles: Vec<DynTuple> = vec![tuple![0i32, "payload"]];
        let mut group: Vec<u32> = vec![0];
        let mut next_group = 1;
        for _ in 0..rng.gen_range(1..40) {
            let i = rng.gen_range(0..handles.len());
            match rng.gen_range(0..3) {
                0 => {
                    handles.push(handles[i].clone());
                    group.push(group[i]);
                }
                1 if handles.len() > 1 => {
                    handles.swap_remove(i);
                    group.swap_remove(i);
                }
                _ => {
                    let shared = group.iter().filter(|&&g| g == group[i]).count() > 1;
                    let before = deep_copies();
                    handles[i].set(0, rng.gen::<i32>()).unwrap();
                    let copies = deep_copies() - before;
                    mutations += 1;
                    if copies != u64::from(shared) {
                        violations += 1;
                    }
                    if shared {
                        group[i] = next_group;
                        next_group += 1;
                    }
                }
            }
        }
    }
    check(
        violations == 0,
        format!("1000 schedules, {mutations} mutations, {violations} copy-count mismatches"),
    )
}
