use std::collections::{HashSet, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use actor_core::pattern::*;
use actor_core::runtime::*;
use actor_core::{atom, behavior, tuple};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::{check, Verdict};

const WAIT: Duration = Duration::from_secs(5);

fn fixed_stack(max_size: usize) -> ActorRef {
    let data = Arc::new(Mutex::new(Vec::<i32>::new()));
    spawn(move || become_(empty(data, max_size)))
}

fn push_case(data: &Arc<Mutex<Vec<i32>>>, max_size: usize) -> Case {
    let d = data.clone();
    on([lit(atom("push")), val::<i32>()]).handle(move |v: i32| {
        let mut st = d.lock().unwrap();
        st.push(v);
        let next = if st.len() == max_size {
            full(d.clone(), max_size)
        } else {
            filled(d.clone(), max_size)
        };
        drop(st);
        become_(next);
    })
}

fn pop_case(data: &Arc<Mutex<Vec<i32>>>, max_size: usize) -> Case {
    let d = data.clone();
    on([lit(atom("pop"))]).handle(move || {
        let mut st = d.lock().unwrap();
        let v = st.pop().expect("pop in a non-empty state");
        let next = if st.is_empty() {
            empty(d.clone(), max_size)
        } else {
            filled(d.clone(), max_size)
        };
        drop(st);
        reply(tuple![atom("ok"), v]).unwrap();
        become_(next);
    })
}

fn empty(data: Arc<Mutex<Vec<i32>>>, max_size: usize) -> PartialFunction {
    behavior![
        push_case(&data, max_size),
        on([lit(atom("pop"))]).handle(|| reply(tuple![atom("failure")]).unwrap()),
    ]
}

fn filled(data: Arc<Mutex<Vec<i32>>>, max_size: usize) -> PartialFunction {
    behavior![push_case(&data, max_size), pop_case(&data, max_size)]
}

/// Pushes are left in the mailbox until a pop makes room.
fn full(data: Arc<Mutex<Vec<i32>>>, max_size: usize) -> PartialFunction {
    behavior![pop_case(&data, max_size)]
}

#[derive(Debug, Clone, PartialEq)]
enum Reply {
    Ok(i32),
    Failure,
    Missing,
}

struct StackModel {
    max_size: usize,
    stack: Vec<i32>,
    deferred: VecDeque<i32>,
}

impl StackModel {
    fn push(&mut self, v: i32) {
        if self.stack.len() == self.max_size {
            self.deferred.push_back(v);
        } else {
            self.stack.push(v);
        }
    }

    fn pop(&mut self) -> Reply {
        let Some(v) = self.stack.pop() else {
            return Reply::Failure;
        };
        while self.stack.len() < self.max_size {
            match self.deferred.pop_front() {
                Some(d) => self.stack.push(d),
                None => break,
            }
        }
        Reply::Ok(v)
    }
}

fn pop_reply(stack: &ActorRef) -> Reply {
    let got = Arc::new(Mutex::new(Reply::Missing));
    let (g1, g2) = (got.clone(), got.clone());
    sync_send(stack, tuple![atom("pop")])
        .await_with(&behavior![
            on([lit(atom("ok")), val::<i32>()])
                .handle(move |v: i32| *g1.lock().unwrap() = Reply::Ok(v)),
            on([lit(atom("failure"))]).handle(move || *g2.lock().unwrap() = Reply::Failure),
            after(WAIT).handle(|| {}),
        ])
        .unwrap();
    let r = got.lock().unwrap().clone();
    r
}

pub fn fixed_stack_conformance() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0x57AC);
    let stack = fixed_stack(10);
    let mut model = StackModel {
        max_size: 10,
        stack: Vec::new(),
        deferred: VecDeque::new(),
    };
    let (mut pops, mut mismatches, mut deferred_pushes) = (0, 0, 0);
    for step in 0..1_000 {
        // drift between long push runs and long pop runs so that both the
        // empty and the full state are visited repeatedly
        let push_bias = if (step / 50) % 2 == 0 { 0.75 } else { 0.3 };
        if rng.gen_bool(push_bias) {
            let v = rng.gen_range(-1000..1000);
            if model.stack.len() == model.max_size {
                deferred_pushes += 1;
            }
            model.push(v);
            send(&stack, tuple![atom("push"), v]);
        } else {
            pops += 1;
            if pop_reply(&stack) != model.pop() {
                mismatches += 1;
            }
        }
    }
    check(
        mismatches == 0 && deferred_pushes > 0,
        format!(
            "1000 steps, {pops} pops, {deferred_pushes} pushes while full, {mismatches} mismatches"
        ),
    )
}

fn greeter(delay: Duration, text: &'static str) -> ActorRef {
    spawn(move || {
        become_(behavior![on([lit(atom("hi"))]).handle(move || {
            thread::sleep(delay);
            reply(tuple![text]).unwrap();
        })])
    })
}

/// Strings that reach plain `receive` within `d`.
fn plain_strings(d: Duration) -> Vec<String> {
    let got = Arc::new(Mutex::new(Vec::new()));
    let idle = Arc::new(AtomicUsize::new(0));
    let (g, i) = (got.clone(), idle.clone());
    do_receive(&behavior![
        on_arg_match().handle(move |s: String| g.lock().unwrap().push(s)),
        after(d).handle(move || {
            i.store(1, Ordering::SeqCst);
        }),
    ])
    .until(|| idle.load(Ordering::SeqCst) == 1)
    .unwrap();
    let v = got.lock().unwrap().clone();
    v
}

fn await_string(h: ResponseHandle, timeout: Duration) -> Option<String> {
    let got = Arc::new(Mutex::new(None));
    let g = got.clone();
    h.await_with(&behavior![
        on_arg_match().handle(move |s: String| *g.lock().unwrap() = Some(s)),
        after(timeout).handle(|| {}),
    ])
    .unwrap();
    let v = got.lock().unwrap().take();
    v
}

pub fn sync_messaging() -> Verdict {
    let mut problems = Vec::new();

    // correlation with two handles in flight, awaited in reverse order
    let slow = greeter(Duration::from_millis(30), "slow");
    let fast = greeter(Duration::ZERO, "fast");
    let h1 = sync_send(&slow, tuple![atom("hi")]);
    let h2 = sync_send(&fast, tuple![atom("hi")]);
    let r2 = await_string(h2, WAIT);
    let r1 = await_string(h1, WAIT);
    if r1.as_deref() != Some("slow") || r2.as_deref() != Some("fast") {
        problems.push(format!("correlation: got {r1:?} / {r2:?}"));
    }

    // responses never reach plain receive
    let h = sync_send(&fast, tuple![atom("hi")]);
    send(&current_actor(), tuple!["plain"]);
    let seen = plain_strings(Duration::from_millis(100));
    if seen != ["plain"] {
        problems.push(format!("plain receive saw {seen:?}"));
    }
    if await_string(h, WAIT).as_deref() != Some("fast") {
        problems.push("response lost after plain receive".into());
    }

    // a response after the deadline is dropped
    let late = greeter(Duration::from_millis(150), "late");
    let deadline = Duration::from_millis(40);
    let fired = Arc::new(AtomicUsize::new(0));
    let f = fired.clone();
    let start = Instant::now();
    sync_send(&late, tuple![atom("hi")])
        .await_with(&behavior![
            on_arg_match().handle(|_: String| {}),
            after(deadline).handle(move || {
                f.fetch_add(1, Ordering::SeqCst);
            }),
        ])
        .unwrap();
    let took = start.elapsed();
    let slack = Duration::from_millis(50);
    if fired.load(Ordering::SeqCst) != 1 || took < deadline || took > deadline + slack {
        problems.push(format!(
            "timeout fired {} times after {took:?}",
            fired.load(Ordering::SeqCst)
        ));
    }
    let stale = plain_strings(Duration::from_millis(250));
    if !stale.is_empty() {
        problems.push(format!("stale response surfaced: {stale:?}"));
    }
    let detail = if problems.is_empty() {
        format!("two-handle correlation, hidden responses, stale drop; timeout after {took:?} (deadline 40ms + 50ms slack)")
    } else {
        problems.join("; ")
    };
    check(problems.is_empty(), detail)
}

struct Graph {
    trap: Vec<bool>,
    edges: Vec<(usize, usize)>,
    victim: usize,
}

fn random_graph(rng: &mut StdRng) -> Graph {
    let n = rng.gen_range(2..=6);
    let trap = (0..n).map(|_| rng.gen_bool(0.3)).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.45) {
                edges.push((a, b));
            }
        }
    }
    Graph {
        trap,
        edges,
        victim: rng.gen_range(0..n),
    }
}

/// Breadth-first propagation: a non-trapping actor linked to a failed one
/// fails with the same reason; trapping actors stop the spread.
fn propagation_oracle(g: &Graph) -> HashSet<usize> {
    let mut dead = HashSet::from([g.victim]);
    let mut queue = VecDeque::from([g.victim]);
    while let Some(u) = queue.pop_front() {
        for &(a, b) in &g.edges {
            let v = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !g.trap[v] && dead.insert(v) {
                queue.push_back(v);
            }
        }
    }
    dead
}

fn graph_actor(trapping: bool) -> ActorRef {
    spawn(move || {
        trap_exit(trapping);
        become_(behavior![
            on([lit(atom("die"))]).handle(|| quit(ExitReason::failure("injected"))),
            on([lit(atom("stop"))]).handle(|| quit(ExitReason::Normal)),
            on([lit(atom("ping"))]).handle(|| reply(tuple![atom("pong")]).unwrap()),
            on_arg_match().handle(|_: ExitMessage| {}),
        ])
    })
}

/// Runs one graph on a fresh thread; returns a description of any mismatch.
fn run_graph(g: Graph) -> Option<String> {
    thread::spawn(move || {
        let expected = propagation_oracle(&g);
        let actors: Vec<ActorRef> = g.trap.iter().map(|&t| graph_actor(t)).collect();
        for &(a, b) in &g.edges {
            link_actors(&actors[a], &actors[b]);
        }
        for a in &actors {
            monitor(a);
        }
        send(&actors[g.victim], tuple![atom("die")]);

        let downs = Arc::new(Mutex::new(Vec::new()));
        let d = downs.clone();
        let collect = behavior![
            on_arg_match().handle(move |m: DownMessage| d.lock().unwrap().push(m)),
            after(WAIT).handle(|| {}),
        ];
        for _ in 0..expected.len() {
            receive(&collect).unwrap();
        }
        let index = |a: &ActorRef| actors.iter().position(|x| x == a);
        let mut dead = HashSet::new();
        for m in downs.lock().unwrap().iter() {
            if m.reason != ExitReason::failure("injected") {
                return Some(format!("{:?} died with {}", m.source, m.reason));
            }
            dead.extend(index(&m.source));
        }
        if dead != expected {
            return Some(format!("dead {dead:?}, oracle {expected:?}"));
        }
        // every exit signal to a survivor was enqueued before its neighbour's
        // down notice, so a pong proves the survivor processed it and lived
        for (i, a) in actors
            .iter()
            .enumerate()
            .filter(|(i, _)| !expected.contains(i))
        {
            let ok = Arc::new(AtomicUsize::new(0));
            let o = ok.clone();
            sync_send(a, tuple![atom("ping")])
                .await_with(&behavior![
                    on([lit(atom("pong"))]).handle(move || {
                        o.fetch_add(1, Ordering::SeqCst);
                    }),
                    after(WAIT).handle(|| {}),
                ])
                .unwrap();
            if ok.load(Ordering::SeqCst) != 1 || !a.is_alive() {
                return Some(format!("survivor {i} did not answer"));
            }
            send(a, tuple![atom("stop")]);
        }
        None
    })
    .join()
    .unwrap_or_else(|_| Some("graph thread panicked".into()))
}

pub fn exit_propagation() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0xE817);
    let mut failures = Vec::new();
    let mut cascades = 0;
    for i in 0..1_000 {
        let g = random_graph(&mut rng);
        if propagation_oracle(&g).len() > 1 {
            cascades += 1;
        }
        if let Some(e) = run_graph(g) {
            failures.push(format!("graph {i}: {e}"));
        }
    }
    let detail = match failures.first() {
        None => format!("1000 graphs ({cascades} with cascades) match the oracle"),
        Some(first) => format!("{} of 1000 graphs differ, first: {first}", failures.len()),
    };
    check(failures.is_empty(), detail)
}
