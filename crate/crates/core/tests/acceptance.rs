//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

mod common;

use common::*;
use pebble_core::engine::{answer_deferred, query_deferred};
use pebble_core::reader::parse_term;
use pebble_core::term::variant;
use pebble_core::tooling::format_answer_with;
use pebble_core::{answer_all, consult_sync, corpus, format_answer, record_tree, Answer, FakeHost, Session, WriteOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::Cell;
use std::collections::BTreeSet;
use std::rc::Rc;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn session(program: &str) -> Session {
    let s = Session::new(u64::MAX);
    consult_sync(&s, program).expect("program loads");
    s
}

fn texts(s: &Session, goal: &str) -> Vec<String> {
    answer_all(s, goal).iter().map(|a| format_answer(s, a)).collect()
}

fn first(s: &Session, goal: &str) -> String {
    texts(s, goal).into_iter().next().unwrap_or_else(|| "false.".into())
}

fn append_enumeration() -> Outcome {
    let s = session("append([], X, X).\nappend([H|T], X, [H|S]) :- append(T, X, S).");
    let t = Instant::now();
    let got = texts(&s, "append(X, Y, [a,b,c])");
    let elapsed = t.elapsed();
    let want = ["X = [], Y = [a,b,c]", "X = [a], Y = [b,c]", "X = [a,b], Y = [c]", "X = [a,b,c], Y = []"];
    ensure(got == want, || format!("answers {got:?}"))?;
    ensure(elapsed < Duration::from_millis(50), || format!("took {elapsed:?}"))?;
    Ok(format!("4 answers in {elapsed:?}"))
}

fn fixture_session() -> Session {
    let s = Session::new(1_000_000);
    let host = FakeHost::from_json(&serde_json::json!({"o": {"x": 1, "y": false, "z": {"w": [2, "a"]}}}));
    pebble_core::host::set_host(&s, Rc::new(host));
    s
}

fn host_unification() -> Outcome {
    let s = fixture_session();
    let cases = [
        ("get_prop(o, Object)", "Object = host<object>"),
        ("get_prop(o, Object1), get_prop(o, Object2), Object1 = Object2", "Object1 = host<object>, Object2 = host<object>"),
        ("get_prop(o, {x: X, y: Y, z: {w: W}})", "X = 1, Y = false, W = [2,a]"),
        ("get_prop(o, Object), Object = {x: X, y: false}, Object = {z: {w: W}}", "Object = host<object>, X = 1, W = [2,a]"),
    ];
    for (goal, want) in cases {
        let got = first(&s, goal);
        ensure(got == want, || format!("{goal}: {got}"))?;
    }
    Ok("4 goals".into())
}

fn ffi() -> Outcome {
    let s = fixture_session();
    let got = first(&s, "apply([], concat, [[1,2],[3,4,5],[6]], Xs)");
    ensure(got == "Xs = [1,2,3,4,5,6]", || got.clone())?;
    let answers = answer_all(&s, "apply('', concat, [hello, ', ', world, !], Str)");
    let got = answers.first().map(|a| format_answer_with(&s, a, &WriteOptions::quoted())).unwrap_or_default();
    ensure(got == "Str = 'hello, world!'", || got.clone())?;
    Ok("array and string concat".into())
}

fn error_templates() -> Outcome {
    let s = Session::new(100_000);
    let ops = session_ops();
    let cases = [
        ("random(a, 1, X)", Some("error(type_error(number, a), random/3)")),
        ("random(L, 1, X)", Some("error(instantiation_error, random/3)")),
        ("random(2, 1, X)", None),
        ("sleep(T)", Some("error(instantiation_error, sleep/1)")),
    ];
    for (goal, want) in cases {
        let answers = answer_all(&s, goal);
        match (want, answers.as_slice()) {
            (None, [Answer::Failure]) | (None, []) => {}
            (Some(ball), [Answer::Error(got)]) => {
                let want = parse_term(&format!("{ball} ."), &ops).unwrap();
                ensure(variant(got, &want), || format!("{goal}: {}", pebble_core::tooling::write::canonical(got)))?;
            }
            _ => return Err(format!("{goal}: {answers:?}")),
        }
    }
    Ok("4 goals".into())
}

fn asynchrony() -> Outcome {
    let s = Session::new(100_000);
    let lp = s.event_loop().clone();
    let ticks = Rc::new(Cell::new(0u32));
    let stop = Rc::new(Cell::new(false));
    fn tick(lp: pebble_core::engine::EventLoop, ticks: Rc<Cell<u32>>, stop: Rc<Cell<bool>>) {
        if stop.get() {
            return;
        }
        ticks.set(ticks.get() + 1);
        let next = lp.clone();
        lp.spawn_after(Duration::from_millis(10), move || tick(next, ticks, stop));
    }
    {
        let (lp2, ticks, stop) = (lp.clone(), ticks.clone(), stop.clone());
        lp.spawn_after(Duration::from_millis(5), move || tick(lp2, ticks, stop));
    }
    let t = Instant::now();
    let got = first(&s, "sleep(100), X = a");
    let elapsed = t.elapsed();
    stop.set(true);
    let during = ticks.get();
    lp.run_until_idle();
    ensure(got == "X = a", || got.clone())?;
    ensure(elapsed >= Duration::from_millis(100), || format!("answered after {elapsed:?}"))?;
    ensure(during >= 1, || "no host task ran during the wait".into())?;
    Ok(format!("answered after {elapsed:?}, {during} host ticks"))
}

fn queens_brute_force(n: usize) -> usize {
    fn go(n: usize, cols: &mut Vec<usize>, used: &mut Vec<bool>) -> usize {
        if cols.len() == n {
            return 1;
        }
        let row = cols.len();
        let mut count = 0;
        for c in 0..n {
            if used[c] || cols.iter().enumerate().any(|(r, &q)| q.abs_diff(c) == row - r) {
                continue;
            }
            used[c] = true;
            cols.push(c);
            count += go(n, cols, used);
            cols.pop();
            used[c] = false;
        }
        count
    }
    go(n, &mut Vec::new(), &mut vec![false; n])
}

fn permutations() -> Vec<[usize; 5]> {
    let mut out = Vec::new();
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                for d in 0..5 {
                    for e in 0..5 {
                        let p = [a, b, c, d, e];
                        if (0..5).all(|i| p.contains(&i)) {
                            out.push(p);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Exhaustive search over house assignments; each permutation maps an
/// attribute value to its house.
fn zebra_brute_force() -> Vec<(&'static str, &'static str)> {
    const NATS: [&str; 5] = ["english", "spanish", "ukrainian", "norwegian", "japanese"];
    let next = |a: usize, b: usize| a.abs_diff(b) == 1;
    let perms = permutations();
    let mut out = Vec::new();
    // colour: red green ivory yellow blue
    for col in perms.iter().filter(|c| c[1] == c[2] + 1) {
        // nationality, in NATS order
        for nat in perms.iter().filter(|n| n[3] == 0 && n[0] == col[0] && next(n[3], col[4])) {
            // drink: coffee tea milk orange_juice water
            for drink in perms.iter().filter(|d| d[2] == 2 && d[0] == col[1] && d[1] == nat[2]) {
                // smoke: oldgold kools chesterfield lucky parliament
                for smoke in perms.iter().filter(|s| s[1] == col[3] && s[3] == drink[3] && s[4] == nat[4]) {
                    // pet: dog snails fox horse zebra
                    for pet in perms.iter().filter(|p| p[0] == nat[1] && p[1] == smoke[0] && next(smoke[2], p[2]) && next(smoke[1], p[3])) {
                        let owner = NATS[nat.iter().position(|&h| h == pet[4]).unwrap()];
                        let drinker = NATS[nat.iter().position(|&h| h == drink[4]).unwrap()];
                        out.push((owner, drinker));
                    }
                }
            }
        }
    }
    out
}

fn corpus_correctness() -> Outcome {
    let mut report = Vec::new();
    let s = session(corpus::QUEENS);
    let t = Instant::now();
    let got = first(&s, "all_queens(8, C)");
    let elapsed = t.elapsed();
    let want = format!("C = {}", queens_brute_force(8));
    ensure(got == want, || format!("8-queens {got}, brute force {want}"))?;
    ensure(elapsed < Duration::from_secs(30), || format!("8-queens took {elapsed:?}"))?;
    report.push(format!("queens {elapsed:.2?}"));

    let s = session(corpus::ZEBRA);
    let t = Instant::now();
    let got = texts(&s, "zebra(Owner, Drinker, _)");
    report.push(format!("zebra {:.2?}", t.elapsed()));
    let oracle = zebra_brute_force();
    ensure(oracle.len() == 1, || format!("brute force found {oracle:?}"))?;
    let want = format!("Owner = {}, Drinker = {}", oracle[0].0, oracle[0].1);
    ensure(got.len() == 1 && got[0].starts_with(&want), || format!("zebra {got:?}, brute force {want}"))?;

    let s = session(corpus::MERGESORT);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut xs: Vec<i64> = (0..1000).map(|_| rng.gen_range(-500..500)).collect();
    let list = xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let t = Instant::now();
    let got = first(&s, &format!("mergesort([{list}], S)"));
    report.push(format!("mergesort {:.2?}", t.elapsed()));
    xs.sort();
    let want = format!("S = [{}]", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    ensure(got == want, || "mergesort differs from reference sort".into())?;

    let small = [
        (corpus::NREV, "numlist(1, 30, L), nrev(L, R), numlist(1, 30, L2), reverse(L2, R2), R == R2", "true"),
        (corpus::PEANO, "from_int(4, N), fact(N, F), to_int(F, I), I == 24", "true"),
        (corpus::INORDER, "tree_sort([5, 3, 8, 1, 4, 7, 9, 2, 6], S)", "S = [1,2,3,4,5,6,7,8,9]"),
    ];
    for (program, goal, want) in small {
        let s = session(program);
        let got = answer_all(&s, goal);
        let text = got.first().map(|a| format_answer(&s, a)).unwrap_or_default();
        let ok = if want == "true" { matches!(got.first(), Some(Answer::Success(_))) } else { text == want };
        ensure(ok, || format!("{goal}: {text}"))?;
    }
    Ok(report.join(", "))
}

fn derivation_tree() -> Outcome {
    let goal = "powerset([a,b], P).";
    let s = session(corpus::POWERSET);
    let stream: Vec<String> = answer_all(&s, goal.trim_end_matches('.'))
        .iter()
        .map(|a| format_answer_with(&s, a, &WriteOptions::quoted()))
        .collect();
    let t = s.thread();
    s.event_loop().block_on(query_deferred(&t, goal).map_err(|e| format!("{e:?}"))?).map_err(|e| format!("{e:?}"))?;
    let tree = record_tree(&t, goal, 10);
    let leaves: Vec<&str> = tree.answers().map(|n| n.subst.as_str()).collect();
    ensure(tree.answers().all(|n| n.goal == "□"), || "answer leaf with non-empty goal".into())?;
    ensure(leaves == stream, || format!("tree {leaves:?}, stream {stream:?}"))?;
    let set: BTreeSet<&str> = leaves.iter().copied().collect();
    let want: BTreeSet<&str> = ["P = [a,b]", "P = [a]", "P = [b]", "P = []"].into();
    ensure(set == want && leaves.len() == 4, || format!("leaves {leaves:?}"))?;
    Ok(format!("{} nodes, 4 answer leaves", tree.nodes.len()))
}

fn property_suites() -> Outcome {
    let ops = session_ops();
    runner(10_000).run(&unify_pair(), |(a, b)| check_unify_pair(&a, &b)).map_err(|e| format!("unification: {e}"))?;
    runner(10_000).run(&term(UNIFY_VARS), |t| check_occurs(&t)).map_err(|e| format!("occurs check: {e}"))?;
    runner(10_000).run(&term(READER_VARS), |t| check_round_trip(&t, &ops)).map_err(|e| format!("round trip: {e}"))?;
    for seed in 0..20 {
        check_program(seed)?;
    }
    for seed in 0..1_000 {
        check_dom_sequence(seed)?;
    }
    Ok("10^4 unify pairs, 10^4 round trips, 20 programs, 10^3 DOM sequences".into())
}

fn limit_semantics() -> Outcome {
    let s = Session::new(1000);
    consult_sync(&s, "loop :- loop.").map_err(|e| format!("{e:?}"))?;
    let t = s.thread();
    let lp = s.event_loop().clone();
    lp.block_on(query_deferred(&t, "loop.").map_err(|e| format!("{e:?}"))?).map_err(|e| format!("{e:?}"))?;
    let mut counts = vec![t.inferences()];
    for round in 1..=2 {
        let a = lp.block_on(answer_deferred(&t));
        ensure(matches!(a, Answer::LimitExceeded), || format!("request {round}: {a:?}"))?;
        ensure(format_answer(&s, &a) == "limit exceeded.", || format_answer(&s, &a))?;
        counts.push(t.inferences());
    }
    let deltas: Vec<u64> = counts.windows(2).map(|w| w[1] - w[0]).collect();
    ensure(deltas == [1000, 1000], || format!("inference deltas {deltas:?}"))?;
    Ok(format!("inference deltas {deltas:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("append enumeration", append_enumeration),
        ("host unification", host_unification),
        ("ffi apply", ffi),
        ("error templates", error_templates),
        ("asynchrony", asynchrony),
        ("benchmark corpus", corpus_correctness),
        ("derivation tree", derivation_tree),
        ("property suites", property_suites),
        ("limit semantics", limit_semantics),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
