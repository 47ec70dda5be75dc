use pebble_core::corpus;
use pebble_core::{answer_all, consult_sync, format_answer, Session};
use std::time::Instant;

fn session(program: &str) -> Session {
    let s = Session::new(u64::MAX);
    consult_sync(&s, program).unwrap_or_else(|e| panic!("{}", pebble_core::tooling::write::canonical(&e)));
    s
}

fn first(s: &Session, goal: &str) -> String {
    answer_all(s, goal).first().map(|a| format_answer(s, a)).unwrap_or_else(|| "false.".into())
}

#[test]
fn queens_counts() {
    let s = session(corpus::QUEENS);
    assert_eq!(first(&s, "all_queens(6, C)"), "C = 4");
    let t = Instant::now();
    assert_eq!(first(&s, "all_queens(8, C)"), "C = 92");
    eprintln!("8-queens: {:?}", t.elapsed());
}

#[test]
fn zebra_is_unique() {
    let s = session(corpus::ZEBRA);
    let t = Instant::now();
    let answers = answer_all(&s, "zebra(Owner, Drinker, _)");
    eprintln!("zebra: {:?}", t.elapsed());
    assert_eq!(answers.len(), 1, "{answers:?}");
}

#[test]
fn small_programs() {
    let s = session(corpus::NREV);
    assert_eq!(first(&s, "numlist(1, 30, L), nrev(L, R), reverse(L, R2), R == R2"), first(&s, "numlist(1, 30, L), reverse(L, R), R2 = R"));
    let s = session(corpus::PEANO);
    assert_eq!(first(&s, "from_int(4, N), fact(N, F), to_int(F, I)").rsplit(", ").next().unwrap(), "I = 24");
    let s = session(corpus::INORDER);
    assert_eq!(first(&s, "tree_sort([5, 3, 8, 1, 4, 7, 9, 2, 6], S)"), "S = [1,2,3,4,5,6,7,8,9]");
    let s = session(corpus::MERGESORT);
    assert_eq!(first(&s, "mergesort([3, 1, 2, 3, 0], S)"), "S = [0,1,2,3,3]");
}
