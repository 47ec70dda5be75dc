mod common;

use common::*;

#[test]
fn unification_laws() {
    runner(2_000)
        .run(&unify_pair(), |(a, b)| check_unify_pair(&a, &b))
        .unwrap();
}

#[test]
fn occurs_check() {
    runner(500).run(&term(UNIFY_VARS), |t| check_occurs(&t)).unwrap();
}

#[test]
fn reader_round_trip() {
    let ops = session_ops();
    runner(2_000).run(&term(READER_VARS), |t| check_round_trip(&t, &ops)).unwrap();
}

#[test]
fn datalog_programs_match_least_model() {
    for seed in 0..20 {
        check_program(seed).unwrap();
    }
}

#[test]
fn random_dom_sequences_keep_a_tree() {
    for seed in 0..100 {
        check_dom_sequence(seed).unwrap();
    }
}
