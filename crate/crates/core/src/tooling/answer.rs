//! Answer text as shown by the REPL.

use super::write::{render_term, WriteOptions};
use crate::engine::{Answer, Session};
use crate::term::{map_vars, Substitution, Term, Var};

/// Depth at which cyclic bindings stop being unfolded.
pub const CYCLE_DEPTH: usize = 64;

/// `X = v, Y = w`, `true.`, `false.` or `uncaught exception: B.`
pub fn format_answer(session: &Session, answer: &Answer) -> String {
    format_answer_with(session, answer, &WriteOptions::default())
}

pub fn format_answer_with(session: &Session, answer: &Answer, opts: &WriteOptions) -> String {
    let ops = session.ops();
    match answer {
        Answer::Success(s) => {
            let parts: Vec<String> = s
                .iter()
                .filter(|(v, t)| !matches!(t, Term::Var(w) if w == *v))
                .map(|(v, t)| {
                    let shown = unfold(t, s, CYCLE_DEPTH);
                    format!("{} = {}", crate::tooling::write::var_name(v), render_term(&shown, opts, &ops))
                })
                .collect();
            if parts.is_empty() {
                "true.".into()
            } else {
                parts.join(", ")
            }
        }
        Answer::Failure => "false.".into(),
        Answer::Error(ball) => format!("uncaught exception: {}.", render_term(ball, &WriteOptions::quoted(), &ops)),
        Answer::LimitExceeded => "limit exceeded.".into(),
    }
}

/// Replaces answer variables inside `t` by their own bindings, which only
/// happens for cyclic bindings; past `depth` the rest is elided as `...`.
fn unfold(t: &Term, s: &Substitution, depth: usize) -> Term {
    let bound = |v: &Var| s.get(v).is_some_and(|b| !matches!(b, Term::Var(w) if w == v));
    if !t.variables().iter().any(bound) {
        return t.clone();
    }
    if depth == 0 {
        return Term::atom("...");
    }
    map_vars(t, &mut |v| match s.get(&v) {
        Some(b) if bound(&v) => Some(unfold(b, s, depth - 1)),
        _ => None,
    })
    .unwrap_or_else(|| t.clone())
}
