//! Asynchronous program loading.
//!
//! Terms are read one at a time. Directives and expansion hooks run as
//! queries on forked threads, so an asynchronous builtin inside a directive
//! suspends the whole consult until it resumes.

use super::error::err;
use super::kb::{Clause, Pred};
use super::session::Session;
use super::thread::{Answer, Thread};
use crate::atom;
use crate::reader::dcg::dcg_transform;
use crate::reader::{Parser, SourceLocation};
use crate::term::{Atom, PredicateIndicator, Term, Var};
use rustc_hash::FxHashSet;
use std::cell::RefCell;
use std::collections::VecDeque;
use std::rc::Rc;

type Done = Box<dyn FnOnce(Result<(), Term>)>;

enum Item {
    Read(Term),
    Expanded(Term),
    Directive(Term),
}

struct Job {
    session: Session,
    text: Rc<str>,
    pos: SourceLocation,
    eof: bool,
    pending: VecDeque<Item>,
    done: Option<Done>,
    module_before: Atom,
    init_mark: usize,
    /// Predicates that received a clause from this text.
    defined: FxHashSet<(Atom, PredicateIndicator)>,
}

type JobRef = Rc<RefCell<Job>>;

impl Session {
    /// Loads program text into the user module. `done` runs later, from the
    /// event loop, with the first error if loading stopped.
    pub fn consult(&self, text: &str, done: impl FnOnce(Result<(), Term>) + 'static) {
        self.consult_into(atom!("user"), text, done)
    }

    /// Loads program text, adding clauses to `module`.
    pub fn consult_into(&self, module: Atom, text: &str, done: impl FnOnce(Result<(), Term>) + 'static) {
        let job = Rc::new(RefCell::new(Job {
            session: self.clone(),
            text: Rc::from(text),
            pos: SourceLocation { line: 1, column: 1, offset: 0 },
            eof: false,
            pending: VecDeque::new(),
            done: Some(Box::new(done)),
            module_before: atom!("user"),
            init_mark: 0,
            defined: FxHashSet::default(),
        }));
        let session = self.clone();
        self.event_loop().spawn(move || {
            {
                let mut j = job.borrow_mut();
                j.module_before = session.set_loading_module(module);
                j.init_mark = session.initialization().borrow().len();
            }
            run(job);
        });
    }
}

fn finish(job: &JobRef, result: Result<(), Term>) {
    let (session, done) = {
        let mut j = job.borrow_mut();
        let session = j.session.clone();
        session.set_loading_module(j.module_before);
        session.initialization().borrow_mut().truncate(j.init_mark);
        (session, j.done.take())
    };
    if let Some(done) = done {
        session.event_loop().spawn(move || done(result));
    }
}

fn read_next(job: &JobRef) -> Result<Option<Term>, Term> {
    let mut j = job.borrow_mut();
    if j.eof {
        return Ok(None);
    }
    let text = j.text.clone();
    let mut parser = Parser::at(&text, j.pos);
    let read = {
        let ops = j.session.ops();
        parser.read_term(&ops, j.session.double_quotes())
    };
    j.pos = parser.position();
    match read {
        Ok(Some(r)) => Ok(Some(r.term)),
        Ok(None) => {
            j.eof = true;
            Ok(None)
        }
        Err(e) => Err(e.to_term()),
    }
}

fn user_defines(session: &Session, name: &str, arity: usize) -> bool {
    let pi = PredicateIndicator::new(name, arity);
    session.kb().module(atom!("user")).and_then(|m| m.preds.get(&pi)).is_some_and(|p| match p {
        Pred::Clauses(l) => !l.is_empty(),
        _ => true,
    })
}

fn run(job: JobRef) {
    loop {
        let session = job.borrow().session.clone();
        let next = job.borrow_mut().pending.pop_front();
        let item = match next {
            Some(item) => item,
            None => match read_next(&job) {
                Ok(Some(t)) => Item::Read(t),
                Ok(None) => {
                    let mark = job.borrow().init_mark;
                    let goals: Vec<Term> = session.initialization().borrow_mut().drain(mark..).collect();
                    if goals.is_empty() {
                        return finish(&job, Ok(()));
                    }
                    job.borrow_mut().pending.extend(goals.into_iter().map(Item::Directive));
                    continue;
                }
                Err(ball) => return finish(&job, Err(ball)),
            },
        };
        match item {
            Item::Directive(goal) => {
                let shown = goal.clone();
                return run_goal(&job, goal, Vec::new(), move |job, answer| match answer {
                    Answer::Success(_) => run(job),
                    Answer::Failure => {
                        let session = job.borrow().session.clone();
                        session.write_output(&format!("Warning: directive failed: {}\n", crate::tooling::write::canonical(&shown)));
                        run(job)
                    }
                    Answer::Error(ball) => finish(&job, Err(ball)),
                    Answer::LimitExceeded => {
                        let ball = err::error(
                            Term::compound("resource_error", vec![Term::atom("inferences")]),
                            Term::compound("directive", vec![shown]),
                        );
                        finish(&job, Err(ball))
                    }
                });
            }
            Item::Read(t) => {
                if let Some(d) = t.args_if(":-", 1).or_else(|| t.args_if("?-", 1)) {
                    job.borrow_mut().pending.push_front(Item::Directive(d[0].clone()));
                    continue;
                }
                let t = if t.args_if("-->", 2).is_some() {
                    let vars = session.vars().clone();
                    match dcg_transform(&t, &mut || Term::Var(vars.fresh())) {
                        Ok(c) => c,
                        Err(ball) => return finish(&job, Err(ball)),
                    }
                } else {
                    t
                };
                if user_defines(&session, "term_expansion", 2) {
                    let out = session.vars().fresh();
                    let goal = Term::compound("term_expansion", vec![t.clone(), Term::Var(out)]);
                    return run_goal(&job, goal, vec![out], move |job, answer| match answer {
                        Answer::Success(s) => {
                            let x = s.get(&out).cloned().unwrap_or(Term::Var(out));
                            let items = x.list_items().unwrap_or_else(|| vec![x]);
                            {
                                let mut j = job.borrow_mut();
                                for it in items.into_iter().rev() {
                                    j.pending.push_front(Item::Expanded(it));
                                }
                            }
                            run(job)
                        }
                        Answer::Failure => {
                            job.borrow_mut().pending.push_front(Item::Expanded(t));
                            run(job)
                        }
                        Answer::Error(ball) => finish(&job, Err(ball)),
                        Answer::LimitExceeded => finish(&job, Err(limit_ball("term_expansion"))),
                    });
                }
                job.borrow_mut().pending.push_front(Item::Expanded(t));
            }
            Item::Expanded(t) => {
                if let Some(d) = t.args_if(":-", 1) {
                    job.borrow_mut().pending.push_front(Item::Directive(d[0].clone()));
                    continue;
                }
                let (head, body) = match t.args_if(":-", 2) {
                    Some(a) => (a[0].clone(), a[1].clone()),
                    None => (t.clone(), Term::atom("true")),
                };
                if !body.is_atom_named("true") && user_defines(&session, "goal_expansion", 2) {
                    let out = session.vars().fresh();
                    let goal = Term::compound("$expand_goals", vec![body.clone(), Term::Var(out)]);
                    return run_goal(&job, goal, vec![out], move |job, answer| match answer {
                        Answer::Success(s) => {
                            let b = s.get(&out).cloned().unwrap_or(body);
                            match store(&job, &head, &b) {
                                Ok(()) => run(job),
                                Err(ball) => finish(&job, Err(ball)),
                            }
                        }
                        Answer::Failure => match store(&job, &head, &body) {
                            Ok(()) => run(job),
                            Err(ball) => finish(&job, Err(ball)),
                        },
                        Answer::Error(ball) => finish(&job, Err(ball)),
                        Answer::LimitExceeded => finish(&job, Err(limit_ball("goal_expansion"))),
                    });
                }
                if let Err(ball) = store(&job, &head, &body) {
                    return finish(&job, Err(ball));
                }
            }
        }
    }
}

fn limit_ball(hook: &str) -> Term {
    err::error(Term::compound("resource_error", vec![Term::atom("inferences")]), Term::atom(hook))
}

/// Adds a clause to the loading module. The first clause a text gives a
/// static predicate replaces the clauses an earlier load left there.
fn store(job: &JobRef, head: &Term, body: &Term) -> Result<(), Term> {
    let session = job.borrow().session.clone();
    let mut module = session.loading_module();
    let mut head = head.clone();
    while let Some(a) = head.args_if(":", 2) {
        let Some(m) = a[0].as_atom() else { break };
        module = m;
        head = a[1].clone();
    }
    let clause = Clause::new(&head, body).map_err(|ball| relabel(ball, &head, body))?;
    let pi = clause.indicator();
    let builtin = session.kb().module(atom!("system")).and_then(|m| m.preds.get(&pi)).is_some_and(|p| p.is_builtin());
    if builtin && module != atom!("system") {
        return Err(err::permission("modify", "static_procedure", pi.to_term(), Term::compound("/", vec![Term::atom("consult"), Term::int(1)])));
    }
    let first = job.borrow_mut().defined.insert((module, pi));
    let mut kb = session.kb_mut();
    let m = kb.module_mut(module);
    if first {
        if let Some(Pred::Clauses(list)) = m.preds.get_mut(&pi) {
            if !list.dynamic {
                *list = Default::default();
            }
        }
    }
    m.add_clause(clause, false)
}

fn relabel(ball: Term, head: &Term, body: &Term) -> Term {
    let _ = (head, body);
    match ball.args_if("error", 2) {
        Some(a) => err::error(a[0].clone(), Term::compound("/", vec![Term::atom("consult"), Term::int(1)])),
        None => ball,
    }
}

fn run_goal(job: &JobRef, goal: Term, vars: Vec<Var>, then: impl FnOnce(JobRef, Answer) + 'static) {
    let session = job.borrow().session.clone();
    let thread = Thread::new(&session);
    thread.set_goal_in(goal, vars, session.loading_module());
    let job = job.clone();
    let keep = thread.clone();
    thread.answer(move |answer| {
        drop(keep);
        then(job, answer)
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::deferred::{answer_all, consult_sync};

    #[test]
    fn clauses_are_stored_in_order() {
        let s = Session::new(10_000);
        consult_sync(&s, "p(1).\np(2).\np(3).").unwrap();
        let answers = answer_all(&s, "p(X)");
        let xs: Vec<String> = answers.iter().map(|a| a.binding("X").unwrap().to_string()).collect();
        assert_eq!(xs, vec!["1", "2", "3"]);
    }

    #[test]
    fn op_directive_affects_later_reads() {
        let s = Session::new(10_000);
        consult_sync(&s, ":- op(700, xfx, ===).\na === b.").unwrap();
        assert_eq!(answer_all(&s, "X === Y").len(), 1);
    }

    #[test]
    fn syntax_error_is_reported() {
        let s = Session::new(10_000);
        let e = consult_sync(&s, "foo(.").unwrap_err();
        assert!(e.to_string().starts_with("error(syntax_error("), "{e}");
    }

    #[test]
    fn throwing_directive_aborts() {
        let s = Session::new(10_000);
        let e = consult_sync(&s, "a.\n:- throw(stop).\nb.").unwrap_err();
        assert_eq!(e, Term::atom("stop"));
        assert_eq!(answer_all(&s, "a").len(), 1);
        assert!(matches!(answer_all(&s, "b")[0], Answer::Error(_)));
    }

    #[test]
    fn dcg_rules_are_translated() {
        let s = Session::new(10_000);
        consult_sync(&s, "greeting --> [hello], name.\nname --> [world].").unwrap();
        assert_eq!(answer_all(&s, "phrase(greeting, [hello, world])").len(), 1);
    }

    #[test]
    fn term_expansion_runs_once() {
        let s = Session::new(10_000);
        consult_sync(&s, "term_expansion(double(X), [X, X]).\ndouble(q(1)).").unwrap();
        assert_eq!(answer_all(&s, "q(X)").len(), 2);
    }

    #[test]
    fn goal_expansion_rewrites_bodies() {
        let s = Session::new(10_000);
        consult_sync(&s, "goal_expansion(old, new).\nnew.\nr :- old.").unwrap();
        assert_eq!(answer_all(&s, "clause(r, B)")[0].binding("B").unwrap(), &Term::atom("new"));
    }

    #[test]
    fn reconsult_replaces_static_predicates() {
        let s = Session::new(10_000);
        consult_sync(&s, "p(1).").unwrap();
        consult_sync(&s, "p(2).").unwrap();
        assert_eq!(answer_all(&s, "p(X)").len(), 1);
    }

    #[test]
    fn initialization_runs_after_load() {
        let s = Session::new(10_000);
        consult_sync(&s, ":- initialization(q).\nq :- write(hi).").unwrap();
        assert_eq!(s.take_output(), "hi");
    }
}
