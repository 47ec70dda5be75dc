//! Derivation records and the resolution loop.

use super::error::{err, EngineError};
use super::kb::{rename_at, Control, Pred};
use super::point::{apply_goal, cons, goal_frames, prepend, Collector, Frame, Goal, Point, PointKind};
use super::session::Session;
use crate::atom;
use crate::term::{map_vars, unify, Atom, PredicateIndicator, Substitution, Term, Var, VarGen};
use rustc_hash::FxHashMap;
use std::cell::{Cell, RefCell};
use std::collections::VecDeque;
use std::fmt;
use std::rc::{Rc, Weak};

/// The outcome of one answer request.
#[derive(Clone, Debug, PartialEq)]
pub enum Answer {
    /// Bindings of the query variables, in order of first appearance.
    Success(Substitution),
    Failure,
    Error(Term),
    LimitExceeded,
}

impl Answer {
    pub fn is_success(&self) -> bool {
        matches!(self, Answer::Success(_))
    }

    pub fn substitution(&self) -> Option<&Substitution> {
        match self {
            Answer::Success(s) => Some(s),
            _ => None,
        }
    }

    /// Binding of the named query variable in a success.
    pub fn binding(&self, name: &str) -> Option<&Term> {
        self.substitution()?.get(&Var::named(name))
    }
}

/// Result of a single resolution step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Progressed,
    Suspended,
    /// The stack was empty.
    Empty,
    /// The top point is an answer or error state; nothing was done.
    Stopped,
}

/// What a native predicate asks the resolution step to do.
pub enum Outcome {
    Fail,
    True,
    Unify(Substitution),
    /// Alternatives, first one tried first.
    Branches(Vec<Branch>),
    /// The native will resume the thread itself.
    Suspend,
}

/// One alternative continuation: bindings plus goals to run before the rest.
pub struct Branch {
    pub mgu: Substitution,
    pub frames: Vec<Frame>,
}

impl Branch {
    pub fn unify(mgu: Substitution) -> Branch {
        Branch { mgu, frames: Vec::new() }
    }
}

impl Outcome {
    pub fn from_unifier(mgu: Option<Substitution>) -> Outcome {
        match mgu {
            Some(s) => Outcome::Unify(s),
            None => Outcome::Fail,
        }
    }

    pub fn from_bool(b: bool) -> Outcome {
        if b {
            Outcome::True
        } else {
            Outcome::Fail
        }
    }
}

pub type NativeResult = Result<Outcome, Term>;
pub type Native = Rc<dyn Fn(&mut Call<'_>) -> NativeResult>;

/// Everything a native predicate sees: the thread, the popped point and the
/// selected atom.
pub struct Call<'a> {
    pub thread: &'a mut ThreadState,
    pub point: &'a Rc<Point>,
    pub atom: &'a Term,
    pub module: Atom,
}

impl Call<'_> {
    pub fn args(&self) -> &[Term] {
        self.atom.args()
    }

    pub fn arg(&self, i: usize) -> &Term {
        &self.atom.args()[i]
    }

    pub fn session(&self) -> &Session {
        &self.thread.session
    }

    /// The predicate indicator term used as error context.
    pub fn pi(&self) -> Term {
        self.atom.indicator().map(|p| p.to_term()).unwrap_or_else(|| self.atom.clone())
    }

    pub fn unify(&self, a: &Term, b: &Term) -> Outcome {
        Outcome::from_unifier(unify(a, b, self.thread.session.occurs_check()))
    }

    pub fn unifier(&self, a: &Term, b: &Term) -> Option<Substitution> {
        unify(a, b, self.thread.session.occurs_check())
    }

    /// A frame calling `goal` with its own cut barrier.
    pub fn frame(&self, goal: Term) -> Frame {
        Frame::call(goal, self.thread.stack.len(), self.module)
    }

    pub fn fresh(&self) -> Term {
        Term::Var(self.thread.session.vars().fresh())
    }

    /// Where to pick up after an asynchronous native finishes.
    pub fn continuation(&self) -> Continuation {
        Continuation {
            goal: self.point.goal.as_ref().and_then(|n| n.next.clone()),
            subst: self.point.subst.clone(),
            parent: self.point.id,
            module: self.module,
        }
    }

    pub fn handle(&self) -> WeakThread {
        WeakThread(self.thread.me.clone())
    }
}

/// A saved goal remainder for resuming after suspension.
#[derive(Clone)]
pub struct Continuation {
    pub goal: Goal,
    pub subst: Rc<Substitution>,
    pub parent: u64,
    pub module: Atom,
}

/// Receives resolution events, used by the derivation-tree recorder.
pub trait StepObserver {
    fn pushed(&mut self, point: &Point);
    fn pruned(&mut self, point: &Point);
}

type Handler = Box<dyn FnOnce(Answer)>;

pub struct ThreadState {
    pub session: Session,
    pub stack: Vec<Rc<Point>>,
    calls: VecDeque<Handler>,
    /// Total resolution steps since creation.
    pub inferences: u64,
    /// Steps left for the current answer request.
    pub current_limit: u64,
    pub max_inferences: u64,
    suspended: bool,
    query_vars: Vec<Var>,
    next_id: u64,
    observer: Option<Rc<RefCell<dyn StepObserver>>>,
    /// The event value while an event goal runs.
    pub event: Option<Term>,
    me: Weak<RefCell<ThreadState>>,
}

/// A derivation: choice-point stack, pending answer handlers and counters.
#[derive(Clone)]
pub struct Thread(Rc<RefCell<ThreadState>>);

#[derive(Clone)]
pub struct WeakThread(Weak<RefCell<ThreadState>>);

impl WeakThread {
    pub fn upgrade(&self) -> Option<Thread> {
        self.0.upgrade().map(Thread)
    }

    /// Pushes the continuation as a success and resumes the loop.
    pub fn resume(&self, cont: Continuation, mgu: Option<Substitution>) {
        if let Some(t) = self.upgrade() {
            t.0.borrow_mut().success(&cont, mgu.as_ref());
            t.again();
        }
    }

    /// Resumes with an error thrown at the continuation.
    pub fn resume_error(&self, cont: Continuation, ball: Term) {
        if let Some(t) = self.upgrade() {
            t.0.borrow_mut().throw_error(&cont, ball);
            t.again();
        }
    }

    /// Resumes with no new point, so the derivation backtracks.
    pub fn resume_failure(&self) {
        if let Some(t) = self.upgrade() {
            t.again();
        }
    }
}

impl fmt::Debug for Thread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = self.0.borrow();
        f.debug_struct("Thread").field("depth", &st.stack.len()).field("inferences", &st.inferences).finish()
    }
}

impl Thread {
    pub fn new(session: &Session) -> Thread {
        let max = session.max_inferences();
        let rc = Rc::new_cyclic(|me| {
            RefCell::new(ThreadState {
                session: session.clone(),
                stack: Vec::new(),
                calls: VecDeque::new(),
                inferences: 0,
                current_limit: max,
                max_inferences: max,
                suspended: false,
                query_vars: Vec::new(),
                next_id: 0,
                observer: None,
                event: None,
                me: me.clone(),
            })
        });
        Thread(rc)
    }

    pub fn session(&self) -> Session {
        self.0.borrow().session.clone()
    }

    pub fn downgrade(&self) -> WeakThread {
        WeakThread(Rc::downgrade(&self.0))
    }

    pub fn state(&self) -> std::cell::Ref<'_, ThreadState> {
        self.0.borrow()
    }

    pub fn state_mut(&self) -> std::cell::RefMut<'_, ThreadState> {
        self.0.borrow_mut()
    }

    pub fn is_busy(&self) -> bool {
        let st = self.0.borrow();
        !st.calls.is_empty() || st.suspended
    }

    /// Whether choice points remain, so another answer request may succeed.
    pub fn has_alternatives(&self) -> bool {
        !self.0.borrow().stack.is_empty()
    }

    pub fn inferences(&self) -> u64 {
        self.0.borrow().inferences
    }

    pub fn set_max_inferences(&self, n: u64) {
        let mut st = self.0.borrow_mut();
        st.max_inferences = n;
        st.current_limit = n;
    }

    pub fn set_observer(&self, obs: Option<Rc<RefCell<dyn StepObserver>>>) {
        self.0.borrow_mut().observer = obs;
    }

    /// Query variables, in order of first appearance.
    pub fn query_vars(&self) -> Vec<Var> {
        self.0.borrow().query_vars.clone()
    }

    /// Parses `text` and makes it the thread's goal. Syntax errors go to
    /// `done`, asynchronously; a busy thread is refused immediately.
    pub fn query(&self, text: &str, done: impl FnOnce(Result<(), Term>) + 'static) -> Result<(), EngineError> {
        if self.is_busy() {
            return Err(EngineError::Busy);
        }
        let session = self.session();
        let parsed = session.parse_query(text);
        let result = parsed.map(|(goal, vars)| self.set_goal(goal, vars)).map_err(|e| e.to_term());
        session.event_loop().spawn(move || done(result));
        Ok(())
    }

    /// Installs an already-parsed goal; the query variables are reported in
    /// answers.
    pub fn set_goal(&self, goal: Term, query_vars: Vec<Var>) {
        self.set_goal_in(goal, query_vars, atom!("user"))
    }

    /// Like `set_goal`, resolving predicates from `module`.
    pub fn set_goal_in(&self, goal: Term, query_vars: Vec<Var>, module: Atom) {
        let mut st = self.0.borrow_mut();
        st.stack.clear();
        st.suspended = false;
        st.current_limit = st.max_inferences;
        st.query_vars = query_vars.clone();
        let root = Point {
            id: st.fresh_id(),
            goal: cons(Frame::call(goal, 0, module), None),
            subst: Rc::new(Substitution::identity(query_vars)),
            parent: None,
            kind: PointKind::Normal,
        };
        st.push(root);
    }

    /// Requests the next answer; `handler` runs later from the event loop.
    pub fn answer(&self, handler: impl FnOnce(Answer) + 'static) {
        let start = {
            let mut st = self.0.borrow_mut();
            st.calls.push_back(Box::new(handler));
            st.calls.len() == 1 && !st.suspended
        };
        if start {
            self.again();
        }
    }

    /// Runs resolution steps until every queued handler has an answer or an
    /// asynchronous native suspends the thread.
    pub fn again(&self) {
        loop {
            let (handler, answer) = {
                let mut st = self.0.borrow_mut();
                if st.calls.is_empty() {
                    return;
                }
                st.suspended = false;
                let answer = loop {
                    if st.current_limit == 0 {
                        break Answer::LimitExceeded;
                    }
                    match st.stack.last() {
                        None => break Answer::Failure,
                        Some(top) if top.is_answer() => {
                            let p = st.stack.pop().expect("top exists");
                            break Answer::Success((*p.subst).clone());
                        }
                        Some(top) if top.is_error() => {
                            let p = st.stack.pop().expect("top exists");
                            st.stack.clear();
                            let PointKind::Error(ball) = &p.kind else { unreachable!() };
                            break Answer::Error(ball.clone());
                        }
                        Some(_) => {}
                    }
                    if st.step() == Step::Suspended {
                        return;
                    }
                };
                let handler = st.calls.pop_front().expect("queue non-empty");
                st.current_limit = st.max_inferences;
                (handler, answer)
            };
            self.session().event_loop().spawn(move || handler(answer));
        }
    }

    /// One resolution step, for tooling and tests.
    pub fn step(&self) -> Step {
        self.0.borrow_mut().step()
    }
}

impl ThreadState {
    fn fresh_id(&mut self) -> u64 {
        self.next_id += 1;
        self.next_id
    }

    pub fn is_suspended(&self) -> bool {
        self.suspended
    }

    pub fn push(&mut self, p: Point) {
        if let Some(obs) = &self.observer {
            obs.borrow_mut().pushed(&p);
        }
        self.stack.push(Rc::new(p));
    }

    fn child(&mut self, parent: &Point, goal: Goal, subst: Rc<Substitution>) {
        let p = Point { id: self.fresh_id(), goal, subst, parent: Some(parent.id), kind: PointKind::Normal };
        self.push(p);
    }

    /// Pushes `goal` after binding `mgu` in it and in the substitution.
    fn child_with(&mut self, parent: &Point, goal: Goal, subst: &Rc<Substitution>, mgu: &Substitution) {
        if mgu.is_empty() {
            self.child(parent, goal, subst.clone());
        } else {
            let goal = apply_goal(&goal, mgu);
            let subst = Rc::new(subst.apply_to_values(mgu));
            self.child(parent, goal, subst);
        }
    }

    /// Drops every point above `height`.
    pub fn cut_to(&mut self, height: usize) {
        while self.stack.len() > height {
            let p = self.stack.pop().expect("above height");
            if let Some(obs) = &self.observer {
                obs.borrow_mut().pruned(&p);
            }
        }
    }

    /// Pushes the continuation with `mgu` applied.
    pub fn success(&mut self, cont: &Continuation, mgu: Option<&Substitution>) {
        let empty = Substitution::new();
        let mgu = mgu.unwrap_or(&empty);
        let goal = apply_goal(&cont.goal, mgu);
        let subst = if mgu.is_empty() { cont.subst.clone() } else { Rc::new(cont.subst.apply_to_values(mgu)) };
        let p = Point { id: self.fresh_id(), goal, subst, parent: Some(cont.parent), kind: PointKind::Normal };
        self.push(p);
    }

    /// Throws `ball` from the continuation's position.
    pub fn throw_error(&mut self, cont: &Continuation, ball: Term) {
        let goal = cons(Frame::call(Term::atom("true"), 0, cont.module), cont.goal.clone());
        let at = Point { id: self.fresh_id(), goal, subst: cont.subst.clone(), parent: Some(cont.parent), kind: PointKind::Normal };
        self.throw(&at, ball);
    }

    pub fn step(&mut self) -> Step {
        match self.stack.last() {
            None => return Step::Empty,
            Some(top) if top.is_answer() || top.is_error() => return Step::Stopped,
            _ => {}
        }
        let point = self.stack.pop().expect("non-empty");
        self.inferences += 1;
        self.current_limit = self.current_limit.saturating_sub(1);
        match &point.kind {
            PointKind::Normal => {}
            PointKind::Guarded(flag) => {
                if flag.get() {
                    return Step::Progressed;
                }
            }
            PointKind::Catch { .. } => return Step::Progressed,
            PointKind::Collector { collector, result, tail, .. } => {
                let items = std::mem::take(&mut *collector.results.borrow_mut());
                let list = Term::list_with_tail(items, tail.clone());
                if let Some(mgu) = unify(result, &list, self.session.occurs_check()) {
                    self.child_with(&point, point.goal.clone(), &point.subst, &mgu);
                }
                return Step::Progressed;
            }
            PointKind::Error(_) => unreachable!("checked above"),
        }
        let Some((frame, rest)) = point.select() else { return Step::Progressed };
        match frame {
            Frame::CutTo(h) => {
                self.cut_to(*h);
                self.child(&point, rest.clone(), point.subst.clone());
            }
            Frame::PopCatch(_) => self.child(&point, rest.clone(), point.subst.clone()),
            Frame::SoftCut(flag) => {
                flag.set(true);
                self.child(&point, rest.clone(), point.subst.clone());
            }
            Frame::Collect { into, template } => {
                let copy = copy_fresh(template, self.session.vars());
                into.results.borrow_mut().push(copy);
            }
            Frame::Call { goal, cut, module } => {
                let (goal, cut, module) = (goal.clone(), *cut, *module);
                let rest = rest.clone();
                return self.call(&point, goal, cut, module, rest);
            }
        }
        Step::Progressed
    }

    fn call(&mut self, point: &Rc<Point>, goal: Term, cut: usize, module: Atom, rest: Goal) -> Step {
        let pi = match &goal {
            Term::Var(_) => {
                self.throw(point, err::instantiation(PredicateIndicator::new("call", 1).to_term()));
                return Step::Progressed;
            }
            Term::Compound(c) => c.indicator(),
            _ => {
                let ball = err::type_error("callable", goal.clone(), PredicateIndicator::new("call", 1).to_term());
                self.throw(point, ball);
                return Step::Progressed;
            }
        };
        let found = self.session.resolve(module, &pi);
        match found {
            None => {
                if self.session.unknown_is_error() {
                    let ball = err::existence("procedure", pi.to_term(), pi.to_term());
                    self.throw(point, ball);
                }
            }
            Some((_, Pred::Control(k))) => self.control(point, k, &goal, cut, module, rest),
            Some((_, Pred::Native(f))) => {
                let result = {
                    let mut call = Call { thread: self, point, atom: &goal, module };
                    f(&mut call)
                };
                match result {
                    Ok(Outcome::Fail) => {}
                    Ok(Outcome::True) => self.child(point, rest, point.subst.clone()),
                    Ok(Outcome::Unify(mgu)) => self.child_with(point, rest, &point.subst, &mgu),
                    Ok(Outcome::Branches(branches)) => {
                        for b in branches.into_iter().rev() {
                            let goal = prepend(b.frames, rest.clone());
                            self.child_with(point, goal, &point.subst, &b.mgu);
                        }
                    }
                    Ok(Outcome::Suspend) => {
                        self.suspended = true;
                        return Step::Suspended;
                    }
                    Err(ball) => self.throw(point, ball),
                }
            }
            Some((def, Pred::Clauses(list))) => self.resolve_clauses(point, &goal, def, &list, rest),
        }
        Step::Progressed
    }

    fn resolve_clauses(&mut self, point: &Rc<Point>, goal: &Term, def: Atom, list: &super::kb::ClauseList, rest: Goal) {
        let height = self.stack.len();
        let oc = self.session.occurs_check();
        let vars = self.session.vars().clone();
        let candidates = list.candidates(goal.args().first());
        let mut children = Vec::new();
        for clause in candidates.as_slice() {
            let base = vars.reserve(clause.nvars);
            let head = rename_at(&clause.head, base);
            let Some(mgu) = unify(goal, &head, oc) else { continue };
            let local = mgu.vars().all(|v| matches!(v, Var::Fresh(k) if *k >= base));
            let (rest, subst) = if local {
                (rest.clone(), point.subst.clone())
            } else {
                (apply_goal(&rest, &mgu), Rc::new(point.subst.apply_to_values(&mgu)))
            };
            let mut body = Vec::with_capacity(clause.goals.len());
            for g in clause.goals.iter() {
                let t = map_vars(g, &mut |v| match v {
                    Var::Fresh(k) => {
                        let r = Var::Fresh(base + k);
                        Some(mgu.get(&r).cloned().unwrap_or(Term::Var(r)))
                    }
                    _ => None,
                })
                .unwrap_or_else(|| g.clone());
                body.push(Frame::call(t, height, def));
            }
            children.push((prepend(body, rest), subst));
        }
        for (goal, subst) in children.into_iter().rev() {
            self.child(point, goal, subst);
        }
    }

    fn control(&mut self, point: &Rc<Point>, k: Control, goal: &Term, cut: usize, module: Atom, rest: Goal) {
        let args = goal.args();
        let here = |t: &Term| Frame::call(t.clone(), cut, module);
        match k {
            Control::True => self.child(point, rest, point.subst.clone()),
            Control::Fail => {}
            Control::Conj => {
                let g = prepend(vec![here(&args[0]), here(&args[1])], rest);
                self.child(point, g, point.subst.clone());
            }
            Control::Disj => {
                if let Some(ct) = args[0].args_if("->", 2) {
                    self.if_then_else(point, &ct[0], &ct[1], Some(&args[1]), cut, module, rest);
                } else if let Some(ct) = args[0].args_if("*->", 2) {
                    self.soft_if(point, &ct[0], &ct[1], &args[1], cut, module, rest);
                } else {
                    let right = cons(here(&args[1]), rest.clone());
                    let left = cons(here(&args[0]), rest);
                    self.child(point, right, point.subst.clone());
                    self.child(point, left, point.subst.clone());
                }
            }
            Control::IfThen => self.if_then_else(point, &args[0], &args[1], None, cut, module, rest),
            Control::SoftIf => {
                let g = prepend(vec![Frame::call(args[0].clone(), self.stack.len(), module), here(&args[1])], rest);
                self.child(point, g, point.subst.clone());
            }
            Control::Not => {
                let fail = Term::atom("fail");
                let t = Term::atom("true");
                self.if_then_else(point, &args[0], &fail, Some(&t), cut, module, rest);
            }
            Control::Cut => {
                self.cut_to(cut);
                self.child(point, rest, point.subst.clone());
            }
            Control::Call(n) => {
                let target = &args[0];
                let ctx = PredicateIndicator::new("call", n + 1).to_term();
                let (target, module) = strip_module(target, module);
                let full = match add_args(&target, &args[1..]) {
                    Ok(t) => t,
                    Err(AddArgs::Var) => return self.throw(point, err::instantiation(ctx)),
                    Err(AddArgs::NotCallable) => return self.throw(point, err::type_error("callable", target, ctx)),
                };
                let g = cons(Frame::call(full, self.stack.len(), module), rest);
                self.child(point, g, point.subst.clone());
            }
            Control::Catch => {
                let id = self.fresh_id();
                let marker = Point {
                    id,
                    goal: rest.clone(),
                    subst: point.subst.clone(),
                    parent: Some(point.id),
                    kind: PointKind::Catch { id, catcher: args[1].clone(), recovery: args[2].clone(), cut, module },
                };
                self.push(marker);
                let g = prepend(vec![Frame::call(args[0].clone(), self.stack.len(), module), Frame::PopCatch(id)], rest);
                self.child(point, g, point.subst.clone());
            }
            Control::Throw => {
                if args[0].is_var() {
                    return self.throw(point, err::instantiation(PredicateIndicator::new("throw", 1).to_term()));
                }
                self.throw(point, args[0].clone());
            }
            Control::Findall | Control::Findall4 => {
                let tail = if k == Control::Findall4 { args[3].clone() } else { Term::nil() };
                let ctx = PredicateIndicator::new("findall", args.len()).to_term();
                if !is_partial_list(&args[2]) {
                    return self.throw(point, err::type_error("list", args[2].clone(), ctx));
                }
                let id = self.fresh_id();
                let collector = Collector::new(id);
                let outer: Vec<u64> = active_catches(&rest);
                let marker = Point {
                    id,
                    goal: rest,
                    subst: point.subst.clone(),
                    parent: Some(point.id),
                    kind: PointKind::Collector { collector: collector.clone(), result: args[2].clone(), tail, module },
                };
                self.push(marker);
                let mut frames = vec![Frame::call(args[1].clone(), self.stack.len(), module)];
                frames.push(Frame::Collect { into: collector, template: args[0].clone() });
                frames.extend(outer.into_iter().map(Frame::PopCatch));
                let g = prepend(frames, None);
                self.child(point, g, point.subst.clone());
            }
            Control::Qualified => {
                let Some(m) = args[0].as_atom() else {
                    let ctx = PredicateIndicator::new(":", 2).to_term();
                    let ball = if args[0].is_var() {
                        err::instantiation(ctx)
                    } else {
                        err::type_error("atom", args[0].clone(), ctx)
                    };
                    return self.throw(point, ball);
                };
                let g = cons(Frame::call(args[1].clone(), cut, m), rest);
                self.child(point, g, point.subst.clone());
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn if_then_else(&mut self, point: &Rc<Point>, c: &Term, t: &Term, e: Option<&Term>, cut: usize, module: Atom, rest: Goal) {
        let h = self.stack.len();
        if let Some(e) = e {
            let g = cons(Frame::call(e.clone(), cut, module), rest.clone());
            self.child(point, g, point.subst.clone());
        }
        let frames = vec![Frame::call(c.clone(), self.stack.len(), module), Frame::CutTo(h), Frame::call(t.clone(), cut, module)];
        self.child(point, prepend(frames, rest), point.subst.clone());
    }

    #[allow(clippy::too_many_arguments)]
    fn soft_if(&mut self, point: &Rc<Point>, c: &Term, t: &Term, e: &Term, cut: usize, module: Atom, rest: Goal) {
        let flag = Rc::new(Cell::new(false));
        let else_point = Point {
            id: self.fresh_id(),
            goal: cons(Frame::call(e.clone(), cut, module), rest.clone()),
            subst: point.subst.clone(),
            parent: Some(point.id),
            kind: PointKind::Guarded(flag.clone()),
        };
        self.push(else_point);
        let frames = vec![Frame::call(c.clone(), self.stack.len(), module), Frame::SoftCut(flag), Frame::call(t.clone(), cut, module)];
        self.child(point, prepend(frames, rest), point.subst.clone());
    }

    /// Unwinds to the innermost active catch/3 whose catcher unifies with
    /// the ball, or leaves an error state on the stack. Halting is never
    /// caught.
    pub fn throw(&mut self, at: &Point, ball: Term) {
        let ball = copy_fresh(&ball, self.session.vars());
        let active = active_catches(&at.goal);
        let oc = self.session.occurs_check();
        let halting = ball.args_if("$halt", 1).is_some();
        while let Some(p) = self.stack.pop() {
            if let PointKind::Catch { id, catcher, recovery, cut, module } = &p.kind {
                if active.contains(id) && !halting {
                    if let Some(mgu) = unify(catcher, &ball, oc) {
                        let g = cons(Frame::call(recovery.clone(), *cut, *module), p.goal.clone());
                        self.child_with(&p, g, &p.subst, &mgu);
                        return;
                    }
                }
            }
            if let Some(obs) = &self.observer {
                obs.borrow_mut().pruned(&p);
            }
        }
        let e = Point { id: self.fresh_id(), goal: None, subst: at.subst.clone(), parent: Some(at.id), kind: PointKind::Error(ball) };
        self.push(e);
    }
}

fn active_catches(goal: &Goal) -> Vec<u64> {
    goal_frames(goal)
        .filter_map(|f| match f {
            Frame::PopCatch(id) => Some(*id),
            _ => None,
        })
        .collect()
}

fn is_partial_list(t: &Term) -> bool {
    let (_, tail) = t.list_prefix();
    tail.is_var() || tail.is_nil()
}

/// Renames every variable of `t` apart.
pub fn copy_fresh(t: &Term, gen: &VarGen) -> Term {
    let mut map: FxHashMap<Var, Term> = FxHashMap::default();
    map_vars(t, &mut |v| Some(map.entry(v).or_insert_with(|| Term::Var(gen.fresh())).clone())).unwrap_or_else(|| t.clone())
}

fn strip_module(t: &Term, module: Atom) -> (Term, Atom) {
    let mut t = t.clone();
    let mut module = module;
    while let Some(a) = t.args_if(":", 2) {
        match a[0].as_atom() {
            Some(m) => {
                module = m;
                t = a[1].clone();
            }
            None => break,
        }
    }
    (t, module)
}

enum AddArgs {
    Var,
    NotCallable,
}

fn add_args(t: &Term, extra: &[Term]) -> Result<Term, AddArgs> {
    match t {
        Term::Var(_) => Err(AddArgs::Var),
        Term::Compound(c) => {
            if extra.is_empty() {
                return Ok(t.clone());
            }
            let mut args = c.args().to_vec();
            args.extend_from_slice(extra);
            Ok(Term::compound(c.name(), args))
        }
        _ => Err(AddArgs::NotCallable),
    }
}
