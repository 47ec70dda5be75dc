//! Choice points and goal lists.

use crate::term::{map_vars, Atom, Substitution, Term};
use std::cell::{Cell, RefCell};
use std::fmt;
use std::rc::Rc;

/// One entry of a goal list.
#[derive(Clone)]
pub enum Frame {
    /// Call `goal` in `module`; a `!` inside cuts the stack back to `cut`.
    Call { goal: Term, cut: usize, module: Atom },
    /// Truncate the stack to the given height (if-then-else commit).
    CutTo(usize),
    /// Leaves the scope of the catch/3 call with this id.
    PopCatch(u64),
    /// Records an instance of the template for an all-solutions call, then fails.
    Collect { into: Rc<Collector>, template: Term },
    /// Marks a soft-cut condition as having succeeded.
    SoftCut(Rc<Cell<bool>>),
}

impl Frame {
    pub fn call(goal: Term, cut: usize, module: Atom) -> Frame {
        Frame::Call { goal, cut, module }
    }

    fn is_ground(&self) -> bool {
        match self {
            Frame::Call { goal, .. } => goal.is_ground(),
            Frame::Collect { template, .. } => template.is_ground(),
            _ => true,
        }
    }

    fn apply(&self, s: &Substitution) -> Option<Frame> {
        let f = &mut |v| s.get(&v).cloned();
        match self {
            Frame::Call { goal, cut, module } => {
                map_vars(goal, f).map(|goal| Frame::Call { goal, cut: *cut, module: *module })
            }
            Frame::Collect { into, template } => {
                map_vars(template, f).map(|template| Frame::Collect { into: into.clone(), template })
            }
            _ => None,
        }
    }
}

pub struct GoalNode {
    pub frame: Frame,
    pub next: Goal,
    ground: bool,
}

impl Drop for GoalNode {
    fn drop(&mut self) {
        let mut next = self.next.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut node) => next = node.next.take(),
                Err(_) => break,
            }
        }
    }
}

/// A persistent list of frames; `None` is the empty goal.
pub type Goal = Option<Rc<GoalNode>>;

pub fn cons(frame: Frame, next: Goal) -> Goal {
    let ground = frame.is_ground() && next.as_ref().is_none_or(|n| n.ground);
    Some(Rc::new(GoalNode { frame, next, ground }))
}

/// Prepends `frames` (first frame first) to `rest`.
pub fn prepend(frames: Vec<Frame>, rest: Goal) -> Goal {
    frames.into_iter().rev().fold(rest, |acc, f| cons(f, acc))
}

/// Applies `s` to every frame; ground suffixes are shared.
pub fn apply_goal(goal: &Goal, s: &Substitution) -> Goal {
    if s.is_empty() {
        return goal.clone();
    }
    let mut prefix: Vec<&GoalNode> = Vec::new();
    let mut cur = goal;
    while let Some(node) = cur {
        if node.ground {
            break;
        }
        prefix.push(node);
        cur = &node.next;
    }
    let mut out = cur.clone();
    let mut changed = false;
    for node in prefix.into_iter().rev() {
        match node.frame.apply(s) {
            Some(f) => {
                out = cons(f, out);
                changed = true;
            }
            None if changed => out = cons(node.frame.clone(), out),
            None => out = Some(rc_of(node, goal)),
        }
    }
    out
}

// Recovers the Rc for an unchanged node reachable from `goal`.
fn rc_of(node: &GoalNode, goal: &Goal) -> Rc<GoalNode> {
    let mut cur = goal;
    while let Some(rc) = cur {
        if std::ptr::eq(rc.as_ref(), node) {
            return rc.clone();
        }
        cur = &rc.next;
    }
    unreachable!("node belongs to goal")
}

pub fn goal_frames(goal: &Goal) -> impl Iterator<Item = &Frame> {
    let mut cur = goal.as_deref();
    std::iter::from_fn(move || {
        let node = cur?;
        cur = node.next.as_deref();
        Some(&node.frame)
    })
}

/// The callable terms of a goal list, ignoring bookkeeping frames.
pub fn goal_terms(goal: &Goal) -> Vec<Term> {
    goal_frames(goal)
        .filter_map(|f| match f {
            Frame::Call { goal, .. } => Some(goal.clone()),
            _ => None,
        })
        .collect()
}

/// State shared by a findall-style collection while its goal runs.
pub struct Collector {
    pub id: u64,
    pub results: RefCell<Vec<Term>>,
}

impl Collector {
    pub fn new(id: u64) -> Rc<Collector> {
        Rc::new(Collector { id, results: RefCell::new(Vec::new()) })
    }
}

pub enum PointKind {
    Normal,
    /// An uncaught error; stops the resolution loop.
    Error(Term),
    /// Restores the continuation of catch/3 when a matching ball is thrown.
    Catch { id: u64, catcher: Term, recovery: Term, cut: usize, module: Atom },
    /// Finishes a findall when backtracking reaches it.
    Collector { collector: Rc<Collector>, result: Term, tail: Term, module: Atom },
    /// Alternative that is skipped once the flag is set (soft-cut else branch).
    Guarded(Rc<Cell<bool>>),
}

/// A choice point: goal, substitution over the query variables, parent link.
pub struct Point {
    pub id: u64,
    pub goal: Goal,
    pub subst: Rc<Substitution>,
    pub parent: Option<u64>,
    pub kind: PointKind,
}

impl Point {
    pub fn is_answer(&self) -> bool {
        self.goal.is_none() && matches!(self.kind, PointKind::Normal)
    }

    pub fn is_error(&self) -> bool {
        matches!(self.kind, PointKind::Error(_))
    }

    /// The leftmost frame and the rest of the goal.
    pub fn select(&self) -> Option<(&Frame, &Goal)> {
        self.goal.as_ref().map(|n| (&n.frame, &n.next))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let goals = goal_terms(&self.goal);
        f.debug_struct("Point").field("id", &self.id).field("goal", &goals).field("subst", &self.subst).finish()
    }
}
