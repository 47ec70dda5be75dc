//! Martelli–Montanari unification.
//!
//! The equation set is a worklist of term pairs. Variable elimination is
//! recorded in a triangular binding table instead of being pushed through
//! the remaining equations, and the table is solved into an idempotent
//! substitution once the worklist is empty.

use super::{HostRef, Substitution, Term, Var};
use rustc_hash::{FxHashMap, FxHashSet};

struct Unifier {
    occurs_check: bool,
    bindings: FxHashMap<Var, Term>,
    order: Vec<Var>,
    equations: Vec<(Term, Term)>,
}

impl Unifier {
    fn new(occurs_check: bool) -> Self {
        Unifier { occurs_check, bindings: FxHashMap::default(), order: Vec::new(), equations: Vec::new() }
    }

    fn walk(&self, mut t: Term) -> Term {
        while let Term::Var(v) = &t {
            match self.bindings.get(v) {
                Some(b) => t = b.clone(),
                None => break,
            }
        }
        t
    }

    fn bind(&mut self, v: Var, t: Term) -> bool {
        if self.occurs_check && self.occurs(v, &t) {
            return false;
        }
        self.bindings.insert(v, t);
        self.order.push(v);
        true
    }

    fn occurs(&self, v: Var, t: &Term) -> bool {
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            match self.walk(t) {
                Term::Var(w) if w == v => return true,
                Term::Compound(c) if !c.is_ground() => stack.extend(c.args().iter().cloned()),
                _ => {}
            }
        }
        false
    }

    fn run(&mut self) -> bool {
        while let Some((a, b)) = self.equations.pop() {
            let a = self.walk(a);
            let b = self.walk(b);
            let ok = match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    if x == y {
                        true
                    } else if x.age() > y.age() {
                        self.bind(x, Term::Var(y))
                    } else {
                        self.bind(y, Term::Var(x))
                    }
                }
                (Term::Var(x), t) | (t, Term::Var(x)) => self.bind(x, t),
                (Term::Num(m), Term::Num(n)) => m.identical(&n),
                (Term::Compound(f), Term::Compound(g)) => {
                    if f.same_node(&g) {
                        true
                    } else if f.name() != g.name() || f.arity() != g.arity() {
                        false
                    } else {
                        // reversed so the leftmost pair is solved first
                        for (x, y) in f.args().iter().zip(g.args()).rev() {
                            self.equations.push((x.clone(), y.clone()));
                        }
                        true
                    }
                }
                (Term::Host(h), Term::Host(k)) => h.same_as(&k),
                (Term::Host(h), t) | (t, Term::Host(h)) => match host_pattern_pairs(&h, &t) {
                    Some(pairs) => {
                        self.equations.extend(pairs.into_iter().rev());
                        true
                    }
                    None => false,
                },
                _ => false,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Resolves the triangular table into an idempotent substitution.
    fn solve(self) -> Substitution {
        let mut memo: FxHashMap<Var, Term> = FxHashMap::default();
        let mut out = Substitution::new();
        for v in &self.order {
            let mut path = FxHashSet::default();
            path.insert(*v);
            let (t, _) = self.resolve(&self.bindings[v], &mut path, &mut memo);
            out.bind(*v, t);
        }
        out
    }

    /// Fully dereferences `t`. A variable already on `path` is left in place,
    /// which is how a cyclic binding stays finite; such results are not memoized.
    fn resolve(&self, t: &Term, path: &mut FxHashSet<Var>, memo: &mut FxHashMap<Var, Term>) -> (Term, bool) {
        let mut cyclic = false;
        let out = super::map_vars(t, &mut |v| {
            if path.contains(&v) {
                cyclic = true;
                return None;
            }
            if let Some(done) = memo.get(&v) {
                return Some(done.clone());
            }
            let bound = self.bindings.get(&v)?;
            path.insert(v);
            let (r, c) = self.resolve(bound, path, memo);
            path.remove(&v);
            if c {
                cyclic = true;
            } else {
                memo.insert(v, r.clone());
            }
            Some(r)
        });
        (out.unwrap_or_else(|| t.clone()), cyclic)
    }
}

/// Most general unifier of `a` and `b`, or `None` when they do not unify.
pub fn unify(a: &Term, b: &Term, occurs_check: bool) -> Option<Substitution> {
    let mut u = Unifier::new(occurs_check);
    u.equations.push((a.clone(), b.clone()));
    u.run().then(|| u.solve())
}

/// Unifies a host value with a term: identical handles unify trivially and a
/// `{p1: V1, ..., pn: Vn}` pattern unifies each `Vi` with property `pi`.
pub fn unify_host(h: &HostRef, t: &Term, occurs_check: bool) -> Option<Substitution> {
    unify(&Term::Host(h.clone()), t, occurs_check)
}

/// Pairs (property value, pattern value) for a `{...}` pattern, or `None`
/// if the pattern is malformed or names a missing property.
fn host_pattern_pairs(h: &HostRef, t: &Term) -> Option<Vec<(Term, Term)>> {
    let [body] = t.args_if("{}", 1)? else { return None };
    let mut props = Vec::new();
    let mut pointer = body;
    while let Some([first, rest]) = pointer.args_if(",", 2) {
        props.push(first);
        pointer = rest;
    }
    props.push(pointer);
    let mut pairs = Vec::with_capacity(props.len());
    for bind in props {
        let [name, value] = bind.args_if(":", 2)? else { return None };
        let name = name.as_atom()?;
        let converted = h.property(name.as_str())?;
        pairs.push((converted, value.clone()));
    }
    Some(pairs)
}

/// True if `v` occurs in `t` (no bindings consulted).
pub fn occurs_in(v: Var, t: &Term) -> bool {
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match t {
            Term::Var(w) if *w == v => return true,
            Term::Compound(c) if !c.is_ground() => stack.extend(c.args()),
            _ => {}
        }
    }
    false
}
