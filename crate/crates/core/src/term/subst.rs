use super::{Compound, Term, Var};
use indexmap::IndexMap;
use rustc_hash::FxBuildHasher;
use std::cell::Cell;
use std::fmt;
use std::rc::Rc;

/// A map from variables to terms, kept in insertion order.
///
/// Substitutions produced by [`unify`](super::unify) are idempotent: no bound
/// variable occurs in any binding, except for the cyclic bindings that are
/// permitted when the occurs check is off.
#[derive(Clone, Default)]
pub struct Substitution {
    bindings: IndexMap<Var, Term, FxBuildHasher>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity substitution over `vars` (each variable bound to itself).
    pub fn identity(vars: impl IntoIterator<Item = Var>) -> Self {
        let mut s = Self::new();
        for v in vars {
            s.bind(v, Term::Var(v));
        }
        s
    }

    pub fn bind(&mut self, v: Var, t: Term) {
        self.bindings.insert(v, t);
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.bindings.contains_key(v)
    }

    pub fn apply(&self, t: &Term) -> Term {
        apply_substitution(t, self)
    }

    /// Maps every binding's value through `mgu`, keeping the domain.
    pub fn apply_to_values(&self, mgu: &Substitution) -> Substitution {
        if mgu.is_empty() {
            return self.clone();
        }
        Substitution { bindings: self.bindings.iter().map(|(v, t)| (*v, mgu.apply(t))).collect() }
    }

    /// Keeps only the bindings for `vars`, in the order given.
    pub fn restrict(&self, vars: &[Var]) -> Substitution {
        let mut out = Substitution::new();
        for v in vars {
            if let Some(t) = self.get(v) {
                out.bind(*v, t.clone());
            }
        }
        out
    }

    /// True when no binding mentions a variable that `self` also binds.
    pub fn is_idempotent(&self) -> bool {
        self.bindings.values().all(|t| t.variables().iter().all(|v| !self.contains(v)))
    }
}

impl PartialEq for Substitution {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|(v, t)| other.get(v).is_some_and(|u| u == t))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t:?}")?;
        }
        f.write_str("}")
    }
}

/// Replaces every bound variable of `t` by its binding.
pub fn apply_substitution(t: &Term, s: &Substitution) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    map_vars(t, &mut |v| s.get(&v).cloned()).unwrap_or_else(|| t.clone())
}

/// Rebuilds `t` with each variable passed through `f`; `None` from `f` keeps
/// the variable. Returns `None` when nothing changed so callers can share the
/// original. Ground subterms are never visited, and the last argument of each
/// compound is walked iteratively so long lists do not grow the call stack.
pub fn map_vars(t: &Term, f: &mut dyn FnMut(Var) -> Option<Term>) -> Option<Term> {
    let mut spine: Vec<(&Compound, Option<Vec<Term>>)> = Vec::new();
    let mut cur = t;
    let tail_result = loop {
        match cur {
            Term::Var(v) => break f(*v),
            Term::Compound(c) if !c.is_ground() => {
                let args = c.args();
                let n = args.len();
                let mut changed: Option<Vec<Term>> = None;
                for (i, a) in args[..n - 1].iter().enumerate() {
                    if let Some(new) = map_vars(a, f) {
                        changed.get_or_insert_with(|| args[..n - 1].to_vec())[i] = new;
                    }
                }
                spine.push((c, changed));
                cur = &args[n - 1];
            }
            _ => break None,
        }
    };
    let mut result = tail_result;
    while let Some((c, changed)) = spine.pop() {
        if changed.is_none() && result.is_none() {
            continue;
        }
        let args = c.args();
        let mut items = changed.unwrap_or_else(|| args[..args.len() - 1].to_vec());
        items.push(result.take().unwrap_or_else(|| args[args.len() - 1].clone()));
        result = Some(Term::Compound(Compound::new(c.name(), items)));
    }
    result
}

/// Source of globally fresh variables, shared by a session's threads.
#[derive(Clone, Default)]
pub struct VarGen(Rc<Cell<u64>>);

impl VarGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&self) -> Var {
        Var::Fresh(self.reserve(1))
    }

    /// Reserves `n` consecutive ids and returns the first.
    pub fn reserve(&self, n: u64) -> u64 {
        let base = self.0.get() + 1;
        self.0.set(base + n - 1);
        base
    }

    pub fn peek(&self) -> u64 {
        self.0.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(args: Vec<Term>) -> Term {
        Term::compound("f", args)
    }

    #[test]
    fn apply_replaces_bound_variables() {
        let mut s = Substitution::new();
        s.bind(Var::named("X"), Term::atom("a"));
        let t = f(vec![Term::var("X"), Term::var("Y")]);
        assert_eq!(s.apply(&t), f(vec![Term::atom("a"), Term::var("Y")]));
    }

    #[test]
    fn empty_substitution_is_identity() {
        let t = Term::var("X");
        assert_eq!(Substitution::new().apply(&t), t);
    }

    #[test]
    fn answer_with_free_variable_stays_free() {
        let mut s = Substitution::new();
        s.bind(Var::named("X"), Term::compound("foo", vec![Term::var("Z")]));
        s.bind(Var::named("Y"), Term::int(3));
        let t = Term::compound("foo", vec![Term::var("Z")]);
        assert_eq!(s.apply(&t), t);
    }

    #[test]
    fn unchanged_terms_are_shared() {
        let t = f(vec![Term::var("Y"), Term::atom("a")]);
        let mut s = Substitution::new();
        s.bind(Var::named("X"), Term::atom("b"));
        assert!(map_vars(&t, &mut |v| s.get(&v).cloned()).is_none());
    }

    #[test]
    fn deep_lists_map_iteratively() {
        let l = Term::list_with_tail((0..200_000).map(Term::int), Term::var("T"));
        let mut s = Substitution::new();
        s.bind(Var::named("T"), Term::nil());
        let out = s.apply(&l);
        assert_eq!(out.list_items().unwrap().len(), 200_000);
    }

    #[test]
    fn var_gen_reserves_blocks() {
        let g = VarGen::new();
        assert_eq!(g.reserve(3), 1);
        assert_eq!(g.fresh(), Var::Fresh(4));
    }
}
