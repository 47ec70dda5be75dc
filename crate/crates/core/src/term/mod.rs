//! Ground representation of Prolog terms.
//!
//! A [`Term`] is a variable, a number, a compound (atoms are compounds of
//! arity zero) or an opaque host value. Compound arguments live behind an
//! `Rc` so cloning a term is cheap; every compound caches whether it is
//! ground, which lets substitution application skip whole subtrees.

mod atom;
mod host;
mod number;
mod order;
mod subst;
mod unify;

pub use atom::Atom;
pub use host::{HostObject, HostRef};
pub use number::Number;
pub use order::{compare_terms, variant};
pub use subst::{apply_substitution, map_vars, Substitution, VarGen};
pub use unify::{occurs_in, unify, unify_host};

use std::fmt;
use std::rc::Rc;

/// Interns an atom once per call site.
#[macro_export]
macro_rules! atom {
    ($s:expr) => {{
        static CELL: std::sync::OnceLock<$crate::term::Atom> = std::sync::OnceLock::new();
        *CELL.get_or_init(|| $crate::term::Atom::new($s))
    }};
}

/// A logic variable.
///
/// Source variables keep their name; renamed clause variables are numbered
/// and render as `_G<n>`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Named(Atom),
    Fresh(u64),
}

impl Var {
    pub fn named(name: &str) -> Var {
        Var::Named(Atom::new(name))
    }

    /// Older variables sort first; unification binds the younger one.
    pub(crate) fn age(&self) -> (u8, u64) {
        match self {
            Var::Named(_) => (0, 0),
            Var::Fresh(n) => (1, *n),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Named(a) => f.write_str(a.as_str()),
            Var::Fresh(n) => write!(f, "_G{n}"),
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `name/arity`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PredicateIndicator {
    pub name: Atom,
    pub arity: usize,
}

impl PredicateIndicator {
    pub fn new(name: &str, arity: usize) -> Self {
        PredicateIndicator { name: Atom::new(name), arity }
    }

    pub fn to_term(&self) -> Term {
        Term::compound(atom!("/"), vec![Term::Compound(Compound::atom(self.name)), Term::int(self.arity as i64)])
    }

    /// Parses a `Name/Arity` term.
    pub fn from_term(t: &Term) -> Option<Self> {
        let [name, arity] = t.args_if("/", 2)? else { return None };
        let name = name.as_atom()?;
        let arity = arity.as_int()?;
        (arity >= 0).then_some(PredicateIndicator { name, arity: arity as usize })
    }
}

impl fmt::Display for PredicateIndicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name.as_str(), self.arity)
    }
}

pub(crate) struct Args {
    ground: bool,
    items: Box<[Term]>,
}

impl Drop for Args {
    // Long lists are deeply nested; drop them without recursion.
    fn drop(&mut self) {
        let mut pending: Vec<Term> = std::mem::take(&mut self.items).into_vec();
        while let Some(t) = pending.pop() {
            if let Term::Compound(Compound { args: Some(rc), .. }) = t {
                if let Ok(mut inner) = Rc::try_unwrap(rc) {
                    pending.extend(std::mem::take(&mut inner.items).into_vec());
                }
            }
        }
    }
}

/// A functor applied to arguments. Atoms carry no argument block.
#[derive(Clone)]
pub struct Compound {
    name: Atom,
    args: Option<Rc<Args>>,
}

impl Compound {
    pub fn atom(name: Atom) -> Compound {
        Compound { name, args: None }
    }

    pub fn new(name: Atom, args: Vec<Term>) -> Compound {
        if args.is_empty() {
            return Compound::atom(name);
        }
        let ground = args.iter().all(Term::is_ground);
        Compound { name, args: Some(Rc::new(Args { ground, items: args.into_boxed_slice() })) }
    }

    pub fn name(&self) -> Atom {
        self.name
    }

    pub fn arity(&self) -> usize {
        self.args.as_ref().map_or(0, |a| a.items.len())
    }

    pub fn args(&self) -> &[Term] {
        self.args.as_ref().map_or(&[], |a| &a.items)
    }

    pub fn is_ground(&self) -> bool {
        self.args.as_ref().is_none_or(|a| a.ground)
    }

    pub fn indicator(&self) -> PredicateIndicator {
        PredicateIndicator { name: self.name, arity: self.arity() }
    }

    pub(crate) fn same_node(&self, other: &Compound) -> bool {
        match (&self.args, &other.args) {
            (Some(a), Some(b)) => Rc::ptr_eq(a, b),
            (None, None) => self.name == other.name,
            _ => false,
        }
    }
}

/// The universal Prolog value.
#[derive(Clone)]
pub enum Term {
    Var(Var),
    Num(Number),
    Compound(Compound),
    Host(HostRef),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::named(name))
    }

    pub fn atom(name: impl Into<Atom>) -> Term {
        Term::Compound(Compound::atom(name.into()))
    }

    pub fn compound(name: impl Into<Atom>, args: Vec<Term>) -> Term {
        Term::Compound(Compound::new(name.into(), args))
    }

    pub fn int(n: i64) -> Term {
        Term::Num(Number::Int(n))
    }

    pub fn float(f: f64) -> Term {
        Term::Num(Number::Float(f))
    }

    pub fn nil() -> Term {
        Term::atom(atom!("[]"))
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(atom!("."), vec![head, tail])
    }

    pub fn list(items: impl IntoIterator<Item = Term, IntoIter: DoubleEndedIterator>) -> Term {
        Term::list_with_tail(items, Term::nil())
    }

    pub fn list_with_tail(items: impl IntoIterator<Item = Term, IntoIter: DoubleEndedIterator>, tail: Term) -> Term {
        items.into_iter().rev().fold(tail, |acc, t| Term::cons(t, acc))
    }

    pub fn pair(functor: &str, a: Term, b: Term) -> Term {
        Term::compound(Atom::new(functor), vec![a, b])
    }

    /// Builds the `','/2` chain of `items` (or `true` when empty).
    pub fn conjunction(items: Vec<Term>) -> Term {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Term::atom(atom!("true")),
            Some(last) => it.fold(last, |acc, t| Term::compound(atom!(","), vec![t, acc])),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound(c) => c.is_ground(),
            _ => true,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Term::Compound(c) if c.args.is_none())
    }

    pub fn is_compound(&self) -> bool {
        matches!(self, Term::Compound(c) if c.args.is_some())
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Term::Compound(_))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Term::Num(_)) || self.is_atom()
    }

    pub fn is_number(&self) -> bool {
        matches!(self, Term::Num(_))
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Term::Num(n) if n.is_integer())
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<Atom> {
        match self {
            Term::Compound(c) if c.args.is_none() => Some(c.name),
            _ => None,
        }
    }

    pub fn as_compound(&self) -> Option<&Compound> {
        match self {
            Term::Compound(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self {
            Term::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Num(Number::Int(n)) => Some(*n),
            _ => None,
        }
    }

    pub fn as_host(&self) -> Option<&HostRef> {
        match self {
            Term::Host(h) => Some(h),
            _ => None,
        }
    }

    pub fn is_atom_named(&self, name: &str) -> bool {
        self.as_atom().is_some_and(|a| a.as_str() == name)
    }

    pub fn name(&self) -> Option<Atom> {
        self.as_compound().map(Compound::name)
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(c) => c.args(),
            _ => &[],
        }
    }

    pub fn arg(&self, i: usize) -> &Term {
        &self.args()[i]
    }

    /// Arguments of `self` if it is `name/arity`.
    pub fn args_if(&self, name: &str, arity: usize) -> Option<&[Term]> {
        match self {
            Term::Compound(c) if c.arity() == arity && c.name.as_str() == name => Some(c.args()),
            _ => None,
        }
    }

    pub fn indicator(&self) -> Option<PredicateIndicator> {
        self.as_compound().map(Compound::indicator)
    }

    pub fn is_nil(&self) -> bool {
        self.as_atom() == Some(atom!("[]"))
    }

    /// Head and tail of a `'.'/2` cell.
    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self.args_if(".", 2) {
            Some([h, t]) => Some((h, t)),
            _ => None,
        }
    }

    /// Elements of a proper list, or `None` for partial/improper lists.
    pub fn list_items(&self) -> Option<Vec<Term>> {
        let (items, tail) = self.list_prefix();
        tail.is_nil().then_some(items)
    }

    /// Elements up to the first non-cons cell, plus that tail.
    pub fn list_prefix(&self) -> (Vec<Term>, &Term) {
        let mut items = Vec::new();
        let mut cur = self;
        while let Some((h, t)) = cur.as_cons() {
            items.push(h.clone());
            cur = t;
        }
        (items, cur)
    }

    /// Structural identity (`==/2`).
    pub fn structurally_eq(&self, other: &Term) -> bool {
        compare_terms(self, other) == std::cmp::Ordering::Equal
    }

    /// All variables in depth-first, left-to-right order, without repeats.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) => {
                    if seen.insert(*v) {
                        out.push(*v);
                    }
                }
                Term::Compound(c) if !c.is_ground() => stack.extend(c.args().iter().rev()),
                _ => {}
            }
        }
        out
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.structurally_eq(other)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::tooling::write::canonical(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::tooling::write::plain(self))
    }
}

impl From<Atom> for Term {
    fn from(a: Atom) -> Term {
        Term::atom(a)
    }
}

impl From<Number> for Term {
    fn from(n: Number) -> Term {
        Term::Num(n)
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Term {
        Term::Var(v)
    }
}

impl From<i64> for Term {
    fn from(n: i64) -> Term {
        Term::int(n)
    }
}
