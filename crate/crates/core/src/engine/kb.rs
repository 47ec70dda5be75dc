//! Clauses, predicates and modules.

use super::error::err;
use super::thread::Native;
use crate::atom;
use crate::term::{map_vars, Atom, Number, PredicateIndicator, Term, Var, VarGen};
use rustc_hash::FxHashMap;
use std::cell::RefCell;
use std::rc::Rc;

/// A stored clause. Variables are numbered `Fresh(0..nvars)` so renaming is
/// an offset into a block reserved from the session counter.
#[derive(Debug)]
pub struct Clause {
    pub head: Term,
    /// `true` for facts.
    pub body: Term,
    /// Body conjuncts, flattened; variables are wrapped in `call/1`.
    pub goals: Box<[Term]>,
    pub nvars: u64,
    /// Source names by variable number, for listings.
    pub names: Box<[Atom]>,
    key: Option<Key>,
}

impl Clause {
    /// Builds a clause from `head :- body`, checking both are callable.
    pub fn new(head: &Term, body: &Term) -> Result<Clause, Term> {
        let pi = || atom_pi("assertz", 1);
        if head.is_var() {
            return Err(err::instantiation(pi()));
        }
        if !head.is_callable() {
            return Err(err::type_error("callable", head.clone(), pi()));
        }
        check_body(body).map_err(|_| {
            let whole = Term::compound(":-", vec![head.clone(), body.clone()]);
            err::type_error("callable", whole, pi())
        })?;
        let mut numbering: Vec<Var> = Vec::new();
        let mut number = |v: Var| {
            let i = numbering.iter().position(|w| *w == v).unwrap_or_else(|| {
                numbering.push(v);
                numbering.len() - 1
            });
            Some(Term::Var(Var::Fresh(i as u64)))
        };
        let head = map_vars(head, &mut number).unwrap_or_else(|| head.clone());
        let body = map_vars(body, &mut number).unwrap_or_else(|| body.clone());
        let mut goals = Vec::new();
        flatten_body(&body, &mut goals);
        let names = numbering
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Var::Named(a) if !a.as_str().starts_with("_#") => *a,
                _ => Atom::new(&format!("_{i}")),
            })
            .collect();
        let key = head.args().first().and_then(Key::of);
        Ok(Clause { head, body, goals: goals.into(), nvars: numbering.len() as u64, names, key })
    }

    pub fn indicator(&self) -> PredicateIndicator {
        self.head.indicator().expect("clause head is callable")
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_atom_named("true")
    }

    /// The clause with every variable replaced by a globally fresh one.
    pub fn rename(&self, gen: &VarGen) -> (Term, Term) {
        let base = gen.reserve(self.nvars);
        (rename_at(&self.head, base), rename_at(&self.body, base))
    }

    /// The clause with its source variable names restored.
    pub fn source(&self) -> (Term, Term) {
        let names = &self.names;
        let f = &mut |v: Var| match v {
            Var::Fresh(i) => Some(Term::Var(Var::Named(names[i as usize]))),
            _ => None,
        };
        let h = map_vars(&self.head, f).unwrap_or_else(|| self.head.clone());
        let b = map_vars(&self.body, f).unwrap_or_else(|| self.body.clone());
        (h, b)
    }
}

/// Shifts template variable `Fresh(k)` to `Fresh(base + k)`.
pub fn rename_at(t: &Term, base: u64) -> Term {
    map_vars(t, &mut |v| match v {
        Var::Fresh(k) => Some(Term::Var(Var::Fresh(base + k))),
        _ => None,
    })
    .unwrap_or_else(|| t.clone())
}

fn atom_pi(name: &str, arity: usize) -> Term {
    PredicateIndicator::new(name, arity).to_term()
}

fn check_body(t: &Term) -> Result<(), ()> {
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match t {
            Term::Var(_) => {}
            Term::Num(_) | Term::Host(_) => return Err(()),
            Term::Compound(c) => {
                let n = c.name().as_str();
                if c.arity() == 2 && matches!(n, "," | ";" | "->" | "*->") {
                    stack.extend(c.args());
                } else if c.arity() == 1 && n == "\\+" {
                    stack.push(&c.args()[0]);
                }
            }
        }
    }
    Ok(())
}

pub fn flatten_body(body: &Term, out: &mut Vec<Term>) {
    let mut cur = body;
    loop {
        match cur.args_if(",", 2) {
            Some(args) => {
                flatten_body(&args[0], out);
                cur = &args[1];
            }
            None => break,
        }
    }
    match cur {
        Term::Var(_) => out.push(Term::compound("call", vec![cur.clone()])),
        t if t.is_atom_named("true") => {}
        t => out.push(t.clone()),
    }
}

/// Principal functor of a first argument, for indexing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Functor(Atom, usize),
    Int(i64),
    Float(u64),
    Other,
}

impl Key {
    fn of(t: &Term) -> Option<Key> {
        match t {
            Term::Var(_) => None,
            Term::Compound(c) => Some(Key::Functor(c.name(), c.arity())),
            Term::Num(Number::Int(i)) => Some(Key::Int(*i)),
            Term::Num(Number::Float(f)) => Some(Key::Float(f.to_bits())),
            _ => Some(Key::Other),
        }
    }
}

const INDEX_THRESHOLD: usize = 8;

struct FirstArgIndex {
    by_key: FxHashMap<Key, Rc<[Rc<Clause>]>>,
    /// Clauses whose first argument is a variable, for keys with no bucket.
    unkeyed: Rc<[Rc<Clause>]>,
}

/// A predicate's clause list with a lazily built first-argument index.
#[derive(Clone, Default)]
pub struct ClauseList {
    pub clauses: Rc<Vec<Rc<Clause>>>,
    pub dynamic: bool,
    index: Rc<RefCell<Option<Rc<FirstArgIndex>>>>,
}

pub enum Candidates {
    All(Rc<Vec<Rc<Clause>>>),
    Some(Rc<[Rc<Clause>]>),
}

impl Candidates {
    pub fn as_slice(&self) -> &[Rc<Clause>] {
        match self {
            Candidates::All(v) => v,
            Candidates::Some(v) => v,
        }
    }
}

impl ClauseList {
    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    fn invalidate(&mut self) {
        self.index = Rc::new(RefCell::new(None));
    }

    pub fn push(&mut self, c: Clause) {
        Rc::make_mut(&mut self.clauses).push(Rc::new(c));
        self.invalidate();
    }

    pub fn push_front(&mut self, c: Clause) {
        Rc::make_mut(&mut self.clauses).insert(0, Rc::new(c));
        self.invalidate();
    }

    pub fn remove(&mut self, c: &Rc<Clause>) -> bool {
        let v = Rc::make_mut(&mut self.clauses);
        match v.iter().position(|x| Rc::ptr_eq(x, c)) {
            Some(i) => {
                v.remove(i);
                self.invalidate();
                true
            }
            None => false,
        }
    }

    /// Clauses whose head could match a goal with this first argument.
    pub fn candidates(&self, first: Option<&Term>) -> Candidates {
        let all = || Candidates::All(self.clauses.clone());
        if self.clauses.len() <= INDEX_THRESHOLD {
            return all();
        }
        let Some(key) = first.and_then(Key::of) else { return all() };
        if key == Key::Other {
            return all();
        }
        let cached = self.index.borrow().clone();
        let index = cached.unwrap_or_else(|| {
            let built = Rc::new(self.build_index());
            *self.index.borrow_mut() = Some(built.clone());
            built
        });
        match index.by_key.get(&key) {
            Some(bucket) => Candidates::Some(bucket.clone()),
            None => Candidates::Some(index.unkeyed.clone()),
        }
    }

    fn build_index(&self) -> FirstArgIndex {
        let mut keys: Vec<Key> = Vec::new();
        for c in self.clauses.iter() {
            if let Some(k) = &c.key {
                if *k != Key::Other && !keys.contains(k) {
                    keys.push(k.clone());
                }
            }
        }
        let fits = |c: &Clause, k: &Key| match &c.key {
            None | Some(Key::Other) => true,
            Some(ck) => ck == k,
        };
        let by_key = keys
            .into_iter()
            .map(|k| {
                let bucket: Rc<[Rc<Clause>]> = self.clauses.iter().filter(|c| fits(c, &k)).cloned().collect();
                (k, bucket)
            })
            .collect();
        let unkeyed = self.clauses.iter().filter(|c| matches!(c.key, None | Some(Key::Other))).cloned().collect();
        FirstArgIndex { by_key, unkeyed }
    }
}

/// Control constructs interpreted directly by the resolution step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    True,
    Fail,
    Conj,
    Disj,
    IfThen,
    SoftIf,
    Not,
    Cut,
    Call(usize),
    Catch,
    Throw,
    Findall,
    Findall4,
    Qualified,
}

#[derive(Clone)]
pub enum Pred {
    Control(Control),
    Native(Native),
    Clauses(ClauseList),
}

impl Pred {
    pub fn is_builtin(&self) -> bool {
        !matches!(self, Pred::Clauses(_))
    }
}

pub struct Module {
    pub name: Atom,
    pub preds: FxHashMap<PredicateIndicator, Pred>,
    /// Visible predicates; an empty list exports nothing.
    pub exports: Vec<PredicateIndicator>,
    pub imports: Vec<Atom>,
}

impl Module {
    pub fn new(name: Atom) -> Module {
        Module { name, preds: FxHashMap::default(), exports: Vec::new(), imports: Vec::new() }
    }

    pub fn native(&mut self, name: &str, arity: usize, f: Native) {
        self.preds.insert(PredicateIndicator::new(name, arity), Pred::Native(f));
    }

    pub fn exports(&self, pi: &PredicateIndicator) -> bool {
        self.exports.contains(pi)
    }

    /// Exports every predicate currently defined.
    pub fn export_all(&mut self) {
        let mut pis: Vec<_> = self.preds.keys().copied().collect();
        pis.sort_by(|a, b| a.name.cmp(&b.name).then(a.arity.cmp(&b.arity)));
        self.exports = pis;
    }

    pub fn add_clause(&mut self, c: Clause, front: bool) -> Result<(), Term> {
        let pi = c.indicator();
        let list = match self.preds.entry(pi).or_insert_with(|| Pred::Clauses(ClauseList::default())) {
            Pred::Clauses(list) => list,
            _ => return Err(err::permission("modify", "static_procedure", pi.to_term(), atom_pi("assertz", 1))),
        };
        if front {
            list.push_front(c);
        } else {
            list.push(c);
        }
        Ok(())
    }
}

/// All modules of a session.
pub struct KnowledgeBase {
    pub modules: FxHashMap<Atom, Module>,
}

impl Default for KnowledgeBase {
    fn default() -> Self {
        let mut modules = FxHashMap::default();
        for name in ["system", "user"] {
            modules.insert(Atom::new(name), Module::new(Atom::new(name)));
        }
        KnowledgeBase { modules }
    }
}

impl KnowledgeBase {
    pub fn module(&self, name: Atom) -> Option<&Module> {
        self.modules.get(&name)
    }

    pub fn module_mut(&mut self, name: Atom) -> &mut Module {
        self.modules.entry(name).or_insert_with(|| Module::new(name))
    }

    pub fn register(&mut self, m: Module) {
        self.modules.insert(m.name, m);
    }

    /// Finds the definition visible from `module`: its own predicates, then
    /// visible predicates of its imports, then `system`, then `user`.
    pub fn resolve(&self, module: Atom, pi: &PredicateIndicator) -> Option<(Atom, Pred)> {
        if let Some(found) = self.own_or_imported(module, pi) {
            return Some(found);
        }
        let system = atom!("system");
        if module != system {
            if let Some(p) = self.modules.get(&system).and_then(|m| m.preds.get(pi)) {
                return Some((system, p.clone()));
            }
        }
        let user = atom!("user");
        if module != user {
            return self.own_or_imported(user, pi);
        }
        None
    }

    fn own_or_imported(&self, module: Atom, pi: &PredicateIndicator) -> Option<(Atom, Pred)> {
        let here = self.modules.get(&module)?;
        if let Some(p) = here.preds.get(pi) {
            return Some((module, p.clone()));
        }
        for imp in &here.imports {
            let Some(im) = self.modules.get(imp) else { continue };
            if im.exports(pi) {
                if let Some(p) = im.preds.get(pi) {
                    return Some((*imp, p.clone()));
                }
            }
        }
        None
    }

    /// The module whose clause list `assert` and `retract` act on.
    pub fn clauses_mut(&mut self, module: Atom, pi: PredicateIndicator) -> Result<&mut ClauseList, Term> {
        let builtin = self.modules.get(&atom!("system")).is_some_and(|m| m.preds.contains_key(&pi));
        if builtin && module != atom!("system") {
            return Err(err::permission("modify", "static_procedure", pi.to_term(), atom_pi("assertz", 1)));
        }
        let m = self.module_mut(module);
        match m.preds.entry(pi).or_insert_with(|| Pred::Clauses(ClauseList { dynamic: true, ..Default::default() })) {
            Pred::Clauses(list) => Ok(list),
            _ => Err(err::permission("modify", "static_procedure", pi.to_term(), atom_pi("assertz", 1))),
        }
    }

    pub fn declare_dynamic(&mut self, module: Atom, pi: PredicateIndicator) -> Result<(), Term> {
        self.clauses_mut(module, pi)?.dynamic = true;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::{parse_term, OperatorTable};

    fn clause(src: &str) -> Clause {
        let t = parse_term(src, &OperatorTable::iso()).unwrap();
        match t.args_if(":-", 2) {
            Some(a) => Clause::new(&a[0], &a[1]).unwrap(),
            None => Clause::new(&t, &Term::atom("true")).unwrap(),
        }
    }

    #[test]
    fn rename_preserves_sharing_and_is_fresh() {
        let c = clause("append([],X,X)");
        let gen = VarGen::new();
        let (h1, _) = c.rename(&gen);
        let (h2, _) = c.rename(&gen);
        assert_eq!(h1.args()[1], h1.args()[2]);
        assert_ne!(h1.args()[1], h2.args()[1]);
        let ground = clause("p(a)");
        assert_eq!(ground.rename(&gen).0, Term::compound("p", vec![Term::atom("a")]));
    }

    #[test]
    fn body_is_flattened() {
        let c = clause("p(X) :- (a, b), X, true");
        assert_eq!(c.goals.len(), 3);
        assert_eq!(c.goals[2], Term::compound("call", vec![Term::Var(Var::Fresh(0))]));
    }

    #[test]
    fn source_restores_names() {
        let c = clause("app([H|T],X,[H|S]) :- app(T,X,S)");
        let (h, _) = c.source();
        assert_eq!(h.to_string(), "app([H|T],X,[H|S])");
    }

    #[test]
    fn numbers_in_body_are_rejected() {
        let h = Term::atom("p");
        assert!(Clause::new(&h, &Term::compound(",", vec![Term::atom("a"), Term::int(1)])).is_err());
    }

    #[test]
    fn index_keeps_source_order() {
        let mut list = ClauseList::default();
        for src in ["f(a,1)", "f(X,2)", "f(b,3)", "f(a,4)", "f(c,5)", "f(d,6)", "f(e,7)", "f(g,8)", "f(h,9)", "f(a,10)"] {
            list.push(clause(src));
        }
        let a = Term::atom("a");
        let picked: Vec<i64> =
            list.candidates(Some(&a)).as_slice().iter().map(|c| c.head.args()[1].as_int().unwrap()).collect();
        assert_eq!(picked, vec![1, 2, 4, 10]);
        let z = Term::atom("z");
        assert_eq!(list.candidates(Some(&z)).as_slice().len(), 1);
        assert_eq!(list.candidates(Some(&Term::var("V"))).as_slice().len(), 10);
    }
}
