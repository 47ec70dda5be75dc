//! Clause database: assert, retract, clause inspection and declarations.

use super::{reg, strip_module};
use crate::atom;
use crate::engine::kb::Clause;
use crate::engine::{err, Branch, Call, Module, NativeResult, Outcome, Pred};
use crate::term::{Atom, HostObject, HostRef, PredicateIndicator, Term};
use std::any::Any;
use std::rc::Rc;

/// A stored clause handed to Prolog code so it can be erased later.
struct ClauseRef {
    clause: Rc<Clause>,
    module: Atom,
}

impl HostObject for ClauseRef {
    fn identity(&self) -> (&'static str, u64) {
        ("clause", Rc::as_ptr(&self.clause) as usize as u64)
    }

    fn kind(&self) -> String {
        "clause".into()
    }

    fn property(&self, _name: &str) -> Option<Term> {
        None
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub fn install(m: &mut Module) {
    reg(m, "asserta", 1, |c| assert(c, true));
    reg(m, "assertz", 1, |c| assert(c, false));
    reg(m, "assert", 1, |c| assert(c, false));
    reg(m, "retract", 1, retract);
    reg(m, "retractall", 1, retractall);
    reg(m, "$erase", 1, erase);
    reg(m, "clause", 2, clause);
    reg(m, "abolish", 1, abolish);
    reg(m, "dynamic", 1, |c| declare(c, true));
    reg(m, "discontiguous", 1, |c| declare(c, false));
}

fn split_clause(t: &Term) -> (Term, Term) {
    match t.args_if(":-", 2) {
        Some(a) => (a[0].clone(), a[1].clone()),
        None => (t.clone(), Term::atom("true")),
    }
}

fn relabel(ball: Term, ctx: Term) -> Term {
    match ball.args_if("error", 2) {
        Some(a) => err::error(a[0].clone(), ctx),
        None => ball,
    }
}

fn assert(c: &mut Call<'_>, front: bool) -> NativeResult {
    let (t, module) = strip_module(c.arg(0), c.target_module());
    if t.is_var() {
        return Err(c.inst());
    }
    let (head, body) = split_clause(&t);
    let (head, module) = strip_module(&head, module);
    let clause = Clause::new(&head, &body).map_err(|b| relabel(b, c.pi()))?;
    let pi = clause.indicator();
    let session = c.session().clone();
    let mut kb = session.kb_mut();
    let list = kb.clauses_mut(module, pi).map_err(|b| relabel(b, c.pi()))?;
    if front {
        list.push_front(clause);
    } else {
        list.push(clause);
    }
    Ok(Outcome::True)
}

/// Clause list visible under `head` from `module`, or an error for builtins.
fn visible_clauses(c: &Call<'_>, head: &Term, module: Atom, action: &str) -> Result<Option<(Atom, Vec<Rc<Clause>>)>, Term> {
    let pi = head.indicator().expect("callable head");
    match c.session().resolve(module, &pi) {
        None => Ok(None),
        Some((def, Pred::Clauses(list))) if def != atom!("system") => Ok(Some((def, list.candidates(None).as_slice().to_vec()))),
        Some(_) => {
            let kind = if action == "access" { "private_procedure" } else { "static_procedure" };
            Err(err::permission(action, kind, pi.to_term(), c.pi()))
        }
    }
}

fn retract(c: &mut Call<'_>) -> NativeResult {
    let (t, module) = strip_module(c.arg(0), c.target_module());
    let (head, body) = split_clause(&t);
    let (head, module) = strip_module(&head, module);
    if head.is_var() {
        return Err(c.inst());
    }
    if !head.is_callable() {
        return Err(c.type_err("callable", &head));
    }
    let Some((def, clauses)) = visible_clauses(c, &head, module, "modify")? else {
        return Ok(Outcome::Fail);
    };
    let pattern = Term::pair(":-", head, body);
    let vars = c.session().vars().clone();
    let mut branches = Vec::new();
    for cl in clauses {
        let (h, b) = cl.rename(&vars);
        if let Some(mgu) = c.unifier(&pattern, &Term::pair(":-", h, b)) {
            let r = Term::Host(HostRef::new(ClauseRef { clause: cl.clone(), module: def }));
            let erase = c.frame(Term::compound("$erase", vec![r]));
            branches.push(Branch { mgu, frames: vec![erase] });
        }
    }
    Ok(Outcome::Branches(branches))
}

fn erase(c: &mut Call<'_>) -> NativeResult {
    let Some(r) = c.arg(0).as_host().and_then(|h| h.downcast::<ClauseRef>()) else {
        return Err(c.type_err("clause_reference", c.arg(0)));
    };
    let pi = r.clause.indicator();
    let session = c.session().clone();
    let mut kb = session.kb_mut();
    let removed = match kb.module_mut(r.module).preds.get_mut(&pi) {
        Some(Pred::Clauses(list)) => list.remove(&r.clause),
        _ => false,
    };
    Ok(Outcome::from_bool(removed))
}

fn retractall(c: &mut Call<'_>) -> NativeResult {
    let (head, module) = strip_module(c.arg(0), c.target_module());
    if head.is_var() {
        return Err(c.inst());
    }
    if !head.is_callable() {
        return Err(c.type_err("callable", &head));
    }
    let pi = head.indicator().expect("callable");
    let session = c.session().clone();
    let def = match session.resolve(module, &pi) {
        Some((def, Pred::Clauses(_))) => def,
        Some(_) => return Err(err::permission("modify", "static_procedure", pi.to_term(), c.pi())),
        None => {
            session.kb_mut().declare_dynamic(module, pi).map_err(|b| relabel(b, c.pi()))?;
            return Ok(Outcome::True);
        }
    };
    let vars = session.vars().clone();
    let mut kb = session.kb_mut();
    if let Some(Pred::Clauses(list)) = kb.module_mut(def).preds.get_mut(&pi) {
        let doomed: Vec<Rc<Clause>> = list
            .candidates(None)
            .as_slice()
            .iter()
            .filter(|cl| crate::term::unify(&head, &cl.rename(&vars).0, false).is_some())
            .cloned()
            .collect();
        for cl in doomed {
            list.remove(&cl);
        }
    }
    Ok(Outcome::True)
}

fn clause(c: &mut Call<'_>) -> NativeResult {
    let (head, module) = strip_module(c.arg(0), c.target_module());
    let body = c.arg(1);
    if head.is_var() {
        return Err(c.inst());
    }
    if !head.is_callable() {
        return Err(c.type_err("callable", &head));
    }
    if !body.is_var() && !body.is_callable() {
        return Err(c.type_err("callable", body));
    }
    let Some((_, clauses)) = visible_clauses(c, &head, module, "access")? else {
        return Ok(Outcome::Fail);
    };
    let pattern = Term::pair(":-", head, body.clone());
    let vars = c.session().vars().clone();
    let mut branches = Vec::new();
    for cl in clauses {
        let (h, b) = cl.rename(&vars);
        if let Some(mgu) = c.unifier(&pattern, &Term::pair(":-", h, b)) {
            branches.push(Branch::unify(mgu));
        }
    }
    Ok(Outcome::Branches(branches))
}

fn indicator_arg(c: &Call<'_>, t: &Term) -> Result<PredicateIndicator, Term> {
    if t.is_var() {
        return Err(c.inst());
    }
    let Some([name, arity]) = t.args_if("/", 2).map(|a| [a[0].clone(), a[1].clone()]) else {
        return Err(c.type_err("predicate_indicator", t));
    };
    if name.is_var() || arity.is_var() {
        return Err(c.inst());
    }
    let Some(name) = name.as_atom() else { return Err(c.type_err("atom", &name)) };
    let Some(n) = arity.as_int() else { return Err(c.type_err("integer", &arity)) };
    if n < 0 {
        return Err(c.domain_err("not_less_than_zero", &arity));
    }
    Ok(PredicateIndicator { name, arity: n as usize })
}

fn abolish(c: &mut Call<'_>) -> NativeResult {
    let (t, module) = strip_module(c.arg(0), c.target_module());
    let pi = indicator_arg(c, &t)?;
    let session = c.session().clone();
    let mut kb = session.kb_mut();
    let builtin = kb.module(atom!("system")).is_some_and(|m| m.preds.contains_key(&pi));
    if builtin {
        return Err(err::permission("modify", "static_procedure", pi.to_term(), c.pi()));
    }
    let m = kb.module_mut(module);
    match m.preds.get(&pi) {
        Some(Pred::Clauses(list)) if list.dynamic => {
            m.preds.remove(&pi);
            Ok(Outcome::True)
        }
        Some(_) => Err(err::permission("modify", "static_procedure", pi.to_term(), c.pi())),
        None => Ok(Outcome::True),
    }
}

/// Indicators in `a/1, b/2` or `[a/1, b/2]` form.
fn indicators(c: &Call<'_>, t: &Term, out: &mut Vec<(PredicateIndicator, Atom)>, module: Atom) -> Result<(), Term> {
    let (t, module) = strip_module(t, module);
    if let Some(a) = t.args_if(",", 2) {
        indicators(c, &a[0], out, module)?;
        return indicators(c, &a[1], out, module);
    }
    if t.as_cons().is_some() || t.is_nil() {
        for item in super::proper_list(&t, c)? {
            indicators(c, &item, out, module)?;
        }
        return Ok(());
    }
    out.push((indicator_arg(c, &t)?, module));
    Ok(())
}

fn declare(c: &mut Call<'_>, dynamic: bool) -> NativeResult {
    let mut pis = Vec::new();
    indicators(c, c.arg(0), &mut pis, c.target_module())?;
    if dynamic {
        let session = c.session().clone();
        let mut kb = session.kb_mut();
        for (pi, module) in pis {
            kb.declare_dynamic(module, pi).map_err(|b| relabel(b, c.pi()))?;
        }
    }
    Ok(Outcome::True)
}
