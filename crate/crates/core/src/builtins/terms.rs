//! Unification, type tests, term construction and comparison.

use super::{proper_list, reg};
use crate::engine::thread::copy_fresh;
use crate::engine::{Branch, Call, Module, Outcome};
use crate::term::{compare_terms, unify, Term, Var};
use std::cmp::Ordering;

fn type_test(m: &mut Module, name: &str, test: fn(&Term) -> bool) {
    reg(m, name, 1, move |c| Ok(Outcome::from_bool(test(c.arg(0)))));
}

fn is_proper_list(t: &Term) -> bool {
    t.list_prefix().1.is_nil()
}

fn compare_op(m: &mut Module, name: &str, ok: fn(Ordering) -> bool) {
    reg(m, name, 2, move |c| Ok(Outcome::from_bool(ok(compare_terms(c.arg(0), c.arg(1))))));
}

pub fn install(m: &mut Module) {
    reg(m, "=", 2, |c| Ok(c.unify(c.arg(0), c.arg(1))));
    reg(m, "\\=", 2, |c| Ok(Outcome::from_bool(c.unifier(c.arg(0), c.arg(1)).is_none())));
    reg(m, "unify_with_occurs_check", 2, |c| Ok(Outcome::from_unifier(unify(c.arg(0), c.arg(1), true))));

    type_test(m, "var", Term::is_var);
    type_test(m, "nonvar", |t| !t.is_var());
    type_test(m, "atom", Term::is_atom);
    type_test(m, "number", Term::is_number);
    type_test(m, "integer", Term::is_integer);
    type_test(m, "float", |t| t.as_number().is_some_and(|n| n.is_float()));
    type_test(m, "compound", Term::is_compound);
    type_test(m, "atomic", Term::is_atomic);
    type_test(m, "callable", Term::is_callable);
    type_test(m, "is_list", is_proper_list);
    type_test(m, "ground", Term::is_ground);

    compare_op(m, "==", |o| o == Ordering::Equal);
    compare_op(m, "\\==", |o| o != Ordering::Equal);
    compare_op(m, "@<", |o| o == Ordering::Less);
    compare_op(m, "@>", |o| o == Ordering::Greater);
    compare_op(m, "@=<", |o| o != Ordering::Greater);
    compare_op(m, "@>=", |o| o != Ordering::Less);
    reg(m, "compare", 3, compare);

    reg(m, "functor", 3, functor);
    reg(m, "arg", 3, arg);
    reg(m, "=..", 2, univ);
    reg(m, "copy_term", 2, |c| {
        let copy = copy_fresh(c.arg(0), c.session().vars());
        Ok(c.unify(&copy, c.arg(1)))
    });
    reg(m, "term_variables", 2, |c| {
        let vars: Vec<Term> = c.arg(0).variables().into_iter().map(Term::Var).collect();
        Ok(c.unify(&Term::list(vars), c.arg(1)))
    });
    reg(m, "numbervars", 3, numbervars);
}

fn compare(c: &mut Call<'_>) -> crate::engine::NativeResult {
    let order = c.arg(0);
    if let Some(a) = order.as_atom() {
        if !matches!(a.as_str(), "<" | ">" | "=") {
            return Err(c.domain_err("order", order));
        }
    } else if !order.is_var() {
        return Err(c.type_err("atom", order));
    }
    let sym = match compare_terms(c.arg(1), c.arg(2)) {
        Ordering::Less => "<",
        Ordering::Equal => "=",
        Ordering::Greater => ">",
    };
    Ok(c.unify(order, &Term::atom(sym)))
}

fn functor(c: &mut Call<'_>) -> crate::engine::NativeResult {
    let t = c.arg(0);
    if !t.is_var() {
        let (name, arity) = match t {
            Term::Compound(k) => (Term::atom(k.name()), k.arity()),
            _ => (t.clone(), 0),
        };
        let both = Term::pair("-", name, Term::int(arity as i64));
        return Ok(c.unify(&both, &Term::pair("-", c.arg(1).clone(), c.arg(2).clone())));
    }
    let name = c.arg(1);
    let arity = c.arg(2);
    if name.is_var() || arity.is_var() {
        return Err(c.inst());
    }
    let n = c.int_arg(2)?;
    if n < 0 {
        return Err(c.domain_err("not_less_than_zero", arity));
    }
    if name.is_compound() {
        return Err(c.type_err("atomic", name));
    }
    if n == 0 {
        return Ok(c.unify(t, name));
    }
    let Some(a) = name.as_atom() else {
        return Err(c.type_err("atom", name));
    };
    let args: Vec<Term> = (0..n).map(|_| c.fresh()).collect();
    Ok(c.unify(t, &Term::compound(a, args)))
}

fn arg(c: &mut Call<'_>) -> crate::engine::NativeResult {
    let n = c.arg(0);
    let t = c.arg(1);
    if t.is_var() {
        return Err(c.inst());
    }
    let Some(k) = t.as_compound().filter(|k| k.arity() > 0) else {
        return Err(c.type_err("compound", t));
    };
    match n {
        Term::Var(_) => {
            let mut branches = Vec::new();
            for (i, a) in k.args().iter().enumerate() {
                let pair = Term::pair("-", n.clone(), c.arg(2).clone());
                if let Some(mgu) = c.unifier(&pair, &Term::pair("-", Term::int(i as i64 + 1), a.clone())) {
                    branches.push(Branch::unify(mgu));
                }
            }
            Ok(Outcome::Branches(branches))
        }
        Term::Num(x) if x.is_integer() => {
            let i = n.as_int().unwrap_or(0);
            if i < 0 {
                return Err(c.domain_err("not_less_than_zero", n));
            }
            match k.args().get((i as usize).wrapping_sub(1)) {
                Some(a) if i >= 1 => Ok(c.unify(a, c.arg(2))),
                _ => Ok(Outcome::Fail),
            }
        }
        _ => Err(c.type_err("integer", n)),
    }
}

fn univ(c: &mut Call<'_>) -> crate::engine::NativeResult {
    let t = c.arg(0);
    let l = c.arg(1);
    match t {
        Term::Var(_) => {
            let items = proper_list(l, c)?;
            let Some((head, rest)) = items.split_first() else {
                return Err(c.domain_err("non_empty_list", l));
            };
            if head.is_var() {
                return Err(c.inst());
            }
            if rest.is_empty() {
                if head.is_compound() {
                    return Err(c.type_err("atomic", head));
                }
                return Ok(c.unify(t, head));
            }
            match head.as_atom() {
                Some(a) => Ok(c.unify(t, &Term::compound(a, rest.to_vec()))),
                None if head.is_compound() => Err(c.type_err("atomic", head)),
                None => Err(c.type_err("atom", head)),
            }
        }
        Term::Compound(k) => {
            let mut items = vec![Term::atom(k.name())];
            items.extend(k.args().iter().cloned());
            Ok(c.unify(&Term::list(items), l))
        }
        _ => Ok(c.unify(&Term::list([t.clone()]), l)),
    }
}

fn numbervars(c: &mut Call<'_>) -> crate::engine::NativeResult {
    let start = c.int_arg(1)?;
    let vars: Vec<Var> = c.arg(0).variables();
    let mut mgu = crate::term::Substitution::new();
    let mut n = start;
    for v in vars {
        mgu.bind(v, Term::compound("$VAR", vec![Term::int(n)]));
        n += 1;
    }
    let end = c.unifier(&Term::int(n), c.arg(2));
    match end {
        Some(e) => {
            for (v, t) in e.iter() {
                mgu.bind(*v, t.clone());
            }
            Ok(Outcome::Unify(mgu))
        }
        None => Ok(Outcome::Fail),
    }
}
