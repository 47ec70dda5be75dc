//! Sorting and list-length natives; bagof/setof live in the prelude.

use super::{proper_list, reg};
use crate::engine::{Branch, Call, Module, NativeResult, Outcome};
use crate::term::{compare_terms, variant, Term};
use std::cmp::Ordering;

pub fn install(m: &mut Module) {
    reg(m, "msort", 2, |c| {
        let mut items = c.list_arg(0)?;
        check_result_list(c, 1)?;
        items.sort_by(compare_terms);
        Ok(c.unify(&Term::list(items), c.arg(1)))
    });
    reg(m, "sort", 2, |c| {
        let mut items = c.list_arg(0)?;
        check_result_list(c, 1)?;
        items.sort_by(compare_terms);
        items.dedup_by(|a, b| compare_terms(a, b) == Ordering::Equal);
        Ok(c.unify(&Term::list(items), c.arg(1)))
    });
    reg(m, "sort", 4, sort4);
    reg(m, "keysort", 2, keysort);
    reg(m, "length", 2, |c| {
        let (l, n) = (c.arg(0).clone(), c.arg(1).clone());
        length(c, &l, 0, &n)
    });
    reg(m, "$length", 3, |c| {
        let k = c.int_arg(1)?;
        let (l, n) = (c.arg(0).clone(), c.arg(2).clone());
        length(c, &l, k, &n)
    });
    reg(m, "$variant_groups", 2, variant_groups);
    reg(m, "$bagof_split", 4, bagof_split);
}

/// Splits `V^...^Goal` into the goal and a `'$v'(Free...)` witness of the
/// variables that are neither in the template nor existentially bound.
fn bagof_split(c: &mut Call<'_>) -> NativeResult {
    let template = c.arg(0);
    let mut goal = c.arg(1).clone();
    let mut bound = template.variables();
    while let Some(a) = goal.args_if("^", 2) {
        bound.extend(a[0].variables());
        goal = a[1].clone();
    }
    if goal.is_var() {
        return Err(c.inst());
    }
    if !goal.is_callable() {
        return Err(c.type_err("callable", &goal));
    }
    let free: Vec<Term> = goal.variables().into_iter().filter(|v| !bound.contains(v)).map(Term::Var).collect();
    let witness = if free.is_empty() { Term::atom("$v") } else { Term::compound("$v", free) };
    let out = Term::pair("-", witness, goal);
    Ok(c.unify(&out, &Term::pair("-", c.arg(2).clone(), c.arg(3).clone())))
}

fn check_result_list(c: &Call<'_>, i: usize) -> Result<(), Term> {
    let t = c.arg(i);
    let (_, tail) = t.list_prefix();
    if tail.is_var() || tail.is_nil() {
        Ok(())
    } else {
        Err(c.type_err("list", t))
    }
}

fn keysort(c: &mut Call<'_>) -> NativeResult {
    let items = c.list_arg(0)?;
    check_result_list(c, 1)?;
    let mut pairs = Vec::with_capacity(items.len());
    for it in items {
        match it.args_if("-", 2) {
            Some(a) => pairs.push((a[0].clone(), it.clone())),
            None if it.is_var() => return Err(c.inst()),
            None => return Err(c.type_err("pair", &it)),
        }
    }
    pairs.sort_by(|a, b| compare_terms(&a.0, &b.0));
    Ok(c.unify(&Term::list(pairs.into_iter().map(|p| p.1).collect::<Vec<_>>()), c.arg(1)))
}

fn sort4(c: &mut Call<'_>) -> NativeResult {
    let key = c.int_arg(0)?;
    if key < 0 {
        return Err(c.domain_err("not_less_than_zero", c.arg(0)));
    }
    let order = c.atom_arg(1)?;
    let (desc, dedup) = match order.as_str() {
        "@<" => (false, true),
        "@=<" => (false, false),
        "@>" => (true, true),
        "@>=" => (true, false),
        _ => return Err(c.domain_err("order", c.arg(1))),
    };
    let items = c.list_arg(2)?;
    check_result_list(c, 3)?;
    let mut keyed = Vec::with_capacity(items.len());
    for it in items {
        let k = if key == 0 {
            it.clone()
        } else {
            match it.as_compound().and_then(|k2| k2.args().get(key as usize - 1)) {
                Some(a) => a.clone(),
                None => return Err(c.type_err("compound", &it)),
            }
        };
        keyed.push((k, it));
    }
    keyed.sort_by(|a, b| {
        let o = compare_terms(&a.0, &b.0);
        if desc {
            o.reverse()
        } else {
            o
        }
    });
    if dedup {
        keyed.dedup_by(|a, b| compare_terms(&a.0, &b.0) == Ordering::Equal);
    }
    Ok(c.unify(&Term::list(keyed.into_iter().map(|p| p.1).collect::<Vec<_>>()), c.arg(3)))
}

fn length(c: &mut Call<'_>, l: &Term, offset: i64, n: &Term) -> NativeResult {
    let want = match n {
        Term::Var(_) => None,
        Term::Num(x) if x.is_integer() => {
            let v = n.as_int().unwrap_or(i64::MAX);
            if v < 0 {
                return Err(c.domain_err("not_less_than_zero", n));
            }
            Some(v)
        }
        _ => return Err(c.type_err("integer", n)),
    };
    let (items, tail) = l.list_prefix();
    let len = offset + items.len() as i64;
    if tail.is_nil() {
        return Ok(c.unify(n, &Term::int(len)));
    }
    if !tail.is_var() {
        return Err(c.type_err("list", l));
    }
    let tail = tail.clone();
    match want {
        Some(v) if v < len => Ok(Outcome::Fail),
        Some(v) => {
            let fresh: Vec<Term> = (0..v - len).map(|_| c.fresh()).collect();
            Ok(c.unify(&tail, &Term::list(fresh)))
        }
        None => {
            if n.as_var() == tail.as_var() {
                return Err(crate::engine::err::resource_error("memory", c.pi()));
            }
            let done = c.unifier(&Term::pair("-", tail.clone(), n.clone()), &Term::pair("-", Term::nil(), Term::int(len)));
            let mut branches: Vec<Branch> = done.into_iter().map(Branch::unify).collect();
            let rest = c.fresh();
            let cell = Term::cons(c.fresh(), rest.clone());
            if let Some(mgu) = c.unifier(&tail, &cell) {
                let next = Term::compound("$length", vec![rest, Term::int(len + 1), n.clone()]);
                branches.push(Branch { mgu, frames: vec![c.frame(next)] });
            }
            Ok(Outcome::Branches(branches))
        }
    }
}

/// Groups `Witness-Template` pairs, already key-sorted, into
/// `Witness-[Templates]` runs of variant witnesses.
fn variant_groups(c: &mut Call<'_>) -> NativeResult {
    let items = proper_list(c.arg(0), c)?;
    let mut groups: Vec<(Term, Vec<Term>)> = Vec::new();
    for it in items {
        let Some(a) = it.args_if("-", 2) else { return Err(c.type_err("pair", &it)) };
        match groups.iter_mut().find(|(w, _)| variant(w, &a[0])) {
            Some((_, ts)) => ts.push(a[1].clone()),
            None => groups.push((a[0].clone(), vec![a[1].clone()])),
        }
    }
    let out: Vec<Term> = groups.into_iter().map(|(w, ts)| Term::pair("-", w, Term::list(ts))).collect();
    Ok(c.unify(&Term::list(out), c.arg(1)))
}
