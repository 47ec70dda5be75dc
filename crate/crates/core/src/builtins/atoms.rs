//! Atom, character and number text predicates.

use super::reg;
use crate::engine::{Branch, Call, Module, NativeResult, Outcome};
use crate::reader::{parse_term_with, DoubleQuotes};
use crate::term::{Number, Term};
use crate::tooling::write::{render_term, WriteOptions};

pub fn install(m: &mut Module) {
    reg(m, "atom_length", 2, atom_length);
    reg(m, "atom_codes", 2, |c| text_list(c, false, Kind::Atom));
    reg(m, "atom_chars", 2, |c| text_list(c, true, Kind::Atom));
    reg(m, "number_codes", 2, |c| text_list(c, false, Kind::Number));
    reg(m, "number_chars", 2, |c| text_list(c, true, Kind::Number));
    reg(m, "char_code", 2, char_code);
    reg(m, "atom_number", 2, atom_number);
    reg(m, "atom_concat", 3, atom_concat);
    reg(m, "sub_atom", 5, sub_atom);
    reg(m, "upcase_atom", 2, |c| case(c, true));
    reg(m, "downcase_atom", 2, |c| case(c, false));
    reg(m, "term_to_atom", 2, term_to_atom);
    reg(m, "atomic_list_concat", 2, |c| atomic_list_concat(c, ""));
    reg(m, "atomic_list_concat", 3, |c| {
        let sep = text_of(c, c.arg(1))?;
        atomic_list_concat(c, &sep)
    });
}

/// Text of an atomic term.
pub fn atomic_text(t: &Term) -> Option<String> {
    match t {
        Term::Num(n) => Some(n.to_string()),
        Term::Compound(k) if k.arity() == 0 => Some(k.name().as_str().to_string()),
        _ => None,
    }
}

fn text_of(c: &Call<'_>, t: &Term) -> Result<String, Term> {
    if t.is_var() {
        return Err(c.inst());
    }
    atomic_text(t).ok_or_else(|| c.type_err("atomic", t))
}

fn atom_length(c: &mut Call<'_>) -> NativeResult {
    let text = text_of(c, c.arg(0))?;
    let len = c.arg(1);
    match len {
        Term::Var(_) => {}
        Term::Num(n) if n.is_integer() => {
            if len.as_int().is_some_and(|n| n < 0) {
                return Err(c.domain_err("not_less_than_zero", len));
            }
        }
        _ => return Err(c.type_err("integer", len)),
    }
    Ok(c.unify(len, &Term::int(text.chars().count() as i64)))
}

/// Parses number text the way `number_codes/2` does.
pub fn parse_number(text: &str) -> Option<Number> {
    let trimmed = text.trim_start();
    let r = parse_term_with(&format!("{trimmed} ."), &crate::reader::OperatorTable::iso(), DoubleQuotes::Codes).ok()?;
    match &r.term {
        Term::Num(n) => Some(n.clone()),
        t => {
            let a = t.args_if("-", 1)?;
            let Term::Num(n) = &a[0] else { return None };
            if !trimmed.starts_with('-') {
                return None;
            }
            Some(match n {
                Number::Int(i) => Number::Int(-i),
                Number::Big(b) => Number::from_big(-(**b).clone()),
                Number::Float(f) => Number::Float(-f),
            })
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Atom,
    Number,
}

fn list_text(c: &Call<'_>, l: &Term, chars: bool) -> Result<Option<String>, Term> {
    let (items, tail) = l.list_prefix();
    if tail.is_var() {
        return Ok(None);
    }
    if !tail.is_nil() {
        return Err(c.type_err("list", l));
    }
    let mut s = String::new();
    for it in &items {
        if it.is_var() {
            return Ok(None);
        }
        let ch = if chars {
            it.as_atom().map(|a| a.as_str()).filter(|a| a.chars().count() == 1).and_then(|a| a.chars().next())
        } else {
            it.as_int().and_then(|n| u32::try_from(n).ok()).and_then(char::from_u32)
        };
        match ch {
            Some(ch) => s.push(ch),
            None if chars => return Err(c.type_err("character", it)),
            None => return Err(crate::engine::err::representation("character_code", c.pi())),
        }
    }
    Ok(Some(s))
}

fn to_list(text: &str, chars: bool) -> Term {
    if chars {
        Term::list(text.chars().map(|ch| Term::atom(ch.to_string().as_str())).collect::<Vec<_>>())
    } else {
        Term::list(text.chars().map(|ch| Term::int(ch as i64)).collect::<Vec<_>>())
    }
}

fn text_list(c: &mut Call<'_>, chars: bool, kind: Kind) -> NativeResult {
    let (a, l) = (c.arg(0), c.arg(1));
    if kind == Kind::Number {
        if let Some(text) = list_text(c, l, chars)? {
            let n = parse_number(&text).ok_or_else(|| {
                crate::engine::err::error(Term::compound("syntax_error", vec![Term::atom("illegal_number")]), c.pi())
            })?;
            return Ok(c.unify(a, &Term::Num(n)));
        }
        return match a {
            Term::Var(_) => Err(c.inst()),
            Term::Num(n) => Ok(c.unify(l, &to_list(&n.to_string(), chars))),
            _ => Err(c.type_err("number", a)),
        };
    }
    match a {
        Term::Var(_) => match list_text(c, l, chars)? {
            Some(text) => Ok(c.unify(a, &Term::atom(text.as_str()))),
            None => Err(c.inst()),
        },
        _ => {
            let text = atomic_text(a).ok_or_else(|| c.type_err("atom", a))?;
            Ok(c.unify(l, &to_list(&text, chars)))
        }
    }
}

fn char_code(c: &mut Call<'_>) -> NativeResult {
    let (ch, code) = (c.arg(0), c.arg(1));
    match ch {
        Term::Var(_) => match code {
            Term::Var(_) => Err(c.inst()),
            _ => {
                let n = c.int_arg(1)?;
                let Some(x) = u32::try_from(n).ok().and_then(char::from_u32) else {
                    return Err(crate::engine::err::representation("character_code", c.pi()));
                };
                Ok(c.unify(ch, &Term::atom(x.to_string().as_str())))
            }
        },
        _ => {
            let Some(x) = ch.as_atom().map(|a| a.as_str()).filter(|s| s.chars().count() == 1).and_then(|s| s.chars().next()) else {
                return Err(c.type_err("character", ch));
            };
            Ok(c.unify(code, &Term::int(x as i64)))
        }
    }
}

fn atom_number(c: &mut Call<'_>) -> NativeResult {
    let a = c.arg(0);
    match a {
        Term::Var(_) => match c.arg(1) {
            Term::Num(n) => Ok(c.unify(a, &Term::atom(n.to_string().as_str()))),
            Term::Var(_) => Err(c.inst()),
            t => Err(c.type_err("number", t)),
        },
        _ => {
            let Some(text) = a.as_atom() else { return Err(c.type_err("atom", a)) };
            match parse_number(text.as_str()) {
                Some(n) => Ok(c.unify(c.arg(1), &Term::Num(n))),
                None => Ok(Outcome::Fail),
            }
        }
    }
}

fn atom_concat(c: &mut Call<'_>) -> NativeResult {
    let (a, b, whole) = (c.arg(0), c.arg(1), c.arg(2));
    if !a.is_var() && !b.is_var() {
        let s = text_of(c, a)? + &text_of(c, b)?;
        return Ok(c.unify(whole, &Term::atom(s.as_str())));
    }
    let w = text_of(c, whole)?;
    let chars: Vec<char> = w.chars().collect();
    let mut branches = Vec::new();
    for i in 0..=chars.len() {
        let left: String = chars[..i].iter().collect();
        let right: String = chars[i..].iter().collect();
        let pattern = Term::pair("-", Term::atom(left.as_str()), Term::atom(right.as_str()));
        if let Some(mgu) = c.unifier(&Term::pair("-", a.clone(), b.clone()), &pattern) {
            branches.push(Branch::unify(mgu));
        }
    }
    Ok(Outcome::Branches(branches))
}

fn sub_atom(c: &mut Call<'_>) -> NativeResult {
    let text = text_of(c, c.arg(0))?;
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len() as i64;
    let opt_int = |c: &Call<'_>, i: usize| -> Result<Option<i64>, Term> {
        match c.arg(i) {
            Term::Var(_) => Ok(None),
            _ => c.int_arg(i).map(Some),
        }
    };
    let (b, l, a) = (opt_int(c, 1)?, opt_int(c, 2)?, opt_int(c, 3)?);
    let sub = c.arg(4);
    if !sub.is_var() && sub.as_atom().is_none() {
        return Err(c.type_err("atom", sub));
    }
    let pattern = Term::compound("s", vec![c.arg(1).clone(), c.arg(2).clone(), c.arg(3).clone(), sub.clone()]);
    let mut branches = Vec::new();
    let try_at = |start: i64, len: i64, branches: &mut Vec<Branch>| {
        if start < 0 || len < 0 || start + len > n {
            return;
        }
        let s: String = chars[start as usize..(start + len) as usize].iter().collect();
        let cand = Term::compound("s", vec![Term::int(start), Term::int(len), Term::int(n - start - len), Term::atom(s.as_str())]);
        if let Some(mgu) = c.unifier(&pattern, &cand) {
            branches.push(Branch::unify(mgu));
        }
    };
    if let Some(s) = sub.as_atom() {
        let len = s.as_str().chars().count() as i64;
        for start in 0..=n - len.min(n) {
            if len <= n {
                try_at(start, len, &mut branches);
            }
        }
    } else {
        match (b, l, a) {
            (Some(b), Some(l), _) => try_at(b, l, &mut branches),
            (Some(b), None, Some(a)) => try_at(b, n - b - a, &mut branches),
            (None, Some(l), Some(a)) => try_at(n - l - a, l, &mut branches),
            (Some(b), None, None) => (0..=n - b).for_each(|l| try_at(b, l, &mut branches)),
            (None, Some(l), None) => (0..=n - l).for_each(|b| try_at(b, l, &mut branches)),
            (None, None, Some(a)) => (0..=n - a).for_each(|b| try_at(b, n - a - b, &mut branches)),
            (None, None, None) => {
                for b in 0..=n {
                    for l in 0..=n - b {
                        try_at(b, l, &mut branches);
                    }
                }
            }
        }
    }
    Ok(Outcome::Branches(branches))
}

fn case(c: &mut Call<'_>, upper: bool) -> NativeResult {
    let text = text_of(c, c.arg(0))?;
    let out = if upper { text.to_uppercase() } else { text.to_lowercase() };
    Ok(c.unify(c.arg(1), &Term::atom(out.as_str())))
}

fn term_to_atom(c: &mut Call<'_>) -> NativeResult {
    let (t, a) = (c.arg(0), c.arg(1));
    if !a.is_var() {
        let text = text_of(c, a)?;
        let read = c.session().parse_term(&format!("{text} ."));
        return match read {
            Ok(r) => Ok(c.unify(t, &r.term)),
            Err(e) => Err(e.to_term()),
        };
    }
    if t.is_var() && a.is_var() {
        return Err(c.inst());
    }
    let text = render_term(t, &WriteOptions::quoted(), &c.session().ops());
    Ok(c.unify(a, &Term::atom(text.as_str())))
}

fn atomic_list_concat(c: &mut Call<'_>, sep: &str) -> NativeResult {
    let l = c.arg(0);
    let (items, tail) = l.list_prefix();
    let all_bound = tail.is_nil() && items.iter().all(|t| !t.is_var());
    if all_bound {
        let parts: Result<Vec<String>, Term> = items.iter().map(|t| text_of(c, t)).collect();
        let joined = parts?.join(sep);
        let out = c.args().last().expect("result arg").clone();
        return Ok(c.unify(&out, &Term::atom(joined.as_str())));
    }
    if sep.is_empty() {
        return Err(c.inst());
    }
    let whole = c.args().last().expect("result arg").clone();
    let text = text_of(c, &whole)?;
    let parts: Vec<Term> = text.split(sep).map(Term::atom).collect();
    Ok(c.unify(l, &Term::list(parts)))
}
