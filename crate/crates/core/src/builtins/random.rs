//! The `random` library.

use super::reg;
use crate::atom;
use crate::engine::{Module, Outcome};
use crate::term::{Number, Term};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn module() -> Module {
    let mut m = Module::new(atom!("random"));
    reg(&mut m, "random", 3, |c| {
        let (lower, upper, rand) = (c.arg(0), c.arg(1), c.arg(2));
        if lower.is_var() || upper.is_var() {
            return Err(c.inst());
        }
        let Some(lo) = lower.as_number() else { return Err(c.type_err("number", lower)) };
        let Some(hi) = upper.as_number() else { return Err(c.type_err("number", upper)) };
        if !rand.is_var() && !rand.is_number() {
            return Err(c.type_err("number", rand));
        }
        if lo.compare_value(hi) != std::cmp::Ordering::Less {
            return Ok(Outcome::Fail);
        }
        let float = lo.is_float() || hi.is_float();
        let (l, h) = (lo.to_f64(), hi.to_f64());
        let r: f64 = c.session().rng().gen();
        let gen = l + r * (h - l);
        let n = if float { Number::Float(gen) } else { Number::Int(gen.floor() as i64) };
        Ok(c.unify(rand, &Term::Num(n)))
    });
    reg(&mut m, "random", 1, |c| {
        let x: f64 = c.session().rng().gen();
        Ok(c.unify(c.arg(0), &Term::float(x)))
    });
    reg(&mut m, "random_between", 3, |c| {
        let lo = c.int_arg(0)?;
        let hi = c.int_arg(1)?;
        if lo > hi {
            return Ok(Outcome::Fail);
        }
        let x = c.session().rng().gen_range(lo..=hi);
        Ok(c.unify(c.arg(2), &Term::int(x)))
    });
    reg(&mut m, "random_member", 2, |c| {
        let items = c.list_arg(1)?;
        let pick = items.choose(&mut *c.session().rng()).cloned();
        match pick {
            Some(x) => Ok(c.unify(c.arg(0), &x)),
            None => Ok(Outcome::Fail),
        }
    });
    reg(&mut m, "random_permutation", 2, |c| {
        let mut items = c.list_arg(0)?;
        items.shuffle(&mut *c.session().rng());
        Ok(c.unify(c.arg(1), &Term::list(items)))
    });
    reg(&mut m, "set_random", 1, |c| {
        let t = c.arg(0);
        match t.args_if("seed", 1) {
            Some(a) => match a[0].as_int() {
                Some(n) => {
                    c.session().seed(n as u64);
                    Ok(Outcome::True)
                }
                None if a[0].is_var() => Err(c.inst()),
                None => Err(c.type_err("integer", &a[0])),
            },
            None if t.is_var() => Err(c.inst()),
            None => Err(c.domain_err("set_random", t)),
        }
    });
    m.export_all();
    m
}
