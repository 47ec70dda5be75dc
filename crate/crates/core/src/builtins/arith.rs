//! Arithmetic evaluation and comparison.

use super::reg;
use crate::engine::{err, Branch, Call, Module, NativeResult, Outcome};
use crate::term::{Number, PredicateIndicator, Term};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::cmp::Ordering;

pub fn install(m: &mut Module) {
    reg(m, "is", 2, |c| {
        let v = eval(c, c.arg(1))?;
        Ok(c.unify(c.arg(0), &Term::Num(v)))
    });
    compare(m, "=:=", |o| o == Ordering::Equal);
    compare(m, "=\\=", |o| o != Ordering::Equal);
    compare(m, "<", |o| o == Ordering::Less);
    compare(m, ">", |o| o == Ordering::Greater);
    compare(m, "=<", |o| o != Ordering::Greater);
    compare(m, ">=", |o| o != Ordering::Less);
    reg(m, "succ", 2, succ);
    reg(m, "plus", 3, plus);
    reg(m, "between", 3, between);
}

fn compare(m: &mut Module, name: &str, ok: fn(Ordering) -> bool) {
    reg(m, name, 2, move |c| {
        let a = eval(c, c.arg(0))?;
        let b = eval(c, c.arg(1))?;
        Ok(Outcome::from_bool(ok(a.compare_value(&b))))
    });
}

fn succ(c: &mut Call<'_>) -> NativeResult {
    let (a, b) = (c.arg(0), c.arg(1));
    let nat = |c: &Call<'_>, t: &Term| -> Result<Option<i64>, Term> {
        match t {
            Term::Var(_) => Ok(None),
            Term::Num(n) if n.is_integer() => {
                let v = t.as_int().ok_or_else(|| err::representation("max_integer", c.pi()))?;
                if v < 0 {
                    return Err(c.type_err("not_less_than_zero", t));
                }
                Ok(Some(v))
            }
            _ => Err(c.type_err("integer", t)),
        }
    };
    match (nat(c, a)?, nat(c, b)?) {
        (Some(x), _) => Ok(c.unify(b, &Term::int(x + 1))),
        (None, Some(0)) => Ok(Outcome::Fail),
        (None, Some(y)) => Ok(c.unify(a, &Term::int(y - 1))),
        (None, None) => Err(c.inst()),
    }
}

fn plus(c: &mut Call<'_>) -> NativeResult {
    let get = |t: &Term| t.as_number().filter(|n| n.is_integer()).cloned();
    let (x, y, z) = (get(c.arg(0)), get(c.arg(1)), get(c.arg(2)));
    let ctx = c.pi();
    match (x, y, z) {
        (Some(x), Some(y), _) => Ok(c.unify(c.arg(2), &Term::Num(add(&x, &y)))),
        (Some(x), None, Some(z)) => Ok(c.unify(c.arg(1), &Term::Num(sub(&z, &x)))),
        (None, Some(y), Some(z)) => Ok(c.unify(c.arg(0), &Term::Num(sub(&z, &y)))),
        _ => Err(err::instantiation(ctx)),
    }
}

fn between(c: &mut Call<'_>) -> NativeResult {
    let lo = c.int_arg(0)?;
    let hi_t = c.arg(1);
    let hi = if hi_t.is_atom_named("inf") || hi_t.is_atom_named("infinite") { i64::MAX } else { c.int_arg(1)? };
    let x = c.arg(2);
    match x {
        Term::Var(_) => {
            if lo > hi {
                return Ok(Outcome::Fail);
            }
            let mut mgu = crate::term::Substitution::new();
            mgu.bind(x.as_var().expect("var"), Term::int(lo));
            let mut branches = vec![Branch::unify(mgu)];
            if lo < hi {
                let next = Term::compound("between", vec![Term::int(lo + 1), hi_t.clone(), x.clone()]);
                branches.push(Branch { mgu: Default::default(), frames: vec![c.frame(next)] });
            }
            Ok(Outcome::Branches(branches))
        }
        Term::Num(n) if n.is_integer() => Ok(Outcome::from_bool(x.as_int().is_some_and(|v| lo <= v && v <= hi))),
        _ => Err(c.type_err("integer", x)),
    }
}

fn int_result(b: BigInt) -> Number {
    Number::from_big(b)
}

fn add(a: &Number, b: &Number) -> Number {
    match (a, b) {
        (Number::Int(x), Number::Int(y)) => match x.checked_add(*y) {
            Some(v) => Number::Int(v),
            None => int_result(BigInt::from(*x) + y),
        },
        _ if a.is_float() || b.is_float() => Number::Float(a.to_f64() + b.to_f64()),
        _ => int_result(a.to_big().unwrap() + b.to_big().unwrap()),
    }
}

fn sub(a: &Number, b: &Number) -> Number {
    match (a, b) {
        (Number::Int(x), Number::Int(y)) => match x.checked_sub(*y) {
            Some(v) => Number::Int(v),
            None => int_result(BigInt::from(*x) - y),
        },
        _ if a.is_float() || b.is_float() => Number::Float(a.to_f64() - b.to_f64()),
        _ => int_result(a.to_big().unwrap() - b.to_big().unwrap()),
    }
}

fn mul(a: &Number, b: &Number) -> Number {
    match (a, b) {
        (Number::Int(x), Number::Int(y)) => match x.checked_mul(*y) {
            Some(v) => Number::Int(v),
            None => int_result(BigInt::from(*x) * y),
        },
        _ if a.is_float() || b.is_float() => Number::Float(a.to_f64() * b.to_f64()),
        _ => int_result(a.to_big().unwrap() * b.to_big().unwrap()),
    }
}

struct Ctx {
    pi: Term,
}

impl Ctx {
    fn type_err(&self, kind: &str, t: Term) -> Term {
        err::type_error(kind, t, self.pi.clone())
    }

    fn eval_err(&self, what: &str) -> Term {
        err::evaluation(what, self.pi.clone())
    }

    fn int(&self, n: &Number) -> Result<BigInt, Term> {
        n.to_big().ok_or_else(|| self.type_err("integer", Term::Num(n.clone())))
    }

    fn float(&self, x: f64) -> Result<Number, Term> {
        if x.is_nan() {
            Err(self.eval_err("undefined"))
        } else if x.is_infinite() {
            Err(self.eval_err("float_overflow"))
        } else {
            Ok(Number::Float(x))
        }
    }

    fn to_int(&self, x: f64) -> Result<Number, Term> {
        if !x.is_finite() {
            return Err(self.eval_err("undefined"));
        }
        if x.abs() < 9.0e18 {
            return Ok(Number::Int(x as i64));
        }
        BigInt::from_f64(x).map(int_result).ok_or_else(|| self.eval_err("undefined"))
    }
}

/// Evaluates an arithmetic expression.
pub fn eval(c: &Call<'_>, t: &Term) -> Result<Number, Term> {
    let ctx = Ctx { pi: c.pi() };
    eval_in(&ctx, c, t)
}

fn eval_in(ctx: &Ctx, c: &Call<'_>, t: &Term) -> Result<Number, Term> {
    match t {
        Term::Var(_) => Err(err::instantiation(ctx.pi.clone())),
        Term::Num(n) => Ok(n.clone()),
        Term::Host(_) => Err(ctx.type_err("evaluable", t.clone())),
        Term::Compound(k) => {
            let name = k.name().as_str();
            let args = k.args();
            if let Some((x, rest)) = t.as_cons() {
                if rest.is_nil() {
                    return eval_in(ctx, c, x);
                }
            }
            match args.len() {
                0 => nullary(ctx, c, name).ok_or_else(|| not_evaluable(ctx, name, 0)),
                1 => {
                    let x = eval_in(ctx, c, &args[0])?;
                    unary(ctx, c, name, x)
                }
                2 => {
                    let x = eval_in(ctx, c, &args[0])?;
                    let y = eval_in(ctx, c, &args[1])?;
                    binary(ctx, name, x, y)
                }
                n => Err(not_evaluable(ctx, name, n)),
            }
        }
    }
}

fn not_evaluable(ctx: &Ctx, name: &str, arity: usize) -> Term {
    ctx.type_err("evaluable", PredicateIndicator::new(name, arity).to_term())
}

fn nullary(_ctx: &Ctx, c: &Call<'_>, name: &str) -> Option<Number> {
    Some(match name {
        "pi" => Number::Float(std::f64::consts::PI),
        "e" => Number::Float(std::f64::consts::E),
        "inf" | "infinite" => Number::Float(f64::INFINITY),
        "nan" => Number::Float(f64::NAN),
        "epsilon" => Number::Float(f64::EPSILON),
        "max_tagged_integer" => Number::Int((1 << 60) - 1),
        "random" => Number::Float(c.session().rng().gen::<f64>()),
        "random_float" => Number::Float(c.session().rng().gen::<f64>()),
        "cputime" => Number::Float(crate::builtins::io::cpu_seconds()),
        "realtime" => Number::Int(
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs() as i64).unwrap_or(0),
        ),
        _ => return None,
    })
}

fn unary(ctx: &Ctx, c: &Call<'_>, name: &str, x: Number) -> Result<Number, Term> {
    let f = x.to_f64();
    match name {
        "-" => Ok(match &x {
            Number::Int(n) => n.checked_neg().map(Number::Int).unwrap_or_else(|| int_result(-BigInt::from(*n))),
            Number::Big(b) => int_result(-(**b).clone()),
            Number::Float(v) => Number::Float(-v),
        }),
        "+" => Ok(x),
        "abs" => Ok(match &x {
            Number::Int(n) => n.checked_abs().map(Number::Int).unwrap_or_else(|| int_result(BigInt::from(*n).abs())),
            Number::Big(b) => int_result(b.abs()),
            Number::Float(v) => Number::Float(v.abs()),
        }),
        "sign" => Ok(match &x {
            Number::Float(v) => Number::Float(if *v > 0.0 {
                1.0
            } else if *v < 0.0 {
                -1.0
            } else {
                0.0
            }),
            _ => Number::Int(match x.compare_value(&Number::Int(0)) {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            }),
        }),
        "sqrt" => {
            if f < 0.0 {
                return Err(ctx.eval_err("undefined"));
            }
            ctx.float(f.sqrt())
        }
        "sin" => ctx.float(f.sin()),
        "cos" => ctx.float(f.cos()),
        "tan" => ctx.float(f.tan()),
        "asin" => ctx.float(f.asin()),
        "acos" => ctx.float(f.acos()),
        "atan" => ctx.float(f.atan()),
        "sinh" => ctx.float(f.sinh()),
        "cosh" => ctx.float(f.cosh()),
        "tanh" => ctx.float(f.tanh()),
        "exp" => ctx.float(f.exp()),
        "log" => {
            if f <= 0.0 {
                return Err(ctx.eval_err("undefined"));
            }
            ctx.float(f.ln())
        }
        "log2" => {
            if f <= 0.0 {
                return Err(ctx.eval_err("undefined"));
            }
            ctx.float(f.log2())
        }
        "float" => ctx.float(f),
        "integer" => match x {
            Number::Float(v) => ctx.to_int(v.round()),
            _ => Ok(x),
        },
        "float_integer_part" => ctx.float(f.trunc()),
        "float_fractional_part" => ctx.float(f.fract()),
        "truncate" | "round" | "ceiling" | "floor" => match x {
            Number::Float(v) => ctx.to_int(match name {
                "truncate" => v.trunc(),
                "round" => v.round(),
                "ceiling" => v.ceil(),
                _ => v.floor(),
            }),
            _ => Ok(x),
        },
        "\\" => Ok(int_result(!ctx.int(&x)?)),
        "msb" => {
            let b = ctx.int(&x)?;
            Ok(Number::Int(b.bits() as i64 - 1))
        }
        "succ" => Ok(add(&x, &Number::Int(1))),
        "random" => {
            let n = ctx.int(&x)?;
            let n = n.to_i64().filter(|n| *n > 0).ok_or_else(|| ctx.eval_err("undefined"))?;
            Ok(Number::Int(c.session().rng().gen_range(0..n)))
        }
        "random_float" => Ok(Number::Float(c.session().rng().gen::<f64>())),
        _ => Err(not_evaluable(ctx, name, 1)),
    }
}

fn binary(ctx: &Ctx, name: &str, x: Number, y: Number) -> Result<Number, Term> {
    let any_float = x.is_float() || y.is_float();
    match name {
        "+" => check(ctx, add(&x, &y)),
        "-" => check(ctx, sub(&x, &y)),
        "*" => check(ctx, mul(&x, &y)),
        "/" => {
            if y.is_zero() {
                return Err(ctx.eval_err("zero_divisor"));
            }
            if any_float {
                return ctx.float(x.to_f64() / y.to_f64());
            }
            let (a, b) = (x.to_big().unwrap(), y.to_big().unwrap());
            let (q, r) = a.div_rem(&b);
            if r.is_zero() {
                Ok(int_result(q))
            } else {
                ctx.float(x.to_f64() / y.to_f64())
            }
        }
        "//" | "mod" | "rem" | "div" | "gcd" | ">>" | "<<" | "/\\" | "\\/" | "xor" => {
            let a = ctx.int(&x)?;
            let b = ctx.int(&y)?;
            let needs_nonzero = matches!(name, "//" | "mod" | "rem" | "div");
            if needs_nonzero && b.is_zero() {
                return Err(ctx.eval_err("zero_divisor"));
            }
            Ok(int_result(match name {
                "//" => &a / &b,
                "rem" => &a % &b,
                "mod" => a.mod_floor(&b),
                "div" => a.div_floor(&b),
                "gcd" => a.gcd(&b),
                ">>" => a >> b.to_usize().unwrap_or(usize::MAX >> 1).min(1 << 20),
                "<<" => {
                    let s = b.to_usize().filter(|s| *s < 1 << 20).ok_or_else(|| err::resource_error("memory", ctx.pi.clone()))?;
                    a << s
                }
                "/\\" => a & b,
                "\\/" => a | b,
                _ => a ^ b,
            }))
        }
        "min" => Ok(if y.compare_value(&x) == Ordering::Less { y } else { x }),
        "max" => Ok(if y.compare_value(&x) == Ordering::Greater { y } else { x }),
        "**" => {
            if !any_float {
                if let Some(e) = y.to_big().and_then(|e| e.to_u32()) {
                    return Ok(int_result(num_traits::pow(x.to_big().unwrap(), e as usize)));
                }
            }
            ctx.float(x.to_f64().powf(y.to_f64()))
        }
        "^" => {
            if any_float {
                return ctx.float(x.to_f64().powf(y.to_f64()));
            }
            let (a, b) = (x.to_big().unwrap(), y.to_big().unwrap());
            if b.is_negative() {
                if a.is_one() {
                    return Ok(Number::Int(1));
                }
                if a == BigInt::from(-1) {
                    return Ok(Number::Int(if b.is_even() { 1 } else { -1 }));
                }
                if a.is_zero() {
                    return Err(ctx.eval_err("zero_divisor"));
                }
                return Err(ctx.type_err("float", Term::Num(x)));
            }
            let e = b.to_usize().ok_or_else(|| err::resource_error("memory", ctx.pi.clone()))?;
            Ok(int_result(num_traits::pow(a, e)))
        }
        "atan2" | "atan" => ctx.float(x.to_f64().atan2(y.to_f64())),
        "copysign" => ctx.float(x.to_f64().copysign(y.to_f64())),
        "log" => {
            let (b, v) = (x.to_f64(), y.to_f64());
            if b <= 0.0 || v <= 0.0 {
                return Err(ctx.eval_err("undefined"));
            }
            ctx.float(v.ln() / b.ln())
        }
        _ => Err(not_evaluable(ctx, name, 2)),
    }
}

fn check(ctx: &Ctx, n: Number) -> Result<Number, Term> {
    match n {
        Number::Float(x) => ctx.float(x),
        other => Ok(other),
    }
}
