//! The `js` module: apply/3,4, get_prop/2,3, global/1, json_prolog/2, release/1.

use super::{handle_of, handle_term, host, record_pairs, record_term, to_host, to_term, Callee, ConvertError, HostBridge, HostKind, HostValue, InvokeError};
use crate::atom;
use crate::builtins::reg;
use crate::engine::{err, Call, Module, NativeResult, Outcome};
use crate::term::Term;
use std::rc::Rc;

pub fn module() -> Module {
    let mut m = Module::new(atom!("js"));
    reg(&mut m, "apply", 4, |c| {
        let bridge = host(c.session());
        let ctx = host_arg(c, &bridge, 0)?;
        apply(c, bridge, ctx, 1)
    });
    reg(&mut m, "apply", 3, |c| {
        let bridge = host(c.session());
        let ctx = HostValue::Handle(bridge.global());
        apply(c, bridge, ctx, 0)
    });
    reg(&mut m, "get_prop", 3, |c| {
        let bridge = host(c.session());
        let ctx = host_arg(c, &bridge, 0)?;
        get_prop(c, bridge, ctx, 1)
    });
    reg(&mut m, "get_prop", 2, |c| {
        let bridge = host(c.session());
        let ctx = HostValue::Handle(bridge.global());
        get_prop(c, bridge, ctx, 0)
    });
    reg(&mut m, "global", 1, |c| {
        let bridge = host(c.session());
        let g = handle_term(&bridge, bridge.global());
        Ok(c.unify(c.arg(0), &g))
    });
    reg(&mut m, "json_prolog", 2, json_prolog);
    reg(&mut m, "release", 1, |c| {
        let t = c.arg(0);
        if t.is_var() {
            return Err(c.inst());
        }
        let Some(h) = handle_of(t) else { return Err(c.type_err("host_value", t)) };
        Ok(Outcome::from_bool(host(c.session()).release(h)))
    });
    m.export_all();
    m
}

fn convert_err(c: &Call<'_>, e: ConvertError, kind: &str) -> Term {
    match e {
        ConvertError::Unbound => c.inst(),
        ConvertError::Invalid(t) => c.type_err(kind, &t),
    }
}

fn host_arg(c: &Call<'_>, bridge: &Rc<dyn HostBridge>, i: usize) -> Result<HostValue, Term> {
    to_host(bridge, c.arg(i)).map_err(|e| convert_err(c, e, "host_value"))
}

fn apply(c: &mut Call<'_>, bridge: Rc<dyn HostBridge>, ctx: HostValue, at: usize) -> NativeResult {
    let method = c.arg(at).clone();
    let callee = match &method {
        Term::Var(_) => return Err(c.inst()),
        t => match (t.as_atom(), handle_of(t)) {
            (Some(a), _) => Callee::Member(a.as_str().to_string()),
            (_, Some(h)) if bridge.classify(h) == Some(HostKind::Function) => Callee::Function(h),
            _ => return Err(c.type_err("callable", t)),
        },
    };
    let items = c.list_arg(at + 1)?;
    let mut args = Vec::with_capacity(items.len());
    for item in &items {
        args.push(to_host(&bridge, item).map_err(|e| convert_err(c, e, "host_value"))?);
    }
    let value = match bridge.invoke(&ctx, &callee, args) {
        Ok(v) => v,
        Err(InvokeError::Missing) => return Err(err::existence("procedure", method, c.pi())),
        Err(InvokeError::Thrown(desc)) => return Err(err::system_error(&desc, c.pi())),
    };
    let result = c.arg(at + 2).clone();
    match value {
        HostValue::Handle(h) if bridge.classify(h) == Some(HostKind::Promise) => {
            let cont = c.continuation();
            let thread = c.handle();
            let pi = c.pi();
            let occurs = c.session().occurs_check();
            let b = bridge.clone();
            bridge.on_settled(
                h,
                Box::new(move |r| match r {
                    Ok(v) => match crate::term::unify(&result, &to_term(&b, &v), occurs) {
                        Some(mgu) => thread.resume(cont, Some(mgu)),
                        None => thread.resume_failure(),
                    },
                    Err(desc) => thread.resume_error(cont, err::system_error(&desc, pi)),
                }),
            );
            Ok(Outcome::Suspend)
        }
        v => Ok(c.unify(&result, &to_term(&bridge, &v))),
    }
}

fn get_prop(c: &mut Call<'_>, bridge: Rc<dyn HostBridge>, ctx: HostValue, at: usize) -> NativeResult {
    let name = c.atom_arg(at)?;
    match bridge.get_property(&ctx, name.as_str()) {
        Some(v) => Ok(c.unify(c.arg(at + 1), &to_term(&bridge, &v))),
        None => Ok(Outcome::Fail),
    }
}

/// Host value to a JSON-style term, expanding records and arrays.
fn json_term(bridge: &Rc<dyn HostBridge>, v: &HostValue) -> Term {
    if let HostValue::Handle(h) = v {
        if let Some(items) = bridge.array_items(*h) {
            return Term::list(items.iter().map(|i| json_term(bridge, i)).collect::<Vec<_>>());
        }
        if let Some(entries) = bridge.record_entries(*h) {
            return record_term(entries.iter().map(|(k, v)| (Term::atom(k.as_str()), json_term(bridge, v))).collect());
        }
    }
    to_term(bridge, v)
}

fn json_prolog(c: &mut Call<'_>) -> NativeResult {
    let bridge = host(c.session());
    let (t, h) = (c.arg(0).clone(), c.arg(1).clone());
    if !t.is_var() {
        if !json_shape(&t) {
            return Err(c.type_err("json_term", &t));
        }
        let v = to_host(&bridge, &t).map_err(|e| convert_err(c, e, "json_term"))?;
        let out = match v {
            HostValue::Handle(id) => handle_term(&bridge, id),
            v => to_term(&bridge, &v),
        };
        return Ok(c.unify(&h, &out));
    }
    if h.is_var() {
        return Err(c.inst());
    }
    let v = match handle_of(&h) {
        Some(id) => HostValue::Handle(id),
        None => to_host(&bridge, &h).map_err(|e| convert_err(c, e, "json_term"))?,
    };
    Ok(c.unify(&t, &json_term(&bridge, &v)))
}

/// Terms `json_prolog/2` accepts on the Prolog side.
fn json_shape(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Num(_) | Term::Host(_) => true,
        _ if t.is_atom() => true,
        _ if t.as_cons().is_some() => {
            let (items, tail) = t.list_prefix();
            (tail.is_nil() || tail.is_var()) && items.iter().all(json_shape)
        }
        _ => match record_pairs(t) {
            Some(pairs) => pairs.iter().all(|(k, v)| (k.is_atom() || k.is_var()) && json_shape(v)),
            None => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use crate::engine::{answer_all, consult_sync, Session};
    use crate::host::{set_host, FakeHost};
    use crate::tooling::format_answer;
    use serde_json::json;
    use std::rc::Rc;

    fn session() -> Session {
        let s = Session::new(100_000);
        set_host(&s, Rc::new(FakeHost::from_json(&json!({
            "o": {"x": 1, "y": false, "z": {"w": [2, "a"]}},
            "a": {"add": {"$fn": "add"}, "boom": {"$fn": "fail"}, "later": {"$fn": "delay"}, "nope": {"$fn": "reject"}},
        }))));
        consult_sync(&s, "").unwrap();
        s
    }

    fn first(s: &Session, goal: &str) -> String {
        answer_all(s, goal).first().map(|a| format_answer(s, a)).unwrap_or_else(|| "false.".into())
    }

    #[test]
    fn object_fixture_goals() {
        let s = session();
        assert_eq!(first(&s, "get_prop(o, O)"), "O = host<object>");
        assert_eq!(first(&s, "get_prop(o, O1), get_prop(o, O2), O1 = O2"), "O1 = host<object>, O2 = host<object>");
        assert_eq!(first(&s, "get_prop(o, {x: X, y: Y, z: {w: W}})"), "X = 1, Y = false, W = [2,a]");
        assert_eq!(first(&s, "get_prop(o, O), O = {x: X, y: false}, O = {z: {w: W}}"), "O = host<object>, X = 1, W = [2,a]");
        assert_eq!(first(&s, "get_prop(o, {q: _})"), "false.");
    }

    #[test]
    fn concat_examples() {
        let s = session();
        assert_eq!(first(&s, "apply([], concat, [[1,2],[3,4,5],[6]], Xs)"), "Xs = [1,2,3,4,5,6]");
        assert_eq!(first(&s, "apply('', concat, [hello, ', ', world, !], S), S == 'hello, world!'"), "S = hello, world!");
    }

    #[test]
    fn apply_errors() {
        let s = session();
        assert_eq!(first(&s, "apply(x, nosuch, [], R)"), "uncaught exception: error(existence_error(procedure,nosuch),apply/4).");
        assert_eq!(first(&s, "apply(x, M, [], R)"), "uncaught exception: error(instantiation_error,apply/4).");
        assert_eq!(first(&s, "get_prop(a, A), apply(A, boom, [bad], R)"), "uncaught exception: error(system_error(bad),apply/4).");
        assert_eq!(first(&s, "get_prop(a, A), apply(A, add, [1, 2], X)"), "A = host<object>, X = 3");
    }

    #[test]
    fn async_results_suspend() {
        let s = session();
        assert_eq!(first(&s, "get_prop(a, A), apply(A, later, [20, done], X)"), "A = host<object>, X = done");
        assert_eq!(first(&s, "get_prop(a, A), apply(A, nope, [why], X)"), "uncaught exception: error(system_error(why),apply/4).");
    }

    #[test]
    fn global_and_missing() {
        let s = session();
        assert_eq!(first(&s, "global(G), get_prop(G, o, O), get_prop(o, O2), O == O2"), "G = host<object>, O = host<object>, O2 = host<object>");
        assert_eq!(first(&s, "global(atom_foo)"), "false.");
        assert_eq!(first(&s, "get_prop(missing, _)"), "false.");
        assert_eq!(first(&s, "get_prop(o, P, _)"), "uncaught exception: error(instantiation_error,get_prop/3).");
    }

    #[test]
    fn json_conversion() {
        let s = session();
        assert_eq!(first(&s, "json_prolog({x: 1, y: [a, b]}, H), json_prolog(T, H)"), "H = host<object>, T = {x:1,y:[a,b]}");
        assert_eq!(first(&s, "json_prolog({}, H), json_prolog(T, H)"), "H = host<object>, T = {}");
        assert_eq!(first(&s, "json_prolog(T, H)"), "uncaught exception: error(instantiation_error,json_prolog/2).");
        assert_eq!(first(&s, "json_prolog(f(x), H)"), "uncaught exception: error(type_error(json_term,f(x)),json_prolog/2).");
        assert_eq!(first(&s, "get_prop(o, O), json_prolog(T, O)"), "O = host<object>, T = {x:1,y:false,z:{w:[2,a]}}");
    }

    #[test]
    fn release_forgets_handles() {
        let s = session();
        assert_eq!(first(&s, "json_prolog({k: 1}, H), release(H), get_prop(H, k, _)"), "false.");
        assert_eq!(first(&s, "release(foo)"), "uncaught exception: error(type_error(host_value,foo),release/1).");
    }
}
