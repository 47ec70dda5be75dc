//! Translation of grammar rules (`-->/2`) into clauses with two extra
//! difference-list arguments.

use crate::term::Term;

fn type_error(culprit: &Term) -> Term {
    let ctx = Term::compound("/", vec![Term::atom("dcg_translate_rule"), Term::int(2)]);
    Term::compound("error", vec![Term::compound("type_error", vec![Term::atom("callable"), culprit.clone()]), ctx])
}

fn eq(a: Term, b: Term) -> Term {
    Term::compound("=", vec![a, b])
}

fn extend(t: &Term, extra: [Term; 2]) -> Result<Term, Term> {
    match t {
        Term::Compound(c) => {
            let mut args = c.args().to_vec();
            args.extend(extra);
            Ok(Term::compound(c.name(), args))
        }
        _ => Err(type_error(t)),
    }
}

/// Translates `Head --> Body` into `Head' :- Body'`. `fresh` supplies new
/// variables for the intermediate list positions.
pub fn dcg_transform(rule: &Term, fresh: &mut dyn FnMut() -> Term) -> Result<Term, Term> {
    let Some([head, body]) = rule.args_if("-->", 2).map(|a| [a[0].clone(), a[1].clone()]) else {
        return Err(type_error(rule));
    };
    let s0 = fresh();
    let s = fresh();
    let (nt, pushback) = match head.args_if(",", 2) {
        Some(a) => (a[0].clone(), Some(a[1].clone())),
        None => (head.clone(), None),
    };
    if nt.is_var() {
        return Err(Term::compound(
            "error",
            vec![Term::atom("instantiation_error"), Term::compound("/", vec![Term::atom("dcg_translate_rule"), Term::int(2)])],
        ));
    }
    let new_head = extend(&nt, [s0.clone(), s.clone()])?;
    let new_body = match pushback {
        None => body_goal(&body, s0, s, fresh)?,
        Some(pb) => {
            let mid = fresh();
            let b = body_goal(&body, s0, mid.clone(), fresh)?;
            let Some(items) = pb.list_items() else { return Err(type_error(&pb)) };
            Term::compound(",", vec![b, eq(s, Term::list_with_tail(items, mid))])
        }
    };
    Ok(Term::compound(":-", vec![new_head, new_body]))
}

/// Translates a grammar body between list positions `s0` and `s`.
pub fn body_goal(b: &Term, s0: Term, s: Term, fresh: &mut dyn FnMut() -> Term) -> Result<Term, Term> {
    if b.is_var() {
        return Ok(Term::compound("phrase", vec![b.clone(), s0, s]));
    }
    if let Some(a) = b.args_if(",", 2) {
        let mid = fresh();
        let l = body_goal(&a[0], s0, mid.clone(), fresh)?;
        let r = body_goal(&a[1], mid, s, fresh)?;
        return Ok(Term::compound(",", vec![l, r]));
    }
    if let Some(a) = b.args_if(";", 2) {
        let l = body_goal(&a[0], s0.clone(), s.clone(), fresh)?;
        let r = body_goal(&a[1], s0, s, fresh)?;
        return Ok(Term::compound(";", vec![l, r]));
    }
    if let Some(a) = b.args_if("->", 2) {
        let mid = fresh();
        let l = body_goal(&a[0], s0, mid.clone(), fresh)?;
        let r = body_goal(&a[1], mid, s, fresh)?;
        return Ok(Term::compound("->", vec![l, r]));
    }
    if let Some(a) = b.args_if("\\+", 1) {
        let g = body_goal(&a[0], s0.clone(), fresh(), fresh)?;
        return Ok(Term::compound(",", vec![Term::compound("\\+", vec![g]), eq(s0, s)]));
    }
    if b.is_atom_named("!") {
        return Ok(Term::compound(",", vec![Term::atom("!"), eq(s0, s)]));
    }
    if b.is_nil() {
        return Ok(eq(s0, s));
    }
    if let Some(a) = b.args_if("{}", 1) {
        return Ok(Term::compound(",", vec![a[0].clone(), eq(s0, s)]));
    }
    if b.as_cons().is_some() {
        let (items, tail) = b.list_prefix();
        if !tail.is_nil() {
            return Err(type_error(b));
        }
        return Ok(eq(s0, Term::list_with_tail(items, s)));
    }
    extend(b, [s0, s])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::{parse_term, OperatorTable};
    use crate::term::variant;

    fn translate(src: &str) -> Term {
        let t = parse_term(src, &OperatorTable::iso()).unwrap();
        let mut n = 0;
        let mut fresh = || {
            n += 1;
            Term::var(&format!("V{n}"))
        };
        dcg_transform(&t, &mut fresh).unwrap()
    }

    fn p(src: &str) -> Term {
        parse_term(src, &OperatorTable::iso()).unwrap()
    }

    #[test]
    fn terminal_then_nonterminal() {
        let got = translate("greeting --> [hello], name");
        assert!(variant(&got, &p("greeting(S0,S) :- S0=[hello|S1], name(S1,S)")), "{got}");
    }

    #[test]
    fn pushback_and_braces() {
        let got = translate("a, [x] --> {go}, b");
        assert!(variant(&got, &p("a(S0,S) :- ((go, S0=S1), b(S1,S2)), S=[x|S2]")), "{got}");
    }

    #[test]
    fn control_constructs() {
        let got = translate("a --> (b -> c ; []), !");
        assert!(variant(&got, &p("a(S0,S) :- ((b(S0,S1) -> c(S1,S2)) ; S0=S2), (!, S2=S)")), "{got}");
        let got = translate("a --> \\+ b, X");
        assert!(variant(&got, &p("a(S0,S) :- (\\+ b(S0,_), S0=S1), phrase(X,S1,S)")), "{got}");
    }

    #[test]
    fn non_callable_body_is_an_error() {
        let t = p("a --> 3");
        let mut fresh = || Term::var("V");
        assert!(dcg_transform(&t, &mut fresh).is_err());
    }
}
