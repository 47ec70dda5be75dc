//! Constructor-text form of clause lists, used to ship predicates as
//! packages without running the reader at load time.
//!
//! ```text
//! {"append/3": [
//!     // append([], X, X).
//!     Rule(Term("append", [Term("[]"), Var("X"), Var("X")]), null),
//!     ...
//! ]}
//! ```

use crate::term::{Atom, Number, PredicateIndicator, Term, Var};
use crate::tooling::write::canonical;
use indexmap::IndexMap;
use num_bigint::BigInt;
use std::fmt::Write;

/// A clause as `(head, body)`; a fact has body `true`.
pub type ClauseTerms = (Term, Term);

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn emit_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => {
            let name = match v {
                Var::Named(a) => a.as_str().to_string(),
                Var::Fresh(n) => format!("_G{n}"),
            };
            let _ = write!(out, "Var({})", quote(&name));
        }
        Term::Num(n) => {
            let _ = write!(out, "Num({}, {})", n, n.is_float());
        }
        Term::Compound(c) if c.arity() == 0 => {
            let _ = write!(out, "Term({})", quote(c.name().as_str()));
        }
        Term::Compound(c) => {
            let _ = write!(out, "Term({}, [", quote(c.name().as_str()));
            for (i, a) in c.args().iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                emit_term(a, out);
            }
            out.push_str("])");
        }
        Term::Host(h) => {
            let _ = write!(out, "Term({})", quote(&format!("host<{}>", h.kind())));
        }
    }
}

/// Renders clauses grouped by predicate indicator, in first-appearance order.
pub fn compile_clauses(clauses: &[ClauseTerms]) -> String {
    let mut groups: IndexMap<String, Vec<&ClauseTerms>> = IndexMap::new();
    for c in clauses {
        let key = c.0.indicator().map(|p| p.to_string()).unwrap_or_default();
        groups.entry(key).or_default().push(c);
    }
    let mut out = String::from("{");
    for (gi, (key, cs)) in groups.iter().enumerate() {
        if gi > 0 {
            out.push(',');
        }
        let _ = write!(out, "\n{}: [", quote(key));
        for (ci, (head, body)) in cs.iter().enumerate() {
            if ci > 0 {
                out.push(',');
            }
            let src = if body.is_atom_named("true") {
                canonical(head)
            } else {
                format!("{} :- {}", canonical(head), canonical(body))
            };
            let _ = write!(out, "\n    // {}.\n    Rule(", src.replace('\n', " "));
            emit_term(head, &mut out);
            out.push_str(", ");
            if body.is_atom_named("true") {
                out.push_str("null");
            } else {
                emit_term(body, &mut out);
            }
            out.push(')');
        }
        out.push_str("\n]");
    }
    out.push_str("\n}\n");
    out
}

#[derive(Debug, thiserror::Error)]
#[error("constructor text, offset {offset}: {message}")]
pub struct PackageError {
    pub offset: usize,
    pub message: String,
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, PackageError> {
        Err(PackageError { offset: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = &self.src[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with("//") {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, s: &str) -> Result<(), PackageError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            Ok(())
        } else {
            self.fail(format!("expected `{s}`"))
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn string(&mut self) -> Result<String, PackageError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if !rest.starts_with('"') {
            return self.fail("expected a string");
        }
        let mut escaped = false;
        for (i, ch) in rest.char_indices().skip(1) {
            match ch {
                '\\' if !escaped => escaped = true,
                '"' if !escaped => {
                    let lit = &rest[..=i];
                    self.pos += i + 1;
                    return serde_json::from_str(lit).map_err(|e| PackageError { offset: self.pos, message: e.to_string() });
                }
                _ => escaped = false,
            }
        }
        self.fail("unterminated string")
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-' || c == '.' || c == '+')).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn term(&mut self) -> Result<Term, PackageError> {
        let ctor = self.word();
        match ctor {
            "Var" => {
                self.expect("(")?;
                let name = self.string()?;
                self.expect(")")?;
                Ok(Term::Var(Var::Named(Atom::new(&name))))
            }
            "Num" => {
                self.expect("(")?;
                let value = self.word().to_string();
                self.expect(",")?;
                let is_float = match self.word() {
                    "true" => true,
                    "false" => false,
                    _ => return self.fail("expected true or false"),
                };
                self.expect(")")?;
                let n = if is_float {
                    value.parse::<f64>().map(Number::Float).ok()
                } else {
                    value.parse::<BigInt>().map(Number::from_big).ok()
                };
                match n {
                    Some(n) => Ok(Term::Num(n)),
                    None => self.fail(format!("bad number `{value}`")),
                }
            }
            "Term" => {
                self.expect("(")?;
                let name = self.string()?;
                let mut args = Vec::new();
                if self.eat(",") {
                    self.expect("[")?;
                    if !self.eat("]") {
                        loop {
                            args.push(self.term()?);
                            if self.eat("]") {
                                break;
                            }
                            self.expect(",")?;
                        }
                    }
                }
                self.expect(")")?;
                Ok(Term::compound(Atom::new(&name), args))
            }
            other => self.fail(format!("unknown constructor `{other}`")),
        }
    }

    fn rule(&mut self) -> Result<ClauseTerms, PackageError> {
        if self.word() != "Rule" {
            return self.fail("expected Rule");
        }
        self.expect("(")?;
        let head = self.term()?;
        self.expect(",")?;
        let body = if self.eat("null") { Term::atom("true") } else { self.term()? };
        self.expect(")")?;
        Ok((head, body))
    }
}

/// Parses constructor text back into clauses, checking each is filed under
/// its own predicate indicator.
pub fn parse_compiled(src: &str) -> Result<Vec<ClauseTerms>, PackageError> {
    let mut r = Reader { src, pos: 0 };
    let mut out = Vec::new();
    r.expect("{")?;
    if r.eat("}") {
        return Ok(out);
    }
    loop {
        let key = r.string()?;
        r.expect(":")?;
        r.expect("[")?;
        if !r.eat("]") {
            loop {
                let clause = r.rule()?;
                let pi: Option<PredicateIndicator> = clause.0.indicator();
                if pi.map(|p| p.to_string()).as_deref() != Some(key.as_str()) {
                    return r.fail(format!("clause filed under `{key}` has another indicator"));
                }
                out.push(clause);
                if r.eat("]") {
                    break;
                }
                r.expect(",")?;
            }
        }
        if r.eat("}") {
            break;
        }
        r.expect(",")?;
    }
    if r.peek().is_some() {
        return r.fail("trailing text");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::{OperatorTable, Parser, DoubleQuotes};

    fn clauses(src: &str) -> Vec<ClauseTerms> {
        let ops = OperatorTable::iso();
        let mut p = Parser::new(src);
        let mut out = Vec::new();
        while let Some(r) = p.read_term(&ops, DoubleQuotes::Codes).unwrap() {
            out.push(match r.term.args_if(":-", 2) {
                Some(a) => (a[0].clone(), a[1].clone()),
                None => (r.term.clone(), Term::atom("true")),
            });
        }
        out
    }

    #[test]
    fn append_listing() {
        let text = compile_clauses(&clauses("append([], X, X).\nappend([H|T], X, [H|S]) :- append(T, X, S)."));
        let expected = r#"{
"append/3": [
    // append([],X,X).
    Rule(Term("append", [Term("[]"), Var("X"), Var("X")]), null),
    // append([H|T],X,[H|S]) :- append(T,X,S).
    Rule(Term("append", [Term(".", [Var("H"), Var("T")]), Var("X"), Term(".", [Var("H"), Var("S")])]), Term("append", [Var("T"), Var("X"), Var("S")]))
]
}
"#;
        assert_eq!(text, expected);
    }

    #[test]
    fn fact_has_null_body() {
        let text = compile_clauses(&clauses("p(a)."));
        assert!(text.contains(r#"Rule(Term("p", [Term("a")]), null)"#), "{text}");
    }

    #[test]
    fn round_trip() {
        let cs = clauses("q(1, -2.5, 'it''s', \"ab\", f(X, _Y, X)) :- X > 0, \\+ r.\nq(123456789012345678901234567890, [], {}).");
        let back = parse_compiled(&compile_clauses(&cs)).unwrap();
        assert_eq!(back.len(), cs.len());
        for (a, b) in cs.iter().zip(&back) {
            assert!(a.0.structurally_eq(&b.0) && a.1.structurally_eq(&b.1), "{:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn misfiled_clause_is_rejected() {
        assert!(parse_compiled(r#"{"p/1": [Rule(Term("q", [Term("a")]), null)]}"#).is_err());
    }
}
