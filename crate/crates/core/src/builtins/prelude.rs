//! System predicates defined in Prolog.

use crate::atom;
use crate::engine::{Clause, Session};
use crate::reader::{DoubleQuotes, OperatorTable, Parser};
use crate::term::Term;

const SOURCE: &str = include_str!("lib/prelude.pl");

thread_local! {
    static CLAUSES: Vec<(Term, Term)> = parse();
}

fn parse() -> Vec<(Term, Term)> {
    let ops = OperatorTable::iso();
    let mut p = Parser::new(SOURCE);
    let mut out = Vec::new();
    while let Some(r) = p.read_term(&ops, DoubleQuotes::Codes).expect("prelude parses") {
        let (head, body) = match r.term.args_if(":-", 2) {
            Some(a) => (a[0].clone(), a[1].clone()),
            None => (r.term.clone(), Term::atom("true")),
        };
        out.push((head, body));
    }
    out
}

pub fn load(s: &Session) {
    CLAUSES.with(|cs| {
        let mut kb = s.kb_mut();
        let sys = kb.module_mut(atom!("system"));
        for (head, body) in cs {
            let c = Clause::new(head, body).expect("prelude clause");
            sys.add_clause(c, false).expect("prelude predicate clashes with a native");
        }
    });
}
