//! The `lists` library, shipped as a precompiled clause package.

use crate::engine::kb::Clause;
use crate::engine::Module;
use crate::reader::{parse_compiled, ClauseTerms};
use crate::term::Atom;
use std::rc::Rc;

/// Constructor text of the library, generated from `lib/lists.pl`.
pub const PACKAGE: &str = include_str!("lib/lists.pkg");
/// Prolog source the package was compiled from.
pub const SOURCE: &str = include_str!("lib/lists.pl");

thread_local! {
    static CLAUSES: Rc<Vec<ClauseTerms>> = Rc::new(parse_compiled(PACKAGE).expect("lists package is well-formed"));
}

/// Builds a module from package clauses, exporting every predicate whose
/// name does not start with `$`.
pub fn package_module(name: &str, clauses: &[ClauseTerms]) -> Module {
    let mut m = Module::new(Atom::new(name));
    for (head, body) in clauses {
        let c = Clause::new(head, body).expect("package clauses are valid");
        m.add_clause(c, false).expect("package predicates are clause lists");
    }
    m.export_all();
    m.exports.retain(|pi| !pi.name.as_str().starts_with('$'));
    m
}

pub fn module() -> Module {
    CLAUSES.with(|cs| package_module("lists", cs))
}
