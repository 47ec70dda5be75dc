//! Predicates shipped with every session.

pub mod arith;
pub mod atoms;
pub mod control;
pub mod db;
pub mod io;
pub mod lists;
pub mod load;
pub mod os;
pub mod prelude;
pub mod random;
pub mod solutions;
pub mod terms;

use crate::atom;
use crate::engine::err;
use crate::engine::{Call, Module, NativeResult, Session};
use crate::term::{Atom, Term};
use std::rc::Rc;

/// Registers a native predicate.
pub fn reg(m: &mut Module, name: &str, arity: usize, f: impl Fn(&mut Call<'_>) -> NativeResult + 'static) {
    m.native(name, arity, Rc::new(f));
}

/// Library modules a fresh `user` module can see without `use_module/1`.
pub const DEFAULT_IMPORTS: [&str; 5] = ["lists", "random", "os", "js", "dom"];

pub fn install(s: &Session) {
    {
        let mut kb = s.kb_mut();
        let sys = kb.module_mut(atom!("system"));
        control::install(sys);
        terms::install(sys);
        arith::install(sys);
        atoms::install(sys);
        db::install(sys);
        solutions::install(sys);
        io::install(sys);
        load::install(sys);
        kb.register(random::module());
        kb.register(os::module());
        kb.register(lists::module());
        kb.register(crate::host::module());
        kb.register(crate::dom::module());
        kb.module_mut(atom!("user")).imports = DEFAULT_IMPORTS.iter().map(|n| Atom::new(n)).collect();
    }
    prelude::load(s);
}

impl Call<'_> {
    pub fn inst(&self) -> Term {
        err::instantiation(self.pi())
    }

    pub fn type_err(&self, kind: &str, culprit: &Term) -> Term {
        err::type_error(kind, culprit.clone(), self.pi())
    }

    pub fn domain_err(&self, domain: &str, culprit: &Term) -> Term {
        err::domain_error(domain, culprit.clone(), self.pi())
    }

    pub fn atom_arg(&self, i: usize) -> Result<Atom, Term> {
        let t = self.arg(i);
        match t {
            Term::Var(_) => Err(self.inst()),
            _ => t.as_atom().ok_or_else(|| self.type_err("atom", t)),
        }
    }

    pub fn int_arg(&self, i: usize) -> Result<i64, Term> {
        let t = self.arg(i);
        match t {
            Term::Var(_) => Err(self.inst()),
            Term::Num(n) if n.is_integer() => t.as_int().ok_or_else(|| err::representation("max_integer", self.pi())),
            _ => Err(self.type_err("integer", t)),
        }
    }

    pub fn callable_arg(&self, i: usize) -> Result<Term, Term> {
        let t = self.arg(i);
        match t {
            Term::Var(_) => Err(self.inst()),
            _ if t.is_callable() => Ok(t.clone()),
            _ => Err(self.type_err("callable", t)),
        }
    }

    /// Items of a proper list argument.
    pub fn list_arg(&self, i: usize) -> Result<Vec<Term>, Term> {
        proper_list(self.arg(i), self)
    }

    /// Module that database and loading predicates act on.
    pub fn target_module(&self) -> Atom {
        if self.module == atom!("system") {
            atom!("user")
        } else {
            self.module
        }
    }
}

/// Items of `t`, or an instantiation/type error for partial or improper lists.
pub fn proper_list(t: &Term, call: &Call<'_>) -> Result<Vec<Term>, Term> {
    let (items, tail) = t.list_prefix();
    if tail.is_nil() {
        Ok(items)
    } else if tail.is_var() {
        Err(call.inst())
    } else {
        Err(call.type_err("list", t))
    }
}

/// Strips `Module:` qualifiers.
pub fn strip_module(t: &Term, module: Atom) -> (Term, Atom) {
    let mut t = t.clone();
    let mut module = module;
    while let Some(a) = t.args_if(":", 2) {
        let Some(m) = a[0].as_atom() else { break };
        module = m;
        t = a[1].clone();
    }
    (t, module)
}
