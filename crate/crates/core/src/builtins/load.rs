//! Loading programs and modules, flags and operators.

use super::os::file_system;
use super::{reg, strip_module, DEFAULT_IMPORTS};
use crate::atom;
use crate::engine::{err, Call, Module, NativeResult, Outcome, Pred, Session};
use crate::reader::dcg::body_goal;
use crate::reader::OpType;
use crate::term::{Atom, PredicateIndicator, Term};
use rustc_hash::FxHashSet;
use std::cell::{Cell, RefCell};
use std::rc::Rc;

/// Per-session loading bookkeeping.
#[derive(Default)]
struct LoadState {
    loaded: RefCell<FxHashSet<String>>,
    declared: Cell<Option<Atom>>,
}

fn state(session: &Session) -> Rc<LoadState> {
    if let Some(s) = session.extension::<LoadState>("load") {
        return s;
    }
    let s = Rc::new(LoadState::default());
    session.set_extension("load", s.clone());
    s
}

pub fn install(m: &mut Module) {
    reg(m, "consult", 1, |c| load_files(c, Mode::Consult));
    reg(m, "ensure_loaded", 1, |c| load_files(c, Mode::Ensure));
    reg(m, "use_module", 1, |c| load_files(c, Mode::Import));
    reg(m, "use_module", 2, |c| load_files(c, Mode::Import));
    reg(m, "module", 2, module_directive);
    reg(m, "initialization", 1, |c| {
        let goal = c.callable_arg(0)?;
        c.session().initialization().borrow_mut().push(goal);
        Ok(Outcome::True)
    });
    reg(m, "set_prolog_flag", 2, set_flag);
    reg(m, "current_prolog_flag", 2, current_flag);
    reg(m, "op", 3, op);
    reg(m, "current_op", 3, current_op);
    reg(m, "$dcg_body", 4, |c| {
        let body = c.arg(0).clone();
        let session = c.session().clone();
        let (s0, s) = (c.arg(1).clone(), c.arg(2).clone());
        let goal = body_goal(&body, s0, s, &mut || Term::Var(session.vars().fresh()))
            .map_err(|ball| match ball.args_if("error", 2) {
                Some(a) => err::error(a[0].clone(), Term::compound("/", vec![Term::atom("phrase"), Term::int(3)])),
                None => ball,
            })?;
        Ok(c.unify(c.arg(3), &goal))
    });
    reg(m, "halt", 0, |c| halt(c, 0));
    reg(m, "halt", 1, |c| {
        let code = c.int_arg(0)?;
        halt(c, code as i32)
    });
}

/// Stops the session: the flag is set and a ball unwinds the derivation.
fn halt(c: &Call<'_>, code: i32) -> NativeResult {
    c.session().halt(code);
    Err(Term::compound("$halt", vec![Term::int(code as i64)]))
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Consult,
    Ensure,
    Import,
}

enum Source {
    Library(Atom),
    File(String),
}

fn source_of(c: &Call<'_>, t: &Term) -> Result<Source, Term> {
    if t.is_var() {
        return Err(c.inst());
    }
    if let Some(a) = t.args_if("library", 1) {
        return match a[0].as_atom() {
            Some(name) => Ok(Source::Library(name)),
            None if a[0].is_var() => Err(c.inst()),
            None => Err(c.domain_err("source_sink", t)),
        };
    }
    match super::atoms::atomic_text(t) {
        Some(path) if !t.is_nil() => Ok(Source::File(path)),
        _ => Err(c.domain_err("source_sink", t)),
    }
}

fn resolve_path(session: &Session, path: &str) -> Option<String> {
    let fs = file_system(session);
    if fs.exists(path) {
        return Some(path.to_string());
    }
    let with_ext = format!("{path}.pl");
    fs.exists(&with_ext).then_some(with_ext)
}

/// Directories from `file_search_path(library, Dir)` facts in `user`.
fn library_dirs(session: &Session) -> Vec<String> {
    let kb = session.kb();
    let pi = PredicateIndicator { name: atom!("file_search_path"), arity: 2 };
    let Some((_, Pred::Clauses(list))) = kb.resolve(atom!("user"), &pi) else { return Vec::new() };
    list.clauses
        .iter()
        .filter(|c| c.is_fact())
        .filter_map(|c| {
            let args = c.head.args();
            (args[0].as_atom() == Some(atom!("library"))).then(|| super::atoms::atomic_text(&args[1]))?
        })
        .collect()
}

fn import(session: &Session, into: Atom, module: Atom) {
    let mut kb = session.kb_mut();
    let m = kb.module_mut(into);
    if !m.imports.contains(&module) {
        m.imports.push(module);
    }
}

fn load_files(c: &mut Call<'_>, mode: Mode) -> NativeResult {
    let arg = c.arg(0).clone();
    let items = if arg.as_cons().is_some() { c.list_arg(0)? } else { vec![arg] };
    let mut files = Vec::new();
    let into = c.target_module();
    let session = c.session().clone();
    for item in &items {
        match source_of(c, item)? {
            Source::Library(name) => {
                if session.kb().module(name).is_some() {
                    import(&session, into, name);
                    continue;
                }
                let found = library_dirs(&session)
                    .iter()
                    .find_map(|dir| resolve_path(&session, &format!("{}/{}", dir.trim_end_matches('/'), name.as_str())))
                    .or_else(|| resolve_path(&session, name.as_str()));
                match found {
                    Some(p) => files.push(p),
                    None => return Err(err::existence("source_sink", item.clone(), c.pi())),
                }
            }
            Source::File(path) => match resolve_path(&session, &path) {
                Some(p) => files.push(p),
                None => return Err(err::existence("source_sink", item.clone(), c.pi())),
            },
        }
    }
    let ls = state(&session);
    if mode != Mode::Consult {
        files.retain(|f| !ls.loaded.borrow().contains(f));
    }
    if files.is_empty() {
        return Ok(Outcome::True);
    }
    let fs = file_system(&session);
    let mut texts = Vec::new();
    for f in &files {
        let text = fs.read(f).map_err(|e| err::existence("source_sink", Term::atom(f.as_str()), Term::atom(e.to_string().as_str())))?;
        texts.push((f.clone(), text));
    }
    let cont = c.continuation();
    let handle = c.handle();
    load_chain(session, ls, texts, into, Box::new(move |r| match r {
        Ok(()) => handle.resume(cont, None),
        Err(ball) => handle.resume_error(cont, ball),
    }));
    Ok(Outcome::Suspend)
}

type LoadDone = Box<dyn FnOnce(Result<(), Term>)>;

/// Consults files one after another, importing declared modules.
fn load_chain(session: Session, ls: Rc<LoadState>, mut texts: Vec<(String, String)>, into: Atom, done: LoadDone) {
    if texts.is_empty() {
        return done(Ok(()));
    }
    let (path, text) = texts.remove(0);
    ls.loaded.borrow_mut().insert(path);
    ls.declared.set(None);
    let s = session.clone();
    session.consult_into(into, &text, move |r| {
        if let Err(ball) = r {
            return done(Err(ball));
        }
        if let Some(m) = ls.declared.take() {
            import(&s, into, m);
        }
        load_chain(s, ls, texts, into, done)
    });
}

fn module_directive(c: &mut Call<'_>) -> NativeResult {
    let name = c.atom_arg(0)?;
    let exports = c.list_arg(1)?;
    let mut pis = Vec::new();
    for e in &exports {
        if e.args_if("op", 3).is_some() {
            continue;
        }
        let ok = e.args_if("/", 2).and_then(|a| Some(PredicateIndicator { name: a[0].as_atom()?, arity: usize::try_from(a[1].as_int()?).ok()? }));
        match ok {
            Some(pi) => pis.push(pi),
            None if e.is_var() => return Err(c.inst()),
            None => return Err(c.type_err("predicate_indicator", e)),
        }
    }
    let session = c.session().clone();
    {
        let mut kb = session.kb_mut();
        let m = kb.module_mut(name);
        m.exports = pis;
        if m.imports.is_empty() {
            m.imports = DEFAULT_IMPORTS.iter().map(|n| Atom::new(n)).collect();
        }
    }
    session.set_loading_module(name);
    state(&session).declared.set(Some(name));
    Ok(Outcome::True)
}

fn set_flag(c: &mut Call<'_>) -> NativeResult {
    let name = c.atom_arg(0)?;
    let value = c.arg(1);
    if value.is_var() {
        return Err(c.inst());
    }
    match c.session().set_flag(name.as_str(), value) {
        Ok(()) => Ok(Outcome::True),
        Err("modify") => Err(err::permission("modify", "flag", c.arg(0).clone(), c.pi())),
        Err(_) => Err(c.domain_err("flag_value", &Term::pair("+", c.arg(0).clone(), value.clone()))),
    }
}

fn current_flag(c: &mut Call<'_>) -> NativeResult {
    let name = c.arg(0).clone();
    if !name.is_var() && name.as_atom().is_none() {
        return Err(c.type_err("atom", &name));
    }
    let session = c.session().clone();
    let mut branches = Vec::new();
    for n in session.flag_names() {
        let Some(v) = session.flag(n.as_str()) else { continue };
        let pattern = Term::pair("-", name.clone(), c.arg(1).clone());
        if let Some(mgu) = c.unifier(&pattern, &Term::pair("-", Term::atom(n.as_str()), v)) {
            branches.push(crate::engine::Branch::unify(mgu));
        }
    }
    Ok(Outcome::Branches(branches))
}

fn op(c: &mut Call<'_>) -> NativeResult {
    let p = c.int_arg(0)?;
    if !(0..=1200).contains(&p) {
        return Err(c.domain_err("operator_priority", c.arg(0)));
    }
    let kind_atom = c.atom_arg(1)?;
    let Some(kind) = OpType::parse(kind_atom.as_str()) else {
        return Err(c.domain_err("operator_specifier", c.arg(1)));
    };
    let names_term = c.arg(2).clone();
    let names = if names_term.as_cons().is_some() { c.list_arg(2)? } else { vec![names_term] };
    let mut atoms = Vec::new();
    for n in &names {
        let (n, _) = strip_module(n, c.module);
        match n.as_atom() {
            Some(a) if a.as_str() == "," => return Err(err::permission("modify", "operator", n.clone(), c.pi())),
            Some(a) if a.as_str() == "|" && (p < 1001 && p != 0 || kind.class() != crate::reader::ops::OpClass::Infix) => {
                return Err(err::permission("create", "operator", n.clone(), c.pi()))
            }
            Some(a) => atoms.push(a),
            None if n.is_var() => return Err(c.inst()),
            None => return Err(c.type_err("atom", &n)),
        }
    }
    let mut ops = c.session().ops_mut();
    for a in atoms {
        ops.add(p as u16, kind, a);
    }
    Ok(Outcome::True)
}

fn current_op(c: &mut Call<'_>) -> NativeResult {
    let (p, t, n) = (c.arg(0).clone(), c.arg(1).clone(), c.arg(2).clone());
    if !p.is_var() && !p.as_int().is_some_and(|v| (0..=1200).contains(&v)) {
        return Err(c.domain_err("operator_priority", &p));
    }
    if !t.is_var() && t.as_atom().and_then(|a| OpType::parse(a.as_str())).is_none() {
        return Err(c.domain_err("operator_specifier", &t));
    }
    if !n.is_var() && n.as_atom().is_none() {
        return Err(c.type_err("atom", &n));
    }
    let pattern = Term::compound("op", vec![p, t, n]);
    let entries = c.session().ops().entries();
    let mut branches = Vec::new();
    for (prio, kind, name) in entries {
        let cand = Term::compound("op", vec![Term::int(prio as i64), Term::atom(kind.as_str()), Term::atom(name.as_str())]);
        if let Some(mgu) = c.unifier(&pattern, &cand) {
            branches.push(crate::engine::Branch::unify(mgu));
        }
    }
    Ok(Outcome::Branches(branches))
}
