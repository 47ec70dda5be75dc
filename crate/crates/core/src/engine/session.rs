use super::event_loop::EventLoop;
use super::kb::{KnowledgeBase, Pred};
use super::thread::Thread;
use crate::atom;
use crate::reader::{DoubleQuotes, OperatorTable, Parser, SyntaxError};
use crate::term::{Atom, PredicateIndicator, Term, Var, VarGen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use std::any::Any;
use std::cell::{Cell, Ref, RefCell, RefMut};
use std::rc::Rc;

pub const DEFAULT_MAX_INFERENCES: u64 = 100_000;

type Sink = Box<dyn FnMut(&str)>;

pub struct SessionState {
    kb: RefCell<KnowledgeBase>,
    ops: RefCell<OperatorTable>,
    flags: RefCell<FxHashMap<Atom, Term>>,
    occurs_check: Cell<bool>,
    unknown_error: Cell<bool>,
    double_quotes: Cell<DoubleQuotes>,
    vars: VarGen,
    max_inferences: Cell<u64>,
    rng: RefCell<ChaCha8Rng>,
    event_loop: EventLoop,
    sink: RefCell<Option<Sink>>,
    captured: RefCell<String>,
    halted: Cell<Option<i32>>,
    loading_module: Cell<Atom>,
    pub(crate) initialization: RefCell<Vec<Term>>,
    extensions: RefCell<FxHashMap<&'static str, Rc<dyn Any>>>,
}

/// Shared state of all threads forked from one session: knowledge base,
/// operator table and flags.
#[derive(Clone)]
pub struct Session(Rc<SessionState>);

/// A session reference that does not keep it alive.
#[derive(Clone)]
pub struct WeakSession(std::rc::Weak<SessionState>);

impl WeakSession {
    pub fn upgrade(&self) -> Option<Session> {
        self.0.upgrade().map(Session)
    }
}

/// `create_session(max_inferences)`.
pub fn create_session(max_inferences: u64) -> Session {
    Session::new(max_inferences)
}

impl Session {
    pub fn new(max_inferences: u64) -> Session {
        let s = Session(Rc::new(SessionState {
            kb: RefCell::new(KnowledgeBase::default()),
            ops: RefCell::new(OperatorTable::iso()),
            flags: RefCell::new(FxHashMap::default()),
            occurs_check: Cell::new(false),
            unknown_error: Cell::new(true),
            double_quotes: Cell::new(DoubleQuotes::Codes),
            vars: VarGen::new(),
            max_inferences: Cell::new(max_inferences.max(1)),
            rng: RefCell::new(ChaCha8Rng::from_entropy()),
            event_loop: EventLoop::current(),
            sink: RefCell::new(None),
            captured: RefCell::new(String::new()),
            halted: Cell::new(None),
            loading_module: Cell::new(atom!("user")),
            initialization: RefCell::new(Vec::new()),
            extensions: RefCell::new(FxHashMap::default()),
        }));
        crate::builtins::install(&s);
        s
    }

    /// A fresh thread sharing this session's knowledge base.
    pub fn thread(&self) -> Thread {
        Thread::new(self)
    }

    pub fn downgrade(&self) -> WeakSession {
        WeakSession(Rc::downgrade(&self.0))
    }

    pub fn ptr_eq(&self, other: &Session) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    pub fn kb(&self) -> Ref<'_, KnowledgeBase> {
        self.0.kb.borrow()
    }

    pub fn kb_mut(&self) -> RefMut<'_, KnowledgeBase> {
        self.0.kb.borrow_mut()
    }

    pub fn resolve(&self, module: Atom, pi: &PredicateIndicator) -> Option<(Atom, Pred)> {
        self.0.kb.borrow().resolve(module, pi)
    }

    pub fn ops(&self) -> Ref<'_, OperatorTable> {
        self.0.ops.borrow()
    }

    pub fn ops_mut(&self) -> RefMut<'_, OperatorTable> {
        self.0.ops.borrow_mut()
    }

    pub fn vars(&self) -> &VarGen {
        &self.0.vars
    }

    pub fn event_loop(&self) -> &EventLoop {
        &self.0.event_loop
    }

    pub fn max_inferences(&self) -> u64 {
        self.0.max_inferences.get()
    }

    pub fn set_max_inferences(&self, n: u64) {
        self.0.max_inferences.set(n.max(1));
    }

    pub fn occurs_check(&self) -> bool {
        self.0.occurs_check.get()
    }

    pub fn unknown_is_error(&self) -> bool {
        self.0.unknown_error.get()
    }

    pub fn double_quotes(&self) -> DoubleQuotes {
        self.0.double_quotes.get()
    }

    /// Current value of a Prolog flag.
    pub fn flag(&self, name: &str) -> Option<Term> {
        Some(match name {
            "occurs_check" => Term::atom(if self.occurs_check() { "true" } else { "false" }),
            "unknown" => Term::atom(if self.unknown_is_error() { "error" } else { "fail" }),
            "double_quotes" => Term::atom(self.double_quotes().as_str()),
            "bounded" => Term::atom("false"),
            "max_integer" => Term::int(i64::MAX),
            "min_integer" => Term::int(i64::MIN),
            "max_inferences" => Term::int(self.max_inferences() as i64),
            _ => return self.0.flags.borrow().get(&Atom::new(name)).cloned(),
        })
    }

    pub fn flag_names(&self) -> Vec<Atom> {
        let mut names: Vec<Atom> = ["bounded", "double_quotes", "max_inferences", "max_integer", "min_integer", "occurs_check", "unknown"]
            .into_iter()
            .map(Atom::new)
            .collect();
        names.extend(self.0.flags.borrow().keys().copied());
        names
    }

    /// Sets a flag; `Err(domain)` names the expected domain on a bad value.
    pub fn set_flag(&self, name: &str, value: &Term) -> Result<(), &'static str> {
        let text = value.as_atom().map(|a| a.as_str());
        match name {
            "occurs_check" => match text {
                Some("true") => self.0.occurs_check.set(true),
                Some("false") => self.0.occurs_check.set(false),
                _ => return Err("flag_value"),
            },
            "unknown" => match text {
                Some("error") => self.0.unknown_error.set(true),
                Some("fail") => self.0.unknown_error.set(false),
                _ => return Err("flag_value"),
            },
            "double_quotes" => match text.and_then(DoubleQuotes::parse) {
                Some(dq) => self.0.double_quotes.set(dq),
                None => return Err("flag_value"),
            },
            "max_inferences" => match value.as_int().filter(|n| *n > 0) {
                Some(n) => self.set_max_inferences(n as u64),
                None => return Err("flag_value"),
            },
            "bounded" | "max_integer" | "min_integer" => return Err("modify"),
            _ => {
                self.0.flags.borrow_mut().insert(Atom::new(name), value.clone());
            }
        }
        Ok(())
    }

    pub fn seed(&self, seed: u64) {
        *self.0.rng.borrow_mut() = ChaCha8Rng::seed_from_u64(seed);
    }

    pub fn rng(&self) -> RefMut<'_, ChaCha8Rng> {
        self.0.rng.borrow_mut()
    }

    /// Routes output of write/1 and friends; without a sink it is captured.
    pub fn set_output(&self, sink: impl FnMut(&str) + 'static) {
        *self.0.sink.borrow_mut() = Some(Box::new(sink));
    }

    pub fn write_output(&self, text: &str) {
        match &mut *self.0.sink.borrow_mut() {
            Some(sink) => sink(text),
            None => self.0.captured.borrow_mut().push_str(text),
        }
    }

    /// Returns and clears captured output.
    pub fn take_output(&self) -> String {
        std::mem::take(&mut *self.0.captured.borrow_mut())
    }

    pub fn halt(&self, code: i32) {
        self.0.halted.set(Some(code));
    }

    pub fn halted(&self) -> Option<i32> {
        self.0.halted.get()
    }

    /// Goals queued by `initialization/1` during loading.
    pub(crate) fn initialization(&self) -> &RefCell<Vec<Term>> {
        &self.0.initialization
    }

    pub fn loading_module(&self) -> Atom {
        self.0.loading_module.get()
    }

    pub fn set_loading_module(&self, m: Atom) -> Atom {
        self.0.loading_module.replace(m)
    }

    /// Attaches an extension object (host bridge, document, file system).
    pub fn set_extension(&self, key: &'static str, value: Rc<dyn Any>) {
        self.0.extensions.borrow_mut().insert(key, value);
    }

    pub fn extension<T: 'static>(&self, key: &'static str) -> Option<Rc<T>> {
        let v = self.0.extensions.borrow().get(key).cloned()?;
        v.downcast::<T>().ok()
    }

    /// Reads one term with the session's operators and flags.
    pub fn parse_term(&self, text: &str) -> Result<crate::reader::ReadTerm, SyntaxError> {
        crate::reader::parse_term_with(text, &self.ops(), self.double_quotes())
    }

    /// Parses a goal, returning it with its reportable variables.
    pub fn parse_query(&self, text: &str) -> Result<(Term, Vec<Var>), SyntaxError> {
        let r = self.parse_term(text)?;
        let vars = r.var_names.iter().filter(|(n, _)| !n.starts_with('_')).map(|(_, v)| *v).collect();
        Ok((r.term, vars))
    }

    /// Splits source text into read terms without running anything.
    pub fn read_all(&self, text: &str) -> Result<Vec<crate::reader::ReadTerm>, SyntaxError> {
        let mut p = Parser::new(text);
        let mut out = Vec::new();
        while let Some(t) = p.read_term(&self.ops(), self.double_quotes())? {
            out.push(t);
        }
        Ok(out)
    }
}
