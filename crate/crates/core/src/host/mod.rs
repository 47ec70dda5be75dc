//! Bridge between terms and the values of an embedding host.
//!
//! The engine talks to the host only through [`HostBridge`]. Plain data is
//! converted both ways; everything else travels as an opaque handle wrapped
//! in a [`Term::Host`].

mod fake;
mod preds;

pub use fake::{FakeHost, Script};
pub use preds::module;

use crate::engine::Session;
use crate::term::{HostObject, HostRef, Number, Term};
use std::any::Any;
use std::cell::RefCell;
use std::rc::Rc;

pub type HandleId = u64;

/// A value on the host side of the bridge.
#[derive(Clone, Debug, PartialEq)]
pub enum HostValue {
    Undefined,
    Null,
    Bool(bool),
    Number(f64),
    Str(String),
    Handle(HandleId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HostKind {
    Object,
    Array,
    Function,
    Promise,
}

impl HostKind {
    pub fn as_str(self) -> &'static str {
        match self {
            HostKind::Object => "object",
            HostKind::Array => "array",
            HostKind::Function => "function",
            HostKind::Promise => "promise",
        }
    }
}

/// What `invoke` calls.
#[derive(Clone, Debug, PartialEq)]
pub enum Callee {
    Member(String),
    Function(HandleId),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum InvokeError {
    #[error("no callable member")]
    Missing,
    #[error("{0}")]
    Thrown(String),
}

pub type Settled = Box<dyn FnOnce(Result<HostValue, String>)>;

/// Operations an embedding provides.
pub trait HostBridge {
    fn global(&self) -> HandleId;

    /// `None` for released or unknown handles.
    fn classify(&self, h: HandleId) -> Option<HostKind>;

    fn get_property(&self, target: &HostValue, name: &str) -> Option<HostValue>;

    fn has_property(&self, target: &HostValue, name: &str) -> bool {
        self.get_property(target, name).is_some()
    }

    fn invoke(&self, target: &HostValue, callee: &Callee, args: Vec<HostValue>) -> Result<HostValue, InvokeError>;

    fn make_record(&self, entries: Vec<(String, HostValue)>) -> HostValue;

    fn make_array(&self, items: Vec<HostValue>) -> HostValue;

    fn array_items(&self, h: HandleId) -> Option<Vec<HostValue>>;

    fn record_entries(&self, h: HandleId) -> Option<Vec<(String, HostValue)>>;

    /// Runs `done` once the promise behind `h` settles.
    fn on_settled(&self, h: HandleId, done: Settled);

    /// Drops the registry's reference; later use behaves as a missing value.
    fn release(&self, h: HandleId) -> bool;
}

/// A host handle embedded in a term.
pub struct HostTerm {
    bridge: Rc<dyn HostBridge>,
    id: HandleId,
}

impl HostTerm {
    pub fn id(&self) -> HandleId {
        self.id
    }
}

impl HostObject for HostTerm {
    fn identity(&self) -> (&'static str, u64) {
        ("host", self.id)
    }

    fn kind(&self) -> String {
        self.bridge.classify(self.id).map_or("released", HostKind::as_str).to_string()
    }

    fn property(&self, name: &str) -> Option<Term> {
        let v = self.bridge.get_property(&HostValue::Handle(self.id), name)?;
        Some(to_term(&self.bridge, &v))
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub fn handle_term(bridge: &Rc<dyn HostBridge>, id: HandleId) -> Term {
    Term::Host(HostRef::new(HostTerm { bridge: bridge.clone(), id }))
}

/// Handle id of a host term created by this bridge layer.
pub fn handle_of(t: &Term) -> Option<HandleId> {
    t.as_host()?.downcast::<HostTerm>().map(HostTerm::id)
}

fn number_term(x: f64) -> Term {
    if x.fract() == 0.0 && x.abs() < 9_007_199_254_740_992.0 {
        Term::int(x as i64)
    } else {
        Term::Num(Number::Float(x))
    }
}

/// Host to term: arrays become lists, other objects stay handles.
pub fn to_term(bridge: &Rc<dyn HostBridge>, v: &HostValue) -> Term {
    match v {
        HostValue::Undefined | HostValue::Null => Term::atom("undefined"),
        HostValue::Bool(b) => Term::atom(if *b { "true" } else { "false" }),
        HostValue::Number(x) => number_term(*x),
        HostValue::Str(s) => Term::atom(s.as_str()),
        HostValue::Handle(h) => match bridge.classify(*h) {
            Some(HostKind::Array) => {
                let items = bridge.array_items(*h).unwrap_or_default();
                Term::list(items.iter().map(|i| to_term(bridge, i)).collect::<Vec<_>>())
            }
            _ => handle_term(bridge, *h),
        },
    }
}

#[derive(Debug, PartialEq)]
pub enum ConvertError {
    Unbound,
    Invalid(Term),
}

/// Term to host: lists become fresh arrays, `{k: v}` terms fresh records.
pub fn to_host(bridge: &Rc<dyn HostBridge>, t: &Term) -> Result<HostValue, ConvertError> {
    match t {
        Term::Var(_) => Err(ConvertError::Unbound),
        Term::Num(n) => Ok(HostValue::Number(n.to_f64())),
        Term::Host(_) => handle_of(t).map(HostValue::Handle).ok_or_else(|| ConvertError::Invalid(t.clone())),
        _ if t.is_nil() => Ok(bridge.make_array(Vec::new())),
        _ if t.as_cons().is_some() => {
            let (items, tail) = t.list_prefix();
            if tail.is_var() {
                return Err(ConvertError::Unbound);
            }
            if !tail.is_nil() {
                return Err(ConvertError::Invalid(t.clone()));
            }
            let vals = items.iter().map(|i| to_host(bridge, i)).collect::<Result<_, _>>()?;
            Ok(bridge.make_array(vals))
        }
        _ => {
            if let Some(a) = t.as_atom() {
                return Ok(match a.as_str() {
                    "true" => HostValue::Bool(true),
                    "false" => HostValue::Bool(false),
                    "undefined" => HostValue::Undefined,
                    "{}" => bridge.make_record(Vec::new()),
                    s => HostValue::Str(s.to_string()),
                });
            }
            match record_pairs(t) {
                Some(pairs) => {
                    let mut entries = Vec::with_capacity(pairs.len());
                    for (k, v) in pairs {
                        let Some(k) = k.as_atom() else {
                            return Err(if k.is_var() { ConvertError::Unbound } else { ConvertError::Invalid(t.clone()) });
                        };
                        entries.push((k.as_str().to_string(), to_host(bridge, &v)?));
                    }
                    Ok(bridge.make_record(entries))
                }
                None => Err(ConvertError::Invalid(t.clone())),
            }
        }
    }
}

/// `(key, value)` pairs of a `{k1: v1, ...}` term.
pub fn record_pairs(t: &Term) -> Option<Vec<(Term, Term)>> {
    let [body] = t.args_if("{}", 1)? else { return None };
    let mut out = Vec::new();
    let mut pointer = body;
    while let Some([first, rest]) = pointer.args_if(",", 2) {
        let [k, v] = first.args_if(":", 2)? else { return None };
        out.push((k.clone(), v.clone()));
        pointer = rest;
    }
    let [k, v] = pointer.args_if(":", 2)? else { return None };
    out.push((k.clone(), v.clone()));
    Some(out)
}

/// Builds `{k1: v1, ...}`, or the atom `{}` when empty.
pub fn record_term(pairs: Vec<(Term, Term)>) -> Term {
    let mut it = pairs.into_iter().rev().map(|(k, v)| Term::pair(":", k, v));
    let Some(last) = it.next() else { return Term::atom("{}") };
    let body = it.fold(last, |acc, p| Term::pair(",", p, acc));
    Term::compound("{}", vec![body])
}

struct BridgeSlot(RefCell<Rc<dyn HostBridge>>);

/// Installs the host a session talks to.
pub fn set_host(session: &Session, bridge: Rc<dyn HostBridge>) {
    match session.extension::<BridgeSlot>("host") {
        Some(slot) => *slot.0.borrow_mut() = bridge,
        None => session.set_extension("host", Rc::new(BridgeSlot(RefCell::new(bridge)))),
    }
}

/// The session's host; an empty fake host until one is installed.
pub fn host(session: &Session) -> Rc<dyn HostBridge> {
    if let Some(slot) = session.extension::<BridgeSlot>("host") {
        return slot.0.borrow().clone();
    }
    let bridge: Rc<dyn HostBridge> = Rc::new(FakeHost::new());
    set_host(session, bridge.clone());
    bridge
}
