//! Document bindings over an abstract document, with an in-memory
//! implementation for headless runs.

pub mod markup;
mod preds;
mod virtual_doc;

pub use preds::module;
pub use virtual_doc::VirtualDocument;

use crate::engine::Session;
use crate::term::{HostObject, HostRef, Term};
use std::any::Any;
use std::rc::Rc;

pub type NodeId = u64;
pub type EventId = u64;
pub type ListenerToken = u64;
pub type Listener = Rc<dyn Fn(EventId)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Append,
    Before,
    After,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    Id,
    Class,
    Tag,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EventProp {
    Text(String),
    Number(f64),
    Bool(bool),
    Node(NodeId),
}

/// Operations the bindings need from a document.
pub trait DocumentHost {
    /// Matching elements in document order.
    fn query(&self, by: Selector, key: &str) -> Vec<NodeId>;

    fn is_element(&self, n: NodeId) -> bool;

    fn tag(&self, n: NodeId) -> Option<String>;

    fn parent(&self, n: NodeId) -> Option<NodeId>;

    /// Element children in order.
    fn children(&self, n: NodeId) -> Vec<NodeId>;

    fn create_element(&self, tag: &str) -> NodeId;

    /// Inserts a detached `child` relative to `anchor`; false (and no change)
    /// if `child` is attached or the result would not be a tree.
    fn insert(&self, child: NodeId, anchor: NodeId, at: Position) -> bool;

    fn attribute(&self, n: NodeId, name: &str) -> Option<String>;

    fn set_attribute(&self, n: NodeId, name: &str, value: &str);

    fn style(&self, n: NodeId, key: &str) -> Option<String>;

    fn set_style(&self, n: NodeId, key: &str, value: &str);

    fn inner_html(&self, n: NodeId) -> String;

    fn set_inner_html(&self, n: NodeId, markup: &str);

    fn classes(&self, n: NodeId) -> Vec<String>;

    fn add_class(&self, n: NodeId, class: &str);

    fn remove_class(&self, n: NodeId, class: &str);

    fn visible(&self, n: NodeId) -> bool;

    fn set_visible(&self, n: NodeId, visible: bool);

    fn add_listener(&self, n: NodeId, event: &str, listener: Listener) -> ListenerToken;

    fn remove_listener(&self, token: ListenerToken);

    fn event_property(&self, e: EventId, name: &str) -> Option<EventProp>;

    fn prevent_default(&self, e: EventId);
}

/// An element handle embedded in a term.
pub struct NodeTerm {
    doc: Rc<dyn DocumentHost>,
    id: NodeId,
}

impl HostObject for NodeTerm {
    fn identity(&self) -> (&'static str, u64) {
        ("dom", self.id)
    }

    fn kind(&self) -> String {
        self.doc.tag(self.id).unwrap_or_else(|| "node".into())
    }

    fn property(&self, name: &str) -> Option<Term> {
        match name {
            "tag" => self.doc.tag(self.id).map(|t| Term::atom(t.as_str())),
            _ => self.doc.attribute(self.id, name).map(|v| Term::atom(v.as_str())),
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// A host event, readable while its goal runs.
pub struct EventTerm {
    doc: Rc<dyn DocumentHost>,
    id: EventId,
}

impl HostObject for EventTerm {
    fn identity(&self) -> (&'static str, u64) {
        ("event", self.id)
    }

    fn kind(&self) -> String {
        "event".into()
    }

    fn property(&self, name: &str) -> Option<Term> {
        self.doc.event_property(self.id, name).map(|p| prop_term(&self.doc, p))
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub fn node_term(doc: &Rc<dyn DocumentHost>, id: NodeId) -> Term {
    Term::Host(HostRef::new(NodeTerm { doc: doc.clone(), id }))
}

pub fn event_term(doc: &Rc<dyn DocumentHost>, id: EventId) -> Term {
    Term::Host(HostRef::new(EventTerm { doc: doc.clone(), id }))
}

pub fn node_of(t: &Term) -> Option<NodeId> {
    t.as_host()?.downcast::<NodeTerm>().map(|n| n.id)
}

pub fn event_of(t: &Term) -> Option<EventId> {
    t.as_host()?.downcast::<EventTerm>().map(|e| e.id)
}

fn prop_term(doc: &Rc<dyn DocumentHost>, p: EventProp) -> Term {
    match p {
        EventProp::Text(s) => Term::atom(s.as_str()),
        EventProp::Number(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => Term::int(x as i64),
        EventProp::Number(x) => Term::float(x),
        EventProp::Bool(b) => Term::atom(if b { "true" } else { "false" }),
        EventProp::Node(n) => node_term(doc, n),
    }
}

/// Installs the document a session's `dom` predicates act on.
pub fn set_document(session: &Session, doc: Rc<dyn DocumentHost>) {
    preds::state(session).set_document(doc);
}

/// The session's document; an empty page until one is installed.
pub fn document(session: &Session) -> Rc<dyn DocumentHost> {
    preds::state(session).document()
}
