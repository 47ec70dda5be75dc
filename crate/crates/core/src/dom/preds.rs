//! The `dom` module.

use super::{event_of, event_term, node_of, node_term, DocumentHost, ListenerToken, NodeId, Position, Selector, VirtualDocument};
use crate::atom;
use crate::builtins::atoms::atomic_text;
use crate::builtins::reg;
use crate::engine::{copy_fresh, Answer, Branch, Call, Module, NativeResult, Outcome, Session, WeakSession};
use crate::term::{variant, Atom, Term};
use std::cell::{Cell, RefCell};
use std::collections::VecDeque;
use std::rc::Rc;

struct Subscription {
    node: NodeId,
    event: String,
    goal: Term,
    token: ListenerToken,
}

/// Document, event subscriptions and the queue of pending event goals.
pub(super) struct DomState {
    doc: RefCell<Rc<dyn DocumentHost>>,
    subs: RefCell<Vec<Subscription>>,
    queue: RefCell<VecDeque<(Term, Atom)>>,
    running: Cell<bool>,
}

impl DomState {
    pub(super) fn document(&self) -> Rc<dyn DocumentHost> {
        self.doc.borrow().clone()
    }

    pub(super) fn set_document(&self, doc: Rc<dyn DocumentHost>) {
        self.subs.borrow_mut().clear();
        *self.doc.borrow_mut() = doc;
    }
}

pub(super) fn state(session: &Session) -> Rc<DomState> {
    if let Some(s) = session.extension::<DomState>("dom") {
        return s;
    }
    let s = Rc::new(DomState {
        doc: RefCell::new(Rc::new(VirtualDocument::default())),
        subs: RefCell::new(Vec::new()),
        queue: RefCell::new(VecDeque::new()),
        running: Cell::new(false),
    });
    session.set_extension("dom", s.clone());
    s
}

fn doc(c: &Call<'_>) -> Rc<dyn DocumentHost> {
    state(c.session()).document()
}

fn node_arg(c: &Call<'_>, i: usize) -> Result<NodeId, Term> {
    let t = c.arg(i);
    if t.is_var() {
        return Err(c.inst());
    }
    node_of(t).filter(|&n| doc(c).is_element(n)).ok_or_else(|| c.type_err("dom_object", t))
}

/// A bound node argument, `None` for a variable.
fn opt_node_arg(c: &Call<'_>, i: usize) -> Result<Option<NodeId>, Term> {
    if c.arg(i).is_var() {
        Ok(None)
    } else {
        node_arg(c, i).map(Some)
    }
}

fn text_arg(c: &Call<'_>, i: usize) -> Result<String, Term> {
    let t = c.arg(i);
    if t.is_var() {
        return Err(c.inst());
    }
    atomic_text(t).ok_or_else(|| c.type_err("atomic", t))
}

fn each_node(c: &Call<'_>, target: &Term, nodes: Vec<NodeId>) -> Outcome {
    let d = doc(c);
    let branches = nodes.into_iter().filter_map(|n| c.unifier(target, &node_term(&d, n)).map(Branch::unify)).collect();
    Outcome::Branches(branches)
}

fn select(c: &mut Call<'_>, by: Selector) -> NativeResult {
    let key = text_arg(c, 0)?;
    let nodes = doc(c).query(by, &key);
    Ok(each_node(c, c.arg(1), nodes))
}

fn parent_of(c: &mut Call<'_>) -> NativeResult {
    let d = doc(c);
    match (opt_node_arg(c, 0)?, opt_node_arg(c, 1)?) {
        (Some(child), _) => match d.parent(child) {
            Some(p) => Ok(c.unify(c.arg(1), &node_term(&d, p))),
            None => Ok(Outcome::Fail),
        },
        (None, Some(parent)) => Ok(each_node(c, c.arg(0), d.children(parent))),
        (None, None) => Err(c.inst()),
    }
}

fn sibling(c: &mut Call<'_>) -> NativeResult {
    let d = doc(c);
    let (known, other) = match (opt_node_arg(c, 0)?, opt_node_arg(c, 1)?) {
        (Some(n), _) => (n, 1),
        (None, Some(n)) => (n, 0),
        (None, None) => return Err(c.inst()),
    };
    let Some(parent) = d.parent(known) else { return Ok(Outcome::Fail) };
    let kids = d.children(parent);
    let Some(i) = kids.iter().position(|&k| k == known) else { return Ok(Outcome::Fail) };
    let mut adjacent = Vec::new();
    if i > 0 {
        adjacent.push(kids[i - 1]);
    }
    if let Some(&next) = kids.get(i + 1) {
        adjacent.push(next);
    }
    Ok(each_node(c, c.arg(other), adjacent))
}

fn insert(c: &mut Call<'_>, child_at: usize, anchor_at: usize, at: Position) -> NativeResult {
    let anchor = node_arg(c, anchor_at)?;
    let child = node_arg(c, child_at)?;
    Ok(Outcome::from_bool(doc(c).insert(child, anchor, at)))
}

fn bind(c: &mut Call<'_>) -> NativeResult {
    let node = node_arg(c, 0)?;
    let event = c.atom_arg(1)?;
    let goal = c.callable_arg(3)?;
    let template = Term::pair("-", c.arg(2).clone(), goal.clone());
    let module = c.target_module();
    let session = c.session().downgrade();
    let t = template.clone();
    let listener = Rc::new(move |e: u64| fire(&session, &t, module, e));
    let token = doc(c).add_listener(node, event.as_str(), listener);
    state(c.session()).subs.borrow_mut().push(Subscription { node, event: event.as_str().to_string(), goal, token });
    Ok(Outcome::True)
}

/// Queues a copy of the subscription goal for event `e`.
fn fire(session: &WeakSession, template: &Term, module: Atom, e: u64) {
    let Some(s) = session.upgrade() else { return };
    let st = state(&s);
    let copy = copy_fresh(template, s.vars());
    let [var, goal] = copy.args() else { return };
    let ev = event_term(&st.document(), e);
    let goal = Term::pair(",", Term::pair("=", var.clone(), ev), goal.clone());
    st.queue.borrow_mut().push_back((goal, module));
    let weak = s.downgrade();
    s.event_loop().spawn(move || pump(&weak));
}

/// Runs queued event goals one at a time, each for its first answer.
fn pump(session: &WeakSession) {
    let Some(s) = session.upgrade() else { return };
    let st = state(&s);
    if st.running.get() {
        return;
    }
    let Some((goal, module)) = st.queue.borrow_mut().pop_front() else { return };
    st.running.set(true);
    let thread = s.thread();
    thread.set_goal_in(goal, Vec::new(), module);
    let weak = session.clone();
    let keep = thread.clone();
    thread.answer(move |answer| {
        drop(keep);
        let Some(s) = weak.upgrade() else { return };
        if let Answer::Error(ball) = &answer {
            s.write_output(&format!("Warning: uncaught exception in event goal: {}\n", crate::tooling::write::canonical(ball)));
        }
        state(&s).running.set(false);
        let w = weak.clone();
        s.event_loop().spawn(move || pump(&w));
    });
}

fn unbind(c: &mut Call<'_>) -> NativeResult {
    let node = node_arg(c, 0)?;
    let event = c.atom_arg(1)?;
    let goal = match c.args().len() {
        3 => Some(c.callable_arg(2)?),
        _ => None,
    };
    let d = doc(c);
    let st = state(c.session());
    st.subs.borrow_mut().retain(|s| {
        let hit = s.node == node && s.event == event.as_str() && goal.as_ref().is_none_or(|g| variant(g, &s.goal));
        if hit {
            d.remove_listener(s.token);
        }
        !hit
    });
    Ok(Outcome::True)
}

fn event_property(c: &mut Call<'_>) -> NativeResult {
    let Some(e) = event_of(c.arg(0)) else { return Ok(Outcome::Fail) };
    let name = c.atom_arg(1)?;
    let ev = event_term(&doc(c), e);
    match ev.as_host().and_then(|h| h.property(name.as_str())) {
        Some(v) => Ok(c.unify(c.arg(2), &v)),
        None => Ok(Outcome::Fail),
    }
}

pub fn module() -> Module {
    let mut m = Module::new(atom!("dom"));
    reg(&mut m, "get_by_id", 2, |c| select(c, Selector::Id));
    reg(&mut m, "get_by_class", 2, |c| select(c, Selector::Class));
    reg(&mut m, "get_by_tag", 2, |c| select(c, Selector::Tag));
    reg(&mut m, "parent_of", 2, parent_of);
    reg(&mut m, "sibling", 2, sibling);
    reg(&mut m, "create", 2, |c| {
        let tag = c.atom_arg(0)?;
        let d = doc(c);
        let n = d.create_element(tag.as_str());
        Ok(c.unify(c.arg(1), &node_term(&d, n)))
    });
    reg(&mut m, "append_child", 2, |c| insert(c, 1, 0, Position::Append));
    reg(&mut m, "insert_after", 2, |c| insert(c, 0, 1, Position::After));
    reg(&mut m, "insert_before", 2, |c| insert(c, 0, 1, Position::Before));
    reg(&mut m, "get_attr", 3, |c| {
        let n = node_arg(c, 0)?;
        let name = c.atom_arg(1)?;
        match doc(c).attribute(n, name.as_str()) {
            Some(v) => Ok(c.unify(c.arg(2), &Term::atom(v.as_str()))),
            None => Ok(Outcome::Fail),
        }
    });
    reg(&mut m, "set_attr", 3, |c| {
        let n = node_arg(c, 0)?;
        let name = c.atom_arg(1)?;
        let value = text_arg(c, 2)?;
        doc(c).set_attribute(n, name.as_str(), &value);
        Ok(Outcome::True)
    });
    reg(&mut m, "get_html", 2, |c| {
        let n = node_arg(c, 0)?;
        let html = doc(c).inner_html(n);
        Ok(c.unify(c.arg(1), &Term::atom(html.as_str())))
    });
    reg(&mut m, "set_html", 2, |c| {
        let n = node_arg(c, 0)?;
        let html = text_arg(c, 1)?;
        doc(c).set_inner_html(n, &html);
        Ok(Outcome::True)
    });
    reg(&mut m, "get_style", 3, |c| {
        let n = node_arg(c, 0)?;
        let key = c.atom_arg(1)?;
        match doc(c).style(n, key.as_str()) {
            Some(v) => Ok(c.unify(c.arg(2), &Term::atom(v.as_str()))),
            None => Ok(Outcome::Fail),
        }
    });
    reg(&mut m, "set_style", 3, |c| {
        let n = node_arg(c, 0)?;
        let key = c.atom_arg(1)?;
        let value = text_arg(c, 2)?;
        doc(c).set_style(n, key.as_str(), &value);
        Ok(Outcome::True)
    });
    reg(&mut m, "add_class", 2, |c| {
        let n = node_arg(c, 0)?;
        let class = c.atom_arg(1)?;
        doc(c).add_class(n, class.as_str());
        Ok(Outcome::True)
    });
    reg(&mut m, "remove_class", 2, |c| {
        let n = node_arg(c, 0)?;
        let class = c.atom_arg(1)?;
        doc(c).remove_class(n, class.as_str());
        Ok(Outcome::True)
    });
    reg(&mut m, "has_class", 2, |c| {
        let n = node_arg(c, 0)?;
        let class = c.atom_arg(1)?;
        Ok(Outcome::from_bool(doc(c).classes(n).iter().any(|k| k == class.as_str())))
    });
    reg(&mut m, "hide", 1, |c| {
        let n = node_arg(c, 0)?;
        doc(c).set_visible(n, false);
        Ok(Outcome::True)
    });
    reg(&mut m, "show", 1, |c| {
        let n = node_arg(c, 0)?;
        doc(c).set_visible(n, true);
        Ok(Outcome::True)
    });
    reg(&mut m, "toggle", 1, |c| {
        let n = node_arg(c, 0)?;
        let d = doc(c);
        d.set_visible(n, !d.visible(n));
        Ok(Outcome::True)
    });
    reg(&mut m, "bind", 4, bind);
    reg(&mut m, "unbind", 2, unbind);
    reg(&mut m, "unbind", 3, unbind);
    reg(&mut m, "event_property", 3, event_property);
    reg(&mut m, "prevent_default", 1, |c| {
        let t = c.arg(0);
        if t.is_var() {
            return Err(c.inst());
        }
        let Some(e) = event_of(t) else { return Err(c.type_err("event", t)) };
        doc(c).prevent_default(e);
        Ok(Outcome::True)
    });
    m.export_all();
    m
}
