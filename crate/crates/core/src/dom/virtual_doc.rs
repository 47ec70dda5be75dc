use super::markup::{self, escape_attr, escape_text, Markup};
use super::{DocumentHost, EventId, EventProp, Listener, ListenerToken, NodeId, Position, Selector};
use std::cell::RefCell;

const DOCUMENT: NodeId = 0;

#[derive(Clone, Debug, Default)]
struct Element {
    tag: String,
    attrs: Vec<(String, String)>,
    style: Vec<(String, String)>,
    classes: Vec<String>,
}

#[derive(Clone, Debug)]
enum Kind {
    Document,
    Element(Element),
    Text(String),
}

#[derive(Clone, Debug)]
struct Node {
    parent: Option<NodeId>,
    kind: Kind,
    children: Vec<NodeId>,
}

struct Event {
    kind: String,
    target: NodeId,
    props: Vec<(String, EventProp)>,
    prevented: bool,
}

#[derive(Default)]
struct Doc {
    nodes: Vec<Node>,
    listeners: Vec<(ListenerToken, NodeId, String, Listener)>,
    next_token: ListenerToken,
    events: Vec<Event>,
}

/// An in-memory document tree.
pub struct VirtualDocument(RefCell<Doc>);

impl Default for VirtualDocument {
    fn default() -> Self {
        VirtualDocument::from_markup("<html><head></head><body></body></html>")
    }
}

fn parse_style(s: &str) -> Vec<(String, String)> {
    s.split(';')
        .filter_map(|decl| {
            let (k, v) = decl.split_once(':')?;
            let k = k.trim();
            (!k.is_empty()).then(|| (k.to_string(), v.trim().to_string()))
        })
        .collect()
}

impl Doc {
    fn el(&self, n: NodeId) -> Option<&Element> {
        match &self.nodes.get(n as usize)?.kind {
            Kind::Element(e) => Some(e),
            _ => None,
        }
    }

    fn el_mut(&mut self, n: NodeId) -> Option<&mut Element> {
        match &mut self.nodes.get_mut(n as usize)?.kind {
            Kind::Element(e) => Some(e),
            _ => None,
        }
    }

    fn alloc(&mut self, kind: Kind) -> NodeId {
        self.nodes.push(Node { parent: None, kind, children: Vec::new() });
        (self.nodes.len() - 1) as NodeId
    }

    fn build(&mut self, m: &Markup, parent: NodeId) {
        let id = match m {
            Markup::Text(t) => self.alloc(Kind::Text(t.clone())),
            Markup::Element { tag, attrs, children } => {
                let mut el = Element { tag: tag.clone(), ..Element::default() };
                for (k, v) in attrs {
                    match k.as_str() {
                        "class" => el.classes = v.split_whitespace().map(str::to_string).collect(),
                        "style" => el.style = parse_style(v),
                        _ => el.attrs.push((k.clone(), v.clone())),
                    }
                }
                let id = self.alloc(Kind::Element(el));
                for c in children {
                    self.build(c, id);
                }
                id
            }
        };
        self.nodes[id as usize].parent = Some(parent);
        self.nodes[parent as usize].children.push(id);
    }

    fn attribute(&self, n: NodeId, name: &str) -> Option<String> {
        let el = self.el(n)?;
        match name {
            "class" if !el.classes.is_empty() => Some(el.classes.join(" ")),
            "style" if !el.style.is_empty() => Some(el.style.iter().map(|(k, v)| format!("{k}: {v};")).collect::<Vec<_>>().join(" ")),
            _ => el.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.clone()),
        }
    }

    fn write(&self, n: NodeId, out: &mut String) {
        match &self.nodes[n as usize].kind {
            Kind::Text(t) => out.push_str(&escape_text(t)),
            Kind::Document => self.write_children(n, out),
            Kind::Element(el) => {
                out.push('<');
                out.push_str(&el.tag);
                for name in ["class", "style"] {
                    if let Some(v) = self.attribute(n, name) {
                        out.push_str(&format!(" {name}=\"{}\"", escape_attr(&v)));
                    }
                }
                for (k, v) in &el.attrs {
                    out.push_str(&format!(" {k}=\"{}\"", escape_attr(v)));
                }
                out.push('>');
                if markup::is_void(&el.tag) && self.nodes[n as usize].children.is_empty() {
                    return;
                }
                self.write_children(n, out);
                out.push_str(&format!("</{}>", el.tag));
            }
        }
    }

    fn write_children(&self, n: NodeId, out: &mut String) {
        for &c in &self.nodes[n as usize].children {
            self.write(c, out);
        }
    }

    /// True if `a` is `b` or one of its ancestors.
    fn is_ancestor_or_self(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = Some(b);
        while let Some(n) = cur {
            if n == a {
                return true;
            }
            cur = self.nodes[n as usize].parent;
        }
        false
    }

    fn detach(&mut self, n: NodeId) {
        if let Some(p) = self.nodes[n as usize].parent.take() {
            self.nodes[p as usize].children.retain(|&c| c != n);
        }
    }
}

impl VirtualDocument {
    pub fn from_markup(src: &str) -> VirtualDocument {
        let mut doc = Doc::default();
        doc.alloc(Kind::Document);
        for m in markup::parse(src) {
            doc.build(&m, DOCUMENT);
        }
        VirtualDocument(RefCell::new(doc))
    }

    /// Serialized markup of the attached tree.
    pub fn markup(&self) -> String {
        let doc = self.0.borrow();
        let mut out = String::new();
        doc.write(DOCUMENT, &mut out);
        out
    }

    pub fn outer_html(&self, n: NodeId) -> String {
        let doc = self.0.borrow();
        let mut out = String::new();
        if (n as usize) < doc.nodes.len() {
            doc.write(n, &mut out);
        }
        out
    }

    /// Fires an event at `target`; listeners on the target and its ancestors
    /// are called in that order.
    pub fn dispatch(&self, target: NodeId, kind: &str, props: Vec<(String, EventProp)>) -> EventId {
        let (id, called) = {
            let mut doc = self.0.borrow_mut();
            doc.events.push(Event { kind: kind.to_string(), target, props, prevented: false });
            let id = (doc.events.len() - 1) as EventId;
            let mut path = Vec::new();
            let mut cur = Some(target);
            while let Some(n) = cur.filter(|&n| n != DOCUMENT && (n as usize) < doc.nodes.len()) {
                path.push(n);
                cur = doc.nodes[n as usize].parent;
            }
            let mut called = Vec::new();
            for n in path {
                called.extend(doc.listeners.iter().filter(|(_, node, k, _)| *node == n && k == kind).map(|(_, _, _, l)| l.clone()));
            }
            (id, called)
        };
        for l in called {
            l(id);
        }
        id
    }

    pub fn default_prevented(&self, e: EventId) -> bool {
        self.0.borrow().events.get(e as usize).is_some_and(|ev| ev.prevented)
    }

    pub fn listener_count(&self) -> usize {
        self.0.borrow().listeners.len()
    }

    /// Checks that parent and child links agree and the tree has no cycles.
    pub fn audit(&self) -> Result<(), String> {
        let doc = self.0.borrow();
        for (i, node) in doc.nodes.iter().enumerate() {
            let i = i as NodeId;
            if let Some(p) = node.parent {
                let count = doc.nodes[p as usize].children.iter().filter(|&&c| c == i).count();
                if count != 1 {
                    return Err(format!("node {i} appears {count} times under its parent {p}"));
                }
            }
            for &c in &node.children {
                if doc.nodes[c as usize].parent != Some(i) {
                    return Err(format!("child {c} of {i} points elsewhere"));
                }
            }
            let mut seen = 0;
            let mut cur = node.parent;
            while let Some(p) = cur {
                seen += 1;
                if p == i || seen > doc.nodes.len() {
                    return Err(format!("cycle through node {i}"));
                }
                cur = doc.nodes[p as usize].parent;
            }
        }
        Ok(())
    }
}

impl DocumentHost for VirtualDocument {
    fn query(&self, by: Selector, key: &str) -> Vec<NodeId> {
        let doc = self.0.borrow();
        let mut out = Vec::new();
        let mut stack = vec![DOCUMENT];
        while let Some(n) = stack.pop() {
            if let Some(el) = doc.el(n) {
                let hit = match by {
                    Selector::Tag => el.tag.eq_ignore_ascii_case(key),
                    Selector::Class => el.classes.iter().any(|c| c == key),
                    Selector::Id => el.attrs.iter().any(|(k, v)| k == "id" && v == key),
                };
                if hit {
                    out.push(n);
                }
            }
            stack.extend(doc.nodes[n as usize].children.iter().rev());
        }
        out
    }

    fn is_element(&self, n: NodeId) -> bool {
        self.0.borrow().el(n).is_some()
    }

    fn tag(&self, n: NodeId) -> Option<String> {
        self.0.borrow().el(n).map(|e| e.tag.clone())
    }

    fn parent(&self, n: NodeId) -> Option<NodeId> {
        let doc = self.0.borrow();
        doc.nodes.get(n as usize)?.parent.filter(|&p| p != DOCUMENT)
    }

    fn children(&self, n: NodeId) -> Vec<NodeId> {
        let doc = self.0.borrow();
        match doc.nodes.get(n as usize) {
            Some(node) if n != DOCUMENT => node.children.iter().copied().filter(|&c| doc.el(c).is_some()).collect(),
            _ => Vec::new(),
        }
    }

    fn create_element(&self, tag: &str) -> NodeId {
        self.0.borrow_mut().alloc(Kind::Element(Element { tag: tag.to_string(), ..Element::default() }))
    }

    fn insert(&self, child: NodeId, anchor: NodeId, at: Position) -> bool {
        let mut doc = self.0.borrow_mut();
        if doc.el(child).is_none() || doc.el(anchor).is_none() || doc.nodes[child as usize].parent.is_some() {
            return false;
        }
        let parent = match at {
            Position::Append => anchor,
            _ => match doc.nodes[anchor as usize].parent {
                Some(p) => p,
                None => return false,
            },
        };
        if doc.is_ancestor_or_self(child, parent) {
            return false;
        }
        let siblings = &mut doc.nodes[parent as usize].children;
        let index = match at {
            Position::Append => siblings.len(),
            Position::Before => siblings.iter().position(|&c| c == anchor).unwrap_or(0),
            Position::After => siblings.iter().position(|&c| c == anchor).map_or(siblings.len(), |i| i + 1),
        };
        siblings.insert(index, child);
        doc.nodes[child as usize].parent = Some(parent);
        true
    }

    fn attribute(&self, n: NodeId, name: &str) -> Option<String> {
        self.0.borrow().attribute(n, name)
    }

    fn set_attribute(&self, n: NodeId, name: &str, value: &str) {
        let mut doc = self.0.borrow_mut();
        let Some(el) = doc.el_mut(n) else { return };
        match name {
            "class" => el.classes = value.split_whitespace().map(str::to_string).collect(),
            "style" => el.style = parse_style(value),
            _ => match el.attrs.iter_mut().find(|(k, _)| k == name) {
                Some(slot) => slot.1 = value.to_string(),
                None => el.attrs.push((name.to_string(), value.to_string())),
            },
        }
    }

    fn style(&self, n: NodeId, key: &str) -> Option<String> {
        self.0.borrow().el(n)?.style.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
    }

    fn set_style(&self, n: NodeId, key: &str, value: &str) {
        let mut doc = self.0.borrow_mut();
        let Some(el) = doc.el_mut(n) else { return };
        if value.is_empty() {
            el.style.retain(|(k, _)| k != key);
            return;
        }
        match el.style.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value.to_string(),
            None => el.style.push((key.to_string(), value.to_string())),
        }
    }

    fn inner_html(&self, n: NodeId) -> String {
        let doc = self.0.borrow();
        let mut out = String::new();
        if doc.el(n).is_some() {
            doc.write_children(n, &mut out);
        }
        out
    }

    fn set_inner_html(&self, n: NodeId, src: &str) {
        let mut doc = self.0.borrow_mut();
        if doc.el(n).is_none() {
            return;
        }
        for c in doc.nodes[n as usize].children.clone() {
            doc.detach(c);
        }
        for m in markup::parse(src) {
            doc.build(&m, n);
        }
    }

    fn classes(&self, n: NodeId) -> Vec<String> {
        self.0.borrow().el(n).map(|e| e.classes.clone()).unwrap_or_default()
    }

    fn add_class(&self, n: NodeId, class: &str) {
        if let Some(el) = self.0.borrow_mut().el_mut(n) {
            if !el.classes.iter().any(|c| c == class) {
                el.classes.push(class.to_string());
            }
        }
    }

    fn remove_class(&self, n: NodeId, class: &str) {
        if let Some(el) = self.0.borrow_mut().el_mut(n) {
            el.classes.retain(|c| c != class);
        }
    }

    fn visible(&self, n: NodeId) -> bool {
        self.style(n, "display").as_deref() != Some("none")
    }

    fn set_visible(&self, n: NodeId, visible: bool) {
        self.set_style(n, "display", if visible { "" } else { "none" });
    }

    fn add_listener(&self, n: NodeId, event: &str, listener: Listener) -> ListenerToken {
        let mut doc = self.0.borrow_mut();
        doc.next_token += 1;
        let token = doc.next_token;
        doc.listeners.push((token, n, event.to_string(), listener));
        token
    }

    fn remove_listener(&self, token: ListenerToken) {
        self.0.borrow_mut().listeners.retain(|(t, ..)| *t != token);
    }

    fn event_property(&self, e: EventId, name: &str) -> Option<EventProp> {
        let doc = self.0.borrow();
        let ev = doc.events.get(e as usize)?;
        match name {
            "type" => Some(EventProp::Text(ev.kind.clone())),
            "target" => Some(EventProp::Node(ev.target)),
            "default_prevented" => Some(EventProp::Bool(ev.prevented)),
            _ => ev.props.iter().find(|(k, _)| k == name).map(|(_, v)| v.clone()),
        }
    }

    fn prevent_default(&self, e: EventId) {
        if let Some(ev) = self.0.borrow_mut().events.get_mut(e as usize) {
            ev.prevented = true;
        }
    }
}
