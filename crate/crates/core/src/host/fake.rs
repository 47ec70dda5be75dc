//! An in-memory host with a JSON-described object graph.

use super::{Callee, HandleId, HostBridge, HostKind, HostValue, InvokeError, Settled};
use crate::engine::EventLoop;
use serde_json::Value;
use std::cell::RefCell;
use std::rc::Rc;
use std::time::Duration;

/// A scripted host function: `(host, this, args)`.
pub type Script = Rc<dyn Fn(&FakeHost, &HostValue, Vec<HostValue>) -> Result<HostValue, String>>;

enum Promise {
    Pending(Vec<Settled>),
    Done(Result<HostValue, String>),
}

enum Object {
    Record(Vec<(String, HostValue)>),
    Array(Vec<HostValue>),
    Function(String, Script),
    Promise(Promise),
}

#[derive(Default)]
struct Graph {
    objects: Vec<Option<Object>>,
    scripts: Vec<(String, Script)>,
}

/// Scriptable host for tests and headless runs.
///
/// The global object is a record. In the JSON description a value of the
/// form `{"$fn": "name"}` refers to a scripted function; `add`, `identity`,
/// `fail`, `delay` and `reject` are predefined.
#[derive(Clone)]
pub struct FakeHost(Rc<RefCell<Graph>>);

impl Default for FakeHost {
    fn default() -> Self {
        FakeHost::new()
    }
}

fn text(v: &HostValue) -> String {
    match v {
        HostValue::Undefined => "undefined".into(),
        HostValue::Null => "null".into(),
        HostValue::Bool(b) => b.to_string(),
        HostValue::Number(x) if x.fract() == 0.0 && x.abs() < 1e21 => format!("{}", *x as i64),
        HostValue::Number(x) => x.to_string(),
        HostValue::Str(s) => s.clone(),
        HostValue::Handle(_) => "[object Object]".into(),
    }
}

impl FakeHost {
    pub fn new() -> FakeHost {
        let host = FakeHost(Rc::new(RefCell::new(Graph::default())));
        host.alloc(Object::Record(Vec::new()));
        host.define("add", |_, _, args| {
            Ok(HostValue::Number(args.iter().map(|a| if let HostValue::Number(x) = a { *x } else { f64::NAN }).sum()))
        });
        host.define("identity", |_, _, args| Ok(args.into_iter().next().unwrap_or(HostValue::Undefined)));
        host.define("fail", |_, _, args| Err(args.first().map(text).unwrap_or_else(|| "failed".into())));
        host.define("delay", |host, _, args| {
            let ms = match args.first() {
                Some(HostValue::Number(x)) => *x,
                _ => 0.0,
            };
            let value = args.get(1).cloned().unwrap_or(HostValue::Undefined);
            Ok(host.promise_after(Duration::from_millis(ms.max(0.0) as u64), Ok(value)))
        });
        host.define("reject", |host, _, args| {
            let why = args.first().map(text).unwrap_or_else(|| "rejected".into());
            Ok(host.promise_after(Duration::ZERO, Err(why)))
        });
        host
    }

    /// A host whose global object holds the members of `global`.
    pub fn from_json(global: &Value) -> FakeHost {
        let host = FakeHost::new();
        if let Value::Object(map) = global {
            for (k, v) in map {
                let hv = host.from_value(v);
                host.set_global(k, hv);
            }
        }
        host
    }

    /// Registers a named scripted function usable from JSON descriptions.
    pub fn define(&self, name: &str, f: impl Fn(&FakeHost, &HostValue, Vec<HostValue>) -> Result<HostValue, String> + 'static) {
        let mut g = self.0.borrow_mut();
        g.scripts.retain(|(n, _)| n != name);
        g.scripts.push((name.to_string(), Rc::new(f)));
    }

    pub fn set_global(&self, name: &str, value: HostValue) {
        let mut g = self.0.borrow_mut();
        if let Some(Some(Object::Record(entries))) = g.objects.get_mut(0) {
            match entries.iter_mut().find(|(k, _)| k == name) {
                Some(slot) => slot.1 = value,
                None => entries.push((name.to_string(), value)),
            }
        }
    }

    /// A function value running a registered script.
    pub fn function(&self, name: &str) -> Option<HostValue> {
        let script = self.0.borrow().scripts.iter().find(|(n, _)| n == name).map(|(_, f)| f.clone())?;
        Some(self.alloc(Object::Function(name.to_string(), script)))
    }

    pub fn from_value(&self, v: &Value) -> HostValue {
        match v {
            Value::Null => HostValue::Null,
            Value::Bool(b) => HostValue::Bool(*b),
            Value::Number(n) => HostValue::Number(n.as_f64().unwrap_or(f64::NAN)),
            Value::String(s) => HostValue::Str(s.clone()),
            Value::Array(items) => {
                let vals = items.iter().map(|i| self.from_value(i)).collect();
                self.alloc(Object::Array(vals))
            }
            Value::Object(map) => {
                if let Some(Value::String(name)) = map.get("$fn") {
                    if map.len() == 1 {
                        if let Some(f) = self.function(name) {
                            return f;
                        }
                    }
                }
                let entries = map.iter().map(|(k, v)| (k.clone(), self.from_value(v))).collect();
                self.alloc(Object::Record(entries))
            }
        }
    }

    /// A promise settling with `result` after `delay` on the current event loop.
    pub fn promise_after(&self, delay: Duration, result: Result<HostValue, String>) -> HostValue {
        let v = self.alloc(Object::Promise(Promise::Pending(Vec::new())));
        let HostValue::Handle(id) = v else { unreachable!() };
        let host = self.clone();
        EventLoop::current().spawn_after(delay, move || host.settle(id, result));
        v
    }

    pub fn settle(&self, id: HandleId, result: Result<HostValue, String>) {
        let waiting = {
            let mut g = self.0.borrow_mut();
            match g.objects.get_mut(id as usize) {
                Some(Some(Object::Promise(p))) => match std::mem::replace(p, Promise::Done(result.clone())) {
                    Promise::Pending(w) => w,
                    Promise::Done(prev) => {
                        *p = Promise::Done(prev);
                        Vec::new()
                    }
                },
                _ => Vec::new(),
            }
        };
        for done in waiting {
            done(result.clone());
        }
    }

    /// Number of live objects, the global included.
    pub fn live_objects(&self) -> usize {
        self.0.borrow().objects.iter().filter(|o| o.is_some()).count()
    }

    fn alloc(&self, obj: Object) -> HostValue {
        let mut g = self.0.borrow_mut();
        g.objects.push(Some(obj));
        HostValue::Handle((g.objects.len() - 1) as HandleId)
    }

    fn with<R>(&self, id: HandleId, f: impl FnOnce(&Object) -> R) -> Option<R> {
        let g = self.0.borrow();
        g.objects.get(id as usize)?.as_ref().map(f)
    }

    fn builtin_method(&self, this: &HostValue, name: &str, args: &[HostValue]) -> Option<Result<HostValue, InvokeError>> {
        match this {
            HostValue::Str(s) => {
                let out = match name {
                    "concat" => {
                        let mut out = s.clone();
                        for a in args {
                            out.push_str(&text(a));
                        }
                        HostValue::Str(out)
                    }
                    "toUpperCase" => HostValue::Str(s.to_uppercase()),
                    "toLowerCase" => HostValue::Str(s.to_lowercase()),
                    "trim" => HostValue::Str(s.trim().to_string()),
                    "split" => {
                        let sep = args.first().map(text).unwrap_or_default();
                        let parts: Vec<HostValue> = if sep.is_empty() {
                            s.chars().map(|c| HostValue::Str(c.to_string())).collect()
                        } else {
                            s.split(sep.as_str()).map(|p| HostValue::Str(p.to_string())).collect()
                        };
                        self.make_array(parts)
                    }
                    _ => return None,
                };
                Some(Ok(out))
            }
            HostValue::Handle(h) => {
                let items = self.with(*h, |o| match o {
                    Object::Array(items) => Some(items.clone()),
                    _ => None,
                })??;
                let out = match name {
                    "concat" => {
                        let mut out = items;
                        for a in args {
                            match a {
                                HostValue::Handle(k) => match self.array_items(*k) {
                                    Some(more) => out.extend(more),
                                    None => out.push(a.clone()),
                                },
                                _ => out.push(a.clone()),
                            }
                        }
                        self.make_array(out)
                    }
                    "join" => {
                        let sep = args.first().map(text).unwrap_or_else(|| ",".into());
                        HostValue::Str(items.iter().map(text).collect::<Vec<_>>().join(&sep))
                    }
                    "push" => {
                        let mut g = self.0.borrow_mut();
                        let Some(Some(Object::Array(items))) = g.objects.get_mut(*h as usize) else { return None };
                        items.extend(args.iter().cloned());
                        HostValue::Number(items.len() as f64)
                    }
                    "reverse" => {
                        let mut rev = items;
                        rev.reverse();
                        self.make_array(rev)
                    }
                    _ => return None,
                };
                Some(Ok(out))
            }
            _ => None,
        }
    }

    fn call_function(&self, f: HandleId, this: &HostValue, args: Vec<HostValue>) -> Result<HostValue, InvokeError> {
        let script = self
            .with(f, |o| match o {
                Object::Function(_, s) => Some(s.clone()),
                _ => None,
            })
            .flatten()
            .ok_or(InvokeError::Missing)?;
        script(self, this, args).map_err(InvokeError::Thrown)
    }
}

impl HostBridge for FakeHost {
    fn global(&self) -> HandleId {
        0
    }

    fn classify(&self, h: HandleId) -> Option<HostKind> {
        self.with(h, |o| match o {
            Object::Record(_) => HostKind::Object,
            Object::Array(_) => HostKind::Array,
            Object::Function(..) => HostKind::Function,
            Object::Promise(_) => HostKind::Promise,
        })
    }

    fn get_property(&self, target: &HostValue, name: &str) -> Option<HostValue> {
        match target {
            HostValue::Str(s) if name == "length" => Some(HostValue::Number(s.chars().count() as f64)),
            HostValue::Handle(h) => self
                .with(*h, |o| match o {
                    Object::Record(entries) => entries.iter().find(|(k, _)| k == name).map(|(_, v)| v.clone()),
                    Object::Array(items) if name == "length" => Some(HostValue::Number(items.len() as f64)),
                    Object::Array(items) => name.parse::<usize>().ok().and_then(|i| items.get(i).cloned()),
                    Object::Function(n, _) if name == "name" => Some(HostValue::Str(n.clone())),
                    _ => None,
                })
                .flatten(),
            _ => None,
        }
    }

    fn invoke(&self, target: &HostValue, callee: &Callee, args: Vec<HostValue>) -> Result<HostValue, InvokeError> {
        match callee {
            Callee::Function(f) => self.call_function(*f, target, args),
            Callee::Member(name) => {
                if let Some(HostValue::Handle(f)) = self.get_property(target, name) {
                    if self.classify(f) == Some(HostKind::Function) {
                        return self.call_function(f, target, args);
                    }
                    return Err(InvokeError::Missing);
                }
                self.builtin_method(target, name, &args).unwrap_or(Err(InvokeError::Missing))
            }
        }
    }

    fn make_record(&self, entries: Vec<(String, HostValue)>) -> HostValue {
        self.alloc(Object::Record(entries))
    }

    fn make_array(&self, items: Vec<HostValue>) -> HostValue {
        self.alloc(Object::Array(items))
    }

    fn array_items(&self, h: HandleId) -> Option<Vec<HostValue>> {
        self.with(h, |o| match o {
            Object::Array(items) => Some(items.clone()),
            _ => None,
        })
        .flatten()
    }

    fn record_entries(&self, h: HandleId) -> Option<Vec<(String, HostValue)>> {
        self.with(h, |o| match o {
            Object::Record(entries) => Some(entries.clone()),
            _ => None,
        })
        .flatten()
    }

    fn on_settled(&self, h: HandleId, done: Settled) {
        let ready = {
            let mut g = self.0.borrow_mut();
            match g.objects.get_mut(h as usize) {
                Some(Some(Object::Promise(Promise::Pending(w)))) => {
                    w.push(done);
                    return;
                }
                Some(Some(Object::Promise(Promise::Done(r)))) => r.clone(),
                _ => Err("not a promise".to_string()),
            }
        };
        done(ready);
    }

    fn release(&self, h: HandleId) -> bool {
        if h == self.global() {
            return false;
        }
        let mut g = self.0.borrow_mut();
        match g.objects.get_mut(h as usize) {
            Some(slot @ Some(_)) => {
                *slot = None;
                true
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_graph_is_reachable_from_global() {
        let host = FakeHost::from_json(&json!({"o": {"x": 1, "z": {"w": [2, "a"]}}}));
        let o = host.get_property(&HostValue::Handle(0), "o").unwrap();
        assert_eq!(host.get_property(&o, "x"), Some(HostValue::Number(1.0)));
        let HostValue::Handle(z) = host.get_property(&o, "z").unwrap() else { panic!() };
        assert_eq!(host.classify(z), Some(HostKind::Object));
    }

    #[test]
    fn scripted_members_are_invoked() {
        let host = FakeHost::from_json(&json!({"a": {"add": {"$fn": "add"}}}));
        let a = host.get_property(&HostValue::Handle(0), "a").unwrap();
        let r = host.invoke(&a, &Callee::Member("add".into()), vec![HostValue::Number(1.0), HostValue::Number(2.0)]);
        assert_eq!(r, Ok(HostValue::Number(3.0)));
        assert_eq!(host.invoke(&a, &Callee::Member("nope".into()), vec![]), Err(InvokeError::Missing));
    }

    #[test]
    fn released_handles_disappear() {
        let host = FakeHost::new();
        let HostValue::Handle(h) = host.make_array(vec![]) else { panic!() };
        assert!(host.release(h));
        assert_eq!(host.classify(h), None);
        assert!(!host.release(h));
        assert!(!host.release(0));
    }
}
