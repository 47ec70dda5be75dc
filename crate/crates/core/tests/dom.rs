use pebble_core::dom::{set_document, DocumentHost, EventProp, Selector, VirtualDocument};
use pebble_core::engine::{answer_all, consult_sync, Session};
use pebble_core::tooling::format_answer;
use std::rc::Rc;

const PAGE: &str = "<html><body><div class=\"item\">one</div><div class=\"item\">two</div><span id=\"output\"></span></body></html>";

fn session(markup: &str) -> (Session, Rc<VirtualDocument>) {
    let s = Session::new(1_000_000);
    let doc = Rc::new(VirtualDocument::from_markup(markup));
    set_document(&s, doc.clone());
    consult_sync(&s, "").unwrap();
    (s, doc)
}

fn answers(s: &Session, goal: &str) -> Vec<String> {
    answer_all(s, goal).iter().map(|a| format_answer(s, a)).collect()
}

fn first(s: &Session, goal: &str) -> String {
    answers(s, goal).into_iter().next().unwrap_or_else(|| "false.".into())
}

fn body(doc: &VirtualDocument) -> u64 {
    doc.query(Selector::Tag, "body")[0]
}

#[test]
fn selection() {
    let (s, _) = session(PAGE);
    assert_eq!(answers(&s, "get_by_id(output, N)"), ["N = host<span>"]);
    assert_eq!(first(&s, "findall(N, get_by_class(item, N), L), length(L, K)"), "L = [host<div>,host<div>], K = 2");
    assert_eq!(first(&s, "get_by_id(nope, _)"), "false.");
    assert_eq!(first(&s, "get_by_id(_, _)"), "uncaught exception: error(instantiation_error,get_by_id/2).");
}

#[test]
fn traversal() {
    let (s, _) = session(PAGE);
    assert_eq!(first(&s, "get_by_tag(body, B), findall(C, parent_of(C, B), L), length(L, K)"), "B = host<body>, L = [host<div>,host<div>,host<span>], K = 3");
    assert_eq!(first(&s, "get_by_id(output, O), findall(S, sibling(O, S), L)"), "O = host<span>, L = [host<div>]");
    assert_eq!(first(&s, "get_by_tag(html, H), parent_of(H, P)"), "false.");
    assert_eq!(first(&s, "parent_of(foo, P)"), "uncaught exception: error(type_error(dom_object,foo),parent_of/2).");
    assert_eq!(first(&s, "get_by_id(output, O), get_by_tag(body, B), parent_of(O, P), P == B"), "O = host<span>, B = host<body>, P = host<body>");
}

#[test]
fn building() {
    let (s, doc) = session(PAGE);
    assert_eq!(first(&s, "get_by_tag(body, B), create(div, D), append_child(B, D), append_child(B, D)"), "false.");
    let before = doc.markup();
    assert_eq!(first(&s, "get_by_id(output, O), get_by_tag(body, B), append_child(B, O)"), "false.");
    assert_eq!(doc.markup(), before);
    assert_eq!(
        first(&s, "get_by_id(output, O), create(p, D2), insert_before(D2, O), create(em, D3), insert_after(D3, O), get_by_tag(body, B), get_html(B, H)"),
        "O = host<span>, D2 = host<p>, D3 = host<em>, B = host<body>, H = <div class=\"item\">one</div><div class=\"item\">two</div><p></p><span id=\"output\"></span><em></em><div></div>"
    );
    assert_eq!(first(&s, "create(p, P), insert_before(P, P)"), "false.");
    doc.audit().unwrap();
}

#[test]
fn properties() {
    let (s, _) = session("<body><input id=radians></body>");
    assert_eq!(first(&s, "get_by_id(radians, Rad), set_attr(Rad, value, 3.14), get_attr(Rad, value, V)"), "Rad = host<input>, V = 3.14");
    assert_eq!(first(&s, "get_by_id(radians, R), set_html(R, k), get_html(R, H)"), "R = host<input>, H = k");
    assert_eq!(first(&s, "get_by_id(radians, N), add_class(N, c), has_class(N, c)"), "N = host<input>");
    assert_eq!(first(&s, "get_by_id(radians, N), remove_class(N, c), has_class(N, c)"), "false.");
    assert_eq!(first(&s, "get_by_id(radians, N), set_style(N, color, red), get_style(N, color, C)"), "N = host<input>, C = red");
    assert_eq!(first(&s, "get_by_id(radians, N), get_attr(N, missing, _)"), "false.");
    assert_eq!(first(&s, "get_by_id(radians, N), set_attr(N, value, _)"), "uncaught exception: error(instantiation_error,set_attr/3).");
}

#[test]
fn visibility() {
    let (s, _) = session(PAGE);
    assert_eq!(first(&s, "get_by_id(output, O), hide(O), get_style(O, display, D)"), "O = host<span>, D = none");
    assert_eq!(first(&s, "get_by_id(output, O), show(O), \\+ get_style(O, display, _)"), "O = host<span>");
    assert_eq!(first(&s, "get_by_id(output, O), toggle(O), toggle(O), \\+ get_style(O, display, _)"), "O = host<span>");
    assert_eq!(first(&s, "hide(x)"), "uncaught exception: error(type_error(dom_object,x),hide/1).");
}

fn key(doc: &VirtualDocument, s: &Session, k: &str) -> u64 {
    let e = doc.dispatch(body(doc), "keypress", vec![("key".into(), EventProp::Text(k.into()))]);
    s.event_loop().run_until_idle();
    e
}

#[test]
fn keypress_example() {
    let (s, doc) = session(PAGE);
    let program = "get_by_id(output, Output), get_by_tag(body, B), bind(B, keypress, Event, (event_property(Event, key, Key), set_html(Output, Key)))";
    assert!(answer_all(&s, program)[0].is_success());
    key(&doc, &s, "k");
    assert_eq!(first(&s, "get_by_id(output, O), get_html(O, H)"), "O = host<span>, H = k");
    key(&doc, &s, "j");
    assert_eq!(first(&s, "get_by_id(output, O), get_html(O, H)"), "O = host<span>, H = j");
    assert!(answer_all(&s, "get_by_tag(body, B), unbind(B, keypress)")[0].is_success());
    key(&doc, &s, "z");
    assert_eq!(first(&s, "get_by_id(output, O), get_html(O, H)"), "O = host<span>, H = j");
    assert_eq!(doc.listener_count(), 0);
}

#[test]
fn failing_goal_and_prevent_default() {
    let (s, doc) = session(PAGE);
    let before = doc.markup();
    assert!(answer_all(&s, "get_by_tag(body, B), bind(B, click, _, fail)")[0].is_success());
    let e = doc.dispatch(body(&doc), "click", vec![]);
    s.event_loop().run_until_idle();
    assert_eq!(doc.markup(), before);
    assert!(!doc.default_prevented(e));
    assert!(answer_all(&s, "get_by_tag(body, B), bind(B, submit, E, prevent_default(E))")[0].is_success());
    let e = doc.dispatch(body(&doc), "submit", vec![]);
    s.event_loop().run_until_idle();
    assert!(doc.default_prevented(e));
    assert_eq!(s.take_output(), "");
}

#[test]
fn unbind_by_goal_and_kb_changes_are_seen() {
    let (s, doc) = session(PAGE);
    consult_sync(&s, ":- dynamic(hits/1).\nhits(0).\nbump :- retract(hits(N)), M is N + 1, assertz(hits(M)).").unwrap();
    assert!(answer_all(&s, "get_by_tag(body, B), bind(B, click, _, bump), bind(B, click, _, (bump, bump))")[0].is_success());
    doc.dispatch(body(&doc), "click", vec![]);
    s.event_loop().run_until_idle();
    assert_eq!(first(&s, "hits(N)"), "N = 3");
    assert!(answer_all(&s, "get_by_tag(body, B), unbind(B, click, (bump, bump))")[0].is_success());
    doc.dispatch(body(&doc), "click", vec![]);
    s.event_loop().run_until_idle();
    assert_eq!(first(&s, "hits(N)"), "N = 4");
    assert_eq!(first(&s, "event_property(_, key, _)"), "false.");
}

#[test]
fn event_goals_run_in_arrival_order() {
    let (s, doc) = session(PAGE);
    consult_sync(&s, ":- dynamic(log/1).\nlog([]).\nnote(X) :- retract(log(L)), assertz(log([X|L])).").unwrap();
    assert!(answer_all(&s, "get_by_tag(body, B), bind(B, keypress, E, (event_property(E, key, K), note(start(K)), sleep(10), note(end(K))))")[0].is_success());
    doc.dispatch(body(&doc), "keypress", vec![("key".into(), EventProp::Text("a".into()))]);
    doc.dispatch(body(&doc), "keypress", vec![("key".into(), EventProp::Text("b".into()))]);
    s.event_loop().run_until_idle();
    assert_eq!(first(&s, "log(L)"), "L = [end(b),start(b),end(a),start(a)]");
}
