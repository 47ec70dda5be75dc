//! A small markup reader: elements, attributes and text.
//!
//! Comments, doctype and processing instructions are skipped. Unclosed
//! elements are closed at the end of their parent; stray end tags are ignored.

#[derive(Clone, Debug, PartialEq)]
pub enum Markup {
    Element { tag: String, attrs: Vec<(String, String)>, children: Vec<Markup> },
    Text(String),
}

const VOID: [&str; 14] = ["area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"];

pub fn is_void(tag: &str) -> bool {
    VOID.contains(&tag)
}

pub fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        let end = rest.find(';').filter(|&e| e <= 10);
        let decoded = end.and_then(|e| {
            let name = &rest[1..e];
            let c = match name {
                "lt" => '<',
                "gt" => '>',
                "amp" => '&',
                "quot" => '"',
                "apos" => '\'',
                "nbsp" => '\u{a0}',
                _ if name.starts_with("#x") || name.starts_with("#X") => char::from_u32(u32::from_str_radix(&name[2..], 16).ok()?)?,
                _ if name.starts_with('#') => char::from_u32(name[1..].parse().ok()?)?,
                _ => return None,
            };
            Some((c, e + 1))
        });
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

pub fn escape_text(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn escape_attr(s: &str) -> String {
    escape_text(s).replace('"', "&quot;")
}

struct Open {
    tag: String,
    attrs: Vec<(String, String)>,
    children: Vec<Markup>,
}

/// Parses a fragment into a node list.
pub fn parse(src: &str) -> Vec<Markup> {
    let mut stack = vec![Open { tag: String::new(), attrs: Vec::new(), children: Vec::new() }];
    let mut rest = src;
    while !rest.is_empty() {
        let Some(lt) = rest.find('<') else {
            push_text(&mut stack, rest);
            break;
        };
        push_text(&mut stack, &rest[..lt]);
        rest = &rest[lt..];
        if let Some(r) = rest.strip_prefix("<!--") {
            rest = r.find("-->").map_or("", |e| &r[e + 3..]);
        } else if rest.starts_with("<!") || rest.starts_with("<?") {
            rest = rest.find('>').map_or("", |e| &rest[e + 1..]);
        } else if let Some(r) = rest.strip_prefix("</") {
            let end = r.find('>').unwrap_or(r.len());
            let tag = r[..end].trim().to_ascii_lowercase();
            rest = r.get(end + 1..).unwrap_or("");
            if let Some(pos) = stack.iter().rposition(|o| o.tag == tag) {
                if pos > 0 {
                    while stack.len() > pos {
                        close(&mut stack);
                    }
                }
            }
        } else if rest[1..].starts_with(|c: char| c.is_ascii_alphabetic()) {
            let (open, self_closing, after) = start_tag(&rest[1..]);
            rest = after;
            let void = is_void(&open.tag);
            stack.push(open);
            if self_closing || void {
                close(&mut stack);
            }
        } else {
            push_text(&mut stack, "<");
            rest = &rest[1..];
        }
    }
    while stack.len() > 1 {
        close(&mut stack);
    }
    stack.pop().map(|o| o.children).unwrap_or_default()
}

fn push_text(stack: &mut [Open], text: &str) {
    if text.is_empty() {
        return;
    }
    let text = decode_entities(text);
    let top = stack.last_mut().expect("document frame");
    if let Some(Markup::Text(prev)) = top.children.last_mut() {
        prev.push_str(&text);
    } else {
        top.children.push(Markup::Text(text));
    }
}

fn close(stack: &mut Vec<Open>) {
    let o = stack.pop().expect("open element");
    let el = Markup::Element { tag: o.tag, attrs: o.attrs, children: o.children };
    stack.last_mut().expect("document frame").children.push(el);
}

/// Reads `tag attr=... >` after the `<`.
fn start_tag(s: &str) -> (Open, bool, &str) {
    let name_end = s.find(|c: char| c.is_whitespace() || c == '>' || c == '/').unwrap_or(s.len());
    let tag = s[..name_end].to_ascii_lowercase();
    let mut rest = &s[name_end..];
    let mut attrs = Vec::new();
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            return (Open { tag, attrs, children: Vec::new() }, false, rest);
        }
        if let Some(r) = rest.strip_prefix("/>") {
            return (Open { tag, attrs, children: Vec::new() }, true, r);
        }
        if let Some(r) = rest.strip_prefix('>') {
            return (Open { tag, attrs, children: Vec::new() }, false, r);
        }
        if let Some(r) = rest.strip_prefix('/') {
            rest = r;
            continue;
        }
        let name_end = rest.find(|c: char| c.is_whitespace() || c == '=' || c == '>' || c == '/').unwrap_or(rest.len()).max(1);
        let name = rest[..name_end].to_ascii_lowercase();
        rest = rest[name_end..].trim_start();
        let mut value = String::new();
        if let Some(r) = rest.strip_prefix('=') {
            let r = r.trim_start();
            if let Some(q) = r.chars().next().filter(|c| *c == '"' || *c == '\'') {
                let body = &r[1..];
                let end = body.find(q).unwrap_or(body.len());
                value = decode_entities(&body[..end]);
                rest = body.get(end + 1..).unwrap_or("");
            } else {
                let end = r.find(|c: char| c.is_whitespace() || c == '>').unwrap_or(r.len());
                value = decode_entities(&r[..end]);
                rest = &r[end..];
            }
        }
        attrs.retain(|(n, _): &(String, String)| *n != name);
        attrs.push((name, value));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(tag: &str, attrs: &[(&str, &str)], children: Vec<Markup>) -> Markup {
        Markup::Element {
            tag: tag.into(),
            attrs: attrs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            children,
        }
    }

    #[test]
    fn nested_elements_and_attributes() {
        let got = parse("<div id=a class='x y'><span>hi &amp; bye</span><br><input value=3></div>");
        let want = vec![el(
            "div",
            &[("id", "a"), ("class", "x y")],
            vec![el("span", &[], vec![Markup::Text("hi & bye".into())]), el("br", &[], vec![]), el("input", &[("value", "3")], vec![])],
        )];
        assert_eq!(got, want);
    }

    #[test]
    fn unclosed_and_stray_tags() {
        let got = parse("<!DOCTYPE html><!-- c --><p>a</b><p>b");
        assert_eq!(got, vec![el("p", &[], vec![Markup::Text("a".into()), el("p", &[], vec![Markup::Text("b".into())])])]);
        assert_eq!(parse("1 < 2"), vec![Markup::Text("1 < 2".into())]);
    }
}
