//! Operator-aware term rendering.

use crate::reader::ops::{OpType, OperatorTable};
use crate::term::{Term, Var};

/// Options mirroring the ISO `write_term/2` flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WriteOptions {
    pub quoted: bool,
    pub ignore_ops: bool,
    pub numbervars: bool,
    /// 0 means unlimited.
    pub max_depth: usize,
}

impl Default for WriteOptions {
    fn default() -> Self {
        WriteOptions { quoted: false, ignore_ops: false, numbervars: true, max_depth: 0 }
    }
}

impl WriteOptions {
    pub fn quoted() -> Self {
        WriteOptions { quoted: true, ..Self::default() }
    }
}

thread_local! {
    static ISO_TABLE: OperatorTable = OperatorTable::iso();
}

/// `writeq`-style text under the standard operator table.
pub fn canonical(t: &Term) -> String {
    ISO_TABLE.with(|ops| render_term(t, &WriteOptions::quoted(), ops))
}

/// `write`-style text under the standard operator table.
pub fn plain(t: &Term) -> String {
    ISO_TABLE.with(|ops| render_term(t, &WriteOptions::default(), ops))
}

pub fn render_term(t: &Term, opts: &WriteOptions, ops: &OperatorTable) -> String {
    let mut w = Writer { opts, ops, out: String::new() };
    w.term(t, 1200, 1);
    w.out
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~:.?@#&$".contains(c)
}

pub(crate) fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// True when `s` must be quoted to read back as the same atom.
pub fn atom_needs_quotes(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else { return true };
    match s {
        "[]" | "!" | ";" | "{}" => return false,
        "," | "|" | "." => return true,
        _ => {}
    }
    if first.is_lowercase() {
        return !s.chars().all(is_alnum);
    }
    if s.chars().all(is_symbol_char) {
        return s.starts_with("/*");
    }
    true
}

pub fn quote_atom(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => out.push_str(&format!("\\x{:x}\\", c as u32)),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

pub fn atom_text(s: &str, quoted: bool) -> String {
    if quoted && atom_needs_quotes(s) {
        quote_atom(s)
    } else {
        s.to_string()
    }
}

fn numbervar_name(n: i64) -> String {
    let letter = (b'A' + (n % 26) as u8) as char;
    if n >= 26 {
        format!("{letter}{}", n / 26)
    } else {
        letter.to_string()
    }
}

pub fn var_name(v: &Var) -> String {
    match v {
        Var::Named(a) => {
            let s = a.as_str();
            match s.strip_prefix("_#") {
                Some(n) => format!("_{n}"),
                None => s.to_string(),
            }
        }
        Var::Fresh(n) => format!("_G{n}"),
    }
}

struct Writer<'a> {
    opts: &'a WriteOptions,
    ops: &'a OperatorTable,
    out: String,
}

impl Writer<'_> {
    /// Appends a token, inserting a space where the two would fuse.
    fn tok(&mut self, s: &str) {
        if let (Some(prev), Some(next)) = (self.out.chars().next_back(), s.chars().next()) {
            let glue = (is_symbol_char(prev) && is_symbol_char(next))
                || (is_alnum(prev) && is_alnum(next))
                || (prev.is_ascii_digit() && next == '\'')
                || (prev == ',' && next == '|');
            if glue {
                self.out.push(' ');
            }
        }
        self.out.push_str(s);
    }

    fn atom(&mut self, s: &str) {
        let text = atom_text(s, self.opts.quoted);
        self.tok(&text);
    }

    fn too_deep(&self, depth: usize) -> bool {
        self.opts.max_depth > 0 && depth > self.opts.max_depth
    }

    fn term(&mut self, t: &Term, max: u16, depth: usize) {
        if self.too_deep(depth) {
            self.tok("...");
            return;
        }
        match t {
            Term::Var(v) => self.tok(&var_name(v)),
            Term::Num(n) => self.tok(&n.to_string()),
            Term::Host(h) => self.tok(&format!("host<{}>", h.kind())),
            Term::Compound(c) if c.arity() == 0 => {
                let name = c.name();
                let is_op = self.ops.is_op(name) && !self.opts.ignore_ops;
                if is_op && max < 1200 && max != 999 {
                    self.tok("(");
                    self.atom(name.as_str());
                    self.tok(")");
                } else {
                    self.atom(name.as_str());
                }
            }
            Term::Compound(c) => {
                let name = c.name();
                let args = c.args();
                if name.as_str() == "." && args.len() == 2 {
                    return self.list(t, depth);
                }
                if self.opts.numbervars && name.as_str() == "$VAR" && args.len() == 1 {
                    if let Some(n) = args[0].as_int().filter(|n| *n >= 0) {
                        return self.tok(&numbervar_name(n));
                    }
                }
                if !self.opts.ignore_ops {
                    if name.as_str() == "{}" && args.len() == 1 {
                        self.tok("{");
                        self.term(&args[0], 1200, depth + 1);
                        self.tok("}");
                        return;
                    }
                    if self.operator(name.as_str(), args, max, depth) {
                        return;
                    }
                }
                self.atom(name.as_str());
                self.out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        self.out.push(',');
                    }
                    self.term(a, 999, depth + 1);
                }
                self.out.push(')');
            }
        }
    }

    /// Writes `name(args)` in operator form if the table allows; false otherwise.
    fn operator(&mut self, name: &str, args: &[Term], max: u16, depth: usize) -> bool {
        let atom = crate::term::Atom::new(name);
        if args.len() == 2 && name != "|" {
            let Some(def) = self.ops.infix(atom) else { return false };
            let (lp, rp) = def.arg_priorities();
            let open = def.priority > max;
            if open {
                self.tok("(");
            }
            self.term(&args[0], lp, depth + 1);
            if name == "," {
                self.out.push(',');
            } else if name.chars().all(is_alnum) {
                self.out.push(' ');
                self.atom(name);
                self.out.push(' ');
            } else {
                self.atom(name);
            }
            self.term(&args[1], rp, depth + 1);
            if open {
                self.tok(")");
            }
            return true;
        }
        if args.len() == 1 {
            if let Some(def) = self.ops.prefix(atom) {
                let operand = &args[0];
                if (name == "-" || name == "+") && operand.is_number() {
                    return false;
                }
                let (_, rp) = def.arg_priorities();
                let open = def.priority > max;
                if open {
                    self.tok("(");
                }
                self.atom(name);
                let before = self.out.len();
                self.term(operand, rp, depth + 1);
                let text = self.out[before..].trim_start_matches(' ');
                let sign_digit = (name == "-" || name == "+") && text.starts_with(|c: char| c.is_ascii_digit());
                if text.starts_with('(') || sign_digit && !self.out[before..].starts_with(' ') {
                    self.out.insert(before, ' ');
                }
                if open {
                    self.tok(")");
                }
                return true;
            }
            if let Some(def) = self.ops.postfix(atom) {
                let (lp, _) = def.arg_priorities();
                let open = def.priority > max;
                if open {
                    self.tok("(");
                }
                self.term(&args[0], lp, depth + 1);
                self.atom(name);
                if open {
                    self.tok(")");
                }
                return true;
            }
        }
        false
    }

    fn list(&mut self, t: &Term, depth: usize) {
        self.tok("[");
        let mut cur = t;
        let mut first = true;
        let mut i = 0;
        while let Some((h, rest)) = cur.as_cons() {
            if !first {
                self.out.push(',');
            }
            first = false;
            if self.too_deep(depth + i) {
                self.tok("...");
                self.tok("]");
                return;
            }
            self.term(h, 999, depth + 1);
            cur = rest;
            i += 1;
        }
        if !cur.is_nil() {
            self.out.push('|');
            self.term(cur, 999, depth + 1);
        }
        self.out.push(']');
    }
}

/// Operator type of `name` for display by `current_op/3`.
pub fn op_type_name(t: OpType) -> &'static str {
    t.as_str()
}
