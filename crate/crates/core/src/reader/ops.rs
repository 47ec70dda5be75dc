use crate::term::Atom;
use rustc_hash::FxHashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OpType {
    Xfx,
    Xfy,
    Yfx,
    Fy,
    Fx,
    Xf,
    Yf,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OpClass {
    Prefix,
    Infix,
    Postfix,
}

impl OpType {
    pub fn class(self) -> OpClass {
        match self {
            OpType::Fy | OpType::Fx => OpClass::Prefix,
            OpType::Xf | OpType::Yf => OpClass::Postfix,
            _ => OpClass::Infix,
        }
    }

    pub fn parse(s: &str) -> Option<OpType> {
        Some(match s {
            "xfx" => OpType::Xfx,
            "xfy" => OpType::Xfy,
            "yfx" => OpType::Yfx,
            "fy" => OpType::Fy,
            "fx" => OpType::Fx,
            "xf" => OpType::Xf,
            "yf" => OpType::Yf,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OpType::Xfx => "xfx",
            OpType::Xfy => "xfy",
            OpType::Yfx => "yfx",
            OpType::Fy => "fy",
            OpType::Fx => "fx",
            OpType::Xf => "xf",
            OpType::Yf => "yf",
        }
    }
}

impl FromStr for OpType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "xfx" => OpType::Xfx,
            "xfy" => OpType::Xfy,
            "yfx" => OpType::Yfx,
            "fy" => OpType::Fy,
            "fx" => OpType::Fx,
            "xf" => OpType::Xf,
            "yf" => OpType::Yf,
            _ => return Err(()),
        })
    }
}

impl fmt::Display for OpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OpDef {
    pub priority: u16,
    pub kind: OpType,
}

impl OpDef {
    /// Maximum priorities of the left and right operands.
    pub fn arg_priorities(&self) -> (u16, u16) {
        let p = self.priority;
        match self.kind {
            OpType::Xfx => (p - 1, p - 1),
            OpType::Xfy => (p - 1, p),
            OpType::Yfx => (p, p - 1),
            OpType::Fy => (0, p),
            OpType::Fx => (0, p - 1),
            OpType::Xf => (p - 1, 0),
            OpType::Yf => (p, 0),
        }
    }
}

/// Prefix and infix/postfix operator definitions, keyed by atom.
#[derive(Clone, Default)]
pub struct OperatorTable {
    prefix: FxHashMap<Atom, OpDef>,
    infix: FxHashMap<Atom, OpDef>,
    postfix: FxHashMap<Atom, OpDef>,
}

const ISO_OPS: &[(u16, OpType, &[&str])] = &[
    (1200, OpType::Xfx, &[":-", "-->"]),
    (1200, OpType::Fx, &[":-", "?-"]),
    (1150, OpType::Fx, &["dynamic", "discontiguous", "initialization", "multifile", "module_transparent", "public"]),
    (1100, OpType::Xfy, &[";"]),
    (1100, OpType::Xfy, &["|"]),
    (1050, OpType::Xfy, &["->", "*->"]),
    (1000, OpType::Xfy, &[","]),
    (900, OpType::Fy, &["\\+"]),
    (
        700,
        OpType::Xfx,
        &["=", "\\=", "==", "\\==", "@<", "@>", "@=<", "@>=", "=..", "is", "=:=", "=\\=", "<", ">", "=<", ">="],
    ),
    (600, OpType::Xfy, &[":"]),
    (500, OpType::Yfx, &["+", "-", "/\\", "\\/", "xor"]),
    (400, OpType::Yfx, &["*", "/", "//", "rem", "mod", "div", "<<", ">>", "divmod"]),
    (200, OpType::Xfx, &["**"]),
    (200, OpType::Xfy, &["^"]),
    (200, OpType::Fy, &["-", "+", "\\"]),
    (1, OpType::Fx, &["$"]),
];

impl OperatorTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The standard operator set.
    pub fn iso() -> Self {
        let mut t = Self::empty();
        for (p, kind, names) in ISO_OPS {
            for n in *names {
                t.add(*p, *kind, Atom::new(n));
            }
        }
        t
    }

    /// Defines (or with priority 0, removes) an operator.
    pub fn add(&mut self, priority: u16, kind: OpType, name: Atom) {
        let map = match kind.class() {
            OpClass::Prefix => &mut self.prefix,
            OpClass::Infix => {
                self.postfix.remove(&name);
                &mut self.infix
            }
            OpClass::Postfix => {
                self.infix.remove(&name);
                &mut self.postfix
            }
        };
        if priority == 0 {
            map.remove(&name);
        } else {
            map.insert(name, OpDef { priority, kind });
        }
    }

    pub fn prefix(&self, name: Atom) -> Option<OpDef> {
        self.prefix.get(&name).copied()
    }

    pub fn infix(&self, name: Atom) -> Option<OpDef> {
        self.infix.get(&name).copied()
    }

    pub fn postfix(&self, name: Atom) -> Option<OpDef> {
        self.postfix.get(&name).copied()
    }

    pub fn is_op(&self, name: Atom) -> bool {
        self.prefix.contains_key(&name) || self.infix.contains_key(&name) || self.postfix.contains_key(&name)
    }

    /// Every definition as `(priority, type, name)`, sorted for stable output.
    pub fn entries(&self) -> Vec<(u16, OpType, Atom)> {
        let mut out: Vec<_> = [&self.prefix, &self.infix, &self.postfix]
            .into_iter()
            .flat_map(|m| m.iter().map(|(a, d)| (d.priority, d.kind, *a)))
            .collect();
        out.sort_by(|a, b| a.2.cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.as_str().cmp(b.1.as_str())));
        out
    }
}
