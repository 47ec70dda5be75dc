use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

struct AtomText {
    text: Box<str>,
}

/// An interned symbol. Equality and hashing are by identity.
#[derive(Clone, Copy)]
pub struct Atom(&'static AtomText);

fn table() -> &'static Mutex<HashMap<&'static str, &'static AtomText>> {
    static TABLE: OnceLock<Mutex<HashMap<&'static str, &'static AtomText>>> = OnceLock::new();
    TABLE.get_or_init(Default::default)
}

impl Atom {
    pub fn new(text: &str) -> Atom {
        let mut table = table().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(found) = table.get(text) {
            return Atom(found);
        }
        let entry: &'static AtomText = Box::leak(Box::new(AtomText { text: text.into() }));
        table.insert(&entry.text, entry);
        Atom(entry)
    }

    pub fn as_str(&self) -> &'static str {
        &self.0.text
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Atom) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Atom {}

impl Hash for Atom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0 as *const AtomText as usize).hash(state)
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Atom) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Atom) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            self.as_str().cmp(other.as_str())
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Atom {
        Atom::new(s)
    }
}

impl From<&String> for Atom {
    fn from(s: &String) -> Atom {
        Atom::new(s)
    }
}

impl From<String> for Atom {
    fn from(s: String) -> Atom {
        Atom::new(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_by_text() {
        assert_eq!(Atom::new("foo"), Atom::new("foo"));
        assert_ne!(Atom::new("foo"), Atom::new("bar"));
        assert!(Atom::new("abc") < Atom::new("abd"));
    }
}
