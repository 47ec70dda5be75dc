use super::Term;
use std::any::Any;
use std::fmt;
use std::rc::Rc;

/// Extension hook for host-owned values embedded in terms.
///
/// Two host values are the same term iff their identities match. Property
/// lookup drives unification against `{name: Value, ...}` patterns; the
/// returned term must already be converted into Prolog form.
pub trait HostObject {
    /// `(domain, id)`; the domain separates independent handle spaces.
    fn identity(&self) -> (&'static str, u64);

    /// Short description used when rendering, e.g. `object`.
    fn kind(&self) -> String;

    fn property(&self, name: &str) -> Option<Term>;

    fn as_any(&self) -> &dyn Any;
}

#[derive(Clone)]
pub struct HostRef(Rc<dyn HostObject>);

impl HostRef {
    pub fn new(obj: impl HostObject + 'static) -> HostRef {
        HostRef(Rc::new(obj))
    }

    pub fn identity(&self) -> (&'static str, u64) {
        self.0.identity()
    }

    pub fn same_as(&self, other: &HostRef) -> bool {
        self.identity() == other.identity()
    }

    pub fn kind(&self) -> String {
        self.0.kind()
    }

    pub fn property(&self, name: &str) -> Option<Term> {
        self.0.property(name)
    }

    pub fn downcast<T: 'static>(&self) -> Option<&T> {
        self.0.as_any().downcast_ref()
    }
}

impl fmt::Debug for HostRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (domain, id) = self.identity();
        write!(f, "host<{}>#{domain}:{id}", self.kind())
    }
}
