//! Control constructs, resolved directly by the engine.

use crate::engine::{Control, Module, Pred};
use crate::term::PredicateIndicator;

pub fn install(m: &mut Module) {
    let mut put = |name: &str, arity: usize, c: Control| {
        m.preds.insert(PredicateIndicator::new(name, arity), Pred::Control(c));
    };
    put("true", 0, Control::True);
    put("fail", 0, Control::Fail);
    put("false", 0, Control::Fail);
    put(",", 2, Control::Conj);
    put(";", 2, Control::Disj);
    put("->", 2, Control::IfThen);
    put("*->", 2, Control::SoftIf);
    put("\\+", 1, Control::Not);
    put("not", 1, Control::Not);
    put("!", 0, Control::Cut);
    for n in 0..8 {
        put("call", n + 1, Control::Call(n));
    }
    put("catch", 3, Control::Catch);
    put("throw", 1, Control::Throw);
    put("findall", 3, Control::Findall);
    put("findall", 4, Control::Findall4);
    put(":", 2, Control::Qualified);
}
