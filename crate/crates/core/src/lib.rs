//! An embeddable Prolog interpreter: terms and unification, a reader with a
//! user-extensible operator table, a suspendable resolution engine, builtin
//! libraries, a host-value bridge and document bindings.

pub mod builtins;
pub mod corpus;
pub mod dom;
pub mod engine;
pub mod host;
pub mod reader;
pub mod term;
pub mod tooling;

pub use dom::{DocumentHost, VirtualDocument};
pub use engine::{answer_all, answer_n, consult_sync, create_session, Answer, EngineError, Session, Thread};
pub use host::{FakeHost, HostBridge, HostValue};
pub use reader::{OperatorTable, SyntaxError};
pub use term::{Atom, Number, Substitution, Term, Var};
pub use tooling::{export_tree, format_answer, record_tree, DerivationTree, WriteOptions};
