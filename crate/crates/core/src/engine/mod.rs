//! Sessions, threads and the resolution loop.

pub mod consult;
pub mod deferred;
pub mod error;
pub mod event_loop;
pub mod kb;
pub mod point;
pub mod session;
pub mod thread;

pub use deferred::{answer_all, answer_deferred, answer_n, answer_stream, consult_deferred, consult_sync, query_deferred};
pub use error::{err, EngineError};
pub use event_loop::EventLoop;
pub use kb::{Clause, ClauseList, Control, KnowledgeBase, Module, Pred};
pub use point::{Frame, Goal, Point, PointKind};
pub use session::{create_session, Session, WeakSession, DEFAULT_MAX_INFERENCES};
pub use thread::{copy_fresh, Answer, Branch, Call, Continuation, Native, NativeResult, Outcome, Step, StepObserver, Thread, WeakThread};
