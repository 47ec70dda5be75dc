//! Future-based wrappers over the callback interface, plus blocking helpers
//! that drive the event loop.

use super::error::EngineError;
use super::session::Session;
use super::thread::{Answer, Thread};
use crate::term::{Substitution, Term};
use futures::channel::oneshot;
use futures::stream::{self, Stream};
use std::future::Future;

pub fn consult_deferred(session: &Session, text: &str) -> impl Future<Output = Result<(), Term>> {
    let (tx, rx) = oneshot::channel();
    session.consult(text, move |r| {
        let _ = tx.send(r);
    });
    async move { rx.await.unwrap_or_else(|_| Err(Term::atom("cancelled"))) }
}

/// Installs the goal; the future settles once parsing has been reported.
pub fn query_deferred(thread: &Thread, text: &str) -> Result<impl Future<Output = Result<(), Term>>, EngineError> {
    let (tx, rx) = oneshot::channel();
    thread.query(text, move |r| {
        let _ = tx.send(r);
    })?;
    Ok(async move { rx.await.unwrap_or_else(|_| Err(Term::atom("cancelled"))) })
}

pub fn answer_deferred(thread: &Thread) -> impl Future<Output = Answer> {
    let (tx, rx) = oneshot::channel();
    thread.answer(move |a| {
        let _ = tx.send(a);
    });
    async move { rx.await.unwrap_or(Answer::Failure) }
}

/// Successive success substitutions. The stream ends on failure; an error or
/// exhausted limit is yielded once as `Err` and ends it.
pub fn answer_stream(thread: &Thread) -> impl Stream<Item = Result<Substitution, Answer>> {
    stream::unfold(Some(thread.clone()), |state| async move {
        let thread = state?;
        match answer_deferred(&thread).await {
            Answer::Success(s) => Some((Ok(s), Some(thread))),
            Answer::Failure => None,
            other => Some((Err(other), None)),
        }
    })
}

/// Consults `text`, running the event loop until loading finishes.
pub fn consult_sync(session: &Session, text: &str) -> Result<(), Term> {
    let fut = consult_deferred(session, text);
    session.event_loop().block_on(fut)
}

/// Runs `goal` on a fresh thread, collecting answers until failure. A
/// trailing error or limit answer is included.
pub fn answer_all(session: &Session, goal: &str) -> Vec<Answer> {
    let thread = session.thread();
    answer_n(&thread, goal, usize::MAX)
}

/// Like [`answer_all`] on a given thread, stopping after `max` answers.
pub fn answer_n(thread: &Thread, goal: &str, max: usize) -> Vec<Answer> {
    let session = thread.session();
    let lp = session.event_loop().clone();
    let Ok(parsed) = query_deferred(thread, goal) else {
        return vec![Answer::Error(Term::atom("busy"))];
    };
    if let Err(ball) = lp.block_on(parsed) {
        return vec![Answer::Error(ball)];
    }
    let mut out = Vec::new();
    while out.len() < max {
        let a = lp.block_on(answer_deferred(thread));
        match a {
            Answer::Failure => break,
            Answer::Success(_) => out.push(a),
            _ => {
                out.push(a);
                break;
            }
        }
    }
    out
}
