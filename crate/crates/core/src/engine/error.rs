use crate::reader::SyntaxError;
use crate::term::Term;

/// Errors reported to the embedding program rather than to Prolog code.
#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("thread is busy answering a previous query")]
    Busy,
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("cannot read {path}: {message}")]
    Source { path: String, message: String },
}

/// Builders for ISO `error(Formal, Context)` balls.
pub mod err {
    use crate::term::Term;

    pub fn error(formal: Term, context: Term) -> Term {
        Term::compound("error", vec![formal, context])
    }

    pub fn instantiation(ctx: Term) -> Term {
        error(Term::atom("instantiation_error"), ctx)
    }

    pub fn type_error(kind: &str, culprit: Term, ctx: Term) -> Term {
        error(Term::compound("type_error", vec![Term::atom(kind), culprit]), ctx)
    }

    pub fn domain_error(domain: &str, culprit: Term, ctx: Term) -> Term {
        error(Term::compound("domain_error", vec![Term::atom(domain), culprit]), ctx)
    }

    pub fn existence(kind: &str, culprit: Term, ctx: Term) -> Term {
        error(Term::compound("existence_error", vec![Term::atom(kind), culprit]), ctx)
    }

    pub fn permission(action: &str, kind: &str, culprit: Term, ctx: Term) -> Term {
        error(Term::compound("permission_error", vec![Term::atom(action), Term::atom(kind), culprit]), ctx)
    }

    pub fn representation(what: &str, ctx: Term) -> Term {
        error(Term::compound("representation_error", vec![Term::atom(what)]), ctx)
    }

    pub fn evaluation(what: &str, ctx: Term) -> Term {
        error(Term::compound("evaluation_error", vec![Term::atom(what)]), ctx)
    }

    pub fn resource_error(what: &str, ctx: Term) -> Term {
        error(Term::compound("resource_error", vec![Term::atom(what)]), ctx)
    }

    pub fn system_error(description: &str, ctx: Term) -> Term {
        error(Term::compound("system_error", vec![Term::atom(description)]), ctx)
    }
}

/// True when `ball` is `error(Formal, _)` with a formal of the given name.
pub fn is_error_of(ball: &Term, formal: &str) -> bool {
    ball.args_if("error", 2).and_then(|a| a[0].name()).is_some_and(|n| n.as_str() == formal)
}
