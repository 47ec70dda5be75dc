use super::lexer::{LexError, Lexer, SourceLocation, Token, TokenKind};
use super::ops::{OpType, OperatorTable};
use crate::atom;
use crate::term::{Atom, Number, Term, Var};
use std::collections::VecDeque;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DoubleQuotes {
    #[default]
    Codes,
    Chars,
    Atom,
}

impl DoubleQuotes {
    pub fn as_str(self) -> &'static str {
        match self {
            DoubleQuotes::Codes => "codes",
            DoubleQuotes::Chars => "chars",
            DoubleQuotes::Atom => "atom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "codes" => DoubleQuotes::Codes,
            "chars" => DoubleQuotes::Chars,
            "atom" => DoubleQuotes::Atom,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("syntax error at {loc}: {message}")]
pub struct SyntaxError {
    pub message: String,
    pub loc: SourceLocation,
}

impl SyntaxError {
    /// `error(syntax_error(Message), position(Line, Column))`.
    pub fn to_term(&self) -> Term {
        Term::compound(
            "error",
            vec![
                Term::compound("syntax_error", vec![Term::atom(self.message.as_str())]),
                Term::compound("position", vec![Term::int(self.loc.line as i64), Term::int(self.loc.column as i64)]),
            ],
        )
    }
}

impl From<LexError> for SyntaxError {
    fn from(e: LexError) -> Self {
        SyntaxError { message: e.message, loc: e.loc }
    }
}

/// A term read from source, with its variable names in order of appearance.
#[derive(Clone, Debug)]
pub struct ReadTerm {
    pub term: Term,
    pub var_names: Vec<(String, Var)>,
    pub singletons: Vec<String>,
    pub loc: SourceLocation,
}

pub struct Parser<'a> {
    lexer: Lexer<'a>,
    buf: VecDeque<Token>,
    last_loc: SourceLocation,
    var_names: Vec<(String, Var, usize)>,
    anon: usize,
}

impl fmt::Debug for Parser<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Parser").field("loc", &self.last_loc).finish()
    }
}

type PResult<T> = Result<T, SyntaxError>;

struct Ctx<'o> {
    ops: &'o OperatorTable,
    dq: DoubleQuotes,
}

fn is_reserved_var(name: &str) -> bool {
    name.strip_prefix("_G").is_some_and(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_digit()))
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> Self {
        Parser { lexer: Lexer::new(src), buf: VecDeque::new(), last_loc: SourceLocation::default(), var_names: Vec::new(), anon: 0 }
    }

    /// Resumes reading `src` at `loc`, as returned by [`Parser::position`].
    pub fn at(src: &'a str, loc: SourceLocation) -> Self {
        Parser { lexer: Lexer::at(src, loc), buf: VecDeque::new(), last_loc: loc, var_names: Vec::new(), anon: 0 }
    }

    /// Where the next unread token starts.
    pub fn position(&self) -> SourceLocation {
        match self.buf.front() {
            Some(t) => t.loc,
            None => self.lexer.location(),
        }
    }

    fn fill(&mut self, n: usize) -> PResult<()> {
        while self.buf.len() < n {
            match self.lexer.next_token()? {
                Some(t) => self.buf.push_back(t),
                None => break,
            }
        }
        Ok(())
    }

    fn peek(&mut self) -> PResult<Option<&Token>> {
        self.fill(1)?;
        Ok(self.buf.front())
    }

    fn peek_kind(&mut self) -> PResult<Option<TokenKind>> {
        Ok(self.peek()?.map(|t| t.kind.clone()))
    }

    fn peek2(&mut self) -> PResult<Option<&Token>> {
        self.fill(2)?;
        Ok(self.buf.get(1))
    }

    fn next(&mut self) -> PResult<Token> {
        self.fill(1)?;
        match self.buf.pop_front() {
            Some(t) => {
                self.last_loc = t.loc;
                Ok(t)
            }
            None => Err(SyntaxError { message: "unexpected end of input".into(), loc: self.lexer.location() }),
        }
    }

    fn error<T>(&self, loc: SourceLocation, message: impl Into<String>) -> PResult<T> {
        Err(SyntaxError { message: message.into(), loc })
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<()> {
        let t = self.next()?;
        if t.kind == kind {
            Ok(())
        } else {
            self.error(t.loc, format!("expected {what}"))
        }
    }

    /// Skips to just past the next end token, so reading can continue.
    pub fn recover(&mut self) {
        self.buf.retain(|_| false);
        loop {
            match self.lexer.next_token() {
                Ok(Some(Token { kind: TokenKind::End, .. })) | Ok(None) => return,
                Ok(Some(_)) => {}
                Err(_) => {
                    if !self.lexer.skip_char() {
                        return;
                    }
                }
            }
        }
    }

    /// Reads the next clause-level term; `None` at end of input.
    pub fn read_term(&mut self, ops: &OperatorTable, dq: DoubleQuotes) -> PResult<Option<ReadTerm>> {
        self.var_names.clear();
        if self.buf.is_empty() && self.lexer.at_eof()? {
            return Ok(None);
        }
        let loc = self.peek()?.map(|t| t.loc).unwrap_or_default();
        let ctx = Ctx { ops, dq };
        let (term, _) = self.parse(&ctx, 1200)?;
        let t = self.next()?;
        if t.kind != TokenKind::End {
            return self.error(t.loc, "operator expected");
        }
        let var_names = self.var_names.iter().map(|(n, v, _)| (n.clone(), *v)).collect();
        let singletons =
            self.var_names.iter().filter(|(n, _, c)| *c == 1 && !n.starts_with('_')).map(|(n, _, _)| n.clone()).collect();
        Ok(Some(ReadTerm { term, var_names, singletons, loc }))
    }

    fn var(&mut self, name: String, loc: SourceLocation) -> PResult<Term> {
        if name == "_" {
            self.anon += 1;
            return Ok(Term::Var(Var::named(&format!("_#{}", self.anon))));
        }
        if is_reserved_var(&name) {
            return self.error(loc, format!("variable name {name} is reserved"));
        }
        if let Some(entry) = self.var_names.iter_mut().find(|(n, _, _)| *n == name) {
            entry.2 += 1;
            return Ok(Term::Var(entry.1));
        }
        let v = Var::named(&name);
        self.var_names.push((name, v, 1));
        Ok(Term::Var(v))
    }

    fn parse(&mut self, ctx: &Ctx, max: u16) -> PResult<(Term, u16)> {
        let (mut left, mut left_prio) = self.primary(ctx, max)?;
        loop {
            let Some(tok) = self.peek()? else { break };
            let (name, loc) = match &tok.kind {
                TokenKind::Name(n, _) => (Atom::new(n), tok.loc),
                TokenKind::Comma => (atom!(","), tok.loc),
                TokenKind::Bar => (atom!("|"), tok.loc),
                _ => break,
            };
            if let Some(def) = ctx.ops.infix(name) {
                let (lp, rp) = def.arg_priorities();
                if def.priority <= max && left_prio <= lp {
                    self.next()?;
                    let (right, _) = self.parse(ctx, rp)?;
                    let functor = if name == atom!("|") { atom!(";") } else { name };
                    left = Term::compound(functor, vec![left, right]);
                    left_prio = def.priority;
                    continue;
                }
            }
            if let Some(def) = ctx.ops.postfix(name) {
                let (lp, _) = def.arg_priorities();
                if def.priority <= max && left_prio <= lp {
                    self.next()?;
                    left = Term::compound(name, vec![left]);
                    left_prio = def.priority;
                    continue;
                }
            }
            if ctx.ops.infix(name).is_none() && ctx.ops.postfix(name).is_none() && name != atom!(",") && name != atom!("|") {
                return self.error(loc, "operator expected");
            }
            break;
        }
        Ok((left, left_prio))
    }

    /// True if the upcoming token can begin a term operand.
    fn starts_term(&mut self, ctx: &Ctx) -> PResult<bool> {
        let Some(tok) = self.peek()? else { return Ok(false) };
        Ok(match &tok.kind {
            TokenKind::Name(n, _) => {
                let a = Atom::new(n);
                let is_infix = ctx.ops.infix(a).is_some() || ctx.ops.postfix(a).is_some();
                if !is_infix || ctx.ops.prefix(a).is_some() {
                    true
                } else {
                    matches!(self.peek2()?.map(|t| &t.kind), Some(TokenKind::OpenCt))
                }
            }
            TokenKind::Close | TokenKind::CloseList | TokenKind::CloseCurly | TokenKind::Comma | TokenKind::Bar | TokenKind::End => {
                false
            }
            _ => true,
        })
    }

    fn primary(&mut self, ctx: &Ctx, max: u16) -> PResult<(Term, u16)> {
        let tok = self.next()?;
        let loc = tok.loc;
        let term = match tok.kind {
            TokenKind::Int(n) => Term::Num(n),
            TokenKind::Float(f) => Term::float(f),
            TokenKind::Var(name) => self.var(name, loc)?,
            TokenKind::Str(s) => match ctx.dq {
                DoubleQuotes::Codes => Term::list(s.chars().map(|c| Term::int(c as i64)).collect::<Vec<_>>()),
                DoubleQuotes::Chars => Term::list(s.chars().map(|c| Term::atom(c.to_string().as_str())).collect::<Vec<_>>()),
                DoubleQuotes::Atom => Term::atom(s.as_str()),
            },
            TokenKind::BackStr(s) => Term::list(s.chars().map(|c| Term::int(c as i64)).collect::<Vec<_>>()),
            TokenKind::Open | TokenKind::OpenCt => {
                let (t, _) = self.parse(ctx, 1200)?;
                self.expect(TokenKind::Close, "`)`")?;
                t
            }
            TokenKind::OpenList => {
                if self.peek_kind()? == Some(TokenKind::CloseList) {
                    self.next()?;
                    return self.atom_or_compound(ctx, atom!("[]"), max);
                }
                let mut items = vec![self.parse(ctx, 999)?.0];
                loop {
                    let t = self.next()?;
                    match t.kind {
                        TokenKind::Comma => items.push(self.parse(ctx, 999)?.0),
                        TokenKind::Bar => {
                            let tail = self.parse(ctx, 999)?.0;
                            self.expect(TokenKind::CloseList, "`]`")?;
                            break Term::list_with_tail(items, tail);
                        }
                        TokenKind::CloseList => break Term::list(items),
                        _ => return self.error(t.loc, "expected `,`, `|` or `]` in list"),
                    }
                }
            }
            TokenKind::OpenCurly => {
                if self.peek_kind()? == Some(TokenKind::CloseCurly) {
                    self.next()?;
                    return self.atom_or_compound(ctx, atom!("{}"), max);
                }
                let (t, _) = self.parse(ctx, 1200)?;
                self.expect(TokenKind::CloseCurly, "`}`")?;
                Term::compound(atom!("{}"), vec![t])
            }
            TokenKind::Name(n, quoted) => {
                let name = Atom::new(&n);
                if n == "-" && !quoted {
                    let next = self.peek()?.cloned();
                    if let Some(Token { kind: TokenKind::Int(_) | TokenKind::Float(_), layout_before: false, .. }) = next {
                        let num = self.next()?;
                        let value = match num.kind {
                            TokenKind::Int(n) => negate(n),
                            TokenKind::Float(f) => Number::Float(-f),
                            _ => unreachable!(),
                        };
                        return Ok((Term::Num(value), 0));
                    }
                }
                return self.atom_or_compound(ctx, name, max);
            }
            TokenKind::Bar => return self.error(loc, "unexpected `|`"),
            TokenKind::Comma => return self.error(loc, "unexpected `,`"),
            TokenKind::End => return self.error(loc, "unexpected end of clause"),
            TokenKind::Close | TokenKind::CloseList | TokenKind::CloseCurly => {
                return self.error(loc, "unexpected closing bracket")
            }
        };
        Ok((term, 0))
    }

    fn atom_or_compound(&mut self, ctx: &Ctx, name: Atom, max: u16) -> PResult<(Term, u16)> {
        if self.peek_kind()? == Some(TokenKind::OpenCt) {
            self.next()?;
            let mut args = vec![self.parse(ctx, 999)?.0];
            loop {
                let t = self.next()?;
                match t.kind {
                    TokenKind::Comma => args.push(self.parse(ctx, 999)?.0),
                    TokenKind::Close => break,
                    _ => return self.error(t.loc, "expected `,` or `)` in arguments"),
                }
            }
            return Ok((Term::compound(name, args), 0));
        }
        if let Some(def) = ctx.ops.prefix(name) {
            if def.priority <= max && self.starts_term(ctx)? {
                let (_, rp) = def.arg_priorities();
                let (operand, _) = self.parse(ctx, rp)?;
                return Ok((Term::compound(name, vec![operand]), def.priority));
            }
        }
        Ok((Term::atom(name), 0))
    }
}

fn negate(n: Number) -> Number {
    match n {
        Number::Int(i) => match i.checked_neg() {
            Some(v) => Number::Int(v),
            None => Number::from_big(-num_bigint::BigInt::from(i)),
        },
        Number::Big(b) => Number::from_big(-(*b).clone()),
        Number::Float(f) => Number::Float(-f),
    }
}

/// Parses one term from `text` (a trailing `.` is optional).
pub fn parse_term(text: &str, ops: &OperatorTable) -> Result<Term, SyntaxError> {
    parse_term_with(text, ops, DoubleQuotes::Codes).map(|r| r.term)
}

pub fn parse_term_with(text: &str, ops: &OperatorTable, dq: DoubleQuotes) -> Result<ReadTerm, SyntaxError> {
    let trimmed = text.trim_end();
    let owned;
    let src = if ends_with_end_token(trimmed) {
        trimmed
    } else {
        owned = format!("{trimmed} .");
        &owned
    };
    let mut p = Parser::new(src);
    let r = p.read_term(ops, dq)?;
    let r = match r {
        Some(r) => r,
        None => return Err(SyntaxError { message: "empty input".into(), loc: SourceLocation { line: 1, column: 1, offset: 0 } }),
    };
    if let Some(t) = p.peek()? {
        let loc = t.loc;
        return Err(SyntaxError { message: "unexpected text after term".into(), loc });
    }
    Ok(r)
}

fn ends_with_end_token(s: &str) -> bool {
    let Some(body) = s.strip_suffix('.') else { return false };
    // `'.'`, `a..` and `0'.` are not end tokens
    let prev = body.chars().next_back();
    !matches!(prev, Some(c) if crate::tooling::write::is_symbol_char(c)) && !body.ends_with("0'") && !s.ends_with("'.'")
}

/// Op type from an atom, for `op/3`.
pub fn op_type_of(a: Atom) -> Option<OpType> {
    a.as_str().parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse_term(s, &OperatorTable::iso()).unwrap()
    }

    fn c(name: &str, args: Vec<Term>) -> Term {
        Term::compound(name, args)
    }

    #[test]
    fn priorities() {
        assert_eq!(p("1+2*3"), c("+", vec![Term::int(1), c("*", vec![Term::int(2), Term::int(3)])]));
        assert_eq!(p("1-2-3"), c("-", vec![c("-", vec![Term::int(1), Term::int(2)]), Term::int(3)]));
        assert_eq!(p("2^3^4"), c("^", vec![Term::int(2), c("^", vec![Term::int(3), Term::int(4)])]));
    }

    #[test]
    fn clause_structure() {
        let t = p("a:-b,c");
        assert_eq!(t, c(":-", vec![Term::atom("a"), c(",", vec![Term::atom("b"), Term::atom("c")])]));
    }

    #[test]
    fn curly_pattern() {
        let t = p("{x: 1, y: false}");
        let inner = c(",", vec![c(":", vec![Term::atom("x"), Term::int(1)]), c(":", vec![Term::atom("y"), Term::atom("false")])]);
        assert_eq!(t, c("{}", vec![inner]));
    }

    #[test]
    fn lists() {
        assert_eq!(p("[a,b|T]"), Term::list_with_tail(vec![Term::atom("a"), Term::atom("b")], Term::var("T")));
        assert_eq!(p("[]"), Term::nil());
        assert_eq!(p("\"ab\""), Term::list(vec![Term::int(97), Term::int(98)]));
    }

    #[test]
    fn negative_numbers() {
        assert_eq!(p("-1"), Term::int(-1));
        assert_eq!(p("- 1"), c("-", vec![Term::int(1)]));
        assert_eq!(p("a-1"), c("-", vec![Term::atom("a"), Term::int(1)]));
        assert_eq!(p("a - -1"), c("-", vec![Term::atom("a"), Term::int(-1)]));
        assert_eq!(p("-(1)"), c("-", vec![Term::int(1)]));
        assert_eq!(p("-a"), c("-", vec![Term::atom("a")]));
    }

    #[test]
    fn operators_as_atoms() {
        assert_eq!(p("f(+, -)"), c("f", vec![Term::atom("+"), Term::atom("-")]));
        assert_eq!(p("[-]"), Term::list(vec![Term::atom("-")]));
        assert_eq!(p("(-)=a"), c("=", vec![Term::atom("-"), Term::atom("a")]));
        assert_eq!(p("- (a,b)"), c("-", vec![c(",", vec![Term::atom("a"), Term::atom("b")])]));
        assert_eq!(p("\\+ -a"), c("\\+", vec![c("-", vec![Term::atom("a")])]));
        assert_eq!(p("- = a"), c("=", vec![Term::atom("-"), Term::atom("a")]));
    }

    #[test]
    fn bar_is_disjunction() {
        assert_eq!(p("(a | b)"), c(";", vec![Term::atom("a"), Term::atom("b")]));
    }

    #[test]
    fn dynamic_prefix() {
        assert_eq!(p(":- dynamic foo/1"), c(":-", vec![c("dynamic", vec![c("/", vec![Term::atom("foo"), Term::int(1)])])]));
    }

    #[test]
    fn variables_share_by_name() {
        let t = p("f(X, Y, X)");
        assert_eq!(t.args()[0], t.args()[2]);
        let t = p("f(_, _)");
        assert_ne!(t.args()[0], t.args()[1]);
    }

    #[test]
    fn reserved_names_rejected() {
        assert!(parse_term("f(_G12)", &OperatorTable::iso()).is_err());
        assert!(parse_term("f(_Gx)", &OperatorTable::iso()).is_ok());
    }

    #[test]
    fn errors_carry_location() {
        let e = parse_term("foo(", &OperatorTable::iso()).unwrap_err();
        assert_eq!(e.loc.line, 1);
        assert!(parse_term("X is .", &OperatorTable::iso()).is_err());
        assert!(parse_term("a b", &OperatorTable::iso()).is_err());
    }

    #[test]
    fn user_operators() {
        let mut ops = OperatorTable::iso();
        ops.add(700, OpType::Xfx, Atom::new("==="));
        assert_eq!(parse_term("a === b", &ops).unwrap(), c("===", vec![Term::atom("a"), Term::atom("b")]));
    }
}
