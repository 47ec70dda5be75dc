use crate::term::Number;
use crate::tooling::write::{is_alnum, is_symbol_char};
use num_bigint::BigInt;
use num_traits::Num;
use std::fmt;

/// 1-based line and column plus byte offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SourceLocation {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    /// Unquoted or quoted name; the flag records quoting.
    Name(String, bool),
    Var(String),
    Int(Number),
    Float(f64),
    /// Double-quoted text, before the double_quotes flag is applied.
    Str(String),
    /// Back-quoted text.
    BackStr(String),
    /// `(` immediately after the previous token, as in `foo(`.
    OpenCt,
    Open,
    Close,
    OpenList,
    CloseList,
    OpenCurly,
    CloseCurly,
    Comma,
    Bar,
    End,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub loc: SourceLocation,
    /// Whether layout text preceded this token.
    pub layout_before: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LexError {
    pub message: String,
    pub loc: SourceLocation,
}

pub struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    /// Starts lexing at a location previously reported for `src`.
    pub fn at(src: &'a str, loc: SourceLocation) -> Self {
        Lexer { src, pos: loc.offset, line: loc.line, col: loc.column }
    }

    pub fn at_eof(&mut self) -> Result<bool, LexError> {
        self.skip_layout()?;
        Ok(self.pos >= self.src.len())
    }

    pub fn location(&self) -> SourceLocation {
        SourceLocation { line: self.line, column: self.col, offset: self.pos }
    }

    /// Drops one character; false at end of input.
    pub fn skip_char(&mut self) -> bool {
        self.bump().is_some()
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, LexError> {
        Err(LexError { message: message.into(), loc: self.location() })
    }

    /// Skips whitespace and comments; returns whether anything was skipped.
    fn skip_layout(&mut self) -> Result<bool, LexError> {
        let start = self.pos;
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let loc = self.location();
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => return Err(LexError { message: "unterminated block comment".into(), loc }),
                        }
                    }
                }
                _ => break,
            }
        }
        Ok(self.pos > start)
    }

    /// Next token, or `None` at end of input.
    pub fn next_token(&mut self) -> Result<Option<Token>, LexError> {
        let layout_before = self.skip_layout()? || self.pos == 0;
        let loc = self.location();
        let Some(c) = self.peek() else { return Ok(None) };
        let kind = match c {
            '(' => {
                self.bump();
                if layout_before {
                    TokenKind::Open
                } else {
                    TokenKind::OpenCt
                }
            }
            ')' => {
                self.bump();
                TokenKind::Close
            }
            '[' => {
                self.bump();
                TokenKind::OpenList
            }
            ']' => {
                self.bump();
                TokenKind::CloseList
            }
            '{' => {
                self.bump();
                TokenKind::OpenCurly
            }
            '}' => {
                self.bump();
                TokenKind::CloseCurly
            }
            ',' => {
                self.bump();
                TokenKind::Comma
            }
            '|' if self.peek_at(1) == Some('|') => {
                self.bump();
                self.bump();
                TokenKind::Name("||".into(), false)
            }
            '|' => {
                self.bump();
                TokenKind::Bar
            }
            '!' | ';' => {
                self.bump();
                TokenKind::Name(c.to_string(), false)
            }
            '\'' => TokenKind::Name(self.quoted('\'')?, true),
            '"' => TokenKind::Str(self.quoted('"')?),
            '`' => TokenKind::BackStr(self.quoted('`')?),
            '0'..='9' => self.number()?,
            '_' => TokenKind::Var(self.word()),
            c if c.is_uppercase() => TokenKind::Var(self.word()),
            c if c.is_alphabetic() => TokenKind::Name(self.word(), false),
            '.' if matches!(self.peek_at(1), None | Some('%')) || self.peek_at(1).is_some_and(char::is_whitespace) => {
                self.bump();
                TokenKind::End
            }
            c if is_symbol_char(c) => {
                let start = self.pos;
                while self.peek().is_some_and(is_symbol_char) {
                    self.bump();
                }
                TokenKind::Name(self.src[start..self.pos].to_string(), false)
            }
            c => return self.err(format!("unexpected character {c:?}")),
        };
        Ok(Some(Token { kind, loc, layout_before }))
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(is_alnum) {
            self.bump();
        }
        self.src[start..self.pos].to_string()
    }

    fn digits(&mut self, radix: u32) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_digit(radix) {
                s.push(c);
                self.bump();
            } else if c == '_' && self.peek_at(1).is_some_and(|d| d.is_digit(radix)) && !s.is_empty() {
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn number(&mut self) -> Result<TokenKind, LexError> {
        if self.peek() == Some('0') {
            match self.peek_at(1) {
                Some('\'') => {
                    self.bump();
                    self.bump();
                    return self.char_code();
                }
                Some(r @ ('x' | 'o' | 'b')) => {
                    let radix = match r {
                        'x' => 16,
                        'o' => 8,
                        _ => 2,
                    };
                    if self.peek_at(2).is_some_and(|d| d.is_digit(radix)) {
                        self.bump();
                        self.bump();
                        let ds = self.digits(radix);
                        return Ok(TokenKind::Int(parse_int(&ds, radix)));
                    }
                }
                _ => {}
            }
        }
        let int_part = self.digits(10);
        if self.peek() == Some('\'') && self.peek_at(1).is_some_and(char::is_alphanumeric) {
            // radix notation R'digits
            if let Ok(radix) = int_part.parse::<u32>() {
                if (2..=36).contains(&radix) && self.peek_at(1).is_some_and(|d| d.is_digit(radix)) {
                    self.bump();
                    let ds = self.digits(radix);
                    return Ok(TokenKind::Int(parse_int(&ds, radix)));
                }
            }
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
            self.bump();
            let frac = self.digits(10);
            let mut text = format!("{int_part}.{frac}");
            if matches!(self.peek(), Some('e' | 'E')) {
                let sign = self.peek_at(1);
                let has_sign = matches!(sign, Some('+' | '-'));
                let digit_at = if has_sign { 2 } else { 1 };
                if self.peek_at(digit_at).is_some_and(|d| d.is_ascii_digit()) {
                    self.bump();
                    text.push('e');
                    if has_sign {
                        text.push(self.bump().unwrap());
                    }
                    text.push_str(&self.digits(10));
                }
            }
            return match text.parse::<f64>() {
                Ok(f) => Ok(TokenKind::Float(f)),
                Err(_) => self.err("malformed float"),
            };
        }
        Ok(TokenKind::Int(parse_int(&int_part, 10)))
    }

    fn char_code(&mut self) -> Result<TokenKind, LexError> {
        let c = match self.peek() {
            Some('\\') => match self.escape()? {
                Some(c) => c,
                None => return self.err("invalid character code literal"),
            },
            Some('\'') if self.peek_at(1) == Some('\'') => {
                self.bump();
                self.bump();
                '\''
            }
            Some(c) => {
                self.bump();
                c
            }
            None => return self.err("unexpected end of input in character code"),
        };
        Ok(TokenKind::Int(Number::Int(c as i64)))
    }

    /// Reads an escape sequence after `\`; `None` for a line continuation.
    fn escape(&mut self) -> Result<Option<char>, LexError> {
        self.bump();
        let Some(c) = self.bump() else { return self.err("unterminated escape sequence") };
        let out = match c {
            'n' => '\n',
            't' => '\t',
            'r' => '\r',
            'a' => '\x07',
            'b' => '\x08',
            'f' => '\x0c',
            'v' => '\x0b',
            '0'..='7' => {
                let mut s = c.to_string();
                while self.peek().is_some_and(|d| d.is_digit(8)) {
                    s.push(self.bump().unwrap());
                }
                if self.peek() == Some('\\') {
                    self.bump();
                }
                return self.code_char(u32::from_str_radix(&s, 8).ok());
            }
            'x' => {
                let mut s = String::new();
                while self.peek().is_some_and(|d| d.is_ascii_hexdigit()) {
                    s.push(self.bump().unwrap());
                }
                if self.peek() == Some('\\') {
                    self.bump();
                }
                return self.code_char(u32::from_str_radix(&s, 16).ok());
            }
            '\n' => return Ok(None),
            '\\' | '\'' | '"' | '`' => c,
            'e' => '\x1b',
            's' => ' ',
            _ => return self.err(format!("undefined escape sequence \\{c}")),
        };
        Ok(Some(out))
    }

    fn code_char(&self, code: Option<u32>) -> Result<Option<char>, LexError> {
        match code.and_then(char::from_u32) {
            Some(c) => Ok(Some(c)),
            None => self.err("invalid character code in escape"),
        }
    }

    fn quoted(&mut self, q: char) -> Result<String, LexError> {
        let loc = self.location();
        self.bump();
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(LexError { message: "unterminated quoted text".into(), loc }),
                Some(c) if c == q => {
                    self.bump();
                    if self.peek() == Some(q) {
                        self.bump();
                        out.push(q);
                    } else {
                        return Ok(out);
                    }
                }
                Some('\\') => {
                    if let Some(c) = self.escape()? {
                        out.push(c);
                    }
                }
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }
}

fn parse_int(digits: &str, radix: u32) -> Number {
    match i64::from_str_radix(digits, radix) {
        Ok(n) => Number::Int(n),
        Err(_) => Number::from_big(BigInt::from_str_radix(digits, radix).expect("digits validated")),
    }
}

/// Tokenizes a whole text, for tests and tooling.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer::new(text);
    let mut out = Vec::new();
    while let Some(t) = lx.next_token()? {
        out.push(t);
    }
    Ok(out)
}
