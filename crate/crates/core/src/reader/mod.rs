//! Tokenizer, operator-precedence parser and program reading.

pub mod compile;
pub mod dcg;
pub mod lexer;
pub mod ops;
pub mod parser;

pub use compile::{compile_clauses, parse_compiled, ClauseTerms, PackageError};
pub use lexer::{tokenize, SourceLocation, Token, TokenKind};
pub use ops::{OpDef, OpType, OperatorTable};
pub use parser::{parse_term, parse_term_with, DoubleQuotes, Parser, ReadTerm, SyntaxError};
