//! Text frontend: lexer and recursive-descent parser. Deliberately thin — no
//! desugaring, no inference; everything else happens on the AST.

mod lexer;
mod parser;

pub use lexer::{lex, LexError, Token, TokenKind};
pub use parser::{parse, parse_source, ParseError};
