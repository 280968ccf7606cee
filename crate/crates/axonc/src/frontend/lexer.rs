//! Lexer for text Axon. `#` starts a line comment; literals are unsigned
//! (unary minus is an operator); float literals need a `.` or an exponent.

use crate::ast::SourceSpan;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(&'static str),
    Ident(String),
    IntLit(i64),
    FloatLit(f64),
    StringLit(String),
    Punct(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: u32,
    pub col: u32,
}

impl Token {
    pub fn span(&self) -> SourceSpan {
        let width = self.lexeme.chars().count().max(1) as u32;
        SourceSpan {
            start_line: self.line,
            start_col: self.col,
            end_line: self.line,
            end_col: self.col + width - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: lex error: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for LexError {}

const KEYWORDS: &[&str] = &[
    "int",
    "float",
    "bool",
    "while",
    "if",
    "else",
    "true",
    "false",
    "printString",
    "printInt",
    "printFloat",
    "printBool",
    "goto",
    "intToFloat",
    "floatToInt",
];

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn new(source: &'a str) -> Self {
        Cursor {
            chars: source.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

pub fn lex(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();

    loop {
        // Skip whitespace and comments.
        loop {
            match cur.peek() {
                Some(c) if c.is_whitespace() => {
                    cur.bump();
                }
                Some('#') => {
                    while let Some(c) = cur.peek() {
                        if c == '\n' {
                            break;
                        }
                        cur.bump();
                    }
                }
                _ => break,
            }
        }
        let (line, col) = (cur.line, cur.col);
        let Some(c) = cur.peek() else { break };

        if c.is_ascii_alphabetic() || c == '_' {
            let mut text = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    text.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            let kind = match KEYWORDS.iter().find(|k| **k == text) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(text.clone()),
            };
            tokens.push(Token {
                kind,
                lexeme: text,
                line,
                col,
            });
        } else if c.is_ascii_digit() {
            tokens.push(lex_number(&mut cur, line, col)?);
        } else if c == '"' {
            tokens.push(lex_string(&mut cur, line, col)?);
        } else {
            tokens.push(lex_punct(&mut cur, line, col)?);
        }
    }
    Ok(tokens)
}

fn lex_number(cur: &mut Cursor, line: u32, col: u32) -> Result<Token, LexError> {
    let mut text = String::new();
    let mut is_float = false;
    while let Some(c) = cur.peek() {
        if c.is_ascii_digit() {
            text.push(c);
            cur.bump();
        } else {
            break;
        }
    }
    if cur.peek() == Some('.') {
        is_float = true;
        text.push('.');
        cur.bump();
        let mut digits = false;
        while let Some(c) = cur.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                cur.bump();
                digits = true;
            } else {
                break;
            }
        }
        if !digits {
            return Err(LexError {
                line,
                col,
                message: format!("malformed float literal `{text}`: missing fraction digits"),
            });
        }
    }
    if matches!(cur.peek(), Some('e') | Some('E')) {
        is_float = true;
        text.push(cur.bump().unwrap());
        if matches!(cur.peek(), Some('+') | Some('-')) {
            text.push(cur.bump().unwrap());
        }
        let mut digits = false;
        while let Some(c) = cur.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                cur.bump();
                digits = true;
            } else {
                break;
            }
        }
        if !digits {
            return Err(LexError {
                line,
                col,
                message: format!("malformed float literal `{text}`: missing exponent digits"),
            });
        }
    }

    let kind = if is_float {
        let v: f64 = text.parse().map_err(|_| LexError {
            line,
            col,
            message: format!("malformed float literal `{text}`"),
        })?;
        if !v.is_finite() {
            return Err(LexError {
                line,
                col,
                message: format!("float literal `{text}` is not a finite value"),
            });
        }
        TokenKind::FloatLit(v)
    } else {
        let v: i64 = text.parse().map_err(|_| LexError {
            line,
            col,
            message: format!("integer literal `{text}` does not fit in signed 64 bits"),
        })?;
        TokenKind::IntLit(v)
    };
    Ok(Token {
        kind,
        lexeme: text,
        line,
        col,
    })
}

fn lex_string(cur: &mut Cursor, line: u32, col: u32) -> Result<Token, LexError> {
    let mut lexeme = String::from("\"");
    let mut value = String::new();
    cur.bump(); // opening quote
    loop {
        match cur.bump() {
            None | Some('\n') => {
                return Err(LexError {
                    line,
                    col,
                    message: "unterminated string literal".to_string(),
                })
            }
            Some('"') => {
                lexeme.push('"');
                break;
            }
            Some('\\') => {
                lexeme.push('\\');
                match cur.bump() {
                    Some('n') => {
                        lexeme.push('n');
                        value.push('\n');
                    }
                    Some('t') => {
                        lexeme.push('t');
                        value.push('\t');
                    }
                    Some('\\') => {
                        lexeme.push('\\');
                        value.push('\\');
                    }
                    Some('"') => {
                        lexeme.push('"');
                        value.push('"');
                    }
                    other => {
                        return Err(LexError {
                            line,
                            col,
                            message: format!("unknown escape `\\{}`", other.unwrap_or(' ')),
                        })
                    }
                }
            }
            Some(c) => {
                lexeme.push(c);
                value.push(c);
            }
        }
    }
    Ok(Token {
        kind: TokenKind::StringLit(value),
        lexeme,
        line,
        col,
    })
}

fn lex_punct(cur: &mut Cursor, line: u32, col: u32) -> Result<Token, LexError> {
    let c = cur.bump().unwrap();
    let two = |cur: &mut Cursor, second: char, long: &'static str, short: Option<&'static str>| {
        if cur.peek() == Some(second) {
            cur.bump();
            Ok(long)
        } else {
            match short {
                Some(s) => Ok(s),
                None => Err(()),
            }
        }
    };
    let text: Result<&'static str, ()> = match c {
        '=' => two(cur, '=', "==", Some("=")),
        '<' => two(cur, '=', "<=", Some("<")),
        '>' => two(cur, '=', ">=", Some(">")),
        '!' => two(cur, '=', "!=", Some("!")),
        '&' => two(cur, '&', "&&", None),
        '|' => two(cur, '|', "||", None),
        '+' => Ok("+"),
        '-' => Ok("-"),
        '*' => Ok("*"),
        '/' => Ok("/"),
        '%' => Ok("%"),
        ';' => Ok(";"),
        ':' => Ok(":"),
        '(' => Ok("("),
        ')' => Ok(")"),
        '{' => Ok("{"),
        '}' => Ok("}"),
        '[' => Ok("["),
        ']' => Ok("]"),
        _ => Err(()),
    };
    match text {
        Ok(t) => Ok(Token {
            kind: TokenKind::Punct(t),
            lexeme: t.to_string(),
            line,
            col,
        }),
        Err(()) => Err(LexError {
            line,
            col,
            message: format!("unrecognized character `{c}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        lex(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn tokenizes_assignment() {
        assert_eq!(
            kinds("x = 1;"),
            vec![
                TokenKind::Ident("x".into()),
                TokenKind::Punct("="),
                TokenKind::IntLit(1),
                TokenKind::Punct(";"),
            ]
        );
    }

    #[test]
    fn float_literal_with_exponent() {
        assert_eq!(kinds("3.5e2"), vec![TokenKind::FloatLit(3.5e2)]);
        assert_eq!(kinds("1e10"), vec![TokenKind::FloatLit(1e10)]);
    }

    #[test]
    fn rejects_unknown_character() {
        let e = lex("@").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
    }

    #[test]
    fn comments_and_positions() {
        let toks = lex("# comment line\n  x # trailing\n").unwrap();
        assert_eq!(toks.len(), 1);
        assert_eq!((toks[0].line, toks[0].col), (2, 3));
    }

    #[test]
    fn int_literal_overflow_is_an_error() {
        assert!(lex("9223372036854775808").is_err());
        assert_eq!(
            kinds("9223372036854775807"),
            vec![TokenKind::IntLit(i64::MAX)]
        );
    }

    #[test]
    fn overflowing_float_literal_rejected() {
        assert!(lex("1e400").is_err());
    }

    #[test]
    fn string_escapes() {
        assert_eq!(
            kinds("\"a\\n\\\"b\""),
            vec![TokenKind::StringLit("a\n\"b".into())]
        );
        assert!(lex("\"open").is_err());
    }
}
