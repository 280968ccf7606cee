//! Recursive-descent parser. Precedence is C-like:
//! unary > `* / %` > `+ -` > `< <= > >=` > `== !=` > `&&` > `||`.

use super::lexer::{lex, LexError, Token, TokenKind};
use crate::ast::{
    AstBinOp, AstProgram, Decl, Expr, ExprKind, ScalarType, SourceSpan, Stmt, StmtKind, UnaryOp,
    ValueType,
};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: parse error: expected {}, found {}",
            self.span, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}

/// Lex + parse in one step.
pub fn parse_source(source: &str) -> Result<AstProgram, SourceError> {
    let tokens = lex(source).map_err(SourceError::Lex)?;
    parse(&tokens).map_err(SourceError::Parse)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceError {
    Lex(LexError),
    Parse(ParseError),
}

impl fmt::Display for SourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceError::Lex(e) => write!(f, "{e}"),
            SourceError::Parse(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SourceError {}

pub fn parse(tokens: &[Token]) -> Result<AstProgram, ParseError> {
    let mut p = Parser { tokens, pos: 0 };
    let program = p.program()?;
    if p.pos < p.tokens.len() {
        return Err(p.error_here("end of input"));
    }
    Ok(program)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek2(&self) -> Option<&Token> {
        self.tokens.get(self.pos + 1)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here_span(&self) -> SourceSpan {
        match self.peek() {
            Some(t) => t.span(),
            None => self
                .tokens
                .last()
                .map(|t| t.span())
                .unwrap_or_else(|| SourceSpan::point(1, 1)),
        }
    }

    fn found_text(&self) -> String {
        match self.peek() {
            Some(t) => format!("`{}`", t.lexeme),
            None => "end of input".to_string(),
        }
    }

    fn error_here(&self, expected: impl Into<String>) -> ParseError {
        ParseError {
            span: self.here_span(),
            expected: expected.into(),
            found: self.found_text(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(t) if matches!(&t.kind, TokenKind::Punct(q) if *q == p))
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Some(t) if matches!(&t.kind, TokenKind::Keyword(q) if *q == k))
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<SourceSpan, ParseError> {
        if self.is_punct(p) {
            let span = self.here_span();
            self.bump();
            Ok(span)
        } else {
            Err(self.error_here(format!("`{p}`")))
        }
    }

    fn expect_keyword(&mut self, k: &'static str) -> Result<SourceSpan, ParseError> {
        if self.is_keyword(k) {
            let span = self.here_span();
            self.bump();
            Ok(span)
        } else {
            Err(self.error_here(format!("`{k}`")))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, SourceSpan), ParseError> {
        match self.peek() {
            Some(t) => {
                if let TokenKind::Ident(name) = &t.kind {
                    let out = (name.clone(), t.span());
                    self.bump();
                    Ok(out)
                } else {
                    Err(self.error_here("identifier"))
                }
            }
            None => Err(self.error_here("identifier")),
        }
    }

    fn peek_type(&self) -> Option<ScalarType> {
        match self.peek()?.kind {
            TokenKind::Keyword("int") => Some(ScalarType::Int),
            TokenKind::Keyword("float") => Some(ScalarType::Float),
            TokenKind::Keyword("bool") => Some(ScalarType::Bool),
            _ => None,
        }
    }

    fn program(&mut self) -> Result<AstProgram, ParseError> {
        let mut decls = Vec::new();
        while let Some(scalar) = self.peek_type() {
            let start = self.here_span();
            self.bump();
            let ty = if self.is_punct("[") {
                self.bump();
                let len = match self.peek() {
                    Some(t) => {
                        if let TokenKind::IntLit(v) = t.kind {
                            self.bump();
                            v
                        } else {
                            return Err(self.error_here("array length literal"));
                        }
                    }
                    None => return Err(self.error_here("array length literal")),
                };
                self.expect_punct("]")?;
                if !(0..=u32::MAX as i64).contains(&len) {
                    return Err(ParseError {
                        span: start,
                        expected: "array length within u32 range".to_string(),
                        found: format!("{len}"),
                    });
                }
                ValueType::Array(scalar, len as u32)
            } else {
                ValueType::Scalar(scalar)
            };
            let (name, name_span) = self.expect_ident()?;
            let end = self.expect_punct(";")?;
            decls.push(Decl {
                name,
                ty,
                span: start.merge(name_span).merge(end),
            });
        }

        let mut body = Vec::new();
        while self.peek().is_some() {
            body.push(self.stmt()?);
        }
        Ok(AstProgram { decls, body })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if self.peek().is_none() {
                return Err(self.error_here("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.expect_punct("}")?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let start = self.here_span();
        let Some(tok) = self.peek() else {
            return Err(self.error_here("statement"));
        };
        match &tok.kind {
            TokenKind::Keyword("while") => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let body = self.block()?;
                Ok(Stmt {
                    kind: StmtKind::While(cond, body),
                    span: start,
                })
            }
            TokenKind::Keyword("if") => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let then_body = self.block()?;
                let else_body = if self.is_keyword("else") {
                    self.bump();
                    Some(self.block()?)
                } else {
                    None
                };
                Ok(Stmt {
                    kind: StmtKind::If(cond, then_body, else_body),
                    span: start,
                })
            }
            TokenKind::Keyword("printString") => {
                self.bump();
                let text = match self.peek() {
                    Some(t) => {
                        if let TokenKind::StringLit(s) = &t.kind {
                            let s = s.clone();
                            self.bump();
                            s
                        } else {
                            return Err(self.error_here("string literal"));
                        }
                    }
                    None => return Err(self.error_here("string literal")),
                };
                self.expect_punct(";")?;
                Ok(Stmt {
                    kind: StmtKind::PrintString(text),
                    span: start,
                })
            }
            TokenKind::Keyword(k @ ("printInt" | "printFloat" | "printBool")) => {
                let k = *k;
                self.bump();
                let e = self.expr()?;
                self.expect_punct(";")?;
                let kind = match k {
                    "printInt" => StmtKind::PrintInt(e),
                    "printFloat" => StmtKind::PrintFloat(e),
                    _ => StmtKind::PrintBool(e),
                };
                Ok(Stmt { kind, span: start })
            }
            TokenKind::Keyword("goto") => {
                self.bump();
                let (name, _) = self.expect_ident()?;
                self.expect_punct(";")?;
                Ok(Stmt {
                    kind: StmtKind::Goto(name),
                    span: start,
                })
            }
            TokenKind::Ident(_) => {
                // Lookahead distinguishes `x = e;`, `a[i] = e;`, `lbl: stmt`.
                let next = self.peek2().map(|t| t.lexeme.as_str());
                match next {
                    Some("=") => {
                        let (name, _) = self.expect_ident()?;
                        self.bump(); // `=`
                        let e = self.expr()?;
                        self.expect_punct(";")?;
                        Ok(Stmt {
                            kind: StmtKind::Assign(name, e),
                            span: start,
                        })
                    }
                    Some("[") => {
                        let (name, _) = self.expect_ident()?;
                        self.bump(); // `[`
                        let index = self.expr()?;
                        self.expect_punct("]")?;
                        self.expect_punct("=")?;
                        let e = self.expr()?;
                        self.expect_punct(";")?;
                        Ok(Stmt {
                            kind: StmtKind::AssignIndex(name, index, e),
                            span: start,
                        })
                    }
                    Some(":") => {
                        let (name, _) = self.expect_ident()?;
                        self.bump(); // `:`
                        let inner = self.stmt()?;
                        Ok(Stmt {
                            kind: StmtKind::Label(name, Box::new(inner)),
                            span: start,
                        })
                    }
                    _ => {
                        self.bump();
                        Err(self.error_here("`=`, `[`, or `:`"))
                    }
                }
            }
            _ => Err(self.error_here("statement")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary_level(0)
    }

    /// Precedence-climbing over the binary operator table.
    fn binary_level(&mut self, level: u8) -> Result<Expr, ParseError> {
        const LEVELS: [&[(&str, AstBinOp)]; 6] = [
            &[("||", AstBinOp::Or)],
            &[("&&", AstBinOp::And)],
            &[("==", AstBinOp::Eq), ("!=", AstBinOp::Ne)],
            &[
                ("<=", AstBinOp::Le),
                (">=", AstBinOp::Ge),
                ("<", AstBinOp::Lt),
                (">", AstBinOp::Gt),
            ],
            &[("+", AstBinOp::Add), ("-", AstBinOp::Sub)],
            &[
                ("*", AstBinOp::Mul),
                ("/", AstBinOp::Div),
                ("%", AstBinOp::Rem),
            ],
        ];
        if level as usize >= LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary_level(level + 1)?;
        loop {
            let op = match self.peek() {
                Some(t) => LEVELS[level as usize].iter().find_map(|(sym, op)| {
                    if matches!(&t.kind, TokenKind::Punct(p) if p == sym) {
                        Some(*op)
                    } else {
                        None
                    }
                }),
                None => None,
            };
            let Some(op) = op else { break };
            self.bump();
            let rhs = self.binary_level(level + 1)?;
            let span = lhs.span.merge(rhs.span);
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let start = self.here_span();
        if self.is_punct("-") {
            self.bump();
            let inner = self.unary()?;
            let span = start.merge(inner.span);
            return Ok(Expr {
                kind: ExprKind::Unary(UnaryOp::Neg, Box::new(inner)),
                span,
            });
        }
        if self.is_punct("!") {
            self.bump();
            let inner = self.unary()?;
            let span = start.merge(inner.span);
            return Ok(Expr {
                kind: ExprKind::Unary(UnaryOp::Not, Box::new(inner)),
                span,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.here_span();
        let Some(tok) = self.peek() else {
            return Err(self.error_here("expression"));
        };
        match &tok.kind {
            TokenKind::IntLit(v) => {
                let v = *v;
                self.bump();
                Ok(Expr {
                    kind: ExprKind::IntLit(v),
                    span: start,
                })
            }
            TokenKind::FloatLit(v) => {
                let v = *v;
                self.bump();
                Ok(Expr {
                    kind: ExprKind::FloatLit(v),
                    span: start,
                })
            }
            TokenKind::Keyword("true") => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::BoolLit(true),
                    span: start,
                })
            }
            TokenKind::Keyword("false") => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::BoolLit(false),
                    span: start,
                })
            }
            TokenKind::Keyword(k @ ("intToFloat" | "floatToInt")) => {
                let k = *k;
                self.bump();
                self.expect_punct("(")?;
                let inner = self.expr()?;
                let end = self.expect_punct(")")?;
                let span = start.merge(end);
                let kind = if k == "intToFloat" {
                    ExprKind::IntToFloat(Box::new(inner))
                } else {
                    ExprKind::FloatToInt(Box::new(inner))
                };
                Ok(Expr { kind, span })
            }
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.bump();
                if self.is_punct("[") {
                    self.bump();
                    let index = self.expr()?;
                    let end = self.expect_punct("]")?;
                    let span = start.merge(end);
                    Ok(Expr {
                        kind: ExprKind::Index(name, Box::new(index)),
                        span,
                    })
                } else {
                    Ok(Expr {
                        kind: ExprKind::Var(name),
                        span: start,
                    })
                }
            }
            TokenKind::Punct("(") => {
                self.bump();
                let inner = self.expr()?;
                let end = self.expect_punct(")")?;
                Ok(Expr {
                    kind: inner.kind,
                    span: start.merge(end),
                })
            }
            _ => Err(self.error_here("expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{print_program, same_program};

    fn parsed(src: &str) -> AstProgram {
        parse_source(src).unwrap()
    }

    #[test]
    fn parses_decls_and_assignment() {
        let p = parsed("int x; float[4] a; x = 1 + 2 * 3;");
        assert_eq!(p.decls.len(), 2);
        assert_eq!(p.decls[1].ty, ValueType::Array(ScalarType::Float, 4));
        assert!(matches!(
            &p.body[0].kind,
            StmtKind::Assign(name, e)
                if name == "x" && matches!(&e.kind, ExprKind::Binary(AstBinOp::Add, _, _))
        ));
    }

    #[test]
    fn while_condition_is_an_expression() {
        let p = parsed("bool b; while (b) { b = false; }");
        match &p.body[0].kind {
            StmtKind::While(cond, body) => {
                assert!(matches!(&cond.kind, ExprKind::Var(n) if n == "b"));
                assert_eq!(body.len(), 1);
            }
            other => panic!("expected while, got {other:?}"),
        }
    }

    #[test]
    fn parser_does_not_type_check() {
        // Type error deferred to the ast module.
        assert!(parse_source("int x; x = intToFloat(1);").is_ok());
    }

    #[test]
    fn missing_semicolon_between_decls() {
        let err = parse_source("int x int y;").unwrap_err();
        match err {
            SourceError::Parse(e) => assert_eq!(e.expected, "`;`"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn goto_and_label_are_grammatical() {
        let p = parsed("int x; lbl: x = 1; goto lbl;");
        assert!(matches!(&p.body[0].kind, StmtKind::Label(..)));
        assert!(matches!(&p.body[1].kind, StmtKind::Goto(..)));
    }

    #[test]
    fn precedence_is_c_like() {
        let p = parsed("bool b; int x; b = x + 1 < 2 * x && !b || false;");
        let StmtKind::Assign(_, e) = &p.body[0].kind else {
            panic!()
        };
        // Top level must be ||.
        assert!(matches!(&e.kind, ExprKind::Binary(AstBinOp::Or, _, _)));
        let text = print_program(&p);
        let p2 = parsed(&text);
        assert!(same_program(&p, &p2), "round trip failed:\n{text}");
    }

    #[test]
    fn parse_failure_span_is_inside_input() {
        let err = parse_source("int x; x = ;").unwrap_err();
        let SourceError::Parse(e) = err else { panic!() };
        assert!(e.span.start_line >= 1 && e.span.start_col >= 1);
    }

    #[test]
    fn print_parse_round_trip() {
        let src = "int i; float f; bool b; int[3] a;\n\
                   i = 0;\n\
                   while (i < 3) { a[i] = i * 2; i = i + 1; }\n\
                   if (b) { f = intToFloat(i) / 2.0; } else { f = 0.5e1; }\n\
                   printInt a[2]; printFloat f; printBool !b && true; printString \"ok\";";
        let p = parsed(src);
        let text = print_program(&p);
        let p2 = parsed(&text);
        assert!(same_program(&p, &p2), "round trip failed:\n{text}");
    }
}
