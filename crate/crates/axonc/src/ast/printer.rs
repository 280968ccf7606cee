//! Canonical text emitter for AST programs, used by the parser round-trip
//! tests and `axon run --ast` debugging.

use super::{AstBinOp, AstProgram, Expr, ExprKind, Stmt, StmtKind, UnaryOp, ValueType};
use std::fmt::Write;

pub fn print_program(p: &AstProgram) -> String {
    let mut out = String::new();
    for d in &p.decls {
        match d.ty {
            ValueType::Scalar(s) => {
                let _ = writeln!(out, "{} {};", s, d.name);
            }
            ValueType::Array(s, n) => {
                let _ = writeln!(out, "{}[{}] {};", s, n, d.name);
            }
        }
    }
    for s in &p.body {
        print_stmt(&mut out, s, 0);
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn print_stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match &s.kind {
        StmtKind::Assign(name, e) => {
            let _ = writeln!(out, "{} = {};", name, expr_text(e));
        }
        StmtKind::AssignIndex(name, index, e) => {
            let _ = writeln!(out, "{}[{}] = {};", name, expr_text(index), expr_text(e));
        }
        StmtKind::While(cond, body) => {
            let _ = writeln!(out, "while ({}) {{", expr_text(cond));
            for inner in body {
                print_stmt(out, inner, depth + 1);
            }
            indent(out, depth);
            out.push_str("}\n");
        }
        StmtKind::If(cond, then_body, else_body) => {
            let _ = writeln!(out, "if ({}) {{", expr_text(cond));
            for inner in then_body {
                print_stmt(out, inner, depth + 1);
            }
            indent(out, depth);
            out.push('}');
            if let Some(eb) = else_body {
                out.push_str(" else {\n");
                for inner in eb {
                    print_stmt(out, inner, depth + 1);
                }
                indent(out, depth);
                out.push('}');
            }
            out.push('\n');
        }
        StmtKind::PrintString(text) => {
            let _ = writeln!(out, "printString \"{}\";", escape(text));
        }
        StmtKind::PrintInt(e) => {
            let _ = writeln!(out, "printInt {};", expr_text(e));
        }
        StmtKind::PrintFloat(e) => {
            let _ = writeln!(out, "printFloat {};", expr_text(e));
        }
        StmtKind::PrintBool(e) => {
            let _ = writeln!(out, "printBool {};", expr_text(e));
        }
        StmtKind::Goto(name) => {
            let _ = writeln!(out, "goto {name};");
        }
        StmtKind::Label(name, inner) => {
            let _ = write!(out, "{name}: ");
            // The label owns the indent; print the inner statement inline.
            let mut tmp = String::new();
            print_stmt(&mut tmp, inner, 0);
            out.push_str(&tmp);
        }
    }
}

fn escape(text: &str) -> String {
    let mut s = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            '\t' => s.push_str("\\t"),
            c => s.push(c),
        }
    }
    s
}

/// Binding strength; higher binds tighter.
fn prec(op: AstBinOp) -> u8 {
    use AstBinOp::*;
    match op {
        Mul | Div | Rem => 5,
        Add | Sub => 4,
        Lt | Le | Gt | Ge => 3,
        Eq | Ne => 2,
        And => 1,
        Or => 0,
    }
}

fn op_text(op: AstBinOp) -> &'static str {
    use AstBinOp::*;
    match op {
        Add => "+",
        Sub => "-",
        Mul => "*",
        Div => "/",
        Rem => "%",
        Lt => "<",
        Le => "<=",
        Gt => ">",
        Ge => ">=",
        Eq => "==",
        Ne => "!=",
        And => "&&",
        Or => "||",
    }
}

pub(crate) fn expr_text(e: &Expr) -> String {
    expr_prec(e, 0)
}

fn expr_prec(e: &Expr, min: u8) -> String {
    match &e.kind {
        ExprKind::IntLit(v) => {
            // Negative literals only arise from synthesized nodes; the lexer
            // has no sign, so keep them parseable.
            if *v == i64::MIN {
                format!("(0 - {} - 1)", i64::MAX)
            } else if *v < 0 {
                format!("(0 - {})", v.unsigned_abs())
            } else {
                format!("{v}")
            }
        }
        ExprKind::FloatLit(v) => format!("{v:?}"),
        ExprKind::BoolLit(v) => format!("{v}"),
        ExprKind::Var(name) => name.clone(),
        ExprKind::Index(name, index) => format!("{}[{}]", name, expr_prec(index, 0)),
        ExprKind::Unary(op, inner) => {
            let sym = match op {
                UnaryOp::Neg => "-",
                UnaryOp::Not => "!",
            };
            let body = format!("{}{}", sym, expr_prec(inner, 6));
            if min > 6 {
                format!("({body})")
            } else {
                body
            }
        }
        ExprKind::Binary(op, lhs, rhs) => {
            let p = prec(*op);
            let body = format!(
                "{} {} {}",
                expr_prec(lhs, p),
                op_text(*op),
                expr_prec(rhs, p + 1)
            );
            if p < min {
                format!("({body})")
            } else {
                body
            }
        }
        ExprKind::IntToFloat(inner) => format!("intToFloat({})", expr_prec(inner, 0)),
        ExprKind::FloatToInt(inner) => format!("floatToInt({})", expr_prec(inner, 0)),
    }
}
