//! AST type checking. No implicit conversions anywhere; every expression has
//! a unique type or the program is rejected.

use super::{
    AstBinOp, AstProgram, Expr, ExprKind, ScalarType, SourceSpan, Stmt, StmtKind, TypingContext,
    UnaryOp, ValueType, MAX_ARRAY_LEN,
};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: type error: {}", self.span, self.message)
    }
}

impl std::error::Error for TypeError {}

fn err<T>(span: SourceSpan, message: impl Into<String>) -> Result<T, TypeError> {
    Err(TypeError {
        span,
        message: message.into(),
    })
}

/// Builds the typing context and checks the whole program. Duplicate
/// declarations are resolved first-wins here; rejecting them is the
/// well-formedness pass's job.
pub fn type_check(p: &AstProgram) -> Result<TypingContext, TypeError> {
    let mut ctx = TypingContext::default();
    for d in &p.decls {
        if let ValueType::Array(_, n) = d.ty {
            if n == 0 || n > MAX_ARRAY_LEN {
                return err(
                    d.span,
                    format!("array length {n} outside 1..={MAX_ARRAY_LEN}"),
                );
            }
        }
        ctx.vars.entry(d.name.clone()).or_insert(d.ty);
    }
    check_stmts(&p.body, &ctx)?;
    Ok(ctx)
}

fn check_stmts(stmts: &[Stmt], ctx: &TypingContext) -> Result<(), TypeError> {
    for s in stmts {
        check_stmt(s, ctx)?;
    }
    Ok(())
}

fn check_stmt(s: &Stmt, ctx: &TypingContext) -> Result<(), TypeError> {
    match &s.kind {
        StmtKind::Assign(name, e) => {
            let Some(ty) = ctx.lookup(name) else {
                return err(s.span, format!("assignment to undeclared variable `{name}`"));
            };
            let ValueType::Scalar(target) = ty else {
                return err(s.span, format!("array `{name}` used as a scalar"));
            };
            let found = check_expr(e, ctx)?;
            if found != target {
                return err(
                    e.span,
                    format!("cannot assign {found} to {target} variable `{name}` (no implicit conversions)"),
                );
            }
            Ok(())
        }
        StmtKind::AssignIndex(name, index, e) => {
            let Some(ty) = ctx.lookup(name) else {
                return err(s.span, format!("store to undeclared array `{name}`"));
            };
            let ValueType::Array(elem, _) = ty else {
                return err(s.span, format!("scalar `{name}` indexed as an array"));
            };
            let ity = check_expr(index, ctx)?;
            if ity != ScalarType::Int {
                return err(index.span, format!("array index must be int, found {ity}"));
            }
            let vty = check_expr(e, ctx)?;
            if vty != elem {
                return err(
                    e.span,
                    format!("cannot store {vty} into {elem} array `{name}`"),
                );
            }
            Ok(())
        }
        StmtKind::While(cond, body) => {
            let cty = check_expr(cond, ctx)?;
            if cty != ScalarType::Bool {
                return err(cond.span, format!("while condition must be bool, found {cty}"));
            }
            check_stmts(body, ctx)
        }
        StmtKind::If(cond, then_body, else_body) => {
            let cty = check_expr(cond, ctx)?;
            if cty != ScalarType::Bool {
                return err(cond.span, format!("if condition must be bool, found {cty}"));
            }
            check_stmts(then_body, ctx)?;
            if let Some(eb) = else_body {
                check_stmts(eb, ctx)?;
            }
            Ok(())
        }
        StmtKind::PrintString(_) => Ok(()),
        StmtKind::PrintInt(e) => expect_expr(e, ctx, ScalarType::Int, "printInt"),
        StmtKind::PrintFloat(e) => expect_expr(e, ctx, ScalarType::Float, "printFloat"),
        StmtKind::PrintBool(e) => expect_expr(e, ctx, ScalarType::Bool, "printBool"),
        StmtKind::Goto(_) => Ok(()),
        StmtKind::Label(_, inner) => check_stmt(inner, ctx),
    }
}

fn expect_expr(
    e: &Expr,
    ctx: &TypingContext,
    want: ScalarType,
    what: &str,
) -> Result<(), TypeError> {
    let found = check_expr(e, ctx)?;
    if found != want {
        return err(e.span, format!("{what} expects {want}, found {found}"));
    }
    Ok(())
}

pub(crate) fn check_expr(e: &Expr, ctx: &TypingContext) -> Result<ScalarType, TypeError> {
    match &e.kind {
        ExprKind::IntLit(_) => Ok(ScalarType::Int),
        ExprKind::FloatLit(_) => Ok(ScalarType::Float),
        ExprKind::BoolLit(_) => Ok(ScalarType::Bool),
        ExprKind::Var(name) => match ctx.lookup(name) {
            Some(ValueType::Scalar(s)) => Ok(s),
            Some(ValueType::Array(..)) => err(e.span, format!("array `{name}` used as a scalar")),
            None => err(e.span, format!("use of undeclared variable `{name}`")),
        },
        ExprKind::Index(name, index) => {
            let Some((elem, _)) = ctx.array(name) else {
                return match ctx.lookup(name) {
                    Some(_) => err(e.span, format!("scalar `{name}` indexed as an array")),
                    None => err(e.span, format!("use of undeclared array `{name}`")),
                };
            };
            let ity = check_expr(index, ctx)?;
            if ity != ScalarType::Int {
                return err(index.span, format!("array index must be int, found {ity}"));
            }
            Ok(elem)
        }
        ExprKind::Unary(op, inner) => {
            let ity = check_expr(inner, ctx)?;
            match (op, ity) {
                (UnaryOp::Neg, ScalarType::Int) => Ok(ScalarType::Int),
                (UnaryOp::Neg, ScalarType::Float) => Ok(ScalarType::Float),
                (UnaryOp::Not, ScalarType::Bool) => Ok(ScalarType::Bool),
                (UnaryOp::Neg, t) => err(e.span, format!("unary - expects int or float, found {t}")),
                (UnaryOp::Not, t) => err(e.span, format!("! expects bool, found {t}")),
            }
        }
        ExprKind::Binary(op, lhs, rhs) => {
            let lt = check_expr(lhs, ctx)?;
            let rt = check_expr(rhs, ctx)?;
            if lt != rt {
                return err(
                    e.span,
                    format!("operands of {op:?} have mismatched types {lt} and {rt}"),
                );
            }
            match op {
                AstBinOp::Add | AstBinOp::Sub | AstBinOp::Mul | AstBinOp::Div => match lt {
                    ScalarType::Int | ScalarType::Float => Ok(lt),
                    ScalarType::Bool => err(e.span, "arithmetic on bool".to_string()),
                },
                AstBinOp::Rem => match lt {
                    ScalarType::Int => Ok(ScalarType::Int),
                    t => err(e.span, format!("% expects int operands, found {t}")),
                },
                AstBinOp::Lt | AstBinOp::Le | AstBinOp::Gt | AstBinOp::Ge => match lt {
                    ScalarType::Int | ScalarType::Float => Ok(ScalarType::Bool),
                    ScalarType::Bool => err(e.span, "ordering comparison on bool".to_string()),
                },
                AstBinOp::Eq | AstBinOp::Ne => Ok(ScalarType::Bool),
                AstBinOp::And | AstBinOp::Or => match lt {
                    ScalarType::Bool => Ok(ScalarType::Bool),
                    t => err(e.span, format!("logical operator expects bool, found {t}")),
                },
            }
        }
        ExprKind::IntToFloat(inner) => {
            let t = check_expr(inner, ctx)?;
            if t != ScalarType::Int {
                return err(e.span, format!("intToFloat expects int, found {t}"));
            }
            Ok(ScalarType::Float)
        }
        ExprKind::FloatToInt(inner) => {
            let t = check_expr(inner, ctx)?;
            if t != ScalarType::Float {
                return err(e.span, format!("floatToInt expects float, found {t}"));
            }
            Ok(ScalarType::Int)
        }
    }
}
