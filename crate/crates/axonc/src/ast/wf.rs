//! Well-formedness checks between type checking and flattening: no duplicate
//! declarations, no reserved (`__`-prefixed) names, no goto or label
//! statements.

use super::{AstProgram, SourceSpan, Stmt, StmtKind};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WfKind {
    Duplicate,
    ReservedName,
    GotoPresent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellFormedError {
    pub kind: WfKind,
    pub span: SourceSpan,
    pub detail: String,
}

impl fmt::Display for WellFormedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            WfKind::Duplicate => "duplicate declaration",
            WfKind::ReservedName => "reserved variable name",
            WfKind::GotoPresent => "goto or label statement",
        };
        write!(f, "{}: {what}: {}", self.span, self.detail)
    }
}

impl std::error::Error for WellFormedError {}

/// Evidence that a program passed the checks. Flattening requires it.
#[derive(Debug, Clone, Copy)]
pub struct WellFormedEvidence(pub(crate) ());

pub fn check_well_formed(p: &AstProgram) -> Result<WellFormedEvidence, WellFormedError> {
    let mut seen = BTreeSet::new();
    for d in &p.decls {
        if d.name.starts_with("__") {
            return Err(WellFormedError {
                kind: WfKind::ReservedName,
                span: d.span,
                detail: format!("`{}` starts with __", d.name),
            });
        }
        if !seen.insert(d.name.clone()) {
            return Err(WellFormedError {
                kind: WfKind::Duplicate,
                span: d.span,
                detail: format!("`{}` declared more than once", d.name),
            });
        }
    }
    check_no_goto(&p.body)?;
    Ok(WellFormedEvidence(()))
}

fn check_no_goto(stmts: &[Stmt]) -> Result<(), WellFormedError> {
    for s in stmts {
        match &s.kind {
            StmtKind::Goto(name) => {
                return Err(WellFormedError {
                    kind: WfKind::GotoPresent,
                    span: s.span,
                    detail: format!("goto {name}"),
                })
            }
            StmtKind::Label(name, _) => {
                return Err(WellFormedError {
                    kind: WfKind::GotoPresent,
                    span: s.span,
                    detail: format!("label {name}"),
                })
            }
            StmtKind::While(_, body) => check_no_goto(body)?,
            StmtKind::If(_, then_body, else_body) => {
                check_no_goto(then_body)?;
                if let Some(eb) = else_body {
                    check_no_goto(eb)?;
                }
            }
            _ => {}
        }
    }
    Ok(())
}
