//! Certificates and the executable certificate checker.
//!
//! A certificate bundles the original and transformed TAC programs with
//! single-program invariants on each, a command mapping, a variable
//! interpretation, and a transition mapping. The checker accepts only when
//! well-formedness, inductiveness, simulation, observation equivalence,
//! register-aliasing safety, and the entry condition all hold; the optimizer
//! is never trusted.

mod checker;
mod simp;
mod textfmt;

pub use checker::{check_certificate, CheckRule, RejectReason};
pub use simp::{normalize, Facts, SExpr};
pub use textfmt::{parse_certificate, serialize_certificate, CertParseError};

use crate::tac::{BinOp, Const, Operand, TacCmd, TacName, TacProgram, UnOp};
use std::collections::BTreeMap;
use std::fmt;

/// A single-program invariant at one label. Operands are variables or
/// constants; the three forms are the ones certificates use, and the checker
/// reasons about them through the expression simplifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpInvariant {
    VarEqConst(TacName, Const),
    VarEqBinop(TacName, BinOp, Operand, Operand),
    /// v == addend + mul_l * mul_r (float, multiply rounds first)
    VarEqFma(TacName, Operand, Operand, Operand),
}

impl SpInvariant {
    /// Variables this invariant talks about; a write to any of them kills it.
    pub fn mentions(&self) -> Vec<&TacName> {
        let mut out = Vec::new();
        let mut push_op = |o: &'_ Operand, out: &mut Vec<&TacName>| {
            if let Operand::Var(v) = o {
                out.push(v);
            }
        };
        match self {
            SpInvariant::VarEqConst(v, _) => out.push(v),
            SpInvariant::VarEqBinop(v, _, a, b) => {
                out.push(v);
                push_op(a, &mut out);
                push_op(b, &mut out);
            }
            SpInvariant::VarEqFma(v, a, l, r) => {
                out.push(v);
                push_op(a, &mut out);
                push_op(l, &mut out);
                push_op(r, &mut out);
            }
        }
        out
    }

    pub fn subject(&self) -> &TacName {
        match self {
            SpInvariant::VarEqConst(v, _)
            | SpInvariant::VarEqBinop(v, _, _, _)
            | SpInvariant::VarEqFma(v, _, _, _) => v,
        }
    }
}

impl fmt::Display for SpInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpInvariant::VarEqConst(v, c) => write!(f, "{v} == {c}"),
            SpInvariant::VarEqBinop(v, op, a, b) => {
                write!(f, "{v} == {a} {} {b}", crate::tac::binop_symbol(*op))
            }
            SpInvariant::VarEqFma(v, a, l, r) => write!(f, "{v} == {a} + {l} * {r}"),
        }
    }
}

/// Right side of a relational fact or a varMap entry: an original-program
/// variable or a constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ORef {
    Var(TacName),
    Const(Const),
}

impl fmt::Display for ORef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ORef::Var(v) => write!(f, "{v}"),
            ORef::Const(c) => write!(f, "{c}"),
        }
    }
}

/// Relational invariant at a transformed label: the transformed variable
/// equals an original variable or a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelInvariant {
    pub trans_var: TacName,
    pub oref: ORef,
}

impl fmt::Display for RelInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t:{} == o:{}", self.trans_var, self.oref)
    }
}

/// The unit of translation validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub pass: String,
    pub original: TacProgram,
    pub transformed: TacProgram,
    /// transformed label → original label anchoring the simulation relation.
    pub cmd_map: BTreeMap<usize, usize>,
    pub sp_inv_orig: BTreeMap<usize, Vec<SpInvariant>>,
    pub sp_inv_trans: BTreeMap<usize, Vec<SpInvariant>>,
    pub rel_inv: BTreeMap<usize, Vec<RelInvariant>>,
    /// Interpretation of transformed variables as original variables or
    /// constants, valid wherever the variable is live in the transformed
    /// program. The checker verifies these inductively like relational
    /// invariants.
    pub var_map: BTreeMap<TacName, ORef>,
    /// transformed CFG edge → path of original CFG edges (empty = stutter).
    pub trans_map: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
    /// Original edges executed before the paired run starts, landing on
    /// cmd_map[0]; empty when cmd_map[0] == 0.
    pub entry_path: Vec<(usize, usize)>,
}

impl Certificate {
    /// The reflexive certificate: transformed = original, identity maps,
    /// empty invariants.
    pub fn identity(pass: impl Into<String>, prog: &TacProgram) -> Certificate {
        let mut cmd_map = BTreeMap::new();
        let mut trans_map = BTreeMap::new();
        for (l, cmd) in prog.cmds.iter().enumerate() {
            cmd_map.insert(l, l);
            for s in crate::tac::successors(cmd, l) {
                trans_map.insert((l, s), vec![(l, s)]);
            }
        }
        let var_map = prog
            .ctx
            .keys()
            .map(|v| (v.clone(), ORef::Var(v.clone())))
            .collect();
        Certificate {
            pass: pass.into(),
            original: prog.clone(),
            transformed: prog.clone(),
            cmd_map,
            sp_inv_orig: BTreeMap::new(),
            sp_inv_trans: BTreeMap::new(),
            rel_inv: BTreeMap::new(),
            var_map,
            trans_map,
            entry_path: Vec::new(),
        }
    }
}

/// Spec-shaped strongest postcondition over the three invariant forms: kill
/// everything mentioning the destination, then add the facts the command's
/// right side yields after simplification. The checker itself uses a richer
/// internal fact store; this is the external face of the same rules.
pub fn strongest_post(cmd: &TacCmd, facts: &[SpInvariant]) -> Vec<SpInvariant> {
    let mut out: Vec<SpInvariant> = match cmd.dst() {
        Some(dst) => facts
            .iter()
            .filter(|f| !f.mentions().contains(&dst))
            .cloned()
            .collect(),
        None => facts.to_vec(),
    };
    let pre = Facts::from_invariants(facts);
    let dst = match cmd.dst() {
        Some(d) => d.clone(),
        None => return out,
    };
    let rhs = match simp::command_rhs(cmd) {
        Some(e) => e,
        None => return out, // array loads are not tracked
    };
    if simp::expr_vars(&rhs).contains(&dst) {
        return out;
    }
    let n = normalize(&rhs, &pre);
    match simp::as_invariant(&dst, &n) {
        Some(inv) => out.push(inv),
        None => {
            // Fall back to the raw right side when it already fits a form.
            if let Some(inv) = simp::as_invariant(&dst, &rhs) {
                out.push(inv);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ScalarType;

    fn x() -> TacName {
        TacName::source("x")
    }
    fn y() -> TacName {
        TacName::source("y")
    }
    fn z() -> TacName {
        TacName::source("z")
    }

    #[test]
    fn assign_const_generates_fact() {
        let cmd = TacCmd::AssignConst {
            dst: x(),
            value: Const::Int(5),
        };
        let post = strongest_post(&cmd, &[]);
        assert_eq!(post, vec![SpInvariant::VarEqConst(x(), Const::Int(5))]);
    }

    #[test]
    fn kill_rule_drops_facts_mentioning_destination() {
        let cmd = TacCmd::AssignConst {
            dst: x(),
            value: Const::Int(5),
        };
        let facts = vec![SpInvariant::VarEqBinop(
            y(),
            BinOp::IAdd,
            Operand::Var(x()),
            Operand::Var(z()),
        )];
        let post = strongest_post(&cmd, &facts);
        assert_eq!(post, vec![SpInvariant::VarEqConst(x(), Const::Int(5))]);
    }

    #[test]
    fn array_store_leaves_facts_unchanged() {
        let cmd = TacCmd::ArrayStore {
            arr: "a".to_string(),
            index: Operand::Var(x()),
            value: Operand::Var(y()),
        };
        let facts = vec![SpInvariant::VarEqConst(z(), Const::Int(3))];
        assert_eq!(strongest_post(&cmd, &facts), facts);
    }

    #[test]
    fn folding_through_known_constants() {
        let cmd = TacCmd::AssignBinop {
            dst: y(),
            op: BinOp::IAdd,
            lhs: Operand::Var(x()),
            rhs: Operand::Const(Const::Int(1)),
        };
        let facts = vec![SpInvariant::VarEqConst(x(), Const::Int(5))];
        let post = strongest_post(&cmd, &facts);
        assert!(post.contains(&SpInvariant::VarEqConst(y(), Const::Int(6))));
        assert!(post.contains(&SpInvariant::VarEqConst(x(), Const::Int(5))));
    }

    #[test]
    fn self_referential_rhs_generates_nothing() {
        let cmd = TacCmd::AssignBinop {
            dst: x(),
            op: BinOp::IAdd,
            lhs: Operand::Var(x()),
            rhs: Operand::Const(Const::Int(1)),
        };
        let facts = vec![SpInvariant::VarEqConst(y(), Const::Int(2))];
        let post = strongest_post(&cmd, &facts);
        assert_eq!(post, vec![SpInvariant::VarEqConst(y(), Const::Int(2))]);
    }

    fn _types_compile(_: &Certificate, _: &RelInvariant, _: &ORef) {}

    #[test]
    fn scalar_type_display() {
        assert_eq!(ScalarType::Int.to_string(), "int");
    }
}
