//! Expression simplifier: normalization with fact substitution, constant
//! folding, and canonical operand ordering. Entailment and the simulation
//! proofs all reduce to "normalize both sides and compare".
//!
//! Soundness notes: integer identities only (float rewrites are limited to
//! exact constant folding and the addition-commutes axiom); division never
//! folds on a zero divisor; comparisons normalize `>`/`>=` to `<`/`<=` with
//! swapped operands so constants may appear on either side.

use super::SpInvariant;
use crate::ast::{ScalarType, Value};
use crate::tac::interp::{const_value, eval_binop};
use crate::tac::{BinOp, CmpOp, Const, FmaSign, Operand, TacCmd, TacName, UnOp};
use std::collections::{BTreeMap, BTreeSet};

/// Budget on nodes produced during fact expansion; past this, variables stay
/// unexpanded. Certificates in practice stay far below it.
const EXPAND_NODE_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SExpr {
    Const(Const),
    Var(TacName),
    Unop(UnOp, Box<SExpr>),
    Binop(BinOp, Box<SExpr>, Box<SExpr>),
    /// Value read from `arr` at content-generation `gen` (within one proof
    /// obligation) at the given index.
    ArrElem {
        arr: String,
        gen: u32,
        index: Box<SExpr>,
    },
}

impl SExpr {
    pub fn of_operand(op: &Operand) -> SExpr {
        match op {
            Operand::Var(v) => SExpr::Var(v.clone()),
            Operand::Const(c) => SExpr::Const(*c),
        }
    }

    pub fn as_const(&self) -> Option<Const> {
        match self {
            SExpr::Const(c) => Some(*c),
            _ => None,
        }
    }
}

pub fn expr_vars(e: &SExpr) -> BTreeSet<TacName> {
    let mut out = BTreeSet::new();
    collect_vars(e, &mut out);
    out
}

fn collect_vars(e: &SExpr, out: &mut BTreeSet<TacName>) {
    match e {
        SExpr::Const(_) => {}
        SExpr::Var(v) => {
            out.insert(v.clone());
        }
        SExpr::Unop(_, a) => collect_vars(a, out),
        SExpr::Binop(_, a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        SExpr::ArrElem { index, .. } => collect_vars(index, out),
    }
}

/// The symbolic right side of an assignment command, if the command has one.
/// Fused multiply-add denotes the same value as the unfused tree because both
/// round after the multiply and again after the add.
pub fn command_rhs(cmd: &TacCmd) -> Option<SExpr> {
    match cmd {
        TacCmd::AssignConst { value, .. } => Some(SExpr::Const(*value)),
        TacCmd::AssignUnop { op, src, .. } => match op {
            UnOp::Copy => Some(SExpr::of_operand(src)),
            op => Some(SExpr::Unop(*op, Box::new(SExpr::of_operand(src)))),
        },
        TacCmd::AssignBinop { op, lhs, rhs, .. } => Some(SExpr::Binop(
            *op,
            Box::new(SExpr::of_operand(lhs)),
            Box::new(SExpr::of_operand(rhs)),
        )),
        TacCmd::AssignFma {
            addend,
            mul_l,
            mul_r,
            sign,
            ..
        } => Some(fma_tree(addend, mul_l, mul_r, *sign)),
        _ => None,
    }
}

pub fn fma_tree(addend: &Operand, mul_l: &Operand, mul_r: &Operand, sign: FmaSign) -> SExpr {
    let mul = SExpr::Binop(
        BinOp::FMul,
        Box::new(SExpr::of_operand(mul_l)),
        Box::new(SExpr::of_operand(mul_r)),
    );
    let op = match sign {
        FmaSign::Add => BinOp::FAdd,
        FmaSign::Sub => BinOp::FSub,
    };
    SExpr::Binop(op, Box::new(SExpr::of_operand(addend)), Box::new(mul))
}

/// Renders a normalized expression back as an invariant about `dst`, when it
/// fits one of the three forms.
pub fn as_invariant(dst: &TacName, e: &SExpr) -> Option<SpInvariant> {
    fn as_operand(e: &SExpr) -> Option<Operand> {
        match e {
            SExpr::Const(c) => Some(Operand::Const(*c)),
            SExpr::Var(v) => Some(Operand::Var(v.clone())),
            _ => None,
        }
    }
    match e {
        SExpr::Const(c) => Some(SpInvariant::VarEqConst(dst.clone(), *c)),
        SExpr::Binop(BinOp::FAdd, a, m) => {
            if let SExpr::Binop(BinOp::FMul, l, r) = m.as_ref() {
                Some(SpInvariant::VarEqFma(
                    dst.clone(),
                    as_operand(a)?,
                    as_operand(l)?,
                    as_operand(r)?,
                ))
            } else {
                Some(SpInvariant::VarEqBinop(
                    dst.clone(),
                    BinOp::FAdd,
                    as_operand(a)?,
                    as_operand(m)?,
                ))
            }
        }
        SExpr::Binop(op, a, b) => Some(SpInvariant::VarEqBinop(
            dst.clone(),
            *op,
            as_operand(a)?,
            as_operand(b)?,
        )),
        _ => None,
    }
}

/// Fact store backing normalization: every variable maps to the expressions
/// claimed equal to it. A variable whose claims normalize to two different
/// constants marks the whole store contradictory, which renders any state
/// satisfying it infeasible.
#[derive(Debug, Clone, Default)]
pub struct Facts {
    defs: BTreeMap<TacName, Vec<SExpr>>,
    contradictory: bool,
}

impl Facts {
    pub fn from_invariants(invs: &[SpInvariant]) -> Facts {
        let mut f = Facts::default();
        for inv in invs {
            f.add_invariant(inv);
        }
        f.detect_contradictions();
        f
    }

    pub fn add_invariant(&mut self, inv: &SpInvariant) {
        let (v, e) = invariant_def(inv);
        self.add_def(v, e);
    }

    pub fn add_def(&mut self, v: TacName, e: SExpr) {
        self.defs.entry(v).or_default().push(e);
    }

    pub fn remove_var(&mut self, v: &TacName) {
        self.defs.remove(v);
        self.defs.retain(|_, es| {
            es.retain(|e| !expr_vars(e).contains(v));
            !es.is_empty()
        });
    }

    pub fn is_contradictory(&self) -> bool {
        self.contradictory
    }

    pub fn mark_contradictory(&mut self) {
        self.contradictory = true;
    }

    /// Primary definition used by expansion: prefer a constant claim.
    fn primary(&self, v: &TacName) -> Option<&SExpr> {
        let es = self.defs.get(v)?;
        es.iter()
            .find(|e| matches!(e, SExpr::Const(_)))
            .or_else(|| es.first())
    }

    /// Re-derives the contradiction flag from the claim sets.
    pub fn detect_contradictions(&mut self) {
        if self.contradictory {
            return;
        }
        let vars: Vec<TacName> = self
            .defs
            .iter()
            .filter(|(_, es)| es.len() > 1)
            .map(|(v, _)| v.clone())
            .collect();
        for v in vars {
            let claims = self.defs[&v].clone();
            let consts: BTreeSet<Const> = claims
                .iter()
                .filter_map(|e| normalize(e, self).as_const())
                .collect();
            if consts.len() > 1 {
                self.contradictory = true;
                return;
            }
        }
    }
}

fn invariant_def(inv: &SpInvariant) -> (TacName, SExpr) {
    match inv {
        SpInvariant::VarEqConst(v, c) => (v.clone(), SExpr::Const(*c)),
        SpInvariant::VarEqBinop(v, op, a, b) => (
            v.clone(),
            SExpr::Binop(*op, Box::new(SExpr::of_operand(a)), Box::new(SExpr::of_operand(b))),
        ),
        SpInvariant::VarEqFma(v, a, l, r) => (v.clone(), fma_tree(a, l, r, FmaSign::Add)),
    }
}

/// Normalizes an expression under a fact store: substitute claimed-equal
/// definitions to a fixed point (cycle-safe), fold constants, apply integer
/// and boolean identities, and order commutative operands canonically.
pub fn normalize(e: &SExpr, facts: &Facts) -> SExpr {
    let mut budget = EXPAND_NODE_BUDGET;
    let mut on_stack = BTreeSet::new();
    let expanded = expand(e, facts, &mut on_stack, &mut budget);
    simplify_tree(&expanded)
}

fn expand(
    e: &SExpr,
    facts: &Facts,
    on_stack: &mut BTreeSet<TacName>,
    budget: &mut usize,
) -> SExpr {
    if *budget == 0 {
        return e.clone();
    }
    *budget -= 1;
    match e {
        SExpr::Const(c) => SExpr::Const(*c),
        SExpr::Var(v) => match facts.primary(v) {
            Some(def) if !on_stack.contains(v) => {
                on_stack.insert(v.clone());
                let out = expand(&def.clone(), facts, on_stack, budget);
                on_stack.remove(v);
                out
            }
            _ => SExpr::Var(v.clone()),
        },
        SExpr::Unop(op, a) => SExpr::Unop(*op, Box::new(expand(a, facts, on_stack, budget))),
        SExpr::Binop(op, a, b) => SExpr::Binop(
            *op,
            Box::new(expand(a, facts, on_stack, budget)),
            Box::new(expand(b, facts, on_stack, budget)),
        ),
        SExpr::ArrElem { arr, gen, index } => SExpr::ArrElem {
            arr: arr.clone(),
            gen: *gen,
            index: Box::new(expand(index, facts, on_stack, budget)),
        },
    }
}

fn simplify_tree(e: &SExpr) -> SExpr {
    match e {
        SExpr::Const(_) | SExpr::Var(_) => e.clone(),
        SExpr::ArrElem { arr, gen, index } => SExpr::ArrElem {
            arr: arr.clone(),
            gen: *gen,
            index: Box::new(simplify_tree(index)),
        },
        SExpr::Unop(op, a) => {
            let a = simplify_tree(a);
            if let Some(c) = a.as_const() {
                if let Some(folded) = fold_unop(*op, c) {
                    return SExpr::Const(folded);
                }
            }
            match (op, &a) {
                (UnOp::Copy, _) => a,
                (UnOp::Not, SExpr::Unop(UnOp::Not, inner)) => inner.as_ref().clone(),
                _ => SExpr::Unop(*op, Box::new(a)),
            }
        }
        SExpr::Binop(op, a, b) => {
            let a = simplify_tree(a);
            let b = simplify_tree(b);
            simplify_binop(*op, a, b)
        }
    }
}

fn simplify_binop(op: BinOp, a: SExpr, b: SExpr) -> SExpr {
    // Direction-normalize comparisons so `3 < x` and `x > 3` agree.
    let (op, a, b) = match op {
        BinOp::ICmp(c @ (CmpOp::Gt | CmpOp::Ge)) => (BinOp::ICmp(c.swapped()), b, a),
        BinOp::FCmp(c @ (CmpOp::Gt | CmpOp::Ge)) => (BinOp::FCmp(c.swapped()), b, a),
        op => (op, a, b),
    };

    if let (Some(ca), Some(cb)) = (a.as_const(), b.as_const()) {
        if let Some(folded) = fold_binop(op, ca, cb) {
            return SExpr::Const(folded);
        }
    }

    // Integer identities. Float identities are deliberately absent (NaN and
    // signed-zero hazards); boolean identities are value-level (operands are
    // already evaluated in TAC, so no short-circuit concerns).
    match (op, &a, &b) {
        (BinOp::IAdd, x, SExpr::Const(Const::Int(0))) => return x.clone(),
        (BinOp::IAdd, SExpr::Const(Const::Int(0)), x) => return x.clone(),
        (BinOp::ISub, x, SExpr::Const(Const::Int(0))) => return x.clone(),
        (BinOp::IMul, x, SExpr::Const(Const::Int(1))) => return x.clone(),
        (BinOp::IMul, SExpr::Const(Const::Int(1)), x) => return x.clone(),
        (BinOp::BAnd, x, SExpr::Const(Const::Bool(true))) => return x.clone(),
        (BinOp::BAnd, SExpr::Const(Const::Bool(true)), x) => return x.clone(),
        (BinOp::BOr, x, SExpr::Const(Const::Bool(false))) => return x.clone(),
        (BinOp::BOr, SExpr::Const(Const::Bool(false)), x) => return x.clone(),
        (BinOp::BEq, x, SExpr::Const(Const::Bool(true))) => return x.clone(),
        (BinOp::BEq, SExpr::Const(Const::Bool(true)), x) => return x.clone(),
        (BinOp::BNe, x, SExpr::Const(Const::Bool(false))) => return x.clone(),
        (BinOp::BNe, SExpr::Const(Const::Bool(false)), x) => return x.clone(),
        _ => {}
    }

    // Reflexive integer/boolean comparisons (pure expressions, so evaluating
    // `x` twice is the same value; floats excluded because of NaN).
    if a == b {
        match op {
            BinOp::ICmp(CmpOp::Eq) | BinOp::ICmp(CmpOp::Le) | BinOp::BEq => {
                return SExpr::Const(Const::Bool(true))
            }
            BinOp::ICmp(CmpOp::Ne) | BinOp::ICmp(CmpOp::Lt) | BinOp::BNe => {
                return SExpr::Const(Const::Bool(false))
            }
            _ => {}
        }
    }

    if op.commutes() && a > b {
        return SExpr::Binop(op, Box::new(b), Box::new(a));
    }
    SExpr::Binop(op, Box::new(a), Box::new(b))
}

fn fold_unop(op: UnOp, c: Const) -> Option<Const> {
    Some(match (op, c) {
        (UnOp::Copy, c) => c,
        (UnOp::NegI, Const::Int(v)) => Const::Int(v.wrapping_neg()),
        (UnOp::NegF, Const::Float(bits)) => Const::float(-bits.value()),
        (UnOp::Not, Const::Bool(v)) => Const::Bool(!v),
        (UnOp::IntToFloat, Const::Int(v)) => Const::float(v as f64),
        (UnOp::FloatToInt, Const::Float(bits)) => {
            Const::Int(crate::ast::interp::float_to_int(bits.value()))
        }
        _ => return None, // ill-typed; leave unfolded, well-formedness rejects elsewhere
    })
}

/// Exact constant folding through the interpreter's own operator semantics.
/// Division/remainder with a zero divisor never folds.
fn fold_binop(op: BinOp, a: Const, b: Const) -> Option<Const> {
    if a.ty() != op.sig().0 || b.ty() != op.sig().0 {
        return None;
    }
    let v = eval_binop(op, const_value(a), const_value(b))?;
    Some(match v {
        Value::Int(x) => Const::Int(x),
        Value::Float(x) => Const::float(x),
        Value::Bool(x) => Const::Bool(x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: &str) -> SExpr {
        SExpr::Var(TacName::source(n))
    }
    fn int(v: i64) -> SExpr {
        SExpr::Const(Const::Int(v))
    }
    fn add(a: SExpr, b: SExpr) -> SExpr {
        SExpr::Binop(BinOp::IAdd, Box::new(a), Box::new(b))
    }

    #[test]
    fn additive_identity() {
        let e = add(var("x"), int(0));
        assert_eq!(normalize(&e, &Facts::default()), var("x"));
    }

    #[test]
    fn substitution_from_facts() {
        let facts = Facts::from_invariants(&[SpInvariant::VarEqConst(
            TacName::source("y"),
            Const::Int(5),
        )]);
        assert_eq!(normalize(&var("y"), &facts), int(5));
        assert_eq!(normalize(&add(var("y"), int(1)), &facts), int(6));
    }

    #[test]
    fn comparison_direction_normalizes() {
        let lhs = SExpr::Binop(
            BinOp::ICmp(CmpOp::Lt),
            Box::new(int(3)),
            Box::new(var("x")),
        );
        let rhs = SExpr::Binop(
            BinOp::ICmp(CmpOp::Gt),
            Box::new(var("x")),
            Box::new(int(3)),
        );
        let f = Facts::default();
        assert_eq!(normalize(&lhs, &f), normalize(&rhs, &f));
    }

    #[test]
    fn float_multiplication_does_not_commute() {
        let a = SExpr::Binop(BinOp::FMul, Box::new(var("b")), Box::new(var("a")));
        let n = normalize(&a, &Facts::default());
        assert_eq!(n, a, "fmul operand order must be preserved");
        let fadd = SExpr::Binop(BinOp::FAdd, Box::new(var("b")), Box::new(var("a")));
        let n = normalize(&fadd, &Facts::default());
        // fadd commutes by the adopted axiom, so operands sort.
        assert_eq!(
            n,
            SExpr::Binop(BinOp::FAdd, Box::new(var("a")), Box::new(var("b")))
        );
    }

    #[test]
    fn division_by_zero_never_folds() {
        let e = SExpr::Binop(BinOp::IDiv, Box::new(int(5)), Box::new(int(0)));
        let n = normalize(&e, &Facts::default());
        assert!(matches!(n, SExpr::Binop(BinOp::IDiv, _, _)));
    }

    #[test]
    fn contradictory_constants_detected() {
        let facts = Facts::from_invariants(&[
            SpInvariant::VarEqConst(TacName::source("v"), Const::Int(1)),
            SpInvariant::VarEqConst(TacName::source("v"), Const::Int(2)),
        ]);
        assert!(facts.is_contradictory());
    }

    #[test]
    fn derived_contradiction_through_binop_fact() {
        // cond == (i < n), i == 0, n == 100, and an edge claim cond == false.
        let facts = Facts::from_invariants(&[
            SpInvariant::VarEqBinop(
                TacName::source("cond"),
                BinOp::ICmp(CmpOp::Lt),
                Operand::Var(TacName::source("i")),
                Operand::Var(TacName::source("n")),
            ),
            SpInvariant::VarEqConst(TacName::source("i"), Const::Int(0)),
            SpInvariant::VarEqConst(TacName::source("n"), Const::Int(100)),
            SpInvariant::VarEqConst(TacName::source("cond"), Const::Bool(false)),
        ]);
        assert!(facts.is_contradictory());
    }

    #[test]
    fn cyclic_facts_terminate() {
        let facts = Facts::from_invariants(&[
            SpInvariant::VarEqBinop(
                TacName::source("a"),
                BinOp::IAdd,
                Operand::Var(TacName::source("b")),
                Operand::Const(Const::Int(1)),
            ),
            SpInvariant::VarEqBinop(
                TacName::source("b"),
                BinOp::IAdd,
                Operand::Var(TacName::source("a")),
                Operand::Const(Const::Int(1)),
            ),
        ]);
        // Must not hang or overflow; exact result shape is unimportant.
        let _ = normalize(&var("a"), &facts);
    }

    #[test]
    fn idempotence_samples() {
        let facts = Facts::from_invariants(&[
            SpInvariant::VarEqConst(TacName::source("k"), Const::Int(7)),
            SpInvariant::VarEqBinop(
                TacName::source("s"),
                BinOp::IAdd,
                Operand::Var(TacName::source("x")),
                Operand::Var(TacName::source("k")),
            ),
        ]);
        for e in [
            add(var("s"), int(0)),
            add(var("x"), var("k")),
            SExpr::Binop(BinOp::ICmp(CmpOp::Gt), Box::new(var("s")), Box::new(int(3))),
        ] {
            let once = normalize(&e, &facts);
            let twice = normalize(&once, &facts);
            assert_eq!(once, twice);
        }
    }
}
