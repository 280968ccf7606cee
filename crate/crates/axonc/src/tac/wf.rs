//! TAC well-formedness: label ranges, typing consistency, register pool
//! bounds, and the guarantee that execution never falls off the end of the
//! command array.

use super::{
    reachable, successors, FmaSign, Operand, TacCmd, TacName, TacProgram, UnOp, FLOAT_REG_POOL,
    INT_REG_POOL,
};
use crate::ast::ScalarType;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TacWfKind {
    LabelOutOfRange,
    Type,
    UnknownVariable,
    UnknownArray,
    RegisterOutOfPool,
    FallsOffEnd,
    ReservedSourceName,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TacWfError {
    pub index: usize,
    pub kind: TacWfKind,
    pub detail: String,
}

impl fmt::Display for TacWfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}: {:?}: {}", self.index, self.kind, self.detail)
    }
}

impl std::error::Error for TacWfError {}

/// Evidence of a passed check.
#[derive(Debug, Clone, Copy)]
pub struct TacEvidence(());

pub fn check_tac_well_formed(p: &TacProgram) -> Result<TacEvidence, TacWfError> {
    let err = |index: usize, kind: TacWfKind, detail: String| TacWfError {
        index,
        kind,
        detail,
    };

    for (name, _) in p.ctx.iter() {
        if let TacName::Source(s) = name {
            if s.starts_with("__") {
                return Err(err(
                    0,
                    TacWfKind::ReservedSourceName,
                    format!("source name `{s}` uses the reserved prefix"),
                ));
            }
        }
        if let TacName::Reg(ty, n) = name {
            let pool = match ty {
                ScalarType::Float => FLOAT_REG_POOL,
                _ => INT_REG_POOL,
            };
            if *n == 0 || *n > pool {
                return Err(err(
                    0,
                    TacWfKind::RegisterOutOfPool,
                    format!("register `{name}` outside pool 1..={pool}"),
                ));
            }
        }
    }

    let n = p.cmds.len();
    let var_ty = |i: usize, v: &TacName| -> Result<ScalarType, TacWfError> {
        p.scalar_type(v).ok_or_else(|| {
            err(
                i,
                TacWfKind::UnknownVariable,
                format!("`{v}` not in typing context"),
            )
        })
    };
    let operand_ty = |i: usize, o: &Operand| -> Result<ScalarType, TacWfError> {
        match o {
            Operand::Var(v) => var_ty(i, v),
            Operand::Const(c) => Ok(c.ty()),
        }
    };

    for (i, cmd) in p.cmds.iter().enumerate() {
        match cmd {
            TacCmd::AssignConst { dst, value } => {
                let dt = var_ty(i, dst)?;
                if dt != value.ty() {
                    return Err(err(
                        i,
                        TacWfKind::Type,
                        format!("constant {value} assigned to {dt} variable `{dst}`"),
                    ));
                }
            }
            TacCmd::AssignUnop { dst, op, src } => {
                let dt = var_ty(i, dst)?;
                let st = operand_ty(i, src)?;
                match op.sig() {
                    Some((want_in, want_out)) => {
                        if st != want_in || dt != want_out {
                            return Err(err(
                                i,
                                TacWfKind::Type,
                                format!("{op:?} applied as {st} -> {dt}"),
                            ));
                        }
                    }
                    None => {
                        if st != dt {
                            return Err(err(
                                i,
                                TacWfKind::Type,
                                format!("copy of {st} into {dt} variable `{dst}`"),
                            ));
                        }
                    }
                }
            }
            TacCmd::AssignBinop { dst, op, lhs, rhs } => {
                let dt = var_ty(i, dst)?;
                let lt = operand_ty(i, lhs)?;
                let rt = operand_ty(i, rhs)?;
                let (want_in, want_out) = op.sig();
                if lt != want_in || rt != want_in || dt != want_out {
                    return Err(err(
                        i,
                        TacWfKind::Type,
                        format!("{op:?} applied as ({lt}, {rt}) -> {dt}"),
                    ));
                }
            }
            TacCmd::AssignFma {
                dst,
                addend,
                mul_l,
                mul_r,
                sign: FmaSign::Add | FmaSign::Sub,
            } => {
                let all_float = var_ty(i, dst)? == ScalarType::Float
                    && operand_ty(i, addend)? == ScalarType::Float
                    && operand_ty(i, mul_l)? == ScalarType::Float
                    && operand_ty(i, mul_r)? == ScalarType::Float;
                if !all_float {
                    return Err(err(i, TacWfKind::Type, "fma is float-only".to_string()));
                }
            }
            TacCmd::ArrayLoad { dst, arr, index } => {
                let Some((elem, _)) = p.arrays.get(arr).copied() else {
                    return Err(err(
                        i,
                        TacWfKind::UnknownArray,
                        format!("array `{arr}` not declared"),
                    ));
                };
                if var_ty(i, dst)? != elem {
                    return Err(err(i, TacWfKind::Type, format!("load of {elem} array `{arr}` into `{dst}`")));
                }
                if operand_ty(i, index)? != ScalarType::Int {
                    return Err(err(i, TacWfKind::Type, "array index must be int".to_string()));
                }
            }
            TacCmd::ArrayStore { arr, index, value } => {
                let Some((elem, _)) = p.arrays.get(arr).copied() else {
                    return Err(err(
                        i,
                        TacWfKind::UnknownArray,
                        format!("array `{arr}` not declared"),
                    ));
                };
                if operand_ty(i, index)? != ScalarType::Int {
                    return Err(err(i, TacWfKind::Type, "array index must be int".to_string()));
                }
                if operand_ty(i, value)? != elem {
                    return Err(err(i, TacWfKind::Type, format!("store of wrong element type into `{arr}`")));
                }
            }
            TacCmd::Goto(target) => {
                if *target >= n {
                    return Err(err(
                        i,
                        TacWfKind::LabelOutOfRange,
                        format!("goto {target} in a {n}-command program"),
                    ));
                }
            }
            TacCmd::IfGoto { cond, target } => {
                if *target >= n {
                    return Err(err(
                        i,
                        TacWfKind::LabelOutOfRange,
                        format!("if-goto {target} in a {n}-command program"),
                    ));
                }
                if var_ty(i, cond)? != ScalarType::Bool {
                    return Err(err(
                        i,
                        TacWfKind::Type,
                        format!("if-goto condition `{cond}` is not bool"),
                    ));
                }
            }
            TacCmd::PrintStr(_) => {}
            TacCmd::Print { kind, value } => {
                if operand_ty(i, value)? != kind.ty() {
                    return Err(err(
                        i,
                        TacWfKind::Type,
                        format!("print {:?} of a {} operand", kind, operand_ty(i, value)?),
                    ));
                }
            }
            TacCmd::Halt => {}
        }
    }

    // Every reachable path must end in Halt rather than running off the end.
    if n == 0 {
        return Err(err(
            0,
            TacWfKind::FallsOffEnd,
            "empty program has no halt".to_string(),
        ));
    }
    let reach = reachable(p);
    for (i, cmd) in p.cmds.iter().enumerate() {
        if !reach[i] {
            continue;
        }
        for s in successors(cmd, i) {
            if s >= n {
                return Err(err(
                    i,
                    TacWfKind::FallsOffEnd,
                    "control falls off the end of the program".to_string(),
                ));
            }
        }
    }
    Ok(TacEvidence(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tac::Const;

    fn base() -> TacProgram {
        let mut p = TacProgram::default();
        p.ctx.insert(TacName::source("x"), ScalarType::Int);
        p.ctx
            .insert(TacName::Temp(ScalarType::Bool, 1), ScalarType::Bool);
        p
    }

    #[test]
    fn goto_out_of_range_rejected() {
        let mut p = base();
        p.cmds = vec![TacCmd::Goto(99), TacCmd::Halt, TacCmd::Halt];
        let e = check_tac_well_formed(&p).unwrap_err();
        assert_eq!(e.kind, TacWfKind::LabelOutOfRange);
    }

    #[test]
    fn if_goto_on_int_rejected() {
        let mut p = base();
        p.cmds = vec![
            TacCmd::IfGoto {
                cond: TacName::source("x"),
                target: 1,
            },
            TacCmd::Halt,
        ];
        let e = check_tac_well_formed(&p).unwrap_err();
        assert_eq!(e.kind, TacWfKind::Type);
    }

    #[test]
    fn falling_off_the_end_rejected() {
        let mut p = base();
        p.cmds = vec![TacCmd::AssignConst {
            dst: TacName::source("x"),
            value: Const::Int(1),
        }];
        let e = check_tac_well_formed(&p).unwrap_err();
        assert_eq!(e.kind, TacWfKind::FallsOffEnd);
    }

    #[test]
    fn register_pool_bounds_enforced() {
        let mut p = base();
        p.ctx
            .insert(TacName::Reg(ScalarType::Int, 11), ScalarType::Int);
        p.cmds = vec![TacCmd::Halt];
        let e = check_tac_well_formed(&p).unwrap_err();
        assert_eq!(e.kind, TacWfKind::RegisterOutOfPool);
    }

    #[test]
    fn flatten_output_is_well_formed() {
        use crate::ast::{check_well_formed, type_check};
        use crate::frontend::parse_source;
        let src = "int x; int[3] a; bool b; float f;\n\
                   x = 1 + 2 * 3;\n\
                   while (x > 0) { a[x] = x; x = x - 1; }\n\
                   if (b) { f = 1.5; } else { f = intToFloat(x); }\n\
                   printFloat f;";
        let p = parse_source(src).unwrap();
        let ctx = type_check(&p).unwrap();
        let ev = check_well_formed(&p).unwrap();
        let (t, _) = crate::tac::flatten(&p, &ctx, &ev);
        assert!(check_tac_well_formed(&t).is_ok());
    }
}
