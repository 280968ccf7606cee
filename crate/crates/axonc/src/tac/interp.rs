//! Small-step TAC interpreter. Value rules match the AST interpreter exactly;
//! the observable final store projects onto source-named variables only.

use super::{BinOp, CmpOp, Const, FmaSign, Operand, PrintKind, TacCmd, TacName, TacProgram, UnOp};
use crate::ast::interp::{float_to_int, int_div, int_rem};
use crate::ast::{Behavior, FloatBits, OutputEvent, ScalarType, Store, Value};
use std::collections::BTreeMap;

pub(crate) fn const_value(c: Const) -> Value {
    match c {
        Const::Int(v) => Value::Int(v),
        Const::Float(bits) => Value::Float(bits.value()),
        Const::Bool(v) => Value::Bool(v),
    }
}

/// Executes a well-formed TAC program. Fuel is charged per command.
pub fn eval_tac(p: &TacProgram, fuel: u64) -> Behavior {
    let mut scalars: BTreeMap<TacName, Value> = p
        .ctx
        .iter()
        .map(|(name, ty)| (name.clone(), Value::zero(*ty)))
        .collect();
    let mut arrays: BTreeMap<String, Vec<Value>> = p
        .arrays
        .iter()
        .map(|(name, (ty, len))| (name.clone(), vec![Value::zero(*ty); *len as usize]))
        .collect();
    let mut output: Vec<OutputEvent> = Vec::new();
    let mut pc = 0usize;
    let mut fuel = fuel;

    let read = |scalars: &BTreeMap<TacName, Value>, op: &Operand| -> Value {
        match op {
            Operand::Var(v) => *scalars.get(v).expect("well-formed program"),
            Operand::Const(c) => const_value(*c),
        }
    };

    loop {
        if fuel == 0 {
            return Behavior::Diverge { output };
        }
        fuel -= 1;
        let cmd = &p.cmds[pc];
        match cmd {
            TacCmd::AssignConst { dst, value } => {
                scalars.insert(dst.clone(), const_value(*value));
                pc += 1;
            }
            TacCmd::AssignUnop { dst, op, src } => {
                let v = read(&scalars, src);
                let out = match op {
                    UnOp::Copy => v,
                    UnOp::NegI => Value::Int(v.as_int().wrapping_neg()),
                    UnOp::NegF => Value::Float(-v.as_float()),
                    UnOp::Not => Value::Bool(!v.as_bool()),
                    UnOp::IntToFloat => Value::Float(v.as_int() as f64),
                    UnOp::FloatToInt => Value::Int(float_to_int(v.as_float())),
                };
                scalars.insert(dst.clone(), out);
                pc += 1;
            }
            TacCmd::AssignBinop { dst, op, lhs, rhs } => {
                let a = read(&scalars, lhs);
                let b = read(&scalars, rhs);
                match eval_binop(*op, a, b) {
                    Some(v) => {
                        scalars.insert(dst.clone(), v);
                        pc += 1;
                    }
                    None => return Behavior::DivByZero { output },
                }
            }
            TacCmd::AssignFma {
                dst,
                addend,
                mul_l,
                mul_r,
                sign,
            } => {
                let a = read(&scalars, addend).as_float();
                let l = read(&scalars, mul_l).as_float();
                let r = read(&scalars, mul_r).as_float();
                // Multiply rounds, then the add/subtract rounds again.
                let m = l * r;
                let v = match sign {
                    FmaSign::Add => a + m,
                    FmaSign::Sub => a - m,
                };
                scalars.insert(dst.clone(), Value::Float(v));
                pc += 1;
            }
            TacCmd::ArrayLoad { dst, arr, index } => {
                let i = read(&scalars, index).as_int();
                let data = arrays.get(arr).expect("well-formed program");
                if i < 0 || i as usize >= data.len() {
                    return Behavior::OutOfBounds { output };
                }
                scalars.insert(dst.clone(), data[i as usize]);
                pc += 1;
            }
            TacCmd::ArrayStore { arr, index, value } => {
                let i = read(&scalars, index).as_int();
                let v = read(&scalars, value);
                let data = arrays.get_mut(arr).expect("well-formed program");
                if i < 0 || i as usize >= data.len() {
                    return Behavior::OutOfBounds { output };
                }
                data[i as usize] = v;
                pc += 1;
            }
            TacCmd::Goto(target) => pc = *target,
            TacCmd::IfGoto { cond, target } => {
                let taken = scalars
                    .get(cond)
                    .expect("well-formed program")
                    .as_bool();
                pc = if taken { *target } else { pc + 1 };
            }
            TacCmd::PrintStr(text) => {
                output.push(OutputEvent::Str(text.clone()));
                pc += 1;
            }
            TacCmd::Print { kind, value } => {
                let v = read(&scalars, value);
                output.push(match kind {
                    PrintKind::Int => OutputEvent::Int(v.as_int()),
                    PrintKind::Float => OutputEvent::Float(FloatBits::from_f64(v.as_float())),
                    PrintKind::Bool => OutputEvent::Bool(v.as_bool()),
                });
                pc += 1;
            }
            TacCmd::Halt => {
                let mut store = Store::default();
                for (name, v) in &scalars {
                    if let TacName::Source(s) = name {
                        store.scalars.insert(s.clone(), *v);
                    }
                }
                store.arrays = arrays;
                return Behavior::Halt { store, output };
            }
        }
    }
}

pub(crate) fn eval_binop(op: BinOp, a: Value, b: Value) -> Option<Value> {
    use BinOp::*;
    Some(match op {
        IAdd => Value::Int(a.as_int().wrapping_add(b.as_int())),
        ISub => Value::Int(a.as_int().wrapping_sub(b.as_int())),
        IMul => Value::Int(a.as_int().wrapping_mul(b.as_int())),
        IDiv => Value::Int(int_div(a.as_int(), b.as_int())?),
        IRem => Value::Int(int_rem(a.as_int(), b.as_int())?),
        FAdd => Value::Float(a.as_float() + b.as_float()),
        FSub => Value::Float(a.as_float() - b.as_float()),
        FMul => Value::Float(a.as_float() * b.as_float()),
        FDiv => Value::Float(a.as_float() / b.as_float()),
        ICmp(c) => Value::Bool(eval_icmp(c, a.as_int(), b.as_int())),
        FCmp(c) => Value::Bool(eval_fcmp(c, a.as_float(), b.as_float())),
        BEq => Value::Bool(a.as_bool() == b.as_bool()),
        BNe => Value::Bool(a.as_bool() != b.as_bool()),
        BAnd => Value::Bool(a.as_bool() && b.as_bool()),
        BOr => Value::Bool(a.as_bool() || b.as_bool()),
    })
}

pub(crate) fn eval_icmp(c: CmpOp, a: i64, b: i64) -> bool {
    match c {
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
    }
}

pub(crate) fn eval_fcmp(c: CmpOp, a: f64, b: f64) -> bool {
    match c {
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
    }
}

/// Scalar type of each scalar in the four allowed positions matches ctx; used
/// by tests as the instrumented type-preservation mode.
#[cfg(test)]
pub fn eval_tac_checked(p: &TacProgram, fuel: u64) -> Behavior {
    // The plain interpreter already debug-asserts via typed accessors; this
    // alias exists so tests read clearly.
    eval_tac(p, fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ScalarType;

    fn prog(cmds: Vec<TacCmd>) -> TacProgram {
        let mut p = TacProgram {
            cmds,
            ..Default::default()
        };
        p.ctx.insert(TacName::source("x"), ScalarType::Int);
        p.ctx.insert(TacName::source("z"), ScalarType::Int);
        p
    }

    #[test]
    fn print_of_assigned_constant() {
        let b = eval_tac(
            &prog(vec![
                TacCmd::AssignConst {
                    dst: TacName::source("x"),
                    value: Const::Int(1),
                },
                TacCmd::Print {
                    kind: PrintKind::Int,
                    value: Operand::Var(TacName::source("x")),
                },
                TacCmd::Halt,
            ]),
            100,
        );
        match b {
            Behavior::Halt { output, .. } => assert_eq!(output, vec![OutputEvent::Int(1)]),
            other => panic!("expected halt, got {other:?}"),
        }
    }

    #[test]
    fn division_by_zero_variable_traps() {
        let b = eval_tac(
            &prog(vec![
                TacCmd::AssignBinop {
                    dst: TacName::source("x"),
                    op: BinOp::IDiv,
                    lhs: Operand::Var(TacName::source("x")),
                    rhs: Operand::Var(TacName::source("z")),
                },
                TacCmd::Halt,
            ]),
            100,
        );
        assert!(matches!(b, Behavior::DivByZero { .. }));
    }

    #[test]
    fn fuel_exhaustion_is_divergence() {
        let b = eval_tac(&prog(vec![TacCmd::Goto(0), TacCmd::Halt]), 10);
        assert!(matches!(b, Behavior::Diverge { .. }));
    }
}
