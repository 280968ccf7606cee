//! Big-step reference interpreter for the AST. This is the behavioral
//! specification every later stage is compared against.
//!
//! Value rules: integers are two's-complement 64-bit and wrap; division and
//! remainder truncate toward zero and trap on a zero divisor; floats are IEEE
//! binary64 with round-to-nearest-even; floatToInt truncates toward zero,
//! saturates at the signed 64-bit bounds, and maps NaN to 0.

use super::{
    AstBinOp, AstProgram, Behavior, Expr, ExprKind, FloatBits, OutputEvent, ScalarType, Stmt,
    StmtKind, Store, TypingContext, UnaryOp, Value,
};

/// Fuel is charged once per executed statement and once per condition check,
/// so one unit of AST fuel covers at most one statement's worth of work.
pub const AST_FUEL_PER_STMT: u64 = 1;

enum Trap {
    DivByZero,
    OutOfBounds,
}

enum Stop {
    Trap(Trap),
    OutOfFuel,
}

struct Interp<'a> {
    ctx: &'a TypingContext,
    store: Store,
    output: Vec<OutputEvent>,
    fuel: u64,
}

/// Runs a well-formed program to a behavior. Deterministic: two calls with
/// the same inputs agree exactly, including float bit patterns.
pub fn eval_ast(p: &AstProgram, ctx: &TypingContext, fuel: u64) -> Behavior {
    let mut interp = Interp {
        ctx,
        store: Store::zeroed(ctx),
        output: Vec::new(),
        fuel,
    };
    match interp.run_block(&p.body) {
        Ok(()) => Behavior::Halt {
            store: interp.store,
            output: interp.output,
        },
        Err(Stop::Trap(Trap::DivByZero)) => Behavior::DivByZero {
            output: interp.output,
        },
        Err(Stop::Trap(Trap::OutOfBounds)) => Behavior::OutOfBounds {
            output: interp.output,
        },
        Err(Stop::OutOfFuel) => Behavior::Diverge {
            output: interp.output,
        },
    }
}

impl<'a> Interp<'a> {
    fn charge(&mut self) -> Result<(), Stop> {
        if self.fuel == 0 {
            return Err(Stop::OutOfFuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn run_block(&mut self, stmts: &[Stmt]) -> Result<(), Stop> {
        for s in stmts {
            self.run_stmt(s)?;
        }
        Ok(())
    }

    fn run_stmt(&mut self, s: &Stmt) -> Result<(), Stop> {
        match &s.kind {
            StmtKind::Assign(name, e) => {
                self.charge()?;
                let v = self.eval(e)?;
                debug_assert_eq!(
                    Some(v.scalar_type()),
                    self.ctx.scalar(name),
                    "type preservation violated for `{name}`"
                );
                self.store.scalars.insert(name.clone(), v);
                Ok(())
            }
            StmtKind::AssignIndex(name, index, e) => {
                self.charge()?;
                let i = self.eval(index)?.as_int();
                let v = self.eval(e)?;
                let arr = self
                    .store
                    .arrays
                    .get_mut(name)
                    .expect("well-formed program references declared arrays");
                if i < 0 || i as usize >= arr.len() {
                    return Err(Stop::Trap(Trap::OutOfBounds));
                }
                debug_assert_eq!(v.scalar_type(), arr[i as usize].scalar_type());
                arr[i as usize] = v;
                Ok(())
            }
            StmtKind::While(cond, body) => loop {
                self.charge()?;
                if !self.eval(cond)?.as_bool() {
                    return Ok(());
                }
                self.run_block(body)?;
            },
            StmtKind::If(cond, then_body, else_body) => {
                self.charge()?;
                if self.eval(cond)?.as_bool() {
                    self.run_block(then_body)
                } else if let Some(eb) = else_body {
                    self.run_block(eb)
                } else {
                    Ok(())
                }
            }
            StmtKind::PrintString(text) => {
                self.charge()?;
                self.output.push(OutputEvent::Str(text.clone()));
                Ok(())
            }
            StmtKind::PrintInt(e) => {
                self.charge()?;
                let v = self.eval(e)?.as_int();
                self.output.push(OutputEvent::Int(v));
                Ok(())
            }
            StmtKind::PrintFloat(e) => {
                self.charge()?;
                let v = self.eval(e)?.as_float();
                self.output.push(OutputEvent::Float(FloatBits::from_f64(v)));
                Ok(())
            }
            StmtKind::PrintBool(e) => {
                self.charge()?;
                let v = self.eval(e)?.as_bool();
                self.output.push(OutputEvent::Bool(v));
                Ok(())
            }
            StmtKind::Goto(_) | StmtKind::Label(..) => {
                unreachable!("goto/label rejected by well-formedness")
            }
        }
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, Stop> {
        match &e.kind {
            ExprKind::IntLit(v) => Ok(Value::Int(*v)),
            ExprKind::FloatLit(v) => Ok(Value::Float(*v)),
            ExprKind::BoolLit(v) => Ok(Value::Bool(*v)),
            ExprKind::Var(name) => Ok(*self
                .store
                .scalars
                .get(name)
                .expect("well-formed program references declared scalars")),
            ExprKind::Index(name, index) => {
                let i = self.eval(index)?.as_int();
                let arr = self
                    .store
                    .arrays
                    .get(name)
                    .expect("well-formed program references declared arrays");
                if i < 0 || i as usize >= arr.len() {
                    return Err(Stop::Trap(Trap::OutOfBounds));
                }
                Ok(arr[i as usize])
            }
            ExprKind::Unary(op, inner) => {
                let v = self.eval(inner)?;
                Ok(match (op, v) {
                    (UnaryOp::Neg, Value::Int(x)) => Value::Int(x.wrapping_neg()),
                    (UnaryOp::Neg, Value::Float(x)) => Value::Float(-x),
                    (UnaryOp::Not, Value::Bool(x)) => Value::Bool(!x),
                    _ => unreachable!("type-checked unary"),
                })
            }
            ExprKind::Binary(op, lhs, rhs) => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                eval_binop(*op, a, b).map_err(Stop::Trap)
            }
            ExprKind::IntToFloat(inner) => {
                let v = self.eval(inner)?.as_int();
                Ok(Value::Float(v as f64))
            }
            ExprKind::FloatToInt(inner) => {
                let v = self.eval(inner)?.as_float();
                Ok(Value::Int(float_to_int(v)))
            }
        }
    }
}

/// `fcvtzs`-style conversion: truncate toward zero, saturate, NaN → 0.
/// Rust's `as` cast has exactly these semantics.
pub fn float_to_int(v: f64) -> i64 {
    v as i64
}

fn eval_binop(op: AstBinOp, a: Value, b: Value) -> Result<Value, Trap> {
    use AstBinOp::*;
    Ok(match (a, b) {
        (Value::Int(x), Value::Int(y)) => match op {
            Add => Value::Int(x.wrapping_add(y)),
            Sub => Value::Int(x.wrapping_sub(y)),
            Mul => Value::Int(x.wrapping_mul(y)),
            Div => {
                if y == 0 {
                    return Err(Trap::DivByZero);
                }
                Value::Int(x.wrapping_div(y))
            }
            Rem => {
                if y == 0 {
                    return Err(Trap::DivByZero);
                }
                Value::Int(x.wrapping_rem(y))
            }
            Lt => Value::Bool(x < y),
            Le => Value::Bool(x <= y),
            Gt => Value::Bool(x > y),
            Ge => Value::Bool(x >= y),
            Eq => Value::Bool(x == y),
            Ne => Value::Bool(x != y),
            And | Or => unreachable!("type-checked logical op"),
        },
        (Value::Float(x), Value::Float(y)) => match op {
            Add => Value::Float(x + y),
            Sub => Value::Float(x - y),
            Mul => Value::Float(x * y),
            Div => Value::Float(x / y),
            Lt => Value::Bool(x < y),
            Le => Value::Bool(x <= y),
            Gt => Value::Bool(x > y),
            Ge => Value::Bool(x >= y),
            Eq => Value::Bool(x == y),
            Ne => Value::Bool(x != y),
            Rem | And | Or => unreachable!("type-checked float op"),
        },
        (Value::Bool(x), Value::Bool(y)) => match op {
            And => Value::Bool(x && y),
            Or => Value::Bool(x || y),
            Eq => Value::Bool(x == y),
            Ne => Value::Bool(x != y),
            _ => unreachable!("type-checked bool op"),
        },
        _ => unreachable!("type-checked operand pairing"),
    })
}

/// Fuel for integer binops shared with the TAC interpreter so the two layers
/// agree on arithmetic exactly.
pub(crate) fn int_div(x: i64, y: i64) -> Option<i64> {
    if y == 0 {
        None
    } else {
        Some(x.wrapping_div(y))
    }
}

pub(crate) fn int_rem(x: i64, y: i64) -> Option<i64> {
    if y == 0 {
        None
    } else {
        Some(x.wrapping_rem(y))
    }
}
