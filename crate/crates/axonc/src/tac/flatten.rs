//! AST → TAC flattening. Each compound subexpression lands in a fresh typed
//! temporary, numbered in first-assignment order starting at 1 per kind.
//! Structured control compiles to goto/if-goto; the loop/branch condition is
//! materialized into a boolean temporary and its negation drives the single
//! if-goto polarity.

use super::{BinOp, CmpOp, Const, Operand, PrintKind, TacCmd, TacName, TacProgram, UnOp};
use crate::ast::typecheck::check_expr;
use crate::ast::{
    AstBinOp, AstProgram, Expr, ExprKind, ScalarType, Stmt, StmtKind, TypingContext, UnaryOp,
    ValueType, WellFormedEvidence,
};

/// Static expansion data used to scale step budgets across layers: one
/// charged AST step never executes more than `max_cmds_per_step` TAC
/// commands.
#[derive(Debug, Clone, Copy)]
pub struct FlattenInfo {
    pub max_cmds_per_step: u64,
}

impl FlattenInfo {
    /// TAC fuel sufficient to replay `ast_fuel` charged AST steps.
    pub fn scale_fuel(&self, ast_fuel: u64) -> u64 {
        ast_fuel
            .saturating_mul(self.max_cmds_per_step)
            .saturating_add(8)
    }
}

const PLACEHOLDER: usize = usize::MAX;

struct Flattener<'a> {
    ctx: &'a TypingContext,
    cmds: Vec<TacCmd>,
    out: TacProgram,
    next_temp: [u32; 3],
    max_span: u64,
}

pub fn flatten(p: &AstProgram, ctx: &TypingContext, _ev: &WellFormedEvidence) -> (TacProgram, FlattenInfo) {
    let mut out = TacProgram::default();
    for (name, ty) in &ctx.vars {
        match ty {
            ValueType::Scalar(s) => {
                out.ctx.insert(TacName::source(name.clone()), *s);
            }
            ValueType::Array(s, n) => {
                out.arrays.insert(name.clone(), (*s, *n));
            }
        }
    }
    let mut fl = Flattener {
        ctx,
        cmds: Vec::new(),
        out,
        next_temp: [1, 1, 1],
        max_span: 1,
    };
    fl.block(&p.body);
    fl.cmds.push(TacCmd::Halt);
    let mut prog = fl.out;
    prog.cmds = fl.cmds;
    (
        prog,
        FlattenInfo {
            max_cmds_per_step: fl.max_span,
        },
    )
}

impl<'a> Flattener<'a> {
    fn fresh(&mut self, ty: ScalarType) -> TacName {
        let slot = match ty {
            ScalarType::Int => 0,
            ScalarType::Float => 1,
            ScalarType::Bool => 2,
        };
        let n = self.next_temp[slot];
        self.next_temp[slot] += 1;
        let name = TacName::Temp(ty, n);
        self.out.ctx.insert(name.clone(), ty);
        name
    }

    fn emit(&mut self, cmd: TacCmd) -> usize {
        self.cmds.push(cmd);
        self.cmds.len() - 1
    }

    fn here(&self) -> usize {
        self.cmds.len()
    }

    fn note_span(&mut self, start: usize, extra: u64) {
        let span = (self.here() - start) as u64 + extra;
        self.max_span = self.max_span.max(span.max(1));
    }

    fn block(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Assign(name, e) => {
                let start = self.here();
                let dst = TacName::source(name.clone());
                match self.expr(e) {
                    Operand::Const(c) => {
                        self.emit(TacCmd::AssignConst { dst, value: c });
                    }
                    src => {
                        self.emit(TacCmd::AssignUnop {
                            dst,
                            op: UnOp::Copy,
                            src,
                        });
                    }
                }
                self.note_span(start, 0);
            }
            StmtKind::AssignIndex(name, index, e) => {
                let start = self.here();
                let index = self.expr(index);
                let value = self.expr(e);
                self.emit(TacCmd::ArrayStore {
                    arr: name.clone(),
                    index,
                    value,
                });
                self.note_span(start, 0);
            }
            StmtKind::While(cond, body) => {
                let head = self.here();
                let exit_jump = self.cond_exit_jump(cond);
                self.note_span(head, 1); // head span plus the back edge
                self.block(body);
                self.emit(TacCmd::Goto(head));
                let exit = self.here();
                self.patch(exit_jump, exit);
            }
            StmtKind::If(cond, then_body, else_body) => {
                let start = self.here();
                let else_jump = self.cond_exit_jump(cond);
                self.note_span(start, 1);
                self.block(then_body);
                match else_body {
                    None => {
                        let end = self.here();
                        self.patch(else_jump, end);
                    }
                    Some(eb) => {
                        let skip_else = self.emit(TacCmd::Goto(PLACEHOLDER));
                        let else_start = self.here();
                        self.patch(else_jump, else_start);
                        self.block(eb);
                        let end = self.here();
                        self.patch(skip_else, end);
                    }
                }
            }
            StmtKind::PrintString(text) => {
                let start = self.here();
                self.emit(TacCmd::PrintStr(text.clone()));
                self.note_span(start, 0);
            }
            StmtKind::PrintInt(e) => self.print(e, PrintKind::Int),
            StmtKind::PrintFloat(e) => self.print(e, PrintKind::Float),
            StmtKind::PrintBool(e) => self.print(e, PrintKind::Bool),
            StmtKind::Goto(_) | StmtKind::Label(..) => {
                unreachable!("goto/label rejected before flattening")
            }
        }
    }

    fn print(&mut self, e: &Expr, kind: PrintKind) {
        let start = self.here();
        let value = self.expr(e);
        self.emit(TacCmd::Print { kind, value });
        self.note_span(start, 0);
    }

    /// Evaluates the condition into a temp, negates it, and emits an if-goto
    /// taken when the condition is false. Returns the jump's label for
    /// patching.
    fn cond_exit_jump(&mut self, cond: &Expr) -> usize {
        let t = self.expr_to_temp(cond);
        let nt = self.fresh(ScalarType::Bool);
        self.emit(TacCmd::AssignUnop {
            dst: nt.clone(),
            op: UnOp::Not,
            src: Operand::Var(t),
        });
        self.emit(TacCmd::IfGoto {
            cond: nt,
            target: PLACEHOLDER,
        })
    }

    fn patch(&mut self, at: usize, target: usize) {
        match &mut self.cmds[at] {
            TacCmd::Goto(t) | TacCmd::IfGoto { target: t, .. } => *t = target,
            other => unreachable!("patched non-jump {other}"),
        }
    }

    fn expr_type(&self, e: &Expr) -> ScalarType {
        check_expr(e, self.ctx).expect("flatten runs on type-checked programs")
    }

    /// Flattens to an operand: literals and variables stay inline, compound
    /// expressions land in a fresh temp.
    fn expr(&mut self, e: &Expr) -> Operand {
        match &e.kind {
            ExprKind::IntLit(v) => Operand::Const(Const::Int(*v)),
            ExprKind::FloatLit(v) => Operand::Const(Const::float(*v)),
            ExprKind::BoolLit(v) => Operand::Const(Const::Bool(*v)),
            ExprKind::Var(name) => Operand::Var(TacName::source(name.clone())),
            ExprKind::Index(name, index) => {
                let index = self.expr(index);
                let (elem, _) = self.ctx.array(name).expect("type-checked array access");
                let dst = self.fresh(elem);
                self.emit(TacCmd::ArrayLoad {
                    dst: dst.clone(),
                    arr: name.clone(),
                    index,
                });
                Operand::Var(dst)
            }
            ExprKind::Unary(op, inner) => {
                let ity = self.expr_type(inner);
                let src = self.expr(inner);
                let (un, rty) = match (op, ity) {
                    (UnaryOp::Neg, ScalarType::Int) => (UnOp::NegI, ScalarType::Int),
                    (UnaryOp::Neg, ScalarType::Float) => (UnOp::NegF, ScalarType::Float),
                    (UnaryOp::Not, ScalarType::Bool) => (UnOp::Not, ScalarType::Bool),
                    _ => unreachable!("type-checked unary"),
                };
                let dst = self.fresh(rty);
                self.emit(TacCmd::AssignUnop {
                    dst: dst.clone(),
                    op: un,
                    src,
                });
                Operand::Var(dst)
            }
            ExprKind::Binary(op, lhs, rhs) => {
                let operand_ty = self.expr_type(lhs);
                let lhs = self.expr(lhs);
                let rhs = self.expr(rhs);
                let bin = lower_binop(*op, operand_ty);
                let (_, rty) = bin.sig();
                let dst = self.fresh(rty);
                self.emit(TacCmd::AssignBinop {
                    dst: dst.clone(),
                    op: bin,
                    lhs,
                    rhs,
                });
                Operand::Var(dst)
            }
            ExprKind::IntToFloat(inner) => {
                let src = self.expr(inner);
                let dst = self.fresh(ScalarType::Float);
                self.emit(TacCmd::AssignUnop {
                    dst: dst.clone(),
                    op: UnOp::IntToFloat,
                    src,
                });
                Operand::Var(dst)
            }
            ExprKind::FloatToInt(inner) => {
                let src = self.expr(inner);
                let dst = self.fresh(ScalarType::Int);
                self.emit(TacCmd::AssignUnop {
                    dst: dst.clone(),
                    op: UnOp::FloatToInt,
                    src,
                });
                Operand::Var(dst)
            }
        }
    }

    /// Like `expr`, but the result is always held in a temporary — the shape
    /// if-goto conditions are built from.
    fn expr_to_temp(&mut self, e: &Expr) -> TacName {
        match self.expr(e) {
            Operand::Var(v @ TacName::Temp(..)) => v,
            src => {
                let ty = self.expr_type(e);
                let dst = self.fresh(ty);
                match src {
                    Operand::Const(c) => {
                        self.emit(TacCmd::AssignConst {
                            dst: dst.clone(),
                            value: c,
                        });
                    }
                    src => {
                        self.emit(TacCmd::AssignUnop {
                            dst: dst.clone(),
                            op: UnOp::Copy,
                            src,
                        });
                    }
                }
                dst
            }
        }
    }
}

pub(crate) fn lower_binop(op: AstBinOp, operand_ty: ScalarType) -> BinOp {
    use AstBinOp::*;
    match (op, operand_ty) {
        (Add, ScalarType::Int) => BinOp::IAdd,
        (Sub, ScalarType::Int) => BinOp::ISub,
        (Mul, ScalarType::Int) => BinOp::IMul,
        (Div, ScalarType::Int) => BinOp::IDiv,
        (Rem, ScalarType::Int) => BinOp::IRem,
        (Add, ScalarType::Float) => BinOp::FAdd,
        (Sub, ScalarType::Float) => BinOp::FSub,
        (Mul, ScalarType::Float) => BinOp::FMul,
        (Div, ScalarType::Float) => BinOp::FDiv,
        (Lt, ScalarType::Int) => BinOp::ICmp(CmpOp::Lt),
        (Le, ScalarType::Int) => BinOp::ICmp(CmpOp::Le),
        (Gt, ScalarType::Int) => BinOp::ICmp(CmpOp::Gt),
        (Ge, ScalarType::Int) => BinOp::ICmp(CmpOp::Ge),
        (Eq, ScalarType::Int) => BinOp::ICmp(CmpOp::Eq),
        (Ne, ScalarType::Int) => BinOp::ICmp(CmpOp::Ne),
        (Lt, ScalarType::Float) => BinOp::FCmp(CmpOp::Lt),
        (Le, ScalarType::Float) => BinOp::FCmp(CmpOp::Le),
        (Gt, ScalarType::Float) => BinOp::FCmp(CmpOp::Gt),
        (Ge, ScalarType::Float) => BinOp::FCmp(CmpOp::Ge),
        (Eq, ScalarType::Float) => BinOp::FCmp(CmpOp::Eq),
        (Ne, ScalarType::Float) => BinOp::FCmp(CmpOp::Ne),
        (Eq, ScalarType::Bool) => BinOp::BEq,
        (Ne, ScalarType::Bool) => BinOp::BNe,
        (And, ScalarType::Bool) => BinOp::BAnd,
        (Or, ScalarType::Bool) => BinOp::BOr,
        (op, ty) => unreachable!("type-checked binop {op:?} on {ty}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{check_well_formed, type_check};
    use crate::frontend::parse_source;

    fn flat(src: &str) -> TacProgram {
        let p = parse_source(src).unwrap();
        let ctx = type_check(&p).unwrap();
        let ev = check_well_formed(&p).unwrap();
        flatten(&p, &ctx, &ev).0
    }

    #[test]
    fn nested_expression_introduces_serial_temps() {
        let t = flat("int x; x = 1 + 2 * 3;");
        let lines: Vec<String> = t.cmds.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            lines,
            vec!["__t1 = 2 * 3", "__t2 = 1 + __t1", "x = __t2", "halt"]
        );
    }

    #[test]
    fn while_loop_shape_negates_condition() {
        let t = flat("bool b; while (b) { }");
        let lines: Vec<String> = t.cmds.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            lines,
            vec![
                "__bt1 = b",
                "__bt2 = !__bt1",
                "if __bt2 goto 4",
                "goto 0",
                "halt"
            ]
        );
    }

    #[test]
    fn empty_program_is_a_single_halt() {
        let t = flat("");
        assert_eq!(t.cmds, vec![TacCmd::Halt]);
    }

    #[test]
    fn if_else_shape() {
        let t = flat("int x; bool b; if (b) { x = 1; } else { x = 2; }");
        let lines: Vec<String> = t.cmds.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            lines,
            vec![
                "__bt1 = b",
                "__bt2 = !__bt1",
                "if __bt2 goto 5",
                "x = 1",
                "goto 6",
                "x = 2",
                "halt"
            ]
        );
    }

    #[test]
    fn array_access_is_one_command() {
        let t = flat("int[4] a; int x; a[x + 1] = 2; x = a[0];");
        let lines: Vec<String> = t.cmds.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            lines,
            vec![
                "__t1 = x + 1",
                "a[__t1] = 2",
                "__t2 = a[0]",
                "x = __t2",
                "halt"
            ]
        );
    }
}
