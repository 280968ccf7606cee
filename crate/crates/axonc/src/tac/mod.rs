//! Three-address code: label-indexed commands over variables and constants,
//! with a typing context covering source names, temporaries, and register
//! names. All flow of control is `goto`/`if-goto` on integer command indices.

mod analysis;
mod flatten;
mod interp;
mod text;
mod wf;

pub use analysis::{
    dominators, is_back_edge, liveness, loop_depths, natural_loops, reachable, successors, Loop,
};
pub use flatten::{flatten, FlattenInfo};
pub use interp::eval_tac;
pub use text::{parse_tac, TacParseError};
pub use wf::{check_tac_well_formed, TacEvidence, TacWfError, TacWfKind};

use crate::ast::{FloatBits, ScalarType};
use std::collections::BTreeMap;
use std::fmt;

/// TAC register pool sizes. Integer and boolean registers alias the same
/// machine pool; floats have their own.
pub const INT_REG_POOL: u32 = 10;
pub const FLOAT_REG_POOL: u32 = 8;

/// A TAC variable name. Classification is syntactic and total: source names
/// never start with `__`; temporaries are `__t<N>`/`__ft<N>`/`__bt<N>`;
/// registers are `__ir<N>`/`__fr<N>`/`__br<N>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TacName {
    Source(String),
    Temp(ScalarType, u32),
    Reg(ScalarType, u32),
}

impl TacName {
    pub fn source(name: impl Into<String>) -> TacName {
        let name = name.into();
        debug_assert!(!name.starts_with("__"), "source name `{name}` is reserved");
        TacName::Source(name)
    }

    pub fn is_source(&self) -> bool {
        matches!(self, TacName::Source(_))
    }

    pub fn is_reg(&self) -> bool {
        matches!(self, TacName::Reg(..))
    }

    /// Parses the syntactic classification back from text.
    pub fn classify(text: &str) -> Option<TacName> {
        if let Some(rest) = text.strip_prefix("__") {
            for (prefix, ctor) in [
                ("ir", TacName::Reg(ScalarType::Int, 0)),
                ("fr", TacName::Reg(ScalarType::Float, 0)),
                ("br", TacName::Reg(ScalarType::Bool, 0)),
                ("ft", TacName::Temp(ScalarType::Float, 0)),
                ("bt", TacName::Temp(ScalarType::Bool, 0)),
                ("t", TacName::Temp(ScalarType::Int, 0)),
            ] {
                if let Some(digits) = rest.strip_prefix(prefix) {
                    if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                        let n: u32 = digits.parse().ok()?;
                        return Some(match ctor {
                            TacName::Reg(t, _) => TacName::Reg(t, n),
                            TacName::Temp(t, _) => TacName::Temp(t, n),
                            TacName::Source(_) => unreachable!(),
                        });
                    }
                }
            }
            None
        } else {
            Some(TacName::Source(text.to_string()))
        }
    }
}

impl fmt::Display for TacName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TacName::Source(name) => write!(f, "{name}"),
            TacName::Temp(ScalarType::Int, n) => write!(f, "__t{n}"),
            TacName::Temp(ScalarType::Float, n) => write!(f, "__ft{n}"),
            TacName::Temp(ScalarType::Bool, n) => write!(f, "__bt{n}"),
            TacName::Reg(ScalarType::Int, n) => write!(f, "__ir{n}"),
            TacName::Reg(ScalarType::Float, n) => write!(f, "__fr{n}"),
            TacName::Reg(ScalarType::Bool, n) => write!(f, "__br{n}"),
        }
    }
}

/// A typed constant. Floats are carried as bit patterns so constants are
/// `Eq`/`Hash`/`Ord` and program equality is structural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Const {
    Int(i64),
    Float(FloatBits),
    Bool(bool),
}

impl Const {
    pub fn float(v: f64) -> Const {
        Const::Float(FloatBits::from_f64(v))
    }

    pub fn ty(&self) -> ScalarType {
        match self {
            Const::Int(_) => ScalarType::Int,
            Const::Float(_) => ScalarType::Float,
            Const::Bool(_) => ScalarType::Bool,
        }
    }

    pub fn zero(ty: ScalarType) -> Const {
        match ty {
            ScalarType::Int => Const::Int(0),
            ScalarType::Float => Const::float(0.0),
            ScalarType::Bool => Const::Bool(false),
        }
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Int(v) => write!(f, "{v}"),
            Const::Float(bits) => {
                let v = bits.value();
                if v.is_finite() && (v != 0.0 || bits.0 == 0) {
                    write!(f, "{v:?}")
                } else {
                    // Non-finite or negative-zero constants print as raw bits
                    // so the text format round-trips exactly.
                    write!(f, "f64#{:#018x}", bits.0)
                }
            }
            Const::Bool(v) => write!(f, "{v}"),
        }
    }
}

/// Variable-or-constant operand; commands in flattened form never nest
/// expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    Var(TacName),
    Const(Const),
}

impl Operand {
    pub fn as_var(&self) -> Option<&TacName> {
        match self {
            Operand::Var(v) => Some(v),
            Operand::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<Const> {
        match self {
            Operand::Const(c) => Some(*c),
            Operand::Var(_) => None,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => write!(f, "{v}"),
            Operand::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    /// `a op b` ⇔ `b (swap op) a`.
    pub fn swapped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ne => CmpOp::Ne,
        }
    }
}

/// Typed binary operators. The operand/result signature is part of the
/// operator, so well-formedness checks are table lookups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    IAdd,
    ISub,
    IMul,
    IDiv,
    IRem,
    FAdd,
    FSub,
    FMul,
    FDiv,
    ICmp(CmpOp),
    FCmp(CmpOp),
    BEq,
    BNe,
    BAnd,
    BOr,
}

impl BinOp {
    /// (operand type, result type)
    pub fn sig(self) -> (ScalarType, ScalarType) {
        use BinOp::*;
        match self {
            IAdd | ISub | IMul | IDiv | IRem => (ScalarType::Int, ScalarType::Int),
            FAdd | FSub | FMul | FDiv => (ScalarType::Float, ScalarType::Float),
            ICmp(_) => (ScalarType::Int, ScalarType::Bool),
            FCmp(_) => (ScalarType::Float, ScalarType::Bool),
            BEq | BNe | BAnd | BOr => (ScalarType::Bool, ScalarType::Bool),
        }
    }

    /// Whether swapping operands preserves the value bit-exactly. Float
    /// addition commutes by the adopted axiom; float multiplication is not
    /// assumed to.
    pub fn commutes(self) -> bool {
        use BinOp::*;
        matches!(
            self,
            IAdd | IMul
                | FAdd
                | ICmp(CmpOp::Eq)
                | ICmp(CmpOp::Ne)
                | FCmp(CmpOp::Eq)
                | FCmp(CmpOp::Ne)
                | BEq
                | BNe
                | BAnd
                | BOr
        )
    }

    pub fn can_trap(self) -> bool {
        matches!(self, BinOp::IDiv | BinOp::IRem)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    /// Plain copy; operand type must equal the destination type.
    Copy,
    NegI,
    NegF,
    Not,
    IntToFloat,
    FloatToInt,
}

impl UnOp {
    /// (operand type, result type); Copy is polymorphic and returns None.
    pub fn sig(self) -> Option<(ScalarType, ScalarType)> {
        match self {
            UnOp::Copy => None,
            UnOp::NegI => Some((ScalarType::Int, ScalarType::Int)),
            UnOp::NegF => Some((ScalarType::Float, ScalarType::Float)),
            UnOp::Not => Some((ScalarType::Bool, ScalarType::Bool)),
            UnOp::IntToFloat => Some((ScalarType::Int, ScalarType::Float)),
            UnOp::FloatToInt => Some((ScalarType::Float, ScalarType::Int)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FmaSign {
    Add,
    Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrintKind {
    Int,
    Float,
    Bool,
}

impl PrintKind {
    pub fn ty(self) -> ScalarType {
        match self {
            PrintKind::Int => ScalarType::Int,
            PrintKind::Float => ScalarType::Float,
            PrintKind::Bool => ScalarType::Bool,
        }
    }
}

/// One TAC command. Array accesses are single commands — address arithmetic
/// is never decomposed at this level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TacCmd {
    AssignConst {
        dst: TacName,
        value: Const,
    },
    AssignUnop {
        dst: TacName,
        op: UnOp,
        src: Operand,
    },
    AssignBinop {
        dst: TacName,
        op: BinOp,
        lhs: Operand,
        rhs: Operand,
    },
    /// dst = addend ± (mul_l * mul_r), rounding after the multiply and again
    /// after the add/subtract.
    AssignFma {
        dst: TacName,
        addend: Operand,
        mul_l: Operand,
        mul_r: Operand,
        sign: FmaSign,
    },
    ArrayLoad {
        dst: TacName,
        arr: String,
        index: Operand,
    },
    ArrayStore {
        arr: String,
        index: Operand,
        value: Operand,
    },
    Goto(usize),
    IfGoto {
        cond: TacName,
        target: usize,
    },
    PrintStr(String),
    Print {
        kind: PrintKind,
        value: Operand,
    },
    Halt,
}

impl TacCmd {
    pub fn dst(&self) -> Option<&TacName> {
        match self {
            TacCmd::AssignConst { dst, .. }
            | TacCmd::AssignUnop { dst, .. }
            | TacCmd::AssignBinop { dst, .. }
            | TacCmd::AssignFma { dst, .. }
            | TacCmd::ArrayLoad { dst, .. } => Some(dst),
            _ => None,
        }
    }

    /// Variables read by this command, in operand order.
    pub fn uses(&self) -> Vec<&TacName> {
        let mut out = Vec::new();
        match self {
            TacCmd::AssignConst { .. } | TacCmd::Goto(_) | TacCmd::PrintStr(_) | TacCmd::Halt => {}
            TacCmd::AssignUnop { src, .. } => {
                if let Operand::Var(v) = src {
                    out.push(v);
                }
            }
            TacCmd::AssignBinop { lhs, rhs, .. } => {
                if let Operand::Var(v) = lhs {
                    out.push(v);
                }
                if let Operand::Var(v) = rhs {
                    out.push(v);
                }
            }
            TacCmd::AssignFma {
                addend,
                mul_l,
                mul_r,
                ..
            } => {
                for o in [addend, mul_l, mul_r] {
                    if let Operand::Var(v) = o {
                        out.push(v);
                    }
                }
            }
            TacCmd::ArrayLoad { index, .. } => {
                if let Operand::Var(v) = index {
                    out.push(v);
                }
            }
            TacCmd::ArrayStore { index, value, .. } => {
                if let Operand::Var(v) = index {
                    out.push(v);
                }
                if let Operand::Var(v) = value {
                    out.push(v);
                }
            }
            TacCmd::IfGoto { cond, .. } => out.push(cond),
            TacCmd::Print { value, .. } => {
                if let Operand::Var(v) = value {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Whether executing this command can raise a runtime error.
    pub fn can_trap(&self) -> bool {
        match self {
            TacCmd::AssignBinop { op, .. } => op.can_trap(),
            TacCmd::ArrayLoad { .. } | TacCmd::ArrayStore { .. } => true,
            _ => false,
        }
    }

    /// Whether this command produces an output event.
    pub fn is_observable(&self) -> bool {
        matches!(self, TacCmd::PrintStr(_) | TacCmd::Print { .. })
    }
}

impl fmt::Display for TacCmd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TacCmd::AssignConst { dst, value } => write!(f, "{dst} = {value}"),
            TacCmd::AssignUnop { dst, op, src } => match op {
                UnOp::Copy => write!(f, "{dst} = {src}"),
                UnOp::NegI | UnOp::NegF => write!(f, "{dst} = -{src}"),
                UnOp::Not => write!(f, "{dst} = !{src}"),
                UnOp::IntToFloat => write!(f, "{dst} = intToFloat({src})"),
                UnOp::FloatToInt => write!(f, "{dst} = floatToInt({src})"),
            },
            TacCmd::AssignBinop { dst, op, lhs, rhs } => {
                write!(f, "{dst} = {lhs} {} {rhs}", binop_symbol(*op))
            }
            TacCmd::AssignFma {
                dst,
                addend,
                mul_l,
                mul_r,
                sign,
            } => {
                let s = match sign {
                    FmaSign::Add => '+',
                    FmaSign::Sub => '-',
                };
                write!(f, "{dst} = {addend} {s} {mul_l} * {mul_r}")
            }
            TacCmd::ArrayLoad { dst, arr, index } => write!(f, "{dst} = {arr}[{index}]"),
            TacCmd::ArrayStore { arr, index, value } => write!(f, "{arr}[{index}] = {value}"),
            TacCmd::Goto(target) => write!(f, "goto {target}"),
            TacCmd::IfGoto { cond, target } => write!(f, "if {cond} goto {target}"),
            TacCmd::PrintStr(text) => write!(f, "print str \"{}\"", escape_str(text)),
            TacCmd::Print { kind, value } => {
                let k = match kind {
                    PrintKind::Int => "int",
                    PrintKind::Float => "float",
                    PrintKind::Bool => "bool",
                };
                write!(f, "print {k} {value}")
            }
            TacCmd::Halt => write!(f, "halt"),
        }
    }
}

fn escape_str(text: &str) -> String {
    let mut s = String::new();
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

pub(crate) fn binop_symbol(op: BinOp) -> &'static str {
    use BinOp::*;
    match op {
        IAdd | FAdd => "+",
        ISub | FSub => "-",
        IMul | FMul => "*",
        IDiv | FDiv => "/",
        IRem => "%",
        ICmp(c) | FCmp(c) => cmp_symbol(c),
        BEq => "==",
        BNe => "!=",
        BAnd => "&&",
        BOr => "||",
    }
}

pub(crate) fn cmp_symbol(c: CmpOp) -> &'static str {
    match c {
        CmpOp::Lt => "<",
        CmpOp::Le => "<=",
        CmpOp::Gt => ">",
        CmpOp::Ge => ">=",
        CmpOp::Eq => "==",
        CmpOp::Ne => "!=",
    }
}

/// A TAC program: commands indexed by label, a scalar typing context, and
/// array declarations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TacProgram {
    pub cmds: Vec<TacCmd>,
    pub ctx: BTreeMap<TacName, ScalarType>,
    pub arrays: BTreeMap<String, (ScalarType, u32)>,
}

impl TacProgram {
    pub fn scalar_type(&self, name: &TacName) -> Option<ScalarType> {
        self.ctx.get(name).copied()
    }

    pub fn operand_type(&self, op: &Operand) -> Option<ScalarType> {
        match op {
            Operand::Var(v) => self.scalar_type(v),
            Operand::Const(c) => Some(c.ty()),
        }
    }

    /// Textual dump: one command per line, `L<idx>: <cmd>`.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for (name, ty) in &self.ctx {
            let _ = writeln!(out, "var {name}: {ty}");
        }
        for (name, (ty, len)) in &self.arrays {
            let _ = writeln!(out, "array {name}: {ty}[{len}]");
        }
        for (i, cmd) in self.cmds.iter().enumerate() {
            let _ = writeln!(out, "L{i}: {cmd}");
        }
        out
    }
}
