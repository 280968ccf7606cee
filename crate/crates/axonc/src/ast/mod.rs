//! AST data model, typing context, runtime values, and observable behaviors.

mod interp;
mod printer;
mod typecheck;
mod wf;

pub use interp::{eval_ast, AST_FUEL_PER_STMT};
pub use printer::print_program;
pub use typecheck::{type_check, TypeError};
pub use wf::{check_well_formed, WellFormedError, WellFormedEvidence, WfKind};

use std::collections::BTreeMap;
use std::fmt;

/// Maximum declared array length.
pub const MAX_ARRAY_LEN: u32 = 1 << 20;

/// Source span in 1-based line/column coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn point(line: u32, col: u32) -> Self {
        SourceSpan {
            start_line: line,
            start_col: col,
            end_line: line,
            end_col: col,
        }
    }

    /// A dummy span for synthesized nodes (e.g. generated programs).
    pub fn synthetic() -> Self {
        SourceSpan::point(0, 0)
    }

    pub fn merge(self, other: SourceSpan) -> SourceSpan {
        let start = if (self.start_line, self.start_col) <= (other.start_line, other.start_col) {
            (self.start_line, self.start_col)
        } else {
            (other.start_line, other.start_col)
        };
        let end = if (self.end_line, self.end_col) >= (other.end_line, other.end_col) {
            (self.end_line, self.end_col)
        } else {
            (other.end_line, other.end_col)
        };
        SourceSpan {
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

/// Scalar value types. All are 64-bit at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarType {
    Int,
    Float,
    Bool,
}

impl fmt::Display for ScalarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarType::Int => write!(f, "int"),
            ScalarType::Float => write!(f, "float"),
            ScalarType::Bool => write!(f, "bool"),
        }
    }
}

/// Variable types: scalars or fixed-length one-dimensional arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Scalar(ScalarType),
    Array(ScalarType, u32),
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::Scalar(s) => write!(f, "{s}"),
            ValueType::Array(s, n) => write!(f, "{s}[{n}]"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Decl {
    pub name: String,
    pub ty: ValueType,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub struct AstProgram {
    pub decls: Vec<Decl>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    /// `x = e;`
    Assign(String, Expr),
    /// `a[i] = e;`
    AssignIndex(String, Expr, Expr),
    While(Expr, Vec<Stmt>),
    If(Expr, Vec<Stmt>, Option<Vec<Stmt>>),
    PrintString(String),
    PrintInt(Expr),
    PrintFloat(Expr),
    PrintBool(Expr),
    /// Accepted by the grammar, rejected by well-formedness.
    Goto(String),
    /// `lbl: stmt` — accepted by the grammar, rejected by well-formedness.
    Label(String, Box<Stmt>),
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    IntLit(i64),
    FloatLit(f64),
    BoolLit(bool),
    Var(String),
    Index(String, Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
    Binary(AstBinOp, Box<Expr>, Box<Expr>),
    IntToFloat(Box<Expr>),
    FloatToInt(Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AstBinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl AstBinOp {
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            AstBinOp::Lt | AstBinOp::Le | AstBinOp::Gt | AstBinOp::Ge | AstBinOp::Eq | AstBinOp::Ne
        )
    }
}

/// Maps every declared identifier to its type.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypingContext {
    pub vars: BTreeMap<String, ValueType>,
}

impl TypingContext {
    pub fn lookup(&self, name: &str) -> Option<ValueType> {
        self.vars.get(name).copied()
    }

    pub fn scalar(&self, name: &str) -> Option<ScalarType> {
        match self.vars.get(name) {
            Some(ValueType::Scalar(s)) => Some(*s),
            _ => None,
        }
    }

    pub fn array(&self, name: &str) -> Option<(ScalarType, u32)> {
        match self.vars.get(name) {
            Some(ValueType::Array(s, n)) => Some((*s, *n)),
            _ => None,
        }
    }
}

/// A runtime value. Equality is bitwise: floats compare by bit pattern, so
/// NaN == NaN and -0.0 != 0.0. This is the observation-equality the
/// differential harness relies on; IEEE comparison semantics live in the
/// interpreters, not here.
#[derive(Debug, Clone, Copy)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Value {
    pub fn zero(ty: ScalarType) -> Value {
        match ty {
            ScalarType::Int => Value::Int(0),
            ScalarType::Float => Value::Float(0.0),
            ScalarType::Bool => Value::Bool(false),
        }
    }

    pub fn scalar_type(&self) -> ScalarType {
        match self {
            Value::Int(_) => ScalarType::Int,
            Value::Float(_) => ScalarType::Float,
            Value::Bool(_) => ScalarType::Bool,
        }
    }

    pub fn as_int(&self) -> i64 {
        match self {
            Value::Int(v) => *v,
            _ => panic!("value is not an int: {self:?}"),
        }
    }

    pub fn as_float(&self) -> f64 {
        match self {
            Value::Float(v) => *v,
            _ => panic!("value is not a float: {self:?}"),
        }
    }

    pub fn as_bool(&self) -> bool {
        match self {
            Value::Bool(v) => *v,
            _ => panic!("value is not a bool: {self:?}"),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a.to_bits() == b.to_bits(),
            (Value::Bool(a), Value::Bool(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Bool(v) => write!(f, "{v}"),
        }
    }
}

/// Variable store: scalar values plus fixed-length arrays.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Store {
    pub scalars: BTreeMap<String, Value>,
    pub arrays: BTreeMap<String, Vec<Value>>,
}

impl Store {
    /// Zero-initialized store for a typing context.
    pub fn zeroed(ctx: &TypingContext) -> Store {
        let mut store = Store::default();
        for (name, ty) in &ctx.vars {
            match ty {
                ValueType::Scalar(s) => {
                    store.scalars.insert(name.clone(), Value::zero(*s));
                }
                ValueType::Array(s, n) => {
                    store
                        .arrays
                        .insert(name.clone(), vec![Value::zero(*s); *n as usize]);
                }
            }
        }
        store
    }
}

/// One print event. Float payloads compare bit-exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputEvent {
    Str(String),
    Int(i64),
    Float(FloatBits),
    Bool(bool),
}

/// An f64 carried by bit pattern so that Eq/Hash/Ord are well-defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FloatBits(pub u64);

impl FloatBits {
    pub fn from_f64(v: f64) -> Self {
        FloatBits(v.to_bits())
    }

    pub fn value(self) -> f64 {
        f64::from_bits(self.0)
    }
}

impl fmt::Display for FloatBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.value())
    }
}

/// Observable behavior of one program run. Diverge means the step budget was
/// exhausted; its payload is the output prefix produced so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Behavior {
    Halt {
        store: Store,
        output: Vec<OutputEvent>,
    },
    DivByZero {
        output: Vec<OutputEvent>,
    },
    OutOfBounds {
        output: Vec<OutputEvent>,
    },
    Diverge {
        output: Vec<OutputEvent>,
    },
}

impl Behavior {
    pub fn kind(&self) -> BehaviorKind {
        match self {
            Behavior::Halt { .. } => BehaviorKind::Halt,
            Behavior::DivByZero { .. } => BehaviorKind::DivByZero,
            Behavior::OutOfBounds { .. } => BehaviorKind::OutOfBounds,
            Behavior::Diverge { .. } => BehaviorKind::Diverge,
        }
    }

    pub fn output(&self) -> &[OutputEvent] {
        match self {
            Behavior::Halt { output, .. }
            | Behavior::DivByZero { output }
            | Behavior::OutOfBounds { output }
            | Behavior::Diverge { output } => output,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BehaviorKind {
    Halt,
    DivByZero,
    OutOfBounds,
    Diverge,
}

impl fmt::Display for BehaviorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BehaviorKind::Halt => write!(f, "halt"),
            BehaviorKind::DivByZero => write!(f, "divide-by-zero"),
            BehaviorKind::OutOfBounds => write!(f, "out-of-bounds"),
            BehaviorKind::Diverge => write!(f, "diverge"),
        }
    }
}

/// Structural equality on programs, ignoring spans. Used by the parser
/// round-trip tests; spans are positions, not meaning.
pub fn same_program(a: &AstProgram, b: &AstProgram) -> bool {
    a.decls.len() == b.decls.len()
        && a.decls
            .iter()
            .zip(&b.decls)
            .all(|(x, y)| x.name == y.name && x.ty == y.ty)
        && same_stmts(&a.body, &b.body)
}

fn same_stmts(a: &[Stmt], b: &[Stmt]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| same_stmt(x, y))
}

fn same_stmt(a: &Stmt, b: &Stmt) -> bool {
    use StmtKind::*;
    match (&a.kind, &b.kind) {
        (Assign(n1, e1), Assign(n2, e2)) => n1 == n2 && same_expr(e1, e2),
        (AssignIndex(n1, i1, e1), AssignIndex(n2, i2, e2)) => {
            n1 == n2 && same_expr(i1, i2) && same_expr(e1, e2)
        }
        (While(c1, b1), While(c2, b2)) => same_expr(c1, c2) && same_stmts(b1, b2),
        (If(c1, t1, e1), If(c2, t2, e2)) => {
            same_expr(c1, c2)
                && same_stmts(t1, t2)
                && match (e1, e2) {
                    (None, None) => true,
                    (Some(x), Some(y)) => same_stmts(x, y),
                    _ => false,
                }
        }
        (PrintString(s1), PrintString(s2)) => s1 == s2,
        (PrintInt(e1), PrintInt(e2))
        | (PrintFloat(e1), PrintFloat(e2))
        | (PrintBool(e1), PrintBool(e2)) => same_expr(e1, e2),
        (Goto(n1), Goto(n2)) => n1 == n2,
        (Label(n1, s1), Label(n2, s2)) => n1 == n2 && same_stmt(s1, s2),
        _ => false,
    }
}

fn same_expr(a: &Expr, b: &Expr) -> bool {
    use ExprKind::*;
    match (&a.kind, &b.kind) {
        (IntLit(x), IntLit(y)) => x == y,
        (FloatLit(x), FloatLit(y)) => x.to_bits() == y.to_bits(),
        (BoolLit(x), BoolLit(y)) => x == y,
        (Var(x), Var(y)) => x == y,
        (Index(n1, i1), Index(n2, i2)) => n1 == n2 && same_expr(i1, i2),
        (Unary(o1, e1), Unary(o2, e2)) => o1 == o2 && same_expr(e1, e2),
        (Binary(o1, l1, r1), Binary(o2, l2, r2)) => {
            o1 == o2 && same_expr(l1, l2) && same_expr(r1, r2)
        }
        (IntToFloat(e1), IntToFloat(e2)) | (FloatToInt(e1), FloatToInt(e2)) => same_expr(e1, e2),
        _ => false,
    }
}
