//! Parser for the textual TAC dump format (`var`/`array` header lines, then
//! `L<idx>: <cmd>` lines). Consumed by `axon check-cert`; the emitter lives in
//! `TacProgram::dump`. Unary minus applied to a literal reparses as a signed
//! constant; that normalization is value-preserving and the checker's
//! simplifier treats the two forms identically.

use super::{
    BinOp, CmpOp, Const, FmaSign, Operand, PrintKind, TacCmd, TacName, TacProgram, UnOp,
};
use crate::ast::{FloatBits, ScalarType};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TacParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for TacParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tac line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for TacParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    Sym(&'static str),
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, TacParseError> {
    Err(TacParseError {
        line,
        message: message.into(),
    })
}

fn tokenize(line_no: usize, text: &str) -> Result<Vec<Tok>, TacParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            // f64#0x... raw-bit float constants
            if word == "f64" && i + 1 < chars.len() && chars[i] == '#' {
                i += 1; // '#'
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == 'x') {
                    i += 1;
                }
                let hex: String = chars[start..i].iter().collect();
                let hex = hex.trim_start_matches("0x");
                let bits = u64::from_str_radix(hex, 16)
                    .map_err(|_| TacParseError {
                        line: line_no,
                        message: format!("bad float bits `{hex}`"),
                    })?;
                toks.push(Tok::Float(f64::from_bits(bits)));
            } else {
                toks.push(Tok::Ident(word));
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let mut is_float = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                is_float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                is_float = true;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let word: String = chars[start..i].iter().collect();
            if is_float {
                match word.parse::<f64>() {
                    Ok(v) => toks.push(Tok::Float(v)),
                    Err(_) => return err(line_no, format!("bad float `{word}`")),
                }
            } else {
                match word.parse::<i64>() {
                    Ok(v) => toks.push(Tok::Int(v)),
                    Err(_) => return err(line_no, format!("bad integer `{word}`")),
                }
            }
            continue;
        }
        if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                if i >= chars.len() {
                    return err(line_no, "unterminated string");
                }
                match chars[i] {
                    '"' => {
                        i += 1;
                        break;
                    }
                    '\\' => {
                        i += 1;
                        if i >= chars.len() {
                            return err(line_no, "unterminated escape");
                        }
                        s.push(match chars[i] {
                            'n' => '\n',
                            't' => '\t',
                            '\\' => '\\',
                            '"' => '"',
                            other => return err(line_no, format!("unknown escape \\{other}")),
                        });
                        i += 1;
                    }
                    other => {
                        s.push(other);
                        i += 1;
                    }
                }
            }
            toks.push(Tok::Str(s));
            continue;
        }
        let two = if i + 1 < chars.len() {
            Some((chars[i], chars[i + 1]))
        } else {
            None
        };
        let sym: Option<(&'static str, usize)> = match (c, two) {
            ('<', Some((_, '='))) => Some(("<=", 2)),
            ('>', Some((_, '='))) => Some((">=", 2)),
            ('=', Some((_, '='))) => Some(("==", 2)),
            ('!', Some((_, '='))) => Some(("!=", 2)),
            ('&', Some((_, '&'))) => Some(("&&", 2)),
            ('|', Some((_, '|'))) => Some(("||", 2)),
            ('<', _) => Some(("<", 1)),
            ('>', _) => Some((">", 1)),
            ('=', _) => Some(("=", 1)),
            ('!', _) => Some(("!", 1)),
            ('+', _) => Some(("+", 1)),
            ('-', _) => Some(("-", 1)),
            ('*', _) => Some(("*", 1)),
            ('/', _) => Some(("/", 1)),
            ('%', _) => Some(("%", 1)),
            ('[', _) => Some(("[", 1)),
            (']', _) => Some(("]", 1)),
            ('(', _) => Some(("(", 1)),
            (')', _) => Some((")", 1)),
            (':', _) => Some((":", 1)),
            _ => None,
        };
        match sym {
            Some((s, w)) => {
                toks.push(Tok::Sym(s));
                i += w;
            }
            None => return err(line_no, format!("unexpected character `{c}`")),
        }
    }
    // Merge sign into literals: a `-` at expression start or after another
    // operator binds to a following numeric literal.
    let mut merged: Vec<Tok> = Vec::with_capacity(toks.len());
    for tok in toks {
        let minus_is_sign = matches!(merged.last(), Some(Tok::Sym("-"))) && {
            let before = merged.len().checked_sub(2).map(|i| &merged[i]);
            can_sign_before(before)
        };
        match tok {
            Tok::Int(v) if minus_is_sign => {
                merged.pop();
                merged.push(Tok::Int(v.wrapping_neg()));
            }
            Tok::Float(v) if minus_is_sign => {
                merged.pop();
                merged.push(Tok::Float(-v));
            }
            tok => merged.push(tok),
        }
    }
    Ok(merged)
}

/// True when a `-` sitting after this token is a sign rather than a binary
/// operator.
fn can_sign_before(prev: Option<&Tok>) -> bool {
    matches!(
        prev,
        None | Some(Tok::Sym(
            "=" | "+" | "-" | "*" | "/" | "%" | "<" | "<=" | ">" | ">=" | "==" | "!=" | "&&"
                | "||" | "[" | "(" | ":"
        ))
    )
}

fn name_of(line: usize, text: &str) -> Result<TacName, TacParseError> {
    TacName::classify(text).ok_or_else(|| TacParseError {
        line,
        message: format!("malformed variable name `{text}`"),
    })
}

fn scalar_of(line: usize, text: &str) -> Result<ScalarType, TacParseError> {
    match text {
        "int" => Ok(ScalarType::Int),
        "float" => Ok(ScalarType::Float),
        "bool" => Ok(ScalarType::Bool),
        other => err(line, format!("unknown type `{other}`")),
    }
}

/// Parses the textual dump of a TAC program.
pub fn parse_tac(text: &str) -> Result<TacProgram, TacParseError> {
    let mut p = TacProgram::default();
    let mut expected_label = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("var ") {
            let Some((name, ty)) = rest.split_once(':') else {
                return err(line_no, "expected `var <name>: <type>`");
            };
            let name = name_of(line_no, name.trim())?;
            let ty = scalar_of(line_no, ty.trim())?;
            p.ctx.insert(name, ty);
            continue;
        }
        if let Some(rest) = line.strip_prefix("array ") {
            let Some((name, ty)) = rest.split_once(':') else {
                return err(line_no, "expected `array <name>: <type>[<len>]`");
            };
            let ty = ty.trim();
            let Some((elem, len)) = ty.split_once('[') else {
                return err(line_no, "expected array length");
            };
            let elem = scalar_of(line_no, elem.trim())?;
            let len: u32 = len
                .trim_end_matches(']')
                .trim()
                .parse()
                .map_err(|_| TacParseError {
                    line: line_no,
                    message: "bad array length".to_string(),
                })?;
            p.arrays.insert(name.trim().to_string(), (elem, len));
            continue;
        }
        let Some((label, cmd_text)) = line.split_once(':') else {
            return err(line_no, "expected `L<idx>: <command>`");
        };
        let label = label.trim();
        let Some(num) = label.strip_prefix('L') else {
            return err(line_no, format!("bad label `{label}`"));
        };
        let num: usize = num.parse().map_err(|_| TacParseError {
            line: line_no,
            message: format!("bad label `{label}`"),
        })?;
        if num != expected_label {
            return err(line_no, format!("expected label L{expected_label}, found L{num}"));
        }
        expected_label += 1;
        let toks = tokenize(line_no, cmd_text)?;
        p.cmds.push(parse_cmd(line_no, &toks, &p)?);
    }
    Ok(p)
}

fn operand(line: usize, tok: &Tok) -> Result<Operand, TacParseError> {
    Ok(match tok {
        Tok::Ident(name) if name == "true" => Operand::Const(Const::Bool(true)),
        Tok::Ident(name) if name == "false" => Operand::Const(Const::Bool(false)),
        Tok::Ident(name) => Operand::Var(name_of(line, name)?),
        Tok::Int(v) => Operand::Const(Const::Int(*v)),
        Tok::Float(v) => Operand::Const(Const::Float(FloatBits::from_f64(*v))),
        other => return err(line, format!("expected operand, found {other:?}")),
    })
}

fn binop_for(
    line: usize,
    sym: &str,
    operand_ty: ScalarType,
) -> Result<BinOp, TacParseError> {
    let cmp = |c: CmpOp| match operand_ty {
        ScalarType::Int => Ok(BinOp::ICmp(c)),
        ScalarType::Float => Ok(BinOp::FCmp(c)),
        ScalarType::Bool => match c {
            CmpOp::Eq => Ok(BinOp::BEq),
            CmpOp::Ne => Ok(BinOp::BNe),
            _ => err(line, "ordering comparison on bool".to_string()),
        },
    };
    match (sym, operand_ty) {
        ("+", ScalarType::Int) => Ok(BinOp::IAdd),
        ("-", ScalarType::Int) => Ok(BinOp::ISub),
        ("*", ScalarType::Int) => Ok(BinOp::IMul),
        ("/", ScalarType::Int) => Ok(BinOp::IDiv),
        ("%", ScalarType::Int) => Ok(BinOp::IRem),
        ("+", ScalarType::Float) => Ok(BinOp::FAdd),
        ("-", ScalarType::Float) => Ok(BinOp::FSub),
        ("*", ScalarType::Float) => Ok(BinOp::FMul),
        ("/", ScalarType::Float) => Ok(BinOp::FDiv),
        ("&&", ScalarType::Bool) => Ok(BinOp::BAnd),
        ("||", ScalarType::Bool) => Ok(BinOp::BOr),
        ("<", t) => cmp(CmpOp::Lt).and_then(|b| check_cmp_ty(line, b, t)),
        ("<=", t) => cmp(CmpOp::Le).and_then(|b| check_cmp_ty(line, b, t)),
        (">", t) => cmp(CmpOp::Gt).and_then(|b| check_cmp_ty(line, b, t)),
        (">=", t) => cmp(CmpOp::Ge).and_then(|b| check_cmp_ty(line, b, t)),
        ("==", _) => cmp(CmpOp::Eq),
        ("!=", _) => cmp(CmpOp::Ne),
        (s, t) => err(line, format!("operator `{s}` on {t}")),
    }
}

fn check_cmp_ty(line: usize, b: BinOp, t: ScalarType) -> Result<BinOp, TacParseError> {
    if t == ScalarType::Bool {
        err(line, "ordering comparison on bool".to_string())
    } else {
        Ok(b)
    }
}

fn operand_ty_in(p: &TacProgram, op: &Operand) -> Option<ScalarType> {
    p.operand_type(op)
}

fn parse_cmd(line: usize, toks: &[Tok], p: &TacProgram) -> Result<TacCmd, TacParseError> {
    use Tok::*;
    match toks {
        [Ident(h)] if h == "halt" => Ok(TacCmd::Halt),
        [Ident(g), Int(target)] if g == "goto" => {
            if *target < 0 {
                return err(line, "negative label");
            }
            Ok(TacCmd::Goto(*target as usize))
        }
        [Ident(i), Ident(cond), Ident(g), Int(target)] if i == "if" && g == "goto" => {
            if *target < 0 {
                return err(line, "negative label");
            }
            Ok(TacCmd::IfGoto {
                cond: name_of(line, cond)?,
                target: *target as usize,
            })
        }
        [Ident(pr), Ident(kind), rest @ ..] if pr == "print" => match (kind.as_str(), rest) {
            ("str", [Str(s)]) => Ok(TacCmd::PrintStr(s.clone())),
            ("int", [tok]) => Ok(TacCmd::Print {
                kind: PrintKind::Int,
                value: operand(line, tok)?,
            }),
            ("float", [tok]) => Ok(TacCmd::Print {
                kind: PrintKind::Float,
                value: operand(line, tok)?,
            }),
            ("bool", [tok]) => Ok(TacCmd::Print {
                kind: PrintKind::Bool,
                value: operand(line, tok)?,
            }),
            _ => err(line, "malformed print"),
        },
        // array store: arr [ index ] = value
        [Ident(arr), Sym("["), index, Sym("]"), Sym("="), value] => Ok(TacCmd::ArrayStore {
            arr: arr.clone(),
            index: operand(line, index)?,
            value: operand(line, value)?,
        }),
        [Ident(dst), Sym("="), rest @ ..] => {
            let dst = name_of(line, dst)?;
            parse_rhs(line, dst, rest, p)
        }
        _ => err(line, "unrecognized command"),
    }
}

fn parse_rhs(
    line: usize,
    dst: TacName,
    rest: &[Tok],
    p: &TacProgram,
) -> Result<TacCmd, TacParseError> {
    use Tok::*;
    match rest {
        // conversions
        [Ident(f), Sym("("), tok, Sym(")")] if f == "intToFloat" || f == "floatToInt" => {
            let op = if f == "intToFloat" {
                UnOp::IntToFloat
            } else {
                UnOp::FloatToInt
            };
            Ok(TacCmd::AssignUnop {
                dst,
                op,
                src: operand(line, tok)?,
            })
        }
        // array load
        [Ident(arr), Sym("["), index, Sym("]")] => Ok(TacCmd::ArrayLoad {
            dst,
            arr: arr.clone(),
            index: operand(line, index)?,
        }),
        // fma: addend ± l * r
        [a, Sym(s @ ("+" | "-")), l, Sym("*"), r] => Ok(TacCmd::AssignFma {
            dst,
            addend: operand(line, a)?,
            mul_l: operand(line, l)?,
            mul_r: operand(line, r)?,
            sign: if *s == "+" { FmaSign::Add } else { FmaSign::Sub },
        }),
        // binop
        [a, Sym(s), b] if *s != "!" => {
            let lhs = operand(line, a)?;
            let rhs = operand(line, b)?;
            let ty = operand_ty_in(p, &lhs)
                .or_else(|| operand_ty_in(p, &rhs))
                .ok_or_else(|| TacParseError {
                    line,
                    message: "cannot type binop operands".to_string(),
                })?;
            Ok(TacCmd::AssignBinop {
                dst,
                op: binop_for(line, s, ty)?,
                lhs,
                rhs,
            })
        }
        // unary not / neg
        [Sym("!"), tok] => Ok(TacCmd::AssignUnop {
            dst,
            op: UnOp::Not,
            src: operand(line, tok)?,
        }),
        [Sym("-"), tok] => {
            let src = operand(line, tok)?;
            let ty = operand_ty_in(p, &src).ok_or_else(|| TacParseError {
                line,
                message: "cannot type negation operand".to_string(),
            })?;
            Ok(TacCmd::AssignUnop {
                dst,
                op: if ty == ScalarType::Float {
                    UnOp::NegF
                } else {
                    UnOp::NegI
                },
                src,
            })
        }
        // plain copy or constant
        [tok] => {
            let src = operand(line, tok)?;
            Ok(match src {
                Operand::Const(c) => TacCmd::AssignConst { dst, value: c },
                src => TacCmd::AssignUnop {
                    dst,
                    op: UnOp::Copy,
                    src,
                },
            })
        }
        _ => err(line, "unrecognized assignment form"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{check_well_formed, type_check};
    use crate::frontend::parse_source;
    use crate::tac::flatten;

    #[test]
    fn dump_parse_round_trip() {
        let src = "int x; float f; bool b; int[4] a;\n\
                   x = 1 + 2 * 3;\n\
                   while (x > 0) { a[x] = x; x = x - 1; }\n\
                   f = 2.5; f = f * f;\n\
                   if (b) { printInt x; } else { printFloat f; }\n\
                   printString \"done\";";
        let p = parse_source(src).unwrap();
        let ctx = type_check(&p).unwrap();
        let ev = check_well_formed(&p).unwrap();
        let (t, _) = flatten(&p, &ctx, &ev);
        let text = t.dump();
        let t2 = parse_tac(&text).unwrap();
        assert_eq!(t, t2, "round trip changed the program:\n{text}");
    }

    #[test]
    fn negative_and_raw_bit_constants() {
        let text = "var x: int\nvar f: float\nL0: x = -5\nL1: f = f64#0x7ff8000000000000\nL2: halt\n";
        let t = parse_tac(text).unwrap();
        assert_eq!(
            t.cmds[0],
            TacCmd::AssignConst {
                dst: TacName::source("x"),
                value: Const::Int(-5)
            }
        );
        match &t.cmds[1] {
            TacCmd::AssignConst {
                value: Const::Float(bits),
                ..
            } => assert!(bits.value().is_nan()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn labels_must_be_sequential() {
        assert!(parse_tac("L1: halt\n").is_err());
    }
}
