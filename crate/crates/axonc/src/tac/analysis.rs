//! CFG analyses over label-indexed TAC: successors, reachability, liveness,
//! dominators, natural loops, and loop-nesting depths. These are shared by
//! the optimizer, the certificate checker (which recomputes rather than
//! trusting pass results), and bounds-check elimination.

use super::{TacCmd, TacName, TacProgram};
use std::collections::{BTreeMap, BTreeSet};

/// Successor labels of the command at `idx`. Falling off the end is not
/// represented; well-formedness guarantees it cannot happen.
pub fn successors(cmd: &TacCmd, idx: usize) -> Vec<usize> {
    match cmd {
        TacCmd::Goto(target) => vec![*target],
        TacCmd::IfGoto { target, .. } => {
            if *target == idx + 1 {
                vec![idx + 1]
            } else {
                vec![*target, idx + 1]
            }
        }
        TacCmd::Halt => vec![],
        _ => vec![idx + 1],
    }
}

pub fn reachable(p: &TacProgram) -> Vec<bool> {
    let mut seen = vec![false; p.cmds.len()];
    if p.cmds.is_empty() {
        return seen;
    }
    let mut stack = vec![0usize];
    while let Some(l) = stack.pop() {
        if l >= seen.len() || seen[l] {
            continue;
        }
        seen[l] = true;
        for s in successors(&p.cmds[l], l) {
            stack.push(s);
        }
    }
    seen
}

/// Live-in sets per label, backward dataflow. `Halt` observes every source
/// scalar (they are compared at halt), so source variables are live into
/// every halt.
pub fn liveness(p: &TacProgram) -> Vec<BTreeSet<TacName>> {
    let n = p.cmds.len();
    let mut live_in: Vec<BTreeSet<TacName>> = vec![BTreeSet::new(); n];
    let source_scalars: BTreeSet<TacName> = p
        .ctx
        .keys()
        .filter(|v| v.is_source())
        .cloned()
        .collect();

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, cmd) in p.cmds.iter().enumerate() {
        for s in successors(cmd, i) {
            if s < n {
                preds[s].push(i);
            }
        }
    }

    let mut work: Vec<usize> = (0..n).rev().collect();
    while let Some(l) = work.pop() {
        let cmd = &p.cmds[l];
        let mut out: BTreeSet<TacName> = BTreeSet::new();
        if matches!(cmd, TacCmd::Halt) {
            out.extend(source_scalars.iter().cloned());
        }
        for s in successors(cmd, l) {
            if s < n {
                out.extend(live_in[s].iter().cloned());
            }
        }
        if let Some(d) = cmd.dst() {
            out.remove(d);
        }
        for u in cmd.uses() {
            out.insert(u.clone());
        }
        if out != live_in[l] {
            live_in[l] = out;
            for &pr in &preds[l] {
                work.push(pr);
            }
        }
    }
    live_in
}

/// Immediate-dominator-free dominator sets (small programs; the simple
/// iterative formulation is plenty). `doms[l]` contains every label that
/// dominates `l`. Unreachable labels get empty sets.
pub fn dominators(p: &TacProgram) -> Vec<BTreeSet<usize>> {
    let n = p.cmds.len();
    let reach = reachable(p);
    let all: BTreeSet<usize> = (0..n).filter(|l| reach[*l]).collect();
    let mut doms: Vec<BTreeSet<usize>> = (0..n)
        .map(|l| {
            if !reach[l] {
                BTreeSet::new()
            } else if l == 0 {
                std::iter::once(0).collect()
            } else {
                all.clone()
            }
        })
        .collect();

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, cmd) in p.cmds.iter().enumerate() {
        if !reach[i] {
            continue;
        }
        for s in successors(cmd, i) {
            if s < n {
                preds[s].push(i);
            }
        }
    }

    let mut changed = true;
    while changed {
        changed = false;
        for l in all.iter().copied() {
            if l == 0 {
                continue;
            }
            let mut new: Option<BTreeSet<usize>> = None;
            for &pr in &preds[l] {
                if !reach[pr] {
                    continue;
                }
                new = Some(match new {
                    None => doms[pr].clone(),
                    Some(acc) => acc.intersection(&doms[pr]).copied().collect(),
                });
            }
            let mut new = new.unwrap_or_default();
            new.insert(l);
            if new != doms[l] {
                doms[l] = new;
                changed = true;
            }
        }
    }
    doms
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loop {
    pub header: usize,
    /// All labels in the natural loop, including the header.
    pub body: BTreeSet<usize>,
}

pub fn is_back_edge(doms: &[BTreeSet<usize>], from: usize, to: usize) -> bool {
    doms.get(from).map_or(false, |d| d.contains(&to))
}

/// Natural loops from back edges, merged per header.
pub fn natural_loops(p: &TacProgram) -> Vec<Loop> {
    let doms = dominators(p);
    let reach = reachable(p);
    let n = p.cmds.len();
    let mut by_header: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, cmd) in p.cmds.iter().enumerate() {
        if !reach[i] {
            continue;
        }
        for s in successors(cmd, i) {
            if s < n {
                preds[s].push(i);
            }
        }
    }

    for (from, cmd) in p.cmds.iter().enumerate() {
        if !reach[from] {
            continue;
        }
        for to in successors(cmd, from) {
            if to < n && is_back_edge(&doms, from, to) {
                let body = by_header.entry(to).or_default();
                body.insert(to);
                // Walk predecessors backward from the latch until reaching
                // the header.
                let mut stack = vec![from];
                while let Some(l) = stack.pop() {
                    if body.contains(&l) {
                        continue;
                    }
                    body.insert(l);
                    for &pr in &preds[l] {
                        stack.push(pr);
                    }
                }
            }
        }
    }

    by_header
        .into_iter()
        .map(|(header, body)| Loop { header, body })
        .collect()
}

/// Loop-nesting depth per label (0 = not in any loop).
pub fn loop_depths(p: &TacProgram) -> Vec<u32> {
    let loops = natural_loops(p);
    let mut depth = vec![0u32; p.cmds.len()];
    for l in &loops {
        for &label in &l.body {
            depth[label] += 1;
        }
    }
    depth
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ScalarType;
    use crate::tac::{Const, Operand, TacCmd, TacName};

    fn prog(cmds: Vec<TacCmd>) -> TacProgram {
        let mut p = TacProgram {
            cmds,
            ..Default::default()
        };
        p.ctx.insert(TacName::source("x"), ScalarType::Int);
        p.ctx.insert(TacName::Temp(ScalarType::Bool, 1), ScalarType::Bool);
        p
    }

    #[test]
    fn reachability_skips_jumped_over_code() {
        let p = prog(vec![
            TacCmd::Goto(2),
            TacCmd::AssignConst {
                dst: TacName::source("x"),
                value: Const::Int(1),
            },
            TacCmd::Halt,
        ]);
        assert_eq!(reachable(&p), vec![true, false, true]);
    }

    #[test]
    fn loop_detection_finds_header_and_body() {
        // 0: if b goto 3 ; 1: x = 1 ; 2: goto 0 ; 3: halt
        let p = prog(vec![
            TacCmd::IfGoto {
                cond: TacName::Temp(ScalarType::Bool, 1),
                target: 3,
            },
            TacCmd::AssignConst {
                dst: TacName::source("x"),
                value: Const::Int(1),
            },
            TacCmd::Goto(0),
            TacCmd::Halt,
        ]);
        let loops = natural_loops(&p);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].header, 0);
        assert_eq!(loops[0].body, [0usize, 1, 2].into_iter().collect());
        assert_eq!(loop_depths(&p), vec![1, 1, 1, 0]);
    }

    #[test]
    fn liveness_sees_source_vars_at_halt() {
        let p = prog(vec![
            TacCmd::AssignConst {
                dst: TacName::source("x"),
                value: Const::Int(1),
            },
            TacCmd::Halt,
        ]);
        let live = liveness(&p);
        assert!(live[1].contains(&TacName::source("x")));
        // x is defined at 0 and nothing reads it before, so not live-in at 0.
        assert!(!live[0].contains(&TacName::source("x")));
    }

    #[test]
    fn liveness_tracks_operand_uses() {
        let p = prog(vec![
            TacCmd::Print {
                kind: crate::tac::PrintKind::Int,
                value: Operand::Var(TacName::source("x")),
            },
            TacCmd::Halt,
        ]);
        let live = liveness(&p);
        assert!(live[0].contains(&TacName::source("x")));
    }
}
