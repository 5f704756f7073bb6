//! Weak bisimilarity of two rooted graphs.
//!
//! Both graphs are saturated (a weak `a` step is `τ* a τ*`, a weak silent
//! step is `τ*`), then signature refinement runs on their disjoint union.
//! The partition of every round is kept so that a distinguishing sequence
//! can be read off when the roots end up apart.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use super::{Label, LtsGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimResult {
    Equivalent,
    Distinguished(Counterexample),
}

impl BisimResult {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, BisimResult::Equivalent)
    }
}

/// A sequence of weak steps that one side can take and the other cannot
/// follow up to equivalence. Silent steps appear as `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub steps: Vec<Option<Label>>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| s.map_or_else(|| "tau".to_string(), |l| l.to_string()))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

type WeakLabel = Option<Label>;

struct Saturated {
    /// Sorted, duplicate-free weak transitions per state.
    weak: Vec<Vec<(WeakLabel, usize)>>,
}

fn saturate(succ: &[Vec<(Label, usize)>]) -> Saturated {
    let n = succ.len();
    let closure: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut order = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for (l, t) in &succ[v] {
                    if l.is_silent() && !seen[*t] {
                        seen[*t] = true;
                        order.push(*t);
                        queue.push_back(*t);
                    }
                }
            }
            order
        })
        .collect();
    let weak = (0..n)
        .map(|s| {
            let mut out: Vec<(WeakLabel, usize)> = closure[s].iter().map(|t| (None, *t)).collect();
            for &mid in &closure[s] {
                for (l, t) in &succ[mid] {
                    if !l.is_silent() {
                        out.extend(closure[*t].iter().map(|u| (Some(*l), *u)));
                    }
                }
            }
            out.sort();
            out.dedup();
            out
        })
        .collect();
    Saturated { weak }
}

/// Decides whether the roots of `g1` and `g2` are weakly bisimilar, with
/// `delta` and `pi` as the silent labels.
pub fn weak_bisim(g1: &LtsGraph, g2: &LtsGraph) -> BisimResult {
    let offset = g1.num_vertices();
    let mut succ: Vec<Vec<(Label, usize)>> = (0..offset).map(|v| g1.successors(v).to_vec()).collect();
    succ.extend(
        (0..g2.num_vertices()).map(|v| g2.successors(v).iter().map(|(l, t)| (*l, t + offset)).collect()),
    );
    let sat = saturate(&succ);
    let n = succ.len();

    let mut history: Vec<Vec<usize>> = vec![vec![0; n]];
    let mut count = 1;
    loop {
        let prev = history.last().expect("nonempty");
        let mut ids: HashMap<(usize, Vec<(WeakLabel, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|s| {
                let mut sig: Vec<_> = sat.weak[s].iter().map(|(l, t)| (*l, prev[*t])).collect();
                sig.sort();
                sig.dedup();
                let fresh = ids.len();
                *ids.entry((prev[s], sig)).or_insert(fresh)
            })
            .collect();
        let stable = ids.len() == count;
        count = ids.len();
        history.push(next);
        if stable {
            break;
        }
    }

    let (r1, r2) = (0, offset);
    let last = history.last().expect("nonempty");
    if last[r1] == last[r2] {
        return BisimResult::Equivalent;
    }
    let mut steps = Vec::new();
    let (mut x, mut y) = (r1, r2);
    loop {
        let k = first_split(&history, x, y);
        let below = &history[k - 1];
        let sig = |s: usize| -> Vec<(WeakLabel, usize)> {
            let mut v: Vec<_> = sat.weak[s].iter().map(|(l, t)| (*l, below[*t])).collect();
            v.sort();
            v.dedup();
            v
        };
        let (sx, sy) = (sig(x), sig(y));
        let (mover, other, (label, block)) = match sx.iter().find(|e| !sy.contains(e)) {
            Some(e) => (x, y, *e),
            None => (y, x, *sy.iter().find(|e| !sx.contains(e)).expect("signatures differ")),
        };
        steps.push(label);
        let tx = sat.weak[mover]
            .iter()
            .find(|(l, t)| *l == label && below[*t] == block)
            .expect("witness")
            .1;
        match sat.weak[other].iter().find(|(l, _)| *l == label) {
            None => break,
            Some(&(_, ty)) => {
                x = tx;
                y = ty;
            }
        }
    }
    BisimResult::Distinguished(Counterexample { steps })
}

fn first_split(history: &[Vec<usize>], x: usize, y: usize) -> usize {
    history
        .iter()
        .position(|round| round[x] != round[y])
        .expect("states are apart")
}
