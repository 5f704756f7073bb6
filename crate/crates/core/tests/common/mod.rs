//! Independent oracles and generators shared by the integration tests.
//!
//! None of this calls into the checkers it is used to validate: the ⊥
//! oracle enumerates tick-free paths explicitly, the bisimulation oracle is
//! a naive greatest fixpoint over a transitive-closure matrix.

#![allow(dead_code)]

use actorgame::lts::{Label, LtsGraph};
use actorgame::strategy::{BasicSeed, DefiniteStrategy, PlainStrategy};
use actorgame::term::{Chan, Prefix, Process};
use rand::Rng;

/// Every tick-free path from the root, each checked for a tick-free
/// continuation ending in a tick edge.
pub fn brute_force_bot(g: &LtsGraph) -> bool {
    fn can_tick(g: &LtsGraph, v: usize, on_path: &mut Vec<bool>) -> bool {
        if g.successors(v).iter().any(|(l, _)| *l == Label::Heart) {
            return true;
        }
        on_path[v] = true;
        let mut found = false;
        for (l, t) in g.successors(v) {
            if *l != Label::Heart && !on_path[*t] && can_tick(g, *t, on_path) {
                found = true;
                break;
            }
        }
        on_path[v] = false;
        found
    }

    fn all_paths(g: &LtsGraph, v: usize, on_path: &mut Vec<bool>) -> bool {
        let mut scratch = vec![false; g.num_vertices()];
        if !can_tick(g, v, &mut scratch) {
            return false;
        }
        on_path[v] = true;
        let mut ok = true;
        for (l, t) in g.successors(v) {
            if *l != Label::Heart && !on_path[*t] && !all_paths(g, *t, on_path) {
                ok = false;
                break;
            }
        }
        on_path[v] = false;
        ok
    }

    let mut on_path = vec![false; g.num_vertices()];
    all_paths(g, g.root(), &mut on_path)
}

/// Weak transitions as a dense table: `weak[s]` lists `(label, target)`,
/// with `None` for a (possibly empty) silent sequence.
fn weak_table(g: &LtsGraph) -> Vec<Vec<(Option<Label>, usize)>> {
    let n = g.num_vertices();
    let mut reach = vec![vec![false; n]; n];
    for s in 0..n {
        reach[s][s] = true;
        for (l, t) in g.successors(s) {
            if l.is_silent() {
                reach[s][*t] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    (0..n)
        .map(|s| {
            let mut out = Vec::new();
            for t in 0..n {
                if reach[s][t] {
                    out.push((None, t));
                }
            }
            for m in 0..n {
                if !reach[s][m] {
                    continue;
                }
                for (l, t) in g.successors(m) {
                    if l.is_silent() {
                        continue;
                    }
                    for u in 0..n {
                        if reach[*t][u] {
                            out.push((Some(*l), u));
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// Greatest weak bisimulation between the two graphs, by removing
/// violating pairs until nothing changes.
pub fn naive_weak_bisim(g1: &LtsGraph, g2: &LtsGraph) -> bool {
    let (w1, w2) = (weak_table(g1), weak_table(g2));
    let (n1, n2) = (g1.num_vertices(), g2.num_vertices());
    let mut rel = vec![vec![true; n2]; n1];
    loop {
        let mut changed = false;
        for s in 0..n1 {
            for t in 0..n2 {
                if !rel[s][t] {
                    continue;
                }
                let forth = w1[s]
                    .iter()
                    .all(|(l, s2)| w2[t].iter().any(|(m, t2)| m == l && rel[*s2][*t2]));
                let back = w2[t]
                    .iter()
                    .all(|(m, t2)| w1[s].iter().any(|(l, s2)| l == m && rel[*s2][*t2]));
                if !(forth && back) {
                    rel[s][t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel[g1.root()][g2.root()];
        }
    }
}

/// A random rooted graph on `n` vertices with edges drawn from `labels`.
pub fn random_graph(rng: &mut impl Rng, n: usize, edges: usize, labels: &[Label], acyclic: bool) -> LtsGraph {
    let mut succ = vec![Vec::new(); n];
    for _ in 0..edges {
        let s = rng.random_range(0..n);
        let t = if acyclic {
            if s + 1 >= n {
                continue;
            }
            rng.random_range(s + 1..n)
        } else {
            rng.random_range(0..n)
        };
        let l = labels[rng.random_range(0..labels.len())];
        succ[s].push((l, t));
    }
    LtsGraph::from_adjacency(succ)
}

/// A random well-typed process at context `gamma`.
pub fn random_process(rng: &mut impl Rng, gamma: u32, depth: usize, width: usize) -> Process {
    if depth == 0 || rng.random_bool(0.2) {
        return Process::nil();
    }
    if rng.random_bool(0.25) {
        return Process::par(
            random_process(rng, gamma + 1, depth - 1, width),
            random_process(rng, gamma + 1, depth - 1, width),
        );
    }
    let k = rng.random_range(1..=width.max(1));
    let branches = (0..k)
        .map(|_| {
            let choice = rng.random_range(0..3);
            let prefix = if gamma == 0 || choice == 2 {
                Prefix::Tick
            } else if choice == 0 {
                Prefix::In {
                    subject: Chan(rng.random_range(1..=gamma)),
                }
            } else {
                Prefix::Out {
                    subject: Chan(rng.random_range(1..=gamma)),
                    object: Chan(rng.random_range(1..=gamma)),
                }
            };
            (prefix, random_process(rng, prefix.extend(gamma), depth - 1, width))
        })
        .collect();
    Process::Sum(branches)
}

/// A random definite strategy in which every node is either fork-free or
/// exactly a pair of singleton fork entries.
pub fn random_normal_strategy(rng: &mut impl Rng, arity: u32, depth: usize) -> DefiniteStrategy {
    if depth == 0 {
        return DefiniteStrategy::empty(arity);
    }
    if rng.random_bool(0.25) {
        let child = |rng: &mut _| {
            PlainStrategy::new(arity + 1, vec![random_normal_strategy(rng, arity + 1, depth - 1)]).unwrap()
        };
        let l = child(rng);
        let r = child(rng);
        return DefiniteStrategy::new(arity, [(BasicSeed::PiL, l), (BasicSeed::PiR, r)]).unwrap();
    }
    let mut entries = Vec::new();
    for seed in BasicSeed::all(arity) {
        if matches!(seed, BasicSeed::PiL | BasicSeed::PiR) || !rng.random_bool(0.35) {
            continue;
        }
        let next = seed.result_arity(arity);
        let count = rng.random_range(1..=2);
        let summands = (0..count).map(|_| random_normal_strategy(rng, next, depth - 1)).collect();
        entries.push((seed, PlainStrategy::new(next, summands).unwrap()));
    }
    DefiniteStrategy::new(arity, entries).unwrap()
}

/// Replays a witness path edge by edge.
pub fn replays(g: &LtsGraph, vertices: &[usize], labels: &[Label]) -> bool {
    if vertices.first() != Some(&g.root()) || vertices.len() != labels.len() + 1 {
        return false;
    }
    vertices
        .windows(2)
        .zip(labels)
        .all(|(w, l)| g.successors(w[0]).contains(&(*l, w[1])))
}
