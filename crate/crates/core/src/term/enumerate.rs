//! Deterministic, duplicate-free enumeration of well-typed processes.
//!
//! Terms are produced by increasing size (number of prefix and parallel
//! nodes); within a size, sums come first ordered by branch count, then
//! parallel compositions. Prefixes are tried in seed order: inputs, outputs,
//! tick. Nothing is materialized: every level is regenerated on demand.

use super::{Chan, Prefix, Process};

type Stream = Box<dyn Iterator<Item = Process>>;

/// Bounds for an enumeration.
///
/// `width` bounds the number of branches of every sum; parallel compositions
/// are always binary and are not limited by it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumerator {
    pub gamma: u32,
    pub depth: usize,
    pub width: usize,
    pub max_size: Option<usize>,
}

impl Enumerator {
    pub fn new(gamma: u32, depth: usize, width: usize) -> Self {
        Enumerator {
            gamma,
            depth,
            width,
            max_size: None,
        }
    }

    /// Additionally bound the number of prefix and parallel nodes.
    pub fn max_size(mut self, size: usize) -> Self {
        self.max_size = Some(size);
        self
    }

    /// Largest size reachable under the depth and width bounds alone.
    pub fn size_bound(&self) -> usize {
        let mut m = 0usize;
        for _ in 0..self.depth {
            m = (self.width * (1 + m)).max(1 + 2 * m);
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = Process> {
        let top = match self.max_size {
            Some(cap) => cap.min(self.size_bound()),
            None => self.size_bound(),
        };
        let Enumerator {
            gamma,
            depth,
            width,
            ..
        } = *self;
        (0..=top).flat_map(move |size| exact(gamma, depth, width, size))
    }
}

/// Every process `p` with `gamma ⊢ p`, `p.depth() <= depth` and no sum wider
/// than `width`, each exactly once.
pub fn enumerate(gamma: u32, depth: usize, width: usize) -> impl Iterator<Item = Process> {
    Enumerator::new(gamma, depth, width).iter()
}

fn prefixes(gamma: u32) -> Vec<Prefix> {
    let mut out: Vec<Prefix> = (1..=gamma)
        .map(|a| Prefix::In { subject: Chan(a) })
        .collect();
    for a in 1..=gamma {
        for b in 1..=gamma {
            out.push(Prefix::Out {
                subject: Chan(a),
                object: Chan(b),
            });
        }
    }
    out.push(Prefix::Tick);
    out
}

fn exact(gamma: u32, depth: usize, width: usize, size: usize) -> Stream {
    if size == 0 {
        return Box::new(std::iter::once(Process::nil()));
    }
    if depth == 0 {
        return Box::new(std::iter::empty());
    }
    let sums = (1..=width.min(size)).flat_map(move |k| {
        compositions(size, k).flat_map(move |parts| {
            branch_seqs(gamma, depth, width, parts).map(Process::Sum)
        })
    });
    let pars = (0..size).flat_map(move |left| {
        let right = size - 1 - left;
        exact(gamma + 1, depth - 1, width, left).flat_map(move |l| {
            exact(gamma + 1, depth - 1, width, right).map(move |r| Process::par(l.clone(), r))
        })
    });
    Box::new(sums.chain(pars))
}

/// Branches of exactly `size` nodes (the prefix counts as one).
fn branches(gamma: u32, depth: usize, width: usize, size: usize) -> Box<dyn Iterator<Item = (Prefix, Process)>> {
    Box::new(prefixes(gamma).into_iter().flat_map(move |a| {
        exact(a.extend(gamma), depth - 1, width, size - 1).map(move |p| (a, p))
    }))
}

fn branch_seqs(
    gamma: u32,
    depth: usize,
    width: usize,
    parts: Vec<usize>,
) -> Box<dyn Iterator<Item = Vec<(Prefix, Process)>>> {
    match parts.split_first() {
        None => Box::new(std::iter::once(Vec::new())),
        Some((&first, rest)) => {
            let rest = rest.to_vec();
            Box::new(branches(gamma, depth, width, first).flat_map(move |b| {
                branch_seqs(gamma, depth, width, rest.clone()).map(move |mut tail| {
                    tail.insert(0, b.clone());
                    tail
                })
            }))
        }
    }
}

/// Ordered ways of writing `total` as `k` positive parts, lexicographically.
fn compositions(total: usize, k: usize) -> Box<dyn Iterator<Item = Vec<usize>>> {
    if k == 0 {
        return if total == 0 {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(std::iter::empty())
        };
    }
    if total < k {
        return Box::new(std::iter::empty());
    }
    Box::new((1..=total - (k - 1)).flat_map(move |first| {
        compositions(total - first, k - 1).map(move |mut rest| {
            rest.insert(0, first);
            rest
        })
    }))
}
