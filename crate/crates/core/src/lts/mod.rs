//! Labelled transition systems for processes and strategies.
//!
//! Both sides are explored from a root into a finite [`LtsGraph`]. States
//! are keyed canonically (components or players sorted, channels kept in
//! creation order), so labels can name channels by their context index and
//! the two sides of the translation number channels identically.

mod bisim;
mod game;
mod process;

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::hash::Hash;

pub use bisim::{weak_bisim, BisimResult, Counterexample};
pub use game::{closed_world_steps, strategy_lts, strategy_lts_from, GameKey, GameState};
pub use process::{process_lts, process_lts_from, Config};

/// Edge labels. Channel parameters are context indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Heart,
    In(u32),
    Out(u32, u32),
    Link(u32, u32, u32),
    Delta,
    PiL,
    PiR,
    Pi,
}

impl Label {
    /// Internal synchronization and internal forking.
    pub fn is_silent(self) -> bool {
        matches!(self, Label::Delta | Label::Pi)
    }

    pub fn is_closed_world(self) -> bool {
        matches!(self, Label::Heart | Label::Delta | Label::Pi)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Heart => f.write_str("heart"),
            Label::In(a) => write!(f, "in({a})"),
            Label::Out(a, b) => write!(f, "out({a},{b})"),
            Label::Link(a, b, c) => write!(f, "link({a},{b},{c})"),
            Label::Delta => f.write_str("delta"),
            Label::PiL => f.write_str("pil"),
            Label::PiR => f.write_str("pir"),
            Label::Pi => f.write_str("pi"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum World {
    /// Only tick, synchronization and fork edges.
    #[default]
    Closed,
    /// Closed-world edges plus interactions with the environment.
    Interface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LtsOptions {
    pub world: World,
    /// Emit `link(a,b,c)` edges (interface world only).
    pub enable_link: bool,
}

impl LtsOptions {
    pub fn closed() -> Self {
        LtsOptions::default()
    }

    pub fn interface() -> Self {
        LtsOptions {
            world: World::Interface,
            enable_link: false,
        }
    }
}

/// A finite rooted graph. Vertex `0` is the root; vertices are numbered in
/// breadth-first discovery order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LtsGraph {
    succ: Vec<Vec<(Label, usize)>>,
}

impl LtsGraph {
    pub fn root(&self) -> usize {
        0
    }

    pub fn num_vertices(&self) -> usize {
        self.succ.len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, v: usize) -> &[(Label, usize)] {
        &self.succ[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, Label, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(s, out)| out.iter().map(move |(l, t)| (s, *l, *t)))
    }

    /// Whether `v` has an outgoing tick edge.
    pub fn ticks(&self, v: usize) -> bool {
        self.succ[v].iter().any(|(l, _)| *l == Label::Heart)
    }

    /// One header line, then one `src -label-> dst` line per edge.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "lts vertices={} edges={} root=0\n",
            self.num_vertices(),
            self.num_edges()
        );
        for (s, l, t) in self.edges() {
            let _ = writeln!(out, "{s} -{l}-> {t}");
        }
        out
    }

    /// Builds a graph from explicit adjacency lists; vertex 0 is the root.
    pub fn from_adjacency(succ: Vec<Vec<(Label, usize)>>) -> Self {
        assert!(!succ.is_empty(), "a graph needs a root");
        assert!(succ.iter().flatten().all(|(_, t)| *t < succ.len()));
        LtsGraph { succ }
    }
}

/// Breadth-first exploration of everything reachable from `root`, states
/// being identified by equality. Returns the graph and the state of each
/// vertex.
pub fn explore<S, F>(root: S, succ: F) -> (LtsGraph, Vec<S>)
where
    S: Clone + Eq + Hash,
    F: FnMut(&S) -> Vec<(Label, S)>,
{
    explore_by(root, S::clone, succ)
}

/// Like [`explore`], identifying states through `key`. The first state
/// discovered with a given key represents it.
pub fn explore_by<S, K, G, F>(root: S, mut key: G, mut succ: F) -> (LtsGraph, Vec<S>)
where
    K: Eq + Hash,
    G: FnMut(&S) -> K,
    F: FnMut(&S) -> Vec<(Label, S)>,
{
    let mut index: HashMap<K, usize> = HashMap::new();
    index.insert(key(&root), 0);
    let mut states = vec![root];
    let mut adj: Vec<Vec<(Label, usize)>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let next = succ(&states[v]);
        let mut out = Vec::with_capacity(next.len());
        for (label, s) in next {
            let k = key(&s);
            let t = match index.get(&k) {
                Some(&t) => t,
                None => {
                    let t = states.len();
                    index.insert(k, t);
                    states.push(s);
                    adj.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            out.push((label, t));
        }
        adj[v] = out;
    }
    (LtsGraph { succ: adj }, states)
}

/// An interface `Δ → Γ` paired with a subject; `h[i]` is the context index
/// the environment's `i + 1`-th channel points to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interface<S> {
    pub h: Vec<u32>,
    pub subject: S,
}

impl<S> Interface<S> {
    pub fn delta(&self) -> usize {
        self.h.len()
    }

    pub fn knows(&self, c: u32) -> bool {
        self.h.contains(&c)
    }
}
