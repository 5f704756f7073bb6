//! Definite and plain strategies over a single `n`-ary player.
//!
//! A definite strategy maps each basic seed at its arity to a plain
//! strategy; a plain strategy is an ordered formal sum of definite ones.
//! Only nonempty entries are stored: an absent seed maps to `∅`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::term::{typecheck, Chan, Prefix, Process, TypeError};

/// Basic seeds at an implicit arity `n`. The derived order (PiL, PiR, In,
/// Out, Heart, then by channel) is the order used for dumps and readback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicSeed {
    PiL,
    PiR,
    In(u32),
    Out(u32, u32),
    Heart,
}

impl BasicSeed {
    /// All basic seeds at arity `n`, in order.
    pub fn all(n: u32) -> Vec<BasicSeed> {
        let mut out = vec![BasicSeed::PiL, BasicSeed::PiR];
        out.extend((1..=n).map(BasicSeed::In));
        for a in 1..=n {
            out.extend((1..=n).map(|b| BasicSeed::Out(a, b)));
        }
        out.push(BasicSeed::Heart);
        out
    }

    pub fn in_range(self, n: u32) -> bool {
        let ok = |a: u32| (1..=n).contains(&a);
        match self {
            BasicSeed::PiL | BasicSeed::PiR | BasicSeed::Heart => true,
            BasicSeed::In(a) => ok(a),
            BasicSeed::Out(a, b) => ok(a) && ok(b),
        }
    }

    /// Arity of the strategies found under this seed.
    pub fn result_arity(self, n: u32) -> u32 {
        match self {
            BasicSeed::PiL | BasicSeed::PiR | BasicSeed::In(_) => n + 1,
            BasicSeed::Out(..) | BasicSeed::Heart => n,
        }
    }

    pub fn of_prefix(prefix: Prefix) -> BasicSeed {
        match prefix {
            Prefix::In { subject } => BasicSeed::In(subject.0),
            Prefix::Out { subject, object } => BasicSeed::Out(subject.0, object.0),
            Prefix::Tick => BasicSeed::Heart,
        }
    }

    /// The prefix a seed reads back to, if it is not a fork.
    pub fn prefix(self) -> Option<Prefix> {
        match self {
            BasicSeed::In(a) => Some(Prefix::In { subject: Chan(a) }),
            BasicSeed::Out(a, b) => Some(Prefix::Out {
                subject: Chan(a),
                object: Chan(b),
            }),
            BasicSeed::Heart => Some(Prefix::Tick),
            BasicSeed::PiL | BasicSeed::PiR => None,
        }
    }
}

impl fmt::Display for BasicSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicSeed::PiL => f.write_str("pil"),
            BasicSeed::PiR => f.write_str("pir"),
            BasicSeed::In(a) => write!(f, "in({a})"),
            BasicSeed::Out(a, b) => write!(f, "out({a},{b})"),
            BasicSeed::Heart => f.write_str("heart"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("seed {seed} is out of range at arity {arity}")]
    SeedOutOfRange { seed: BasicSeed, arity: u32 },
    #[error("summand index {index} out of range for a sum of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("strategy of arity {found} where arity {expected} is required")]
    ArityMismatch { expected: u32, found: u32 },
    #[error(transparent)]
    IllTyped(#[from] TypeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefiniteStrategy {
    arity: u32,
    table: BTreeMap<BasicSeed, PlainStrategy>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlainStrategy {
    arity: u32,
    summands: Vec<DefiniteStrategy>,
}

impl PlainStrategy {
    pub fn empty(arity: u32) -> Self {
        PlainStrategy {
            arity,
            summands: Vec::new(),
        }
    }

    pub fn new(arity: u32, summands: Vec<DefiniteStrategy>) -> Result<Self, StrategyError> {
        if let Some(d) = summands.iter().find(|d| d.arity != arity) {
            return Err(StrategyError::ArityMismatch {
                expected: arity,
                found: d.arity,
            });
        }
        Ok(PlainStrategy { arity, summands })
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn summands(&self) -> &[DefiniteStrategy] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }
}

impl DefiniteStrategy {
    /// The strategy mapping every seed to `∅`.
    pub fn empty(arity: u32) -> Self {
        DefiniteStrategy {
            arity,
            table: BTreeMap::new(),
        }
    }

    /// Builds a definite strategy from its nonempty entries, checking seed
    /// ranges and arity coherence.
    pub fn new(
        arity: u32,
        entries: impl IntoIterator<Item = (BasicSeed, PlainStrategy)>,
    ) -> Result<Self, StrategyError> {
        let mut table = BTreeMap::new();
        for (seed, s) in entries {
            if !seed.in_range(arity) {
                return Err(StrategyError::SeedOutOfRange { seed, arity });
            }
            let expected = seed.result_arity(arity);
            if s.arity != expected {
                return Err(StrategyError::ArityMismatch {
                    expected,
                    found: s.arity,
                });
            }
            if !s.is_empty() {
                table.insert(seed, s);
            }
        }
        Ok(DefiniteStrategy { arity, table })
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    /// True when every seed maps to `∅`.
    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Nonempty entries in seed order.
    pub fn entries(&self) -> impl Iterator<Item = (BasicSeed, &PlainStrategy)> {
        self.table.iter().map(|(k, v)| (*k, v))
    }

    /// Longest chain of seeds.
    pub fn depth(&self) -> usize {
        self.table
            .values()
            .flat_map(|s| s.summands.iter())
            .map(|d| 1 + d.depth())
            .max()
            .unwrap_or(0)
    }

    /// Checks that every nested strategy is coherent with its seed.
    pub fn check(&self) -> Result<(), StrategyError> {
        for (seed, s) in &self.table {
            if !seed.in_range(self.arity) {
                return Err(StrategyError::SeedOutOfRange {
                    seed: *seed,
                    arity: self.arity,
                });
            }
            let expected = seed.result_arity(self.arity);
            if s.arity != expected {
                return Err(StrategyError::ArityMismatch {
                    expected,
                    found: s.arity,
                });
            }
            for d in &s.summands {
                if d.arity != expected {
                    return Err(StrategyError::ArityMismatch {
                        expected,
                        found: d.arity,
                    });
                }
                d.check()?;
            }
        }
        Ok(())
    }

    /// Deterministic textual dump, first line `strat-v1`.
    pub fn dump(&self) -> String {
        let mut out = String::from("strat-v1\n");
        self.dump_into(&mut out, 0);
        out
    }

    fn dump_into(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        if self.table.is_empty() {
            let _ = writeln!(out, "{pad}<{}> {{}}", self.arity);
            return;
        }
        let _ = writeln!(out, "{pad}<{}> {{", self.arity);
        for (seed, s) in &self.table {
            let _ = writeln!(out, "{pad}  {seed} -> [");
            for d in &s.summands {
                d.dump_into(out, indent + 2);
            }
            let _ = writeln!(out, "{pad}  ]");
        }
        let _ = writeln!(out, "{pad}}}");
    }
}

/// `⟦gamma ⊢ p⟧`.
pub fn interpret(p: &Process, gamma: u32) -> Result<DefiniteStrategy, StrategyError> {
    typecheck(p, gamma)?;
    Ok(interpret_unchecked(p, gamma))
}

fn interpret_unchecked(p: &Process, gamma: u32) -> DefiniteStrategy {
    let mut table: BTreeMap<BasicSeed, PlainStrategy> = BTreeMap::new();
    match p {
        Process::Sum(branches) => {
            for (prefix, cont) in branches {
                let seed = BasicSeed::of_prefix(*prefix);
                let next = prefix.extend(gamma);
                table
                    .entry(seed)
                    .or_insert_with(|| PlainStrategy::empty(next))
                    .summands
                    .push(interpret_unchecked(cont, next));
            }
        }
        Process::Par(l, r) => {
            let one = |q: &Process| PlainStrategy {
                arity: gamma + 1,
                summands: vec![interpret_unchecked(q, gamma + 1)],
            };
            table.insert(BasicSeed::PiL, one(l));
            table.insert(BasicSeed::PiR, one(r));
        }
    }
    DefiniteStrategy { arity: gamma, table }
}

/// `∂_b d`.
pub fn deriv(d: &DefiniteStrategy, b: BasicSeed) -> Result<PlainStrategy, StrategyError> {
    if !b.in_range(d.arity) {
        return Err(StrategyError::SeedOutOfRange { seed: b, arity: d.arity });
    }
    Ok(d
        .table
        .get(&b)
        .cloned()
        .unwrap_or_else(|| PlainStrategy::empty(b.result_arity(d.arity))))
}

/// Borrowing variant of [`deriv`] for hot loops; `None` stands for `∅`.
pub fn deriv_ref(d: &DefiniteStrategy, b: BasicSeed) -> Option<&PlainStrategy> {
    d.table.get(&b)
}

/// `s|i`.
pub fn restrict(s: &PlainStrategy, i: usize) -> Result<DefiniteStrategy, StrategyError> {
    s.summands.get(i).cloned().ok_or(StrategyError::IndexOutOfRange {
        index: i,
        len: s.summands.len(),
    })
}

/// A process at context `d.arity()` whose interpretation behaves like `d`.
pub fn readback(d: &DefiniteStrategy) -> Process {
    readback_report(d).0
}

/// [`readback`] together with warnings about normalized mixed shapes.
pub fn readback_report(d: &DefiniteStrategy) -> (Process, Vec<String>) {
    let mut warnings = Vec::new();
    let p = readback_into(d, &mut Vec::new(), &mut warnings);
    (p, warnings)
}

fn par_shaped(d: &DefiniteStrategy) -> Option<(&DefiniteStrategy, &DefiniteStrategy)> {
    if d.table.len() != 2 {
        return None;
    }
    let l = d.table.get(&BasicSeed::PiL)?;
    let r = d.table.get(&BasicSeed::PiR)?;
    match (l.summands.as_slice(), r.summands.as_slice()) {
        ([l], [r]) => Some((l, r)),
        _ => None,
    }
}

fn readback_into(d: &DefiniteStrategy, path: &mut Vec<String>, warnings: &mut Vec<String>) -> Process {
    if let Some((l, r)) = par_shaped(d) {
        path.push("pil".into());
        let left = readback_into(l, path, warnings);
        path.pop();
        path.push("pir".into());
        let right = readback_into(r, path, warnings);
        path.pop();
        return Process::par(left, right);
    }
    if d.table.contains_key(&BasicSeed::PiL) || d.table.contains_key(&BasicSeed::PiR) {
        let at = if path.is_empty() { "root".to_string() } else { path.join(".") };
        let msg = format!("readback: fork entries at {at} are not exactly parallel-shaped and were dropped");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let mut branches = Vec::new();
    for (seed, s) in &d.table {
        let Some(prefix) = seed.prefix() else { continue };
        for (i, sub) in s.summands.iter().enumerate() {
            path.push(format!("{seed}#{i}"));
            branches.push((prefix, readback_into(sub, path, warnings)));
            path.pop();
        }
    }
    Process::Sum(branches)
}
