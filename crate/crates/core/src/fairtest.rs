//! Fair testing: the success predicate on closed-world graphs, composition
//! of a subject with a test, and bounded equivalence checks.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::arena::{pushout, ArenaError, ChannelId, Position};
use crate::lts::{process_lts_from, strategy_lts_from, Config, GameState, Interface, Label, LtsGraph, LtsOptions};
use crate::strategy::{interpret, DefiniteStrategy, StrategyError};
use crate::term::{Enumerator, Process, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FairError {
    #[error("test expects an interface of {expected} channels, subject has {found}")]
    InterfaceMismatch { expected: usize, found: usize },
    #[error("test map sends channel {channel} to {target}, outside the test context of size {gamma}")]
    MapOutOfRange { channel: usize, target: u32, gamma: u32 },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

/// A test process `gamma ⊢ process` together with the map `h` sending the
/// subject's channel `i` to the test's channel `h[i - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Test {
    pub gamma: u32,
    pub h: Vec<u32>,
    pub process: Process,
}

impl Test {
    pub fn identity(process: Process, gamma: u32) -> Test {
        Test {
            gamma,
            h: (1..=gamma).collect(),
            process,
        }
    }

    fn check(&self, subject_gamma: u32) -> Result<(), FairError> {
        if self.h.len() != subject_gamma as usize {
            return Err(FairError::InterfaceMismatch {
                expected: self.h.len(),
                found: subject_gamma as usize,
            });
        }
        if let Some((i, t)) = self.h.iter().enumerate().find(|(_, t)| !(1..=self.gamma).contains(*t)) {
            return Err(FairError::MapOutOfRange {
                channel: i + 1,
                target: *t,
                gamma: self.gamma,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Test {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h: Vec<String> = self.h.iter().map(u32::to_string).collect();
        write!(f, "h=[{}] ctx {}. {}", h.join(","), self.gamma, self.process)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BotMode {
    /// Every state reachable without ticking can still reach a tick.
    #[default]
    Weak,
    /// The root and each of its one-step successors tick immediately.
    Strict,
}

/// Which semantics a verdict is computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    #[default]
    Process,
    Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FairOptions {
    pub side: Side,
    pub bot: BotMode,
}

/// A path from the root to a state that cannot tick any more.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub vertices: Vec<usize>,
    pub labels: Vec<Label>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.is_empty() {
            return f.write_str("(root)");
        }
        let parts: Vec<String> = self.labels.iter().map(Label::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail(w) => write!(f, "fail witness: {w}"),
        }
    }
}

/// Success of the root of a closed-world graph under the default reading.
pub fn in_bot(g: &LtsGraph) -> Verdict {
    in_bot_with(g, BotMode::Weak)
}

pub fn in_bot_with(g: &LtsGraph, mode: BotMode) -> Verdict {
    match mode {
        BotMode::Weak => weak_bot(g),
        BotMode::Strict => strict_bot(g),
    }
}

fn weak_bot(g: &LtsGraph) -> Verdict {
    let n = g.num_vertices();
    // Backwards from tick sources along tick-free edges.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, l, t) in g.edges() {
        if l != Label::Heart {
            preds[t].push(s);
        }
    }
    let mut good = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| g.ticks(v)).collect();
    for &v in &queue {
        good[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &u in &preds[v] {
            if !good[u] {
                good[u] = true;
                queue.push_back(u);
            }
        }
    }
    // Forwards from the root, shortest paths first.
    let mut parent: Vec<Option<(usize, Label)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[g.root()] = true;
    let mut queue = VecDeque::from([g.root()]);
    while let Some(v) = queue.pop_front() {
        if !good[v] {
            return Verdict::Fail(trace_back(&parent, v));
        }
        for &(l, t) in g.successors(v) {
            if l != Label::Heart && !seen[t] {
                seen[t] = true;
                parent[t] = Some((v, l));
                queue.push_back(t);
            }
        }
    }
    Verdict::Pass
}

fn trace_back(parent: &[Option<(usize, Label)>], mut v: usize) -> Witness {
    let mut vertices = vec![v];
    let mut labels = Vec::new();
    while let Some((u, l)) = parent[v] {
        vertices.push(u);
        labels.push(l);
        v = u;
    }
    vertices.reverse();
    labels.reverse();
    Witness { vertices, labels }
}

fn strict_bot(g: &LtsGraph) -> Verdict {
    let root = g.root();
    if !g.ticks(root) {
        return Verdict::Fail(Witness {
            vertices: vec![root],
            labels: vec![],
        });
    }
    for &(l, t) in g.successors(root) {
        if !g.ticks(t) {
            return Verdict::Fail(Witness {
                vertices: vec![root, t],
                labels: vec![l],
            });
        }
    }
    Verdict::Pass
}

/// Process-side composition: the subject, its channels renamed through
/// `h`, in parallel with the test.
pub fn compose_test_process(subject: &Process, gamma: u32, test: &Test) -> Result<Config, FairError> {
    test.check(gamma)?;
    Ok(Config::new(
        test.gamma,
        vec![
            (test.h.clone(), subject.clone()),
            ((1..=test.gamma).collect(), test.process.clone()),
        ],
    )?)
}

/// Game-side composition over the pushout of the two positions along all
/// channels of the subject; `h` sends subject channels to test channels.
pub fn compose_test_game(
    subject: &GameState,
    test: &GameState,
    h: &BTreeMap<ChannelId, ChannelId>,
) -> Result<GameState, FairError> {
    let z = pushout(subject.position(), test.position(), h)?;
    let mut assignment = BTreeMap::new();
    for side in [subject, test] {
        for p in side.position().players() {
            assignment.insert(p.id, side.strategy(p.id).expect("assigned").clone());
        }
    }
    Ok(GameState::new(z, assignment)?)
}

/// `d` on `[n]` composed with `⟦test⟧` on `[test.gamma]`.
pub fn compose_test_strategy(d: &DefiniteStrategy, test: &Test) -> Result<GameState, FairError> {
    test.check(d.arity())?;
    let x = GameState::representable(d);
    let t = GameState::representable(&interpret(&test.process, test.gamma)?);
    let h = map_channels(x.position(), t.position(), &test.h);
    compose_test_game(&x, &t, &h)
}

fn map_channels(x: &Position, y: &Position, h: &[u32]) -> BTreeMap<ChannelId, ChannelId> {
    x.channels()
        .iter()
        .zip(h)
        .map(|(c, t)| (*c, y.channel_at(*t).expect("checked range")))
        .collect()
}

/// Closed-world graph of the subject composed with the test.
pub fn composed_graph(subject: &Process, gamma: u32, test: &Test, side: Side) -> Result<LtsGraph, FairError> {
    match side {
        Side::Process => {
            let cfg = compose_test_process(subject, gamma, test)?;
            Ok(process_lts_from(
                Interface {
                    h: Vec::new(),
                    subject: cfg,
                },
                LtsOptions::closed(),
            ))
        }
        Side::Strategy => {
            let d = interpret(subject, gamma)?;
            strategy_composed_graph(&d, test)
        }
    }
}

pub fn strategy_composed_graph(d: &DefiniteStrategy, test: &Test) -> Result<LtsGraph, FairError> {
    let state = compose_test_strategy(d, test)?;
    Ok(strategy_lts_from(
        Interface {
            h: Vec::new(),
            subject: state,
        },
        LtsOptions::closed(),
    ))
}

pub fn passes(subject: &Process, gamma: u32, test: &Test, opts: FairOptions) -> Result<Verdict, FairError> {
    let g = composed_graph(subject, gamma, test, opts.side)?;
    Ok(in_bot_with(&g, opts.bot))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqOutcome {
    EquivalentOnSuite,
    /// First test, in suite order, on which the verdicts differ.
    Distinguished {
        index: usize,
        left: Verdict,
        right: Verdict,
    },
}

pub fn eq_check(p: &Process, q: &Process, gamma: u32, tests: &[Test], opts: FairOptions) -> Result<EqOutcome, FairError> {
    for (index, t) in tests.iter().enumerate() {
        let left = passes(p, gamma, t, opts)?;
        let right = passes(q, gamma, t, opts)?;
        if left.passed() != right.passed() {
            return Ok(EqOutcome::Distinguished { index, left, right });
        }
    }
    Ok(EqOutcome::EquivalentOnSuite)
}

/// Deterministic test suite for subjects with `interface_size` channels:
/// every enumerated process over the interface with the identity map, then,
/// for each pair `i < j` of interface channels, the processes over one
/// channel less with `i` and `j` sent to the same channel.
pub fn gen_tests(interface_size: u32, depth: usize, width: usize) -> Vec<Test> {
    gen_tests_capped(interface_size, depth, width, None)
}

/// [`gen_tests`] restricted to test processes of at most `max_size` nodes.
pub fn gen_tests_capped(interface_size: u32, depth: usize, width: usize, max_size: Option<usize>) -> Vec<Test> {
    let k = interface_size;
    let procs = |gamma: u32| {
        let mut e = Enumerator::new(gamma, depth, width);
        if let Some(cap) = max_size {
            e = e.max_size(cap);
        }
        e.iter()
    };
    let mut out: Vec<Test> = procs(k).map(|p| Test::identity(p, k)).collect();
    for i in 1..=k {
        for j in i + 1..=k {
            let h: Vec<u32> = (1..=k)
                .map(|c| match c.cmp(&j) {
                    std::cmp::Ordering::Less => c,
                    std::cmp::Ordering::Equal => i,
                    std::cmp::Ordering::Greater => c - 1,
                })
                .collect();
            out.extend(procs(k - 1).map(|p| Test {
                gamma: k - 1,
                h: h.clone(),
                process: p,
            }));
        }
    }
    out
}
