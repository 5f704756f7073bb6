//! The strategy side: a game state is a position with a definite strategy
//! for each player. Every step plays a seed in the position through
//! [`arena::apply`], so channel bookkeeping is the arena's.

use std::collections::BTreeMap;

use super::{explore_by, Interface, Label, LtsGraph, LtsOptions, World};
use crate::arena::{self, Move, MoveKind, PlayerId, Position};
use crate::strategy::{deriv_ref, BasicSeed, DefiniteStrategy, StrategyError};

#[derive(Debug, Clone)]
pub struct GameState {
    position: Position,
    assignment: BTreeMap<PlayerId, DefiniteStrategy>,
}

/// Canonical identity of a game state: channel count and the sorted
/// (attachment, strategy) pairs of its players.
pub type GameKey = (usize, Vec<(Vec<u32>, DefiniteStrategy)>);

impl GameState {
    pub fn new(position: Position, assignment: BTreeMap<PlayerId, DefiniteStrategy>) -> Result<Self, StrategyError> {
        assert_eq!(
            position.players().len(),
            assignment.len(),
            "assignment must cover exactly the players"
        );
        for p in position.players() {
            let d = assignment.get(&p.id).expect("player without strategy");
            if d.arity() as usize != p.arity() {
                return Err(StrategyError::ArityMismatch {
                    expected: p.arity() as u32,
                    found: d.arity(),
                });
            }
        }
        Ok(GameState { position, assignment })
    }

    /// `d` played by the single player of `[n]`.
    pub fn representable(d: &DefiniteStrategy) -> GameState {
        let position = Position::representable(d.arity() as usize);
        let id = position.players()[0].id;
        GameState {
            position,
            assignment: BTreeMap::from([(id, d.clone())]),
        }
    }

    pub fn position(&self) -> &Position {
        &self.position
    }

    pub fn strategy(&self, p: PlayerId) -> Option<&DefiniteStrategy> {
        self.assignment.get(&p)
    }

    pub fn key(&self) -> GameKey {
        let mut players: Vec<_> = self
            .position
            .players()
            .iter()
            .map(|p| (self.position.attachment_indices(p), self.assignment[&p.id].clone()))
            .collect();
        players.sort();
        (self.position.channels().len(), players)
    }

    /// Plays `kind` with `movers`; the avatars, in role order, receive `next`.
    fn step(&self, movers: &[PlayerId], kind: MoveKind, next: Vec<DefiniteStrategy>) -> (Move, GameState) {
        let m = arena::apply(&self.position, movers, kind).expect("step fits the position");
        let mut assignment = self.assignment.clone();
        for p in movers {
            assignment.remove(p);
        }
        let avatars = m.roles().iter().flat_map(|r| r.avatars.iter().copied());
        for (a, d) in avatars.zip(next) {
            assignment.insert(a, d);
        }
        let state = GameState {
            position: m.final_position().clone(),
            assignment,
        };
        (m, state)
    }

    fn index(&self, c: arena::ChannelId) -> u32 {
        self.position.channel_index(c).expect("channel of the position")
    }

    fn last_channel(&self) -> u32 {
        self.position.channels().len() as u32
    }
}

fn summands(d: &DefiniteStrategy, b: BasicSeed) -> &[DefiniteStrategy] {
    deriv_ref(d, b).map(|s| s.summands()).unwrap_or(&[])
}

/// Every well-defined tick, fork and synchronization successor.
pub fn closed_world_steps(s: &GameState) -> Vec<(Move, GameState)> {
    let mut out = Vec::new();
    for p in s.position.players() {
        let d = &s.assignment[&p.id];
        let n = p.arity();
        for next in summands(d, BasicSeed::Heart) {
            out.push(s.step(&[p.id], MoveKind::Heart(n), vec![next.clone()]));
        }
        for l in summands(d, BasicSeed::PiL) {
            for r in summands(d, BasicSeed::PiR) {
                out.push(s.step(&[p.id], MoveKind::Pi(n), vec![l.clone(), r.clone()]));
            }
        }
    }
    for q in s.position.players() {
        let dq = &s.assignment[&q.id];
        for (seed, outs) in dq.entries() {
            let BasicSeed::Out(c, d) = seed else { continue };
            let subject = q.attachment[c as usize - 1];
            for p in s.position.players() {
                if p.id == q.id {
                    continue;
                }
                let dp = &s.assignment[&p.id];
                for a in 1..=p.arity() as u32 {
                    if p.attachment[a as usize - 1] != subject {
                        continue;
                    }
                    let kind = MoveKind::Tau {
                        n: p.arity(),
                        a: a as usize,
                        m: q.arity(),
                        c: c as usize,
                        d: d as usize,
                    };
                    for oq in outs.summands() {
                        for ip in summands(dp, BasicSeed::In(a)) {
                            out.push(s.step(&[q.id, p.id], kind, vec![oq.clone(), ip.clone()]));
                        }
                    }
                }
            }
        }
    }
    out
}

fn closed_label(kind: MoveKind) -> Label {
    match kind {
        MoveKind::Heart(_) => Label::Heart,
        MoveKind::Pi(_) => Label::Pi,
        MoveKind::Tau { .. } => Label::Delta,
        _ => unreachable!("not a closed-world move"),
    }
}

fn interface_steps(s: &GameState, h: &[u32], enable_link: bool) -> Vec<(Label, Vec<u32>, GameState)> {
    let mut out = Vec::new();
    let with = |extra: u32| {
        let mut h2 = h.to_vec();
        h2.push(extra);
        h2
    };
    for p in s.position.players() {
        let d = &s.assignment[&p.id];
        let n = p.arity();
        for (seed, plain) in d.entries() {
            for next in plain.summands() {
                match seed {
                    BasicSeed::In(a) => {
                        let x = s.index(p.attachment[a as usize - 1]);
                        if h.contains(&x) {
                            let (_, t) = s.step(&[p.id], MoveKind::In { n, a: a as usize }, vec![next.clone()]);
                            let fresh = t.last_channel();
                            out.push((Label::In(x), with(fresh), t));
                        }
                    }
                    BasicSeed::Out(c, e) => {
                        let x = s.index(p.attachment[c as usize - 1]);
                        let b = s.index(p.attachment[e as usize - 1]);
                        if h.contains(&x) {
                            let kind = MoveKind::Out {
                                m: n,
                                c: c as usize,
                                d: e as usize,
                            };
                            let (_, t) = s.step(&[p.id], kind, vec![next.clone()]);
                            out.push((Label::Out(x, b), with(b), t));
                        }
                    }
                    BasicSeed::PiL | BasicSeed::PiR => {
                        let (kind, label) = if seed == BasicSeed::PiL {
                            (MoveKind::PiL(n), Label::PiL)
                        } else {
                            (MoveKind::PiR(n), Label::PiR)
                        };
                        let (_, t) = s.step(&[p.id], kind, vec![next.clone()]);
                        let fresh = t.last_channel();
                        out.push((label, with(fresh), t));
                    }
                    BasicSeed::Heart => {}
                }
            }
        }
    }
    if enable_link {
        out.extend(link_steps(s, h));
    }
    out
}

/// An output on a known channel by one player paired with an input on a
/// different channel by another, the input receiving a fresh channel.
fn link_steps(s: &GameState, h: &[u32]) -> Vec<(Label, Vec<u32>, GameState)> {
    let mut out = Vec::new();
    for q in s.position.players() {
        let dq = &s.assignment[&q.id];
        for (seed, outs) in dq.entries() {
            let BasicSeed::Out(c, e) = seed else { continue };
            let x = s.index(q.attachment[c as usize - 1]);
            let b = s.index(q.attachment[e as usize - 1]);
            if !h.contains(&x) {
                continue;
            }
            for p in s.position.players() {
                if p.id == q.id {
                    continue;
                }
                let dp = &s.assignment[&p.id];
                for (pseed, ins) in dp.entries() {
                    let BasicSeed::In(a) = pseed else { continue };
                    let y = s.index(p.attachment[a as usize - 1]);
                    if y == x {
                        continue;
                    }
                    let out_kind = MoveKind::Out {
                        m: q.arity(),
                        c: c as usize,
                        d: e as usize,
                    };
                    let in_kind = MoveKind::In {
                        n: p.arity(),
                        a: a as usize,
                    };
                    for oq in outs.summands() {
                        for ip in ins.summands() {
                            let (_, mid) = s.step(&[q.id], out_kind, vec![oq.clone()]);
                            // `q` moved; `p` kept its identifier.
                            let (_, t) = mid.step(&[p.id], in_kind, vec![ip.clone()]);
                            out.push((Label::Link(x, b, y), h.to_vec(), t));
                        }
                    }
                }
            }
        }
    }
    out
}

/// The graph of `d` played on `[n]` with the identity interface.
pub fn strategy_lts(d: &DefiniteStrategy, opts: LtsOptions) -> LtsGraph {
    let n = d.arity();
    strategy_lts_from(
        Interface {
            h: (1..=n).collect(),
            subject: GameState::representable(d),
        },
        opts,
    )
}

pub fn strategy_lts_from(root: Interface<GameState>, opts: LtsOptions) -> LtsGraph {
    match opts.world {
        World::Closed => {
            explore_by(root.subject, GameState::key, |s| {
                closed_world_steps(s)
                    .into_iter()
                    .map(|(m, t)| (closed_label(m.kind()), t))
                    .collect()
            })
            .0
        }
        World::Interface => {
            explore_by(
                root,
                |s| (s.h.clone(), s.subject.key()),
                |s| {
                    let mut out: Vec<_> = closed_world_steps(&s.subject)
                        .into_iter()
                        .map(|(m, t)| {
                            (
                                closed_label(m.kind()),
                                Interface {
                                    h: s.h.clone(),
                                    subject: t,
                                },
                            )
                        })
                        .collect();
                    for (l, h, t) in interface_steps(&s.subject, &s.h, opts.enable_link) {
                        out.push((l, Interface { h, subject: t }));
                    }
                    out
                },
            )
            .0
        }
    }
}
