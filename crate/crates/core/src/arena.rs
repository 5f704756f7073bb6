//! Positions as string diagrams, seeds, pushout-extended moves and plays.
//!
//! A position is a finite set of channels together with players; an `n`-ary
//! player is attached to `n` channels through its slots `1..=n`. Only the
//! dimensions of channels and players are stored; a move is a tagged record
//! carrying its initial and final positions and the traces that relate them
//! (the legs of the cospan restricted to channels and players).
//!
//! Channels are kept in a sequence: the 1-based index of a channel in
//! [`Position::channels`] is its context index, and channels created by a
//! move are appended after the traced ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn next_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelId(u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerId(u64);

impl ChannelId {
    pub fn fresh() -> Self {
        ChannelId(next_id())
    }
}

impl PlayerId {
    pub fn fresh() -> Self {
        PlayerId(next_id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("move parameters out of range: {0}")]
    ParameterOutOfRange(MoveKind),
    #[error("gluing map is not total on the interface (channel {0:?} unmapped)")]
    GlueNotTotal(ChannelId),
    #[error("gluing map targets channel {0:?} which is not in the glued position")]
    GlueTargetMissing(ChannelId),
    #[error("plays do not compose: final position of the first is not the initial position of the second")]
    BoundaryMismatch,
    #[error("invalid position: {0}")]
    InvalidPosition(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Player {
    pub id: PlayerId,
    /// `attachment[k]` is the channel seen through slot `k + 1`.
    pub attachment: Vec<ChannelId>,
}

impl Player {
    pub fn arity(&self) -> usize {
        self.attachment.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Position {
    channels: Vec<ChannelId>,
    players: Vec<Player>,
}

impl Position {
    pub fn new(channels: Vec<ChannelId>, players: Vec<Player>) -> Result<Self, ArenaError> {
        let known: BTreeSet<_> = channels.iter().copied().collect();
        if known.len() != channels.len() {
            return Err(ArenaError::InvalidPosition("duplicate channel".into()));
        }
        let mut ids = BTreeSet::new();
        for p in &players {
            if !ids.insert(p.id) {
                return Err(ArenaError::InvalidPosition(format!("duplicate player {:?}", p.id)));
            }
            if let Some(c) = p.attachment.iter().find(|c| !known.contains(c)) {
                return Err(ArenaError::InvalidPosition(format!(
                    "player {:?} attached to unknown channel {c:?}",
                    p.id
                )));
            }
        }
        Ok(Position { channels, players })
    }

    pub fn empty() -> Self {
        Position::default()
    }

    /// `n` fresh channels and no players.
    pub fn channels_only(n: usize) -> Self {
        Position {
            channels: (0..n).map(|_| ChannelId::fresh()).collect(),
            players: Vec::new(),
        }
    }

    /// The representable position `[n]`: one `n`-ary player on `n` distinct
    /// fresh channels.
    pub fn representable(n: usize) -> Self {
        let channels: Vec<_> = (0..n).map(|_| ChannelId::fresh()).collect();
        let players = vec![Player {
            id: PlayerId::fresh(),
            attachment: channels.clone(),
        }];
        Position { channels, players }
    }

    pub fn channels(&self) -> &[ChannelId] {
        &self.channels
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn player(&self, id: PlayerId) -> Option<&Player> {
        self.players.iter().find(|p| p.id == id)
    }

    /// 1-based context index of a channel.
    pub fn channel_index(&self, c: ChannelId) -> Option<u32> {
        self.channels.iter().position(|&d| d == c).map(|i| i as u32 + 1)
    }

    /// Channel at a 1-based context index.
    pub fn channel_at(&self, index: u32) -> Option<ChannelId> {
        index
            .checked_sub(1)
            .and_then(|i| self.channels.get(i as usize).copied())
    }

    /// Attachment of a player as context indices.
    pub fn attachment_indices(&self, p: &Player) -> Vec<u32> {
        p.attachment
            .iter()
            .map(|&c| self.channel_index(c).expect("attachment inside position"))
            .collect()
    }

    /// Same position minus one player; all channels are kept.
    pub fn without_player(&self, id: PlayerId) -> Position {
        Position {
            channels: self.channels.clone(),
            players: self.players.iter().filter(|p| p.id != id).cloned().collect(),
        }
    }

    /// Identical identifiers and attachments, regardless of player order.
    pub fn same_as(&self, other: &Position) -> bool {
        let a: BTreeSet<_> = self.channels.iter().collect();
        let b: BTreeSet<_> = other.channels.iter().collect();
        if a != b || self.players.len() != other.players.len() {
            return false;
        }
        self.players
            .iter()
            .all(|p| other.player(p.id).is_some_and(|q| q.attachment == p.attachment))
    }

    /// Order-respecting canonical form: the channel count and the sorted
    /// attachments written as context indices.
    pub fn layout(&self) -> (usize, Vec<Vec<u32>>) {
        let mut atts: Vec<_> = self.players.iter().map(|p| self.attachment_indices(p)).collect();
        atts.sort();
        (self.channels.len(), atts)
    }

    pub fn rename(&self, r: &Renaming) -> Position {
        Position {
            channels: self.channels.iter().map(|c| r.channel(*c)).collect(),
            players: self
                .players
                .iter()
                .map(|p| Player {
                    id: r.player(p.id),
                    attachment: p.attachment.iter().map(|c| r.channel(*c)).collect(),
                })
                .collect(),
        }
    }

    /// An isomorphism `self → other` (bijections on channels and players
    /// preserving arities and attachments), if one exists.
    pub fn find_iso(&self, other: &Position) -> Option<Renaming> {
        if self.channels.len() != other.channels.len() || self.players.len() != other.players.len() {
            return None;
        }
        let mut arities_a: Vec<_> = self.players.iter().map(Player::arity).collect();
        let mut arities_b: Vec<_> = other.players.iter().map(Player::arity).collect();
        arities_a.sort();
        arities_b.sort();
        if arities_a != arities_b {
            return None;
        }
        let mut state = IsoSearch {
            a: self,
            b: other,
            players: BTreeMap::new(),
            used: BTreeSet::new(),
            chans: BTreeMap::new(),
            chans_used: BTreeSet::new(),
        };
        if !state.search(0) {
            return None;
        }
        // Unattached channels pair up in order.
        let free_a: Vec<_> = self.channels.iter().filter(|c| !state.chans.contains_key(c)).copied().collect();
        let free_b: Vec<_> = other.channels.iter().filter(|c| !state.chans_used.contains(c)).copied().collect();
        for (x, y) in free_a.into_iter().zip(free_b) {
            state.chans.insert(x, y);
        }
        Some(Renaming {
            channels: state.chans,
            players: state.players,
        })
    }

    pub fn is_isomorphic(&self, other: &Position) -> bool {
        self.find_iso(other).is_some()
    }
}

struct IsoSearch<'a> {
    a: &'a Position,
    b: &'a Position,
    players: BTreeMap<PlayerId, PlayerId>,
    used: BTreeSet<PlayerId>,
    chans: BTreeMap<ChannelId, ChannelId>,
    chans_used: BTreeSet<ChannelId>,
}

impl IsoSearch<'_> {
    fn search(&mut self, i: usize) -> bool {
        let Some(pa) = self.a.players.get(i) else {
            return true;
        };
        for pb in &self.b.players {
            if self.used.contains(&pb.id) || pb.arity() != pa.arity() {
                continue;
            }
            let mut added = Vec::new();
            let mut ok = true;
            for (x, y) in pa.attachment.iter().zip(&pb.attachment) {
                match self.chans.get(x) {
                    Some(z) if z == y => {}
                    Some(_) => ok = false,
                    None if self.chans_used.contains(y) => ok = false,
                    None => {
                        self.chans.insert(*x, *y);
                        self.chans_used.insert(*y);
                        added.push(*x);
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok {
                self.players.insert(pa.id, pb.id);
                self.used.insert(pb.id);
                if self.search(i + 1) {
                    return true;
                }
                self.players.remove(&pa.id);
                self.used.remove(&pb.id);
            }
            for x in added {
                let y = self.chans.remove(&x).expect("added");
                self.chans_used.remove(&y);
            }
        }
        false
    }
}

/// A partial renaming of identifiers; unmapped identifiers are kept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Renaming {
    pub channels: BTreeMap<ChannelId, ChannelId>,
    pub players: BTreeMap<PlayerId, PlayerId>,
}

impl Renaming {
    pub fn channel(&self, c: ChannelId) -> ChannelId {
        self.channels.get(&c).copied().unwrap_or(c)
    }

    pub fn player(&self, p: PlayerId) -> PlayerId {
        self.players.get(&p).copied().unwrap_or(p)
    }
}

/// Move generators. Channel parameters are 1-based slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveKind {
    /// Left half-fork on an `n`-ary player.
    PiL(usize),
    /// Right half-fork on an `n`-ary player.
    PiR(usize),
    /// Input on slot `a` of an `n`-ary player.
    In { n: usize, a: usize },
    /// Output of slot `d` on slot `c` by an `m`-ary player.
    Out { m: usize, c: usize, d: usize },
    /// Tick.
    Heart(usize),
    /// Fork.
    Pi(usize),
    /// Synchronization between an `n`-ary input player (slot `a`) and an
    /// `m`-ary output player (slots `c`, `d`).
    Tau { n: usize, a: usize, m: usize, c: usize, d: usize },
}

impl MoveKind {
    pub fn is_basic(self) -> bool {
        matches!(
            self,
            MoveKind::PiL(_) | MoveKind::PiR(_) | MoveKind::In { .. } | MoveKind::Out { .. } | MoveKind::Heart(_)
        )
    }

    pub fn is_closed_world(self) -> bool {
        matches!(self, MoveKind::Pi(_) | MoveKind::Tau { .. } | MoveKind::Heart(_))
    }

    pub fn in_range(self) -> bool {
        let slot = |x: usize, n: usize| (1..=n).contains(&x);
        match self {
            MoveKind::PiL(_) | MoveKind::PiR(_) | MoveKind::Heart(_) | MoveKind::Pi(_) => true,
            MoveKind::In { n, a } => slot(a, n),
            MoveKind::Out { m, c, d } => slot(c, m) && slot(d, m),
            MoveKind::Tau { n, a, m, c, d } => slot(a, n) && slot(c, m) && slot(d, m),
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MoveKind::PiL(n) => write!(f, "pil({n})"),
            MoveKind::PiR(n) => write!(f, "pir({n})"),
            MoveKind::In { n, a } => write!(f, "in({n},{a})"),
            MoveKind::Out { m, c, d } => write!(f, "out({m},{c},{d})"),
            MoveKind::Heart(n) => write!(f, "heart({n})"),
            MoveKind::Pi(n) => write!(f, "pi({n})"),
            MoveKind::Tau { n, a, m, c, d } => write!(f, "tau({n},{a},{m},{c},{d})"),
        }
    }
}

impl FromStr for MoveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, rest) = s.split_once('(').ok_or_else(|| format!("malformed move kind `{s}`"))?;
        let args = rest
            .strip_suffix(')')
            .ok_or_else(|| format!("malformed move kind `{s}`"))?;
        let nums = args
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("bad parameter in `{s}`: {e}"))?;
        let kind = match (name.trim(), nums.as_slice()) {
            ("pil", [n]) => MoveKind::PiL(*n),
            ("pir", [n]) => MoveKind::PiR(*n),
            ("in", [n, a]) => MoveKind::In { n: *n, a: *a },
            ("out", [m, c, d]) => MoveKind::Out { m: *m, c: *c, d: *d },
            ("heart", [n]) => MoveKind::Heart(*n),
            ("pi", [n]) => MoveKind::Pi(*n),
            ("tau", [n, a, m, c, d]) => MoveKind::Tau {
                n: *n,
                a: *a,
                m: *m,
                c: *c,
                d: *d,
            },
            _ => return Err(format!("unknown move kind `{s}`")),
        };
        Ok(kind)
    }
}

/// One moving player of a move and its avatars in the final position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Role {
    pub initial: PlayerId,
    pub avatars: Vec<PlayerId>,
}

/// A move `initial → final`, with its channel trace (injective, from initial
/// channels to final channels) and player trace.
///
/// `roles` lists the moving players in seed order: for a synchronization the
/// output player comes first, then the input player. Every other initial
/// player is a spectator traced to itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    kind: MoveKind,
    initial: Position,
    final_position: Position,
    channel_trace: BTreeMap<ChannelId, ChannelId>,
    roles: Vec<Role>,
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        self.kind
    }

    pub fn initial(&self) -> &Position {
        &self.initial
    }

    pub fn final_position(&self) -> &Position {
        &self.final_position
    }

    pub fn channel_trace(&self) -> &BTreeMap<ChannelId, ChannelId> {
        &self.channel_trace
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn is_moving(&self, p: PlayerId) -> bool {
        self.roles.iter().any(|r| r.initial == p)
    }

    /// Initial players that do not take part in the move.
    pub fn spectators(&self) -> impl Iterator<Item = &Player> {
        self.initial.players.iter().filter(|p| !self.is_moving(p.id))
    }

    /// Full player trace as a relation from initial to final players.
    pub fn player_trace(&self) -> Vec<(PlayerId, PlayerId)> {
        let mut out = Vec::new();
        for p in &self.initial.players {
            match self.roles.iter().find(|r| r.initial == p.id) {
                Some(r) => out.extend(r.avatars.iter().map(|a| (p.id, *a))),
                None => out.push((p.id, p.id)),
            }
        }
        out
    }

    pub fn rename(&self, r: &Renaming) -> Move {
        Move {
            kind: self.kind,
            initial: self.initial.rename(r),
            final_position: self.final_position.rename(r),
            channel_trace: self
                .channel_trace
                .iter()
                .map(|(a, b)| (r.channel(*a), r.channel(*b)))
                .collect(),
            roles: self
                .roles
                .iter()
                .map(|role| Role {
                    initial: r.player(role.initial),
                    avatars: role.avatars.iter().map(|a| r.player(*a)).collect(),
                })
                .collect(),
        }
    }

    /// Final channels outside the image of the channel trace.
    pub fn created_channels(&self) -> Vec<ChannelId> {
        let image: BTreeSet<_> = self.channel_trace.values().collect();
        self.final_position
            .channels
            .iter()
            .filter(|c| !image.contains(c))
            .copied()
            .collect()
    }
}

/// The canonical seed of a move kind.
pub fn seed(kind: MoveKind) -> Result<Move, ArenaError> {
    if !kind.in_range() {
        return Err(ArenaError::ParameterOutOfRange(kind));
    }
    let fresh_channels = |n: usize| -> Vec<ChannelId> { (0..n).map(|_| ChannelId::fresh()).collect() };
    let trace = |from: &[ChannelId], to: &[ChannelId]| -> BTreeMap<ChannelId, ChannelId> {
        from.iter().copied().zip(to.iter().copied()).collect()
    };
    let mv = match kind {
        MoveKind::PiL(n) | MoveKind::PiR(n) | MoveKind::In { n, .. } => {
            let before = fresh_channels(n);
            let mut after = fresh_channels(n);
            after.push(ChannelId::fresh());
            one_player(kind, before, after)
        }
        MoveKind::Out { m: n, .. } | MoveKind::Heart(n) => one_player(kind, fresh_channels(n), fresh_channels(n)),
        MoveKind::Pi(n) => {
            let before = fresh_channels(n);
            let mut after = fresh_channels(n);
            after.push(ChannelId::fresh());
            let p = Player {
                id: PlayerId::fresh(),
                attachment: before.clone(),
            };
            let left = Player {
                id: PlayerId::fresh(),
                attachment: after.clone(),
            };
            let right = Player {
                id: PlayerId::fresh(),
                attachment: after.clone(),
            };
            Move {
                kind,
                channel_trace: trace(&before, &after),
                roles: vec![Role {
                    initial: p.id,
                    avatars: vec![left.id, right.id],
                }],
                initial: Position {
                    channels: before,
                    players: vec![p],
                },
                final_position: Position {
                    channels: after,
                    players: vec![left, right],
                },
            }
        }
        MoveKind::Tau { n, a, m, c, d } => {
            // Output player on m channels; the input player shares its a-th
            // slot with the output's c-th and has n - 1 further channels.
            let out_chans = fresh_channels(m);
            let mut in_chans = Vec::with_capacity(n);
            for slot in 1..=n {
                in_chans.push(if slot == a { out_chans[c - 1] } else { ChannelId::fresh() });
            }
            let mut before = out_chans.clone();
            before.extend(in_chans.iter().copied().filter(|x| *x != out_chans[c - 1]));
            let after = fresh_channels(before.len());
            let tr = trace(&before, &after);
            let q = Player {
                id: PlayerId::fresh(),
                attachment: out_chans.clone(),
            };
            let p = Player {
                id: PlayerId::fresh(),
                attachment: in_chans.clone(),
            };
            let q2 = Player {
                id: PlayerId::fresh(),
                attachment: out_chans.iter().map(|x| tr[x]).collect(),
            };
            let mut p2_att: Vec<_> = in_chans.iter().map(|x| tr[x]).collect();
            p2_att.push(tr[&out_chans[d - 1]]);
            let p2 = Player {
                id: PlayerId::fresh(),
                attachment: p2_att,
            };
            Move {
                kind,
                channel_trace: tr,
                roles: vec![
                    Role {
                        initial: q.id,
                        avatars: vec![q2.id],
                    },
                    Role {
                        initial: p.id,
                        avatars: vec![p2.id],
                    },
                ],
                initial: Position {
                    channels: before,
                    players: vec![q, p],
                },
                final_position: Position {
                    channels: after,
                    players: vec![q2, p2],
                },
            }
        }
    };
    Ok(mv)
}

fn one_player(kind: MoveKind, before: Vec<ChannelId>, after: Vec<ChannelId>) -> Move {
    let p = Player {
        id: PlayerId::fresh(),
        attachment: before.clone(),
    };
    let p2 = Player {
        id: PlayerId::fresh(),
        attachment: after.clone(),
    };
    Move {
        kind,
        channel_trace: before.iter().copied().zip(after.iter().copied()).collect(),
        roles: vec![Role {
            initial: p.id,
            avatars: vec![p2.id],
        }],
        initial: Position {
            channels: before,
            players: vec![p],
        },
        final_position: Position {
            channels: after,
            players: vec![p2],
        },
    }
}

/// Channels of a move's initial position: the part along which it is glued.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub channels: Vec<ChannelId>,
}

pub fn interface(m: &Move) -> Interface {
    Interface {
        channels: m.initial.channels.clone(),
    }
}

/// Pushout of `x` and `y` over all channels of `x`: the channels of `y`,
/// the players of `y`, and the players of `x` reattached through `h`.
pub fn pushout(x: &Position, y: &Position, h: &BTreeMap<ChannelId, ChannelId>) -> Result<Position, ArenaError> {
    let y_chans: BTreeSet<_> = y.channels.iter().collect();
    for c in &x.channels {
        match h.get(c) {
            None => return Err(ArenaError::GlueNotTotal(*c)),
            Some(t) if !y_chans.contains(t) => return Err(ArenaError::GlueTargetMissing(*t)),
            Some(_) => {}
        }
    }
    let mut players = y.players.clone();
    for p in &x.players {
        if y.player(p.id).is_some() {
            return Err(ArenaError::InvalidPosition(format!("player {:?} on both sides", p.id)));
        }
        players.push(Player {
            id: p.id,
            attachment: p.attachment.iter().map(|c| h[c]).collect(),
        });
    }
    Ok(Position {
        channels: y.channels.clone(),
        players,
    })
}

/// Glues a move into the position `z` along its interface.
///
/// The initial position of the result is the pushout of `m.initial` and `z`
/// over the interface, and likewise for the final position (the interface
/// reaching `m.final` through the channel trace). Players and channels of
/// `z` keep their identifiers on both sides; created channels are appended
/// after those of `z`.
pub fn extend(m: &Move, z: &Position, glue: &BTreeMap<ChannelId, ChannelId>) -> Result<Move, ArenaError> {
    let initial = pushout(&m.initial, z, glue)?;
    // Final channels of the move that come from the interface, glued into z.
    let mut final_map: BTreeMap<ChannelId, ChannelId> = BTreeMap::new();
    for (src, dst) in &m.channel_trace {
        final_map.insert(*dst, glue[src]);
    }
    let created = m.created_channels();
    let reattach = |p: &Player, map: &dyn Fn(ChannelId) -> ChannelId| Player {
        id: p.id,
        attachment: p.attachment.iter().map(|c| map(*c)).collect(),
    };

    let mut final_channels = z.channels.clone();
    final_channels.extend(created.iter().copied());
    let mut final_players = z.players.clone();
    final_players.extend(
        m.final_position
            .players
            .iter()
            .map(|p| reattach(p, &|c| final_map.get(&c).copied().unwrap_or(c))),
    );
    let final_position = Position {
        channels: final_channels,
        players: final_players,
    };

    Ok(Move {
        kind: m.kind,
        channel_trace: z.channels.iter().map(|c| (*c, *c)).collect(),
        roles: m.roles.clone(),
        initial,
        final_position,
    })
}

/// Plays `kind` in `pos`, the seed's moving players being `movers` (for a
/// synchronization: output player, then input player). The result is the
/// seed extended along the movers' attachments, with the movers keeping
/// their identifiers, so its initial position is `pos` itself.
pub fn apply(pos: &Position, movers: &[PlayerId], kind: MoveKind) -> Result<Move, ArenaError> {
    let s = seed(kind)?;
    let seed_players = s.initial.players();
    if seed_players.len() != movers.len() {
        return Err(ArenaError::InvalidPosition(format!(
            "{kind} needs {} moving players",
            seed_players.len()
        )));
    }
    let mut glue = BTreeMap::new();
    let mut renaming = Renaming::default();
    for (sp, id) in seed_players.iter().zip(movers) {
        let me = pos
            .player(*id)
            .ok_or_else(|| ArenaError::InvalidPosition(format!("no player {id:?}")))?;
        if me.arity() != sp.arity() {
            return Err(ArenaError::InvalidPosition(format!(
                "{kind} does not fit a player of arity {}",
                me.arity()
            )));
        }
        for (a, b) in sp.attachment.iter().zip(&me.attachment) {
            if *glue.entry(*a).or_insert(*b) != *b {
                return Err(ArenaError::InvalidPosition(format!(
                    "{kind}: players do not share the synchronization channel"
                )));
            }
        }
        renaming.players.insert(sp.id, *id);
    }
    let mut z = pos.clone();
    z.players.retain(|p| !movers.contains(&p.id));
    let s = s.rename(&renaming);
    let glue = glue.into_iter().collect();
    let mut m = extend(&s, &z, &glue)?;
    // Keep the original player order in the initial position.
    m.initial = pos.clone();
    Ok(m)
}

/// A composite of moves. Time runs through `moves` in order: the first move
/// starts from `initial`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Play {
    initial: Position,
    final_position: Position,
    moves: Vec<Move>,
    channel_trace: BTreeMap<ChannelId, ChannelId>,
    player_trace: Vec<(PlayerId, PlayerId)>,
}

impl Play {
    pub fn identity(x: &Position) -> Play {
        Play {
            initial: x.clone(),
            final_position: x.clone(),
            moves: Vec::new(),
            channel_trace: x.channels.iter().map(|c| (*c, *c)).collect(),
            player_trace: x.players.iter().map(|p| (p.id, p.id)).collect(),
        }
    }

    pub fn from_move(m: &Move) -> Play {
        Play {
            initial: m.initial.clone(),
            final_position: m.final_position.clone(),
            channel_trace: m.channel_trace.clone(),
            player_trace: m.player_trace(),
            moves: vec![m.clone()],
        }
    }

    pub fn initial(&self) -> &Position {
        &self.initial
    }

    pub fn final_position(&self) -> &Position {
        &self.final_position
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn channel_trace(&self) -> &BTreeMap<ChannelId, ChannelId> {
        &self.channel_trace
    }

    pub fn player_trace(&self) -> &[(PlayerId, PlayerId)] {
        &self.player_trace
    }

    /// Positions visited, from the initial one to the final one.
    pub fn positions(&self) -> Vec<&Position> {
        let mut out = vec![&self.initial];
        out.extend(self.moves.iter().map(|m| &m.final_position));
        out
    }

    fn rename(&self, r: &Renaming) -> Play {
        Play {
            initial: self.initial.rename(r),
            final_position: self.final_position.rename(r),
            moves: self.moves.iter().map(|m| m.rename(r)).collect(),
            channel_trace: self
                .channel_trace
                .iter()
                .map(|(a, b)| (r.channel(*a), r.channel(*b)))
                .collect(),
            player_trace: self
                .player_trace
                .iter()
                .map(|(a, b)| (r.player(*a), r.player(*b)))
                .collect(),
        }
    }
}

/// `p ∘ q`: first `q`, then `p`. The final position of `q` must be the
/// initial position of `p`, either literally or up to an isomorphism, in
/// which case `p` is renamed along it.
pub fn compose(p: &Play, q: &Play) -> Result<Play, ArenaError> {
    let p = if p.initial.same_as(&q.final_position) {
        p.clone()
    } else {
        let iso = p
            .initial
            .find_iso(&q.final_position)
            .ok_or(ArenaError::BoundaryMismatch)?;
        p.rename(&iso)
    };
    let channel_trace = q
        .channel_trace
        .iter()
        .filter_map(|(a, b)| p.channel_trace.get(b).map(|c| (*a, *c)))
        .collect();
    let mut player_trace = Vec::new();
    for (a, b) in &q.player_trace {
        for (b2, c) in &p.player_trace {
            if b == b2 {
                player_trace.push((*a, *c));
            }
        }
    }
    let mut moves = q.moves.clone();
    moves.extend(p.moves.iter().cloned());
    Ok(Play {
        initial: q.initial.clone(),
        final_position: p.final_position.clone(),
        moves,
        channel_trace,
        player_trace,
    })
}

/// Something that renders as a DOT graph.
pub enum Diagram<'a> {
    Position(&'a Position),
    Move(&'a Move),
    Play(&'a Play),
}

/// Deterministic DOT rendering. Channels are circles named by context
/// index, players boxes labelled with their arity, attachment edges carry
/// the slot number. Moves and plays render each stage as a cluster, with
/// dashed trace edges between consecutive stages.
pub fn to_dot(x: Diagram<'_>) -> String {
    let mut out = String::new();
    match x {
        Diagram::Position(pos) => {
            out.push_str("digraph position {\n");
            write_stage(&mut out, pos, "", "  ");
        }
        Diagram::Move(m) => {
            out.push_str("digraph move {\n");
            let _ = writeln!(out, "  label=\"{}\";", m.kind);
            write_cluster(&mut out, 0, "initial", &m.initial);
            write_cluster(&mut out, 1, "final", &m.final_position);
            write_traces(&mut out, 0, &m.initial, &m.final_position, &m.channel_trace, &m.player_trace());
        }
        Diagram::Play(play) => {
            out.push_str("digraph play {\n");
            let positions = play.positions();
            for (i, pos) in positions.iter().enumerate() {
                write_cluster(&mut out, i, &format!("stage {i}"), pos);
            }
            for (i, m) in play.moves.iter().enumerate() {
                write_traces(
                    &mut out,
                    i,
                    positions[i],
                    positions[i + 1],
                    &m.channel_trace,
                    &m.player_trace(),
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

fn node_names(pos: &Position, prefix: &str) -> (BTreeMap<ChannelId, String>, BTreeMap<PlayerId, String>) {
    let chans = pos
        .channels
        .iter()
        .enumerate()
        .map(|(i, c)| (*c, format!("{prefix}c{}", i + 1)))
        .collect();
    let players = pos
        .players
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id, format!("{prefix}p{}", i + 1)))
        .collect();
    (chans, players)
}

fn write_stage(out: &mut String, pos: &Position, prefix: &str, indent: &str) {
    let (chans, players) = node_names(pos, prefix);
    for (i, c) in pos.channels.iter().enumerate() {
        let _ = writeln!(out, "{indent}{} [shape=circle, label=\"{}\"];", chans[c], i + 1);
    }
    for p in &pos.players {
        let _ = writeln!(out, "{indent}{} [shape=box, label=\"{}\"];", players[&p.id], p.arity());
    }
    for p in &pos.players {
        for (k, c) in p.attachment.iter().enumerate() {
            let _ = writeln!(
                out,
                "{indent}{} -> {} [dir=none, label=\"{}\"];",
                players[&p.id],
                chans[c],
                k + 1
            );
        }
    }
}

fn write_cluster(out: &mut String, i: usize, label: &str, pos: &Position) {
    let _ = writeln!(out, "  subgraph cluster_{i} {{");
    let _ = writeln!(out, "    label=\"{label}\";");
    write_stage(out, pos, &format!("s{i}_"), "    ");
    out.push_str("  }\n");
}

fn write_traces(
    out: &mut String,
    i: usize,
    from: &Position,
    to: &Position,
    channel_trace: &BTreeMap<ChannelId, ChannelId>,
    player_trace: &[(PlayerId, PlayerId)],
) {
    let (fc, fp) = node_names(from, &format!("s{i}_"));
    let (tc, tp) = node_names(to, &format!("s{}_", i + 1));
    for c in &from.channels {
        if let Some(d) = channel_trace.get(c).and_then(|d| tc.get(d)) {
            let _ = writeln!(out, "  {} -> {} [style=dashed];", fc[c], d);
        }
    }
    for p in &from.players {
        for (a, b) in player_trace {
            if *a == p.id {
                if let Some(b) = tp.get(b) {
                    let _ = writeln!(out, "  {} -> {} [style=dashed];", fp[&p.id], b);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arities(pos: &Position) -> Vec<usize> {
        let mut a: Vec<_> = pos.players().iter().map(Player::arity).collect();
        a.sort();
        a
    }

    #[test]
    fn pi_seed_shape() {
        let m = seed(MoveKind::Pi(2)).unwrap();
        assert_eq!(m.initial().channels().len(), 2);
        assert_eq!(arities(m.initial()), vec![2]);
        assert_eq!(m.final_position().channels().len(), 3);
        assert_eq!(arities(m.final_position()), vec![3, 3]);
        assert_eq!(m.created_channels().len(), 1);
        let fin = m.final_position();
        for p in fin.players() {
            assert_eq!(p.attachment, fin.channels().to_vec());
        }
        assert_eq!(m.player_trace().len(), 2);
    }

    #[test]
    fn heart_zero_is_an_identity_shape() {
        let m = seed(MoveKind::Heart(0)).unwrap();
        assert!(m.initial().channels().is_empty());
        assert_eq!(arities(m.initial()), vec![0]);
        assert_eq!(arities(m.final_position()), vec![0]);
        assert!(m.created_channels().is_empty());
        assert!(m.channel_trace().is_empty());
    }

    #[test]
    fn tau_seed_shares_subject_and_transmits_object() {
        let m = seed(MoveKind::Tau { n: 1, a: 1, m: 2, c: 1, d: 2 }).unwrap();
        let init = m.initial();
        assert_eq!(init.channels().len(), 2);
        let (q, p) = (&init.players()[0], &init.players()[1]);
        assert_eq!(q.arity(), 2);
        assert_eq!(p.arity(), 1);
        assert_eq!(q.attachment[0], p.attachment[0]);
        let fin = m.final_position();
        assert_eq!(fin.channels().len(), 2);
        assert!(m.created_channels().is_empty());
        let (q2, p2) = (&fin.players()[0], &fin.players()[1]);
        assert_eq!(q2.arity(), 2);
        assert_eq!(p2.arity(), 2);
        assert_eq!(p2.attachment[1], q2.attachment[1]);
        assert_eq!(p2.attachment[0], q2.attachment[0]);
    }

    #[test]
    fn out_of_range_parameters_are_rejected() {
        assert!(seed(MoveKind::In { n: 1, a: 2 }).is_err());
        assert!(seed(MoveKind::In { n: 0, a: 0 }).is_err());
        assert!(seed(MoveKind::Out { m: 2, c: 0, d: 1 }).is_err());
        assert!(seed(MoveKind::Tau { n: 1, a: 1, m: 1, c: 1, d: 2 }).is_err());
    }

    #[test]
    fn interfaces_are_initial_channels() {
        assert!(interface(&seed(MoveKind::Heart(0)).unwrap()).channels.is_empty());
        assert_eq!(interface(&seed(MoveKind::Pi(2)).unwrap()).channels.len(), 2);
        let tau = seed(MoveKind::Tau { n: 1, a: 1, m: 2, c: 1, d: 2 }).unwrap();
        assert_eq!(interface(&tau).channels.len(), 2);
    }

    #[test]
    fn extend_heart_next_to_spectator() {
        let m = seed(MoveKind::Heart(1)).unwrap();
        let z = Position::representable(1);
        let w = z.channels()[0];
        let glue = BTreeMap::from([(m.initial().channels()[0], w)]);
        let e = extend(&m, &z, &glue).unwrap();
        assert_eq!(e.initial().players().len(), 2);
        assert_eq!(e.final_position().players().len(), 2);
        assert_eq!(e.final_position().channels().len(), 1);
        assert_eq!(e.roles().len(), 1);
        let spectator = z.players()[0].id;
        assert!(!e.is_moving(spectator));
        assert_eq!(e.spectators().count(), 1);
    }

    #[test]
    fn extend_along_identity_is_the_seed() {
        let m = seed(MoveKind::Tau { n: 2, a: 1, m: 2, c: 2, d: 1 }).unwrap();
        let z = Position::new(m.initial().channels().to_vec(), vec![]).unwrap();
        let glue = m.initial().channels().iter().map(|c| (*c, *c)).collect();
        let e = extend(&m, &z, &glue).unwrap();
        assert!(e.initial().same_as(m.initial()));
        assert!(e.final_position().is_isomorphic(m.final_position()));
    }

    #[test]
    fn extend_pi_zero_with_spectator() {
        let m = seed(MoveKind::Pi(0)).unwrap();
        let z = Position::representable(0);
        let e = extend(&m, &z, &BTreeMap::new()).unwrap();
        assert_eq!(e.initial().players().len(), 2);
        assert!(e.initial().channels().is_empty());
        assert_eq!(e.final_position().players().len(), 3);
        assert_eq!(e.final_position().channels().len(), 1);
        let spectator = e.final_position().player(z.players()[0].id).unwrap();
        assert_eq!(spectator.arity(), 0);
    }

    #[test]
    fn extend_requires_total_glue() {
        let m = seed(MoveKind::Heart(2)).unwrap();
        let z = Position::channels_only(2);
        let glue = BTreeMap::from([(m.initial().channels()[0], z.channels()[0])]);
        assert!(matches!(extend(&m, &z, &glue), Err(ArenaError::GlueNotTotal(_))));
        let glue = BTreeMap::from([
            (m.initial().channels()[0], z.channels()[0]),
            (m.initial().channels()[1], ChannelId::fresh()),
        ]);
        assert!(matches!(extend(&m, &z, &glue), Err(ArenaError::GlueTargetMissing(_))));
    }

    #[test]
    fn non_injective_glue_merges_channels() {
        let m = seed(MoveKind::Out { m: 2, c: 1, d: 2 }).unwrap();
        let z = Position::channels_only(1);
        let w = z.channels()[0];
        let glue = m.initial().channels().iter().map(|c| (*c, w)).collect();
        let e = extend(&m, &z, &glue).unwrap();
        let p = &e.initial().players()[0];
        assert_eq!(p.attachment, vec![w, w]);
    }

    fn heart_then_pi() -> (Play, Play, Position) {
        let x = Position::representable(0);
        let pid = x.players()[0].id;
        let heart = apply(&x, &[pid], MoveKind::Heart(0)).unwrap();
        let after = heart.final_position().clone();
        let ticked = after.players()[0].id;
        let pi = apply(&after, &[ticked], MoveKind::Pi(0)).unwrap();
        (Play::from_move(&pi), Play::from_move(&heart), x)
    }

    #[test]
    fn compose_pi_after_heart() {
        let (pi, heart, x) = heart_then_pi();
        let play = compose(&pi, &heart).unwrap();
        assert_eq!(play.len(), 2);
        assert!(play.initial().same_as(&x));
        assert_eq!(play.final_position().players().len(), 2);
        assert_eq!(play.player_trace().len(), 2);
    }

    #[test]
    fn identity_plays_are_units() {
        let (pi, heart, _) = heart_then_pi();
        let left = compose(&Play::identity(heart.final_position()), &heart).unwrap();
        assert_eq!(left, heart);
        let right = compose(&pi, &Play::identity(pi.initial())).unwrap();
        assert_eq!(right, pi);
    }

    #[test]
    fn composition_is_associative() {
        let (pi, heart, x) = heart_then_pi();
        let id = Play::identity(&x);
        let a = compose(&compose(&pi, &heart).unwrap(), &id).unwrap();
        let b = compose(&pi, &compose(&heart, &id).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_boundaries_do_not_compose() {
        let (pi, _, _) = heart_then_pi();
        let other = Play::identity(&Position::representable(3));
        assert_eq!(compose(&pi, &other), Err(ArenaError::BoundaryMismatch));
    }

    #[test]
    fn compose_up_to_renaming() {
        let (pi, heart, _) = heart_then_pi();
        let pos = pi.initial();
        let r = Renaming {
            channels: BTreeMap::new(),
            players: pos.players().iter().map(|p| (p.id, PlayerId::fresh())).collect(),
        };
        let renamed_pi = pi.rename(&r);
        assert!(!renamed_pi.initial().same_as(heart.final_position()));
        let play = compose(&renamed_pi, &heart).unwrap();
        assert_eq!(play.len(), 2);
        assert_eq!(play.player_trace().len(), 2);
    }

    #[test]
    fn isomorphism_respects_attachments() {
        let a = Position::representable(2);
        let b = Position::representable(2);
        assert!(a.is_isomorphic(&b));
        let c = Position::new(
            vec![ChannelId::fresh(), ChannelId::fresh()],
            vec![],
        )
        .unwrap();
        assert!(!a.is_isomorphic(&c));
        // Same arities, different sharing.
        let ch: Vec<_> = (0..2).map(|_| ChannelId::fresh()).collect();
        let shared = Position::new(
            ch.clone(),
            vec![
                Player { id: PlayerId::fresh(), attachment: vec![ch[0]] },
                Player { id: PlayerId::fresh(), attachment: vec![ch[0]] },
            ],
        )
        .unwrap();
        let apart = Position::new(
            ch.clone(),
            vec![
                Player { id: PlayerId::fresh(), attachment: vec![ch[0]] },
                Player { id: PlayerId::fresh(), attachment: vec![ch[1]] },
            ],
        )
        .unwrap();
        assert!(!shared.is_isomorphic(&apart));
    }

    #[test]
    fn pushout_merges_through_non_injective_map() {
        let x = Position::representable(2);
        let y = Position::representable(1);
        let w = y.channels()[0];
        let h = x.channels().iter().map(|c| (*c, w)).collect();
        let z = pushout(&x, &y, &h).unwrap();
        assert_eq!(z.channels().len(), 1);
        assert_eq!(z.players().len(), 2);
        assert_eq!(z.player(x.players()[0].id).unwrap().attachment, vec![w, w]);
        let empty = pushout(&Position::empty(), &x, &BTreeMap::new()).unwrap();
        assert!(empty.same_as(&x));
    }

    #[test]
    fn dot_outputs() {
        let empty = to_dot(Diagram::Position(&Position::empty()));
        assert_eq!(empty, "digraph position {\n}\n");
        let one = to_dot(Diagram::Position(&Position::representable(2)));
        assert_eq!(one.matches("shape=circle").count(), 2);
        assert_eq!(one.matches("shape=box").count(), 1);
        assert_eq!(one.matches("dir=none").count(), 2);
        assert!(one.contains("label=\"1\"];") && one.contains("p1 -> c2 [dir=none, label=\"2\"]"));
        let pi = to_dot(Diagram::Move(&seed(MoveKind::Pi(1)).unwrap()));
        assert_eq!(pi.matches("subgraph cluster_").count(), 2);
        assert_eq!(pi.matches("s0_p1 -> s1_p").count(), 2);
        // Deterministic regardless of identifiers.
        assert_eq!(pi, to_dot(Diagram::Move(&seed(MoveKind::Pi(1)).unwrap())));
    }

    #[test]
    fn move_kind_text_round_trip() {
        for k in [
            MoveKind::PiL(2),
            MoveKind::PiR(0),
            MoveKind::In { n: 2, a: 1 },
            MoveKind::Out { m: 3, c: 1, d: 3 },
            MoveKind::Heart(1),
            MoveKind::Pi(4),
            MoveKind::Tau { n: 1, a: 1, m: 2, c: 1, d: 2 },
        ] {
            assert_eq!(k.to_string().parse::<MoveKind>().unwrap(), k);
        }
        assert!("foo(1)".parse::<MoveKind>().is_err());
    }
}
