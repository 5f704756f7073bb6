//! Actor processes: guarded sums of send/receive/tick prefixes and
//! context-extending parallel composition.
//!
//! Channels are 1-based indices into the ambient context `Γ`, which is just a
//! number of known channels. A receive extends the context of its continuation
//! by one (the received name), and both sides of a parallel composition live in
//! `Γ + 1`, the extra channel being the mailbox shared by the two avatars.

mod enumerate;
mod parse;

use std::fmt;

use thiserror::Error;

pub use enumerate::{enumerate, Enumerator};
pub use parse::{parse, parse_checked, ParseError, Program};

/// A channel index, 1-based, into the ambient context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chan(pub u32);

impl Chan {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Chan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prefix {
    /// `snd(subject, object)`: send `object` on `subject`.
    Out { subject: Chan, object: Chan },
    /// `rcv(subject)`: receive one channel on `subject`.
    In { subject: Chan },
    /// `tick`: signal success.
    Tick,
}

impl Prefix {
    pub fn out(subject: u32, object: u32) -> Self {
        Prefix::Out {
            subject: Chan(subject),
            object: Chan(object),
        }
    }

    pub fn input(subject: u32) -> Self {
        Prefix::In {
            subject: Chan(subject),
        }
    }

    /// Context size of the continuation when this prefix fires in `gamma`.
    pub fn extend(self, gamma: u32) -> u32 {
        match self {
            Prefix::In { .. } => gamma + 1,
            Prefix::Out { .. } | Prefix::Tick => gamma,
        }
    }

    fn channels(self) -> impl Iterator<Item = (Chan, ChanRole)> {
        let (first, second) = match self {
            Prefix::Out { subject, object } => (
                Some((subject, ChanRole::Subject)),
                Some((object, ChanRole::Object)),
            ),
            Prefix::In { subject } => (Some((subject, ChanRole::Subject)), None),
            Prefix::Tick => (None, None),
        };
        first.into_iter().chain(second)
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prefix::Out { subject, object } => write!(f, "snd({subject},{object})"),
            Prefix::In { subject } => write!(f, "rcv({subject})"),
            Prefix::Tick => f.write_str("tick"),
        }
    }
}

/// A finite actor process.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    /// Guarded choice; the empty sum is the inert process `0`.
    Sum(Vec<(Prefix, Process)>),
    /// Fork: both children are typed one channel larger than the parent.
    Par(Box<Process>, Box<Process>),
}

impl Process {
    pub fn nil() -> Self {
        Process::Sum(Vec::new())
    }

    pub fn prefixed(prefix: Prefix, cont: Process) -> Self {
        Process::Sum(vec![(prefix, cont)])
    }

    pub fn sum(branches: Vec<(Prefix, Process)>) -> Self {
        Process::Sum(branches)
    }

    pub fn par(left: Process, right: Process) -> Self {
        Process::Par(Box::new(left), Box::new(right))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Process::Sum(b) if b.is_empty())
    }

    /// Height of the syntax tree; `0` has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Process::Sum(branches) => branches
                .iter()
                .map(|(_, p)| 1 + p.depth())
                .max()
                .unwrap_or(0),
            Process::Par(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Number of prefix and parallel nodes.
    pub fn size(&self) -> usize {
        match self {
            Process::Sum(branches) => branches.iter().map(|(_, p)| 1 + p.size()).sum(),
            Process::Par(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Reorders every sum so that branches are grouped by the basic seed
    /// their prefix denotes (input, then output, then tick), keeping the
    /// relative order of branches inside a group.
    pub fn canonical(&self) -> Process {
        match self {
            Process::Sum(branches) => {
                let mut out: Vec<(Prefix, Process)> = branches
                    .iter()
                    .map(|(a, p)| (*a, p.canonical()))
                    .collect();
                out.sort_by_key(|(a, _)| prefix_rank(*a));
                Process::Sum(out)
            }
            Process::Par(l, r) => Process::par(l.canonical(), r.canonical()),
        }
    }

    /// Renames free channels: index `i` becomes `map[i - 1]`, indices beyond
    /// `map` are shifted so that the first one lands on `target_gamma + 1`.
    pub fn rename(&self, map: &[u32], target_gamma: u32) -> Process {
        let source_gamma = map.len() as u32;
        let sub = |c: Chan| -> Chan {
            if c.0 <= source_gamma {
                Chan(map[c.0 as usize - 1])
            } else {
                Chan(c.0 - source_gamma + target_gamma)
            }
        };
        match self {
            Process::Sum(branches) => Process::Sum(
                branches
                    .iter()
                    .map(|(a, p)| {
                        let a = match *a {
                            Prefix::Out { subject, object } => Prefix::Out {
                                subject: sub(subject),
                                object: sub(object),
                            },
                            Prefix::In { subject } => Prefix::In {
                                subject: sub(subject),
                            },
                            Prefix::Tick => Prefix::Tick,
                        };
                        (a, p.rename(map, target_gamma))
                    })
                    .collect(),
            ),
            Process::Par(l, r) => {
                Process::par(l.rename(map, target_gamma), r.rename(map, target_gamma))
            }
        }
    }

    pub fn pretty(&self) -> String {
        let mut out = String::new();
        write_proc(self, &mut out);
        out
    }
}

/// Position of a prefix in the basic-seed order used by strategies.
pub(crate) fn prefix_rank(prefix: Prefix) -> (u8, u32, u32) {
    match prefix {
        Prefix::In { subject } => (0, subject.0, 0),
        Prefix::Out { subject, object } => (1, subject.0, object.0),
        Prefix::Tick => (2, 0, 0),
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

fn write_proc(p: &Process, out: &mut String) {
    match p {
        Process::Sum(branches) if branches.is_empty() => out.push('0'),
        Process::Sum(branches) => {
            for (i, (a, cont)) in branches.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                out.push_str(&a.to_string());
                out.push('.');
                write_cont(cont, out);
            }
        }
        Process::Par(l, r) => {
            out.push('(');
            write_proc(l, out);
            out.push_str(" | ");
            write_proc(r, out);
            out.push(')');
        }
    }
}

fn write_cont(p: &Process, out: &mut String) {
    match p {
        Process::Sum(branches) if branches.len() > 1 => {
            out.push('(');
            write_proc(p, out);
            out.push(')');
        }
        _ => write_proc(p, out),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChanRole {
    Subject,
    Object,
}

impl fmt::Display for ChanRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChanRole::Subject => f.write_str("subject"),
            ChanRole::Object => f.write_str("object"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{role} channel {channel} out of range in context of size {gamma} at `{subterm}`")]
pub struct TypeError {
    pub channel: u32,
    pub role: ChanRole,
    pub gamma: u32,
    /// Pretty-printed offending branch.
    pub subterm: String,
}

/// Checks `gamma ⊢ p`.
pub fn typecheck(p: &Process, gamma: u32) -> Result<(), TypeError> {
    match p {
        Process::Sum(branches) => {
            for (a, cont) in branches {
                for (c, role) in a.channels() {
                    if c.0 == 0 || c.0 > gamma {
                        return Err(TypeError {
                            channel: c.0,
                            role,
                            gamma,
                            subterm: Process::prefixed(*a, cont.clone()).pretty(),
                        });
                    }
                }
                typecheck(cont, a.extend(gamma))?;
            }
            Ok(())
        }
        Process::Par(l, r) => {
            typecheck(l, gamma + 1)?;
            typecheck(r, gamma + 1)
        }
    }
}
