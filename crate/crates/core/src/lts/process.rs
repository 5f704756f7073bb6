//! The process side: a configuration is a soup of parallel components over
//! a shared set of channels `1..=gamma`.

use super::{explore, Interface, Label, LtsGraph, LtsOptions, World};
use crate::term::{typecheck, Prefix, Process, TypeError};

struct Sync {
    out: usize,
    inp: usize,
    subject: u32,
    object: u32,
    in_subject: u32,
    out_cont: Process,
    in_cont: Process,
}

/// A component is a process over its own context whose `i`-th channel is the
/// shared channel `att[i - 1]`. Components are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    gamma: u32,
    comps: Vec<(Vec<u32>, Process)>,
}

impl Config {
    pub fn new(gamma: u32, mut comps: Vec<(Vec<u32>, Process)>) -> Result<Self, TypeError> {
        for (att, p) in &comps {
            assert!(
                att.iter().all(|c| (1..=gamma).contains(c)),
                "component attached outside the context"
            );
            typecheck(p, att.len() as u32)?;
        }
        comps.sort();
        Ok(Config { gamma, comps })
    }

    /// One component seeing every channel of the context.
    pub fn single(p: &Process, gamma: u32) -> Result<Self, TypeError> {
        Config::new(gamma, vec![((1..=gamma).collect(), p.clone())])
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn components(&self) -> &[(Vec<u32>, Process)] {
        &self.comps
    }

    fn replace(&self, gamma: u32, drop: &[usize], add: Vec<(Vec<u32>, Process)>) -> Config {
        let mut comps: Vec<_> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(k, _)| !drop.contains(k))
            .map(|(_, c)| c.clone())
            .collect();
        comps.extend(add);
        comps.sort();
        Config { gamma, comps }
    }

    /// Tick, internal synchronization and internal fork steps.
    pub fn closed_steps(&self) -> Vec<(Label, Config)> {
        let mut out = Vec::new();
        let fresh = self.gamma + 1;
        for (i, (att, p)) in self.comps.iter().enumerate() {
            match p {
                Process::Sum(branches) => {
                    for (prefix, cont) in branches {
                        if *prefix == Prefix::Tick {
                            out.push((Label::Heart, self.replace(self.gamma, &[i], vec![(att.clone(), cont.clone())])));
                        }
                    }
                }
                Process::Par(l, r) => {
                    let mut att2 = att.clone();
                    att2.push(fresh);
                    let next = self.replace(fresh, &[i], vec![(att2.clone(), (**l).clone()), (att2, (**r).clone())]);
                    out.push((Label::Pi, next));
                }
            }
        }
        for s in self.synchronizations(None) {
            let (att_i, att_j) = (&self.comps[s.out].0, &self.comps[s.inp].0);
            let mut att_j2 = att_j.clone();
            att_j2.push(s.object);
            let next = self.replace(
                self.gamma,
                &[s.out, s.inp],
                vec![(att_i.clone(), s.out_cont), (att_j2, s.in_cont)],
            );
            out.push((Label::Delta, next));
        }
        out
    }

    /// Output by component `i` and input by a distinct component `j`.
    /// With `link = Some(h)` the subjects must differ and the output subject
    /// must be known to the environment; otherwise they must coincide.
    fn synchronizations(&self, link: Option<&[u32]>) -> Vec<Sync> {
        let mut out = Vec::new();
        for (i, (att_i, p)) in self.comps.iter().enumerate() {
            let Process::Sum(bi) = p else { continue };
            for (prefix, cont_i) in bi {
                let Prefix::Out { subject, object } = prefix else { continue };
                let x = att_i[subject.0 as usize - 1];
                let obj = att_i[object.0 as usize - 1];
                if let Some(h) = link {
                    if !h.contains(&x) {
                        continue;
                    }
                }
                for (j, (att_j, q)) in self.comps.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let Process::Sum(bj) = q else { continue };
                    for (prefix_j, cont_j) in bj {
                        let Prefix::In { subject: sj } = prefix_j else { continue };
                        let y = att_j[sj.0 as usize - 1];
                        let fits = match link {
                            None => x == y,
                            Some(_) => x != y,
                        };
                        if fits {
                            out.push(Sync {
                                out: i,
                                inp: j,
                                subject: x,
                                object: obj,
                                in_subject: y,
                                out_cont: cont_i.clone(),
                                in_cont: cont_j.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Environment-facing steps from `h`.
    fn interface_steps(&self, h: &[u32], enable_link: bool) -> Vec<(Label, Vec<u32>, Config)> {
        let mut out = Vec::new();
        let fresh = self.gamma + 1;
        let with = |extra: u32| {
            let mut h2 = h.to_vec();
            h2.push(extra);
            h2
        };
        for (i, (att, p)) in self.comps.iter().enumerate() {
            match p {
                Process::Sum(branches) => {
                    for (prefix, cont) in branches {
                        match *prefix {
                            Prefix::In { subject } => {
                                let x = att[subject.0 as usize - 1];
                                if h.contains(&x) {
                                    let mut att2 = att.clone();
                                    att2.push(fresh);
                                    let next = self.replace(fresh, &[i], vec![(att2, cont.clone())]);
                                    out.push((Label::In(x), with(fresh), next));
                                }
                            }
                            Prefix::Out { subject, object } => {
                                let x = att[subject.0 as usize - 1];
                                let b = att[object.0 as usize - 1];
                                if h.contains(&x) {
                                    let next = self.replace(self.gamma, &[i], vec![(att.clone(), cont.clone())]);
                                    out.push((Label::Out(x, b), with(b), next));
                                }
                            }
                            Prefix::Tick => {}
                        }
                    }
                }
                Process::Par(l, r) => {
                    let mut att2 = att.clone();
                    att2.push(fresh);
                    let left = self.replace(fresh, &[i], vec![(att2.clone(), (**l).clone())]);
                    out.push((Label::PiL, with(fresh), left));
                    let right = self.replace(fresh, &[i], vec![(att2, (**r).clone())]);
                    out.push((Label::PiR, with(fresh), right));
                }
            }
        }
        if enable_link {
            for s in self.synchronizations(Some(h)) {
                let (att_i, att_j) = (&self.comps[s.out].0, &self.comps[s.inp].0);
                let mut att_j2 = att_j.clone();
                att_j2.push(fresh);
                let next = self.replace(
                    fresh,
                    &[s.out, s.inp],
                    vec![(att_i.clone(), s.out_cont), (att_j2, s.in_cont)],
                );
                out.push((Label::Link(s.subject, s.object, s.in_subject), h.to_vec(), next));
            }
        }
        out
    }
}

/// The graph of `gamma ⊢ p` with the identity interface.
pub fn process_lts(p: &Process, gamma: u32, opts: LtsOptions) -> Result<LtsGraph, TypeError> {
    let root = Interface {
        h: (1..=gamma).collect(),
        subject: Config::single(p, gamma)?,
    };
    Ok(process_lts_from(root, opts))
}

pub fn process_lts_from(root: Interface<Config>, opts: LtsOptions) -> LtsGraph {
    match opts.world {
        World::Closed => {
            explore(root.subject, |c| c.closed_steps()).0
        }
        World::Interface => {
            explore(root, |s| {
                let mut out: Vec<_> = s
                    .subject
                    .closed_steps()
                    .into_iter()
                    .map(|(l, c)| {
                        (
                            l,
                            Interface {
                                h: s.h.clone(),
                                subject: c,
                            },
                        )
                    })
                    .collect();
                for (l, h, c) in s.subject.interface_steps(&s.h, opts.enable_link) {
                    out.push((l, Interface { h, subject: c }));
                }
                out
            })
            .0
        }
    }
}
