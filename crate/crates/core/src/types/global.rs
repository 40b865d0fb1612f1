// Copyright 2026 The probsess Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::{Name, Participant, Sort};
use crate::kernel::ProbInterval;
use crate::types::local::LocalType;

/// One branch of a value interaction `q ->δ q' : c<S~>. G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GValueBranch {
    pub interval: ProbInterval,
    pub sorts: Vec<Sort>,
    pub cont: GlobalType,
}

/// One branch of a labelled interaction `q ->δ q' : c { l : G }`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GLabelBranch {
    pub interval: ProbInterval,
    pub label: String,
    pub cont: GlobalType,
}

/// Global types. All branches of a sum share sender, receiver and channel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GlobalType {
    Values {
        from: Participant,
        to: Participant,
        chan: Name,
        branches: Vec<GValueBranch>,
    },
    Deleg {
        from: Participant,
        to: Participant,
        chan: Name,
        carried: Box<LocalType>,
        role: Participant,
        cont: Box<GlobalType>,
    },
    Labels {
        from: Participant,
        to: Participant,
        chan: Name,
        branches: Vec<GLabelBranch>,
    },
    Par(Box<GlobalType>, Box<GlobalType>),
    Rec(String, Box<GlobalType>),
    Var(String),
    End,
}

impl GlobalType {
    pub fn children(&self) -> Vec<&GlobalType> {
        match self {
            GlobalType::Values { branches, .. } => branches.iter().map(|b| &b.cont).collect(),
            GlobalType::Labels { branches, .. } => branches.iter().map(|b| &b.cont).collect(),
            GlobalType::Deleg { cont, .. } => vec![cont],
            GlobalType::Par(l, r) => vec![l, r],
            GlobalType::Rec(_, b) => vec![b],
            GlobalType::Var(_) | GlobalType::End => vec![],
        }
    }

    /// Participants occurring in the type.
    pub fn pid(&self) -> BTreeSet<Participant> {
        let mut out = BTreeSet::new();
        self.collect_pid(&mut out);
        out
    }

    fn collect_pid(&self, out: &mut BTreeSet<Participant>) {
        match self {
            GlobalType::Values { from, to, .. } | GlobalType::Labels { from, to, .. } => {
                out.insert(*from);
                out.insert(*to);
            }
            GlobalType::Deleg { from, to, .. } => {
                out.insert(*from);
                out.insert(*to);
            }
            _ => {}
        }
        for c in self.children() {
            c.collect_pid(out);
        }
    }

    /// Session channels in lexicographic order; a channel's index in this
    /// list is its position in the session vector.
    pub fn channels(&self) -> Vec<Name> {
        let mut out = BTreeSet::new();
        self.collect_channels(&mut out);
        out.into_iter().collect()
    }

    fn collect_channels(&self, out: &mut BTreeSet<Name>) {
        match self {
            GlobalType::Values { chan, .. } | GlobalType::Labels { chan, .. } | GlobalType::Deleg { chan, .. } => {
                out.insert(chan.clone());
            }
            _ => {}
        }
        for c in self.children() {
            c.collect_channels(out);
        }
    }

    /// Number of distinct session channels.
    pub fn sid(&self) -> usize {
        self.channels().len()
    }

    pub fn free_tvars(&self) -> BTreeSet<String> {
        match self {
            GlobalType::Var(t) => [t.clone()].into(),
            GlobalType::Rec(t, b) => {
                let mut s = b.free_tvars();
                s.remove(t);
                s
            }
            _ => self.children().into_iter().flat_map(|c| c.free_tvars()).collect(),
        }
    }

    /// Equality up to renaming of bound type variables.
    pub fn alpha_eq(&self, other: &GlobalType) -> bool {
        alpha_eq_g(self, other, &mut Vec::new())
    }
}

fn alpha_eq_g<'a>(a: &'a GlobalType, b: &'a GlobalType, env: &mut Vec<(&'a str, &'a str)>) -> bool {
    use GlobalType::*;
    match (a, b) {
        (End, End) => true,
        (Var(x), Var(y)) => match env.iter().rev().find(|(l, r)| l == x || r == y) {
            Some((l, r)) => l == x && r == y,
            None => x == y,
        },
        (Rec(x, p), Rec(y, q)) => {
            env.push((x, y));
            let r = alpha_eq_g(p, q, env);
            env.pop();
            r
        }
        (Par(a1, a2), Par(b1, b2)) => alpha_eq_g(a1, b1, env) && alpha_eq_g(a2, b2, env),
        (Values { from: f1, to: t1, chan: c1, branches: x }, Values { from: f2, to: t2, chan: c2, branches: y }) => {
            f1 == f2
                && t1 == t2
                && c1 == c2
                && x.len() == y.len()
                && x.iter()
                    .zip(y)
                    .all(|(p, q)| p.interval == q.interval && p.sorts == q.sorts && alpha_eq_g(&p.cont, &q.cont, env))
        }
        (Labels { from: f1, to: t1, chan: c1, branches: x }, Labels { from: f2, to: t2, chan: c2, branches: y }) => {
            f1 == f2
                && t1 == t2
                && c1 == c2
                && x.len() == y.len()
                && x.iter()
                    .zip(y)
                    .all(|(p, q)| p.interval == q.interval && p.label == q.label && alpha_eq_g(&p.cont, &q.cont, env))
        }
        (
            Deleg { from: f1, to: t1, chan: c1, carried: k1, role: r1, cont: g1 },
            Deleg { from: f2, to: t2, chan: c2, carried: k2, role: r2, cont: g2 },
        ) => f1 == f2 && t1 == t2 && c1 == c2 && r1 == r2 && k1.alpha_eq(k2) && alpha_eq_g(g1, g2, env),
        _ => false,
    }
}

/// Substitutes `by` for free occurrences of the type variable `t`.
pub fn subst_gvar(g: &GlobalType, t: &str, by: &GlobalType) -> GlobalType {
    match g {
        GlobalType::Var(x) if x == t => by.clone(),
        GlobalType::Rec(x, _) if x == t => g.clone(),
        GlobalType::Rec(x, body) => GlobalType::Rec(x.clone(), Box::new(subst_gvar(body, t, by))),
        GlobalType::Values { from, to, chan, branches } => GlobalType::Values {
            from: *from,
            to: *to,
            chan: chan.clone(),
            branches: branches
                .iter()
                .map(|b| GValueBranch {
                    interval: b.interval.clone(),
                    sorts: b.sorts.clone(),
                    cont: subst_gvar(&b.cont, t, by),
                })
                .collect(),
        },
        GlobalType::Labels { from, to, chan, branches } => GlobalType::Labels {
            from: *from,
            to: *to,
            chan: chan.clone(),
            branches: branches
                .iter()
                .map(|b| GLabelBranch {
                    interval: b.interval.clone(),
                    label: b.label.clone(),
                    cont: subst_gvar(&b.cont, t, by),
                })
                .collect(),
        },
        GlobalType::Deleg { from, to, chan, carried, role, cont } => GlobalType::Deleg {
            from: *from,
            to: *to,
            chan: chan.clone(),
            carried: carried.clone(),
            role: *role,
            cont: Box::new(subst_gvar(cont, t, by)),
        },
        GlobalType::Par(l, r) => GlobalType::Par(Box::new(subst_gvar(l, t, by)), Box::new(subst_gvar(r, t, by))),
        GlobalType::Var(_) | GlobalType::End => g.clone(),
    }
}

impl fmt::Display for GlobalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::printer::print_global(self, None))
    }
}
