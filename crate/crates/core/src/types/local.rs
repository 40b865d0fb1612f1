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

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::ast::{Name, Participant, Sort};
use crate::kernel::ProbInterval;

/// A channel of a session vector: its index, plus the source name kept for
/// printing. Identity is the index alone.
#[derive(Debug, Clone)]
pub struct ChanRef {
    pub idx: usize,
    pub name: Name,
}

impl ChanRef {
    pub fn new(idx: usize, name: impl Into<Name>) -> ChanRef {
        ChanRef { idx, name: name.into() }
    }
}

impl PartialEq for ChanRef {
    fn eq(&self, other: &Self) -> bool {
        self.idx == other.idx
    }
}

impl Eq for ChanRef {}

impl Hash for ChanRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.idx.hash(state)
    }
}

impl PartialOrd for ChanRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ChanRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.idx.cmp(&other.idx)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LSendBranch {
    pub interval: ProbInterval,
    pub sorts: Vec<Sort>,
    pub cont: LocalType,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LRecvBranch {
    pub sorts: Vec<Sort>,
    pub cont: LocalType,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LSelectBranch {
    pub interval: ProbInterval,
    pub label: String,
    pub cont: LocalType,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LBranchArm {
    pub label: String,
    pub cont: LocalType,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LocalType {
    Send {
        chan: ChanRef,
        branches: Vec<LSendBranch>,
    },
    Recv {
        chan: ChanRef,
        branches: Vec<LRecvBranch>,
    },
    Deleg {
        chan: ChanRef,
        carried: Box<LocalType>,
        role: Participant,
        cont: Box<LocalType>,
    },
    SessRecv {
        chan: ChanRef,
        carried: Box<LocalType>,
        role: Participant,
        cont: Box<LocalType>,
    },
    Select {
        chan: ChanRef,
        branches: Vec<LSelectBranch>,
    },
    Branch {
        chan: ChanRef,
        arms: Vec<LBranchArm>,
    },
    Rec(String, Box<LocalType>),
    Var(String),
    End,
    /// Unknown type; matches any type. Stands for types carried by
    /// delegation that processes do not annotate.
    Hole,
}

/// A local type tagged with the role it governs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocatedType {
    pub ty: LocalType,
    pub role: Participant,
}

impl LocalType {
    pub fn children(&self) -> Vec<&LocalType> {
        match self {
            LocalType::Send { branches, .. } => branches.iter().map(|b| &b.cont).collect(),
            LocalType::Recv { branches, .. } => branches.iter().map(|b| &b.cont).collect(),
            LocalType::Select { branches, .. } => branches.iter().map(|b| &b.cont).collect(),
            LocalType::Branch { arms, .. } => arms.iter().map(|b| &b.cont).collect(),
            LocalType::Deleg { cont, .. } | LocalType::SessRecv { cont, .. } => vec![cont],
            LocalType::Rec(_, b) => vec![b],
            LocalType::Var(_) | LocalType::End | LocalType::Hole => vec![],
        }
    }

    pub fn subject(&self) -> Option<&ChanRef> {
        match self {
            LocalType::Send { chan, .. }
            | LocalType::Recv { chan, .. }
            | LocalType::Deleg { chan, .. }
            | LocalType::SessRecv { chan, .. }
            | LocalType::Select { chan, .. }
            | LocalType::Branch { chan, .. } => Some(chan),
            _ => None,
        }
    }

    /// `end` possibly under recursion binders.
    pub fn is_end(&self) -> bool {
        match self {
            LocalType::End => true,
            LocalType::Rec(_, b) => b.is_end(),
            _ => false,
        }
    }

    pub fn free_tvars(&self) -> BTreeSet<String> {
        match self {
            LocalType::Var(t) => [t.clone()].into(),
            LocalType::Rec(t, b) => {
                let mut s = b.free_tvars();
                s.remove(t);
                s
            }
            _ => self.children().into_iter().flat_map(|c| c.free_tvars()).collect(),
        }
    }

    /// Channel names used as subjects, with their indices.
    pub fn channels(&self) -> BTreeSet<(usize, Name)> {
        let mut out = BTreeSet::new();
        self.collect_channels(&mut out);
        out
    }

    fn collect_channels(&self, out: &mut BTreeSet<(usize, Name)>) {
        if let Some(c) = self.subject() {
            out.insert((c.idx, c.name.clone()));
        }
        for c in self.children() {
            c.collect_channels(out);
        }
    }

    /// Equality up to renaming of bound type variables. Channel identity is
    /// by index.
    pub fn alpha_eq(&self, other: &LocalType) -> bool {
        alpha_eq_l(self, other, &mut Vec::new())
    }

    /// Rebuilds with every immediate child transformed by `f`.
    pub fn map_children(&self, f: &mut dyn FnMut(&LocalType) -> LocalType) -> LocalType {
        match self {
            LocalType::Send { chan, branches } => LocalType::Send {
                chan: chan.clone(),
                branches: branches
                    .iter()
                    .map(|b| LSendBranch { interval: b.interval.clone(), sorts: b.sorts.clone(), cont: f(&b.cont) })
                    .collect(),
            },
            LocalType::Recv { chan, branches } => LocalType::Recv {
                chan: chan.clone(),
                branches: branches.iter().map(|b| LRecvBranch { sorts: b.sorts.clone(), cont: f(&b.cont) }).collect(),
            },
            LocalType::Select { chan, branches } => LocalType::Select {
                chan: chan.clone(),
                branches: branches
                    .iter()
                    .map(|b| LSelectBranch { interval: b.interval.clone(), label: b.label.clone(), cont: f(&b.cont) })
                    .collect(),
            },
            LocalType::Branch { chan, arms } => LocalType::Branch {
                chan: chan.clone(),
                arms: arms.iter().map(|b| LBranchArm { label: b.label.clone(), cont: f(&b.cont) }).collect(),
            },
            LocalType::Deleg { chan, carried, role, cont } => {
                LocalType::Deleg { chan: chan.clone(), carried: carried.clone(), role: *role, cont: Box::new(f(cont)) }
            }
            LocalType::SessRecv { chan, carried, role, cont } => LocalType::SessRecv {
                chan: chan.clone(),
                carried: carried.clone(),
                role: *role,
                cont: Box::new(f(cont)),
            },
            LocalType::Rec(t, b) => LocalType::Rec(t.clone(), Box::new(f(b))),
            LocalType::Var(_) | LocalType::End | LocalType::Hole => self.clone(),
        }
    }
}

fn alpha_eq_l<'a>(a: &'a LocalType, b: &'a LocalType, env: &mut Vec<(&'a str, &'a str)>) -> bool {
    use LocalType::*;
    match (a, b) {
        (End, End) | (Hole, Hole) => true,
        (Var(x), Var(y)) => match env.iter().rev().find(|(l, r)| l == x || r == y) {
            Some((l, r)) => l == x && r == y,
            None => x == y,
        },
        (Rec(x, p), Rec(y, q)) => {
            env.push((x, y));
            let r = alpha_eq_l(p, q, env);
            env.pop();
            r
        }
        (Send { chan: c1, branches: x }, Send { chan: c2, branches: y }) => {
            c1 == c2
                && x.len() == y.len()
                && x.iter()
                    .zip(y)
                    .all(|(p, q)| p.interval == q.interval && p.sorts == q.sorts && alpha_eq_l(&p.cont, &q.cont, env))
        }
        (Recv { chan: c1, branches: x }, Recv { chan: c2, branches: y }) => {
            c1 == c2
                && x.len() == y.len()
                && x.iter().zip(y).all(|(p, q)| p.sorts == q.sorts && alpha_eq_l(&p.cont, &q.cont, env))
        }
        (Select { chan: c1, branches: x }, Select { chan: c2, branches: y }) => {
            c1 == c2
                && x.len() == y.len()
                && x.iter()
                    .zip(y)
                    .all(|(p, q)| p.interval == q.interval && p.label == q.label && alpha_eq_l(&p.cont, &q.cont, env))
        }
        (Branch { chan: c1, arms: x }, Branch { chan: c2, arms: y }) => {
            c1 == c2
                && x.len() == y.len()
                && x.iter().zip(y).all(|(p, q)| p.label == q.label && alpha_eq_l(&p.cont, &q.cont, env))
        }
        (Deleg { chan: c1, carried: k1, role: r1, cont: t1 }, Deleg { chan: c2, carried: k2, role: r2, cont: t2 })
        | (
            SessRecv { chan: c1, carried: k1, role: r1, cont: t1 },
            SessRecv { chan: c2, carried: k2, role: r2, cont: t2 },
        ) => c1 == c2 && r1 == r2 && k1.alpha_eq(k2) && alpha_eq_l(t1, t2, env),
        _ => false,
    }
}

/// Substitutes `by` for free occurrences of the type variable `t`.
pub fn subst_lvar(ty: &LocalType, t: &str, by: &LocalType) -> LocalType {
    match ty {
        LocalType::Var(x) if x == t => by.clone(),
        LocalType::Rec(x, _) if x == t => ty.clone(),
        _ => ty.map_children(&mut |c| subst_lvar(c, t, by)),
    }
}

/// One unfolding of a top-level `mu`; other types are returned unchanged.
pub fn unfold_local(ty: &LocalType) -> LocalType {
    let mut cur = ty.clone();
    // Guardedness bounds the number of consecutive binders.
    for _ in 0..64 {
        match &cur {
            LocalType::Rec(t, body) => cur = subst_lvar(body, t, &cur),
            _ => break,
        }
    }
    cur
}

impl fmt::Display for LocalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::printer::print_local(self, None))
    }
}

impl fmt::Display for LocatedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.ty, self.role)
    }
}
