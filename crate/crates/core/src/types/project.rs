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

//! Projection of a global type onto a participant.

use std::collections::BTreeMap;
use std::fmt;

use super::global::GlobalType;
use super::local::{ChanRef, LBranchArm, LRecvBranch, LSelectBranch, LSendBranch, LocalType};
use crate::ast::{Name, Participant};

/// Why a projection does not exist, and where.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Undefined {
    pub participant: Participant,
    /// Path from the root to the failing sub-term.
    pub path: Vec<String>,
    pub reason: String,
}

impl fmt::Display for Undefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "projection onto {} is undefined", self.participant)?;
        if !self.path.is_empty() {
            write!(f, " at {}", self.path.join(" / "))?;
        }
        write!(f, ": {}", self.reason)
    }
}

impl std::error::Error for Undefined {}

pub type Projection = Result<LocalType, Undefined>;

/// `G ↾ q`. Channels are indexed by their position in `g.channels()`.
pub fn project(g: &GlobalType, q: Participant) -> Projection {
    let index: BTreeMap<Name, usize> = g.channels().into_iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut path = Vec::new();
    go(g, q, &index, &mut path)
}

fn chan_ref(index: &BTreeMap<Name, usize>, name: &str) -> ChanRef {
    ChanRef::new(index.get(name).copied().unwrap_or(usize::MAX), name)
}

fn undefined(q: Participant, path: &[String], reason: String) -> Undefined {
    Undefined { participant: q, path: path.to_vec(), reason }
}

fn go(g: &GlobalType, q: Participant, index: &BTreeMap<Name, usize>, path: &mut Vec<String>) -> Projection {
    match g {
        GlobalType::End => Ok(LocalType::End),
        GlobalType::Var(t) => Ok(LocalType::Var(t.clone())),
        GlobalType::Rec(t, body) => {
            path.push(format!("mu {}", t));
            let b = go(body, q, index, path)?;
            path.pop();
            Ok(match &b {
                LocalType::End => LocalType::End,
                LocalType::Var(x) if x == t => LocalType::End,
                _ => LocalType::Rec(t.clone(), Box::new(b)),
            })
        }
        GlobalType::Par(l, r) => {
            let in_l = l.pid().contains(&q);
            let in_r = r.pid().contains(&q);
            match (in_l, in_r) {
                (true, true) => Err(undefined(q, path, "participant occurs in both parallel components".into())),
                (true, false) => {
                    path.push("left of ,".into());
                    let t = go(l, q, index, path)?;
                    path.pop();
                    Ok(t)
                }
                (false, true) => {
                    path.push("right of ,".into());
                    let t = go(r, q, index, path)?;
                    path.pop();
                    Ok(t)
                }
                (false, false) => Ok(LocalType::End),
            }
        }
        GlobalType::Values { from, to, chan, branches } => {
            let here = format!("{} -> {} : {}", from, to, chan);
            let mut conts = Vec::with_capacity(branches.len());
            for (i, b) in branches.iter().enumerate() {
                path.push(format!("{} branch {}", here, i + 1));
                conts.push(go(&b.cont, q, index, path)?);
                path.pop();
            }
            if q == *from {
                Ok(LocalType::Send {
                    chan: chan_ref(index, chan),
                    branches: branches
                        .iter()
                        .zip(conts)
                        .map(|(b, cont)| LSendBranch { interval: b.interval.clone(), sorts: b.sorts.clone(), cont })
                        .collect(),
                })
            } else if q == *to {
                Ok(LocalType::Recv {
                    chan: chan_ref(index, chan),
                    branches: branches
                        .iter()
                        .zip(conts)
                        .map(|(b, cont)| LRecvBranch { sorts: b.sorts.clone(), cont })
                        .collect(),
                })
            } else {
                third_party(q, &here, conts, path)
            }
        }
        GlobalType::Labels { from, to, chan, branches } => {
            let here = format!("{} -> {} : {}", from, to, chan);
            let mut conts = Vec::with_capacity(branches.len());
            for b in branches {
                path.push(format!("{} {{{}}}", here, b.label));
                conts.push(go(&b.cont, q, index, path)?);
                path.pop();
            }
            if q == *from {
                Ok(LocalType::Select {
                    chan: chan_ref(index, chan),
                    branches: branches
                        .iter()
                        .zip(conts)
                        .map(|(b, cont)| LSelectBranch { interval: b.interval.clone(), label: b.label.clone(), cont })
                        .collect(),
                })
            } else if q == *to {
                Ok(LocalType::Branch {
                    chan: chan_ref(index, chan),
                    arms: branches
                        .iter()
                        .zip(conts)
                        .map(|(b, cont)| LBranchArm { label: b.label.clone(), cont })
                        .collect(),
                })
            } else {
                third_party(q, &here, conts, path)
            }
        }
        GlobalType::Deleg { from, to, chan, carried, role, cont } => {
            path.push(format!("{} -> {} : {} (delegation)", from, to, chan));
            let c = go(cont, q, index, path)?;
            path.pop();
            if q == *from {
                Ok(LocalType::Deleg {
                    chan: chan_ref(index, chan),
                    carried: carried.clone(),
                    role: *role,
                    cont: Box::new(c),
                })
            } else if q == *to {
                Ok(LocalType::SessRecv {
                    chan: chan_ref(index, chan),
                    carried: carried.clone(),
                    role: *role,
                    cont: Box::new(c),
                })
            } else {
                Ok(c)
            }
        }
    }
}

/// A participant not involved in an interaction must behave the same way
/// whichever branch is taken.
fn third_party(q: Participant, here: &str, conts: Vec<LocalType>, path: &[String]) -> Projection {
    let mut it = conts.into_iter().enumerate();
    let Some((_, first)) = it.next() else {
        return Ok(LocalType::End);
    };
    for (i, other) in it {
        if !first.alpha_eq(&other) {
            return Err(undefined(
                q,
                path,
                format!("at {}, branch 1 projects to `{}` but branch {} projects to `{}`", here, first, i + 1, other),
            ));
        }
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_global;

    #[test]
    fn end_projects_to_end() {
        assert_eq!(project(&GlobalType::End, Participant(4)), Ok(LocalType::End));
    }

    #[test]
    fn sender_receiver_and_bystander() {
        let g = parse_global(
            "1 ->[0.2,0.4] 2 : c<nat>. 2 ->1 3 : d<bool>. end + 1 ->(0.6,0.8] 2 : c<string>. 2 ->1 3 : d<bool>. end",
        )
        .unwrap();
        let t1 = project(&g, Participant(1)).unwrap();
        assert!(matches!(&t1, LocalType::Send { branches, .. } if branches.len() == 2));
        let t3 = project(&g, Participant(3)).unwrap();
        assert!(matches!(&t3, LocalType::Recv { chan, branches } if chan.idx == 1 && branches.len() == 1));
    }

    #[test]
    fn disagreeing_bystander_is_undefined() {
        let g =
            parse_global("1 ->0.5 2 : c { l : 2 ->1 3 : d<bool>. end } + 1 ->0.5 2 : c { r : 2 ->1 3 : d<nat>. end }")
                .unwrap();
        let err = project(&g, Participant(3)).unwrap_err();
        assert!(err.reason.contains("branch 2"), "{}", err);
        assert!(project(&g, Participant(1)).is_ok());
    }

    #[test]
    fn recursion_that_ignores_a_participant_projects_to_end() {
        let g = parse_global("mu t. 1 ->1 2 : c<nat>. t").unwrap();
        assert_eq!(project(&g, Participant(3)), Ok(LocalType::End));
        assert!(matches!(project(&g, Participant(1)), Ok(LocalType::Rec(..))));
    }

    #[test]
    fn parallel_components() {
        let g = parse_global("1 ->1 2 : c<nat>. end , 3 ->1 4 : d<nat>. end").unwrap();
        assert!(matches!(project(&g, Participant(4)), Ok(LocalType::Recv { .. })));
        assert_eq!(project(&g, Participant(5)), Ok(LocalType::End));
        let bad = parse_global("1 ->1 2 : c<nat>. end , 1 ->1 4 : d<nat>. end").unwrap();
        assert!(project(&bad, Participant(1)).is_err());
    }
}
