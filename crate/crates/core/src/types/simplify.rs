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

//! Merging of branches that share a sort (or label) and a continuation.

use super::global::{GLabelBranch, GValueBranch, GlobalType};
use super::local::{LBranchArm, LRecvBranch, LSelectBranch, LSendBranch, LocalType};
use crate::kernel::interval_add;

/// Bottom-up merge: within each sum, branches with the same sort tuple (or
/// label) and alpha-equal continuations become one branch whose interval
/// is the sum of theirs. Idempotent.
pub fn simplify_global(g: &GlobalType) -> GlobalType {
    match g {
        GlobalType::Values { from, to, chan, branches } => {
            let mut out: Vec<GValueBranch> = Vec::new();
            for b in branches {
                let cont = simplify_global(&b.cont);
                match out.iter_mut().find(|o| o.sorts == b.sorts && o.cont.alpha_eq(&cont)) {
                    Some(o) => o.interval = interval_add(&o.interval, &b.interval),
                    None => out.push(GValueBranch { interval: b.interval.clone(), sorts: b.sorts.clone(), cont }),
                }
            }
            GlobalType::Values { from: *from, to: *to, chan: chan.clone(), branches: out }
        }
        GlobalType::Labels { from, to, chan, branches } => {
            let mut out: Vec<GLabelBranch> = Vec::new();
            for b in branches {
                let cont = simplify_global(&b.cont);
                match out.iter_mut().find(|o| o.label == b.label && o.cont.alpha_eq(&cont)) {
                    Some(o) => o.interval = interval_add(&o.interval, &b.interval),
                    None => out.push(GLabelBranch { interval: b.interval.clone(), label: b.label.clone(), cont }),
                }
            }
            GlobalType::Labels { from: *from, to: *to, chan: chan.clone(), branches: out }
        }
        GlobalType::Deleg { from, to, chan, carried, role, cont } => GlobalType::Deleg {
            from: *from,
            to: *to,
            chan: chan.clone(),
            carried: Box::new(simplify_local(carried)),
            role: *role,
            cont: Box::new(simplify_global(cont)),
        },
        GlobalType::Par(l, r) => GlobalType::Par(Box::new(simplify_global(l)), Box::new(simplify_global(r))),
        GlobalType::Rec(t, b) => GlobalType::Rec(t.clone(), Box::new(simplify_global(b))),
        GlobalType::Var(_) | GlobalType::End => g.clone(),
    }
}

/// The same merge on local types. Receive and branching sums drop exact
/// duplicates.
pub fn simplify_local(t: &LocalType) -> LocalType {
    match t {
        LocalType::Send { chan, branches } => {
            let mut out: Vec<LSendBranch> = Vec::new();
            for b in branches {
                let cont = simplify_local(&b.cont);
                match out.iter_mut().find(|o| o.sorts == b.sorts && o.cont.alpha_eq(&cont)) {
                    Some(o) => o.interval = interval_add(&o.interval, &b.interval),
                    None => out.push(LSendBranch { interval: b.interval.clone(), sorts: b.sorts.clone(), cont }),
                }
            }
            LocalType::Send { chan: chan.clone(), branches: out }
        }
        LocalType::Select { chan, branches } => {
            let mut out: Vec<LSelectBranch> = Vec::new();
            for b in branches {
                let cont = simplify_local(&b.cont);
                match out.iter_mut().find(|o| o.label == b.label && o.cont.alpha_eq(&cont)) {
                    Some(o) => o.interval = interval_add(&o.interval, &b.interval),
                    None => out.push(LSelectBranch { interval: b.interval.clone(), label: b.label.clone(), cont }),
                }
            }
            LocalType::Select { chan: chan.clone(), branches: out }
        }
        LocalType::Recv { chan, branches } => {
            let mut out: Vec<LRecvBranch> = Vec::new();
            for b in branches {
                let cont = simplify_local(&b.cont);
                if !out.iter().any(|o| o.sorts == b.sorts && o.cont.alpha_eq(&cont)) {
                    out.push(LRecvBranch { sorts: b.sorts.clone(), cont });
                }
            }
            LocalType::Recv { chan: chan.clone(), branches: out }
        }
        LocalType::Branch { chan, arms } => {
            let mut out: Vec<LBranchArm> = Vec::new();
            for b in arms {
                let cont = simplify_local(&b.cont);
                if !out.iter().any(|o| o.label == b.label && o.cont.alpha_eq(&cont)) {
                    out.push(LBranchArm { label: b.label.clone(), cont });
                }
            }
            LocalType::Branch { chan: chan.clone(), arms: out }
        }
        LocalType::Deleg { chan, carried, role, cont } => LocalType::Deleg {
            chan: chan.clone(),
            carried: Box::new(simplify_local(carried)),
            role: *role,
            cont: Box::new(simplify_local(cont)),
        },
        LocalType::SessRecv { chan, carried, role, cont } => LocalType::SessRecv {
            chan: chan.clone(),
            carried: Box::new(simplify_local(carried)),
            role: *role,
            cont: Box::new(simplify_local(cont)),
        },
        LocalType::Rec(x, b) => LocalType::Rec(x.clone(), Box::new(simplify_local(b))),
        LocalType::Var(_) | LocalType::End | LocalType::Hole => t.clone(),
    }
}
