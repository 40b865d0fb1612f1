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

//! Global and local types, projection, branch merging and well-formedness.

use std::collections::BTreeMap;

use crate::ast::Participant;

pub mod global;
pub mod local;
pub mod project;
pub mod simplify;
pub mod wf;

pub use global::{GLabelBranch, GValueBranch, GlobalType};
pub use local::{
    subst_lvar, unfold_local, ChanRef, LBranchArm, LRecvBranch, LSelectBranch, LSendBranch, LocalType, LocatedType,
};
pub use project::{project, Projection, Undefined};
pub use simplify::{simplify_global, simplify_local};
pub use wf::{well_formed, WfIssue};

/// Display names for participants.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoleNames {
    by_id: BTreeMap<Participant, String>,
}

impl RoleNames {
    pub fn new() -> RoleNames {
        RoleNames::default()
    }

    pub fn insert(&mut self, role: Participant, name: impl Into<String>) {
        self.by_id.insert(role, name.into());
    }

    pub fn name(&self, role: Participant) -> Option<&str> {
        self.by_id.get(&role).map(String::as_str)
    }

    pub fn lookup(&self, name: &str) -> Option<Participant> {
        self.by_id.iter().find(|(_, n)| n.as_str() == name).map(|(r, _)| *r)
    }

    /// Name if known, number otherwise.
    pub fn show(&self, role: Participant) -> String {
        self.name(role).map(str::to_string).unwrap_or_else(|| role.to_string())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Participant, &str)> {
        self.by_id.iter().map(|(r, n)| (*r, n.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }
}
