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

//! Typing environments and type errors.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::ast::{base_name, Name, Participant, Sort};
use crate::syntax::print_local;
use crate::types::{GlobalType, LocalType};

/// A session channel vector, identified by its channel names.
pub type Vector = Vec<Name>;

/// Γ: sorts of value variables, global types of shared names, session
/// vectors in scope and the typings of process variables.
#[derive(Debug, Clone, Default)]
pub struct SortEnv {
    pub vars: BTreeMap<Name, Sort>,
    /// Shared between the copies made under binders.
    pub shared: Arc<BTreeMap<Name, GlobalType>>,
    /// Channel name to its vector, index, and the role of the process
    /// holding it when occurrences carry none.
    pub chans: BTreeMap<Name, (Vector, usize, Option<Participant>)>,
    pub recs: BTreeMap<Name, Vec<(Vector, Participant)>>,
}

impl SortEnv {
    pub fn new() -> SortEnv {
        SortEnv::default()
    }

    pub fn with_shared(shared: impl IntoIterator<Item = (Name, GlobalType)>) -> SortEnv {
        SortEnv { shared: Arc::new(shared.into_iter().collect()), ..SortEnv::default() }
    }

    /// Global type of a shared name; runtime renamings `a#n` fall back to `a`.
    pub fn global(&self, a: &str) -> Option<&GlobalType> {
        self.shared.get(a).or_else(|| self.shared.get(base_name(a)))
    }

    /// Brings a session vector into scope.
    pub fn bind_vector(&mut self, v: &[Name], role: Option<Participant>) {
        for (i, n) in v.iter().enumerate() {
            self.chans.insert(n.clone(), (v.to_vec(), i, role));
        }
    }
}

/// Δ: located local types indexed by session vector and role. Missing
/// entries stand for `end`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionEnv(pub BTreeMap<(Vector, Participant), LocalType>);

impl SessionEnv {
    pub fn new() -> SessionEnv {
        SessionEnv::default()
    }

    pub fn get(&self, v: &[Name], q: Participant) -> Option<&LocalType> {
        self.0.get(&(v.to_vec(), q))
    }

    pub fn insert(&mut self, v: Vector, q: Participant, t: LocalType) {
        self.0.insert((v, q), t);
    }

    /// Removes an entry; a missing entry is `end`.
    pub fn take(&mut self, v: &[Name], q: Participant) -> LocalType {
        self.0.remove(&(v.to_vec(), q)).unwrap_or(LocalType::End)
    }

    /// Removes every role of a vector.
    pub fn take_vector(&mut self, v: &[Name]) -> BTreeMap<Participant, LocalType> {
        let keys: Vec<_> = self.0.keys().filter(|(w, _)| w == v).cloned().collect();
        keys.into_iter().map(|k| (k.1, self.0.remove(&k).expect("key present"))).collect()
    }

    pub fn vectors(&self) -> Vec<Vector> {
        let mut vs: Vec<Vector> = self.0.keys().map(|(v, _)| v.clone()).collect();
        vs.dedup();
        vs
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_end_only(&self) -> bool {
        self.0.values().all(LocalType::is_end)
    }

    /// The same environment without `end` entries.
    pub fn without_ends(&self) -> SessionEnv {
        SessionEnv(self.0.iter().filter(|(_, t)| !t.is_end()).map(|(k, t)| (k.clone(), t.clone())).collect())
    }

    /// Disjoint union; the first shared entry is returned on overlap.
    pub fn join(mut self, other: SessionEnv) -> Result<SessionEnv, (Vector, Participant)> {
        for (k, t) in other.0 {
            if self.0.contains_key(&k) {
                return Err(k);
            }
            self.0.insert(k, t);
        }
        Ok(self)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vector, Participant), &LocalType)> {
        self.0.iter()
    }
}

impl fmt::Display for SessionEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        let entries: Vec<String> =
            self.0.iter().map(|((v, q), t)| format!("{}: {}@{}", v.join(","), print_local(t, None), q)).collect();
        write!(f, "{{ {} }}", entries.join("; "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeErrorKind {
    ProbabilitySum,
    IntervalMembership,
    ProjectionMismatch,
    NonDisjoint,
    BranchMismatch,
    Unbound,
    Arity,
    SortMismatch,
    /// Branches of a sum or conditional use their channels differently.
    Disagreement,
    Untypeable,
}

impl TypeErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            TypeErrorKind::ProbabilitySum => "probability-sum",
            TypeErrorKind::IntervalMembership => "interval-membership",
            TypeErrorKind::ProjectionMismatch => "projection-mismatch",
            TypeErrorKind::NonDisjoint => "non-disjoint",
            TypeErrorKind::BranchMismatch => "branch-mismatch",
            TypeErrorKind::Unbound => "unbound",
            TypeErrorKind::Arity => "arity",
            TypeErrorKind::SortMismatch => "sort-mismatch",
            TypeErrorKind::Disagreement => "disagreement",
            TypeErrorKind::Untypeable => "untypeable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// Typing rule that failed, e.g. `TSend`.
    pub rule: &'static str,
    /// Path of prefixes leading to the failure.
    pub location: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}) at {}: expected {}, found {}",
            self.kind.name(),
            self.rule,
            self.location,
            self.expected,
            self.actual
        )
    }
}

impl std::error::Error for TypeError {}
