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

//! Well-formedness of global types.

use std::collections::BTreeSet;
use std::fmt;

use super::global::GlobalType;
use super::project::project;
use super::simplify::simplify_global;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WfIssue {
    ProjectionUndefined(String),
    Unguarded { var: String },
    FreeVariable { var: String },
    Reflexive { location: String },
    DuplicateBranch { location: String, what: String },
    SharedChannels { channels: Vec<String> },
    EmptySum { location: String },
}

impl fmt::Display for WfIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WfIssue::ProjectionUndefined(m) => f.write_str(m),
            WfIssue::Unguarded { var } => write!(f, "type variable {} is not guarded by an interaction", var),
            WfIssue::FreeVariable { var } => write!(f, "type variable {} is unbound", var),
            WfIssue::Reflexive { location } => write!(f, "{}: a participant interacts with itself", location),
            WfIssue::DuplicateBranch { location, what } => {
                write!(f, "{}: {} appears in two branches with different continuations", location, what)
            }
            WfIssue::SharedChannels { channels } => {
                write!(f, "parallel components share channels {}", channels.join(", "))
            }
            WfIssue::EmptySum { location } => write!(f, "{}: a sum without branches", location),
        }
    }
}

/// Checks projectability onto every participant, guardedness, closedness,
/// irreflexivity, branch distinctness (after merging) and channel
/// disjointness of parallel components.
pub fn well_formed(g: &GlobalType) -> Result<(), Vec<WfIssue>> {
    let mut issues = Vec::new();
    for q in g.pid() {
        if let Err(u) = project(g, q) {
            issues.push(WfIssue::ProjectionUndefined(u.to_string()));
        }
    }
    for var in g.free_tvars() {
        issues.push(WfIssue::FreeVariable { var });
    }
    check(&simplify_global(g), &mut issues);
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

fn guarded(t: &str, g: &GlobalType) -> bool {
    match g {
        GlobalType::Var(x) => x != t,
        GlobalType::Rec(x, b) => x == t || guarded(t, b),
        GlobalType::Par(l, r) => guarded(t, l) && guarded(t, r),
        _ => true,
    }
}

fn check(g: &GlobalType, issues: &mut Vec<WfIssue>) {
    match g {
        GlobalType::Values { from, to, chan, branches } => {
            let location = format!("{} -> {} : {}", from, to, chan);
            if from == to {
                issues.push(WfIssue::Reflexive { location: location.clone() });
            }
            if branches.is_empty() {
                issues.push(WfIssue::EmptySum { location: location.clone() });
            }
            let mut seen = BTreeSet::new();
            for b in branches {
                if !seen.insert(b.sorts.clone()) {
                    let what = format!("<{}>", b.sorts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "));
                    issues.push(WfIssue::DuplicateBranch { location: location.clone(), what });
                }
            }
        }
        GlobalType::Labels { from, to, chan, branches } => {
            let location = format!("{} -> {} : {}", from, to, chan);
            if from == to {
                issues.push(WfIssue::Reflexive { location: location.clone() });
            }
            if branches.is_empty() {
                issues.push(WfIssue::EmptySum { location: location.clone() });
            }
            let mut seen = BTreeSet::new();
            for b in branches {
                if !seen.insert(b.label.clone()) {
                    issues.push(WfIssue::DuplicateBranch {
                        location: location.clone(),
                        what: format!("label {}", b.label),
                    });
                }
            }
        }
        GlobalType::Deleg { from, to, chan, .. } if from == to => {
            issues.push(WfIssue::Reflexive { location: format!("{} -> {} : {}", from, to, chan) });
        }
        GlobalType::Rec(t, b) if !guarded(t, b) => issues.push(WfIssue::Unguarded { var: t.clone() }),
        GlobalType::Par(l, r) => {
            let lc: BTreeSet<String> = l.channels().into_iter().collect();
            let shared: Vec<String> = r.channels().into_iter().filter(|c| lc.contains(c)).collect();
            if !shared.is_empty() {
                issues.push(WfIssue::SharedChannels { channels: shared });
            }
        }
        _ => {}
    }
    for c in g.children() {
        check(c, issues);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Participant;
    use crate::kernel::point;
    use crate::kernel::Rational;
    use crate::syntax::parse_global;
    use crate::types::GValueBranch;

    #[test]
    fn rejects_reflexive_interaction() {
        let g = GlobalType::Values {
            from: Participant(1),
            to: Participant(1),
            chan: "c".into(),
            branches: vec![GValueBranch {
                interval: point(Rational::one()).unwrap(),
                sorts: vec![],
                cont: GlobalType::End,
            }],
        };
        assert!(well_formed(&g).unwrap_err().iter().any(|i| matches!(i, WfIssue::Reflexive { .. })));
    }

    #[test]
    fn rejects_disagreeing_bystander() {
        let g =
            parse_global("1 ->0.5 2 : c { l : 2 ->1 3 : d<bool>. end } + 1 ->0.5 2 : c { r : 2 ->1 3 : d<nat>. end }")
                .unwrap();
        assert!(well_formed(&g).unwrap_err().iter().any(|i| matches!(i, WfIssue::ProjectionUndefined(_))));
    }

    #[test]
    fn rejects_unguarded_free_and_shared() {
        let g = parse_global("mu t. t").unwrap();
        assert!(well_formed(&g).is_err());
        let g = parse_global("1 ->1 2 : c<nat>. t").unwrap();
        assert!(well_formed(&g).unwrap_err().contains(&WfIssue::FreeVariable { var: "t".into() }));
        let g = parse_global("1 ->1 2 : c<nat>. end , 3 ->1 4 : c<nat>. end").unwrap();
        assert!(well_formed(&g).unwrap_err().iter().any(|i| matches!(i, WfIssue::SharedChannels { .. })));
    }

    #[test]
    fn accepts_recursive_protocol() {
        let g = parse_global("mu t. 1 ->[0.4,0.6] 2 : c<nat>. t + 1 ->[0.4,0.6] 2 : c<bool>. end").unwrap();
        assert_eq!(well_formed(&g), Ok(()));
    }
}
