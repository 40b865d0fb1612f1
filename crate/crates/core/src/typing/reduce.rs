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

//! Reduction of session environments.

use super::conform::head;
use super::env::{SessionEnv, Vector};
use crate::ast::Participant;
use crate::kernel::{point, ProbInterval, Rational};
use crate::types::LocalType;

/// One reduction Δ ⇒δ Δ′ and the interaction it models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeStep {
    pub interval: ProbInterval,
    pub env: SessionEnv,
    pub vector: Vector,
    pub chan: usize,
    pub from: Participant,
    pub to: Participant,
}

/// All one-step reducts: value exchange with matching sorts, delegation,
/// and selection with a matching label, each between two roles of one
/// session, inside any context.
pub fn type_reduce(delta: &SessionEnv) -> Vec<TypeStep> {
    let mut out = Vec::new();
    let entries: Vec<_> = delta.iter().map(|(k, t)| (k.clone(), head(t))).collect();
    for ((v, q1), t1) in &entries {
        for ((w, q2), t2) in &entries {
            if v != w || q1 == q2 {
                continue;
            }
            let mut push = |interval: ProbInterval, c1: &LocalType, c2: &LocalType, chan: usize| {
                let mut env = delta.clone();
                env.insert(v.clone(), *q1, c1.clone());
                env.insert(v.clone(), *q2, c2.clone());
                out.push(TypeStep { interval, env, vector: v.clone(), chan, from: *q1, to: *q2 });
            };
            match (t1.as_ref(), t2.as_ref()) {
                (LocalType::Send { chan: k1, branches }, LocalType::Recv { chan: k2, branches: rbs }) if k1 == k2 => {
                    for b in branches {
                        if let Some(r) = rbs.iter().find(|r| r.sorts == b.sorts) {
                            push(b.interval.clone(), &b.cont, &r.cont, k1.idx);
                        }
                    }
                }
                (LocalType::Select { chan: k1, branches }, LocalType::Branch { chan: k2, arms }) if k1 == k2 => {
                    for b in branches {
                        if let Some(a) = arms.iter().find(|a| a.label == b.label) {
                            push(b.interval.clone(), &b.cont, &a.cont, k1.idx);
                        }
                    }
                }
                (LocalType::Deleg { chan: k1, cont: c1, .. }, LocalType::SessRecv { chan: k2, cont: c2, .. })
                    if k1 == k2 =>
                {
                    push(point(Rational::one()).expect("one"), c1, c2, k1.idx);
                }
                _ => {}
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_local;

    fn env(entries: &[(u32, &str)]) -> SessionEnv {
        let v: Vector = vec!["c".into()];
        let mut d = SessionEnv::new();
        for (q, t) in entries {
            d.insert(v.clone(), Participant(*q), parse_local(t).unwrap());
        }
        d
    }

    #[test]
    fn pairs_sends_with_receives() {
        let d = env(&[
            (1, "[0.7,0.9]: c!<string>. end + [0.15,0.25]: c!<nat>. end"),
            (2, "c?(string). end + c?(nat). end"),
        ]);
        let steps = type_reduce(&d);
        assert_eq!(steps.len(), 2);
        assert!(steps.iter().all(|s| s.env.is_end_only() && s.from == Participant(1)));
    }

    #[test]
    fn end_only_environments_are_final() {
        assert!(type_reduce(&env(&[(1, "end"), (2, "end")])).is_empty());
    }

    #[test]
    fn selection_needs_a_matching_label() {
        let d = env(&[(1, "c (+) { 1 : ok : end }"), (2, "c & { no : end }")]);
        assert!(type_reduce(&d).is_empty());
    }
}
