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

//! Executable metatheory: subject reduction, preservation under structural
//! congruence, error freedom, substitution and weakening, each checked on
//! concrete processes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::check::{typecheck, Typing};
use super::conform::envs_equiv;
use super::env::{SessionEnv, SortEnv, Vector};
use super::reduce::type_reduce;
use crate::ast::{free_names, subst_values, FreshNames, Name, Process, Sort, Value};
use crate::kernel::interval_contains;
use crate::semantics::{build_graph, canonicalize, compose, decompose, ActionInfo, Rule};
use crate::syntax::print_process;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub subject: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub harness: &'static str,
    pub checked: usize,
    pub failures: Vec<Counterexample>,
}

impl Report {
    fn new(harness: &'static str) -> Report {
        Report { harness, checked: 0, failures: vec![] }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, subject: &Process, detail: impl Into<String>) {
        self.failures.push(Counterexample { subject: print_process(subject), detail: detail.into() });
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "{}: ok ({} checks)", self.harness, self.checked)
        } else {
            write!(f, "{}: {} failure(s) in {} checks", self.harness, self.failures.len(), self.checked)?;
            if let Some(c) = self.failures.first() {
                write!(f, "\n  first: {}\n  process: {}", c.detail, c.subject)?;
            }
            Ok(())
        }
    }
}

/// The canonical form of `p` with its hidden session vectors opened: Γ
/// gains the vectors, and the process keeps only hidden shared names.
pub fn open_state(gamma: &SortEnv, p: &Process) -> (SortEnv, Process) {
    let canon = canonicalize(p);
    let (hides, comps) = decompose(&canon);
    let body = Process::par_all(comps.clone());
    let mut g = gamma.clone();
    let mut keep = Vec::new();
    for h in hides {
        if h.iter().any(|n| super::check::uses_as_channel(&body, n)) {
            g.bind_vector(&h, None);
        } else {
            keep.push(h);
        }
    }
    (g, compose(keep, comps))
}

fn vector_of(gamma: &SortEnv, chan: &str) -> Option<(Vector, usize)> {
    gamma.chans.get(chan).map(|(v, i, _)| (v.clone(), *i))
}

/// Searches for type reductions matching the communications of one step.
fn matches_actions(gamma: &SortEnv, delta: &SessionEnv, actions: &[&ActionInfo], target: &SessionEnv) -> bool {
    let Some((a, rest)) = actions.split_first() else {
        return envs_equiv(delta, target);
    };
    let Some((v, idx)) = vector_of(gamma, &a.runtime_chan) else {
        return false;
    };
    type_reduce(delta).into_iter().any(|s| {
        s.vector == v
            && s.chan == idx
            && Some(s.from) == a.sender
            && Some(s.to) == a.receiver
            && interval_contains(&a.probability, &s.interval)
            && matches_actions(gamma, &s.env, rest, target)
    })
}

/// Every non-error edge of the reduction graph leads to a typable state
/// whose environment is unchanged or a type reduct, at an interval that
/// contains the step's probability. Sessions opened by the step are not
/// compared.
pub fn check_subject_reduction(gamma: &SortEnv, p: &Process, depth: usize) -> Report {
    let mut report = Report::new("subject reduction");
    let graph = build_graph(p, depth);
    let mut typings: HashMap<usize, Option<(SortEnv, Typing)>> = HashMap::new();
    let mut typing_of = |n: usize, report: &mut Report| -> Option<(SortEnv, Typing)> {
        typings
            .entry(n)
            .or_insert_with(|| {
                let (g, open) = open_state(gamma, &graph.nodes[n].process);
                match typecheck(&g, &open) {
                    Ok(t) => Some((g, t)),
                    Err(e) => {
                        report.fail(&graph.nodes[n].process, format!("reachable state is not typable: {}", e));
                        None
                    }
                }
            })
            .clone()
    };
    for e in &graph.edges {
        if e.label.is_error() || graph.nodes[e.to].is_error() {
            continue;
        }
        report.checked += 1;
        let Some((g, before)) = typing_of(e.from, &mut report) else { continue };
        let Some((_, after)) = typing_of(e.to, &mut report) else { continue };
        let mut target = after.delta.clone();
        if e.label.rules.contains(&Rule::Link) {
            let old: BTreeSet<Vector> = before.delta.vectors().into_iter().collect();
            target = SessionEnv(target.0.into_iter().filter(|((v, _), _)| old.contains(v)).collect());
        }
        let comms: Vec<&ActionInfo> =
            e.label.actions.iter().filter(|a| matches!(a.rule, Rule::Com | Rule::Label | Rule::Deleg)).collect();
        let ok = envs_equiv(&before.delta, &target) || matches_actions(&g, &before.delta, &comms, &target);
        if !ok {
            report.fail(
                &graph.nodes[e.from].process,
                format!(
                    "step {} with probability {} goes from {} to {}, which is no type reduct",
                    e.label.rules_text(),
                    e.label.probability,
                    before.delta,
                    after.delta
                ),
            );
        }
    }
    report
}

/// No error state or error step is reachable within `depth` steps.
pub fn check_error_freedom(p: &Process, depth: usize) -> Report {
    let mut report = Report::new("error freedom");
    let graph = build_graph(p, depth);
    for e in &graph.edges {
        report.checked += 1;
        if e.label.is_error() {
            report.fail(&graph.nodes[e.from].process, format!("error step {}", e.label.rules_text()));
        }
    }
    report
}

/// Every single structural-congruence rewrite of `p`, at any position and
/// in either direction.
pub fn equiv_rewrites(p: &Process) -> Vec<Process> {
    let mut fresh = FreshNames::for_process(p);
    let mut out = Vec::new();
    rewrites_at(p, &mut fresh, &mut |q| out.push(q));
    out
}

fn local_rewrites(p: &Process, fresh: &mut FreshNames) -> Vec<Process> {
    let mut out = vec![Process::Par(Box::new(p.clone()), Box::new(Process::Inact))];
    match p {
        Process::Par(l, r) => {
            if r.is_inact() {
                out.push((**l).clone());
            }
            out.push(Process::Par(r.clone(), l.clone()));
            if let Process::Par(a, b) = &**l {
                out.push(Process::Par(a.clone(), Box::new(Process::Par(b.clone(), r.clone()))));
            }
            if let Process::Par(b, c) = &**r {
                out.push(Process::Par(Box::new(Process::Par(l.clone(), b.clone())), c.clone()));
            }
            if let Process::Hide { names, body } = &**l {
                let fr = free_names(r);
                if names.iter().all(|n| !fr.contains(n)) {
                    out.push(Process::hide(names.clone(), Process::Par(body.clone(), r.clone())));
                }
            }
        }
        Process::Hide { names, body } => {
            if body.is_inact() {
                out.push(Process::Inact);
            }
            if let Process::Hide { names: inner, body: b } = &**body {
                out.push(Process::hide(inner.clone(), Process::hide(names.clone(), (**b).clone())));
            }
            if let Process::Par(l, r) = &**body {
                let fr = free_names(r);
                if names.iter().all(|n| !fr.contains(n)) {
                    out.push(Process::Par(Box::new(Process::hide(names.clone(), (**l).clone())), r.clone()));
                }
            }
        }
        Process::Rec { body, .. } if body.is_inact() => out.push(Process::Inact),
        Process::Inact => {
            out.push(Process::hide(vec![fresh.fresh("n")], Process::Inact));
            out.push(Process::Rec { var: "X".into(), body: Box::new(Process::Inact) });
        }
        Process::Send { chan, branches } if branches.len() > 1 => {
            let mut b = branches.clone();
            b.reverse();
            out.push(Process::Send { chan: chan.clone(), branches: b });
        }
        Process::Recv { chan, branches } if branches.len() > 1 => {
            let mut b = branches.clone();
            b.reverse();
            out.push(Process::Recv { chan: chan.clone(), branches: b });
        }
        Process::Select { chan, branches } if branches.len() > 1 => {
            let mut b = branches.clone();
            b.reverse();
            out.push(Process::Select { chan: chan.clone(), branches: b });
        }
        Process::Branch { chan, arms } if arms.len() > 1 => {
            let mut a = arms.clone();
            a.reverse();
            out.push(Process::Branch { chan: chan.clone(), arms: a });
        }
        _ => {}
    }
    out
}

fn rewrites_at(p: &Process, fresh: &mut FreshNames, emit: &mut dyn FnMut(Process)) {
    for q in local_rewrites(p, fresh) {
        emit(q);
    }
    // Rewrite inside the i-th child, keeping the others.
    let n = p.children().len();
    for i in 0..n {
        let child = p.children()[i].clone();
        let mut inner = Vec::new();
        rewrites_at(&child, fresh, &mut |c| inner.push(c));
        for c in inner {
            let mut k = 0;
            let rebuilt = crate::ast::map_children(p, &mut |orig| {
                let r = if k == i { c.clone() } else { orig.clone() };
                k += 1;
                r
            });
            emit(rebuilt);
        }
    }
}

/// Every single congruence rewrite of `p` synthesizes the same Δ as `p`.
pub fn check_equiv_preservation(gamma: &SortEnv, p: &Process) -> Report {
    let mut report = Report::new("preservation under congruence");
    let base = match typecheck(gamma, p) {
        Ok(t) => t.delta,
        Err(e) => {
            report.fail(p, format!("the process itself is not typable: {}", e));
            return report;
        }
    };
    for q in equiv_rewrites(p) {
        report.checked += 1;
        match typecheck(gamma, &q) {
            Ok(t) if envs_equiv(&t.delta, &base) => {}
            Ok(t) => report.fail(&q, format!("environment {} differs from {}", t.delta, base)),
            Err(e) => report.fail(&q, format!("rewrite is not typable: {}", e)),
        }
    }
    report
}

/// Representative values of each sort.
pub fn sample_values(s: Sort) -> Vec<Value> {
    match s {
        Sort::Bool => vec![Value::Bool(true), Value::Bool(false)],
        Sort::Nat => vec![Value::Nat(0), Value::Nat(195014766)],
        Sort::Int => vec![Value::Int(-7), Value::Int(80)],
        Sort::Str => vec![Value::Str(String::new()), Value::Str("War and Peace".into())],
    }
}

/// Substitution: for every receive at the top of a component, replacing
/// its binders by values of their sorts keeps the continuation's typing.
/// Weakening: adding a vector of `end` types keeps every judgement.
pub fn check_substitution_weakening(samples: &[(SortEnv, Process)]) -> Report {
    let mut report = Report::new("substitution and weakening");
    for (gamma, p) in samples {
        let Ok(t) = typecheck(gamma, p) else { continue };
        // Weakening by the empty environment and by a fresh ended vector.
        report.checked += 1;
        let mut weak = t.delta.clone();
        let fresh: Vector = vec![FreshNames::for_process(p).fresh("w")];
        weak.insert(fresh.clone(), crate::ast::Participant(1), crate::types::LocalType::End);
        weak.insert(fresh, crate::ast::Participant(2), crate::types::LocalType::End);
        if !derivable(gamma, p, &t.delta) || !derivable(gamma, p, &weak) {
            report.fail(p, "weakening by an ended environment is not derivable");
        }
        let (_, comps) = decompose(p);
        for c in comps.iter().chain(std::iter::once(p)) {
            let Process::Recv { branches, .. } = c else { continue };
            for b in branches {
                let mut g = gamma.clone();
                for (x, s) in &b.binders {
                    g.vars.insert(x.clone(), *s);
                }
                let Ok(open) = typecheck(&g, &b.cont) else { continue };
                for k in 0..2 {
                    let map: BTreeMap<Name, Value> =
                        b.binders.iter().map(|(x, s)| (x.clone(), sample_values(*s)[k].clone())).collect();
                    report.checked += 1;
                    match typecheck(gamma, &subst_values(&b.cont, &map)) {
                        Ok(t) if envs_equiv(&t.delta, &open.delta) => {}
                        Ok(t) => report.fail(&b.cont, format!("substitution changed {} into {}", open.delta, t.delta)),
                        Err(e) => report.fail(&b.cont, format!("substitution broke typing: {}", e)),
                    }
                }
            }
        }
    }
    report
}

/// Γ ⊢ P ▷ Δ holds, up to `end` entries.
pub fn derivable(gamma: &SortEnv, p: &Process, delta: &SessionEnv) -> bool {
    typecheck(gamma, p).is_ok_and(|t| envs_equiv(&t.delta, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_process;
    use crate::typing::{random_system, GenConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inaction_passes_vacuously() {
        let g = SortEnv::new();
        assert!(check_subject_reduction(&g, &Process::Inact, 5).passed());
        assert!(check_error_freedom(&Process::Inact, 5).passed());
        assert!(check_equiv_preservation(&g, &Process::Inact).passed());
    }

    #[test]
    fn faulty_sums_are_detected() {
        let p = parse_process("0.5: c!<1>; 0 + 0.4: c!<2>; 0 | c?(x: nat); 0").unwrap();
        assert!(!check_error_freedom(&p, 5).passed());
    }

    #[test]
    fn rewrites_cover_every_rule() {
        let p = parse_process("(new n in 0) | 0.5: c!<1>; 0 + 0.5: c!<2>; 0").unwrap();
        let rs = equiv_rewrites(&p);
        assert!(rs.iter().any(|q| matches!(q, Process::Par(l, _) if l.is_inact())));
        assert!(rs.len() > 5);
    }

    #[test]
    fn generated_systems_satisfy_the_theorems() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let g = random_system(&mut rng, GenConfig::default());
            let gamma = SortEnv::with_shared([(g.shared.clone(), g.global.clone())]);
            let r = check_subject_reduction(&gamma, &g.system, 12);
            assert!(r.passed(), "{}\n{}", r, g.global);
            assert!(check_error_freedom(&g.system, 12).passed());
        }
    }
}
