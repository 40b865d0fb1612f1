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

//! Random well-typed systems: a random global type, projected onto each
//! participant, with each projection decorated into a process.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ast::{BinOp, BranchArm, Expr, Participant, Process, RecvBranch, SelectBranch, SendBranch, Sort, Value};
use crate::kernel::{ProbInterval, Rational};
use crate::types::{project, GLabelBranch, GValueBranch, GlobalType, LocalType};

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_participants: u32,
    /// Interactions along any path of the global type, at most.
    pub max_interactions: usize,
    pub max_branches: usize,
    /// Interaction nodes in the whole global type, at most. Branches copy
    /// their continuation, so the tree can otherwise grow exponentially.
    pub max_nodes: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_participants: 4, max_interactions: 5, max_branches: 3, max_nodes: 40 }
    }
}

fn interaction_nodes(g: &GlobalType) -> usize {
    let own = usize::from(matches!(g, GlobalType::Values { .. } | GlobalType::Labels { .. }));
    own + g.children().into_iter().map(interaction_nodes).sum::<usize>()
}

/// A generated system with the global type it follows.
#[derive(Debug, Clone)]
pub struct Generated {
    pub global: GlobalType,
    pub shared: String,
    pub system: Process,
}

const GRID: i64 = 20;

/// Probabilities on the 1/20 grid, each at least 1/20, adding up to one.
fn grid_distribution<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    let mut parts = vec![1i64; n];
    for _ in 0..(GRID - n as i64) {
        let i = rng.gen_range(0..n);
        parts[i] += 1;
    }
    parts
}

/// A closed interval around `k/20` of random width.
fn interval_around<R: Rng>(rng: &mut R, k: i64) -> ProbInterval {
    let lo = (k - rng.gen_range(0..=2)).max(0);
    let hi = (k + rng.gen_range(0..=2)).min(GRID);
    ProbInterval::closed(Rational::new(lo, GRID), Rational::new(hi, GRID)).expect("ordered bounds")
}

fn chan_name(a: Participant, b: Participant) -> String {
    let (x, y) = if a.0 < b.0 { (a.0, b.0) } else { (b.0, a.0) };
    format!("c{}{}", x, y)
}

const SORTS: [Sort; 4] = [Sort::Bool, Sort::Nat, Sort::Int, Sort::Str];

struct GlobalGen<'r, R> {
    rng: &'r mut R,
    n: u32,
    cfg: GenConfig,
}

impl<R: Rng> GlobalGen<'_, R> {
    fn pair(&mut self) -> (Participant, Participant) {
        let a = self.rng.gen_range(1..=self.n);
        let mut b = self.rng.gen_range(1..self.n);
        if b >= a {
            b += 1;
        }
        (Participant(a), Participant(b))
    }

    /// One interaction between `from` and `to` whose branches all continue
    /// with their own short exchange between the two, then with `rest`.
    fn interaction(&mut self, from: Participant, to: Participant, budget: usize, rest: &GlobalType) -> GlobalType {
        let k = self.rng.gen_range(1..=self.cfg.max_branches);
        let dist = grid_distribution(self.rng, k);
        let chan = chan_name(from, to);
        let mut conts = Vec::new();
        for _ in 0..k {
            let local = if budget > 0 && self.rng.gen_bool(0.3) {
                let (f, t) = if self.rng.gen_bool(0.5) { (from, to) } else { (to, from) };
                self.interaction(f, t, budget - 1, rest)
            } else {
                rest.clone()
            };
            conts.push(local);
        }
        if self.rng.gen_bool(0.7) {
            let mut sorts = SORTS.to_vec();
            sorts.shuffle(self.rng);
            let branches = (0..k)
                .map(|i| GValueBranch {
                    interval: interval_around(self.rng, dist[i]),
                    sorts: vec![sorts[i]],
                    cont: conts[i].clone(),
                })
                .collect();
            GlobalType::Values { from, to, chan, branches }
        } else {
            let branches = (0..k)
                .map(|i| GLabelBranch {
                    interval: interval_around(self.rng, dist[i]),
                    label: format!("l{}", i + 1),
                    cont: conts[i].clone(),
                })
                .collect();
            GlobalType::Labels { from, to, chan, branches }
        }
    }

    fn global(&mut self, budget: usize) -> GlobalType {
        if budget == 0 {
            return GlobalType::End;
        }
        let rest = self.global(budget - 1);
        let (from, to) = self.pair();
        let extra = if budget > 1 { 1 } else { 0 };
        self.interaction(from, to, extra, &rest)
    }
}

/// A random global type with 2 to `max_participants` participants, all of
/// whom interact, and no recursion or delegation.
pub fn random_global<R: Rng>(rng: &mut R, cfg: GenConfig) -> GlobalType {
    loop {
        let n = rng.gen_range(2..=cfg.max_participants.max(2));
        let budget = rng.gen_range(1..=cfg.max_interactions.max(1));
        let g = GlobalGen { rng, n, cfg }.global(budget);
        if g.pid().len() == n as usize && interaction_nodes(&g) <= cfg.max_nodes {
            return g;
        }
    }
}

struct Decorator<'r, R> {
    rng: &'r mut R,
    /// Channel index to source name.
    chans: Vec<String>,
    vars: Vec<(String, Sort)>,
    fresh: usize,
}

impl<R: Rng> Decorator<'_, R> {
    fn expr(&mut self, s: Sort) -> Expr {
        let in_scope: Vec<String> = self.vars.iter().filter(|(_, t)| *t == s).map(|(x, _)| x.clone()).collect();
        if !in_scope.is_empty() && self.rng.gen_bool(0.4) {
            let x = Expr::var(in_scope.choose(self.rng).expect("non-empty").clone());
            return match s {
                Sort::Nat | Sort::Int => Expr::bin(BinOp::Add, x, Expr::Val(Value::Nat(1))),
                _ => x,
            };
        }
        Expr::Val(match s {
            Sort::Bool => Value::Bool(self.rng.gen_bool(0.5)),
            Sort::Nat => Value::Nat(self.rng.gen_range(0..100)),
            Sort::Int => Value::Int(self.rng.gen_range(-50..50)),
            Sort::Str => {
                Value::Str(["a", "b", "hello", "War and Peace"].choose(self.rng).expect("non-empty").to_string())
            }
        })
    }

    /// Point probabilities inside each interval, on the 1/20 grid where
    /// possible, adding up to one.
    fn points(&mut self, intervals: &[&ProbInterval]) -> Vec<Rational> {
        let mut ps: Vec<Rational> = intervals.iter().map(|i| i.lo().clone()).collect();
        let mut left = Rational::one() - ps.iter().cloned().sum::<Rational>();
        let mut order: Vec<usize> = (0..ps.len()).collect();
        order.shuffle(self.rng);
        for i in order {
            let room = intervals[i].hi().clone() - ps[i].clone();
            let add = room.min(left.clone());
            ps[i] = ps[i].clone() + add.clone();
            left = left - add;
        }
        ps
    }

    fn chan(&self, idx: usize) -> crate::ast::Chan {
        crate::ast::Chan::named(self.chans[idx].clone())
    }

    fn process(&mut self, t: &LocalType) -> Process {
        match t {
            LocalType::End => Process::Inact,
            LocalType::Send { chan, branches } => {
                let ps = self.points(&branches.iter().map(|b| &b.interval).collect::<Vec<_>>());
                let mut out = Vec::new();
                for (b, p) in branches.iter().zip(ps) {
                    // Sometimes split a branch into two with the same sorts.
                    let split = self.rng.gen_bool(0.2) && p > Rational::zero();
                    let parts = if split { vec![p.clone() / Rational::from_integer(2); 2] } else { vec![p] };
                    for part in parts {
                        let exprs = b.sorts.iter().map(|s| self.expr(*s)).collect();
                        let cont = self.process(&b.cont);
                        out.push(SendBranch::new(part, exprs, cont));
                    }
                }
                Process::Send { chan: self.chan(chan.idx), branches: out }
            }
            LocalType::Recv { chan, branches } => {
                let mut out = Vec::new();
                for b in branches {
                    let binders: Vec<(String, Sort)> = b
                        .sorts
                        .iter()
                        .map(|s| {
                            self.fresh += 1;
                            (format!("x{}", self.fresh), *s)
                        })
                        .collect();
                    let saved = self.vars.len();
                    self.vars.extend(binders.iter().cloned());
                    let cont = self.process(&b.cont);
                    self.vars.truncate(saved);
                    out.push(RecvBranch { binders, cont });
                }
                Process::Recv { chan: self.chan(chan.idx), branches: out }
            }
            LocalType::Select { chan, branches } => {
                let ps = self.points(&branches.iter().map(|b| &b.interval).collect::<Vec<_>>());
                let out = branches
                    .iter()
                    .zip(ps)
                    .map(|(b, prob)| SelectBranch { prob, label: b.label.clone(), cont: self.process(&b.cont) })
                    .collect();
                Process::Select { chan: self.chan(chan.idx), branches: out }
            }
            LocalType::Branch { chan, arms } => {
                let out =
                    arms.iter().map(|a| BranchArm { label: a.label.clone(), cont: self.process(&a.cont) }).collect();
                Process::Branch { chan: self.chan(chan.idx), arms: out }
            }
            other => panic!("the generator does not produce {:?}", other),
        }
    }
}

/// A system of one request and one accept per further participant, each
/// body decorated from the projection of a random global type.
pub fn random_system<R: Rng>(rng: &mut R, cfg: GenConfig) -> Generated {
    let global = random_global(rng, cfg);
    let shared = "a".to_string();
    let chans = global.channels();
    let n = global.pid().len() as u32;
    let mut comps = Vec::new();
    for q in 1..=n {
        let t = project(&global, Participant(q)).expect("generated global types are projectable");
        let mut d = Decorator { rng, chans: chans.clone(), vars: vec![], fresh: 0 };
        let body = Box::new(d.process(&t));
        comps.push(if q == 1 {
            Process::Request { shared: shared.clone(), parties: n, chans: chans.clone(), body }
        } else {
            Process::Accept { shared: shared.clone(), role: Participant(q), chans: chans.clone(), body }
        });
    }
    Generated { global, shared, system: Process::par_all(comps) }
}

/// Halves the probability of the likeliest branch of the first value or
/// label send that some session body starts with. `None` if no body starts
/// that way.
pub fn perturb(system: &Process) -> Option<Process> {
    fn likeliest(ps: impl Iterator<Item = Rational>) -> usize {
        ps.enumerate().max_by(|a, b| a.1.cmp(&b.1)).map_or(0, |(i, _)| i)
    }
    fn first_send(p: &Process) -> Option<Process> {
        let half = |r: &Rational| r.clone() / Rational::from_integer(2);
        match p {
            Process::Send { chan, branches } => {
                let mut branches = branches.clone();
                let i = likeliest(branches.iter().map(|b| b.prob.clone()));
                branches[i].prob = half(&branches[i].prob);
                Some(Process::Send { chan: chan.clone(), branches })
            }
            Process::Select { chan, branches } => {
                let mut branches = branches.clone();
                let i = likeliest(branches.iter().map(|b| b.prob.clone()));
                branches[i].prob = half(&branches[i].prob);
                Some(Process::Select { chan: chan.clone(), branches })
            }
            _ => None,
        }
    }
    fn go(p: &Process, done: &mut bool) -> Process {
        if *done {
            return p.clone();
        }
        match p {
            Process::Par(l, r) => {
                let l = go(l, done);
                let r = go(r, done);
                Process::Par(Box::new(l), Box::new(r))
            }
            Process::Request { shared, parties, chans, body } => match first_send(body) {
                Some(b) => {
                    *done = true;
                    Process::Request {
                        shared: shared.clone(),
                        parties: *parties,
                        chans: chans.clone(),
                        body: Box::new(b),
                    }
                }
                None => p.clone(),
            },
            Process::Accept { shared, role, chans, body } => match first_send(body) {
                Some(b) => {
                    *done = true;
                    Process::Accept { shared: shared.clone(), role: *role, chans: chans.clone(), body: Box::new(b) }
                }
                None => p.clone(),
            },
            _ => p.clone(),
        }
    }
    let mut done = false;
    let out = go(system, &mut done);
    done.then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::well_formed;
    use crate::typing::{typecheck, SortEnv, TypeErrorKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_systems_are_well_typed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let g = random_system(&mut rng, GenConfig::default());
            assert_eq!(well_formed(&g.global), Ok(()), "{}", g.global);
            let gamma = SortEnv::with_shared([(g.shared.clone(), g.global.clone())]);
            let t = typecheck(&gamma, &g.system);
            assert!(t.is_ok(), "{}\n{}\n{:?}", g.global, crate::syntax::print_process(&g.system), t);
        }
    }

    #[test]
    fn perturbed_systems_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_system(&mut rng, GenConfig::default());
            let bad = perturb(&g.system).expect("the first sender starts with a send");
            let gamma = SortEnv::with_shared([(g.shared.clone(), g.global.clone())]);
            assert_eq!(typecheck(&gamma, &bad).unwrap_err().kind, TypeErrorKind::ProbabilitySum);
        }
    }
}
