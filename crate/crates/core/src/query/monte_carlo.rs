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

//! Statistical estimation by sampling maximal runs.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::predicate::{Atom, TracePredicate};
use crate::ast::Process;
use crate::semantics::{alpha_key, canonicalize, enabled_steps};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub runs: u64,
    pub seed: u64,
    /// Runs longer than this many steps count as divergent.
    pub max_steps: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { runs: 10_000, seed: 0, max_steps: 1_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub estimate: f64,
    pub stderr: f64,
    /// Runs that reached a final state and were counted.
    pub completed: u64,
    pub hits: u64,
    /// Runs cut off by the step budget; excluded from the estimate.
    pub divergent: u64,
    /// Counted runs that ended in the error state.
    pub errors: u64,
    /// Uniformly resolved choices between redex families.
    pub nondeterministic_choices: u64,
}

/// One sampled transition: its probability, target state, and the atoms
/// of the predicate its label satisfies.
struct Succ {
    prob: f64,
    target: usize,
    atoms: Vec<usize>,
}

/// Lazily explored state space shared by all runs.
struct Explorer {
    atoms: Vec<Atom>,
    index: HashMap<String, usize>,
    states: Vec<Process>,
    succ: Vec<Option<Vec<Vec<Succ>>>>,
}

impl Explorer {
    fn intern(&mut self, p: Process) -> usize {
        let k = alpha_key(&p);
        if let Some(&i) = self.index.get(&k) {
            return i;
        }
        let i = self.states.len();
        self.index.insert(k, i);
        self.states.push(p);
        self.succ.push(None);
        i
    }

    fn explore(&mut self, i: usize) {
        if self.succ[i].is_some() {
            return;
        }
        let mut fams: Vec<(usize, Vec<Succ>)> = Vec::new();
        for s in enabled_steps(&self.states[i]) {
            let atoms = (0..self.atoms.len()).filter(|&a| self.atoms[a].matches(&s.label)).collect();
            let succ = Succ { prob: s.label.probability.to_f64(), target: self.intern(s.target), atoms };
            match fams.iter_mut().find(|(f, _)| *f == s.label.family) {
                Some((_, v)) => v.push(succ),
                None => fams.push((s.label.family, vec![succ])),
            }
        }
        self.succ[i] = Some(fams.into_iter().map(|(_, v)| v).collect());
    }
}

/// Samples `runs` maximal runs of `p` and estimates the probability of
/// `pred`. Identical options give identical results.
pub fn monte_carlo(p: &Process, pred: &TracePredicate, opts: McOptions) -> McResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let atoms = pred.atoms();
    let mut ex = Explorer { atoms: atoms.clone(), index: HashMap::new(), states: vec![], succ: vec![] };
    let root = ex.intern(canonicalize(p));
    let mut res = McResult {
        estimate: 0.0,
        stderr: 0.0,
        completed: 0,
        hits: 0,
        divergent: 0,
        errors: 0,
        nondeterministic_choices: 0,
    };
    let mut seen = vec![false; atoms.len()];
    for _ in 0..opts.runs {
        let mut cur = root;
        seen.iter_mut().for_each(|b| *b = false);
        let mut finished = false;
        for _ in 0..=opts.max_steps {
            ex.explore(cur);
            let fams = ex.succ[cur].as_ref().expect("explored");
            if fams.is_empty() {
                finished = true;
                break;
            }
            let nondet = fams.len() > 1;
            let f = if nondet { rng.gen_range(0..fams.len()) } else { 0 };
            let fam = &fams[f];
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            // Rounding, or missing mass: fall back to the last edge.
            let mut chosen = fam.last().expect("non-empty family");
            for s in fam {
                acc += s.prob;
                if u < acc {
                    chosen = s;
                    break;
                }
            }
            if nondet {
                res.nondeterministic_choices += 1;
            }
            for &a in &chosen.atoms {
                seen[a] = true;
            }
            cur = chosen.target;
        }
        if !finished {
            res.divergent += 1;
            continue;
        }
        res.completed += 1;
        if matches!(ex.states[cur], Process::Error) {
            res.errors += 1;
        }
        if pred.eval_with(&atoms, &seen) {
            res.hits += 1;
        }
    }
    if res.completed > 0 {
        let n = res.completed as f64;
        res.estimate = res.hits as f64 / n;
        res.stderr = (res.estimate * (1.0 - res.estimate) / n).sqrt();
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_predicate;
    use crate::syntax::parse_process;

    #[test]
    fn reproducible_and_close() {
        let p = parse_process("0.3: c!<1>; 0 + 0.7: c!<2>; 0 | c?(x: nat); 0").unwrap();
        let pred = parse_predicate("sent(c, 1)").unwrap();
        let opts = McOptions { runs: 4000, seed: 7, max_steps: 10 };
        let a = monte_carlo(&p, &pred, opts);
        assert_eq!(a, monte_carlo(&p, &pred, opts));
        assert!((a.estimate - 0.3).abs() < 5.0 * a.stderr.max(1e-3));
    }

    #[test]
    fn true_is_certain_and_single_runs_are_binary() {
        let p = parse_process("0.3: c!<1>; 0 + 0.7: c!<2>; 0 | c?(x: nat); 0").unwrap();
        let r = monte_carlo(&p, &TracePredicate::True, McOptions { runs: 50, seed: 1, max_steps: 10 });
        assert_eq!(r.estimate, 1.0);
        let pred = parse_predicate("sent(c, 2)").unwrap();
        let r = monte_carlo(&p, &pred, McOptions { runs: 1, seed: 3, max_steps: 10 });
        assert!(r.estimate == 0.0 || r.estimate == 1.0);
    }

    #[test]
    fn divergence_is_counted() {
        let p = parse_process("mu X. 1: c!<1>; X | mu Y. c?(x: nat); Y").unwrap();
        let r = monte_carlo(&p, &TracePredicate::True, McOptions { runs: 3, seed: 0, max_steps: 20 });
        assert_eq!(r.divergent, 3);
        assert_eq!(r.completed, 0);
    }
}
