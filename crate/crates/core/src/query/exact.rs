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

//! Exact event probabilities by backward induction over a reduction graph.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::predicate::TracePredicate;
use crate::kernel::Rational;
use crate::semantics::{NodeId, ReductionGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    Exact(Rational),
    /// Minimum and maximum over resolutions of nondeterministic choices.
    Range(Rational, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub kind: QueryKind,
    /// Maximal paths from the root, saturating.
    pub paths_counted: u128,
    /// Reachable nodes with more than one redex family.
    pub nondeterministic_nodes: usize,
    /// Reachable nodes cut off by the depth bound, treated as final.
    pub truncated_nodes: usize,
}

impl QueryResult {
    pub fn lo(&self) -> &Rational {
        match &self.kind {
            QueryKind::Exact(p) | QueryKind::Range(p, _) => p,
        }
    }

    pub fn hi(&self) -> &Rational {
        match &self.kind {
            QueryKind::Exact(p) | QueryKind::Range(_, p) => p,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match &self.kind {
            QueryKind::Exact(p) => Some(p),
            QueryKind::Range(..) => None,
        }
    }
}

impl fmt::Display for QueryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            QueryKind::Exact(p) => f.write_str(&p.to_report_string()),
            QueryKind::Range(lo, hi) => write!(f, "between {} and {}", lo.to_report_string(), hi.to_report_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("the reduction graph has a cycle; bound the exploration depth or unroll recursion")]
    Cyclic,
    #[error("a probabilistic error is reachable ({count} error state(s)); the process is not error free")]
    ErrorReachable { count: usize },
    #[error("the predicate mentions {0} atoms; at most 20 are supported")]
    TooManyAtoms(usize),
    #[error("the classes do not partition the paths: their probabilities add up to {0}")]
    NotAPartition(String),
    #[error("no classes given")]
    NoClasses,
}

/// Probability that a maximal path from the root satisfies `pred`.
pub fn event_probability(g: &ReductionGraph, pred: &TracePredicate) -> Result<QueryResult, QueryError> {
    if g.has_cycle() {
        return Err(QueryError::Cyclic);
    }
    let reach = reachable(g);
    let errors = reach.iter().filter(|&&n| g.nodes[n].is_error()).count();
    if errors > 0 {
        return Err(QueryError::ErrorReachable { count: errors });
    }
    let atoms = pred.atoms();
    if atoms.len() > 20 {
        return Err(QueryError::TooManyAtoms(atoms.len()));
    }
    // Atoms each edge makes true, as a bit mask.
    let edge_masks: Vec<u32> = g
        .edges
        .iter()
        .map(|e| atoms.iter().enumerate().filter(|(_, a)| a.matches(&e.label)).fold(0, |m, (i, _)| m | 1 << i))
        .collect();
    let mut out_edges: Vec<Vec<usize>> = vec![vec![]; g.nodes.len()];
    for (i, e) in g.edges.iter().enumerate() {
        out_edges[e.from].push(i);
    }

    let families = out_edges
        .iter()
        .map(|es| {
            let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
            for &i in es {
                let f = g.edges[i].label.family;
                match groups.iter_mut().find(|(k, _)| *k == f) {
                    Some((_, v)) => v.push(i),
                    None => groups.push((f, vec![i])),
                }
            }
            groups.into_iter().map(|(_, v)| v).collect()
        })
        .collect();
    let mut dp =
        Dp { g, pred, atoms: &atoms, edge_masks: &edge_masks, out_edges: &out_edges, families, memo: HashMap::new() };
    let (lo, hi) = dp.value(g.root, 0);

    let nondeterministic_nodes = reach.iter().filter(|&&n| dp.families[n].len() > 1).count();
    let truncated_nodes = reach.iter().filter(|&&n| g.nodes[n].truncated).count();
    let kind = if nondeterministic_nodes == 0 { QueryKind::Exact(lo) } else { QueryKind::Range(lo, hi) };
    Ok(QueryResult { kind, paths_counted: count_paths(g, &out_edges), nondeterministic_nodes, truncated_nodes })
}

struct Dp<'a> {
    g: &'a ReductionGraph,
    pred: &'a TracePredicate,
    atoms: &'a [super::predicate::Atom],
    edge_masks: &'a [u32],
    out_edges: &'a [Vec<usize>],
    families: Vec<Vec<Vec<usize>>>,
    memo: HashMap<(NodeId, u32), (Rational, Rational)>,
}

impl Dp<'_> {
    fn value(&mut self, n: NodeId, mask: u32) -> (Rational, Rational) {
        if let Some(v) = self.memo.get(&(n, mask)) {
            return v.clone();
        }
        let v = if self.out_edges[n].is_empty() {
            let seen: Vec<bool> = (0..self.atoms.len()).map(|i| mask & (1 << i) != 0).collect();
            let b = if self.pred.eval_with(self.atoms, &seen) { Rational::one() } else { Rational::zero() };
            (b.clone(), b)
        } else {
            let mut best: Option<(Rational, Rational)> = None;
            let fams = self.families[n].clone();
            for fam in &fams {
                let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
                for &i in fam {
                    let g = self.g;
                    let e = &g.edges[i];
                    let (l, h) = self.value(e.to, mask | self.edge_masks[i]);
                    lo = lo + &e.label.probability * &l;
                    hi = hi + &e.label.probability * &h;
                }
                best = Some(match best {
                    None => (lo, hi),
                    Some((bl, bh)) => (bl.min(lo), bh.max(hi)),
                });
            }
            best.expect("a node with edges has a family")
        };
        self.memo.insert((n, mask), v.clone());
        v
    }
}

fn reachable(g: &ReductionGraph) -> Vec<NodeId> {
    let mut seen = vec![false; g.nodes.len()];
    let mut stack = vec![g.root];
    seen[g.root] = true;
    let mut out = Vec::new();
    while let Some(n) = stack.pop() {
        out.push(n);
        for e in g.out_edges(n) {
            if !seen[e.to] {
                seen[e.to] = true;
                stack.push(e.to);
            }
        }
    }
    out.sort_unstable();
    out
}

fn count_paths(g: &ReductionGraph, out_edges: &[Vec<usize>]) -> u128 {
    fn go(n: NodeId, g: &ReductionGraph, out: &[Vec<usize>], memo: &mut HashMap<NodeId, u128>) -> u128 {
        if let Some(&c) = memo.get(&n) {
            return c;
        }
        let c = if out[n].is_empty() {
            1
        } else {
            out[n].iter().fold(0u128, |acc, &i| acc.saturating_add(go(g.edges[i].to, g, out, memo)))
        };
        memo.insert(n, c);
        c
    }
    go(g.root, g, out_edges, &mut HashMap::new())
}

/// A named family of predicates meant to partition the paths.
#[derive(Debug, Clone, Default)]
pub struct Classifier {
    pub classes: Vec<(String, TracePredicate)>,
}

impl Classifier {
    pub fn new(classes: Vec<(String, TracePredicate)>) -> Classifier {
        Classifier { classes }
    }

    /// Every combination of one class from each side, named `a, b`.
    pub fn product(&self, other: &Classifier) -> Classifier {
        let mut classes = Vec::new();
        for (na, pa) in &self.classes {
            for (nb, pb) in &other.classes {
                classes.push((format!("{}, {}", na, nb), TracePredicate::and(pa.clone(), pb.clone())));
            }
        }
        Classifier { classes }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MostProbable {
    /// The winning classes, in declaration order; more than one is a tie.
    pub winners: Vec<String>,
    pub probability: Rational,
    /// Every class with its probability, in declaration order.
    pub table: Vec<(String, Rational)>,
}

impl MostProbable {
    pub fn is_tie(&self) -> bool {
        self.winners.len() > 1
    }
}

/// The class of highest probability. Needs a graph without
/// nondeterministic nodes and classes whose probabilities add up to one.
pub fn most_probable(g: &ReductionGraph, classifier: &Classifier) -> Result<MostProbable, QueryError> {
    if classifier.classes.is_empty() {
        return Err(QueryError::NoClasses);
    }
    let mut table = Vec::new();
    for (name, pred) in &classifier.classes {
        let r = event_probability(g, pred)?;
        // Under nondeterminism the pessimistic bound is reported.
        table.push((name.clone(), r.lo().clone()));
    }
    let total: Rational = table.iter().map(|(_, p)| p.clone()).sum();
    if !total.is_one() {
        return Err(QueryError::NotAPartition(total.to_report_string()));
    }
    let best = table.iter().map(|(_, p)| p.clone()).fold(Rational::zero(), Rational::max);
    let winners = table.iter().filter(|(_, p)| *p == best).map(|(n, _)| n.clone()).collect();
    Ok(MostProbable { winners, probability: best, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_predicate;
    use crate::semantics::build_graph;
    use crate::syntax::parse_process;

    fn graph(s: &str) -> ReductionGraph {
        build_graph(&parse_process(s).unwrap(), 30)
    }

    #[test]
    fn sequential_choices_multiply() {
        let g = graph(
            "0.25: c!<1>; (0.5: d!<true>; 0 + 0.5: d!<false>; 0) + 0.75: c!<2>; 1: d!<true>; 0 \
             | c?(x: nat); d?(b: bool); 0",
        );
        let r = event_probability(&g, &parse_predicate("sent(d, true)").unwrap()).unwrap();
        assert_eq!(r.kind, QueryKind::Exact(Rational::new(7, 8)));
        assert_eq!(r.paths_counted, 3);
        let t = event_probability(&g, &TracePredicate::True).unwrap();
        assert_eq!(t.kind, QueryKind::Exact(Rational::one()));
    }

    #[test]
    fn nondeterminism_gives_a_range() {
        // Two receivers compete for one sender.
        let g = graph("1: c!<1>; 0 | c?(x: nat); 1: d!<1>; 0 | c?(y: nat); 0 | d?(z: nat); 0");
        let r = event_probability(&g, &parse_predicate("sent(d, 1)").unwrap()).unwrap();
        assert_eq!(r.kind, QueryKind::Range(Rational::zero(), Rational::one()));
        assert!(r.nondeterministic_nodes > 0);
    }

    #[test]
    fn rejects_cycles_and_errors() {
        let g = graph("mu X. 1: c!<1>; X | mu Y. c?(x: nat); Y");
        assert_eq!(event_probability(&g, &TracePredicate::True), Err(QueryError::Cyclic));
        let g = graph("0.5: c!<1>; 0 | c?(x: nat); 0");
        assert!(matches!(event_probability(&g, &TracePredicate::True), Err(QueryError::ErrorReachable { .. })));
    }

    #[test]
    fn most_probable_reports_ties_and_checks_partition() {
        let g = graph("0.4: c <+ a; 0 + 0.4: c <+ b; 0 + 0.2: c <+ z; 0 | c >> { a: 0, b: 0, z: 0 }");
        let cls = |n: &str| (n.to_string(), parse_predicate(&format!("label(c, {})", n)).unwrap());
        let m = most_probable(&g, &Classifier::new(vec![cls("a"), cls("b"), cls("z")])).unwrap();
        assert!(m.is_tie());
        assert_eq!(m.winners, vec!["a", "b"]);
        assert_eq!(m.probability, Rational::new(2, 5));
        let err = most_probable(&g, &Classifier::new(vec![cls("a"), cls("b")])).unwrap_err();
        assert!(matches!(err, QueryError::NotAPartition(_)));
    }
}
