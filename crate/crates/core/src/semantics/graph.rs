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

//! Finite reduction graphs, explored breadth first up to a depth bound.

use std::collections::{HashMap, VecDeque};

use super::canon::{alpha_key, canonicalize};
use super::step::{enabled_steps, StepLabel};
use crate::ast::Process;
use crate::kernel::Rational;

pub type NodeId = usize;

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub process: Process,
    pub depth: usize,
    /// Successors were not explored because of the depth bound.
    pub truncated: bool,
}

impl Node {
    pub fn is_error(&self) -> bool {
        matches!(self.process, Process::Error)
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub label: StepLabel,
}

#[derive(Debug, Clone)]
pub struct ReductionGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub root: NodeId,
    pub max_depth: usize,
}

impl ReductionGraph {
    pub fn out_edges(&self, n: NodeId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == n)
    }

    /// Outgoing edges grouped by family, in family order.
    pub fn families(&self, n: NodeId) -> Vec<Vec<&Edge>> {
        let mut groups: Vec<(usize, Vec<&Edge>)> = Vec::new();
        for e in self.out_edges(n) {
            match groups.iter_mut().find(|(f, _)| *f == e.label.family) {
                Some((_, g)) => g.push(e),
                None => groups.push((e.label.family, vec![e])),
            }
        }
        groups.sort_by_key(|(f, _)| *f);
        groups.into_iter().map(|(_, g)| g).collect()
    }

    /// Explored nodes without successors.
    pub fn is_terminal(&self, n: NodeId) -> bool {
        !self.nodes[n].truncated && self.out_edges(n).next().is_none()
    }

    /// More than one family leaves the node.
    pub fn is_nondeterministic(&self, n: NodeId) -> bool {
        self.families(n).len() > 1
    }

    pub fn has_cycle(&self) -> bool {
        // Iterative three-colour DFS.
        let n = self.nodes.len();
        let mut succ: Vec<Vec<NodeId>> = vec![vec![]; n];
        for e in &self.edges {
            succ[e.from].push(e.to);
        }
        let mut colour = vec![0u8; n];
        for start in 0..n {
            if colour[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            colour[start] = 1;
            while let Some((v, i)) = stack.pop() {
                if i < succ[v].len() {
                    stack.push((v, i + 1));
                    let w = succ[v][i];
                    match colour[w] {
                        1 => return true,
                        0 => {
                            colour[w] = 1;
                            stack.push((w, 0));
                        }
                        _ => {}
                    }
                } else {
                    colour[v] = 2;
                }
            }
        }
        false
    }

    /// Sum of probabilities of each family leaving `n`.
    pub fn family_mass(&self, n: NodeId) -> Vec<Rational> {
        self.families(n).iter().map(|g| g.iter().map(|e| e.label.probability.clone()).sum()).collect()
    }
}

/// Explores all reductions of `p` up to `max_depth` steps. Structurally
/// congruent states share a node.
pub fn build_graph(p: &Process, max_depth: usize) -> ReductionGraph {
    let root = canonicalize(p);
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut nodes = vec![Node { id: 0, process: root.clone(), depth: 0, truncated: false }];
    index.insert(alpha_key(&root), 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let steps = enabled_steps(&nodes[id].process);
        if steps.is_empty() {
            continue;
        }
        let depth = nodes[id].depth;
        if depth >= max_depth {
            nodes[id].truncated = true;
            continue;
        }
        for s in steps {
            let key = alpha_key(&s.target);
            let to = match index.get(&key) {
                Some(&t) => t,
                None => {
                    let t = nodes.len();
                    nodes.push(Node { id: t, process: s.target, depth: depth + 1, truncated: false });
                    index.insert(key, t);
                    queue.push_back(t);
                    t
                }
            };
            edges.push(Edge { from: id, to, label: s.label });
        }
    }
    ReductionGraph { nodes, edges, root: 0, max_depth }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_process;

    #[test]
    fn explores_and_shares_states() {
        let p = parse_process("0.5: c!<1>; 0 + 0.5: c!<2>; 0 | c?(x: nat); 0").unwrap();
        let g = build_graph(&p, 10);
        // Both branches reach the same inert state.
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges.len(), 2);
        assert!(g.is_terminal(1));
        assert_eq!(g.family_mass(0), vec![Rational::one()]);
    }

    #[test]
    fn depth_bound_truncates() {
        let p = parse_process("mu X. 1: c!<1>; X | mu Y. c?(x: nat); Y").unwrap();
        let g = build_graph(&p, 2);
        assert!(g.nodes.iter().any(|n| n.truncated) || g.has_cycle());
    }

    #[test]
    fn recursion_yields_cycles() {
        let p = parse_process("mu X. 1: c!<1>; X | mu Y. c?(x: nat); Y").unwrap();
        let g = build_graph(&p, 50);
        assert!(g.has_cycle());
    }
}
