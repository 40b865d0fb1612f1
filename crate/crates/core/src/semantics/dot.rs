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

//! Graphviz output for reduction graphs.

use super::graph::ReductionGraph;
use crate::syntax::print_process;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

/// DOT rendering. Edges carry the rules and the exact probability.
pub fn to_dot(g: &ReductionGraph) -> String {
    let mut out = String::from("digraph reductions {\n  node [shape=box, fontname=\"monospace\"];\n");
    for n in &g.nodes {
        let mut attrs = format!("label=\"{}\"", escape(&print_process(&n.process)));
        if n.is_error() {
            attrs.push_str(", color=red");
        } else if n.truncated {
            attrs.push_str(", style=dashed");
        } else if g.is_terminal(n.id) {
            attrs.push_str(", peripheries=2");
        }
        if n.id == g.root {
            attrs.push_str(", penwidth=2");
        }
        out.push_str(&format!("  n{} [{}];\n", n.id, attrs));
    }
    for e in &g.edges {
        out.push_str(&format!(
            "  n{} -> n{} [label=\"{} p={}\"];\n",
            e.from,
            e.to,
            e.label.rules_text(),
            e.label.probability.to_fraction_string()
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::build_graph;
    use crate::syntax::parse_process;

    #[test]
    fn renders_nodes_and_edges() {
        let p = parse_process("0.25: c!<1>; 0 + 0.75: c!<true>; 0 | c?(x: nat); 0 + c?(b: bool); 0").unwrap();
        let dot = to_dot(&build_graph(&p, 5));
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("Com p=1/4"));
        assert!(dot.contains("Com p=3/4"));
    }
}
