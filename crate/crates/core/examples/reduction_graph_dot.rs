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

//! Builds the full reduction graph of the two-buyer protocol and writes it
//! in DOT format, to the file given as argument or to standard output.

use probsess::semantics::{build_graph, to_dot};
use probsess::syntax::parse_source;

fn main() {
    let text = std::fs::read_to_string(format!("{}/protocols/twobuyers.pmps", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let src = parse_source(&text).unwrap();
    let (_, p) = src.system(None).unwrap();
    let g = build_graph(p, 40);
    eprintln!(
        "{} states, {} edges, {} final",
        g.nodes.len(),
        g.edges.len(),
        g.nodes.iter().filter(|n| g.is_terminal(n.id)).count()
    );
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(path, to_dot(&g)).unwrap(),
        None => print!("{}", to_dot(&g)),
    }
}
