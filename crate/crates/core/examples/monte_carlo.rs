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

//! Estimates a trace probability by sampling runs and compares the
//! estimate with the exact value.

use probsess::query::{event_probability, monte_carlo, parse_predicate, McOptions};
use probsess::semantics::build_graph;
use probsess::syntax::parse_source;

fn main() {
    let text = std::fs::read_to_string(format!("{}/protocols/twobuyers.pmps", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let src = parse_source(&text).unwrap();
    let (_, p) = src.system(None).unwrap();
    let pred = parse_predicate("sent(as, \"The Art of War\") | sent(as, 0195014766) & chose(ab, quote/3)").unwrap();
    let exact = event_probability(&build_graph(p, 20), &pred).unwrap();
    println!("exact: {}", exact);
    for runs in [100, 1_000, 10_000, 100_000] {
        let r = monte_carlo(p, &pred, McOptions { runs, seed: 42, ..McOptions::default() });
        println!("{:>7} runs: {:.4} ± {:.4}", runs, r.estimate, r.stderr);
    }
}
