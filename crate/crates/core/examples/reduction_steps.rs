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

//! Follows one run of the two-buyer protocol, listing at each state every
//! enabled step with its rules and probability and taking the first.

use probsess::semantics::enabled_steps;
use probsess::syntax::parse_source;

fn main() {
    let text = std::fs::read_to_string(format!("{}/protocols/twobuyers.pmps", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let src = parse_source(&text).unwrap();
    let (_, mut p) = src.system(None).map(|(n, p)| (n, p.clone())).unwrap();
    for depth in 0.. {
        let steps = enabled_steps(&p);
        if steps.is_empty() {
            println!("final state after {} steps", depth);
            break;
        }
        println!("state {}:", depth);
        for s in &steps {
            let what: Vec<String> =
                s.label.actions.iter().map(|a| format!("{} on {} {}", a.rule, a.chan, a.text)).collect();
            println!("  [{}] {} p={}  {}", s.label.family, s.label.rules_text(), s.label.probability, what.join("; "));
        }
        p = steps.into_iter().next().unwrap().target;
    }
}
