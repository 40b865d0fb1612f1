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

//! Normalises a global type: definitions are inlined, single-branch
//! interactions lose their redundant interval and nested sums are flattened.

use probsess::syntax::{parse_source, print_global};
use probsess::types::simplify_global;

fn main() {
    let text = std::fs::read_to_string(format!("{}/protocols/twobuyers.pmps", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let src = parse_source(&text).unwrap();
    for (name, g) in &src.globals {
        println!("{}:\n    {}\n", name, print_global(&simplify_global(g), Some(&src.roles)));
    }
}
