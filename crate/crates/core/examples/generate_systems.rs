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

//! Generates random global types and well-typed systems implementing them.

use probsess::syntax::{print_global, print_process};
use probsess::typing::{random_system, GenConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GenConfig { max_participants: 3, max_interactions: 3, ..GenConfig::default() };
    for i in 0..3 {
        let g = random_system(&mut rng, cfg);
        println!("// system {}\nglobal G{} = {};\n", i, i, print_global(&g.global, None));
        println!("system S{} = {};\n", i, print_process(&g.system));
    }
}
