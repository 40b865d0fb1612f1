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

//! Runs the metatheory harnesses on the two-buyer protocol and on random
//! well-typed systems, and shows a perturbed system failing them.

use probsess::syntax::{parse_source, print_global};
use probsess::typing::{
    check_equiv_preservation, check_error_freedom, check_subject_reduction, gamma_of, perturb, random_system,
    typecheck, GenConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let text = std::fs::read_to_string(format!("{}/protocols/twobuyers.pmps", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let src = parse_source(&text).unwrap();
    let (_, p) = src.system(None).unwrap();
    let gamma = gamma_of(&src.env);
    println!("{}", check_subject_reduction(&gamma, p, 20));
    println!("{}", check_error_freedom(p, 20));
    println!("{}", check_equiv_preservation(&gamma, p));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let g = random_system(&mut rng, GenConfig::default());
        let gamma = gamma_of(&[(g.shared.clone(), g.global.clone())]);
        println!("\nglobal type: {}", print_global(&g.global, None));
        println!("  {}", check_subject_reduction(&gamma, &g.system, 12));
        println!("  {}", check_error_freedom(&g.system, 12));
        if let Some(bad) = perturb(&g.system) {
            let verdict = typecheck(&gamma, &bad).err().map_or("accepted".to_string(), |e| e.kind.name().to_string());
            println!("  perturbed: type checker says {}; {}", verdict, check_error_freedom(&bad, 12));
        }
    }
}
