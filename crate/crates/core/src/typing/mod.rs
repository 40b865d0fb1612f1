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

//! The type system: session environment synthesis, conformance to
//! projections, reduction of environments, and executable metatheory.

pub mod check;
pub mod conform;
pub mod env;
pub mod gen;
pub mod meta;
pub mod reduce;

pub use check::{gamma_of, typecheck, typecheck_open, Typing};
pub use conform::{conforms, envs_equiv, types_equiv, Mismatch};
pub use env::{SessionEnv, SortEnv, TypeError, TypeErrorKind, Vector};
pub use gen::{perturb, random_global, random_system, GenConfig, Generated};
pub use meta::{
    check_equiv_preservation, check_error_freedom, check_subject_reduction, check_substitution_weakening, derivable,
    equiv_rewrites, open_state, Counterexample, Report,
};
pub use reduce::{type_reduce, TypeStep};
