//! Solution counting for translation-invariant linear equations and the
//! transference machinery built on it.

mod count;
mod cycles;
mod equation;
mod lemma;
mod level_set;
mod pipeline;

pub use count::{
    count_set_solutions, count_t, find_nontrivial_solution, for_each_solution, fourier_count, trivial_solution_value,
    trivial_solution_value_with_len, CountMethod, CountResult, SolutionCounts,
};
pub use cycles::{count_k_cycles, verify_supersaturation};
pub use lemma::{counting_chain, verify_counting_lemma, verify_telescoping, ChainBounds};
pub use level_set::{level_set_extract, level_set_extract_in};
pub use pipeline::{run_pipeline, run_transference_pipeline, PipelineParams, PipelineReport};
pub use equation::{gcd, mod_inverse, padded_modulus, EquationSpec};
