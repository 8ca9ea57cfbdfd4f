//! Extremal witness values: classical binary-matrix maxima, closed-form
//! quantum optima, and a simulated-annealing search.

mod anneal;
mod classical;
mod closed_form;

pub use anneal::{anneal_quantum_max, AnnealConfig};
pub use classical::{
    classical_max_det, table_matrix, verify_table_matrix, BinaryMatrix, MAX_DET_BINARY,
};
pub use closed_form::{
    closed_form_config, evaluate_config, known_quantum_max, n5d3_complex_symbolic,
    n5d3_real_symbolic, verify_n5d4_probability_pattern, ClosedFormCase, Field, QuantumConfig,
};
