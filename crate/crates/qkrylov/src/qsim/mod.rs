//! Semantic-level simulation of the quantum primitives: finite-precision
//! phase estimation, Grover-rotation amplitude estimation, swap tests,
//! matrix-function state preparation with postselection, and fractional
//! powers of unitaries.
//!
//! The simulation abstraction: quantum subroutines run at the spectral level
//! (exact eigendecomposition, explicit t-bit phase rounding, outcome sampling
//! from the exact distributions), never gate by gate. Randomness lives in an
//! explicitly seeded stream inside [`Sim`]; queries land in named counters.

mod estimate;
mod hhl;
mod sim;
mod state;
mod unitary;

pub use estimate::{
    amplitude_estimate, phase_estimate, probability_estimate, swap_test_inner,
    swap_test_inner_with_delta, swap_test_real_with_delta, PhaseEstimateResult, SWAP_TEST_DELTA,
};
pub use hhl::{
    apply_via_dilation, estimate_matrix_element, inner_product_via_power, matrix_function_state,
    matrix_power_state, pad_with_flag, DilatedApply,
};
pub use sim::{QueryCounters, Sim};
pub use state::{PostselectedState, QState, Register};
pub use unitary::{
    grover_rotation, phase_bits, round_eigenvalue, round_fraction, unitary_fractional_power,
    Complement, GroverRotation, UnitaryEigen,
};
