//! Truncated Fock-space linear algebra: mode operators, states, the loss
//! channel and the partial-transpose witness.

mod loss;
mod operator;
mod state;
mod system;
mod witness;

pub use loss::apply_loss;
pub use operator::{
    amplitude, amplitude_observables, annihilation, creation, interior_projector, lowering_matrix, number,
    quadrature_square_sum, AmplitudeObservables, CMatrix, Operator, SingleModeObservables,
};
pub use state::{
    expectation, pure_state, tmsv_state, tmsv_state_with_tolerance, QuantumState, HERMITICITY_TOLERANCE,
    POSITIVITY_TOLERANCE, TAIL_TOLERANCE, TRACE_TOLERANCE,
};
pub use system::{make_mode_system, ModeSystem};
pub use witness::{partial_transpose, partial_transpose_matrix, partial_transpose_min_eig};
