//! Strip linear programs, their exact optima and their dual certificates.

pub mod certificate;
pub mod gamma;
pub mod program;
pub mod simplex;

pub use certificate::{
    dual_matrix, gamma_upper_bound, perturbed_dual_matrix, perturbed_value, DualCertificate,
};
pub use gamma::{
    gamma, gamma_value, gamma_with, primal_witness_small, relaxed_optimum, GammaCache,
    GammaOptions, GammaValue, SolverDual, DEFAULT_LP_BUDGET,
};
pub use program::{LpForm, LpInstance, PrimalPoint};
pub use simplex::{LpSolution, PairLp, PivotRule, Row, SolveMethod};
