//! Gaussian-state algebra on the fluctuation covariance.

mod covariance;
mod lyapunov;
mod negativity;
mod report;

pub use covariance::{partial_transpose, reduce, CovarianceMatrix, Mode};
pub use lyapunov::{kronecker_solve, lyapunov_residual, lyapunov_solve, solve_continuous_lyapunov};
pub use negativity::{
    log_negativity, one_vs_two_negativity, residual_contangle, symplectic_eigenvalues, ResidualContangle,
};
pub use report::{
    evaluate, full_report, measure_value, solve_point, EntanglementReport, Measure, PointSolution, PointValues,
};
