//! Controlled cyclic-shift circuits with a tunable ancilla/depth trade-off,
//! their exact and noisy simulation, and the shot-based estimators built on
//! them: multivariate traces `Tr(ρ₁⋯ρ_m)` and virtually distilled
//! expectation values `Tr(Oρ^m) / Tr(ρ^m)`.

pub mod ansatz;
pub mod circuit;
pub mod estimators;
pub(crate) mod kernel;
pub mod oracle;
pub mod qstate;
pub mod schedule;
pub mod simulator;
