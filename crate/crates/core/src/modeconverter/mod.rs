//! The quadrature rotation `U(phi) = exp(i phi (a†b + ab†))`.
//!
//! Two routes live here: the exact unitary on the truncated basis (the
//! oracle) and the closed-form binomial coefficient formulas. [`run_audit`]
//! measures how far apart they are; it never forces agreement.

mod analytic;
mod audit;
mod generator;

pub use analytic::{
    analytic_joint_table, analytic_rotated_state, joint_prob_analytic, AnalyticCoefficients,
    AnalyticJointTable, AnalyticState,
};
pub use audit::{run_audit, AuditReport, Discrepancy, AUDIT_TOLERANCE};
pub(crate) use audit::DiscrepancyDoc;
pub use generator::{apply_rotation, build_generator, rotation_unitary, GeneratorMatrix, RotationOracle};
