use num_complex::Complex64;
use serde::Serialize;

use super::analytic::{analytic_joint_table, analytic_rotated_state};
use super::generator::RotationOracle;
use crate::fockspace::{joint_distribution, make_squeezed_input, SqueezeConfig};
use crate::error::Result;

/// Deviations at or below this are not listed as discrepancies.
pub const AUDIT_TOLERANCE: f64 = 1e-12;

/// One basis amplitude where the closed form and the oracle disagree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub n1: usize,
    pub n2: usize,
    pub analytic: Complex64,
    pub oracle: Complex64,
}

impl Discrepancy {
    pub fn deviation(&self) -> f64 {
        (self.analytic - self.oracle).norm()
    }
}

/// Comparison of the closed-form rotated state and joint distribution with
/// the exact unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub config: SqueezeConfig,
    pub max_amplitude_deviation: f64,
    pub max_probability_deviation: f64,
    /// Sorted by deviation, largest first.
    pub discrepancies: Vec<Discrepancy>,
    pub notes: Vec<String>,
}

/// Serialized shape of one discrepancy.
#[derive(Serialize)]
pub(crate) struct DiscrepancyDoc {
    n1: usize,
    n2: usize,
    analytic_re: f64,
    analytic_im: f64,
    oracle_re: f64,
    oracle_im: f64,
}

impl From<&Discrepancy> for DiscrepancyDoc {
    fn from(d: &Discrepancy) -> Self {
        DiscrepancyDoc {
            n1: d.n1,
            n2: d.n2,
            analytic_re: d.analytic.re,
            analytic_im: d.analytic.im,
            oracle_re: d.oracle.re,
            oracle_im: d.oracle.im,
        }
    }
}

pub fn run_audit(cfg: &SqueezeConfig) -> Result<AuditReport> {
    let input = make_squeezed_input(cfg);
    let oracle = RotationOracle::new(cfg.n_total).apply(&input, cfg.phi)?;
    let analytic = analytic_rotated_state(cfg);

    let mut max_amp = 0.0f64;
    let mut discrepancies = Vec::new();
    for ((n1, n2, a), o) in analytic.state.iter().zip(oracle.amplitudes()) {
        let d = Discrepancy {
            n1,
            n2,
            analytic: a,
            oracle: *o,
        };
        let dev = d.deviation();
        max_amp = max_amp.max(dev);
        if dev > AUDIT_TOLERANCE {
            discrepancies.push(d);
        }
    }
    discrepancies.sort_by(|x, y| y.deviation().total_cmp(&x.deviation()));

    let oracle_probs = joint_distribution(&oracle)?;
    let table = analytic_joint_table(cfg);
    let mut max_prob = 0.0f64;
    let mut worst_prob = (0, 0);
    for (n1, n2, p) in oracle_probs.iter_joint() {
        let dev = (table.get(n1, n2) - p).abs();
        if dev > max_prob {
            max_prob = dev;
            worst_prob = (n1, n2);
        }
    }

    let overlap = analytic.state.inner(&oracle)?;
    let mut notes = vec![
        format!(
            "oracle: U(phi) = exp(i phi (a†b + ab†)) by block eigendecomposition, phi = {}",
            cfg.phi
        ),
        "closed form uses C^{Nj}_{lk} with the (l, k) index order; B_{k,l} = (2 i phi)^(l+k) taken as exact"
            .to_string(),
        format!(
            "state expansion: {} terms evaluated, {} skipped for negative factorial arguments",
            analytic.evaluated_terms, analytic.skipped_terms
        ),
        format!(
            "joint distribution: {} terms evaluated, {} skipped",
            table.evaluated_terms, table.skipped_terms
        ),
        format!(
            "phase-insensitive fidelity |<analytic|oracle>|^2 = {:.6e}",
            overlap.norm_sqr()
        ),
        format!(
            "{} amplitudes differ by more than {AUDIT_TOLERANCE:e}",
            discrepancies.len()
        ),
    ];
    if max_prob > AUDIT_TOLERANCE {
        notes.push(format!(
            "largest probability deviation at (n1, n2) = ({}, {})",
            worst_prob.0, worst_prob.1
        ));
    }

    Ok(AuditReport {
        config: *cfg,
        max_amplitude_deviation: max_amp,
        max_probability_deviation: max_prob,
        discrepancies,
        notes,
    })
}
