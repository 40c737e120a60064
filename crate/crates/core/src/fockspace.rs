//! Truncated two-mode Fock space, the twin-Fock squeezed input state and
//! photon-number statistics.
//!
//! Basis kets `|n1, n2>` with `n1 + n2 <= truncation` are stored densely,
//! grouped by total photon number `k = n1 + n2` so that every block the
//! mode converter mixes is contiguous.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Normalization tolerance used by operations that require a unit state.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Input-state parameters: photon cap `n_total`, squeezing `r`, rotation angle `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeConfig {
    pub n_total: usize,
    pub r: f64,
    /// Radians, reduced to `[0, 2π)`.
    pub phi: f64,
}

impl SqueezeConfig {
    pub fn new(n_total: usize, r: f64, phi: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("squeezing parameter must be finite and >= 0, got {r}")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("rotation angle must be finite, got {phi}")));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(SqueezeConfig { n_total, r, phi })
    }
}

/// Number of kets with `n1 + n2 <= truncation`.
#[inline]
pub fn basis_dim(truncation: usize) -> usize {
    (truncation + 1) * (truncation + 2) / 2
}

/// Row index of `|n1, n2>`.
#[inline]
pub fn basis_index(n1: usize, n2: usize) -> usize {
    let k = n1 + n2;
    k * (k + 1) / 2 + n2
}

/// Inverse of [`basis_index`].
pub fn basis_ket(index: usize) -> (usize, usize) {
    // largest k with k(k+1)/2 <= index
    let mut k = ((((8 * index + 1) as f64).sqrt() - 1.0) / 2.0) as usize;
    while k * (k + 1) / 2 > index {
        k -= 1;
    }
    while (k + 1) * (k + 2) / 2 <= index {
        k += 1;
    }
    let n2 = index - k * (k + 1) / 2;
    (k - n2, n2)
}

/// Which computation produced a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateOrigin {
    Input,
    Oracle,
    Analytic,
    Custom,
}

/// Pure state on the truncated two-mode basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    truncation: usize,
    amplitudes: Vec<Complex64>,
    origin: StateOrigin,
}

impl TwoModeState {
    /// Wrap raw amplitudes in basis order. No normalization is applied.
    pub fn from_amplitudes(truncation: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = basis_dim(truncation);
        if amplitudes.len() != dim {
            return Err(Error::Domain(format!(
                "truncation {truncation} needs {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes".into()));
        }
        Ok(TwoModeState {
            truncation,
            amplitudes,
            origin: StateOrigin::Custom,
        })
    }

    /// Build from sparse `(n1, n2, amplitude)` entries and normalize.
    pub fn from_kets(truncation: usize, kets: &[(usize, usize, Complex64)]) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); basis_dim(truncation)];
        for &(n1, n2, a) in kets {
            if n1 + n2 > truncation {
                return Err(Error::Domain(format!(
                    "ket |{n1},{n2}> outside truncation {truncation}"
                )));
            }
            amps[basis_index(n1, n2)] += a;
        }
        TwoModeState::from_amplitudes(truncation, amps)?.normalized()
    }

    /// The Fock ket `|n1, n2>`.
    pub fn fock(truncation: usize, n1: usize, n2: usize) -> Result<Self> {
        TwoModeState::from_kets(truncation, &[(n1, n2, Complex64::new(1.0, 0.0))])
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn origin(&self) -> StateOrigin {
        self.origin
    }

    pub(crate) fn with_origin(mut self, origin: StateOrigin) -> Self {
        self.origin = origin;
        self
    }

    /// Amplitude of `|n1, n2>`; zero outside the truncation.
    pub fn amplitude(&self, n1: usize, n2: usize) -> Complex64 {
        if n1 + n2 > self.truncation {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[basis_index(n1, n2)]
        }
    }

    /// Iterate `(n1, n2, amplitude)` in basis order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.amplitudes.iter().enumerate().map(|(i, &a)| {
            let (n1, n2) = basis_ket(i);
            (n1, n2, a)
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        Ok(self)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &TwoModeState) -> Result<Complex64> {
        if self.truncation != other.truncation {
            return Err(Error::DimensionMismatch {
                expected: self.truncation,
                got: other.truncation,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_normalized(&self) -> Result<()> {
        let dev = (self.norm_sqr() - 1.0).abs();
        if dev > NORM_TOLERANCE {
            return Err(Error::NotNormalized(dev));
        }
        Ok(())
    }
}

/// Twin-Fock squeezed input: amplitudes on `|j, j>` proportional to `tanh(r)^j`,
/// `j = 0..=floor(N/2)`, normalized numerically.
pub fn make_squeezed_input(cfg: &SqueezeConfig) -> TwoModeState {
    let t = cfg.r.tanh();
    let mut amps = vec![Complex64::new(0.0, 0.0); basis_dim(cfg.n_total)];
    let mut weight = 1.0;
    for j in 0..=cfg.n_total / 2 {
        amps[basis_index(j, j)] = Complex64::new(weight, 0.0);
        weight *= t;
    }
    TwoModeState::from_amplitudes(cfg.n_total, amps)
        .and_then(TwoModeState::normalized)
        .expect("vacuum amplitude is 1, norm is positive")
        .with_origin(StateOrigin::Input)
}

/// Which mode a single-mode marginal refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// Joint photon-number probabilities and the total-number marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    truncation: usize,
    /// Basis order, see [`basis_index`].
    joint: Vec<f64>,
    marginal_total: Vec<f64>,
}

impl PhotonDistribution {
    /// Build from joint probabilities in basis order. Checks entries and the sum.
    pub fn from_joint(truncation: usize, joint: Vec<f64>) -> Result<Self> {
        if joint.len() != basis_dim(truncation) {
            return Err(Error::Domain(format!(
                "joint table has {} entries, truncation {truncation} needs {}",
                joint.len(),
                basis_dim(truncation)
            )));
        }
        if joint.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("joint distribution".into()));
        }
        if let Some(p) = joint.iter().find(|&&p| !(-1e-15..=1.0 + 1e-12).contains(&p)) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        let total: f64 = joint.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized((total - 1.0).abs()));
        }
        let mut marginal_total = vec![0.0; truncation + 1];
        for (i, &p) in joint.iter().enumerate() {
            let (n1, n2) = basis_ket(i);
            marginal_total[n1 + n2] += p;
        }
        Ok(PhotonDistribution {
            truncation,
            joint,
            marginal_total,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `P(n1, n2)`; zero outside the truncation.
    pub fn joint(&self, n1: usize, n2: usize) -> f64 {
        if n1 + n2 > self.truncation {
            0.0
        } else {
            self.joint[basis_index(n1, n2)]
        }
    }

    pub fn joint_table(&self) -> &[f64] {
        &self.joint
    }

    /// `(n1, n2, P)` in basis order.
    pub fn iter_joint(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.joint.iter().enumerate().map(|(i, &p)| {
            let (n1, n2) = basis_ket(i);
            (n1, n2, p)
        })
    }

    /// Distribution of `k = n1 + n2`.
    pub fn marginal_total(&self) -> &[f64] {
        &self.marginal_total
    }

    /// Single-mode marginal over `n` for one of the two modes.
    pub fn mode_marginal(&self, mode: Mode) -> Vec<f64> {
        let mut out = vec![0.0; self.truncation + 1];
        for (n1, n2, p) in self.iter_joint() {
            let n = match mode {
                Mode::A => n1,
                Mode::B => n2,
            };
            out[n] += p;
        }
        out
    }

    /// Probability mass on `n1 != n2`.
    pub fn off_diagonal_mass(&self) -> f64 {
        self.iter_joint()
            .filter(|(n1, n2, _)| n1 != n2)
            .map(|(_, _, p)| p)
            .sum()
    }
}

/// `P(n1, n2) = |<n1, n2|state>|^2`.
pub fn joint_distribution(state: &TwoModeState) -> Result<PhotonDistribution> {
    state.check_normalized()?;
    let joint = state.amplitudes.iter().map(|a| a.norm_sqr()).collect();
    PhotonDistribution::from_joint(state.truncation, joint)
}

/// Fraction of the state's probability on twin-Fock kets `|j, j>`.
///
/// Taken relative to the state's own norm, so a state with no off-diagonal
/// amplitude gives exactly 1 regardless of normalization rounding. The zero
/// vector gives 0.
pub fn diagonal_weight(state: &TwoModeState) -> f64 {
    let diag: f64 = (0..=state.truncation / 2)
        .map(|j| state.amplitudes[basis_index(j, j)].norm_sqr())
        .sum();
    let total = state.norm_sqr();
    if total > 0.0 {
        diag / total
    } else {
        0.0
    }
}

/// Mandel parameter `Q = Var(n)/<n> - 1` of a number distribution indexed by `n`.
pub fn mandel_q(dist: &[f64]) -> Result<f64> {
    if dist.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("number distribution".into()));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized((total - 1.0).abs()));
    }
    let (m1, m2) = dist
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(m1, m2), (n, &p)| {
            let n = n as f64;
            (m1 + n * p, m2 + n * n * p)
        });
    if m1 <= 0.0 {
        return Err(Error::Undefined(
            "Mandel Q needs a nonzero mean photon number".into(),
        ));
    }
    Ok((m2 - m1 * m1) / m1 - 1.0)
}
