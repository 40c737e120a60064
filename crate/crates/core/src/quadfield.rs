//! Quadrature-space fields on a square grid.
//!
//! Row index `i` runs along `y`, column index `j` along `x`, both ascending
//! from `-extent`. Samples are stored row-major.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fockspace::{SqueezeConfig, TwoModeState};
use crate::specfun::{laguerre_unchecked, ln_factorial, PolynomialOrder, MAX_ORDER};

pub const DEFAULT_EXTENT: f64 = 6.0;
pub const DEFAULT_RESOLUTION: usize = 512;

/// Square sampling grid spanning `[-extent, extent]` on both axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    extent: f64,
    resolution: usize,
}

impl GridSpec {
    pub fn new(extent: f64, resolution: usize) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        if resolution < 16 || !resolution.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "resolution must be even and at least 16, got {resolution}"
            )));
        }
        Ok(GridSpec { extent, resolution })
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.resolution - 1) as f64
    }

    /// Coordinate of sample `index` along either axis.
    #[inline]
    pub fn coord(&self, index: usize) -> f64 {
        -self.extent + index as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.resolution).map(|i| self.coord(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            extent: DEFAULT_EXTENT,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FockExpansion,
    LgSuperposition,
    Synthetic,
}

/// Complex samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<Complex64>,
    provenance: Provenance,
}

impl ComplexField {
    pub fn from_values(grid: GridSpec, values: Vec<Complex64>, provenance: Provenance) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a {}x{} grid",
                values.len(),
                grid.resolution,
                grid.resolution
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("field samples".into()));
        }
        Ok(ComplexField {
            grid,
            values,
            provenance,
        })
    }

    /// Sample `f(x, y)` at every grid point, rows in parallel.
    pub fn from_fn<F>(grid: GridSpec, provenance: Provenance, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let res = grid.resolution;
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        values.par_chunks_mut(res).enumerate().for_each(|(i, row)| {
            let y = grid.coord(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(grid.coord(j), y);
            }
        });
        ComplexField::from_values(grid, values, provenance)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Sample at row `i` (y) and column `j` (x).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.resolution + j]
    }

    pub fn conj(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
            provenance: self.provenance,
        }
    }

    /// Riemann sum of `|psi|^2 dx dy`.
    pub fn grid_norm_sqr(&self) -> f64 {
        let h = self.grid.spacing();
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * h * h
    }

    fn normalize_on_grid(&mut self) -> Result<()> {
        let norm = self.grid_norm_sqr().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("field vanishes on the grid".into()));
        }
        for v in &mut self.values {
            *v /= norm;
        }
        Ok(())
    }
}

/// `psi_0 .. psi_max_n` at `x` by the normalized three-term recurrence.
fn ho_table(max_n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_n + 1);
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if max_n >= 1 {
        out.push(2f64.sqrt() * x * psi0);
    }
    for n in 1..max_n {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Orthonormal oscillator eigenfunction `pi^(-1/4) H_n(x) e^(-x^2/2) / sqrt(2^n n!)`.
pub fn ho_eigenfunction(n: PolynomialOrder, x: f64) -> f64 {
    ho_table(n.get() as usize, x)[n.get() as usize]
}

/// `psi(x, y) = Σ c(n1, n2) psi_n1(x) psi_n2(y)`.
pub fn eval_fock_field(state: &TwoModeState, grid: &GridSpec) -> Result<ComplexField> {
    let t = state.truncation();
    if t > MAX_ORDER as usize {
        return Err(Error::Domain(format!(
            "truncation {t} exceeds polynomial cap {MAX_ORDER}"
        )));
    }
    let coords = grid.coords();
    let table: Vec<Vec<f64>> = coords.iter().map(|&x| ho_table(t, x)).collect();
    let kets: Vec<(usize, usize, Complex64)> = state
        .iter()
        .filter(|(_, _, a)| a.norm_sqr() > 0.0)
        .collect();

    let res = grid.resolution();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    values.par_chunks_mut(res).enumerate().for_each(|(i, row)| {
        let hy = &table[i];
        // contract the y factor first: coefficient per n1
        let mut per_n1 = vec![Complex64::new(0.0, 0.0); t + 1];
        for &(n1, n2, a) in &kets {
            per_n1[n1] += a * hy[n2];
        }
        for (j, v) in row.iter_mut().enumerate() {
            let hx = &table[j];
            *v = per_n1.iter().zip(hx).map(|(c, h)| c * h).sum();
        }
    });
    ComplexField::from_values(*grid, values, Provenance::FockExpansion)
}

/// How the upper limit `N/2` of the LG sum is read when `N` is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OddNReading {
    /// Extra half-integer `j = N/2` with gamma-function weights; its terms
    /// carry odd charges `2m + 1`, `m = 0..=floor(j)`, with radial order
    /// `floor(j) - m`.
    HalfInteger,
    /// `j = 0..=floor(N/2)` plus one charge-1 term of radial order
    /// `floor(N/2)` weighted by `A_floor(N/2)`.
    #[default]
    FloorResidual,
}

/// Radial factor of each LG term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialForm {
    /// `L_p^l(rho^2) e^(i l theta) e^(-rho^2/2)`.
    #[default]
    Bare,
    /// `rho^l L_p^l(rho^2) e^(i l theta) e^(-rho^2/2)`, the textbook LG profile.
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LgOptions {
    pub odd_n: OddNReading,
    pub radial: RadialForm,
}

/// One term `weight * L_p^charge(rho^2) e^(i charge theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgTerm {
    pub weight: f64,
    pub radial_order: u32,
    pub charge: u32,
}

fn lg_weight(t: f64, j: f64, n: f64) -> f64 {
    // tanh(r)^j sqrt(Γ(j+1) Γ(N-j+1) / 2^N); arguments are > -1 here
    let ln = 0.5 * (ln_factorial(j).unwrap() + ln_factorial(n - j).unwrap() - n * 2f64.ln());
    t.powf(j) * ln.exp()
}

/// Terms of the LG superposition with weights `A_j / cosh(r)`.
pub fn lg_terms(cfg: &SqueezeConfig, odd_n: OddNReading) -> Vec<LgTerm> {
    let n = cfg.n_total;
    let nf = n as f64;
    let t = cfg.r.tanh();
    let pre = 1.0 / cfg.r.cosh();
    let mut terms = Vec::new();
    for j in 0..=n / 2 {
        let w = pre * lg_weight(t, j as f64, nf);
        for m in 0..=j {
            terms.push(LgTerm {
                weight: w,
                radial_order: (j - m) as u32,
                charge: (2 * m) as u32,
            });
        }
    }
    if n % 2 == 1 {
        let top = n / 2;
        match odd_n {
            OddNReading::HalfInteger => {
                let w = pre * lg_weight(t, nf / 2.0, nf);
                for m in 0..=top {
                    terms.push(LgTerm {
                        weight: w,
                        radial_order: (top - m) as u32,
                        charge: (2 * m + 1) as u32,
                    });
                }
            }
            OddNReading::FloorResidual => terms.push(LgTerm {
                weight: pre * lg_weight(t, top as f64, nf),
                radial_order: top as u32,
                charge: 1,
            }),
        }
    }
    terms
}

/// Sum of LG terms on the grid, unnormalized.
pub fn eval_lg_terms(terms: &[LgTerm], grid: &GridSpec, radial: RadialForm) -> Result<ComplexField> {
    if let Some(bad) = terms.iter().find(|t| t.radial_order > MAX_ORDER || !t.weight.is_finite()) {
        return Err(Error::Domain(format!("unusable LG term {bad:?}")));
    }
    ComplexField::from_fn(*grid, Provenance::LgSuperposition, |x, y| {
        let rho2 = x * x + y * y;
        let theta = y.atan2(x);
        let envelope = (-0.5 * rho2).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for term in terms {
            let ell = f64::from(term.charge);
            let mut radial_part = term.weight * laguerre_unchecked(term.radial_order, ell, rho2);
            if radial == RadialForm::Standard && term.charge > 0 {
                radial_part *= rho2.sqrt().powi(term.charge as i32);
            }
            acc += Complex64::from_polar(radial_part, ell * theta);
        }
        acc * envelope
    })
}

/// LG superposition for `cfg`, normalized so the grid integral of `|psi|^2` is 1.
pub fn eval_lg_superposition(cfg: &SqueezeConfig, grid: &GridSpec, opts: LgOptions) -> Result<ComplexField> {
    let mut field = eval_lg_terms(&lg_terms(cfg, opts.odd_n), grid, opts.radial)?;
    field.normalize_on_grid()?;
    Ok(field)
}

/// Per-sample phase in `(-pi, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    grid: GridSpec,
    values: Vec<f64>,
    /// Indices of samples where both parts are zero; phase set to 0 there.
    zero_samples: Vec<usize>,
}

impl PhaseMap {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn zero_samples(&self) -> &[usize] {
        &self.zero_samples
    }
}

/// Principal argument mapped onto `(-pi, pi]`.
#[inline]
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

pub fn phase_map(field: &ComplexField) -> PhaseMap {
    let mut zero_samples = Vec::new();
    let values = field
        .values
        .iter()
        .enumerate()
        .map(|(idx, &z)| {
            if z.re == 0.0 && z.im == 0.0 {
                zero_samples.push(idx);
                0.0
            } else {
                principal_arg(z)
            }
        })
        .collect();
    PhaseMap {
        grid: field.grid,
        values,
        zero_samples,
    }
}

pub fn amplitude_map(field: &ComplexField) -> Vec<f64> {
    field.values.iter().map(|z| z.norm()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::make_squeezed_input;
    use crate::specfun::hermite_eval;
    use std::f64::consts::FRAC_PI_4;

    fn ord(n: u32) -> PolynomialOrder {
        PolynomialOrder::new(n).unwrap()
    }

    fn grid(extent: f64, res: usize) -> GridSpec {
        GridSpec::new(extent, res).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 64).is_err());
        assert!(GridSpec::new(-1.0, 64).is_err());
        assert!(GridSpec::new(6.0, 15).is_err());
        assert!(GridSpec::new(6.0, 33).is_err());
        let g = grid(6.0, 512);
        assert!((g.spacing() - 12.0 / 511.0).abs() < 1e-15);
        assert_eq!(g.coord(0), -6.0);
        assert!((g.coord(511) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn ho_eigenfunction_values() {
        assert!((ho_eigenfunction(ord(0), 0.0) - PI.powf(-0.25)).abs() < 1e-15);
        assert!((ho_eigenfunction(ord(0), 0.0) - 0.751126).abs() < 1e-6);
        assert_eq!(ho_eigenfunction(ord(1), 0.0), 0.0);
    }

    #[test]
    fn ho_recurrence_matches_hermite_route() {
        for n in 0..=30u32 {
            for step in -40..=40 {
                let x = f64::from(step) * 0.2;
                let norm = (-0.5 * (f64::from(n) * 2f64.ln() + ln_factorial(f64::from(n)).unwrap())).exp();
                let want = PI.powf(-0.25) * norm * hermite_eval(ord(n), x).unwrap() * (-0.5 * x * x).exp();
                let got = ho_eigenfunction(ord(n), x);
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-3), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn ho_orthogonality_by_quadrature() {
        // composite Simpson on [-8, 8]
        let steps = 4000;
        let h = 16.0 / steps as f64;
        let overlap = |a: u32, b: u32| {
            (0..=steps)
                .map(|k| {
                    let x = -8.0 + k as f64 * h;
                    let w = if k == 0 || k == steps {
                        1.0
                    } else if k % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    w * ho_eigenfunction(ord(a), x) * ho_eigenfunction(ord(b), x)
                })
                .sum::<f64>()
                * h
                / 3.0
        };
        assert!(overlap(2, 3).abs() < 1e-8);
        assert!((overlap(3, 3) - 1.0).abs() < 1e-8);
        assert!(overlap(0, 4).abs() < 1e-8);
    }

    #[test]
    fn vacuum_field_is_gaussian() {
        let g = grid(4.0, 64);
        let f = eval_fock_field(&TwoModeState::fock(2, 0, 0).unwrap(), &g).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                let (x, y) = (g.coord(j), g.coord(i));
                let want = (-0.5 * (x * x + y * y)).exp() / PI.sqrt();
                let v = f.get(i, j);
                assert!((v.re - want).abs() < 1e-14 && v.im == 0.0);
                assert!(v.re > 0.0);
            }
        }
        assert_eq!(f.provenance(), Provenance::FockExpansion);
    }

    #[test]
    fn squeezed_input_field_is_symmetric() {
        let cfg = SqueezeConfig::new(6, 0.5, FRAC_PI_4).unwrap();
        let g = grid(5.0, 48);
        let f = eval_fock_field(&make_squeezed_input(&cfg), &g).unwrap();
        for i in 0..48 {
            for j in 0..48 {
                assert!((f.get(i, j) - f.get(j, i)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn fock_field_is_linear() {
        let g = grid(5.0, 32);
        let s1 = TwoModeState::fock(4, 1, 2).unwrap();
        let s2 = TwoModeState::fock(4, 3, 0).unwrap();
        let (alpha, beta) = (Complex64::new(0.3, -0.4), Complex64::new(0.0, 0.5));
        let combo: Vec<Complex64> = s1
            .amplitudes()
            .iter()
            .zip(s2.amplitudes())
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let combo = TwoModeState::from_amplitudes(4, combo).unwrap();
        let f = eval_fock_field(&combo, &g).unwrap();
        let f1 = eval_fock_field(&s1, &g).unwrap();
        let f2 = eval_fock_field(&s2, &g).unwrap();
        for k in 0..g.len() {
            let want = alpha * f1.values()[k] + beta * f2.values()[k];
            assert!((f.values()[k] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn fock_field_parseval() {
        let cfg = SqueezeConfig::new(4, 0.5, FRAC_PI_4).unwrap();
        let f = eval_fock_field(&make_squeezed_input(&cfg), &grid(6.0, 256)).unwrap();
        assert!((f.grid_norm_sqr() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn hg_to_lg_bridge() {
        // psi_1(x) psi_0(y) + i psi_0(x) psi_1(y) = const * (x + iy) e^(-rho^2/2)
        let g = grid(4.0, 64);
        let s = TwoModeState::from_kets(
            1,
            &[(1, 0, Complex64::new(1.0, 0.0)), (0, 1, Complex64::new(0.0, 1.0))],
        )
        .unwrap();
        let hg = eval_fock_field(&s, &g).unwrap();
        let lg = ComplexField::from_fn(g, Provenance::Synthetic, |x, y| {
            Complex64::new(x, y) * (-0.5 * (x * x + y * y)).exp()
        })
        .unwrap();
        // least-squares constant
        let num: Complex64 = lg.values().iter().zip(hg.values()).map(|(l, h)| l.conj() * h).sum();
        let den: f64 = lg.values().iter().map(|l| l.norm_sqr()).sum();
        let k = num / den;
        let dev = lg
            .values()
            .iter()
            .zip(hg.values())
            .map(|(l, h)| (k * l - h).norm())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-10, "dev={dev}");
    }

    #[test]
    fn lg_vacuum_has_no_phase() {
        let cfg = SqueezeConfig::new(0, 0.02, FRAC_PI_4).unwrap();
        let f = eval_lg_superposition(&cfg, &grid(6.0, 64), LgOptions::default()).unwrap();
        assert!(f.values().iter().all(|v| v.im == 0.0 && v.re > 0.0));
        assert!((f.grid_norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lg_single_term_is_rotationally_invariant() {
        // forced j = m = 1 term: L_0^2(rho^2) e^(2 i theta)
        let term = [LgTerm {
            weight: 1.0,
            radial_order: 0,
            charge: 2,
        }];
        let res = 32;
        for radial in [RadialForm::Bare, RadialForm::Standard] {
            let f = eval_lg_terms(&term, &grid(3.0, res), radial).unwrap();
            for i in 0..res {
                for j in 0..res {
                    let a = f.get(i, j).norm();
                    // same radius, different angle
                    for (p, q) in [(j, i), (res - 1 - i, j), (i, res - 1 - j), (res - 1 - j, i)] {
                        assert!((a - f.get(p, q).norm()).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn lg_terms_weights() {
        let cfg = SqueezeConfig::new(2, 0.5, FRAC_PI_4).unwrap();
        let terms = lg_terms(&cfg, OddNReading::HalfInteger);
        // j = 0 (m = 0), j = 1 (m = 0, 1)
        assert_eq!(terms.len(), 3);
        let a0 = (2.0f64 / 4.0).sqrt() / 0.5f64.cosh();
        assert!((terms[0].weight - a0).abs() < 1e-14);
        assert_eq!((terms[2].radial_order, terms[2].charge), (0, 2));

        let odd = SqueezeConfig::new(3, 0.5, FRAC_PI_4).unwrap();
        let half = lg_terms(&odd, OddNReading::HalfInteger);
        let floor = lg_terms(&odd, OddNReading::FloorResidual);
        assert_eq!(half.len(), 3 + 2);
        assert_eq!(floor.len(), 3 + 1);
        assert!(half[3..].iter().all(|t| t.charge % 2 == 1 && t.radial_order + t.charge / 2 == 1));
        // Γ-extended weight at j = 3/2: tanh^1.5 sqrt(Γ(2.5) Γ(2.5) / 8)
        let g25: f64 = 1.329340388179137;
        let want = 0.5f64.tanh().powf(1.5) * (g25 * g25 / 8.0).sqrt() / 0.5f64.cosh();
        assert!((half[3].weight - want).abs() < 1e-12);
        assert_eq!((floor[3].radial_order, floor[3].charge), (1, 1));
    }

    #[test]
    fn phase_map_branches() {
        let g = grid(2.0, 16);
        let real = ComplexField::from_fn(g, Provenance::Synthetic, |_, _| Complex64::new(2.0, 0.0)).unwrap();
        assert!(phase_map(&real).values().iter().all(|&p| p == 0.0));

        let neg = ComplexField::from_fn(g, Provenance::Synthetic, |_, _| Complex64::new(-1.0, -0.0)).unwrap();
        assert!(phase_map(&neg).values().iter().all(|&p| p == PI));

        assert!((principal_arg(Complex64::new(1.0, 1.0)) - FRAC_PI_4).abs() < 1e-15);

        let vortex = ComplexField::from_fn(g, Provenance::Synthetic, Complex64::new).unwrap();
        let pm = phase_map(&vortex);
        assert!(pm.values().iter().all(|&p| p > -PI && p <= PI));
        assert!(pm.zero_samples().is_empty());

        let zeros = ComplexField::from_fn(g, Provenance::Synthetic, |_, _| Complex64::new(0.0, 0.0)).unwrap();
        let pm = phase_map(&zeros);
        assert_eq!(pm.zero_samples().len(), g.len());
    }

    #[test]
    fn amplitude_and_phase_reconstruct_field() {
        let cfg = SqueezeConfig::new(4, 0.7, FRAC_PI_4).unwrap();
        let f = eval_lg_superposition(&cfg, &grid(5.0, 64), LgOptions::default()).unwrap();
        let amp = amplitude_map(&f);
        let pm = phase_map(&f);
        for k in 0..f.values().len() {
            let z = Complex64::from_polar(amp[k], pm.values()[k]);
            assert!((z - f.values()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn amplitude_map_basics() {
        let g = grid(2.0, 16);
        let c = ComplexField::from_fn(g, Provenance::Synthetic, |_, _| Complex64::new(3.0, 4.0)).unwrap();
        assert!(amplitude_map(&c).iter().all(|&a| (a - 5.0).abs() < 1e-15));

        let vac = eval_fock_field(&TwoModeState::fock(0, 0, 0).unwrap(), &g).unwrap();
        let amp = amplitude_map(&vac);
        let argmax = (0..amp.len()).max_by(|&a, &b| amp[a].total_cmp(&amp[b])).unwrap();
        let (i, j) = (argmax / 16, argmax % 16);
        assert!(g.coord(i).abs() <= g.spacing() && g.coord(j).abs() <= g.spacing());

        let v = ComplexField::from_fn(g, Provenance::Synthetic, Complex64::new).unwrap();
        let amp = amplitude_map(&v);
        let argmin = (0..amp.len()).min_by(|&a, &b| amp[a].total_cmp(&amp[b])).unwrap();
        let (i, j) = (argmin / 16, argmin % 16);
        assert!(g.coord(i).abs() <= g.spacing() && g.coord(j).abs() <= g.spacing());
    }

    #[test]
    fn non_finite_samples_rejected() {
        let g = grid(2.0, 16);
        let r = ComplexField::from_fn(g, Provenance::Synthetic, |x, _| Complex64::new(1.0 / (x - x), 0.0));
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }
}
