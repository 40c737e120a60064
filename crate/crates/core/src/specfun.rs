//! Special functions used by the quadrature-space field evaluators.
//!
//! Hermite polynomials follow the physicists' convention
//! `H_{n+1}(x) = 2x H_n(x) - 2n H_{n-1}(x)`. Associated Laguerre polynomials
//! use the standard three-term recurrence. Everything here is pure and
//! double precision.

use crate::error::{Error, Result};

/// Largest polynomial order accepted anywhere in the crate.
pub const MAX_ORDER: u32 = 512;

/// Degree / index of a Hermite or Laguerre polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolynomialOrder(u32);

impl PolynomialOrder {
    pub fn new(n: u32) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::Domain(format!(
                "polynomial order {n} exceeds cap {MAX_ORDER}"
            )));
        }
        Ok(PolynomialOrder(n))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<usize> for PolynomialOrder {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        let n = u32::try_from(n)
            .map_err(|_| Error::Domain(format!("polynomial order {n} exceeds cap {MAX_ORDER}")))?;
        PolynomialOrder::new(n)
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by forward recurrence.
pub fn hermite_eval(n: PolynomialOrder, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("hermite_eval at non-finite x = {x}")));
    }
    let n = n.get();
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Associated Laguerre polynomial `L_p^alpha(x)` for `x >= 0`.
pub fn laguerre_eval(p: PolynomialOrder, alpha: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "laguerre_eval requires finite x >= 0, got {x}"
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("laguerre_eval alpha = {alpha}")));
    }
    Ok(laguerre_unchecked(p.get(), alpha, x))
}

/// Recurrence without argument checks, for hot loops that validated already.
pub(crate) fn laguerre_unchecked(p: u32, alpha: f64, x: f64) -> f64 {
    if p == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..p {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `n!` as a float, by direct product. Exact through `22!`.
pub fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Natural log of the gamma function for `z > 0`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires z > 0, got {z}")));
    }
    Ok(statrs::function::gamma::ln_gamma(z))
}

/// `ln(z!)` extended to real `z > -1` through `Γ(z + 1)`.
pub fn ln_factorial(z: f64) -> Result<f64> {
    log_gamma(z + 1.0)
}
