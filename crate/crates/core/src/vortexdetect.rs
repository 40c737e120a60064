//! Phase-singularity detection by discrete winding numbers.
//!
//! A plaquette is the 2x2 block of samples `(i, j)..(i + 1, j + 1)`. Its
//! winding is the sum of principal-value phase steps around the loop,
//! counter-clockwise in the `(x, y)` plane, divided by `2 pi`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::ComplexField;

pub const DEFAULT_AMPLITUDE_FLOOR: f64 = 1e-3;
/// In grid spacings.
pub const DEFAULT_MERGE_RADIUS: f64 = 3.0;
pub const MIN_RESOLUTION: usize = 32;

/// Phase steps this close to `pi` have no reliable principal value.
const AMBIGUOUS_STEP: f64 = PI - 1e-9;
/// How many extra rings a cluster loop may grow to dodge zeros or ambiguous steps.
const MAX_LOOP_GROWTH: usize = 4;

/// Outcome of a winding sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winding {
    Charge(i32),
    /// A loop sample is exactly zero, so its phase is undefined.
    Indeterminate,
}

impl Winding {
    pub fn charge(self) -> Option<i32> {
        match self {
            Winding::Charge(c) => Some(c),
            Winding::Indeterminate => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionParams {
    pub amplitude_floor: f64,
    pub merge_radius: f64,
}

impl DetectionParams {
    pub fn new(amplitude_floor: f64, merge_radius: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&amplitude_floor) {
            return Err(Error::Domain(format!(
                "amplitude floor must lie in [0, 1], got {amplitude_floor}"
            )));
        }
        if !(merge_radius >= 0.0) || !merge_radius.is_finite() {
            return Err(Error::Domain(format!(
                "merge radius must be finite and >= 0, got {merge_radius}"
            )));
        }
        Ok(DetectionParams {
            amplitude_floor,
            merge_radius,
        })
    }
}

impl Default for DetectionParams {
    fn default() -> Self {
        DetectionParams {
            amplitude_floor: DEFAULT_AMPLITUDE_FLOOR,
            merge_radius: DEFAULT_MERGE_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vortex {
    pub x: f64,
    pub y: f64,
    pub charge: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VortexReport {
    pub params: DetectionParams,
    pub count: usize,
    pub total_charge: i32,
    pub vortices: Vec<Vortex>,
}

impl VortexReport {
    pub fn new(params: DetectionParams, vortices: Vec<Vortex>) -> Self {
        VortexReport {
            params,
            count: vortices.len(),
            total_charge: vortices.iter().map(|v| v.charge).sum(),
            vortices,
        }
    }
}

/// Phase step from `a` to `b` in `(-pi, pi]`.
#[inline]
fn phase_step(a: Complex64, b: Complex64) -> f64 {
    let d = crate::quadfield::principal_arg(b * a.conj());
    if d <= -PI {
        PI
    } else {
        d
    }
}

struct LoopSum {
    winding: Winding,
    ambiguous: bool,
}

fn loop_sum(samples: impl Iterator<Item = Complex64>) -> LoopSum {
    let pts: Vec<Complex64> = samples.collect();
    if pts.iter().any(|z| z.re == 0.0 && z.im == 0.0) {
        return LoopSum {
            winding: Winding::Indeterminate,
            ambiguous: false,
        };
    }
    let mut total = 0.0;
    let mut ambiguous = false;
    for k in 0..pts.len() {
        let step = phase_step(pts[k], pts[(k + 1) % pts.len()]);
        ambiguous |= step.abs() >= AMBIGUOUS_STEP;
        total += step;
    }
    LoopSum {
        winding: Winding::Charge((total / TAU).round() as i32),
        ambiguous,
    }
}

/// Samples on the boundary of the rectangle with sample corners
/// `(i0, j0)` and `(i1, j1)`, counter-clockwise starting at `(i0, j0)`.
fn rectangle_loop(field: &ComplexField, i0: usize, j0: usize, i1: usize, j1: usize) -> impl Iterator<Item = Complex64> + '_ {
    let bottom = (j0..j1).map(move |j| field.get(i0, j));
    let right = (i0..i1).map(move |i| field.get(i, j1));
    let top = (j0 + 1..=j1).rev().map(move |j| field.get(i1, j));
    let left = (i0 + 1..=i1).rev().map(move |i| field.get(i, j0));
    bottom.chain(right).chain(top).chain(left)
}

/// Winding of the unit cell whose lower-left sample is `(i, j)`.
pub fn plaquette_winding(field: &ComplexField, i: usize, j: usize) -> Result<Winding> {
    let res = field.grid().resolution();
    if i + 1 >= res || j + 1 >= res {
        return Err(Error::Domain(format!(
            "plaquette ({i}, {j}) does not fit in a {res}x{res} grid"
        )));
    }
    Ok(loop_sum(rectangle_loop(field, i, j, i + 1, j + 1)).winding)
}

/// Winding around the boundary of the sample rectangle `(i0, j0)..(i1, j1)`.
pub fn loop_winding(field: &ComplexField, i0: usize, j0: usize, i1: usize, j1: usize) -> Result<Winding> {
    let res = field.grid().resolution();
    if i0 >= i1 || j0 >= j1 || i1 >= res || j1 >= res {
        return Err(Error::Domain(format!(
            "loop ({i0}, {j0})..({i1}, {j1}) is not a rectangle inside the {res}x{res} grid"
        )));
    }
    Ok(loop_sum(rectangle_loop(field, i0, j0, i1, j1)).winding)
}

/// Cell-index box `[i0, i1] x [j0, j1]` (inclusive) grown by `ring` cells,
/// clamped to the grid, and its winding.
fn box_winding(field: &ComplexField, cells: (usize, usize, usize, usize), ring: usize) -> LoopSum {
    let last = field.grid().resolution() - 1;
    let (ci0, cj0, ci1, cj1) = cells;
    let i0 = ci0.saturating_sub(ring);
    let j0 = cj0.saturating_sub(ring);
    let i1 = (ci1 + 1 + ring).min(last);
    let j1 = (cj1 + 1 + ring).min(last);
    loop_sum(rectangle_loop(field, i0, j0, i1, j1))
}

impl LoopSum {
    fn resolved(&self) -> Option<i32> {
        match self.winding {
            Winding::Charge(c) if !self.ambiguous => Some(c),
            _ => None,
        }
    }
}

/// Winding of a cell box, growing the loop outward from ring `first` past
/// zeros and ambiguous steps. `None` when no loop resolves, as on the
/// nodal lines of a real field.
fn robust_box_winding(field: &ComplexField, cells: (usize, usize, usize, usize), first: usize) -> Option<i32> {
    (first..=MAX_LOOP_GROWTH).find_map(|ring| box_winding(field, cells, ring).resolved())
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    i: usize,
    j: usize,
    /// Weight for the centroid.
    weight: f64,
}

fn find_root(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// Scan every plaquette, gate by amplitude, cluster and charge-classify.
///
/// A cell is a candidate when its winding is nonzero. A cell that cannot be
/// evaluated directly (zero sample or a step of exactly `pi`) takes the
/// winding of the first resolvable loop one or more rings outward. Candidates whose neighbourhood amplitude is
/// below `amplitude_floor * max|psi|` are dropped unless they lie inside
/// the central disk `rho <= extent / 2`. Candidates within `merge_radius`
/// grid spacings of each other form one vortex; its charge is the winding
/// of the loop around the cluster's bounding box.
pub fn detect_vortices(field: &ComplexField, params: &DetectionParams) -> Result<VortexReport> {
    let grid = *field.grid();
    let res = grid.resolution();
    if res < MIN_RESOLUTION {
        return Err(Error::Undersampled(res));
    }
    let global_max = field.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = params.amplitude_floor * global_max;
    let central = grid.extent() / 2.0;
    let h = grid.spacing();

    let candidates: Vec<Candidate> = (0..res - 1)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..res - 1).filter_map(move |j| {
                let neighbourhood = [field.get(i, j), field.get(i, j + 1), field.get(i + 1, j), field.get(i + 1, j + 1)]
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                let (xc, yc) = (grid.coord(j) + 0.5 * h, grid.coord(i) + 0.5 * h);
                if neighbourhood < threshold && xc.hypot(yc) > central {
                    return None;
                }
                let winding = loop_sum(rectangle_loop(field, i, j, i + 1, j + 1))
                    .resolved()
                    .or_else(|| robust_box_winding(field, (i, j, i, j), 1))?;
                (winding != 0).then_some(Candidate {
                    i,
                    j,
                    weight: f64::from(winding.unsigned_abs()),
                })
            })
        })
        .collect();

    // single-linkage clustering in index space
    let mut parent: Vec<usize> = (0..candidates.len()).collect();
    let r2 = params.merge_radius * params.merge_radius;
    for a in 0..candidates.len() {
        for b in a + 1..candidates.len() {
            let di = candidates[a].i as f64 - candidates[b].i as f64;
            let dj = candidates[a].j as f64 - candidates[b].j as f64;
            if di * di + dj * dj <= r2 {
                let (ra, rb) = (find_root(&mut parent, a), find_root(&mut parent, b));
                if ra != rb {
                    parent[rb] = ra;
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; candidates.len()];
    for a in 0..candidates.len() {
        let root = find_root(&mut parent, a);
        if slot[root] == usize::MAX {
            slot[root] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[root]].push(a);
    }

    let mut vortices = Vec::with_capacity(clusters.len());
    for members in clusters {
        let cells: Vec<Candidate> = members.iter().map(|&m| candidates[m]).collect();
        let bbox = cells.iter().fold((usize::MAX, usize::MAX, 0, 0), |(i0, j0, i1, j1), c| {
            (i0.min(c.i), j0.min(c.j), i1.max(c.i), j1.max(c.j))
        });
        let charge = robust_box_winding(field, bbox, 0).unwrap_or_else(|| {
            // fall back to summing resolvable cell windings
            cells
                .iter()
                .filter_map(|c| loop_sum(rectangle_loop(field, c.i, c.j, c.i + 1, c.j + 1)).resolved())
                .sum()
        });
        if charge == 0 {
            continue;
        }
        let wsum: f64 = cells.iter().map(|c| c.weight).sum();
        let x = cells.iter().map(|c| c.weight * (grid.coord(c.j) + 0.5 * h)).sum::<f64>() / wsum;
        let y = cells.iter().map(|c| c.weight * (grid.coord(c.i) + 0.5 * h)).sum::<f64>() / wsum;
        vortices.push(Vortex { x, y, charge });
    }
    // deterministic order: by row, then column
    vortices.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    Ok(VortexReport::new(*params, vortices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::TwoModeState;
    use crate::quadfield::{eval_fock_field, GridSpec, Provenance};

    fn synthetic<F: Fn(f64, f64) -> Complex64 + Sync>(extent: f64, res: usize, f: F) -> ComplexField {
        ComplexField::from_fn(GridSpec::new(extent, res).unwrap(), Provenance::Synthetic, f).unwrap()
    }

    fn gaussian(x: f64, y: f64) -> f64 {
        (-0.5 * (x * x + y * y)).exp()
    }

    #[test]
    fn vacuum_has_no_winding() {
        let g = GridSpec::new(6.0, 64).unwrap();
        let f = eval_fock_field(&TwoModeState::fock(0, 0, 0).unwrap(), &g).unwrap();
        for i in 0..63 {
            for j in 0..63 {
                assert_eq!(plaquette_winding(&f, i, j).unwrap(), Winding::Charge(0));
            }
        }
        assert_eq!(detect_vortices(&f, &DetectionParams::default()).unwrap().count, 0);
    }

    #[test]
    fn single_cell_at_origin() {
        let f = synthetic(2.0, 32, Complex64::new);
        assert_eq!(plaquette_winding(&f, 15, 15).unwrap(), Winding::Charge(1));
        assert_eq!(plaquette_winding(&f, 3, 20).unwrap(), Winding::Charge(0));
        assert!(plaquette_winding(&f, 31, 0).is_err());
    }

    #[test]
    fn double_charge_on_enclosing_loop() {
        let f = synthetic(2.0, 32, |x, y| Complex64::new(x, -y).powu(2));
        assert_eq!(loop_winding(&f, 14, 14, 17, 17).unwrap(), Winding::Charge(-2));
        let report = detect_vortices(&f, &DetectionParams::default()).unwrap();
        assert_eq!(report.count, 1);
        assert_eq!(report.total_charge, -2);
    }

    #[test]
    fn zero_sample_is_indeterminate() {
        // odd coordinate count is not allowed, so put the zero on a sample directly
        let g = GridSpec::new(2.0, 32).unwrap();
        let x0 = g.coord(10);
        let y0 = g.coord(12);
        let f = synthetic(2.0, 32, move |x, y| Complex64::new(x - x0, y - y0));
        assert_eq!(f.get(12, 10), Complex64::new(0.0, 0.0));
        assert_eq!(plaquette_winding(&f, 12, 10).unwrap(), Winding::Indeterminate);
        let report = detect_vortices(&f, &DetectionParams::default()).unwrap();
        assert_eq!(report.count, 1);
        assert_eq!(report.total_charge, 1);
        assert!((report.vortices[0].x - x0).abs() <= g.spacing());
        assert!((report.vortices[0].y - y0).abs() <= g.spacing());
    }

    #[test]
    fn real_fields_have_no_vortices() {
        // sign changes give steps of exactly pi, which carry no winding
        let p = DetectionParams::default();
        let ring = synthetic(6.0, 64, |x, y| Complex64::new((x * x + y * y - 1.0) * gaussian(x, y), 0.0));
        assert_eq!(detect_vortices(&ring, &p).unwrap().count, 0);
        let cross = synthetic(6.0, 64, |x, y| Complex64::new(x * y * gaussian(x, y), 0.0));
        assert_eq!(detect_vortices(&cross, &p).unwrap().count, 0);
    }

    #[test]
    fn refuses_coarse_grids() {
        let f = synthetic(2.0, 16, Complex64::new);
        assert!(matches!(
            detect_vortices(&f, &DetectionParams::default()),
            Err(Error::Undersampled(16))
        ));
    }

    #[test]
    fn params_validation() {
        assert!(DetectionParams::new(-0.1, 3.0).is_err());
        assert!(DetectionParams::new(1.1, 3.0).is_err());
        assert!(DetectionParams::new(0.5, -1.0).is_err());
        assert!(DetectionParams::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn three_displaced_charges() {
        let centres = [(-1.5, -0.7), (1.2, 0.4), (0.1, 1.9)];
        let f = synthetic(6.0, 256, move |x, y| {
            centres
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &(cx, cy)| acc * Complex64::new(x - cx, y - cy))
                * gaussian(x, y)
        });
        let report = detect_vortices(&f, &DetectionParams::default()).unwrap();
        assert_eq!(report.count, 3);
        assert_eq!(report.total_charge, 3);
        let h = f.grid().spacing();
        for &(cx, cy) in &centres {
            assert!(report
                .vortices
                .iter()
                .any(|v| (v.x - cx).abs() <= h && (v.y - cy).abs() <= h && v.charge == 1));
        }
    }

    #[test]
    fn mixed_signs_and_large_loop_additivity() {
        // two +1 and one -1
        let f = synthetic(6.0, 128, |x, y| {
            Complex64::new(x - 1.0, y) * Complex64::new(x + 1.0, y - 1.0) * Complex64::new(x, -(y + 1.5)) * gaussian(x, y)
        });
        let report = detect_vortices(&f, &DetectionParams::default()).unwrap();
        assert_eq!(report.count, 3);
        assert_eq!(report.total_charge, 1);
        assert_eq!(loop_winding(&f, 20, 20, 107, 107).unwrap(), Winding::Charge(report.total_charge));
    }

    #[test]
    fn conjugation_flips_charges() {
        let f = synthetic(6.0, 128, |x, y| {
            Complex64::new(x - 1.0, y) * Complex64::new(x + 1.0, y - 1.0).powu(2) * gaussian(x, y)
        });
        let p = DetectionParams::default();
        let a = detect_vortices(&f, &p).unwrap();
        let b = detect_vortices(&f.conj(), &p).unwrap();
        assert_eq!(a.count, b.count);
        for (u, v) in a.vortices.iter().zip(&b.vortices) {
            assert_eq!(u.charge, -v.charge);
            assert_eq!((u.x, u.y), (v.x, v.y));
        }
    }

    #[test]
    fn floor_gates_far_tail_candidates() {
        // a vortex far out in the Gaussian tail, outside the central disk
        let f = synthetic(6.0, 128, |x, y| Complex64::new(x - 5.0, y - 4.0) * gaussian(x, y));
        let gated = detect_vortices(&f, &DetectionParams::default()).unwrap();
        assert_eq!(gated.count, 0);
        let open = detect_vortices(&f, &DetectionParams::new(0.0, 3.0).unwrap()).unwrap();
        assert_eq!(open.count, 1);
    }
}
