use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::{basis_dim, basis_index, basis_ket, StateOrigin, TwoModeState};

/// Matrix of `a†b + ab†` on the kets with `n1 + n2 <= truncation`.
///
/// Every entry is real, so the matrix is stored as `f64` and is symmetric.
/// It never couples different total photon numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    truncation: usize,
    entries: DMatrix<f64>,
}

impl GeneratorMatrix {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `<n1', n2'| G |n1, n2>`.
    pub fn element(&self, bra: (usize, usize), ket: (usize, usize)) -> f64 {
        if bra.0 + bra.1 > self.truncation || ket.0 + ket.1 > self.truncation {
            return 0.0;
        }
        self.entries[(basis_index(bra.0, bra.1), basis_index(ket.0, ket.1))]
    }

    /// Row/column index of a ket.
    pub fn index_of(&self, n1: usize, n2: usize) -> Option<usize> {
        (n1 + n2 <= self.truncation).then(|| basis_index(n1, n2))
    }

    /// Ket at a row/column index.
    pub fn ket_at(&self, index: usize) -> Option<(usize, usize)> {
        (index < self.dim()).then(|| basis_ket(index))
    }

    /// Sub-matrix on total photon number `k`, indexed by `n2 = 0..=k`.
    pub fn block(&self, k: usize) -> DMatrix<f64> {
        let offset = k * (k + 1) / 2;
        self.entries.view((offset, offset), (k + 1, k + 1)).into_owned()
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.entries.map(|v| Complex64::new(v, 0.0))
    }
}

pub fn build_generator(truncation: usize) -> GeneratorMatrix {
    let dim = basis_dim(truncation);
    let mut entries = DMatrix::zeros(dim, dim);
    for k in 1..=truncation {
        for n1 in 1..=k {
            let n2 = k - n1;
            // a b† |n1, n2> = sqrt(n1 (n2 + 1)) |n1 - 1, n2 + 1>
            let v = ((n1 * (n2 + 1)) as f64).sqrt();
            let from = basis_index(n1, n2);
            let to = basis_index(n1 - 1, n2 + 1);
            entries[(to, from)] = v;
            entries[(from, to)] = v;
        }
    }
    GeneratorMatrix {
        truncation,
        entries,
    }
}

/// Eigendecomposition of each total-number block of the generator.
///
/// Evaluating `U(phi) = exp(i phi G)` is then a diagonal phase sandwich per
/// block, with no series truncation.
#[derive(Debug, Clone)]
pub struct RotationOracle {
    truncation: usize,
    blocks: Vec<SymmetricEigen<f64, nalgebra::Dyn>>,
}

impl RotationOracle {
    pub fn new(truncation: usize) -> Self {
        let generator = build_generator(truncation);
        let blocks = (0..=truncation)
            .map(|k| SymmetricEigen::new(generator.block(k)))
            .collect();
        RotationOracle { truncation, blocks }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Eigenvalues of the block with total photon number `k`, ascending.
    pub fn block_eigenvalues(&self, k: usize) -> Vec<f64> {
        let mut ev: Vec<f64> = self.blocks[k].eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `exp(i phi G)` restricted to block `k`.
    pub fn block_unitary(&self, k: usize, phi: f64) -> DMatrix<Complex64> {
        let eig = &self.blocks[k];
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let phases = DMatrix::from_diagonal(
            &eig.eigenvalues
                .map(|lambda| Complex64::from_polar(1.0, phi * lambda)),
        );
        &v * phases * v.transpose()
    }

    /// Dense `exp(i phi G)` on the full truncated basis.
    pub fn unitary(&self, phi: f64) -> DMatrix<Complex64> {
        let dim = basis_dim(self.truncation);
        let mut u = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for k in 0..=self.truncation {
            let offset = k * (k + 1) / 2;
            u.view_mut((offset, offset), (k + 1, k + 1))
                .copy_from(&self.block_unitary(k, phi));
        }
        u
    }

    /// `U(phi) |state>`, block by block.
    pub fn apply(&self, state: &TwoModeState, phi: f64) -> Result<TwoModeState> {
        if state.truncation() != self.truncation {
            return Err(Error::DimensionMismatch {
                expected: self.truncation,
                got: state.truncation(),
            });
        }
        let amps = state.amplitudes();
        let mut out = Vec::with_capacity(amps.len());
        for k in 0..=self.truncation {
            let offset = k * (k + 1) / 2;
            let block = nalgebra::DVector::from_column_slice(&amps[offset..offset + k + 1]);
            out.extend((self.block_unitary(k, phi) * block).iter().copied());
        }
        Ok(TwoModeState::from_amplitudes(self.truncation, out)?.with_origin(StateOrigin::Oracle))
    }
}

/// Dense `U(phi) = exp(i phi (a†b + ab†))` for the given truncation.
pub fn rotation_unitary(phi: f64, truncation: usize) -> DMatrix<Complex64> {
    RotationOracle::new(truncation).unitary(phi)
}

/// Rotate a state by `phi` with the exact oracle for its own truncation.
pub fn apply_rotation(state: &TwoModeState, phi: f64) -> Result<TwoModeState> {
    RotationOracle::new(state.truncation()).apply(state, phi)
}
