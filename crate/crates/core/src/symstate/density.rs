use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PureState;
use crate::error::{Error, Result};

/// Hermitian, unit-trace operator on `n` qubits (`n = 0` is the 1x1 scalar case).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Normalizes `m` to unit trace after checking that it is Hermitian.
    pub fn from_matrix(n: usize, m: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::domain(format!("{n}-qubit density matrix must be {dim}x{dim}")));
        }
        let scale = m.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
        let herm_dev = (&m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if herm_dev > 1e-9 * scale {
            return Err(Error::domain("density matrix is not Hermitian"));
        }
        let tr = m.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::Degenerate("density matrix has non-positive trace".into()));
        }
        let mut m = (&m + m.adjoint()) * Complex64::new(0.5 / tr, 0.0);
        for i in 0..dim {
            m[(i, i)].im = 0.0;
        }
        Ok(Self { n, m })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = DMatrix::from_column_slice(psi.amplitudes().len(), 1, psi.amplitudes());
        Self { n: psi.n_qubits(), m: &v * v.adjoint() }
    }

    /// `p |target><target| + (1 - p) 1/2^n`.
    pub fn depolarized(target: &PureState, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("mixing weight must lie in [0,1]"));
        }
        let dim = target.amplitudes().len();
        let pure = Self::from_pure(target).m;
        let m = pure * Complex64::new(p, 0.0) + DMatrix::identity(dim, dim) * Complex64::new((1.0 - p) / dim as f64, 0.0);
        Ok(Self { n: target.n_qubits(), m })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        Self { n, m: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity(&self, psi: &PureState) -> Result<f64> {
        if psi.n_qubits() != self.n {
            return Err(Error::domain(format!(
                "fidelity of a {}-qubit state against a {}-qubit density matrix",
                psi.n_qubits(),
                self.n
            )));
        }
        let v = DMatrix::from_column_slice(psi.amplitudes().len(), 1, psi.amplitudes());
        Ok((v.adjoint() * &self.m * &v)[(0, 0)].re)
    }

    /// Ascending eigenvalues of the Hermitian matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Probability-weighted mixture of several density matrices.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::domain("empty mixture"))?;
        let n = first.1.n;
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.n != n {
                return Err(Error::domain("mixture of density matrices of different sizes"));
            }
            m += &rho.m * Complex64::new(*w, 0.0);
        }
        Self::from_matrix(n, m)
    }
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    n: usize,
    rho: Vec<Vec<[f64; 2]>>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rho = self
            .m
            .row_iter()
            .map(|row| row.iter().map(|x| [x.re, x.im]).collect())
            .collect();
        DensityRepr { n: self.n, rho }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DensityRepr::deserialize(d)?;
        let dim = r.rho.len();
        if r.rho.iter().any(|row| row.len() != dim) {
            return Err(serde::de::Error::custom("density matrix rows must be square"));
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| Complex64::new(r.rho[i][j][0], r.rho[i][j][1]));
        DensityMatrix::from_matrix(r.n, m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symstate::{d, ghz3};

    #[test]
    fn pure_density_has_unit_purity() {
        let rho = DensityMatrix::from_pure(&ghz3());
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!((rho.fidelity(&ghz3()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn depolarized_fidelity() {
        let t = d(4, 2);
        let rho = DensityMatrix::depolarized(&t, 0.5).unwrap();
        assert!((rho.fidelity(&t).unwrap() - (0.5 + 0.5 / 16.0)).abs() < 1e-14);
        assert!(rho.eigenvalues()[0] > 0.0);
        assert!(rho.fidelity(&ghz3()).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(DensityMatrix::from_matrix(1, m).is_err());
    }

    #[test]
    fn json_round_trip() {
        let rho = DensityMatrix::depolarized(&ghz3(), 0.3).unwrap();
        let text = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert!((back.matrix() - rho.matrix()).iter().all(|x| x.norm() < 1e-15));
    }
}
