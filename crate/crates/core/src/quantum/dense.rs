//! Dense Hermitian eigendecomposition and the exponentials built on it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// `H = V diag(λ) V†` for a Hermitian `H`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(h: &DMatrix<C64>) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::Numerical("matrix is not square".into()));
        }
        // symmetrize so round-off in the input cannot leak into the solver
        let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
        let eig = sym
            .try_symmetric_eigen(f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
        Ok(Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    /// `V diag(f(λ)) V†`
    pub fn map(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[k]);
        }
        scaled * self.vectors.adjoint()
    }

    /// `V diag(f(λ)) V† v`
    pub fn apply(&self, v: &DVector<C64>, f: impl Fn(f64) -> C64) -> DVector<C64> {
        let mut coeffs = self.vectors.adjoint() * v;
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c *= f(self.values[k]);
        }
        &self.vectors * coeffs
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `exp(A)` for anti-Hermitian `A`, via the Hermitian matrix `iA`.
pub fn expm_anti_hermitian(a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let ia = a * C64::new(0.0, 1.0);
    let eig = HermitianEigen::new(&ia)?;
    // A = -i (iA)  =>  exp(A) = V exp(-i λ) V†
    Ok(eig.map(|l| C64::new(0.0, -l).exp()))
}

pub fn sorted_eigenvalues(h: &DMatrix<C64>) -> Result<Vec<f64>> {
    Ok(HermitianEigen::new(h)?.sorted_values())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_rotation_generator() {
        // A = -i θ σ_y / 2 ... use A = [[0, -t], [t, 0]] => rotation by t
        let t = 0.3;
        let a = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(-t, 0.0), C64::new(t, 0.0), C64::new(0.0, 0.0)]);
        let e = expm_anti_hermitian(&a).unwrap();
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-14);
        assert!(e[(0, 1)].im.abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_pauli_x() {
        let x = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let v = sorted_eigenvalues(&x).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }
}
