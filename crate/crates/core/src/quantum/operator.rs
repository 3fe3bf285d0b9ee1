use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::sparse::CsrMatrix;
use super::space::SpaceDescriptor;
use crate::error::{Error, Result};

/// Hermiticity tolerance, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Sparse operator bound to a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: SpaceDescriptor,
    matrix: CsrMatrix,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(space: SpaceDescriptor, matrix: CsrMatrix, hermitian_hint: bool) -> Result<Self> {
        if matrix.dim() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                got: matrix.dim(),
            });
        }
        Ok(Self {
            space,
            matrix,
            hermitian: hermitian_hint,
        })
    }

    pub fn zeros(space: &SpaceDescriptor) -> Self {
        Self {
            matrix: CsrMatrix::zeros(space.total_dim()),
            space: space.clone(),
            hermitian: true,
        }
    }

    pub fn identity(space: &SpaceDescriptor) -> Self {
        Self {
            matrix: CsrMatrix::identity(space.total_dim()),
            space: space.clone(),
            hermitian: true,
        }
    }

    pub fn from_dense(space: &SpaceDescriptor, m: &DMatrix<C64>, hermitian_hint: bool) -> Result<Self> {
        Self::new(space.clone(), CsrMatrix::from_dense(m), hermitian_hint)
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_hermitian_hint(&self) -> bool {
        self.hermitian
    }

    pub fn with_hermitian_hint(mut self, hint: bool) -> Self {
        self.hermitian = hint;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }

    /// max |A - A†| entry.
    pub fn hermiticity_residual(&self) -> f64 {
        self.matrix.adjoint_residual(1.0)
    }

    /// max |A + A†| entry.
    pub fn anti_hermiticity_residual(&self) -> f64 {
        self.matrix.adjoint_residual(-1.0)
    }

    /// Residual divided by the largest entry (zero for the zero operator).
    pub fn relative_hermiticity_residual(&self) -> f64 {
        let scale = self.matrix.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            self.hermiticity_residual() / scale
        }
    }

    /// Checks the hint, if set.
    pub fn check_hint(&self) -> bool {
        !self.hermitian || self.relative_hermiticity_residual() <= HERMITIAN_TOL
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            Err(Error::SpaceMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, C64::new(-1.0, 0.0))
    }

    pub fn add_scaled(&self, other: &Self, alpha: C64) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.add_scaled(&other.matrix, alpha),
            hermitian: self.hermitian && other.hermitian && alpha.im == 0.0,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.mul(&other.matrix),
            hermitian: false,
        })
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.sub(&ba)
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.scale(alpha),
            hermitian: self.hermitian && alpha.im == 0.0,
        }
    }

    pub fn scale_re(&self, alpha: f64) -> Self {
        self.scale(C64::new(alpha, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.matvec(v)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    /// Hilbert-Schmidt inner product Tr(self† other).
    pub fn hs_inner(&self, other: &Self) -> Result<C64> {
        self.same_space(other)?;
        Ok(self
            .matrix
            .iter()
            .map(|(i, j, v)| v.conj() * other.matrix.get(i, j))
            .sum())
    }
}

/// Truncated annihilation and creation operators on `dim` Fock levels.
/// The creation operator annihilates the top level.
pub fn ladder_ops(dim: usize) -> Result<(CsrMatrix, CsrMatrix)> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let lower = CsrMatrix::from_triplets(
        dim,
        (1..dim)
            .map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0)))
            .collect(),
    );
    let raise = lower.adjoint();
    Ok((lower, raise))
}

pub fn number_op(dim: usize) -> Result<CsrMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    Ok(CsrMatrix::diagonal(
        &(0..dim).map(|n| C64::new(n as f64, 0.0)).collect::<Vec<_>>(),
    ))
}

/// Two-level operators. Index 0 is `|0>`, index 1 is `|1>`; in the charge
/// basis index 0 is `|N>` and index 1 is `|N+1>`.
pub mod qubit {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub fn sigma_x() -> CsrMatrix {
        CsrMatrix::from_triplets(2, vec![(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))])
    }

    pub fn sigma_y() -> CsrMatrix {
        CsrMatrix::from_triplets(2, vec![(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))])
    }

    pub fn sigma_z() -> CsrMatrix {
        CsrMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)])
    }

    /// `|1><0|`
    pub fn raise() -> CsrMatrix {
        CsrMatrix::from_triplets(2, vec![(1, 0, c(1.0, 0.0))])
    }

    /// `|0><1|`
    pub fn lower() -> CsrMatrix {
        CsrMatrix::from_triplets(2, vec![(0, 1, c(1.0, 0.0))])
    }

    /// `|k><k|`
    pub fn projector(k: usize) -> CsrMatrix {
        CsrMatrix::from_triplets(2, vec![(k, k, c(1.0, 0.0))])
    }
}

/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` placed at `slot`.
pub fn embed_operator(op: &CsrMatrix, slot: &str, space: &SpaceDescriptor, hermitian_hint: bool) -> Result<OperatorMatrix> {
    let pos = space.position(slot)?;
    let d = space.subsystems()[pos].dim;
    if op.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: op.dim(),
        });
    }
    let left: usize = space.subsystems()[..pos].iter().map(|s| s.dim).product();
    let right = space.stride(pos);
    let m = CsrMatrix::identity(left).kron(op).kron(&CsrMatrix::identity(right));
    OperatorMatrix::new(space.clone(), m, hermitian_hint)
}

/// Lifts an operator to a larger space that contains every subsystem of the
/// operator's space plus extra ones, acting as identity on the extras.
pub fn lift_operator(op: &OperatorMatrix, target: &SpaceDescriptor) -> Result<OperatorMatrix> {
    let src = op.space();
    let positions = src
        .subsystems()
        .iter()
        .map(|s| {
            let p = target.position(&s.label)?;
            if target.subsystems()[p].dim != s.dim {
                return Err(Error::DimensionMismatch {
                    expected: target.subsystems()[p].dim,
                    got: s.dim,
                });
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let extra: Vec<usize> = (0..target.subsystems().len())
        .filter(|p| !positions.contains(p))
        .collect();
    let extra_dims: Vec<usize> = extra.iter().map(|&p| target.subsystems()[p].dim).collect();
    let extra_total: usize = extra_dims.iter().product();

    let mut t = Vec::with_capacity(op.matrix().nnz() * extra_total);
    let mut idx = vec![0usize; target.subsystems().len()];
    for (i, j, v) in op.matrix().iter() {
        let si = src.unflatten(i);
        let sj = src.unflatten(j);
        for e in 0..extra_total {
            let mut rem = e;
            for (k, &p) in extra.iter().enumerate().rev() {
                idx[p] = rem % extra_dims[k];
                rem /= extra_dims[k];
            }
            for (k, &p) in positions.iter().enumerate() {
                idx[p] = si[k];
            }
            let row = target.flatten(&idx);
            for (k, &p) in positions.iter().enumerate() {
                idx[p] = sj[k];
            }
            let col = target.flatten(&idx);
            t.push((row, col, v));
        }
    }
    OperatorMatrix::new(
        target.clone(),
        CsrMatrix::from_triplets(target.total_dim(), t),
        op.is_hermitian_hint(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::space::{NMR, QUBIT, STLR};
    use nalgebra::DMatrix;

    #[test]
    fn ladder_action_dim3() {
        let (lower, raise) = ladder_ops(3).unwrap();
        let one = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let down = lower.matvec(&one);
        assert_eq!(down[0], C64::new(1.0, 0.0));
        let up = raise.matvec(&one);
        assert!((up[2].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(up[0], C64::new(0.0, 0.0));
    }

    #[test]
    fn truncated_commutator_dim3() {
        let (lower, raise) = ladder_ops(3).unwrap();
        let comm = lower.mul(&raise).add_scaled(&raise.mul(&lower), C64::new(-1.0, 0.0));
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-2.0, 0.0),
        ]));
        assert!((comm.to_dense() - expect).norm() < 1e-14);
    }

    #[test]
    fn top_level_is_annihilated_by_raise() {
        let (_, raise) = ladder_ops(5).unwrap();
        let mut top = vec![C64::new(0.0, 0.0); 5];
        top[4] = C64::new(1.0, 0.0);
        assert!(raise.matvec(&top).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn ladder_rejects_small_dim() {
        assert!(matches!(ladder_ops(1), Err(Error::InvalidDimension { dim: 1 })));
    }

    #[test]
    fn embed_sigma_z_is_block_diagonal() {
        let space = SpaceDescriptor::new(vec![
            crate::quantum::space::Subsystem { label: QUBIT.into(), dim: 2, kind: crate::quantum::SubsystemKind::Qubit },
            crate::quantum::space::Subsystem { label: STLR.into(), dim: 3, kind: crate::quantum::SubsystemKind::Boson },
        ])
        .unwrap();
        let z = embed_operator(&qubit::sigma_z(), QUBIT, &space, true).unwrap();
        for i in 0..6 {
            let expect = if i < 3 { 1.0 } else { -1.0 };
            assert_eq!(z.get(i, i), C64::new(expect, 0.0));
        }
        assert_eq!(z.matrix().nnz(), 6);
    }

    #[test]
    fn embed_identity_is_identity() {
        let space = SpaceDescriptor::qubit_stlr_nmr(3, 4).unwrap();
        for (label, d) in [(QUBIT, 2), (STLR, 3), (NMR, 4)] {
            let e = embed_operator(&CsrMatrix::identity(d), label, &space, true).unwrap();
            assert_eq!(e, OperatorMatrix::identity(&space));
        }
    }

    #[test]
    fn embed_is_a_homomorphism() {
        let space = SpaceDescriptor::qubit_stlr_nmr(3, 4).unwrap();
        let (lower, raise) = ladder_ops(4).unwrap();
        let l = embed_operator(&lower, NMR, &space, false).unwrap();
        let r = embed_operator(&raise, NMR, &space, false).unwrap();
        let prod = embed_operator(&lower.mul(&raise), NMR, &space, true).unwrap();
        assert_eq!(l.mul(&r).unwrap().matrix(), prod.matrix());
    }

    #[test]
    fn embed_errors() {
        let space = SpaceDescriptor::qubit_stlr_nmr(3, 4).unwrap();
        assert!(matches!(
            embed_operator(&CsrMatrix::identity(3), "z", &space, true),
            Err(Error::UnknownSlot(_))
        ));
        assert!(matches!(
            embed_operator(&CsrMatrix::identity(3), NMR, &space, true),
            Err(Error::DimensionMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn lift_matches_embed() {
        let full = SpaceDescriptor::qubit_stlr_nmr(3, 4).unwrap();
        let eff = SpaceDescriptor::stlr_nmr(3, 4).unwrap();
        let (lower_b, _) = ladder_ops(4).unwrap();
        let (_, raise_a) = ladder_ops(3).unwrap();
        let on_eff = embed_operator(&raise_a, STLR, &eff, false)
            .unwrap()
            .mul(&embed_operator(&lower_b, NMR, &eff, false).unwrap())
            .unwrap();
        let lifted = lift_operator(&on_eff, &full).unwrap();
        let direct = embed_operator(&raise_a, STLR, &full, false)
            .unwrap()
            .mul(&embed_operator(&lower_b, NMR, &full, false).unwrap())
            .unwrap();
        assert_eq!(lifted.matrix(), direct.matrix());
    }
}
