//! Lanczos approximation of `e^{-iHt} v` for sparse Hermitian `H`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::quantum::{l2_norm, CsrMatrix};

const KRYLOV_DIM: usize = 40;
/// Bound on `‖H‖₁·|h|` per substep.
const STEP_NORM: f64 = 8.0;
const BREAKDOWN: f64 = 1e-13;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn expmv_hermitian(h: &CsrMatrix, v: &[C64], t: f64) -> Vec<C64> {
    let norm = h.one_norm();
    if t == 0.0 || norm == 0.0 {
        return v.to_vec();
    }
    let substeps = ((norm * t.abs()) / STEP_NORM).ceil().max(1.0) as usize;
    let dt = t / substeps as f64;
    let mut w = v.to_vec();
    for _ in 0..substeps {
        w = lanczos_step(h, &w, dt);
    }
    w
}

fn lanczos_step(h: &CsrMatrix, v: &[C64], dt: f64) -> Vec<C64> {
    let n = v.len();
    let beta0 = l2_norm(v);
    if beta0 == 0.0 {
        return v.to_vec();
    }
    let m_max = KRYLOV_DIM.min(n);
    let mut basis: Vec<Vec<C64>> = vec![v.iter().map(|z| z / beta0).collect()];
    let mut alpha = Vec::with_capacity(m_max);
    let mut beta = Vec::with_capacity(m_max);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let scale = h.one_norm();
    for j in 0..m_max {
        h.matvec_into(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        // full reorthogonalization, applied twice
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = l2_norm(&w);
        if j + 1 == m_max || b <= BREAKDOWN * scale {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    let m = alpha.len();
    let mut tri = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        tri[(i, i)] = alpha[i];
        if i + 1 < m {
            tri[(i, i + 1)] = beta[i];
            tri[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(tri);
    // y = Q e^{-iΛdt} Qᵀ e₁
    let coeffs: Vec<C64> = (0..m)
        .map(|k| C64::new(0.0, -eig.eigenvalues[k] * dt).exp() * eig.eigenvectors[(0, k)])
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (i, q) in basis.iter().enumerate().take(m) {
        let yi: C64 = (0..m).map(|k| coeffs[k] * eig.eigenvectors[(i, k)]).sum::<C64>() * beta0;
        for (o, qv) in out.iter_mut().zip(q) {
            *o += yi * qv;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::dense::HermitianEigen;
    use nalgebra::DVector;

    fn random_hermitian(n: usize) -> CsrMatrix {
        let mut trips = Vec::new();
        let mut s: u64 = 12345;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            trips.push((i, i, C64::new(3.0 * next(), 0.0)));
            for d in [1usize, 3] {
                if i + d < n {
                    let z = C64::new(next(), next());
                    trips.push((i, i + d, z));
                    trips.push((i + d, i, z.conj()));
                }
            }
        }
        CsrMatrix::from_triplets(n, trips)
    }

    #[test]
    fn matches_dense_exponential() {
        let n = 120;
        let h = random_hermitian(n);
        let v: Vec<C64> = (0..n).map(|i| C64::new((i as f64).sin(), (0.3 * i as f64).cos())).collect();
        let norm = l2_norm(&v);
        let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
        let eig = HermitianEigen::new(&h.to_dense()).unwrap();
        for t in [0.1, 1.7, -2.5, 9.0] {
            let want = eig.apply(&DVector::from_column_slice(&v), |l| C64::new(0.0, -l * t).exp());
            let got = expmv_hermitian(&h, &v, t);
            let err = got.iter().zip(want.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-11, "t = {t}: {err}");
        }
    }

    #[test]
    fn invariant_subspace_breakdown() {
        // eigenvector input terminates the recurrence after one step
        let h = CsrMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(-1.0, 0.0)]);
        let v = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let out = expmv_hermitian(&h, &v, 0.5);
        assert!((out[1] - C64::new(0.0, -1.0).exp()).norm() < 1e-14);
        assert!(out[0].norm() < 1e-14 && out[2].norm() < 1e-14);
    }
}
