//! Squeeze operator, quadrature statistics, the ideal and phase-noisy
//! variance laws, and the noisy-squeezing curves with their minima.
//!
//! Quadratures are `x = x₀(b + b†)` and `p = ip₀(b† − b)`. Curves are
//! parameterized by `ξ = 2κβτ` at fixed `r = D/(2κβ)`, so `Dτ = rξ`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::phase_noise_moments_exact;
use crate::hamiltonian::build_parametric;
use crate::quantum::dense::HermitianEigen;
use crate::quantum::{
    expectation, expectation_and_variance, ladder_ops, make_state, top_decile, LocalState, OperatorMatrix,
    SpaceDescriptor, StateVector, NMR,
};
use crate::table::{Cell, ResultTable};

/// Largest top-decile population accepted by [`quadrature_variances`].
pub const QUADRATURE_LEAKAGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSpec {
    pub xi: f64,
    pub phi: f64,
    pub x0: f64,
    pub p0: f64,
}

impl SqueezeSpec {
    /// Dimensionless quadratures (`x₀ = p₀ = 1`).
    pub fn unit(xi: f64, phi: f64) -> Self {
        Self { xi, phi, x0: 1.0, p0: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariancePair {
    pub dx: f64,
    pub dp: f64,
}

fn check_nmr(space_b: &SpaceDescriptor) -> Result<usize> {
    let subs = space_b.subsystems();
    if subs.len() != 1 || subs[0].label != NMR {
        return Err(Error::InvalidSpace("expected the NMR mode alone".into()));
    }
    Ok(subs[0].dim)
}

/// `S(ξ) = exp[−i(ξ/2)(b†²e^{−iφ} + b²e^{iφ})]`.
pub fn squeeze_operator(spec: &SqueezeSpec, space_b: &SpaceDescriptor) -> Result<OperatorMatrix> {
    let dim = check_nmr(space_b)?;
    let occupation = spec.xi.sinh().powi(2);
    if occupation > dim as f64 / 6.0 {
        return Err(Error::TruncationTooSmall {
            subsystem: NMR.into(),
            detail: format!(
                "sinh^2(xi) = {occupation:.4} exceeds dim/6; use dim >= {}",
                (6.0 * occupation).ceil() as usize
            ),
        });
    }
    let k = build_parametric(0.5 * spec.xi, 1.0, spec.phi, 1.0, space_b)?.op;
    let u = HermitianEigen::new(&k.to_dense())?.map(|l| C64::new(0.0, -l).exp());
    OperatorMatrix::from_dense(space_b, &u, false)
}

/// `S(ξ)|0⟩`.
pub fn squeezed_vacuum(spec: &SqueezeSpec, space_b: &SpaceDescriptor) -> Result<StateVector> {
    let s = squeeze_operator(spec, space_b)?;
    let vac = make_state(space_b, &[LocalState::Number(0)])?;
    StateVector::from_amplitudes(space_b, vac.apply(&s)?)
}

fn quadratures(space_b: &SpaceDescriptor) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let (lo, hi) = ladder_ops(check_nmr(space_b)?)?;
    let b = OperatorMatrix::new(space_b.clone(), lo, false)?;
    let bd = OperatorMatrix::new(space_b.clone(), hi, false)?;
    let x = b.add(&bd)?.with_hermitian_hint(true);
    let p = bd.sub(&b)?.scale(C64::new(0.0, 1.0)).with_hermitian_hint(true);
    Ok((x, p))
}

/// `(Δx, Δp)` without the leakage guard.
pub fn quadrature_variances_unguarded(state: &StateVector, x0: f64, p0: f64) -> Result<VariancePair> {
    let (x, p) = quadratures(state.space())?;
    let (_, vx) = expectation_and_variance(&x, state)?;
    let (_, vp) = expectation_and_variance(&p, state)?;
    Ok(VariancePair {
        dx: x0 * vx.sqrt(),
        dp: p0 * vp.sqrt(),
    })
}

/// `(Δx, Δp)`; refuses states with more than [`QUADRATURE_LEAKAGE_TOL`] in
/// the top tenth of Fock levels.
pub fn quadrature_variances(state: &StateVector, x0: f64, p0: f64) -> Result<VariancePair> {
    check_nmr(state.space())?;
    let leakage = top_decile(&state.populations(NMR)?);
    if leakage > QUADRATURE_LEAKAGE_TOL {
        return Err(Error::Leakage {
            subsystem: NMR.into(),
            leakage,
            time: f64::NAN,
        });
    }
    quadrature_variances_unguarded(state, x0, p0)
}

/// `⟨b†b⟩`
pub fn mean_occupation(state: &StateVector) -> Result<f64> {
    let n = OperatorMatrix::new(
        state.space().clone(),
        crate::quantum::number_op(check_nmr(state.space())?)?,
        true,
    )?;
    Ok(expectation(&n, state)?.re)
}

/// Residuals of `S†bS − (b cosh ξ − b† sinh ξ)` at `φ = π/2`: the largest
/// entry with both indices below `cut`, and the largest among the rest.
pub fn bogoliubov_residuals(xi: f64, space_b: &SpaceDescriptor, cut: usize) -> Result<(f64, f64)> {
    let dim = check_nmr(space_b)?;
    let s = squeeze_operator(&SqueezeSpec::unit(xi, std::f64::consts::FRAC_PI_2), space_b)?.to_dense();
    let (lo, hi) = ladder_ops(dim)?;
    let (b, bd) = (lo.to_dense(), hi.to_dense());
    let lhs = s.adjoint() * &b * &s;
    let rhs = &b * C64::new(xi.cosh(), 0.0) - &bd * C64::new(xi.sinh(), 0.0);
    let diff = lhs - rhs;
    let (mut lower, mut upper) = (0.0f64, 0.0f64);
    for i in 0..dim {
        for j in 0..dim {
            let v = diff[(i, j)].norm();
            if i < cut && j < cut {
                lower = lower.max(v);
            } else {
                upper = upper.max(v);
            }
        }
    }
    Ok((lower, upper))
}

/// Largest entry of `S†bS − (b cosh ξ − b† sinh ξ)` over the lower two
/// thirds of Fock levels.
pub fn bogoliubov_check(xi: f64, space_b: &SpaceDescriptor) -> Result<f64> {
    let dim = check_nmr(space_b)?;
    Ok(bogoliubov_residuals(xi, space_b, 2 * dim / 3)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceMode {
    Ideal,
    Noisy,
}

/// `(Δx/x₀, Δp/p₀)`: ideal `(e^{−ξ}, e^{ξ})`, or with phase noise
/// `(√(e^{−2ξ} + (rξ/2)e^{2ξ}), e^{ξ}√(1 − 2rξ))`.
pub fn predicted_variances(xi: f64, r: f64, mode: VarianceMode) -> Result<VariancePair> {
    match mode {
        VarianceMode::Ideal => Ok(VariancePair {
            dx: (-xi).exp(),
            dp: xi.exp(),
        }),
        VarianceMode::Noisy => {
            if !(r >= 0.0) {
                return Err(Error::Domain(format!("ratio r = {r} must be >= 0")));
            }
            let d_tau = r * xi;
            if d_tau >= 0.5 {
                return Err(Error::Domain(format!("D*tau = r*xi = {d_tau} must be < 1/2")));
            }
            Ok(VariancePair {
                dx: noisy_dx(xi, r),
                dp: xi.exp() * (1.0 - 2.0 * d_tau).sqrt(),
            })
        }
    }
}

/// `Δx/x₀` with phase noise; defined for every `ξ` and `r ≥ 0`.
pub fn noisy_dx(xi: f64, r: f64) -> f64 {
    if r == 0.0 {
        return (-xi).exp();
    }
    ((-2.0 * xi).exp() + 0.5 * r * xi * (2.0 * xi).exp()).sqrt()
}

/// `d/dξ` of `(Δx/x₀)²`; same sign as the derivative of `Δx/x₀`.
pub fn noisy_dx_sq_derivative(xi: f64, r: f64) -> f64 {
    -2.0 * (-2.0 * xi).exp() + 0.5 * r * (2.0 * xi).exp() * (1.0 + 2.0 * xi)
}

/// Sign changes of the derivative over `grid`.
pub fn derivative_sign_changes(r: f64, grid: &[f64]) -> usize {
    grid.windows(2)
        .filter(|w| {
            let (a, b) = (noisy_dx_sq_derivative(w[0], r), noisy_dx_sq_derivative(w[1], r));
            (a < 0.0) != (b < 0.0)
        })
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveMinimum {
    pub r: f64,
    pub xi_star: f64,
    pub dx_min: f64,
    /// False when the smallest value sits on a grid endpoint.
    pub interior: bool,
}

/// Brackets the derivative root on `grid`, then bisects to machine
/// resolution.
pub fn curve_minimum(r: f64, grid: &[f64]) -> Result<CurveMinimum> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            field: "xi_grid".into(),
            reason: "needs at least two strictly ascending points".into(),
        });
    }
    let bracket = grid.windows(2).find(|w| {
        noisy_dx_sq_derivative(w[0], r) < 0.0 && noisy_dx_sq_derivative(w[1], r) >= 0.0
    });
    match bracket {
        Some(w) => {
            let (mut lo, mut hi) = (w[0], w[1]);
            while hi - lo > 1e-14 * hi.abs().max(1.0) {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if noisy_dx_sq_derivative(mid, r) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let xi_star = 0.5 * (lo + hi);
            Ok(CurveMinimum {
                r,
                xi_star,
                dx_min: noisy_dx(xi_star, r),
                interior: true,
            })
        }
        None => {
            let (xi_star, dx_min) = grid
                .iter()
                .map(|&x| (x, noisy_dx(x, r)))
                .fold((f64::NAN, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
            Ok(CurveMinimum {
                r,
                xi_star,
                dx_min,
                interior: false,
            })
        }
    }
}

/// `n` equally spaced points on `[0, xi_max]`.
pub fn xi_grid(xi_max: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0];
    }
    (0..n).map(|k| xi_max * k as f64 / (n - 1) as f64).collect()
}

pub const FIG2_COLUMNS: [&str; 5] = ["xi", "r", "dx_over_x0_analytic", "dx_over_x0_mc", "mc_stderr"];

/// Analytic curves for each ratio: rows `(ξ, r, Δx/x₀, —, —)` ordered by
/// ratio then `ξ`, plus each curve's minimum.
pub fn fig2_table(ratios: &[f64], grid: &[f64]) -> Result<(ResultTable, Vec<CurveMinimum>)> {
    if let Some(r) = ratios.iter().find(|r| !(**r >= 0.0)) {
        return Err(Error::Domain(format!("ratio {r} must be >= 0")));
    }
    let mut table = ResultTable::new(&FIG2_COLUMNS);
    let mut minima = Vec::with_capacity(ratios.len());
    for &r in ratios {
        for &xi in grid {
            table.push(vec![xi.into(), r.into(), noisy_dx(xi, r).into(), Cell::Empty, Cell::Empty])?;
        }
        minima.push(curve_minimum(r, grid)?);
    }
    Ok((table, minima))
}

/// `c_D` for which the exact phase-diffusion ensemble reproduces the noisy
/// `Δx/x₀` law at `(ξ, r)`.
pub fn calibrate_diffusion_factor(xi: f64, r: f64) -> Result<f64> {
    if !(xi > 0.0 && r > 0.0) {
        return Err(Error::Domain("calibration needs xi > 0 and r > 0".into()));
    }
    let target = noisy_dx(xi, r);
    // G = 2κβ = 1, τ = ξ, D = r
    let f = |c: f64| phase_noise_moments_exact(0.5, r, c, std::f64::consts::FRAC_PI_2, xi).0.sqrt() - target;
    let (mut lo, mut hi) = (1e-3, 1e3);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::Domain(format!("no diffusion factor in [{lo}, {hi}] matches at xi = {xi}, r = {r}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn nb(dim: usize) -> SpaceDescriptor {
        SpaceDescriptor::nmr(dim).unwrap()
    }

    #[test]
    fn zero_squeeze_is_identity() {
        let s = squeeze_operator(&SqueezeSpec::unit(0.0, FRAC_PI_2), &nb(10)).unwrap();
        let id = OperatorMatrix::identity(&nb(10));
        assert!(s.sub(&id).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn inverse_and_unitarity() {
        let space = nb(40);
        let s = squeeze_operator(&SqueezeSpec::unit(0.7, 0.3), &space).unwrap();
        let sinv = squeeze_operator(&SqueezeSpec::unit(-0.7, 0.3), &space).unwrap();
        let id = OperatorMatrix::identity(&space);
        assert!(s.mul(&sinv).unwrap().sub(&id).unwrap().max_abs() < 1e-10);
        assert!(s.adjoint().mul(&s).unwrap().sub(&id).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn half_pi_phase_form() {
        // φ = π/2 gives exp[−(ξ/2)(b†² − b²)]
        let space = nb(30);
        let xi = 0.4;
        let s = squeeze_operator(&SqueezeSpec::unit(xi, FRAC_PI_2), &space).unwrap();
        let (lo, hi) = ladder_ops(30).unwrap();
        let gen = hi.mul(&hi).add_scaled(&lo.mul(&lo), C64::new(-1.0, 0.0)).scale(C64::new(-xi / 2.0, 0.0));
        let want = crate::quantum::dense::expm_anti_hermitian(&gen.to_dense()).unwrap();
        assert!((s.to_dense() - want).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn guard_suggests_dimension() {
        let err = squeeze_operator(&SqueezeSpec::unit(2.5, FRAC_PI_2), &nb(20)).unwrap_err();
        match err {
            Error::TruncationTooSmall { subsystem, detail } => {
                assert_eq!(subsystem, "b");
                assert!(detail.contains("dim >="));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn squeezed_vacuum_occupation() {
        let v = squeezed_vacuum(&SqueezeSpec::unit(0.5, FRAC_PI_2), &nb(40)).unwrap();
        let n = mean_occupation(&v).unwrap();
        assert!((n - 0.5f64.sinh().powi(2)).abs() < 1e-10);
        assert!((n - 0.2715).abs() < 1e-4);
    }

    #[test]
    fn vacuum_and_coherent_quadratures() {
        let space = nb(40);
        let vac = make_state(&space, &[LocalState::Number(0)]).unwrap();
        let v = quadrature_variances(&vac, 2.0, 3.0).unwrap();
        assert!((v.dx - 2.0).abs() < 1e-14 && (v.dp - 3.0).abs() < 1e-14);
        let coh = make_state(&space, &[LocalState::Coherent(C64::new(1.2, -0.7))]).unwrap();
        let v = quadrature_variances(&coh, 1.0, 1.0).unwrap();
        assert!((v.dx - 1.0).abs() < 1e-8 && (v.dp - 1.0).abs() < 1e-8);
    }

    #[test]
    fn squeezed_quadratures_match_law() {
        let v = squeezed_vacuum(&SqueezeSpec::unit(0.8, FRAC_PI_2), &nb(80)).unwrap();
        let q = quadrature_variances(&v, 1.0, 1.0).unwrap();
        assert!((q.dx / (-0.8f64).exp() - 1.0).abs() < 1e-6);
        assert!((q.dp / 0.8f64.exp() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadrature_leakage_guard() {
        let v = squeezed_vacuum(&SqueezeSpec::unit(1.2, FRAC_PI_2), &nb(40)).unwrap();
        assert!(matches!(quadrature_variances(&v, 1.0, 1.0), Err(Error::Leakage { .. })));
        assert!(quadrature_variances_unguarded(&v, 1.0, 1.0).is_ok());
    }

    #[test]
    fn half_turn_of_phase_swaps_quadratures() {
        // S(ξ, φ + π) = S(−ξ, φ): the squeezing axis turns by φ/2
        let space = nb(60);
        let q = |phi: f64| {
            let v = squeezed_vacuum(&SqueezeSpec::unit(0.6, phi), &space).unwrap();
            quadrature_variances(&v, 1.0, 1.0).unwrap()
        };
        let (a, b, c) = (q(FRAC_PI_2), q(3.0 * FRAC_PI_2), q(5.0 * FRAC_PI_2));
        assert!((a.dx - b.dp).abs() < 1e-12 && (a.dp - b.dx).abs() < 1e-12);
        assert!((a.dx - c.dx).abs() < 1e-12 && (a.dp - c.dp).abs() < 1e-12);
    }

    #[test]
    fn bogoliubov_identity() {
        let space = nb(60);
        assert_eq!(bogoliubov_check(0.0, &space).unwrap(), 0.0);
        // exact on levels far from the truncation edge
        assert!(bogoliubov_residuals(0.1, &space, 30).unwrap().0 < 1e-13);
        assert!(bogoliubov_residuals(0.3, &space, 20).unwrap().0 < 1e-7);
        assert!(bogoliubov_residuals(0.5, &space, 10).unwrap().0 < 1e-8);
        // measured on the lower 40 levels of 60
        let lower: Vec<f64> = [0.1, 0.3, 0.5].iter().map(|&x| bogoliubov_check(x, &space).unwrap()).collect();
        assert!((lower[0] - 1.7789e-6).abs() < 1e-9, "{lower:?}");
        assert!((lower[1] - 4.7135).abs() < 1e-3, "{lower:?}");
        assert!((lower[2] - 6.8094).abs() < 1e-3, "{lower:?}");
        let tops: Vec<f64> = [0.1, 0.3, 0.5, 0.8]
            .iter()
            .map(|&x| bogoliubov_residuals(x, &space, 40).unwrap().1)
            .collect();
        assert!(tops.windows(2).all(|w| w[1] > w[0]), "{tops:?}");
    }

    #[test]
    fn predicted_variance_laws() {
        let v = predicted_variances(0.0, 0.3, VarianceMode::Noisy).unwrap();
        assert_eq!(v.dx, 1.0);
        let a = predicted_variances(0.9, 0.0, VarianceMode::Noisy).unwrap();
        let b = predicted_variances(0.9, 0.0, VarianceMode::Ideal).unwrap();
        assert!((a.dx - b.dx).abs() < 1e-15 && (a.dp - b.dp).abs() < 1e-15);
        let v = predicted_variances(1.2, 0.01, VarianceMode::Noisy).unwrap();
        assert!((v.dx - 0.396051778904302).abs() < 1e-12);
        assert!(matches!(predicted_variances(10.0, 0.05, VarianceMode::Noisy), Err(Error::Domain(_))));
        assert!(matches!(predicted_variances(1.0, -0.1, VarianceMode::Noisy), Err(Error::Domain(_))));
    }

    #[test]
    fn curve_minima_match_oracle() {
        let grid = xi_grid(3.0, 301);
        for (r, xs, vs) in [
            (0.001, 1.7027939786585098, 0.2425728788277556),
            (0.01, 1.192959758287372, 0.3960253166754248),
            (0.05, 0.8476325221225021, 0.5468089475584171),
        ] {
            let m = curve_minimum(r, &grid).unwrap();
            assert!(m.interior);
            assert!((m.xi_star - xs).abs() < 1e-9, "{r}: {}", m.xi_star);
            assert!((m.dx_min - vs).abs() < 1e-12);
        }
        let m0 = curve_minimum(0.0, &grid).unwrap();
        assert!(!m0.interior);
        assert_eq!(m0.xi_star, 3.0);
    }

    #[test]
    fn fig2_rows_and_order() {
        let grid = xi_grid(3.0, 31);
        let (t, minima) = fig2_table(&[0.0, 0.01], &grid).unwrap();
        assert_eq!(t.len(), 62);
        assert_eq!(minima.len(), 2);
        let row = t.row(5);
        assert_eq!(row[0], Cell::Num(grid[5]));
        assert_eq!(row[2], Cell::Num((-grid[5]).exp()));
        assert_eq!(row[3], Cell::Empty);
        assert!(fig2_table(&[-0.1], &grid).is_err());
    }

    #[test]
    fn calibration_root() {
        let c = calibrate_diffusion_factor(1.0, 0.01).unwrap();
        assert!((c - 2.2067824817907833).abs() < 1e-8, "{c}");
    }

    #[test]
    fn exact_moments_limits() {
        // no noise: ideal squeezing; ⟨x²⟩⟨p²⟩ = 1
        let (x2, p2) = phase_noise_moments_exact(0.5, 0.0, 1.0, FRAC_PI_2, 0.7);
        assert!((x2 - (-1.4f64).exp()).abs() < 1e-12);
        assert!((p2 - 1.4f64.exp()).abs() < 1e-12);
        // sweep values from the independent evaluation
        for (c, want) in [(0.5, 0.37924), (1.0, 0.39018), (2.0, 0.41094)] {
            let dx = phase_noise_moments_exact(0.5, 0.01, c, FRAC_PI_2, 1.0).0.sqrt();
            assert!((dx - want).abs() < 1e-5, "{c}: {dx}");
        }
    }
}
