use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use proptest::prelude::*;
use squeeze_core::device::{derive_couplings, DeviceParams};
use squeeze_core::evolution::{trajectory_seed, Propagator};
use squeeze_core::hamiltonian::Hamiltonian;
use squeeze_core::quantum::dense::sorted_eigenvalues;
use squeeze_core::quantum::{
    coherent_amplitudes, embed_operator, ladder_ops, CsrMatrix, OperatorMatrix, SpaceDescriptor, Subsystem,
    SubsystemKind,
};
use squeeze_core::squeezing::{
    derivative_sign_changes, noisy_dx, predicted_variances, squeeze_operator, xi_grid, SqueezeSpec, VarianceMode,
};
use squeeze_core::table::format_float;
use squeeze_core::C64;

fn boson(label: &str, dim: usize) -> Subsystem {
    Subsystem {
        label: label.into(),
        dim,
        kind: SubsystemKind::Boson,
    }
}

fn hermitian(dim: usize, seed: &[f64]) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            let re = seed[k % seed.len()];
            let im = if i == j { 0.0 } else { seed[(k + 7) % seed.len()] };
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
            k += 1;
        }
    }
    m
}

fn exact_coherent_weight(alpha: f64, dim: usize) -> f64 {
    // Σ_{n<dim} e^{-|α|²} |α|^{2n} / n!
    let mut term = (-alpha * alpha).exp();
    let mut sum = 0.0;
    for n in 0..dim {
        if n > 0 {
            term *= alpha * alpha / n as f64;
        }
        sum += term;
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn embedding_repeats_local_spectrum(
        dims in prop::collection::vec(2usize..=3, 2..=3),
        slot in 0usize..3,
        seed in prop::collection::vec(-1.0f64..1.0, 12),
    ) {
        let slot = slot % dims.len();
        let labels = ["x", "y", "z"];
        let subs: Vec<Subsystem> = dims.iter().enumerate().map(|(i, &d)| boson(labels[i], d)).collect();
        let space = SpaceDescriptor::new(subs).unwrap();
        let local = hermitian(dims[slot], &seed);
        let op = embed_operator(&CsrMatrix::from_dense(&local), labels[slot], &space, true).unwrap();
        let got = sorted_eigenvalues(&op.to_dense()).unwrap();
        let mult = space.total_dim() / dims[slot];
        let mut want: Vec<f64> = sorted_eigenvalues(&local)
            .unwrap()
            .into_iter()
            .flat_map(|v| std::iter::repeat_n(v, mult))
            .collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-12, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn ladder_commutator_is_identity_below_the_edge(dim in 3usize..120) {
        let (lo, hi) = ladder_ops(dim).unwrap();
        let c = lo.mul(&hi).add_scaled(&hi.mul(&lo), C64::new(-1.0, 0.0)).to_dense();
        for i in 0..dim - 2 {
            for j in 0..dim - 2 {
                let want = if i == j { 1.0 } else { 0.0 };
                // (√n)² rounds to within an ulp of n
                let tol = if dim < 34 { 1e-14 } else { 4.0 * f64::EPSILON * dim as f64 };
                prop_assert!((c[(i, j)] - C64::new(want, 0.0)).norm() < tol);
            }
        }
        prop_assert!((c[(dim - 1, dim - 1)].re + (dim as f64 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn truncated_coherent_state_fidelity(r in 0.0f64..3.0, arg in 0.0f64..(2.0 * PI)) {
        let dim = (r * r + 6.0 * r + 10.0).ceil() as usize;
        let amps = coherent_amplitudes(C64::from_polar(r, arg), dim);
        // overlap with the untruncated state equals the retained Poisson weight
        let overlap: C64 = amps
            .iter()
            .enumerate()
            .map(|(n, z)| {
                let exact = coherent_amplitudes(C64::from_polar(r, arg), dim + 60)[n];
                exact.conj() * z
            })
            .sum();
        prop_assert!(overlap.norm_sqr() >= 1.0 - 1e-8);
        prop_assert!((overlap.norm_sqr() - exact_coherent_weight(r, dim)).abs() < 1e-9);
    }

    #[test]
    fn squeeze_operator_inverse(xi in -1.0f64..1.0, phi in 0.0f64..(2.0 * PI)) {
        let space = SpaceDescriptor::nmr(30).unwrap();
        let s = squeeze_operator(&SqueezeSpec::unit(xi, phi), &space).unwrap();
        let t = squeeze_operator(&SqueezeSpec::unit(-xi, phi), &space).unwrap();
        let prod = s.mul(&t).unwrap().to_dense();
        let id = DMatrix::<C64>::identity(30, 30);
        prop_assert!((prod - id).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn propagation_is_unitary(seed in prop::collection::vec(-1.0f64..1.0, 16), t in -3.0f64..3.0) {
        let space = SpaceDescriptor::nmr(12).unwrap();
        let h = OperatorMatrix::from_dense(&space, &hermitian(12, &seed), true).unwrap();
        let p = Propagator::new(&Hamiltonian::new(h, 1.0)).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); 12];
        v[0] = C64::new(1.0, 0.0);
        let out = p.apply_raw(&v, t);
        let back = p.apply_raw(&out, -t);
        let norm: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-10);
        prop_assert!((back[0] - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn kappa_is_odd_about_charge_degeneracy(eps in 0.001f64..0.499) {
        let base = DeviceParams {
            omega_over_2pi: None,
            ec_over_h: Some(30e9),
            ..DeviceParams::reference()
        };
        let hi = derive_couplings(&DeviceParams { n_g: 0.5 + eps, ..base.clone() }, false).unwrap();
        let lo = derive_couplings(&DeviceParams { n_g: 0.5 - eps, ..base }, false).unwrap();
        prop_assert!(hi.kappa != 0.0);
        prop_assert_eq!(hi.kappa.signum(), -lo.kappa.signum());
        prop_assert!((hi.kappa.abs() - lo.kappa.abs()).abs() <= 1e-12 * hi.kappa.abs());
    }

    #[test]
    fn kappa_depends_on_field_times_width_only(s in 0.05f64..20.0) {
        let p = DeviceParams::reference();
        let q = DeviceParams { b_field: p.b_field * s, width: p.width / s, ..p.clone() };
        let a = derive_couplings(&p, false).unwrap().kappa;
        let b = derive_couplings(&q, false).unwrap().kappa;
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn noisy_width_increases_with_ratio(xi in 0.01f64..3.0, r1 in 0.0f64..0.2, dr in 1e-6f64..0.2) {
        prop_assert!(noisy_dx(xi, r1 + dr) > noisy_dx(xi, r1));
    }

    #[test]
    fn noisy_curve_has_one_minimum(r in 1e-4f64..0.3) {
        let grid = xi_grid(6.0, 6001);
        prop_assert_eq!(derivative_sign_changes(r, &grid), 1);
        prop_assert!((noisy_dx(1e-9, r) - 1.0).abs() < 1e-8);
        prop_assert!(noisy_dx(6.0, r) > 1.0);
    }

    #[test]
    fn ideal_law_saturates_uncertainty(xi in -2.0f64..2.0) {
        let v = predicted_variances(xi, 0.0, VarianceMode::Ideal).unwrap();
        prop_assert!((v.dx * v.dp - 1.0).abs() < 1e-14);
        let n = predicted_variances(xi.abs(), 0.0, VarianceMode::Noisy).unwrap();
        prop_assert!((n.dx - (-xi.abs()).exp()).abs() < 1e-14);
    }

    #[test]
    fn float_format_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = format_float(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
        prop_assert!(s.len() <= 24);
    }

    #[test]
    fn trajectory_seeds_are_pure(master in any::<u64>(), i in any::<u64>()) {
        prop_assert_eq!(trajectory_seed(master, i), trajectory_seed(master, i));
        prop_assert_ne!(trajectory_seed(master, i), trajectory_seed(master, i.wrapping_add(1)));
    }
}

#[test]
fn squeeze_phase_convention() {
    let space = SpaceDescriptor::nmr(40).unwrap();
    let s = squeeze_operator(&SqueezeSpec::unit(0.4, FRAC_PI_2), &space).unwrap();
    // φ = π/2: exp[-(ξ/2)(b†² − b²)] is real
    assert!(s.to_dense().iter().all(|z| z.im.abs() < 1e-12));
}
