//! Phase-diffusion Monte Carlo for the classically pumped squeezer, and the
//! exact ensemble moments it converges to.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_capped, NoiseModel};
use crate::error::{Error, Result};
use crate::hamiltonian::build_parametric;
use crate::quantum::dense::HermitianEigen;
use crate::quantum::{top_decile, SpaceDescriptor, StateVector, NMR};

/// Largest `κβ·dt` and `D·dt` accepted by the stepper.
pub const STEP_GUARD: f64 = 1e-3;

/// Ensemble-averaged quadrature moments, with `x = b + b†` and
/// `p = i(b† − b)` (units of `x₀`, `p₀`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub mean_x2: Vec<f64>,
    pub mean_p2: Vec<f64>,
    pub se_x: Vec<f64>,
    pub se_p: Vec<f64>,
    pub se_x2: Vec<f64>,
    pub se_p2: Vec<f64>,
    /// `√(E⟨x²⟩ − E⟨x⟩²)`: spread of the ensemble state.
    pub dx: Vec<f64>,
    pub dp: Vec<f64>,
    /// Delta-method standard errors of `dx`, `dp`.
    pub dx_stderr: Vec<f64>,
    pub dp_stderr: Vec<f64>,
    pub max_leakage: f64,
    pub n_traj: usize,
    pub steps: usize,
    pub dt: f64,
}

/// Trajectory seed from `(master_seed, index)`, independent of scheduling.
pub fn trajectory_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `e^{-iH(φ₀)h}` split into even and odd Fock-parity blocks; the pumped
/// Hamiltonian never couples them.
struct ParityPropagator {
    even: DMatrix<C64>,
    odd: DMatrix<C64>,
}

impl ParityPropagator {
    fn new(kappa_beta: f64, phi0: f64, dim: usize, h: f64) -> Result<Self> {
        let space = SpaceDescriptor::nmr(dim)?;
        let full = build_parametric(kappa_beta, 1.0, phi0, 1.0, &space)?.op.to_dense();
        let block = |parity: usize| -> Result<DMatrix<C64>> {
            let idx: Vec<usize> = (parity..dim).step_by(2).collect();
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| full[(idx[r], idx[c])]);
            Ok(HermitianEigen::new(&sub)?.map(|l| C64::new(0.0, -l * h).exp()))
        };
        Ok(Self {
            even: block(0)?,
            odd: block(1)?,
        })
    }

    /// `ψ ← U P₀ U† ψ` with `U = e^{iθn}`, `θ = (φ₀ − φ)/2`, which equals
    /// `e^{-iH(φ)h} ψ`.
    fn step(&self, psi: &mut [C64], theta: f64, buf: &mut [C64]) {
        let rot = C64::from_polar(1.0, -theta);
        let mut ph = C64::new(1.0, 0.0);
        for z in psi.iter_mut() {
            *z *= ph;
            ph *= rot;
        }
        for (parity, blk) in [(0usize, &self.even), (1, &self.odd)] {
            let m = blk.nrows();
            for r in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..m {
                    acc += blk[(r, c)] * psi[parity + 2 * c];
                }
                buf[parity + 2 * r] = acc;
            }
        }
        let rot = rot.conj();
        let mut ph = C64::new(1.0, 0.0);
        for (z, b) in psi.iter_mut().zip(buf.iter()) {
            *z = b * ph;
            ph *= rot;
        }
    }
}

/// `(⟨x⟩, ⟨p⟩, ⟨x²⟩, ⟨p²⟩)` for a single-mode state.
fn quadrature_moments(psi: &[C64]) -> [f64; 4] {
    let n = psi.len();
    let mut xs = vec![C64::new(0.0, 0.0); n];
    let mut ps = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let lower = if k + 1 < n { psi[k + 1] * ((k + 1) as f64).sqrt() } else { C64::new(0.0, 0.0) };
        let raise = if k > 0 { psi[k - 1] * (k as f64).sqrt() } else { C64::new(0.0, 0.0) };
        xs[k] = lower + raise;
        ps[k] = C64::new(0.0, 1.0) * (raise - lower);
    }
    let dot = |a: &[C64]| -> f64 { psi.iter().zip(a).map(|(s, v)| (s.conj() * v).re).sum() };
    let sq = |a: &[C64]| -> f64 { a.iter().map(|z| z.norm_sqr()).sum() };
    [dot(&xs), dot(&ps), sq(&xs), sq(&ps)]
}

struct Trajectory {
    /// `[time][moment]`
    moments: Vec<[f64; 4]>,
    leakage: f64,
}

/// Runs `noise.n_traj` phase-diffusing trajectories of the pumped squeezer
/// with coupling `kappa` from `state0` up to `tau`, sampling
/// `grid_points` equally spaced times (including 0 and `tau`).
pub fn phase_noise_ensemble(
    noise: &NoiseModel,
    kappa: f64,
    space_b: &SpaceDescriptor,
    state0: &StateVector,
    tau: f64,
    grid_points: usize,
) -> Result<EnsembleStats> {
    noise.validate()?;
    let labels: Vec<&str> = space_b.subsystems().iter().map(|s| s.label.as_str()).collect();
    if labels != [NMR] {
        return Err(Error::InvalidSpace("phase-noise ensembles act on the NMR mode only".into()));
    }
    if state0.space() != space_b {
        return Err(Error::SpaceMismatch);
    }
    if grid_points < 2 {
        return Err(Error::InvalidParameter {
            field: "grid_points".into(),
            reason: "must be >= 2".into(),
        });
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "tau".into(),
            reason: "must be finite and > 0".into(),
        });
    }
    let kappa_beta = kappa * noise.beta;
    if (kappa_beta * noise.dt).abs() > STEP_GUARD || noise.linewidth * noise.dt > STEP_GUARD {
        return Err(Error::StepSize(format!(
            "kappa*beta*dt = {:e}, D*dt = {:e}; both must be <= {STEP_GUARD:e}",
            (kappa_beta * noise.dt).abs(),
            noise.linewidth * noise.dt
        )));
    }
    let intervals = grid_points - 1;
    let per_interval = ((tau / intervals as f64) / noise.dt).ceil().max(1.0) as usize;
    let steps = per_interval * intervals;
    let h = tau / steps as f64;
    let dim = space_b.total_dim();
    let prop = ParityPropagator::new(kappa_beta, noise.phi0, dim, h)?;
    let sigma = (2.0 * noise.diffusion_factor * noise.linewidth * h).sqrt();

    let run = |index: usize| -> Trajectory {
        let mut rng = ChaCha8Rng::seed_from_u64(trajectory_seed(noise.master_seed, index as u64));
        let mut psi = state0.amplitudes().to_vec();
        let mut buf = vec![C64::new(0.0, 0.0); dim];
        let mut phi = noise.phi0;
        let mut moments = Vec::with_capacity(grid_points);
        let mut leakage: f64 = 0.0;
        let mut record = |psi: &[C64], moments: &mut Vec<[f64; 4]>| {
            let pops: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
            leakage = leakage.max(top_decile(&pops));
            moments.push(quadrature_moments(psi));
        };
        record(&psi, &mut moments);
        for _ in 0..intervals {
            for _ in 0..per_interval {
                prop.step(&mut psi, 0.5 * (noise.phi0 - phi), &mut buf);
                if sigma > 0.0 {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    phi += sigma * z;
                }
            }
            record(&psi, &mut moments);
        }
        Trajectory { moments, leakage }
    };
    let trajectories: Vec<Trajectory> = run_capped(|| (0..noise.n_traj).into_par_iter().map(run).collect())?;

    let n = noise.n_traj as f64;
    let times: Vec<f64> = (0..grid_points).map(|k| tau * k as f64 / intervals as f64).collect();
    let mut stats = EnsembleStats {
        times,
        mean_x: Vec::new(),
        mean_p: Vec::new(),
        mean_x2: Vec::new(),
        mean_p2: Vec::new(),
        se_x: Vec::new(),
        se_p: Vec::new(),
        se_x2: Vec::new(),
        se_p2: Vec::new(),
        dx: Vec::new(),
        dp: Vec::new(),
        dx_stderr: Vec::new(),
        dp_stderr: Vec::new(),
        max_leakage: trajectories.iter().map(|t| t.leakage).fold(0.0, f64::max),
        n_traj: noise.n_traj,
        steps,
        dt: h,
    };
    for k in 0..grid_points {
        let mut mean = [0.0; 4];
        for t in &trajectories {
            for (m, v) in mean.iter_mut().zip(&t.moments[k]) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = [0.0; 4];
        for t in &trajectories {
            for j in 0..4 {
                var[j] += (t.moments[k][j] - mean[j]).powi(2);
            }
        }
        let se: Vec<f64> = var
            .iter()
            .map(|v| if noise.n_traj > 1 { (v / (n - 1.0)).sqrt() / n.sqrt() } else { 0.0 })
            .collect();
        let dx = (mean[2] - mean[0] * mean[0]).max(0.0).sqrt();
        let dp = (mean[3] - mean[1] * mean[1]).max(0.0).sqrt();
        stats.mean_x.push(mean[0]);
        stats.mean_p.push(mean[1]);
        stats.mean_x2.push(mean[2]);
        stats.mean_p2.push(mean[3]);
        stats.se_x.push(se[0]);
        stats.se_p.push(se[1]);
        stats.se_x2.push(se[2]);
        stats.se_p2.push(se[3]);
        stats.dx.push(dx);
        stats.dp.push(dp);
        stats.dx_stderr.push(if dx > 0.0 { se[2] / (2.0 * dx) } else { 0.0 });
        stats.dp_stderr.push(if dp > 0.0 { se[3] / (2.0 * dp) } else { 0.0 });
    }
    if stats.max_leakage > super::LEAKAGE_TOL {
        return Err(Error::Leakage {
            subsystem: NMR.into(),
            leakage: stats.max_leakage,
            time: tau,
        });
    }
    Ok(stats)
}

/// Exact ensemble `(E⟨x²⟩, E⟨p²⟩)` at time `t` for vacuum input, when the
/// pump phase diffuses with `⟨Δφ²⟩ = 2 c_D D t`.
///
/// With `G = 2κβ`, `σ² = 2c_D D` and `A_k = E[e^{ikφ}⟨b²⟩]`,
/// `B_k = E[e^{ikφ}⟨b†²⟩]`, `N_k = E[e^{ikφ}⟨2b†b+1⟩]`:
///
/// ```text
/// dA_k/dt = −iG N_{k−1} − (k²σ²/2) A_k
/// dB_k/dt =  iG N_{k+1} − (k²σ²/2) B_k
/// dN_k/dt = 2iG (A_{k+1} − B_{k−1}) − (k²σ²/2) N_k
/// ```
///
/// so each `(A_k, N_{k−1}, B_{k−2})` is a closed linear system.
pub fn phase_noise_moments_exact(kappa_beta: f64, linewidth: f64, diffusion_factor: f64, phi0: f64, t: f64) -> (f64, f64) {
    let g = 2.0 * kappa_beta;
    let s2 = 2.0 * diffusion_factor * linewidth;
    let i = C64::new(0.0, 1.0);
    let damp = |k: i32| C64::new(-0.5 * (k * k) as f64 * s2, 0.0);
    // returns (A_k, N_{k-1}, B_{k-2}) at time t
    let triple = |k: i32| -> Vector3<C64> {
        let m = Matrix3::new(
            damp(k),
            -i * g,
            C64::new(0.0, 0.0),
            2.0 * i * g,
            damp(k - 1),
            -2.0 * i * g,
            C64::new(0.0, 0.0),
            i * g,
            damp(k - 2),
        );
        let init = Vector3::new(C64::new(0.0, 0.0), C64::from_polar(1.0, (k - 1) as f64 * phi0), C64::new(0.0, 0.0));
        (m * C64::new(t, 0.0)).exp() * init
    };
    let a0 = triple(0)[0];
    let n0 = triple(1)[1];
    let b0 = triple(2)[2];
    let x2 = (a0 + b0 + n0).re;
    let p2 = (-(a0 + b0) + n0).re;
    (x2, p2)
}
