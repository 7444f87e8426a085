//! Euler–Maruyama simulation of the matrix-level processes (Brownian,
//! Ornstein-Uhlenbeck, sphere-projected) and of the coefficient-space SDE
//! driven by the carré-du-champ matrix `G = (Γ(a_i, a_j))`.
//!
//! Clock convention: a process with generator `L` has quadratic variation
//! `d⟨u⟩/dt = 2·Γ(u,u)`, so the Brownian coordinate step is
//! `√(2·Γ(u,u)·dt)·ξ` and the Ornstein-Uhlenbeck step adds drift `−u·dt`;
//! its stationary law is then exactly the variance-1 Gaussian ensemble.
//! The coefficient SDE uses `σσ^t = 2·G(a)` on the same clock, so matrix
//! and coefficient trajectories agree in law at equal times.

use crate::error::{Error, Result};
use crate::identities::{drift_operator, DriftKind, DriftOperatorKind, GeneratorCase};
use crate::matrix::{independent_coordinates, CliffordMatrix, Coordinate, EnsembleConfig};
use crate::poly::{self, MonicPolynomial, SpectrumSummary};
use crate::rng::stream_rng;
use crate::signature::CliffordSignature;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

/// Relative eigenvalue-clustering tolerance used for trajectory snapshots.
pub const SNAPSHOT_CLUSTER_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Scheme {
    EulerMaruyama,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SimProcess {
    /// Brownian motion of the block coordinates.
    Bm,
    /// Ornstein-Uhlenbeck: Brownian noise plus drift `−coordinate`.
    Ou,
    /// Brownian step followed by projection onto `‖φ(M)‖_F = 1`.
    Sphere,
    /// Coefficient-space SDE for the given generator case.
    CoeffSde,
}

/// With drift `−u` the Ornstein-Uhlenbeck relaxation time is 1, so runs
/// meant to reach stationarity should use `steps·dt ≥ 10` (ten relaxation
/// times).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SimConfig {
    pub dt: f64,
    pub steps: usize,
    pub scheme: Scheme,
    pub process: SimProcess,
    pub seed: u64,
    /// Snapshot every `stride` steps (the initial state is always
    /// recorded).
    pub stride: usize,
}

impl SimConfig {
    pub fn new(process: SimProcess, dt: f64, steps: usize, stride: usize, seed: u64) -> Self {
        SimConfig { dt, steps, scheme: Scheme::EulerMaruyama, process, seed, stride }
    }

    fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidArgument("dt must be > 0".into()));
        }
        if self.steps == 0 || self.stride == 0 {
            return Err(Error::InvalidArgument("steps and stride must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Time-stamped snapshots along one path.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub snapshots: Vec<S>,
}

pub type MatrixTrajectory = Trajectory<SpectrumSummary>;
pub type CoefficientTrajectory = Trajectory<MonicPolynomial>;

fn matrix_step<R: Rng>(
    m: &mut CliffordMatrix,
    coords: &[Coordinate],
    process: SimProcess,
    dt: f64,
    rng: &mut R,
) -> Result<()> {
    for c in coords {
        let g: f64 = StandardNormal.sample(rng);
        let noise = (2.0 * c.weight * dt).sqrt() * g;
        let drift = match process {
            SimProcess::Ou => -m.coordinate(c) * dt,
            _ => 0.0,
        };
        m.set_coordinate(c, m.coordinate(c) + drift + noise);
    }
    if let SimProcess::Sphere = process {
        let norm = m.realized_frobenius();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(
                "sphere projection is undefined at the zero matrix".into(),
            ));
        }
        *m = m.scale(1.0 / norm);
    }
    Ok(())
}

/// Simulate one matrix path from an explicit starting state, recording the
/// spectrum at stride boundaries.
pub fn simulate_matrix_from(
    config: &SimConfig,
    start: &CliffordMatrix,
    path_index: u64,
) -> Result<MatrixTrajectory> {
    config.validate()?;
    if config.process == SimProcess::Sphere && start.realized_frobenius() == 0.0 {
        return Err(Error::InvalidArgument(
            "sphere process cannot start at the zero matrix".into(),
        ));
    }
    if let SimProcess::CoeffSde = config.process {
        return Err(Error::InvalidArgument(
            "coefficient SDE runs through simulate_coefficients".into(),
        ));
    }
    let coords = independent_coordinates(start.sig(), start.n());
    let mut rng = stream_rng(config.seed, path_index);
    let mut m = start.clone();
    let mut times = Vec::new();
    let mut snapshots = Vec::new();
    let snapshot = |m: &CliffordMatrix| -> Result<SpectrumSummary> {
        poly::spectrum_of(&m.realize_raw(), SNAPSHOT_CLUSTER_TOL)
    };
    times.push(0.0);
    snapshots.push(snapshot(&m)?);
    for step in 1..=config.steps {
        matrix_step(&mut m, &coords, config.process, config.dt, &mut rng)?;
        if step % config.stride == 0 || step == config.steps {
            times.push(step as f64 * config.dt);
            snapshots.push(snapshot(&m)?);
        }
    }
    Ok(Trajectory { times, snapshots })
}

/// Simulate from the zero matrix (sphere paths start from a normalized
/// Gaussian sample instead, since zero cannot be projected).
pub fn simulate_matrix(config: &SimConfig, ensemble: &EnsembleConfig) -> Result<MatrixTrajectory> {
    let start = zero_or_sphere_start(config, ensemble, 0)?;
    simulate_matrix_from(config, &start, 0)
}

fn zero_or_sphere_start(
    config: &SimConfig,
    ensemble: &EnsembleConfig,
    path_index: u64,
) -> Result<CliffordMatrix> {
    ensemble.validate()?;
    let sig = CliffordSignature::standard(ensemble.p)?;
    match config.process {
        SimProcess::Sphere => {
            let cfg = EnsembleConfig {
                process: crate::matrix::EnsembleProcess::Sphere,
                ..*ensemble
            };
            crate::matrix::sample_blocks_indexed(&cfg, u64::MAX - path_index)
        }
        _ => Ok(CliffordMatrix::zero(sig, ensemble.n)),
    }
}

/// Final states of a parallel batch of matrix paths, one RNG stream per
/// path.
pub fn simulate_matrix_endpoints(
    config: &SimConfig,
    ensemble: &EnsembleConfig,
    paths: usize,
) -> Result<Vec<CliffordMatrix>> {
    config.validate()?;
    ensemble.validate()?;
    (0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let start = zero_or_sphere_start(config, ensemble, i)?;
            let coords = independent_coordinates(start.sig(), start.n());
            let mut rng = stream_rng(config.seed, i);
            let mut m = start;
            for _ in 0..config.steps {
                matrix_step(&mut m, &coords, config.process, config.dt, &mut rng)?;
            }
            Ok(m)
        })
        .collect()
}

/// Symmetric positive square root of `2·G·dt`, clamping tiny negative
/// eigenvalues; a genuinely negative eigenvalue means the state has left
/// the domain and the step must be rejected.
fn diffusion_factor(g: &DMatrix<f64>, dt: f64) -> Option<DMatrix<f64>> {
    let dim = g.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(g.clone(), f64::EPSILON, 200 * dim.max(5))?;
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut diag = DVector::zeros(dim);
    for i in 0..dim {
        let l = eig.eigenvalues[i];
        if l < -1e-9 * scale {
            return None;
        }
        diag[i] = (2.0 * l.max(0.0) * dt).sqrt();
    }
    let v = eig.eigenvectors;
    Some(&v * DMatrix::from_diagonal(&diag) * v.transpose())
}

/// Coefficient drift `b_i(a) = [X^i]·(α·P'' + β·P'²/P)` plus the case's
/// configured drift terms.
fn coefficient_drift(case: &GeneratorCase, p: &MonicPolynomial) -> Result<Vec<f64>> {
    let d = p.degree();
    let full = p.to_poly();
    let ddp = full.derivative().derivative();
    let mut drift = ddp.scale(case.alpha);
    if case.beta != 0.0 {
        let dp = full.derivative();
        let (q, _r) = dp.mul(&dp).div_rem(&full)?;
        drift = drift.add(&q.scale(case.beta));
    }
    match case.drift {
        DriftKind::None => {}
        DriftKind::Ou => {
            let euler = drift_operator(DriftOperatorKind::EulerD, case, p)?;
            drift = drift.sub(&euler.poly);
        }
        DriftKind::Sphere { ambient } => {
            // The spherical operator already contains the Euclidean part.
            drift =
                drift_operator(DriftOperatorKind::Sphere { ambient_override: ambient }, case, p)?
                    .poly;
        }
        DriftKind::Ball { pparam } => {
            drift = drift_operator(DriftOperatorKind::Ball { pparam }, case, p)?.poly;
        }
    }
    Ok((0..d).map(|i| drift.coeff(i)).collect())
}

const MAX_STEP_HALVINGS: u32 = 8;
const REAL_ROOT_TOL: f64 = 1e-7;

/// One path of the coefficient-space SDE, Euler–Maruyama with a
/// real-rooted-domain guard: a proposal outside the domain halves the step
/// and retries (≤ 8 halvings), then aborts with diagnostics. Domain
/// membership is judged by companion-spectrum realness, not by the sign of
/// the discriminant alone.
pub fn simulate_coefficients_path(
    config: &SimConfig,
    p0: &MonicPolynomial,
    case: &GeneratorCase,
    path_index: u64,
) -> Result<CoefficientTrajectory> {
    config.validate()?;
    if !poly::is_real_rooted(p0, REAL_ROOT_TOL) {
        return Err(Error::OutsideDomain("initial polynomial is not real-rooted".into()));
    }
    if p0.degree() >= 2 && poly::discriminant(p0)? < 0.0 {
        return Err(Error::OutsideDomain("initial discriminant is negative".into()));
    }
    let d = p0.degree();
    let mut rng = stream_rng(config.seed, path_index);
    let mut coeffs: Vec<f64> = p0.coeffs().to_vec();
    let mut times = vec![0.0];
    let mut snapshots = vec![p0.clone()];
    for step in 1..=config.steps {
        let mut remaining = config.dt;
        let mut h = config.dt;
        let mut halvings = 0u32;
        while remaining > 1e-15 * config.dt {
            let sub = h.min(remaining);
            let current = MonicPolynomial::new(coeffs.clone())?;
            let g = poly::gamma_coeff_matrix(&current);
            let drift = coefficient_drift(case, &current)?;
            let proposal = diffusion_factor(&g, sub).and_then(|sigma| {
                let xi =
                    DVector::from_iterator(d, (0..d).map(|_| StandardNormal.sample(&mut rng)));
                let noise = &sigma * xi;
                let next: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| a + drift[i] * sub + noise[i])
                    .collect();
                let next_poly = MonicPolynomial::new(next.clone()).ok()?;
                poly::is_real_rooted(&next_poly, REAL_ROOT_TOL).then_some(next)
            });
            match proposal {
                Some(next) => {
                    coeffs = next;
                    remaining -= sub;
                }
                None => {
                    halvings += 1;
                    if halvings > MAX_STEP_HALVINGS {
                        let t = (step - 1) as f64 * config.dt + (config.dt - remaining);
                        let discr = if d >= 2 {
                            poly::discriminant(&MonicPolynomial::new(coeffs.clone())?)?
                        } else {
                            f64::NAN
                        };
                        return Err(Error::SdeAborted {
                            t,
                            details: format!(
                                "step rejected {halvings} times at the real-rooted boundary \
                                 (discr = {discr:.3e})"
                            ),
                        });
                    }
                    h /= 2.0;
                }
            }
        }
        if step % config.stride == 0 || step == config.steps {
            times.push(step as f64 * config.dt);
            snapshots.push(MonicPolynomial::new(coeffs.clone())?);
        }
    }
    Ok(Trajectory { times, snapshots })
}

pub fn simulate_coefficients(
    config: &SimConfig,
    p0: &MonicPolynomial,
    case: &GeneratorCase,
) -> Result<CoefficientTrajectory> {
    simulate_coefficients_path(config, p0, case, 0)
}

/// Final polynomials of a parallel batch of coefficient paths.
pub fn simulate_coefficient_endpoints(
    config: &SimConfig,
    p0: &MonicPolynomial,
    case: &GeneratorCase,
    paths: usize,
) -> Result<Vec<MonicPolynomial>> {
    (0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let traj = simulate_coefficients_path(config, p0, case, i)?;
            Ok(traj.snapshots.last().unwrap().clone())
        })
        .collect()
}

/// Diagonal ball-operator process on `n` coordinates in the unit ball:
/// `dx = −pparam·x·dt + √2·(I − xxᵀ)^{1/2} dW`; returns the endpoint. As
/// `pparam ↓ n − 1` its invariant measure concentrates near the unit
/// sphere.
pub fn simulate_ball_diagonal(
    n: usize,
    pparam: f64,
    dt: f64,
    steps: usize,
    seed: u64,
    path_index: u64,
) -> Result<Vec<f64>> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidArgument("dt must be > 0".into()));
    }
    let mut rng = stream_rng(seed, path_index);
    let mut x = vec![0.0f64; n];
    for _ in 0..steps {
        let mut h = dt;
        for _attempt in 0..=MAX_STEP_HALVINGS {
            let norm_sq: f64 = x.iter().map(|v| v * v).sum();
            let xi: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            // (I − xxᵀ)^{1/2} = (I − uuᵀ) + √(1 − ‖x‖²)·uuᵀ for u = x/‖x‖.
            let dot: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
            let radial = if norm_sq > 0.0 {
                (1.0 - ((1.0 - norm_sq).max(0.0)).sqrt()) * dot / norm_sq
            } else {
                0.0
            };
            let proposal: Vec<f64> = (0..n)
                .map(|i| x[i] - pparam * x[i] * h + (2.0 * h).sqrt() * (xi[i] - radial * x[i]))
                .collect();
            let p_norm: f64 = proposal.iter().map(|v| v * v).sum();
            if p_norm < 1.0 {
                x = proposal;
                break;
            }
            h /= 2.0;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset::SubsetId;

    fn zero_start(n: usize, p: u32) -> CliffordMatrix {
        CliffordMatrix::zero(CliffordSignature::standard(p).unwrap(), n)
    }

    #[test]
    fn config_validation() {
        let bad = SimConfig::new(SimProcess::Bm, 0.0, 10, 1, 1);
        assert!(simulate_matrix_from(&bad, &zero_start(2, 0), 0).is_err());
        let cfg = SimConfig::new(SimProcess::Sphere, 0.01, 5, 1, 1);
        assert!(simulate_matrix_from(&cfg, &zero_start(2, 0), 0).is_err());
    }

    #[test]
    fn brownian_variances() {
        // Generator Δ_E: Var(diagonal) = 2T, Var(off-diagonal) = T.
        let cfg = SimConfig::new(SimProcess::Bm, 0.05, 20, 20, 77);
        let t = 1.0;
        let paths = 3000;
        let mut sum_diag = 0.0;
        let mut sum_off = 0.0;
        for i in 0..paths {
            let start = zero_start(2, 0);
            let coords = independent_coordinates(start.sig(), start.n());
            let mut rng = stream_rng(cfg.seed, i);
            let mut m = start;
            for _ in 0..cfg.steps {
                matrix_step(&mut m, &coords, cfg.process, cfg.dt, &mut rng).unwrap();
            }
            let b = m.block(SubsetId::EMPTY);
            sum_diag += b[(0, 0)] * b[(0, 0)];
            sum_off += b[(0, 1)] * b[(0, 1)];
        }
        let vd = sum_diag / paths as f64;
        let vo = sum_off / paths as f64;
        assert!((vd - 2.0 * t).abs() < 0.15, "diag var {vd}");
        assert!((vo - t).abs() < 0.08, "off var {vo}");
    }

    #[test]
    fn ou_stationary_second_moment() {
        // p = 0, n = 2 at t = 12: E[tr M²] → 1 + 1 + 2·½ = 3.
        let cfg = SimConfig::new(SimProcess::Ou, 0.02, 600, 600, 31);
        let ens = EnsembleConfig::gaussian(2, 0, 1.0, 0);
        let ms = simulate_matrix_endpoints(&cfg, &ens, 4000).unwrap();
        let mean: f64 = ms
            .iter()
            .map(|m| {
                let b = m.block(SubsetId::EMPTY);
                (b.transpose() * b).trace()
            })
            .sum::<f64>()
            / ms.len() as f64;
        assert!((mean - 3.0).abs() < 0.15, "E[tr M²] = {mean}");
    }

    #[test]
    fn ou_weak_generator_consistency() {
        // E[f(M_{t+dt}) − f(M_t)]/dt → L_OU f for f = u² (one diagonal
        // coordinate, Γ(u,u) = 1): L_OU f = 2 − 2u². The Euler step's bias
        // is +u²·dt, visible against the Monte Carlo error.
        let u0 = 1.0f64;
        let expect = 2.0 - 2.0 * u0 * u0;
        for (k, dt) in [(0u64, 1e-2f64), (1, 1e-3)] {
            let mut rng = stream_rng(123, k);
            let n = 2_000_000;
            let mut acc = 0.0;
            for _ in 0..n {
                let xi: f64 = StandardNormal.sample(&mut rng);
                let u1 = u0 - u0 * dt + (2.0 * dt).sqrt() * xi;
                acc += (u1 * u1 - u0 * u0) / dt;
            }
            let mean = acc / n as f64;
            let se = (8.0 * u0 * u0 / (n as f64 * dt)).sqrt();
            assert!(
                (mean - expect).abs() <= 4.0 * se + u0 * u0 * dt * 1.5,
                "dt={dt}: mean {mean} vs {expect} (se {se})"
            );
        }
    }

    #[test]
    fn sphere_stays_normalized() {
        let cfg = SimConfig::new(SimProcess::Sphere, 0.01, 50, 10, 9);
        let ens = EnsembleConfig::gaussian(2, 1, 1.0, 9);
        let traj = simulate_matrix(&cfg, &ens).unwrap();
        assert!(traj.snapshots.len() >= 6);
        for snap in &traj.snapshots {
            let norm: f64 = snap.eigenvalues.iter().map(|l| l * l).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-9, "‖φ(M)‖_F = {norm}");
        }
    }

    #[test]
    fn multiplicity_preserved_along_matrix_path() {
        let cfg = SimConfig::new(SimProcess::Ou, 0.05, 40, 8, 15);
        let ens = EnsembleConfig::gaussian(2, 1, 1.0, 15);
        let start = crate::matrix::sample_blocks(&ens).unwrap();
        let traj = simulate_matrix_from(&cfg, &start, 0).unwrap();
        assert!(traj.snapshots.len() >= 5);
        for snap in &traj.snapshots {
            for c in &snap.distinct {
                assert_eq!(c.multiplicity, 2, "clusters {:?}", snap.distinct);
            }
        }
        for w in traj.times.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn coefficient_sde_degree_one() {
        // d = 1: G = 1, so a₀ diffuses with quadratic-variation rate 2.
        let cfg = SimConfig::new(SimProcess::CoeffSde, 0.01, 100, 100, 3);
        let p0 = MonicPolynomial::new(vec![0.0]).unwrap();
        let case = GeneratorCase::diagonal();
        let finals = simulate_coefficient_endpoints(&cfg, &p0, &case, 3000).unwrap();
        let var: f64 = finals.iter().map(|p| p.coeffs()[0] * p.coeffs()[0]).sum::<f64>() / 3000.0;
        assert!((var - 2.0).abs() < 0.2, "Var(a₀) = {var} expected 2");
    }

    #[test]
    fn coefficient_sde_stays_real_rooted() {
        let cfg = SimConfig::new(SimProcess::CoeffSde, 5e-4, 400, 40, 11);
        let p0 = MonicPolynomial::from_roots(&[-1.0, 1.0]).unwrap();
        let case = GeneratorCase::real_symmetric();
        let traj = simulate_coefficients(&cfg, &p0, &case).unwrap();
        for p in &traj.snapshots {
            let d = poly::discriminant(p).unwrap();
            assert!(d >= 0.0, "discriminant went negative: {d}");
        }
        // Rejects a non-real-rooted start.
        let bad = MonicPolynomial::new(vec![1.0, 0.0]).unwrap();
        assert!(simulate_coefficients(&cfg, &bad, &case).is_err());
    }

    #[test]
    fn coefficient_sde_diagonal_moments() {
        // Diagonal case, d = 2, from (X−1)(X+1): a₁ = −(x₁+x₂) where the
        // roots are rate-2 Brownian motions from ±1 ⇒ Var(a₁) = 4T.
        let t = 0.25;
        let cfg = SimConfig::new(SimProcess::CoeffSde, 1e-3, 250, 250, 21);
        let p0 = MonicPolynomial::from_roots(&[-1.0, 1.0]).unwrap();
        let case = GeneratorCase::diagonal();
        let finals = simulate_coefficient_endpoints(&cfg, &p0, &case, 2500).unwrap();
        let a1: Vec<f64> = finals.iter().map(|p| p.coeffs()[1]).collect();
        let mean = a1.iter().sum::<f64>() / a1.len() as f64;
        let var = a1.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / a1.len() as f64;
        assert!(mean.abs() < 0.08, "mean(a₁) = {mean}");
        assert!((var - 4.0 * t).abs() < 0.12, "Var(a₁) = {var} expected {}", 4.0 * t);
    }

    #[test]
    fn ball_process_concentrates_near_sphere() {
        // pparam just above n − 1 piles mass near the boundary; a larger
        // pparam pulls it inward.
        let n = 3;
        let paths = 400;
        let radius = |pparam: f64, seed: u64| -> f64 {
            let mut acc = 0.0;
            for i in 0..paths {
                let x = simulate_ball_diagonal(n, pparam, 5e-3, 1500, seed, i as u64).unwrap();
                acc += x.iter().map(|v| v * v).sum::<f64>().sqrt();
            }
            acc / paths as f64
        };
        let near = radius(n as f64 - 0.5, 51);
        let far = radius(n as f64 + 6.0, 52);
        assert!(near > 0.8, "mean radius near the critical parameter: {near}");
        assert!(far < near - 0.1, "far {far} vs near {near}");
    }
}
