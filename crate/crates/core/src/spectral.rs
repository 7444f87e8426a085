//! Target spectral densities, an MCMC oracle sampler, two-sample tests,
//! the mean-characteristic-polynomial checks and the period-8 structure
//! table with empirical confirmation.

use crate::error::{Error, Result};
use crate::matrix::{sample_blocks_indexed, EnsembleConfig};
use crate::poly::{self, MonicPolynomial};
use crate::rng::stream_rng;
use crate::signature::predicted_multiplicity;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum WeightKind {
    /// `e^{−Σλ²/2}` — the normalizable reference weight.
    Gaussian,
    /// Repulsion factor only; the caller constrains the support to the
    /// sphere.
    SphereSupport,
}

/// The distinct-eigenvalue density `∏_{i<j}|λ_j − λ_i|^a · e^{−Σλ²/2}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectralLaw {
    pub n_distinct: usize,
    /// Level-repulsion exponent `a ∈ {1, 2, 4}`.
    pub repulsion: u32,
    pub weight: WeightKind,
}

impl SpectralLaw {
    pub fn gaussian(n_distinct: usize, repulsion: u32) -> Self {
        SpectralLaw { n_distinct, repulsion, weight: WeightKind::Gaussian }
    }
}

/// Unnormalized log-density on the ordered chamber `λ_1 < … < λ_k`; ties
/// or disorder give `−∞` rather than an error.
pub fn target_log_density(law: &SpectralLaw, lambdas: &[f64]) -> f64 {
    debug_assert_eq!(lambdas.len(), law.n_distinct);
    let mut log_rep = 0.0;
    for i in 0..lambdas.len() {
        for j in (i + 1)..lambdas.len() {
            let gap = lambdas[j] - lambdas[i];
            if gap <= 0.0 {
                return f64::NEG_INFINITY;
            }
            log_rep += gap.ln();
        }
    }
    let weight = match law.weight {
        WeightKind::Gaussian => -0.5 * lambdas.iter().map(|l| l * l).sum::<f64>(),
        WeightKind::SphereSupport => 0.0,
    };
    law.repulsion as f64 * log_rep + weight
}

#[derive(Clone, Debug, Serialize)]
pub struct McmcReport {
    pub samples: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
    /// Smallest effective sample size across the sorted marginals.
    pub ess: f64,
    /// Raised when `ess < count / 50`.
    pub ess_warning: bool,
}

// Thinning is sized so that residual autocorrelation is negligible next
// to iid sampling error in downstream KS comparisons.
const MCMC_BURN_IN: usize = 6000;
const MCMC_THIN: usize = 40;

/// Random-walk Metropolis sampler in the ordered chamber. Step size
/// adapts toward 30% acceptance during burn-in and is frozen afterwards;
/// the chain is thinned before being returned.
pub fn mcmc_oracle(law: &SpectralLaw, count: usize, seed: u64) -> Result<McmcReport> {
    if count == 0 {
        return Err(Error::InvalidArgument("need count ≥ 1".into()));
    }
    let k = law.n_distinct;
    let mut rng = stream_rng(seed, 0);
    // Spread starting points over the bulk of the Gaussian weight.
    let mut state: Vec<f64> = (0..k).map(|i| -1.0 + 2.0 * i as f64 / k.max(1) as f64).collect();
    let mut log_p = target_log_density(law, &state);
    let mut sigma = 2.4 / (k as f64).sqrt();
    let mut accepted = 0usize;
    let mut window_accepted = 0usize;
    let total = MCMC_BURN_IN + count * MCMC_THIN;
    let mut samples = Vec::with_capacity(count);
    let mut proposal = vec![0.0f64; k];
    for it in 0..total {
        for (pi, si) in proposal.iter_mut().zip(state.iter()) {
            let xi: f64 = StandardNormal.sample(&mut rng);
            *pi = si + sigma * xi;
        }
        let cand = target_log_density(law, &proposal);
        let accept = cand - log_p >= 0.0 || rng.random::<f64>().ln() < cand - log_p;
        if accept {
            state.copy_from_slice(&proposal);
            log_p = cand;
            accepted += 1;
            window_accepted += 1;
        }
        // Adapt during burn-in only, in windows of 200 proposals.
        if it < MCMC_BURN_IN && (it + 1) % 200 == 0 {
            let rate = window_accepted as f64 / 200.0;
            sigma *= ((rate - 0.3) * 1.5).exp();
            window_accepted = 0;
        }
        if it >= MCMC_BURN_IN && (it - MCMC_BURN_IN + 1).is_multiple_of(MCMC_THIN) {
            samples.push(state.clone());
        }
    }
    samples.truncate(count);
    let acceptance_rate = accepted as f64 / total as f64;
    let ess = (0..k)
        .map(|j| {
            let series: Vec<f64> = samples.iter().map(|s| s[j]).collect();
            effective_sample_size(&series)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(McmcReport { samples, acceptance_rate, ess, ess_warning: ess < count as f64 / 50.0 })
}

/// Effective sample size from the initial-positive-sequence estimate of
/// the autocorrelation time.
pub fn effective_sample_size(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 8 {
        return n as f64;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return n as f64;
    }
    let autocov = |lag: usize| -> f64 {
        series[..n - lag]
            .iter()
            .zip(&series[lag..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum::<f64>()
            / n as f64
    };
    let mut tau = 1.0;
    let mut lag = 1;
    while lag + 1 < n / 2 {
        let pair = autocov(lag) + autocov(lag + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair / var;
        lag += 2;
    }
    n as f64 / tau
}

/// Asymptotic two-sided p-value of the two-sample KS statistic.
fn ks_p_value(d: f64, n: usize, m: usize) -> f64 {
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    if lambda < 1.0 {
        // Dual series, accurate for small λ.
        let mut f = 0.0;
        let c = (2.0 * std::f64::consts::PI).sqrt() / lambda;
        for j in (1..=9).step_by(2) {
            f += (-(j * j) as f64 * std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        }
        (1.0 - c * f).clamp(0.0, 1.0)
    } else {
        let mut q = 0.0;
        for j in 1..=100 {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            q += sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        }
        (2.0 * q).clamp(0.0, 1.0)
    }
}

fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] == v {
            i += 1;
        }
        while j < m && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

#[derive(Clone, Copy, Debug)]
pub struct TwoSampleConfig {
    pub permutations: usize,
    pub seed: u64,
    /// Cap per side for the energy statistic (deterministic strided
    /// subsample); the KS marginals always use everything.
    pub max_energy_points: usize,
}

impl Default for TwoSampleConfig {
    fn default() -> Self {
        TwoSampleConfig { permutations: 200, seed: 0, max_energy_points: 1500 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoSampleReport {
    pub ks_stats: Vec<f64>,
    pub ks_p_values: Vec<f64>,
    /// Bonferroni-combined KS p-value across the sorted marginals.
    pub ks_p_bonferroni: f64,
    pub energy_stat: f64,
    pub energy_p: f64,
    /// Bonferroni combination of the KS and energy families.
    pub combined_p: f64,
}

fn strided_subsample(v: &[Vec<f64>], cap: usize) -> Vec<&Vec<f64>> {
    if v.len() <= cap {
        return v.iter().collect();
    }
    (0..cap).map(|i| &v[i * v.len() / cap]).collect()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn energy_from_distances(d: &[Vec<f64>], idx_a: &[usize], idx_b: &[usize]) -> f64 {
    let (n, m) = (idx_a.len() as f64, idx_b.len() as f64);
    let mut cross = 0.0;
    for &i in idx_a {
        for &j in idx_b {
            cross += d[i][j];
        }
    }
    let mut within_a = 0.0;
    for (u, &i) in idx_a.iter().enumerate() {
        for &j in &idx_a[u + 1..] {
            within_a += d[i][j];
        }
    }
    let mut within_b = 0.0;
    for (u, &i) in idx_b.iter().enumerate() {
        for &j in &idx_b[u + 1..] {
            within_b += d[i][j];
        }
    }
    2.0 * cross / (n * m) - 2.0 * within_a / (n * n) - 2.0 * within_b / (m * m)
}

/// Sorted-marginal KS tests (Bonferroni-combined) plus an energy-distance
/// statistic with a permutation p-value.
pub fn two_sample_test(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    cfg: &TwoSampleConfig,
) -> Result<TwoSampleReport> {
    if a.len() < 100 || b.len() < 100 {
        return Err(Error::InvalidArgument("need at least 100 points per sample".into()));
    }
    let k = a[0].len();
    if k == 0
        || a.iter().any(|v| v.len() != k)
        || b.iter().any(|v| v.len() != k)
    {
        return Err(Error::Mismatch("sample vectors must share a nonzero dimension".into()));
    }
    if cfg.permutations < 200 {
        return Err(Error::InvalidArgument("need at least 200 permutations".into()));
    }

    let mut ks_stats = Vec::with_capacity(k);
    let mut ks_ps = Vec::with_capacity(k);
    for j in 0..k {
        let xs: Vec<f64> = a.iter().map(|v| v[j]).collect();
        let ys: Vec<f64> = b.iter().map(|v| v[j]).collect();
        let d = ks_statistic(&xs, &ys);
        ks_stats.push(d);
        ks_ps.push(ks_p_value(d, xs.len(), ys.len()));
    }
    let ks_bonf = (k as f64 * ks_ps.iter().cloned().fold(1.0f64, f64::min)).min(1.0);

    // Energy statistic on a capped, deterministic subsample.
    let sub_a = strided_subsample(a, cfg.max_energy_points);
    let sub_b = strided_subsample(b, cfg.max_energy_points);
    let pooled: Vec<&Vec<f64>> = sub_a.iter().chain(sub_b.iter()).cloned().collect();
    let total = pooled.len();
    let mut dist = vec![vec![0.0f64; total]; total];
    for i in 0..total {
        for j in (i + 1)..total {
            let d = euclid(pooled[i], pooled[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let idx_a: Vec<usize> = (0..sub_a.len()).collect();
    let idx_b: Vec<usize> = (sub_a.len()..total).collect();
    let observed = energy_from_distances(&dist, &idx_a, &idx_b);
    let mut rng = stream_rng(cfg.seed, 0x7e57);
    let mut indices: Vec<usize> = (0..total).collect();
    let mut at_least = 1usize;
    for _ in 0..cfg.permutations {
        indices.shuffle(&mut rng);
        let pa = &indices[..sub_a.len()];
        let pb = &indices[sub_a.len()..];
        if energy_from_distances(&dist, pa, pb) >= observed {
            at_least += 1;
        }
    }
    let energy_p = at_least as f64 / (cfg.permutations + 1) as f64;

    let combined = (2.0 * ks_bonf.min(energy_p)).min(1.0);
    Ok(TwoSampleReport {
        ks_stats,
        ks_p_values: ks_ps,
        ks_p_bonferroni: ks_bonf,
        energy_stat: observed,
        energy_p,
        combined_p: combined,
    })
}

/// Distinct eigenvalues of the variance-1 Gaussian ensemble follow the
/// unit law `∏|Δλ|^a e^{−Σλ²/2}` scaled by this factor
/// (`‖φ‖²_F = 2^p·Σ‖M^A‖²` spreads the Gaussian weight across the
/// multiplicity).
pub fn gaussian_scale_factor(p: u32) -> f64 {
    ((1u64 << p) as f64 / predicted_multiplicity(p).multiplicity as f64).sqrt()
}

/// Sorted distinct-eigenvalue vectors from the Gaussian matrix ensemble.
/// For `p ≡ 3 (mod 4)` each sampled matrix contributes its two ideal
/// factors as separate vectors. With `unit_scale` the vectors are divided
/// by [`gaussian_scale_factor`] so they target the unit law.
pub fn sample_distinct_spectra(
    p: u32,
    n: usize,
    count: usize,
    seed: u64,
    unit_scale: bool,
) -> Result<Vec<Vec<f64>>> {
    let pred = predicted_multiplicity(p);
    let mult = pred.multiplicity as usize;
    let scale = if unit_scale { gaussian_scale_factor(p) } else { 1.0 };
    let ens = EnsembleConfig::gaussian(n, p, 1.0, seed);
    let per_matrix = if pred.splits { 2 } else { 1 };
    let matrices = count.div_ceil(per_matrix);
    let mut vectors: Vec<Vec<f64>> = (0..matrices as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<Vec<f64>>> {
            let m = sample_blocks_indexed(&ens, i)?;
            let mut out = Vec::with_capacity(per_matrix);
            let spectra: Vec<Vec<f64>> = if pred.splits {
                let (plus, minus) = m.ideal_factors()?;
                vec![
                    poly::symmetric_eigenvalues(&plus.realize_raw())?,
                    poly::symmetric_eigenvalues(&minus.realize_raw())?,
                ]
            } else {
                vec![poly::symmetric_eigenvalues(&m.realize_raw())?]
            };
            for evs in spectra {
                let summary = poly::cluster_sorted(evs, 1e-7);
                if summary.multiplicities().iter().any(|&c| c != mult) {
                    return Err(Error::Mismatch(format!(
                        "sample {i}: clusters {:?} differ from the expected multiplicity {mult}",
                        summary.multiplicities()
                    )));
                }
                out.push(summary.distinct_values().iter().map(|l| l / scale).collect());
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    vectors.truncate(count);
    Ok(vectors)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeanCharpolyMode {
    /// Stationary matrix Ornstein-Uhlenbeck: the mean polynomial satisfies
    /// `Q'' − 2XQ' + 2nQ = 0` (a Hermite polynomial after rescaling).
    OuHermite,
    /// Independent stationary OU roots: the mean polynomial is `X^n`.
    DiagonalPower,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanCharpolyReport {
    pub mean_coeffs: Vec<f64>,
    pub coeff_standard_errors: Vec<f64>,
    /// Per-coefficient residual of the checked identity and its standard
    /// error.
    pub residuals: Vec<f64>,
    pub residual_standard_errors: Vec<f64>,
    pub within_three_se: bool,
}

/// Monte-Carlo mean of sampled characteristic polynomials, with the ODE
/// (or power-law) residual judged against three standard errors per
/// coefficient.
pub fn mean_charpoly_check(
    samples: &[MonicPolynomial],
    mode: MeanCharpolyMode,
) -> Result<MeanCharpolyReport> {
    let count = samples.len();
    if count < 100 {
        return Err(Error::InvalidArgument("need at least 100 sampled polynomials".into()));
    }
    let n = samples[0].degree();
    if samples.iter().any(|p| p.degree() != n) {
        return Err(Error::Mismatch("all samples must share one degree".into()));
    }
    let nf = count as f64;
    let mut mean = vec![0.0f64; n];
    for p in samples {
        for (m, c) in mean.iter_mut().zip(p.coeffs()) {
            *m += c;
        }
    }
    for m in mean.iter_mut() {
        *m /= nf;
    }
    // Sample covariance of the coefficient vector.
    let mut cov = vec![vec![0.0f64; n]; n];
    for p in samples {
        for i in 0..n {
            let di = p.coeffs()[i] - mean[i];
            for j in 0..n {
                cov[i][j] += di * (p.coeffs()[j] - mean[j]);
            }
        }
    }
    for row in cov.iter_mut() {
        for v in row.iter_mut() {
            *v /= nf - 1.0;
        }
    }
    let se: Vec<f64> = (0..n).map(|i| (cov[i][i] / nf).sqrt()).collect();

    // Residual r_i is a linear functional c·q_{i+2} + c'·q_i of the mean.
    let q = |i: usize| -> f64 {
        if i < n {
            mean[i]
        } else if i == n {
            1.0
        } else {
            0.0
        }
    };
    let mut residuals = Vec::with_capacity(n);
    let mut res_se = Vec::with_capacity(n);
    for i in 0..n {
        let (r, weights): (f64, Vec<(usize, f64)>) = match mode {
            MeanCharpolyMode::OuHermite => {
                let c2 = ((i + 2) * (i + 1)) as f64;
                let c0 = 2.0 * (n - i) as f64;
                let mut w = vec![(i, c0)];
                if i + 2 < n {
                    w.push((i + 2, c2));
                }
                (c2 * q(i + 2) + c0 * q(i), w)
            }
            MeanCharpolyMode::DiagonalPower => (q(i), vec![(i, 1.0)]),
        };
        let mut var = 0.0;
        for &(a, wa) in &weights {
            for &(b, wb) in &weights {
                var += wa * wb * cov[a][b];
            }
        }
        residuals.push(r);
        res_se.push((var / nf).sqrt());
    }
    let within = residuals
        .iter()
        .zip(&res_se)
        .all(|(r, s)| r.abs() <= 3.0 * s.max(1e-12));
    Ok(MeanCharpolyReport {
        mean_coeffs: mean,
        coeff_standard_errors: se,
        residuals,
        residual_standard_errors: res_se,
        within_three_se: within,
    })
}

/// One row of the period-8 structure table.
#[derive(Clone, Debug, Serialize)]
pub struct BottRow {
    pub p: u32,
    pub structure: String,
    /// Real dimension of the irreducible representation.
    pub d: u64,
    /// Root multiplicity of the characteristic polynomial (per factor for
    /// the split rows).
    pub alpha: u64,
    /// Level-repulsion exponent of the distinct-eigenvalue law.
    pub a: u32,
    pub splits: bool,
    pub verification: Option<BottVerification>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BottVerification {
    pub samples: usize,
    /// Fraction of samples whose every cluster has the predicted
    /// multiplicity.
    pub multiplicity_fraction: f64,
    /// Combined two-sample p-value of the distinct-eigenvalue law against
    /// the MCMC oracle, when the law was checked.
    pub law_p_value: Option<f64>,
    pub pass: bool,
}

fn structure_label(p: u32) -> String {
    const BASE: [&str; 9] =
        ["R", "C", "H", "H⊕H", "H[2]", "C[4]", "R[8]", "R[8]⊕R[8]", "R[16]"];
    if p <= 8 {
        BASE[p as usize].to_string()
    } else {
        format!("R[16]⊗{}", structure_label(p - 8))
    }
}

/// Rows `1..=p_max` of the structure table: rows 1–8 from the derivation
/// chain, later rows by tensoring with `R[16]` (period 8).
pub fn bott_table(p_max: u32) -> Result<Vec<BottRow>> {
    if p_max < 1 {
        return Err(Error::InvalidArgument("p_max must be ≥ 1".into()));
    }
    Ok((1..=p_max)
        .map(|p| {
            let pred = predicted_multiplicity(p);
            BottRow {
                p,
                structure: structure_label(p),
                d: pred.multiplicity,
                alpha: pred.multiplicity,
                a: pred.case.repulsion_exponent(),
                splits: pred.splits,
                verification: None,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug)]
pub struct BottVerifyConfig {
    pub n: usize,
    /// Matrices per row for the multiplicity check.
    pub samples: usize,
    /// Two-sample size per side for the law check.
    pub law_samples: usize,
    pub seed: u64,
    /// Verify the spectral law empirically for `p ≤ law_p_max`; above it
    /// only multiplicities are checked.
    pub law_p_max: u32,
    /// Verify nothing above this `p`.
    pub verify_p_max: u32,
}

impl Default for BottVerifyConfig {
    fn default() -> Self {
        BottVerifyConfig { n: 1, samples: 200, law_samples: 4000, seed: 42, law_p_max: 6, verify_p_max: 8 }
    }
}

/// Structure table with empirical confirmation: clustering multiplicities
/// for every verified row, plus a two-sample law comparison against the
/// MCMC oracle where configured.
pub fn bott_table_verified(p_max: u32, cfg: &BottVerifyConfig) -> Result<Vec<BottRow>> {
    let mut rows = bott_table(p_max)?;
    for row in rows.iter_mut() {
        if row.p > cfg.verify_p_max {
            continue;
        }
        row.verification = Some(verify_bott_row(row, cfg)?);
    }
    Ok(rows)
}

fn verify_bott_row(row: &BottRow, cfg: &BottVerifyConfig) -> Result<BottVerification> {
    let mult = row.alpha as usize;
    let ens = EnsembleConfig::gaussian(cfg.n, row.p, 1.0, cfg.seed.wrapping_add(row.p as u64));
    let ok_count: usize = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let m = sample_blocks_indexed(&ens, i)?;
            let spectra: Vec<Vec<f64>> = if row.splits {
                let (plus, minus) = m.ideal_factors()?;
                vec![
                    poly::symmetric_eigenvalues(&plus.realize_raw())?,
                    poly::symmetric_eigenvalues(&minus.realize_raw())?,
                ]
            } else {
                vec![poly::symmetric_eigenvalues(&m.realize_raw())?]
            };
            let all_ok = spectra.into_iter().all(|evs| {
                let summary = poly::cluster_sorted(evs, 1e-7);
                summary.multiplicities().iter().all(|&c| c == mult)
            });
            Ok(all_ok as usize)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let fraction = ok_count as f64 / cfg.samples as f64;

    // Distinct-eigenvalue law against the MCMC oracle, on the unit scale.
    let mut law_p = None;
    if row.p <= cfg.law_p_max {
        let k = cfg.n * (1usize << row.p) / mult / if row.splits { 2 } else { 1 };
        if k >= 1 {
            let matrix_side = sample_distinct_spectra(
                row.p,
                cfg.n,
                cfg.law_samples,
                cfg.seed.wrapping_add(1000 + row.p as u64),
                true,
            )?;
            let law = SpectralLaw::gaussian(k, row.a);
            let oracle =
                mcmc_oracle(&law, cfg.law_samples, cfg.seed.wrapping_add(2000 + row.p as u64))?;
            let report = two_sample_test(
                &matrix_side,
                &oracle.samples,
                &TwoSampleConfig { seed: cfg.seed, ..Default::default() },
            )?;
            law_p = Some(report.combined_p);
        }
    }
    let pass = fraction == 1.0 && law_p.is_none_or(|p| p > 0.01);
    Ok(BottVerification {
        samples: cfg.samples,
        multiplicity_fraction: fraction,
        law_p_value: law_p,
        pass,
    })
}

/// Sample stationary-OU characteristic polynomials (the stationary law of
/// the matrix OU process is exactly the variance-1 Gaussian ensemble).
pub fn stationary_ou_charpolys(p: u32, n: usize, count: usize, seed: u64) -> Result<Vec<MonicPolynomial>> {
    let ens = EnsembleConfig::gaussian(n, p, 1.0, seed);
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let m = sample_blocks_indexed(&ens, i)?;
            let evs = poly::symmetric_eigenvalues(&m.realize_raw())?;
            MonicPolynomial::from_roots(&evs)
        })
        .collect()
}

/// Mean polynomials for the diagonal case: independent standard Gaussian
/// roots.
pub fn diagonal_stationary_charpolys(n: usize, count: usize, seed: u64) -> Result<Vec<MonicPolynomial>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let roots: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            MonicPolynomial::from_roots(&roots)
        })
        .collect()
}
