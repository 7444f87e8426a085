//! Numeric assembly of the carré du champ `Γ(P(X), P(Y))` and generator
//! `L(P(X))` acting on characteristic polynomials, compared against their
//! closed forms; coefficient fitting and the multiplicity equation.
//!
//! The assembled quantities are sums over the independent matrix
//! coordinates `u` with diagonal metric weights `Γ(u,u)`:
//!
//! ```text
//! Γ(P(X), P(Y)) = Σ_u Γ(u,u) · ∂_u P(X) · ∂_u P(Y)
//! L(P(X))       = Σ_u Γ(u,u) · ∂²_{uu} P(X)
//! ```
//!
//! Derivatives come from the resolvent: with `V(X) = (X·Id − φ(M))^{-1}`
//! and `S_u = ∂φ/∂u`,
//! `∂_u P = −P·tr(V S_u)` and `∂²_{uu} P = P·[(tr V S_u)² − tr(V S_u V S_u)]`.
//! Central finite differences are available as an independent cross-check;
//! the analytic path is the product of record.

use crate::error::{Error, Result};
use crate::matrix::{
    independent_coordinates, sample_blocks_indexed, CliffordMatrix, Coordinate, EnsembleConfig,
};
use crate::poly::{self, MonicPolynomial, Poly, SpectrumSummary};
use crate::signature::{self};
use crate::subset::SubsetId;
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum CaseLabel {
    /// Processes directly on the roots (elementary-symmetric coordinates).
    Diagonal,
    RealSym,
    Hermitian,
    Quaternion,
    Clifford(u32),
}

impl CaseLabel {
    pub fn name(&self) -> String {
        match self {
            CaseLabel::Diagonal => "diagonal".into(),
            CaseLabel::RealSym => "real".into(),
            CaseLabel::Hermitian => "hermitian".into(),
            CaseLabel::Quaternion => "quaternion".into(),
            CaseLabel::Clifford(p) => format!("clifford({p})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DriftKind {
    None,
    Ou,
    /// Spherical generator; `ambient` overrides the embedding dimension
    /// `N = d(d+1)/2` when set.
    Sphere { ambient: Option<f64> },
    /// Ball-operator family with its concentration parameter.
    Ball { pparam: f64 },
}

/// One generator case: the closed-form constants of
/// `L(P) = α·P'' + β·P'²/P` and `Γ(P(X),P(Y)) = γ/(Y−X)·(P'(X)P(Y) − P'(Y)P(X))`,
/// together with what has to be sampled to realize it.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GeneratorCase {
    pub label: CaseLabel,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Number of generators of the Clifford matrix family the identities
    /// act on (`p − 1` for the ideal-split cases).
    pub matrix_p: u32,
    /// Multiplier on the coordinate metric: 1 in the plain cases, 2 for an
    /// ideal factor (each factor block is a sum of two independent blocks
    /// of the full family).
    pub metric_scale: f64,
    pub drift: DriftKind,
}

/// `C(p) = 2^p − ½·Σ_A (A|A)`, the coefficient of `trace U²` in the
/// Euclidean generator on a standard Clifford family (`p ≢ 3 mod 4`).
pub fn clifford_l_constant(p: u32) -> f64 {
    (1u64 << p) as f64 - 0.5 * signature::self_sign_sum_closed(p) as f64
}

impl GeneratorCase {
    /// Processes on the roots themselves: `L(P) = 0`, `γ = 1`.
    pub fn diagonal() -> Self {
        GeneratorCase {
            label: CaseLabel::Diagonal,
            alpha: 0.0,
            beta: 0.0,
            gamma: 1.0,
            matrix_p: 0,
            metric_scale: 1.0,
            drift: DriftKind::None,
        }
    }

    pub fn real_symmetric() -> Self {
        Self::clifford_labeled(0, CaseLabel::RealSym)
    }

    pub fn hermitian() -> Self {
        Self::clifford_labeled(1, CaseLabel::Hermitian)
    }

    pub fn quaternion() -> Self {
        Self::clifford_labeled(2, CaseLabel::Quaternion)
    }

    fn clifford_labeled(p: u32, label: CaseLabel) -> Self {
        debug_assert!(p % 4 != 3);
        let c = clifford_l_constant(p);
        GeneratorCase {
            label,
            alpha: -c,
            beta: c - 0.5,
            gamma: (1u64 << p) as f64,
            matrix_p: p,
            metric_scale: 1.0,
            drift: DriftKind::None,
        }
    }

    /// The Euclidean case on `p` generators. For `p ≡ 3 (mod 4)` the
    /// characteristic polynomial factors over the two ideals and the
    /// returned case describes one factor: a standard family on `p − 1`
    /// generators whose blocks are sums of two independent blocks of the
    /// full family, hence a doubled metric and doubled constants.
    pub fn clifford(p: u32) -> Result<Self> {
        if p > signature::MAX_GENERATORS {
            return Err(Error::UnsupportedP { p, max: signature::MAX_GENERATORS });
        }
        if p % 4 == 3 {
            let base = Self::clifford_labeled(p - 1, CaseLabel::Clifford(p));
            return Ok(GeneratorCase {
                alpha: 2.0 * base.alpha,
                beta: 2.0 * base.beta,
                gamma: 2.0 * base.gamma,
                matrix_p: p - 1,
                metric_scale: 2.0,
                ..base
            });
        }
        Ok(Self::clifford_labeled(p, CaseLabel::Clifford(p)))
    }

    pub fn with_drift(mut self, drift: DriftKind) -> Self {
        self.drift = drift;
        self
    }
}

/// Closed form `γ/(Y−X)·(P'(X)P(Y) − P'(Y)P(X))`, with the limit
/// `γ·(P'(X)² − P(X)P''(X))` on the diagonal `X = Y`.
pub fn gamma_p_closed(case: &GeneratorCase, p: &MonicPolynomial, x: f64, y: f64) -> f64 {
    let dp = p.derivative();
    if x == y {
        let ddp = dp.derivative();
        return case.gamma * (dp.eval(x) * dp.eval(x) - p.eval(x) * ddp.eval(x));
    }
    case.gamma / (y - x) * (dp.eval(x) * p.eval(y) - dp.eval(y) * p.eval(x))
}

/// Closed form `α·P''(X) + β·P'(X)²/P(X)`; rejects evaluation at a root.
pub fn l_p_closed(case: &GeneratorCase, p: &MonicPolynomial, x: f64) -> Result<f64> {
    let px = p.eval(x);
    if px == 0.0 {
        return Err(Error::SingularResolvent(format!("P({x}) = 0")));
    }
    let dp = p.derivative();
    let ddp = dp.derivative();
    Ok(case.alpha * ddp.eval(x) + case.beta * dp.eval(x) * dp.eval(x) / px)
}

/// Product-form evaluation of `P`, `P'`, `P''` from the roots; well
/// conditioned at any degree, unlike coefficient Horner.
#[derive(Clone, Debug)]
pub struct RootedPoly<'a> {
    pub roots: &'a [f64],
}

impl<'a> RootedPoly<'a> {
    pub fn eval(&self, x: f64) -> f64 {
        self.roots.iter().map(|&r| x - r).product()
    }

    /// `(P, P', P'')` at `x`, via `P' = P·s₁`, `P'' = P·(s₁² − s₂)` with
    /// `s_k = Σ (x − λ_i)^{−k}`.
    pub fn eval_derivs(&self, x: f64) -> (f64, f64, f64) {
        let p = self.eval(x);
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for &r in self.roots {
            let inv = 1.0 / (x - r);
            s1 += inv;
            s2 += inv * inv;
        }
        (p, p * s1, p * (s1 * s1 - s2))
    }
}

fn gamma_closed_rooted(gamma: f64, roots: &[f64], x: f64, y: f64) -> f64 {
    let rp = RootedPoly { roots };
    let (px, dpx, _) = rp.eval_derivs(x);
    let (py, dpy, _) = rp.eval_derivs(y);
    gamma / (y - x) * (dpx * py - dpy * px)
}

fn l_closed_rooted(case: &GeneratorCase, roots: &[f64], x: f64) -> f64 {
    let rp = RootedPoly { roots };
    let (px, dpx, ddpx) = rp.eval_derivs(x);
    case.alpha * ddpx + case.beta * dpx * dpx / px
}

/// Sparse pattern of `∂φ(M)/∂u` for one coordinate: entry positions and
/// signs in the realized matrix.
struct CoordinatePattern {
    weight: f64,
    entries: Vec<(usize, usize, f64)>,
}

/// Assembles Γ and L numerically for one Clifford matrix.
pub struct IdentityAssembler {
    realized: DMatrix<f64>,
    patterns: Vec<CoordinatePattern>,
    coords: Vec<Coordinate>,
    eigenvalues: Vec<f64>,
    metric_scale: f64,
    euler_factor: f64,
}

impl IdentityAssembler {
    pub fn new(case: &GeneratorCase, m: &CliffordMatrix) -> Result<Self> {
        if m.sig().p() != case.matrix_p {
            return Err(Error::Mismatch(format!(
                "case expects a p = {} matrix family, got p = {}",
                case.matrix_p,
                m.sig().p()
            )));
        }
        Self::with_metric_scale(m, case.metric_scale)
    }

    /// Assembler over an explicit metric multiplier (the case-independent
    /// entry point).
    pub fn with_metric_scale(m: &CliffordMatrix, metric_scale: f64) -> Result<Self> {
        let realized = m.realize()?;
        let sig = m.sig();
        let n = m.n();
        let p = sig.p();
        let coords = independent_coordinates(sig, n);
        let mut patterns = Vec::with_capacity(coords.len());
        for c in &coords {
            let self_sign = sig.self_sign(c.block) as f64;
            let mut entries = Vec::with_capacity(2 * sig.blade_count());
            for d in SubsetId::all(p) {
                let sign = sig.pair_sign(c.block, d) as f64;
                let row_block = c.block.sym_diff(d).bits() as usize * n;
                let col_block = d.bits() as usize * n;
                entries.push((row_block + c.row, col_block + c.col, sign));
                if c.row != c.col {
                    entries.push((row_block + c.col, col_block + c.row, sign * self_sign));
                }
            }
            patterns.push(CoordinatePattern { weight: c.weight, entries });
        }
        let eigenvalues = poly::symmetric_eigenvalues(realized.matrix())?;
        Ok(IdentityAssembler {
            realized: realized.into_inner(),
            patterns,
            coords,
            eigenvalues,
            metric_scale,
            euler_factor: (1u64 << p) as f64,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.realized.nrows()
    }

    /// Monic characteristic polynomial value `det(x·Id − φ(M))` via LU.
    pub fn charpoly_value(&self, x: f64) -> f64 {
        let mut a = -&self.realized;
        for i in 0..a.nrows() {
            a[(i, i)] += x;
        }
        a.lu().determinant()
    }

    fn resolvent(&self, x: f64) -> Result<DMatrix<f64>> {
        let mut a = -&self.realized;
        for i in 0..a.nrows() {
            a[(i, i)] += x;
        }
        a.try_inverse()
            .ok_or_else(|| Error::SingularResolvent(format!("X = {x} is in the spectrum")))
    }

    /// `P(x)` and the per-coordinate gradient `∂_u P(x)`.
    pub fn gradient(&self, x: f64) -> Result<(f64, Vec<f64>)> {
        let v = self.resolvent(x)?;
        let px = self.charpoly_value(x);
        let grad = self
            .patterns
            .iter()
            .map(|pat| {
                let trace: f64 = pat.entries.iter().map(|&(r, c, s)| s * v[(c, r)]).sum();
                -px * trace
            })
            .collect();
        Ok((px, grad))
    }

    /// `P(x)` and the diagonal second derivatives `∂²_{uu} P(x)`.
    pub fn hessian_diag(&self, x: f64) -> Result<(f64, Vec<f64>)> {
        let v = self.resolvent(x)?;
        let px = self.charpoly_value(x);
        let hess = self
            .patterns
            .iter()
            .map(|pat| {
                let t1: f64 = pat.entries.iter().map(|&(r, c, s)| s * v[(c, r)]).sum();
                let mut t2 = 0.0;
                for &(r1, c1, s1) in &pat.entries {
                    for &(r2, c2, s2) in &pat.entries {
                        t2 += s1 * s2 * v[(c1, r2)] * v[(c2, r1)];
                    }
                }
                px * (t1 * t1 - t2)
            })
            .collect();
        Ok((px, hess))
    }

    /// Assembled `Γ(P(X), P(Y)) = Σ_u Γ(u,u)·∂_u P(X)·∂_u P(Y)`.
    pub fn gamma_numeric(&self, x: f64, y: f64) -> Result<f64> {
        let (_, gx) = self.gradient(x)?;
        let gy = if x == y { None } else { Some(self.gradient(y)?.1) };
        let gy = gy.as_ref().unwrap_or(&gx);
        Ok(self
            .patterns
            .iter()
            .zip(gx.iter().zip(gy.iter()))
            .map(|(pat, (a, b))| pat.weight * self.metric_scale * a * b)
            .sum())
    }

    /// Assembled `L(P(X)) = Σ_u Γ(u,u)·∂²_{uu} P(X)` (all coordinate
    /// drifts vanish in the Euclidean case).
    pub fn l_numeric(&self, x: f64) -> Result<f64> {
        let (_, hess) = self.hessian_diag(x)?;
        Ok(self
            .patterns
            .iter()
            .zip(hess.iter())
            .map(|(pat, h)| pat.weight * self.metric_scale * h)
            .sum())
    }

    /// Assembled Euler operator `D(P)(x) = 2^p·Σ_u u·∂_u P(x)`.
    pub fn euler_numeric(&self, m: &CliffordMatrix, x: f64) -> Result<f64> {
        let (_, grad) = self.gradient(x)?;
        Ok(self.euler_factor
            * self
                .coords
                .iter()
                .zip(grad.iter())
                .map(|(c, g)| m.coordinate(c) * g)
                .sum::<f64>())
    }

    /// Assembled `D²(P)(x) = 2^{2p}·[Σ_u u ∂_u P + Σ_{u,v} u v ∂²_{uv} P]`,
    /// using the full mixed Hessian.
    pub fn euler_squared_numeric(&self, m: &CliffordMatrix, x: f64) -> Result<f64> {
        let v = self.resolvent(x)?;
        let px = self.charpoly_value(x);
        let values: Vec<f64> = self.coords.iter().map(|c| m.coordinate(c)).collect();
        let traces: Vec<f64> = self
            .patterns
            .iter()
            .map(|pat| pat.entries.iter().map(|&(r, c, s)| s * v[(c, r)]).sum())
            .collect();
        let first: f64 = values
            .iter()
            .zip(traces.iter())
            .map(|(u, t)| u * (-px * t))
            .sum();
        let mut second = 0.0;
        for (i, pi) in self.patterns.iter().enumerate() {
            for (j, pj) in self.patterns.iter().enumerate() {
                let mut cross = 0.0;
                for &(r1, c1, s1) in &pi.entries {
                    for &(r2, c2, s2) in &pj.entries {
                        cross += s1 * s2 * v[(c1, r2)] * v[(c2, r1)];
                    }
                }
                let hess_ij = px * (traces[i] * traces[j] - cross);
                second += values[i] * values[j] * hess_ij;
            }
        }
        Ok(self.euler_factor * self.euler_factor * (first + second))
    }

    /// Central finite-difference gradient (independent cross-check of the
    /// resolvent route), step `h = 1e−5·(1 + ‖M‖)` per coordinate.
    pub fn gradient_fd(&self, m: &CliffordMatrix, x: f64) -> Vec<f64> {
        let scale = m.block_frobenius_sq().sqrt();
        let h = 1e-5 * (1.0 + scale);
        self.coords
            .iter()
            .map(|c| {
                let mut up = m.clone();
                let mut dn = m.clone();
                up.set_coordinate(c, m.coordinate(c) + h);
                dn.set_coordinate(c, m.coordinate(c) - h);
                let pu = charpoly_value_of(&up, x);
                let pd = charpoly_value_of(&dn, x);
                (pu - pd) / (2.0 * h)
            })
            .collect()
    }

    /// Second central differences for the diagonal Hessian cross-check.
    pub fn hessian_diag_fd(&self, m: &CliffordMatrix, x: f64) -> Vec<f64> {
        let scale = m.block_frobenius_sq().sqrt();
        let h = 1e-5 * (1.0 + scale);
        let p0 = charpoly_value_of(m, x);
        self.coords
            .iter()
            .map(|c| {
                let mut up = m.clone();
                let mut dn = m.clone();
                up.set_coordinate(c, m.coordinate(c) + h);
                dn.set_coordinate(c, m.coordinate(c) - h);
                let pu = charpoly_value_of(&up, x);
                let pd = charpoly_value_of(&dn, x);
                (pu + pd - 2.0 * p0) / (h * h)
            })
            .collect()
    }
}

fn charpoly_value_of(m: &CliffordMatrix, x: f64) -> f64 {
    let mut a = -m.realize_raw();
    for i in 0..a.nrows() {
        a[(i, i)] += x;
    }
    a.lu().determinant()
}

/// Γ at one evaluation pair, assembled from entry-wise derivatives with
/// the ensemble metric.
pub fn gamma_p_numeric(case: &GeneratorCase, m: &CliffordMatrix, x: f64, y: f64) -> Result<f64> {
    IdentityAssembler::new(case, m)?.gamma_numeric(x, y)
}

/// L at one evaluation point, assembled from entry-wise second
/// derivatives.
pub fn l_p_numeric(case: &GeneratorCase, m: &CliffordMatrix, x: f64) -> Result<f64> {
    IdentityAssembler::new(case, m)?.l_numeric(x)
}

/// Admissible evaluation points: outside a guard band of half the mean
/// cluster gap around every eigenvalue, taken from large-gap midpoints
/// first and padded with points outside the spectral range.
pub fn evaluation_grid(spectrum: &SpectrumSummary, count: usize) -> Vec<f64> {
    let distinct = spectrum.distinct_values();
    let k = distinct.len();
    let (guard, lo, hi) = if k >= 2 {
        let mean_gap = (distinct[k - 1] - distinct[0]) / (k as f64 - 1.0);
        (0.5 * mean_gap, distinct[0], distinct[k - 1])
    } else {
        let scale = distinct[0].abs().max(1.0);
        (0.35 * scale, distinct[0], distinct[0])
    };
    let admissible = |x: f64| distinct.iter().all(|&l| (x - l).abs() > guard);
    let mut points = Vec::with_capacity(count);
    // Interior midpoints of sufficiently wide gaps.
    for w in distinct.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if points.len() < count && admissible(mid) {
            points.push(mid);
        }
    }
    // Pad with exterior points at increasing offsets.
    let mut j = 0u32;
    while points.len() < count {
        let off = guard * (1.1 + 0.6 * j as f64);
        for x in [lo - off, hi + off] {
            if points.len() < count && admissible(x) {
                points.push(x);
            }
        }
        j += 1;
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points
}

/// Per-identity verification record: closed-form against assembled values
/// over an evaluation grid.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub case: String,
    pub sample_index: u64,
    pub points: Vec<(f64, f64)>,
    pub closed: Vec<f64>,
    pub assembled: Vec<f64>,
    pub max_rel_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn relative_residual(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// Points per grid axis (Γ runs on a `grid × grid` (X,Y) product).
    pub grid: usize,
    pub tolerance: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { n: 2, samples: 20, seed: 1, grid: 5, tolerance: 1e-6 }
    }
}

/// Γ- and L-identity reports for one sampled matrix.
pub fn check_identities(
    case: &GeneratorCase,
    m: &CliffordMatrix,
    sample_index: u64,
    grid: usize,
    tolerance: f64,
) -> Result<Vec<IdentityReport>> {
    let assembler = IdentityAssembler::new(case, m)?;
    let spectrum = poly::cluster_sorted(assembler.eigenvalues().to_vec(), 1e-7);
    let pts = evaluation_grid(&spectrum, 2 * grid);
    let xs = &pts[..grid];
    let ys = &pts[grid..];
    let roots = assembler.eigenvalues().to_vec();

    let mut g_points = Vec::new();
    let mut g_closed = Vec::new();
    let mut g_assembled = Vec::new();
    let mut g_worst = 0.0f64;
    for &x in xs {
        for &y in ys {
            let closed = gamma_closed_rooted(case.gamma, &roots, x, y);
            let got = assembler.gamma_numeric(x, y)?;
            g_points.push((x, y));
            g_closed.push(closed);
            g_assembled.push(got);
            g_worst = g_worst.max(relative_residual(got, closed));
        }
    }

    let mut l_points = Vec::new();
    let mut l_closed = Vec::new();
    let mut l_assembled = Vec::new();
    let mut l_worst = 0.0f64;
    for &x in xs {
        let closed = l_closed_rooted(case, &roots, x);
        let got = assembler.l_numeric(x)?;
        l_points.push((x, x));
        l_closed.push(closed);
        l_assembled.push(got);
        l_worst = l_worst.max(relative_residual(got, closed));
    }

    Ok(vec![
        IdentityReport {
            identity: "gamma_charpoly".into(),
            case: case.label.name(),
            sample_index,
            points: g_points,
            closed: g_closed,
            assembled: g_assembled,
            max_rel_residual: g_worst,
            tolerance,
            pass: g_worst <= tolerance,
        },
        IdentityReport {
            identity: "l_charpoly".into(),
            case: case.label.name(),
            sample_index,
            points: l_points,
            closed: l_closed,
            assembled: l_assembled,
            max_rel_residual: l_worst,
            tolerance,
            pass: l_worst <= tolerance,
        },
    ])
}

/// Run the Γ/L verification over a seeded batch of Gaussian samples.
pub fn identity_suite(case: &GeneratorCase, cfg: &SuiteConfig) -> Result<Vec<IdentityReport>> {
    let ens = EnsembleConfig::gaussian(cfg.n, case.matrix_p, 1.0, cfg.seed);
    let mut reports = Vec::new();
    for i in 0..cfg.samples {
        let m = sample_blocks_indexed(&ens, i)?;
        reports.extend(check_identities(case, &m, i, cfg.grid, cfg.tolerance)?);
    }
    Ok(reports)
}

/// One observation for the coefficient fit: a characteristic polynomial,
/// an evaluation point and the assembled L and Γ values there. `roots`
/// enables well-conditioned evaluation at high degree.
#[derive(Clone, Debug)]
pub struct FitSample {
    pub p: MonicPolynomial,
    pub roots: Option<Vec<f64>>,
    pub x: f64,
    pub l_value: f64,
    pub gamma_value: f64,
}

impl FitSample {
    fn derivs(&self) -> (f64, f64, f64) {
        match &self.roots {
            Some(r) => RootedPoly { roots: r }.eval_derivs(self.x),
            None => {
                let dp = self.p.derivative();
                let ddp = dp.derivative();
                (self.p.eval(self.x), dp.eval(self.x), ddp.eval(self.x))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FittedCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Worst relative residuals of the two fits.
    pub l_residual: f64,
    pub gamma_residual: f64,
}

/// Least-squares recovery of `(α, β, γ)` from assembled values:
/// `L ≈ α·P'' + β·P'²/P` (two-column fit) and `Γ(X,X) ≈ γ·(P'² − P·P'')`.
pub fn fit_alpha_beta_gamma(samples: &[FitSample]) -> Result<FittedCoefficients> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 fit samples".into()));
    }
    let mut ata = [[0.0f64; 2]; 2];
    let mut atb = [0.0f64; 2];
    let mut gamma_num = 0.0;
    let mut gamma_den = 0.0;
    let mut rows = Vec::with_capacity(samples.len());
    for s in samples {
        let (p, dp, ddp) = s.derivs();
        if p == 0.0 {
            return Err(Error::SingularResolvent(format!("P({}) = 0 in fit sample", s.x)));
        }
        let c1 = ddp;
        let c2 = dp * dp / p;
        let w = 1.0 / c1.abs().max(c2.abs()).max(1e-30);
        ata[0][0] += w * w * c1 * c1;
        ata[0][1] += w * w * c1 * c2;
        ata[1][0] += w * w * c2 * c1;
        ata[1][1] += w * w * c2 * c2;
        atb[0] += w * w * c1 * s.l_value;
        atb[1] += w * w * c2 * s.l_value;
        let t = dp * dp - p * ddp;
        gamma_num += t * s.gamma_value;
        gamma_den += t * t;
        rows.push((c1, c2));
    }
    let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
    let norm = ata[0][0].abs().max(ata[1][1].abs());
    if det.abs() <= 1e-12 * norm * norm {
        return Err(Error::IllConditioned(format!(
            "normal-equation determinant {det:.3e} vs scale {norm:.3e}"
        )));
    }
    let alpha = (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det;
    let beta = (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det;
    if gamma_den == 0.0 {
        return Err(Error::IllConditioned("degenerate Γ template".into()));
    }
    let gamma = gamma_num / gamma_den;

    let mut l_resid = 0.0f64;
    let mut g_resid = 0.0f64;
    for (s, (c1, c2)) in samples.iter().zip(rows.iter()) {
        let fit = alpha * c1 + beta * c2;
        l_resid = l_resid.max(relative_residual(fit, s.l_value));
        let (p, dp, ddp) = s.derivs();
        let t = gamma * (dp * dp - p * ddp);
        g_resid = g_resid.max(relative_residual(t, s.gamma_value));
    }
    Ok(FittedCoefficients { alpha, beta, gamma, l_residual: l_resid, gamma_residual: g_resid })
}

/// Generate fit observations from a seeded batch of Gaussian samples of
/// the case's matrix family.
pub fn fit_samples(case: &GeneratorCase, cfg: &SuiteConfig) -> Result<Vec<FitSample>> {
    let ens = EnsembleConfig::gaussian(cfg.n, case.matrix_p, 1.0, cfg.seed);
    let mut out = Vec::new();
    for i in 0..cfg.samples {
        let m = sample_blocks_indexed(&ens, i)?;
        let assembler = IdentityAssembler::new(case, &m)?;
        let spectrum = poly::cluster_sorted(assembler.eigenvalues().to_vec(), 1e-7);
        let pts = evaluation_grid(&spectrum, cfg.grid);
        let p = MonicPolynomial::from_roots(assembler.eigenvalues())?;
        for &x in &pts {
            out.push(FitSample {
                p: p.clone(),
                roots: Some(assembler.eigenvalues().to_vec()),
                x,
                l_value: assembler.l_numeric(x)?,
                gamma_value: assembler.gamma_numeric(x, x)?,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplicityRoots {
    /// Real roots of the quadratic (or the single root of the degenerate
    /// linear equation).
    pub roots: Vec<f64>,
    /// Positive integer roots — the admissible multiplicities.
    pub integer_roots: Vec<u64>,
}

/// Solve `a²(α+β) − a(α+γ) + γ = 0` for the root multiplicity `a`.
pub fn solve_multiplicity(alpha: f64, beta: f64, gamma: f64) -> Result<MultiplicityRoots> {
    let qa = alpha + beta;
    let qb = -(alpha + gamma);
    let qc = gamma;
    let scale = qa.abs().max(qb.abs()).max(qc.abs());
    let roots: Vec<f64> = if qa.abs() <= 1e-12 * scale {
        if qb.abs() <= 1e-12 * scale {
            return Err(Error::InvalidArgument(
                "degenerate multiplicity equation (α+β = α+γ = 0)".into(),
            ));
        }
        vec![-qc / qb]
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "multiplicity equation has no real roots (discriminant {disc:.3e}); \
                 inconsistent coefficients"
            )));
        }
        let s = disc.sqrt();
        let mut r = vec![(-qb + s) / (2.0 * qa), (-qb - s) / (2.0 * qa)];
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        r
    };
    let integer_roots = roots
        .iter()
        .filter_map(|&r| {
            let rounded = r.round();
            if rounded > 0.0 && (r - rounded).abs() <= 1e-6 * r.abs().max(1.0) {
                Some(rounded as u64)
            } else {
                None
            }
        })
        .collect();
    Ok(MultiplicityRoots { roots, integer_roots })
}

#[derive(Clone, Copy, Debug)]
pub enum DriftOperatorKind {
    EulerD,
    EulerDSquared,
    Ou,
    Sphere { ambient_override: Option<f64> },
    Ball { pparam: f64 },
}

/// Closed-form drift applied to `P`. The polynomial part is exact in the
/// coefficients; where the formula involves `P'²/P`, the division
/// remainder is reported in `division_residual` (it vanishes exactly on
/// attained characteristic polynomials).
#[derive(Clone, Debug)]
pub struct DriftResult {
    pub poly: Poly,
    pub division_residual: f64,
}

pub fn drift_operator(
    kind: DriftOperatorKind,
    case: &GeneratorCase,
    p: &MonicPolynomial,
) -> Result<DriftResult> {
    let d = p.degree() as f64;
    let pf = (1u64 << case.matrix_p) as f64;
    let full = p.to_poly();
    let dp = full.derivative();
    let ddp = dp.derivative();
    let x_dp = dp.shift_up(1);
    let x2_ddp = ddp.shift_up(2);

    let euler = || full.scale(d).sub(&x_dp).scale(pf);
    let euler_sq = || {
        full.scale(d * d)
            .sub(&x_dp.scale(2.0 * d - 1.0))
            .add(&x2_ddp)
            .scale(pf * pf)
    };
    // α·P'' + β·P'²/P, with remainder tracking.
    let euclidean = || -> Result<(Poly, f64)> {
        if case.beta == 0.0 {
            return Ok((ddp.scale(case.alpha), 0.0));
        }
        let (q, r) = dp.mul(&dp).div_rem(&full)?;
        Ok((ddp.scale(case.alpha).add(&q.scale(case.beta)), r.max_abs_coeff()))
    };

    match kind {
        DriftOperatorKind::EulerD => Ok(DriftResult { poly: euler(), division_residual: 0.0 }),
        DriftOperatorKind::EulerDSquared => {
            Ok(DriftResult { poly: euler_sq(), division_residual: 0.0 })
        }
        DriftOperatorKind::Ou => {
            let (le, resid) = euclidean()?;
            Ok(DriftResult { poly: le.sub(&euler()), division_residual: resid })
        }
        DriftOperatorKind::Sphere { ambient_override } => {
            let ambient = ambient_override.unwrap_or(d * (d + 1.0) / 2.0);
            let (le, resid) = euclidean()?;
            let poly = le.sub(&euler_sq()).sub(&euler().scale(ambient - 2.0));
            Ok(DriftResult { poly, division_residual: resid })
        }
        DriftOperatorKind::Ball { pparam } => {
            // Image of the ball-operator family on the roots:
            // −d(p + d − 1)·P + (p + 2(d−1))·X·P' − X²·P''.
            let poly = full
                .scale(-d * (pparam + d - 1.0))
                .add(&x_dp.scale(pparam + 2.0 * (d - 1.0)))
                .sub(&x2_ddp);
            Ok(DriftResult { poly, division_residual: 0.0 })
        }
    }
}
