//! Monic-polynomial machinery: characteristic polynomials, resultants,
//! discriminants, root-to-coefficient maps, a-th-root extraction `P = Q^a`
//! and eigenvalue multiplicity clustering.
//!
//! Sign convention: characteristic polynomials are the monic
//! `P(X) = det(X·Id − M)`. Converting to the `det(M − X·Id)` convention is
//! a global factor `(−1)^d`, applied by [`MonicPolynomial::det_convention`]
//! and nowhere else.

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::matrix::RealizedMatrix;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Dense real polynomial, coefficients lowest-order first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            Self::zero()
        } else {
            Poly(vec![c])
        }
    }

    fn trim(mut self) -> Self {
        while self.0.last() == Some(&0.0) {
            self.0.pop();
        }
        self
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0.0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.0.get(i).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly(self.0[1..].iter().enumerate().map(|(i, &c)| (i + 1) as f64 * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect()).trim()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect()).trim()
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|&c| c * s).collect()).trim()
    }

    /// Multiply by `X^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.0.is_empty() {
            return Poly::zero();
        }
        let mut v = vec![0.0; k];
        v.extend_from_slice(&self.0);
        Poly(v)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trim()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly(vec![1.0]);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Euclidean division: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let lead = divisor.0[dd];
        let mut rem = self.clone().trim().0;
        if rem.len() <= dd {
            return Ok((Poly::zero(), Poly(rem).trim()));
        }
        let qlen = rem.len() - dd;
        let mut q = vec![0.0; qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + dd] / lead;
            q[k] = c;
            if c != 0.0 {
                for (j, &dj) in divisor.0.iter().enumerate().take(dd + 1) {
                    rem[k + j] -= c * dj;
                }
            }
        }
        rem.truncate(dd);
        Ok((Poly(q).trim(), Poly(rem).trim()))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// Monic polynomial of degree `d ≥ 1`, stored as `(a_0, …, a_{d−1})` with an
/// implicit leading coefficient of one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonicPolynomial {
    coeffs: Vec<f64>,
}

impl MonicPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("monic polynomial needs degree ≥ 1".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(MonicPolynomial { coeffs })
    }

    /// Expand `∏ (X − x_i)`.
    pub fn from_roots(roots: &[f64]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidArgument("need at least one root".into()));
        }
        if roots.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite);
        }
        // Vieta expansion in double-double: each rounded coefficient is
        // then correct to ~1 ulp of its own magnitude, which matters for
        // the root-power extraction at high degree.
        let mut coeffs = vec![Dd::ZERO; roots.len() + 1];
        coeffs[0] = Dd::from_f64(1.0);
        let mut deg = 0usize;
        for &r in roots {
            // multiply by (X − r), lowest-order first
            deg += 1;
            for k in (1..=deg).rev() {
                coeffs[k] = coeffs[k - 1].sub(coeffs[k].scale(r));
            }
            coeffs[0] = coeffs[0].scale(-r);
        }
        let lead = coeffs.pop().unwrap();
        debug_assert_eq!(lead.to_f64(), 1.0);
        Ok(MonicPolynomial { coeffs: coeffs.into_iter().map(Dd::to_f64).collect() })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// The stored coefficients `(a_0, …, a_{d−1})`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient `a_i` with the conventions `a_d = 1` and `a_i = 0` for
    /// `i > d`.
    pub fn coeff(&self, i: usize) -> f64 {
        match i.cmp(&self.degree()) {
            std::cmp::Ordering::Less => self.coeffs[i],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Greater => 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 1.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn to_poly(&self) -> Poly {
        let mut v = self.coeffs.clone();
        v.push(1.0);
        Poly(v)
    }

    pub fn derivative(&self) -> Poly {
        self.to_poly().derivative()
    }

    /// The same polynomial under the `det(M − X·Id)` sign convention,
    /// i.e. scaled by `(−1)^d` (no longer monic for odd `d`).
    pub fn det_convention(&self) -> Poly {
        if self.degree().is_multiple_of(2) {
            self.to_poly()
        } else {
            self.to_poly().scale(-1.0)
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()))
    }
}

/// `|∏_{i<j} (x_i − x_j)|`, the Jacobian factor of the root-to-coefficient
/// map; equals `|discr|^{1/2}` on real-rooted polynomials.
pub fn jacobian_factor(roots: &[f64]) -> f64 {
    let mut prod = 1.0f64;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            prod *= roots[i] - roots[j];
        }
    }
    prod.abs()
}

/// Determinant of the Sylvester matrix of two polynomials given by
/// descending coefficient slices.
fn sylvester_determinant(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len() - 1;
    let m = q.len() - 1;
    if n == 0 || m == 0 {
        // Resultant with a constant: lc^deg of the other side.
        if n == 0 {
            return p[0].powi(m as i32);
        }
        return q[0].powi(n as i32);
    }
    let size = n + m;
    let mut s = DMatrix::<f64>::zeros(size, size);
    for row in 0..m {
        for (k, &c) in p.iter().enumerate() {
            s[(row, row + k)] = c;
        }
    }
    for row in 0..n {
        for (k, &c) in q.iter().enumerate() {
            s[(m + row, row + k)] = c;
        }
    }
    s.lu().determinant()
}

fn descending(p: &Poly) -> Vec<f64> {
    let d = p.degree().unwrap_or(0);
    (0..=d).rev().map(|i| p.coeff(i)).collect()
}

/// Resultant `R(P, Q) = ∏_{i,j} (x_i − y_j)` of two monic polynomials, as
/// the Sylvester determinant.
pub fn resultant(p: &MonicPolynomial, q: &MonicPolynomial) -> f64 {
    sylvester_determinant(&descending(&p.to_poly()), &descending(&q.to_poly()))
}

/// `discr(P) = (−1)^{d(d−1)/2} R(P, P') = ∏_{i<j} (x_i − x_j)²` on
/// real-rooted input; zero iff `P` has a repeated root.
pub fn discriminant(p: &MonicPolynomial) -> Result<f64> {
    let d = p.degree();
    if d < 2 {
        return Err(Error::InvalidArgument("discriminant needs degree ≥ 2".into()));
    }
    let r = sylvester_determinant(&descending(&p.to_poly()), &descending(&p.derivative()));
    let sign = if (d * (d - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * r)
}

/// Sorted eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 200 * dim.max(5))
        .ok_or(Error::EigenFailed)?;
    let mut evs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(evs)
}

/// Monic characteristic polynomial `det(X·Id − M)` of a symmetric matrix,
/// computed from its eigenvalues. For `dim ≤ 64` the coefficients are
/// cross-checked against the determinant (leading-principal-minor)
/// recursion on the tridiagonalized matrix, at a tolerance relative to the
/// cancellation-free coefficient scale `e_k(|λ|)`.
pub fn char_poly_of(m: &DMatrix<f64>) -> Result<MonicPolynomial> {
    if m.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite);
    }
    let evs = symmetric_eigenvalues(m)?;
    let p = MonicPolynomial::from_roots(&evs)?;
    let dim = m.nrows();
    if (1..=64).contains(&dim) {
        let det_rec = char_poly_minor_recursion(m);
        let abs_roots: Vec<f64> = evs.iter().map(|x| x.abs()).collect();
        let scale = MonicPolynomial::from_roots(&abs_roots)?;
        for i in 0..dim {
            let delta = (det_rec.coeff(i) - p.coeff(i)).abs();
            let si = scale.coeff(i).abs() + 1.0;
            if delta > 1e-6 * si {
                return Err(Error::CharPolyCrossCheck { index: i, delta, scale: si });
            }
        }
    }
    Ok(p)
}

/// `det(X·Id − M)` by Householder tridiagonalization followed by the
/// three-term recursion on leading principal minors,
/// `p_k = (X − d_k)·p_{k−1} − e_{k−1}²·p_{k−2}` — a determinant route that
/// never touches the eigen-iteration.
pub fn char_poly_minor_recursion(m: &DMatrix<f64>) -> Poly {
    let dim = m.nrows();
    if dim == 0 {
        return Poly::constant(1.0);
    }
    if dim == 1 {
        return Poly(vec![-m[(0, 0)], 1.0]);
    }
    let tri = nalgebra::SymmetricTridiagonal::new(m.clone());
    let diag = tri.diagonal();
    let off = tri.off_diagonal();
    let mut prev = Poly::constant(1.0);
    let mut cur = Poly(vec![-diag[0], 1.0]);
    for k in 1..dim {
        let x_minus_d = Poly(vec![-diag[k], 1.0]);
        let next = cur.mul(&x_minus_d).sub(&prev.scale(off[k - 1] * off[k - 1]));
        prev = cur;
        cur = next;
    }
    cur
}

/// Characteristic polynomial of a realized block matrix.
pub fn char_poly(r: &RealizedMatrix) -> Result<MonicPolynomial> {
    char_poly_of(r.matrix())
}

/// Coefficients `(c_0, …, c_{d−1})` of `det(X·Id − M)` by the
/// Faddeev–LeVerrier trace recursion — an oracle independent of any
/// eigendecomposition or orthogonal reduction. The recursion loses
/// accuracy quickly with dimension; keep it to `dim ≲ 12`. The matrix is
/// pre-scaled by its row-sum norm to keep intermediates in range.
pub fn char_poly_trace_recursion(m: &DMatrix<f64>) -> Vec<f64> {
    let d = m.nrows();
    let mut s = 0.0f64;
    for i in 0..d {
        let row_sum: f64 = (0..d).map(|j| m[(i, j)].abs()).sum();
        s = s.max(row_sum);
    }
    if s == 0.0 {
        return vec![0.0; d];
    }
    let scaled = m.map(|x| x / s);
    let mut coeffs = vec![0.0; d];
    let mut mk = scaled.clone();
    let mut c = -mk.trace();
    coeffs[d - 1] = c;
    for k in 2..=d {
        let mut tmp = mk;
        for i in 0..d {
            tmp[(i, i)] += c;
        }
        mk = &scaled * tmp;
        c = -mk.trace() / k as f64;
        coeffs[d - k] = c;
    }
    // Undo the scaling: c_i scales by s^{d−i}.
    for (i, ci) in coeffs.iter_mut().enumerate() {
        *ci *= s.powi((d - i) as i32);
    }
    coeffs
}

/// One eigenvalue cluster: representative value and multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Sorted spectrum of a symmetric matrix together with its distinct values
/// and integer multiplicities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<f64>,
    pub distinct: Vec<Cluster>,
    /// Relative tolerance used for clustering.
    pub tolerance: f64,
}

impl SpectrumSummary {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.distinct.iter().map(|c| c.multiplicity).collect()
    }

    pub fn distinct_values(&self) -> Vec<f64> {
        self.distinct.iter().map(|c| c.value).collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Single-linkage clustering of sorted eigenvalues at absolute threshold
/// `tol · max(1, spectral radius)`.
pub fn spectrum_of(m: &DMatrix<f64>, tol: f64) -> Result<SpectrumSummary> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("clustering tolerance must be > 0".into()));
    }
    let evs = symmetric_eigenvalues(m)?;
    Ok(cluster_sorted(evs, tol))
}

pub fn eigen_spectrum(r: &RealizedMatrix, tol: f64) -> Result<SpectrumSummary> {
    spectrum_of(r.matrix(), tol)
}

pub fn cluster_sorted(evs: Vec<f64>, tol: f64) -> SpectrumSummary {
    let radius = evs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let threshold = tol * radius.max(1.0);
    let mut distinct = Vec::new();
    let mut start = 0usize;
    for i in 1..=evs.len() {
        if i == evs.len() || evs[i] - evs[i - 1] > threshold {
            let slice = &evs[start..i];
            let value = slice.iter().sum::<f64>() / slice.len() as f64;
            distinct.push(Cluster { value, multiplicity: slice.len() });
            start = i;
        }
    }
    SpectrumSummary { eigenvalues: evs, distinct, tolerance: tol }
}

/// Result of the a-th-root extraction `P ≈ Q^a`.
#[derive(Clone, Debug)]
pub struct RootPower {
    pub q: MonicPolynomial,
    /// `max |coeff(P − Q^a)|`; small exactly when `P` really is an a-th
    /// power. A large residual is the detection signal, not an error.
    pub residual: f64,
}

/// Extract `Q` with `Q^a ≈ P` straight from the coefficients, reporting
/// `‖P − Q^a‖_∞` as the (honest) detection residual.
///
/// Two coefficient-space routes, both in double-double arithmetic:
/// - leading-coefficient-first recursion (each unknown coefficient of `Q`
///   enters the next-lower coefficient of `Q^a` linearly with factor `a`),
///   used while its cancellation budget `C(d, d/a)` stays small;
/// - above that, the linear matching `P'·Q = a·P·Q'` (equivalent to
///   `P = Q^a` up to normalization), solved by row-scaled least squares —
///   the greedy chart amplifies input rounding by `C(d, d/a)`, which is
///   hopeless at degree 128 no matter the working precision.
pub fn poly_root_power(p: &MonicPolynomial, power: u32) -> Result<RootPower> {
    let d = p.degree();
    if power == 0 {
        return Err(Error::InvalidArgument("power must be ≥ 1".into()));
    }
    if !d.is_multiple_of(power as usize) {
        return Err(Error::InvalidArgument(format!(
            "power {power} does not divide degree {d}"
        )));
    }
    if power == 1 {
        return Ok(RootPower { q: p.clone(), residual: 0.0 });
    }
    let m = d / power as usize;
    let mut target: Vec<Dd> = p.coeffs().iter().map(|&c| Dd::from_f64(c)).collect();
    target.push(Dd::from_f64(1.0));

    let q = if binomial_approx(d, m) <= 1e7 {
        root_power_recursion(&target, d, m, power)
    } else {
        let seed = root_power_log_derivative(&target, d, m, power)?;
        gauss_newton_nearest_power(&target, seed, power)
    };

    let expanded = dd::poly_pow(&q, power);
    let mut residual = 0.0f64;
    for (t, e) in target.iter().zip(expanded.iter()) {
        residual = residual.max(t.sub(*e).abs());
    }
    let q = MonicPolynomial { coeffs: q[..m].iter().map(|c| c.to_f64()).collect() };
    Ok(RootPower { q, residual })
}

/// A few Gauss–Newton steps on `min_q Σ_i w_i²·(P_i − (Q^a)_i)²` with
/// per-coefficient relative weights `w_i = 1/(|P_i| + ε·max|P|)`: the
/// orthogonal projection onto the power manifold under the metric in
/// which coefficient rounding noise is isotropic. The Jacobian is
/// `∂(Q^a)_i/∂q_k = a·(Q^{a−1})_{i−k}`.
#[allow(clippy::needless_range_loop)]
fn gauss_newton_nearest_power(target: &[Dd], mut q: Vec<Dd>, power: u32) -> Vec<Dd> {
    let d = target.len() - 1;
    let m = q.len() - 1;
    let max_t = target.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let weights: Vec<f64> = target
        .iter()
        .map(|c| 1.0 / (c.abs() + 1e-9 * max_t))
        .collect();
    for _ in 0..3 {
        let q_am1 = dd::poly_pow(&q, power - 1);
        let q_a = dd::poly_mul(&q_am1, &q);
        // Normal equations J^T J δ = J^T r with J_{ik} = a·w_i·(Q^{a−1})_{i−k}.
        let mut normal = vec![vec![Dd::ZERO; m]; m];
        let mut rhs = vec![Dd::ZERO; m];
        let jac = |i: isize, k: isize| -> Dd {
            let t = i - k;
            if t < 0 || t as usize >= q_am1.len() {
                Dd::ZERO
            } else {
                q_am1[t as usize].scale(power as f64)
            }
        };
        for i in 0..=d as isize {
            let w = weights[i as usize];
            let r = target[i as usize].sub(q_a[i as usize]);
            for x in 0..m {
                let jx = jac(i, x as isize);
                if jx.hi == 0.0 && jx.lo == 0.0 {
                    continue;
                }
                for y in 0..m {
                    normal[x][y] = normal[x][y].add(jx.mul(jac(i, y as isize)).scale(w * w));
                }
                rhs[x] = rhs[x].add(jx.mul(r).scale(w * w));
            }
        }
        match solve_dd(normal, rhs) {
            Some(delta) => {
                for (qk, dk) in q.iter_mut().zip(delta.iter()) {
                    *qk = qk.add(*dk);
                }
            }
            None => break,
        }
    }
    q
}

/// Gaussian elimination with partial pivoting on a square double-double
/// system.
#[allow(clippy::needless_range_loop)]
fn solve_dd(mut a: Vec<Vec<Dd>>, b: Vec<Dd>) -> Option<Vec<Dd>> {
    let m = b.len();
    for (x, r) in b.into_iter().enumerate() {
        a[x].push(r);
    }
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        for rowi in (col + 1)..m {
            let f = a[rowi][col].div(a[col][col]);
            for c in col..=m {
                let t = a[col][c].mul(f);
                a[rowi][c] = a[rowi][c].sub(t);
            }
        }
    }
    let mut x = vec![Dd::ZERO; m];
    for col in (0..m).rev() {
        let mut acc = a[col][m];
        for c in (col + 1)..m {
            acc = acc.sub(a[col][c].mul(x[c]));
        }
        x[col] = acc.div(a[col][col]);
    }
    Some(x)
}

fn binomial_approx(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
        if acc > 1e300 {
            return acc;
        }
    }
    acc
}

fn root_power_recursion(target: &[Dd], d: usize, m: usize, power: u32) -> Vec<Dd> {
    let mut q = vec![Dd::ZERO; m + 1];
    q[m] = Dd::from_f64(1.0);
    let inv_a = 1.0 / power as f64;
    for k in 1..=m {
        let expanded = dd::poly_pow(&q, power);
        let delta = target[d - k].sub(expanded[d - k]);
        q[m - k] = q[m - k].add(delta.scale(inv_a));
    }
    q
}

/// Solve the linear system `coef_j(P'·Q − a·P·Q') = 0` for the unknown
/// coefficients of monic `Q`: the coefficient of `q_k` in row `j` is
/// `P'_{j−k} − a·k·P_{j−k+1}`. The variable is first rescaled by a root
/// bound so the coefficients are balanced, rows are sup-normalized and
/// columns equilibrated, and the normal equations are solved by Gaussian
/// elimination in double-double; the conditioning of this route is set by
/// the root geometry, not by `C(d, d/a)`.
#[allow(clippy::needless_range_loop)]
fn root_power_log_derivative(target: &[Dd], d: usize, m: usize, power: u32) -> Result<Vec<Dd>> {
    let a = power as f64;
    // Fujiwara-style root bound from the coefficients.
    let mut rho = 0.0f64;
    for k in 1..=d {
        let c = target[d - k].abs();
        if c > 0.0 {
            rho = rho.max(2.0 * c.powf(1.0 / k as f64));
        }
    }
    let rho = rho.max(1.0);
    // P̂(Y) = P(ρY)/ρ^d: coefficient t picks up ρ^{t−d}.
    let scaled: Vec<Dd> = target
        .iter()
        .enumerate()
        .map(|(t, c)| c.scale(rho.powi(t as i32 - d as i32)))
        .collect();
    let p_coeff = |t: isize| -> Dd {
        if t < 0 || t as usize > d {
            Dd::ZERO
        } else {
            scaled[t as usize]
        }
    };
    // P̂'_t = (t+1)·P̂_{t+1}
    let dp_coeff = |t: isize| -> Dd { p_coeff(t + 1).scale((t + 1) as f64) };
    let entry = |j: isize, k: isize| -> Dd {
        dp_coeff(j - k).sub(p_coeff(j - k + 1).scale(a * k as f64))
    };
    let rows = d + m;
    // Column equilibration on top of row sup-normalization.
    let mut col_scale = vec![0.0f64; m + 1];
    for j in 0..rows as isize {
        let mut sup = 0.0f64;
        for k in 0..=m as isize {
            sup = sup.max(entry(j, k).abs());
        }
        if sup == 0.0 {
            continue;
        }
        for k in 0..=m {
            col_scale[k] = col_scale[k].max(entry(j, k as isize).abs() / sup);
        }
    }
    for s in col_scale.iter_mut() {
        // Floor keeps negligible columns from being blown up to overflow.
        if !s.is_finite() || *s <= 1e-12 {
            *s = 1.0;
        }
    }
    let mut normal = vec![vec![Dd::ZERO; m]; m];
    let mut rhs = vec![Dd::ZERO; m];
    for j in 0..rows as isize {
        let mut row = Vec::with_capacity(m + 1);
        for k in 0..=m as isize {
            row.push(entry(j, k).scale(1.0 / col_scale[k as usize]));
        }
        let b = row.pop().unwrap().scale(-1.0); // q̂_m moved across
        let scale = row
            .iter()
            .chain(std::iter::once(&b))
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        if scale == 0.0 {
            continue;
        }
        let w = 1.0 / scale;
        for x in 0..m {
            for y in 0..m {
                normal[x][y] = normal[x][y].add(row[x].mul(row[y]).scale(w * w));
            }
            rhs[x] = rhs[x].add(row[x].mul(b).scale(w * w));
        }
    }
    let solved = solve_dd(normal, rhs)
        .ok_or_else(|| Error::IllConditioned("log-derivative system is singular".into()))?;
    let mut q = solved;
    q.push(Dd::from_f64(1.0));
    // Undo the column equilibration (q̂_m's scale is pinned by the
    // normalization of the rhs) and the variable rescaling X = ρY:
    // q_k = q̂_k·ρ^{m−k}.
    for k in 0..m {
        q[k] = q[k]
            .scale(col_scale[m] / col_scale[k])
            .scale(rho.powi(m as i32 - k as i32));
    }
    Ok(q)
}

/// The matrix `G` with `G[k][q] = Γ_E(a_k, a_q)`, the Euclidean carré du
/// champ of the coefficient functions of `P = ∏(X − x_i)` expressed in the
/// coefficients themselves:
///
/// ```text
/// Γ(a_k, a_q) = Σ_{(q−k)⁺ ≤ l ≤ q} α_{q−l, k+l+1} − Σ_{(k−q)⁺ ≤ l ≤ k} α_{q+l+1, k−l}
/// ```
///
/// with `α_{i,j} = (i+1)·a_{i+1}·a_j`, `a_d = 1` and `a_i = 0` beyond the
/// degree. Its determinant is the discriminant of `P`.
pub fn gamma_coeff_matrix(p: &MonicPolynomial) -> DMatrix<f64> {
    let d = p.degree();
    let a = |i: isize| -> f64 {
        if i < 0 {
            0.0
        } else {
            p.coeff(i as usize)
        }
    };
    let alpha = |i: isize, j: isize| (i + 1) as f64 * a(i + 1) * a(j);
    let mut g = DMatrix::<f64>::zeros(d, d);
    for k in 0..d as isize {
        for q in 0..d as isize {
            let mut v = 0.0;
            for l in (q - k).max(0)..=q {
                v += alpha(q - l, k + l + 1);
            }
            for l in (k - q).max(0)..=k {
                v -= alpha(q + l + 1, k - l);
            }
            g[(k as usize, q as usize)] = v;
        }
    }
    g
}

/// Worst-coefficient relative residual of
/// `Σ_j G_{ij}·∂_{a_j} log discr(P) = −(i+2)(i+1)·a_{i+2}` — the
/// coefficient form of `Γ_E(P, log discr P) = −P''`. The log-discriminant
/// gradient is taken by central differences with step
/// `rel_step·(1 + |a_j|)` per coefficient.
pub fn gamma_log_discr_residual(p: &MonicPolynomial, rel_step: f64) -> Result<f64> {
    let d = p.degree();
    if d < 2 {
        return Err(Error::InvalidArgument("need degree ≥ 2".into()));
    }
    let disc = discriminant(p)?;
    if disc <= 0.0 {
        return Err(Error::OutsideDomain(format!("discriminant {disc:.3e} is not positive")));
    }
    let mut grad = vec![0.0f64; d];
    for (j, g) in grad.iter_mut().enumerate() {
        let h = rel_step * (1.0 + p.coeffs()[j].abs());
        let mut up = p.coeffs().to_vec();
        let mut dn = p.coeffs().to_vec();
        up[j] += h;
        dn[j] -= h;
        let du = discriminant(&MonicPolynomial::new(up)?)?;
        let dd = discriminant(&MonicPolynomial::new(dn)?)?;
        if du <= 0.0 || dd <= 0.0 {
            return Err(Error::OutsideDomain("finite-difference stencil left the domain".into()));
        }
        *g = (du.ln() - dd.ln()) / (2.0 * h);
    }
    let g = gamma_coeff_matrix(p);
    let mut scale = 1.0f64;
    for i in 0..d {
        scale = scale.max(((i + 2) * (i + 1)) as f64 * p.coeff(i + 2).abs());
    }
    let mut worst = 0.0f64;
    for i in 0..d {
        let lhs: f64 = (0..d).map(|j| g[(i, j)] * grad[j]).sum();
        let rhs = -(((i + 2) * (i + 1)) as f64) * p.coeff(i + 2);
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    Ok(worst)
}

/// Roots of `P` as eigenvalues of its companion matrix (complex in
/// general).
pub fn companion_roots(p: &MonicPolynomial) -> Vec<nalgebra::Complex<f64>> {
    let d = p.degree();
    let mut c = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        c[(i, d - 1)] = -p.coeff(i);
    }
    c.complex_eigenvalues().iter().copied().collect()
}

/// Whether every root of `P` is real within `tol` (relative to the root
/// magnitude scale), judged from the companion spectrum. This is the
/// membership test for the all-real-roots domain; a positive discriminant
/// alone is not sufficient.
pub fn is_real_rooted(p: &MonicPolynomial, tol: f64) -> bool {
    let roots = companion_roots(p);
    let scale = roots.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    roots.iter().all(|z| z.im.abs() <= tol * scale)
}
