//! Block matrices over a Clifford sign structure and their real
//! realization.
//!
//! A matrix here is a family of real `n×n` blocks `{M^A : A ⊆ E}` obeying
//! `(M^A)^t = (A|A)·M^A`. Its realization `φ(M)` is the real symmetric
//! `(n·2^p)×(n·2^p)` block matrix with block `(A, B) = (AΔB|B)·M^{AΔB}`;
//! `φ` is an algebra homomorphism, which is what the whole spectral theory
//! rides on.

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::signature::CliffordSignature;
use crate::subset::SubsetId;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which law the block sampler draws from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EnsembleProcess {
    /// Centered Gaussian with variance scale `t`: each independent
    /// coordinate `u` has variance `Γ(u,u)·t`.
    Gaussian { t: f64 },
    /// Marginal of the Brownian motion generated by the Euclidean
    /// Laplacian at time `t` (variance scale `2t`).
    BrownianPath { t: f64 },
    /// Stationary law of the Ornstein-Uhlenbeck process (variance scale 1).
    Ou,
    /// Gaussian conditioned onto the unit sphere `‖φ(M)‖_F = 1`.
    Sphere,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n: usize,
    pub p: u32,
    pub process: EnsembleProcess,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn gaussian(n: usize, p: u32, t: f64, seed: u64) -> Self {
        EnsembleConfig { n, p, process: EnsembleProcess::Gaussian { t }, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("block size n must be ≥ 1".into()));
        }
        match self.process {
            EnsembleProcess::Gaussian { t } | EnsembleProcess::BrownianPath { t }
                if !t.is_finite() || t < 0.0 =>
            {
                Err(Error::InvalidArgument("variance scale t must be ≥ 0".into()))
            }
            _ => Ok(()),
        }
    }

    fn variance_scale(&self) -> f64 {
        match self.process {
            EnsembleProcess::Gaussian { t } => t,
            EnsembleProcess::BrownianPath { t } => 2.0 * t,
            EnsembleProcess::Ou | EnsembleProcess::Sphere => 1.0,
        }
    }
}

/// One independent scalar coordinate of a Clifford matrix: entry `(row,
/// col)` of block `M^A` (with `row ≤ col`), carrying its metric weight
/// `Γ(u,u)` — 1 on symmetric-block diagonals, ½ off-diagonal.
#[derive(Clone, Copy, Debug)]
pub struct Coordinate {
    pub block: SubsetId,
    pub row: usize,
    pub col: usize,
    pub weight: f64,
}

/// Enumerate the independent coordinates of the block family in a fixed
/// deterministic order: blocks by subset id, then row-major over the
/// stored triangle.
pub fn independent_coordinates(sig: &CliffordSignature, n: usize) -> Vec<Coordinate> {
    let mut coords = Vec::new();
    for a in SubsetId::all(sig.p()) {
        let symmetric = sig.self_sign(a) == 1;
        for i in 0..n {
            let start = if symmetric { i } else { i + 1 };
            for j in start..n {
                let weight = if i == j { 1.0 } else { 0.5 };
                coords.push(Coordinate { block: a, row: i, col: j, weight });
            }
        }
    }
    coords
}

/// A family of real `n×n` blocks over a Clifford sign structure.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordMatrix {
    sig: CliffordSignature,
    n: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl CliffordMatrix {
    pub fn zero(sig: CliffordSignature, n: usize) -> Self {
        let blocks = (0..sig.blade_count()).map(|_| DMatrix::zeros(n, n)).collect();
        CliffordMatrix { sig, n, blocks }
    }

    /// The unit element: `M^∅ = Id`, all other blocks zero.
    pub fn identity(sig: CliffordSignature, n: usize) -> Self {
        let mut m = Self::zero(sig, n);
        m.blocks[0] = DMatrix::identity(n, n);
        m
    }

    /// Build from a complete block list in subset-id order.
    pub fn from_blocks(sig: CliffordSignature, n: usize, blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        if blocks.len() != sig.blade_count() {
            return Err(Error::Mismatch(format!(
                "expected {} blocks, got {}",
                sig.blade_count(),
                blocks.len()
            )));
        }
        if blocks.iter().any(|b| b.nrows() != n || b.ncols() != n) {
            return Err(Error::Mismatch("all blocks must be n×n".into()));
        }
        Ok(CliffordMatrix { sig, n, blocks })
    }

    pub fn sig(&self) -> &CliffordSignature {
        &self.sig
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.sig.blade_count()
    }

    pub fn block(&self, a: SubsetId) -> &DMatrix<f64> {
        &self.blocks[a.bits() as usize]
    }

    pub fn block_mut(&mut self, a: SubsetId) -> &mut DMatrix<f64> {
        &mut self.blocks[a.bits() as usize]
    }

    pub fn coordinate(&self, c: &Coordinate) -> f64 {
        self.blocks[c.block.bits() as usize][(c.row, c.col)]
    }

    /// Set an independent coordinate, mirroring the transposed entry with
    /// the block's `(A|A)` sign.
    pub fn set_coordinate(&mut self, c: &Coordinate, value: f64) {
        let sign = self.sig.self_sign(c.block) as f64;
        let b = &mut self.blocks[c.block.bits() as usize];
        b[(c.row, c.col)] = value;
        if c.row != c.col {
            b[(c.col, c.row)] = sign * value;
        }
    }

    /// Largest violation of `(M^A)^t = (A|A)·M^A` over all blocks, with the
    /// offending block id.
    pub fn transpose_constraint_residual(&self) -> (f64, SubsetId) {
        let mut worst = (0.0f64, SubsetId::EMPTY);
        for a in SubsetId::all(self.sig.p()) {
            let sign = self.sig.self_sign(a) as f64;
            let b = &self.blocks[a.bits() as usize];
            for i in 0..self.n {
                for j in 0..=i {
                    let r = (b[(j, i)] - sign * b[(i, j)]).abs();
                    if r > worst.0 {
                        worst = (r, a);
                    }
                }
            }
        }
        worst
    }

    fn validate_constraints(&self) -> Result<()> {
        let scale = self.blocks.iter().fold(1.0f64, |m, b| {
            b.iter().fold(m, |m, x| m.max(x.abs()))
        });
        let (residual, block) = self.transpose_constraint_residual();
        if residual > 1e-12 * scale {
            return Err(Error::BlockConstraint { block, residual });
        }
        Ok(())
    }

    /// Σ_A ‖M^A‖²_F.
    pub fn block_frobenius_sq(&self) -> f64 {
        self.blocks.iter().map(|b| b.iter().map(|x| x * x).sum::<f64>()).sum()
    }

    /// ‖φ(M)‖_F without materializing `φ(M)`: each block reappears `2^p`
    /// times up to sign.
    pub fn realized_frobenius(&self) -> f64 {
        (self.sig.blade_count() as f64 * self.block_frobenius_sq()).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        let blocks = self.blocks.iter().map(|b| b * s).collect();
        CliffordMatrix { sig: self.sig.clone(), n: self.n, blocks }
    }

    pub fn add(&self, other: &CliffordMatrix) -> Result<Self> {
        self.check_compatible(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(CliffordMatrix { sig: self.sig.clone(), n: self.n, blocks })
    }

    fn check_compatible(&self, other: &CliffordMatrix) -> Result<()> {
        if self.sig != other.sig || self.n != other.n {
            return Err(Error::Mismatch("operands differ in signature or block size".into()));
        }
        Ok(())
    }

    /// Block-level Clifford product: `(MN)^C = Σ_B (CΔB|B)·M^{CΔB}·N^B`.
    pub fn clifford_mul(&self, other: &CliffordMatrix) -> Result<CliffordMatrix> {
        self.check_compatible(other)?;
        let p = self.sig.p();
        let mut out = CliffordMatrix::zero(self.sig.clone(), self.n);
        for c in SubsetId::all(p) {
            let mut acc = DMatrix::<f64>::zeros(self.n, self.n);
            for b in SubsetId::all(p) {
                let sign = self.sig.pair_sign(c.sym_diff(b), b) as f64;
                acc += (self.block(c.sym_diff(b)) * other.block(b)).scale(sign);
            }
            out.blocks[c.bits() as usize] = acc;
        }
        Ok(out)
    }

    /// The realization `φ(M)` as a plain matrix, with no symmetry
    /// requirement on the blocks (needed for products like `φ(M)φ(N)`).
    pub fn realize_raw(&self) -> DMatrix<f64> {
        let p = self.sig.p();
        let blades = self.sig.blade_count();
        let n = self.n;
        let mut out = DMatrix::<f64>::zeros(n * blades, n * blades);
        for a in SubsetId::all(p) {
            for b in SubsetId::all(p) {
                let block = self.block(a.sym_diff(b));
                let sign = self.sig.pair_sign(a.sym_diff(b), b) as f64;
                let (r0, c0) = (a.bits() as usize * n, b.bits() as usize * n);
                for i in 0..n {
                    for j in 0..n {
                        out[(r0 + i, c0 + j)] = sign * block[(i, j)];
                    }
                }
            }
        }
        out
    }

    /// Realize as a symmetric matrix, validating the transpose constraints
    /// first and asserting (not assuming) symmetry of the result.
    pub fn realize(&self) -> Result<RealizedMatrix> {
        self.validate_constraints()?;
        let entries = self.realize_raw();
        let dim = entries.nrows();
        for i in 0..dim {
            for j in 0..i {
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::Mismatch(format!(
                        "realized matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(RealizedMatrix { n: self.n, p: self.sig.p(), entries })
    }

    /// Extract the block family of a raw realized matrix (inverse of
    /// `realize_raw` on its image), reading column-block ∅.
    pub fn from_realized_raw(sig: CliffordSignature, n: usize, m: &DMatrix<f64>) -> Result<Self> {
        let blades = sig.blade_count();
        if m.nrows() != n * blades || m.ncols() != n * blades {
            return Err(Error::Mismatch("realized matrix has wrong dimension".into()));
        }
        let mut blocks = Vec::with_capacity(blades);
        for a in SubsetId::all(sig.p()) {
            // Block (A, ∅) carries (A|∅)·M^A = M^A.
            let r0 = a.bits() as usize * n;
            blocks.push(m.view((r0, 0), (n, n)).into_owned());
        }
        CliffordMatrix::from_blocks(sig, n, blocks)
    }

    /// Largest deviation of `m` from being the realization of some block
    /// family, i.e. from the block pattern `(A, B) ↦ (AΔB|B)·M^{AΔB}`.
    pub fn realization_pattern_residual(sig: &CliffordSignature, n: usize, m: &DMatrix<f64>) -> f64 {
        let p = sig.p();
        let mut worst = 0.0f64;
        for a in SubsetId::all(p) {
            for b in SubsetId::all(p) {
                let d = a.sym_diff(b);
                let sign = sig.pair_sign(d, b) as f64;
                let (r0, c0) = (a.bits() as usize * n, b.bits() as usize * n);
                let (rr, cc) = (d.bits() as usize * n, 0);
                for i in 0..n {
                    for j in 0..n {
                        let want = sign * m[(rr + i, cc + j)];
                        worst = worst.max((m[(r0 + i, c0 + j)] - want).abs());
                    }
                }
            }
        }
        worst
    }

    /// Project onto the `+` ideal of `ω_E` (requires a standard signature
    /// with `p ≡ 3 mod 4`): enforce `M^{AΔE} = (A|E)·M^A` by averaging each
    /// pair of blocks.
    pub fn plus_ideal_project(&self) -> Result<CliffordMatrix> {
        let p = self.sig.p();
        if !self.sig.is_standard() {
            return Err(Error::StandardRequired);
        }
        if p % 4 != 3 {
            return Err(Error::IdealSplitUnavailable(p));
        }
        let full = SubsetId::full(p);
        let mut out = self.clone();
        for a in SubsetId::all(p) {
            let sign = self.sig.pair_sign(a, full) as f64;
            let avg = (self.block(a) + self.block(a.sym_diff(full)).scale(sign)).scale(0.5);
            out.blocks[a.bits() as usize] = avg;
        }
        Ok(out)
    }

    /// Split into the two ideal factors (standard signature, `p ≡ 3 mod
    /// 4`): the action of `M` on `Cl(E)_±` expressed in the σ-basis, which
    /// generates a standard algebra on `p − 1` generators. The spectrum of
    /// `φ(M)` is the disjoint union of the two factors' spectra.
    pub fn ideal_factors(&self) -> Result<(CliffordMatrix, CliffordMatrix)> {
        let p = self.sig.p();
        if !self.sig.is_standard() {
            return Err(Error::StandardRequired);
        }
        if p % 4 != 3 {
            return Err(Error::IdealSplitUnavailable(p));
        }
        let sub_sig = CliffordSignature::standard(p - 1)?;
        let full = SubsetId::full(p);
        let mut plus = CliffordMatrix::zero(sub_sig.clone(), self.n);
        let mut minus = CliffordMatrix::zero(sub_sig, self.n);
        for a in SubsetId::all(p - 1) {
            let sign = self.sig.pair_sign(a, full) as f64;
            let mirrored = self.block(a.sym_diff(full)).scale(sign);
            plus.blocks[a.bits() as usize] = self.block(a) + &mirrored;
            minus.blocks[a.bits() as usize] = self.block(a) - &mirrored;
        }
        Ok((plus, minus))
    }
}

/// Serialization layout for a block family: header `(n, p, kind)`, then
/// the blocks in subset-id order, each row-major. `pair_table` carries the
/// generating signs for custom signatures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CliffordMatrixData {
    pub n: usize,
    pub p: u32,
    pub kind: crate::signature::SignatureKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair_table: Option<Vec<(u32, u32, i8)>>,
    pub blocks: Vec<Vec<f64>>,
}

impl CliffordMatrix {
    pub fn to_data(&self) -> CliffordMatrixData {
        let pair_table = match self.sig.kind() {
            crate::signature::SignatureKind::Standard => None,
            crate::signature::SignatureKind::Custom => Some(self.sig.pair_table()),
        };
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut row_major = Vec::with_capacity(self.n * self.n);
                for i in 0..self.n {
                    for j in 0..self.n {
                        row_major.push(b[(i, j)]);
                    }
                }
                row_major
            })
            .collect();
        CliffordMatrixData { n: self.n, p: self.sig.p(), kind: self.sig.kind(), pair_table, blocks }
    }

    pub fn from_data(data: &CliffordMatrixData) -> Result<Self> {
        let sig = match data.kind {
            crate::signature::SignatureKind::Standard => CliffordSignature::standard(data.p)?,
            crate::signature::SignatureKind::Custom => {
                let table = data.pair_table.as_deref().ok_or_else(|| {
                    Error::CustomTable("serialized custom signature lacks its pair table".into())
                })?;
                CliffordSignature::custom(data.p, table)?
            }
        };
        let blocks = data
            .blocks
            .iter()
            .map(|flat| {
                if flat.len() != data.n * data.n {
                    return Err(Error::Mismatch("block data has wrong length".into()));
                }
                Ok(DMatrix::from_row_slice(data.n, data.n, flat))
            })
            .collect::<Result<Vec<_>>>()?;
        CliffordMatrix::from_blocks(sig, data.n, blocks)
    }
}

/// A realized real symmetric `(n·2^p)×(n·2^p)` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizedMatrix {
    n: usize,
    p: u32,
    entries: DMatrix<f64>,
}

impl RealizedMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }
}

/// Draw the blocks of a centered Gaussian Clifford matrix: each independent
/// coordinate `u` gets variance `Γ(u,u)·t` (diagonal `t`, off-diagonal
/// `t/2`), distinct blocks independent, antisymmetric diagonals
/// structurally zero.
pub fn sample_blocks(config: &EnsembleConfig) -> Result<CliffordMatrix> {
    sample_blocks_indexed(config, 0)
}

/// As [`sample_blocks`], drawing from the replica-`index` stream of the
/// seed.
pub fn sample_blocks_indexed(config: &EnsembleConfig, index: u64) -> Result<CliffordMatrix> {
    config.validate()?;
    let sig = CliffordSignature::standard(config.p)?;
    let mut rng = stream_rng(config.seed, index);
    sample_blocks_with(&sig, config.n, config.variance_scale(), &mut rng).map(|mut m| {
        if let EnsembleProcess::Sphere = config.process {
            let norm = m.realized_frobenius();
            if norm > 0.0 {
                m = m.scale(1.0 / norm);
            }
        }
        m
    })
}

/// Sampler over an explicit (possibly custom) signature.
pub fn sample_blocks_with<R: Rng>(
    sig: &CliffordSignature,
    n: usize,
    variance_scale: f64,
    rng: &mut R,
) -> Result<CliffordMatrix> {
    let mut m = CliffordMatrix::zero(sig.clone(), n);
    for c in independent_coordinates(sig, n) {
        let std_dev = (c.weight * variance_scale).sqrt();
        let g: f64 = StandardNormal.sample(rng);
        m.set_coordinate(&c, std_dev * g);
    }
    Ok(m)
}

/// A deterministic batch of independent samples, one RNG stream per
/// replica, evaluated in parallel.
pub fn sample_batch(config: &EnsembleConfig, count: usize) -> Result<Vec<CliffordMatrix>> {
    config.validate()?;
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_blocks_indexed(config, i))
        .collect()
}

/// `‖φ(MN) − φ(M)φ(N)‖_max`: the homomorphism defect of the realization.
pub fn verify_homomorphism(a: &CliffordMatrix, b: &CliffordMatrix) -> Result<f64> {
    let prod = a.clifford_mul(b)?;
    let lhs = prod.realize_raw();
    let rhs = a.realize_raw() * b.realize_raw();
    let mut worst = 0.0f64;
    for (x, y) in lhs.iter().zip(rhs.iter()) {
        worst = worst.max((x - y).abs());
    }
    Ok(worst)
}
