//! Sign structures `(A|B)` on subsets of `E = {1, …, p}`.
//!
//! A general Clifford algebra on `2^p` basis blades `ω_A` multiplies as
//! `ω_A ω_B = (A|B) ω_{AΔB}` with `(A|B) ∈ {−1, +1}`. Under the canonical
//! ordering convention the whole table is generated multiplicatively from
//! `(i|i)` and the products `(i|j)(j|i)`, with `(i|j) = +1` for `i < j`:
//!
//! ```text
//! (A|B) = ∏_{i∈A, j∈B} (i|j)
//! ```
//!
//! The standard algebra has `(i|i) = −1` and `(i|j)(j|i) = −1` for `i ≠ j`,
//! which gives `(A|A) = (−1)^{|A|(|A|+1)/2}` and
//! `(A|B)(B|A) = (−1)^{|A||B| + |A∩B|}`.

use crate::error::{Error, Result};
use crate::subset::SubsetId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Hard cap on the number of generators. Realized matrices have side
/// `n·2^p`, so anything beyond this is out of reach anyway.
pub const MAX_GENERATORS: u32 = 16;

/// Largest `p` for which the exhaustive associativity sweep (`8^p` triples)
/// is allowed.
pub const MAX_EXHAUSTIVE_P: u32 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignatureKind {
    Standard,
    Custom,
}

/// The sign structure of a general Clifford algebra on `p` generators.
///
/// Internally stores, per generator `i`, the bitmask of generators `j` with
/// `(i|j) = −1`; `(A|B)` is then a popcount parity, evaluated on demand in
/// `O(|A|)`. No `4^p` table is ever materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordSignature {
    p: u32,
    kind: SignatureKind,
    neg_masks: Vec<u32>,
}

impl CliffordSignature {
    /// The standard Clifford algebra: `(i|i) = (i|j)(j|i) = −1`.
    pub fn standard(p: u32) -> Result<Self> {
        if p > MAX_GENERATORS {
            return Err(Error::UnsupportedP { p, max: MAX_GENERATORS });
        }
        // (i|j) = −1 exactly when j ≤ i.
        let neg_masks = (0..p).map(|i| ((1u64 << (i + 1)) - 1) as u32).collect();
        Ok(CliffordSignature { p, kind: SignatureKind::Standard, neg_masks })
    }

    /// A custom sign structure from pair entries `(i, j, sign)` with
    /// `i ≤ j` (zero-based generators). The diagonal entry is `(i|i)`; an
    /// off-diagonal entry fixes the product `(i|j)(j|i)`. Pairs not listed
    /// default to `+1`.
    pub fn custom(p: u32, pair_table: &[(u32, u32, i8)]) -> Result<Self> {
        if p > MAX_GENERATORS {
            return Err(Error::UnsupportedP { p, max: MAX_GENERATORS });
        }
        let mut neg_masks = vec![0u32; p as usize];
        let mut seen = std::collections::HashSet::new();
        for &(i, j, sign) in pair_table {
            if i > j || j >= p {
                return Err(Error::CustomTable(format!(
                    "pair ({i}, {j}) out of range for p = {p} (need i ≤ j < p)"
                )));
            }
            if sign != 1 && sign != -1 {
                return Err(Error::CustomTable(format!(
                    "sign {sign} for pair ({i}, {j}) is not in {{−1, +1}}"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::CustomTable(format!("duplicate pair ({i}, {j})")));
            }
            if sign == -1 {
                // (i|i) = −1, or for i < j the product sits entirely in
                // (j|i) since (i|j) = +1 by convention.
                neg_masks[j as usize] |= 1 << i;
            }
        }
        Ok(CliffordSignature { p, kind: SignatureKind::Custom, neg_masks })
    }

    /// Build a signature of either kind; `custom_table` must be present
    /// exactly when `kind` is `Custom`.
    pub fn build(
        p: u32,
        kind: SignatureKind,
        custom_table: Option<&[(u32, u32, i8)]>,
    ) -> Result<Self> {
        match (kind, custom_table) {
            (SignatureKind::Standard, None) => Self::standard(p),
            (SignatureKind::Custom, Some(table)) => Self::custom(p, table),
            (SignatureKind::Standard, Some(_)) => Err(Error::CustomTable(
                "custom table supplied for a standard signature".into(),
            )),
            (SignatureKind::Custom, None) => Err(Error::CustomTable(
                "custom signature requires a pair table".into(),
            )),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn kind(&self) -> SignatureKind {
        self.kind
    }

    pub fn is_standard(&self) -> bool {
        self.kind == SignatureKind::Standard
    }

    /// Number of basis blades `2^p`.
    pub fn blade_count(&self) -> usize {
        1usize << self.p
    }

    /// The generating pair table `(i, j, sign)` with `i ≤ j`: diagonal
    /// entries are `(i|i)`, off-diagonal ones the products `(i|j)(j|i)`.
    /// Feeding it back to [`Self::custom`] reproduces this signature.
    pub fn pair_table(&self) -> Vec<(u32, u32, i8)> {
        let mut table = Vec::new();
        for j in 0..self.p {
            for i in 0..=j {
                let sign = if self.neg_masks[j as usize] >> i & 1 == 1 { -1 } else { 1 };
                table.push((i, j, sign));
            }
        }
        table
    }

    /// The multiplicative sign `(A|B) = ∏_{i∈A, j∈B} (i|j)`.
    ///
    /// `(∅|B) = (A|∅) = +1`.
    pub fn pair_sign(&self, a: SubsetId, b: SubsetId) -> i8 {
        debug_assert!(a.bits() < 1 << self.p && b.bits() < 1 << self.p);
        let mut parity = 0u32;
        let mut bits = a.bits();
        while bits != 0 {
            let i = bits.trailing_zeros();
            parity ^= (self.neg_masks[i as usize] & b.bits()).count_ones() & 1;
            bits &= bits - 1;
        }
        if parity == 0 {
            1
        } else {
            -1
        }
    }

    /// `(A|A)`, deciding whether the block `M^A` is symmetric (+1) or
    /// antisymmetric (−1).
    pub fn self_sign(&self, a: SubsetId) -> i8 {
        self.pair_sign(a, a)
    }

    /// Σ_{A⊆E} (A|A).
    pub fn self_sign_sum(&self) -> i64 {
        SubsetId::all(self.p).map(|a| self.self_sign(a) as i64).sum()
    }

    /// `H(C) = Σ_{A⊆E} (A|C)(C|A)`.
    pub fn h_value(&self, c: SubsetId) -> i64 {
        SubsetId::all(self.p)
            .map(|a| (self.pair_sign(a, c) * self.pair_sign(c, a)) as i64)
            .sum()
    }

    /// `(S^e(B,C), S^o(B,C))`: sums of `(A|B)(B|A)` over even- and
    /// odd-cardinality subsets `A ⊆ C`.
    ///
    /// For standard signatures this runs the two-by-two matrix recursion
    /// (peeling one element of `B ∩ C` at a time after reducing `B` to
    /// `B ∩ C`); for custom signatures it falls back to direct summation.
    pub fn s_even_odd(&self, b: SubsetId, c: SubsetId) -> (i64, i64) {
        if !self.is_standard() {
            return self.s_even_odd_brute(b, c);
        }
        // Reduce B to B ∩ C: the even sum is unchanged, the odd sum picks
        // up (−1)^{|B ∩ C^c|}.
        let b_outside = b.difference(c);
        let odd_sign = if b_outside.len().is_multiple_of(2) { 1 } else { -1 };
        let (se, so) = standard_s_recursion(b.intersect(c), c);
        (se, odd_sign * so)
    }

    /// Brute-force oracle for [`Self::s_even_odd`]: direct summation over
    /// all `A ⊆ C`.
    pub fn s_even_odd_brute(&self, b: SubsetId, c: SubsetId) -> (i64, i64) {
        let mut even = 0i64;
        let mut odd = 0i64;
        for a in c.subsets() {
            let term = (self.pair_sign(a, b) * self.pair_sign(b, a)) as i64;
            if a.len() % 2 == 0 {
                even += term;
            } else {
                odd += term;
            }
        }
        (even, odd)
    }

    /// Check `(A|BΔC)(B|C) = (A|B)(AΔB|C)` together with the unit rules
    /// `(A|∅) = (∅|A) = 1` over all (or sampled) triples.
    pub fn verify_associativity(&self, mode: AssociativityMode) -> Result<AssociativityReport> {
        let p = self.p;
        verify_sign_table(p, |a, b| self.pair_sign(a, b), mode)
    }
}

/// Peels elements of `B ⊆ C` one at a time. With `U = (S^e, S^o)` and
/// `ε = (−1)^{|B|}` at the current size, `U(B, C) = M_ε · U(B∖x, C∖x)`,
/// where `M_+ = [[1,1],[−1,−1]]` and `M_− = [[1,−1],[1,−1]]`; the base case
/// is `U(∅, C) = (2^{|C|−1}, 2^{|C|−1})` for `C ≠ ∅` and `(1, 0)` for
/// `C = ∅`.
fn standard_s_recursion(b: SubsetId, c: SubsetId) -> (i64, i64) {
    debug_assert!(b.is_subset_of(c));
    if b.is_empty() {
        return if c.is_empty() {
            (1, 0)
        } else {
            let half = 1i64 << (c.len() - 1);
            (half, half)
        };
    }
    let x = b.bits().trailing_zeros();
    let stripped = SubsetId(1 << x);
    let (se, so) = standard_s_recursion(b.difference(stripped), c.difference(stripped));
    if b.len().is_multiple_of(2) {
        (se + so, -se - so)
    } else {
        (se - so, se - so)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum AssociativityMode {
    /// All `8^p` triples; only allowed for `p ≤ 7`.
    Exhaustive,
    /// `count` uniformly random triples from a seeded stream.
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct AssociativityReport {
    pub pass: bool,
    pub checked: u64,
    /// First triple `(A, B, C)` violating the identity, if any.
    pub counterexample: Option<(SubsetId, SubsetId, SubsetId)>,
}

/// Associativity verifier over an arbitrary sign tabulation, not just the
/// multiplicative ones (those satisfy the identity by construction; a
/// tampered table need not).
pub fn verify_sign_table<F>(p: u32, sign: F, mode: AssociativityMode) -> Result<AssociativityReport>
where
    F: Fn(SubsetId, SubsetId) -> i8,
{
    let n = 1u64 << p;
    let check = |a: SubsetId, b: SubsetId, c: SubsetId| -> bool {
        sign(a, b.sym_diff(c)) * sign(b, c) == sign(a, b) * sign(a.sym_diff(b), c)
    };
    // Unit rules first: they are part of the associative-unital structure.
    for a in SubsetId::all(p) {
        if sign(a, SubsetId::EMPTY) != 1 || sign(SubsetId::EMPTY, a) != 1 {
            return Ok(AssociativityReport {
                pass: false,
                checked: 0,
                counterexample: Some((a, SubsetId::EMPTY, SubsetId::EMPTY)),
            });
        }
    }
    match mode {
        AssociativityMode::Exhaustive => {
            if p > MAX_EXHAUSTIVE_P {
                return Err(Error::ExhaustiveInfeasible { p, max: MAX_EXHAUSTIVE_P });
            }
            let mut checked = 0u64;
            for a in SubsetId::all(p) {
                for b in SubsetId::all(p) {
                    for c in SubsetId::all(p) {
                        checked += 1;
                        if !check(a, b, c) {
                            return Ok(AssociativityReport {
                                pass: false,
                                checked,
                                counterexample: Some((a, b, c)),
                            });
                        }
                    }
                }
            }
            Ok(AssociativityReport { pass: true, checked, counterexample: None })
        }
        AssociativityMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..count {
                let a = SubsetId(rng.random_range(0..n) as u32);
                let b = SubsetId(rng.random_range(0..n) as u32);
                let c = SubsetId(rng.random_range(0..n) as u32);
                if !check(a, b, c) {
                    return Ok(AssociativityReport {
                        pass: false,
                        checked: i + 1,
                        counterexample: Some((a, b, c)),
                    });
                }
            }
            Ok(AssociativityReport { pass: true, checked: count, counterexample: None })
        }
    }
}

/// Closed form for Σ_A (A|A) on the standard algebra, by residue of `p`
/// mod 4: `2^{2m}(−1)^m` at `p = 4m`, `0` at `4m+1`, `2^{2m+1}(−1)^{m+1}`
/// at `4m+2`, `2^{2m+2}(−1)^{m+1}` at `4m+3`.
pub fn self_sign_sum_closed(p: u32) -> i64 {
    let m = (p / 4) as i64;
    let sign = |k: i64| if k % 2 == 0 { 1i64 } else { -1 };
    match p % 4 {
        0 => (1i64 << (2 * m)) * sign(m),
        1 => 0,
        2 => (1i64 << (2 * m + 1)) * sign(m + 1),
        _ => (1i64 << (2 * m + 2)) * sign(m + 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldCase {
    Real,
    Complex,
    Quaternion,
}

impl FieldCase {
    /// Level-repulsion exponent of the associated spectral law.
    pub fn repulsion_exponent(self) -> u32 {
        match self {
            FieldCase::Real => 1,
            FieldCase::Complex => 2,
            FieldCase::Quaternion => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityPrediction {
    /// Root multiplicity of the characteristic polynomial (per ideal factor
    /// when `splits`).
    pub multiplicity: u64,
    pub case: FieldCase,
    /// Whether the algebra splits into two ideals (`p ≡ 3 mod 4`), so the
    /// characteristic polynomial factors as `P₁·P₂`.
    pub splits: bool,
}

/// Eigenvalue multiplicity and field structure for the standard algebra on
/// `p` generators, period 8 in `p` with the multiplicity growing by `16`
/// per period.
pub fn predicted_multiplicity(p: u32) -> MultiplicityPrediction {
    const BASE: [u64; 8] = [1, 2, 4, 4, 8, 8, 8, 8];
    let r = (p % 8) as usize;
    let multiplicity = BASE[r] << (4 * (p / 8));
    let case = match r {
        0 | 6 | 7 => FieldCase::Real,
        1 | 5 => FieldCase::Complex,
        _ => FieldCase::Quaternion,
    };
    MultiplicityPrediction { multiplicity, case, splits: p % 4 == 3 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_small_pair_signs() {
        let sig = CliffordSignature::standard(2).unwrap();
        let g1 = SubsetId(0b01);
        let g2 = SubsetId(0b10);
        assert_eq!(sig.pair_sign(g1, g1), -1);
        assert_eq!(sig.pair_sign(g2, g2), -1);
        assert_eq!(sig.pair_sign(g1, g2), 1);
        assert_eq!(sig.pair_sign(g2, g1), -1);
        assert_eq!(sig.pair_sign(SubsetId::EMPTY, g2), 1);
        assert_eq!(sig.pair_sign(g1, SubsetId::EMPTY), 1);
    }

    #[test]
    fn trivial_algebra() {
        let sig = CliffordSignature::standard(0).unwrap();
        assert_eq!(sig.pair_sign(SubsetId::EMPTY, SubsetId::EMPTY), 1);
        assert_eq!(sig.self_sign_sum(), 1);
        let rep = sig.verify_associativity(AssociativityMode::Exhaustive).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.checked, 1);
    }

    #[test]
    fn self_sign_matches_cardinality_formula() {
        for p in 0..=8u32 {
            let sig = CliffordSignature::standard(p).unwrap();
            for a in SubsetId::all(p) {
                let k = a.len();
                let expect = if (k * (k + 1) / 2) % 2 == 0 { 1 } else { -1 };
                assert_eq!(sig.self_sign(a), expect, "p={p} A={a:?}");
            }
        }
    }

    #[test]
    fn standard_pair_product_formula() {
        // (A|B)(B|A) = (−1)^{|A||B| + |A∩B|}
        for p in 0..=6u32 {
            let sig = CliffordSignature::standard(p).unwrap();
            for a in SubsetId::all(p) {
                for b in SubsetId::all(p) {
                    let lhs = sig.pair_sign(a, b) * sig.pair_sign(b, a);
                    let e = a.len() * b.len() + a.intersect(b).len();
                    let rhs = if e % 2 == 0 { 1 } else { -1 };
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn multiplicative_extension_rules() {
        let sig = CliffordSignature::standard(5).unwrap();
        for a in SubsetId::all(5).step_by(3) {
            for b in SubsetId::all(5).step_by(2) {
                for c in SubsetId::all(5) {
                    assert_eq!(
                        sig.pair_sign(a.sym_diff(b), c),
                        sig.pair_sign(a, c) * sig.pair_sign(b, c)
                    );
                    assert_eq!(
                        sig.pair_sign(a, b.sym_diff(c)),
                        sig.pair_sign(a, b) * sig.pair_sign(a, c)
                    );
                }
            }
        }
    }

    #[test]
    fn associativity_standard_exhaustive() {
        for p in 0..=5u32 {
            let sig = CliffordSignature::standard(p).unwrap();
            let rep = sig.verify_associativity(AssociativityMode::Exhaustive).unwrap();
            assert!(rep.pass, "standard p={p} failed: {:?}", rep.counterexample);
            assert_eq!(rep.checked, 1 << (3 * p));
        }
    }

    #[test]
    fn associativity_all_plus_custom() {
        // Commutative sign structure: every product sign +1.
        let table: Vec<(u32, u32, i8)> =
            (0..3).flat_map(|i| (i..3).map(move |j| (i, j, 1i8))).collect();
        let sig = CliffordSignature::custom(3, &table).unwrap();
        let rep = sig.verify_associativity(AssociativityMode::Exhaustive).unwrap();
        assert!(rep.pass);
        for a in SubsetId::all(3) {
            for b in SubsetId::all(3) {
                assert_eq!(sig.pair_sign(a, b), 1);
            }
        }
    }

    #[test]
    fn tampered_table_fails_with_witness() {
        // Tabulate a valid standard p=2 table, then flip one interior entry;
        // the flipped table cannot satisfy the associativity identity.
        let sig = CliffordSignature::standard(2).unwrap();
        let bad = SubsetId(0b01);
        let sign = |a: SubsetId, b: SubsetId| -> i8 {
            let s = sig.pair_sign(a, b);
            if a == bad && b == SubsetId(0b11) {
                -s
            } else {
                s
            }
        };
        let rep = verify_sign_table(2, sign, AssociativityMode::Exhaustive).unwrap();
        assert!(!rep.pass);
        assert!(rep.counterexample.is_some());
    }

    #[test]
    fn exhaustive_rejected_for_large_p() {
        let sig = CliffordSignature::standard(8).unwrap();
        let err = sig.verify_associativity(AssociativityMode::Exhaustive);
        assert!(matches!(err, Err(Error::ExhaustiveInfeasible { .. })));
        // Sampled mode is still fine.
        let rep = sig
            .verify_associativity(AssociativityMode::Sampled { count: 2000, seed: 7 })
            .unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn self_sign_sum_examples() {
        for (p, expect) in [(1u32, 0i64), (2, -2), (4, -4)] {
            let sig = CliffordSignature::standard(p).unwrap();
            assert_eq!(sig.self_sign_sum(), expect, "p={p}");
            assert_eq!(self_sign_sum_closed(p), expect, "closed p={p}");
        }
    }

    #[test]
    fn self_sign_sum_matches_closed_form_up_to_12() {
        for p in 0..=12u32 {
            let sig = CliffordSignature::standard(p).unwrap();
            assert_eq!(sig.self_sign_sum(), self_sign_sum_closed(p), "p={p}");
        }
    }

    #[test]
    fn h_values() {
        let sig = CliffordSignature::standard(3).unwrap();
        assert_eq!(sig.h_value(SubsetId::EMPTY), 8);
        // p=3: H(E) = 2^p since ω_E is central here.
        assert_eq!(sig.h_value(SubsetId::full(3)), 8);
        for p in 1..=8u32 {
            let sig = CliffordSignature::standard(p).unwrap();
            let full = SubsetId::full(p);
            for c in SubsetId::all(p) {
                if c.is_empty() || c == full {
                    continue;
                }
                assert_eq!(sig.h_value(c), 0, "p={p} C={c:?}");
            }
            if p % 2 == 0 {
                assert_eq!(sig.h_value(full), 0, "H(E) at even p={p}");
            }
        }
    }

    #[test]
    fn s_even_odd_examples() {
        let sig = CliffordSignature::standard(4).unwrap();
        // B = ∅, |C| = 3 → (4, 4)
        assert_eq!(sig.s_even_odd(SubsetId::EMPTY, SubsetId(0b0111)), (4, 4));
        // B = C, |B| = 2 → (2, −2)
        assert_eq!(sig.s_even_odd(SubsetId(0b0101), SubsetId(0b0101)), (2, -2));
        // ∅ ≠ B ⊊ C → (0, 0)
        assert_eq!(sig.s_even_odd(SubsetId(0b0001), SubsetId(0b0111)), (0, 0));
    }

    #[test]
    fn s_even_odd_recursion_matches_brute_force() {
        for p in 0..=6u32 {
            let sig = CliffordSignature::standard(p).unwrap();
            for c in SubsetId::all(p) {
                for b in c.subsets() {
                    assert_eq!(
                        sig.s_even_odd(b, c),
                        sig.s_even_odd_brute(b, c),
                        "p={p} B={b:?} C={c:?}"
                    );
                }
            }
        }
        // The reduction step for B ⊄ C.
        let sig = CliffordSignature::standard(5).unwrap();
        for b in SubsetId::all(5) {
            for c in [SubsetId(0b00111), SubsetId(0b10101), SubsetId(0b01000)] {
                assert_eq!(sig.s_even_odd(b, c), sig.s_even_odd_brute(b, c));
            }
        }
    }

    #[test]
    fn multiplicity_table() {
        let cases = [
            (0u32, 1u64, FieldCase::Real, false),
            (1, 2, FieldCase::Complex, false),
            (2, 4, FieldCase::Quaternion, false),
            (3, 4, FieldCase::Quaternion, true),
            (4, 8, FieldCase::Quaternion, false),
            (5, 8, FieldCase::Complex, false),
            (6, 8, FieldCase::Real, false),
            (7, 8, FieldCase::Real, true),
            (8, 16, FieldCase::Real, false),
            (9, 32, FieldCase::Complex, false),
        ];
        for (p, a, case, splits) in cases {
            let pred = predicted_multiplicity(p);
            assert_eq!(pred.multiplicity, a, "p={p}");
            assert_eq!(pred.case, case, "p={p}");
            assert_eq!(pred.splits, splits, "p={p}");
        }
    }

    #[test]
    fn multiplicity_bott_periodicity() {
        for p in 0..=8u32 {
            let low = predicted_multiplicity(p);
            let high = predicted_multiplicity(p + 8);
            assert_eq!(high.multiplicity, low.multiplicity * 16);
            assert_eq!(high.case, low.case);
            assert_eq!(high.splits, low.splits);
        }
    }

    #[test]
    fn custom_table_validation() {
        assert!(matches!(
            CliffordSignature::custom(2, &[(0, 1, 3)]),
            Err(Error::CustomTable(_))
        ));
        assert!(matches!(
            CliffordSignature::custom(2, &[(1, 0, 1)]),
            Err(Error::CustomTable(_))
        ));
        assert!(matches!(
            CliffordSignature::custom(2, &[(0, 1, 1), (0, 1, -1)]),
            Err(Error::CustomTable(_))
        ));
        assert!(matches!(
            CliffordSignature::standard(40),
            Err(Error::UnsupportedP { .. })
        ));
        assert!(matches!(
            CliffordSignature::build(2, SignatureKind::Custom, None),
            Err(Error::CustomTable(_))
        ));
    }
}
