//! Minimal double-double arithmetic (~31 significant digits).
//!
//! The coefficient-space root-power extraction `P = Q^a` loses on the
//! order of `log10 C(d, d/a)` digits to cancellation — about 19 at
//! degree 128 — which is unrecoverable in plain `f64`. The recursion runs
//! in this representation instead; inputs and outputs stay `f64`.

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let s = two_sum(self.hi, other.hi);
        quick_two_sum(s.hi, s.lo + self.lo + other.lo)
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd { hi: -other.hi, lo: -other.lo })
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let p = two_prod(self.hi, other.hi);
        quick_two_sum(p.hi, p.lo + self.hi * other.lo + self.lo * other.hi)
    }

    #[inline]
    pub fn scale(self, s: f64) -> Dd {
        let p = two_prod(self.hi, s);
        quick_two_sum(p.hi, p.lo + self.lo * s)
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.to_f64().abs()
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        // Two Newton corrections on the f64 quotient.
        let q0 = self.hi / other.hi;
        let r = self.sub(other.scale(q0));
        let q1 = r.hi / other.hi;
        let r2 = r.sub(other.scale(q1));
        let q2 = r2.hi / other.hi;
        quick_two_sum(q0, q1 + q2)
    }
}

/// Dense polynomial multiply on double-double coefficients.
pub(crate) fn poly_mul(a: &[Dd], b: &[Dd]) -> Vec<Dd> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Dd::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.hi == 0.0 && x.lo == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(x.mul(y));
        }
    }
    out
}

pub(crate) fn poly_pow(base: &[Dd], mut e: u32) -> Vec<Dd> {
    let mut result = vec![Dd::from_f64(1.0)];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul(&result, &b);
        }
        e >>= 1;
        if e > 0 {
            b = poly_mul(&b, &b);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_recovers_small_terms() {
        // 1 + 1e-25 − 1 survives in dd, vanishes in f64.
        let one = Dd::from_f64(1.0);
        let tiny = Dd::from_f64(1e-25);
        let diff = one.add(tiny).sub(one);
        assert!((diff.to_f64() - 1e-25).abs() < 1e-40);

        let p = Dd::from_f64(1.0 + 2f64.powi(-30)).mul(Dd::from_f64(1.0 - 2f64.powi(-30)));
        let expect = 1.0 - 2f64.powi(-60);
        assert!((p.hi - 1.0).abs() < 1e-15);
        assert!((p.to_f64() - expect).abs() < 1e-30);
    }

    #[test]
    fn poly_ops_match_f64_on_benign_inputs() {
        let a: Vec<Dd> = [1.0, -2.0, 3.0].iter().map(|&x| Dd::from_f64(x)).collect();
        let sq = poly_pow(&a, 2);
        let expect = [1.0, -4.0, 10.0, -12.0, 9.0];
        for (got, want) in sq.iter().zip(expect.iter()) {
            assert_eq!(got.to_f64(), *want);
        }
    }
}
