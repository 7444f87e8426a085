//! Subsets of the generator set `E = {1, …, p}` as bitmasks.
//!
//! Bit `i` (zero-based) stands for generator `i + 1`. Symmetric difference
//! is bitwise XOR, which is what makes the sign combinatorics cheap.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A subset of `{1, …, p}` packed into the low `p` bits of a `u32`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetId(pub u32);

impl SubsetId {
    pub const EMPTY: SubsetId = SubsetId(0);

    /// Full set `E` for a given number of generators.
    pub fn full(p: u32) -> Self {
        debug_assert!(p <= 31);
        SubsetId(((1u64 << p) - 1) as u32)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Cardinality |A|.
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    /// Symmetric difference A Δ B.
    pub fn sym_diff(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 ^ other.0)
    }

    pub fn intersect(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 & other.0)
    }

    pub fn difference(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 & !other.0)
    }

    pub fn contains(self, generator: u32) -> bool {
        self.0 >> generator & 1 == 1
    }

    pub fn is_subset_of(self, other: SubsetId) -> bool {
        self.0 & !other.0 == 0
    }

    /// Indices of the generators in the subset, ascending.
    pub fn iter_generators(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    /// All `2^p` subsets of `{1, …, p}` in bitmask order.
    pub fn all(p: u32) -> impl Iterator<Item = SubsetId> {
        debug_assert!(p <= 31);
        (0u32..1 << p).map(SubsetId)
    }

    /// All subsets of `self`, in bitmask-increasing order.
    pub fn subsets(self) -> impl Iterator<Item = SubsetId> {
        // Standard subset-enumeration trick: iterate t = (t - mask) & mask.
        let mask = self.0;
        let mut t: u32 = 0;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let cur = SubsetId(t);
            if t == mask {
                done = true;
            } else {
                t = (t.wrapping_sub(mask)) & mask;
            }
            Some(cur)
        })
    }
}

impl fmt::Debug for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        let elems: Vec<String> = self.iter_generators().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", elems.join(","))
    }
}

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
