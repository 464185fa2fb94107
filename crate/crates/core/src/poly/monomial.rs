//! Exponent vectors packed into a single `u128`.
//!
//! Each variable gets a 16-bit lane; `x0` sits in the most significant lane so
//! that integer order on keys is lexicographic order on exponent vectors.
//! Lane values stay below `2^15`, which leaves the top bit of every lane free
//! for carry-free SWAR comparisons.

use std::fmt;

/// Most variables a packed monomial can hold.
pub const MAX_VARS: usize = 8;

/// Largest exponent a lane may store.
pub const MAX_EXPONENT: u32 = (1 << 15) - 1;

const LANE_BITS: u32 = 16;
const LANE_MASK: u128 = 0xFFFF;

#[inline]
fn shift(i: usize) -> u32 {
    LANE_BITS * (MAX_VARS - 1 - i) as u32
}

/// `v` repeated in the lanes of the first `nvars` variables.
#[inline]
pub(crate) fn splat(v: u16, nvars: usize) -> u128 {
    (0..nvars).fold(0u128, |acc, i| acc | (v as u128) << shift(i))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub(crate) u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    /// Packs an exponent vector; `None` if it is too long or an entry exceeds
    /// [`MAX_EXPONENT`].
    pub fn from_exponents(exps: &[u32]) -> Option<Monomial> {
        if exps.len() > MAX_VARS {
            return None;
        }
        let mut key = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            if e > MAX_EXPONENT {
                return None;
            }
            key |= (e as u128) << shift(i);
        }
        Some(Monomial(key))
    }

    /// `x_i^e`.
    pub fn var_power(i: usize, e: u32) -> Option<Monomial> {
        if i >= MAX_VARS || e > MAX_EXPONENT {
            return None;
        }
        Some(Monomial((e as u128) << shift(i)))
    }

    #[inline]
    pub fn exponent(&self, i: usize) -> u32 {
        ((self.0 >> shift(i)) & LANE_MASK) as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    pub fn total_degree(&self) -> u32 {
        (0..MAX_VARS).map(|i| self.exponent(i)).sum()
    }

    /// Product of monomials, or `None` if a lane would leave the valid range.
    #[inline]
    pub fn checked_mul(self, other: Monomial) -> Option<Monomial> {
        let s = self.0 + other.0;
        // no lane of either factor exceeds 2^15 - 1, so the sum cannot carry
        // across lanes and overflow shows up as a set top bit
        if s & splat(0x8000, MAX_VARS) != 0 {
            None
        } else {
            Some(Monomial(s))
        }
    }

    /// Whether every one of the first `nvars` exponents is at most `bound`.
    #[inline]
    pub(crate) fn within(self, slack: u128, high: u128) -> bool {
        (self.0 + slack) & high == 0
    }

    /// `self / other` when `self` is strictly larger in each of the first
    /// `nvars` lanes. This is the truncation rule of the dual module: the
    /// quotient must keep every lane at least 1.
    #[inline]
    pub(crate) fn strict_quotient(self, other: Monomial, masks: &LaneMasks) -> Option<Monomial> {
        let t = (self.0 | masks.high).wrapping_sub(other.0).wrapping_sub(masks.ones);
        if t & masks.high == masks.high {
            Some(Monomial(self.0 - other.0))
        } else {
            None
        }
    }

    /// Every exponent multiplied by `k`, if the result stays in range.
    pub fn scaled(self, k: u32, nvars: usize) -> Option<Monomial> {
        let exps: Vec<u32> = (0..nvars)
            .map(|i| self.exponent(i).checked_mul(k))
            .collect::<Option<_>>()?;
        Monomial::from_exponents(&exps)
    }

    /// Exponents reordered so that variable `i` moves to position `perm[i]`.
    pub fn permuted(self, perm: &[usize]) -> Monomial {
        let mut key = 0u128;
        for (i, &j) in perm.iter().enumerate() {
            key |= (self.exponent(i) as u128) << shift(j);
        }
        Monomial(key)
    }

    /// Writes `x0^a*x1^b...`, omitting zero exponents, with exponents negated
    /// when `negate` is set (dual module text).
    pub(crate) fn write(&self, f: &mut impl fmt::Write, nvars: usize, negate: bool) -> fmt::Result {
        let mut first = true;
        for i in 0..nvars {
            let e = self.exponent(i);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_char('*')?;
            }
            first = false;
            match (e, negate) {
                (1, false) => write!(f, "x{i}")?,
                (_, false) => write!(f, "x{i}^{e}")?,
                (_, true) => write!(f, "x{i}^-{e}")?,
            }
        }
        if first {
            f.write_char('1')?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = (0..MAX_VARS).rev().find(|&i| self.exponent(i) != 0).unwrap_or(0);
        write!(f, "{:?}", self.exponents(last + 1))
    }
}

/// Precomputed lane masks for a fixed number of variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct LaneMasks {
    pub(crate) high: u128,
    pub(crate) ones: u128,
}

impl LaneMasks {
    pub(crate) fn new(nvars: usize) -> Self {
        LaneMasks {
            high: splat(0x8000, nvars),
            ones: splat(1, nvars),
        }
    }

    /// Slack such that `m.within(slack, high)` tests `max exponent <= bound`.
    pub(crate) fn slack(nvars: usize, bound: u32) -> u128 {
        let bound = bound.min(MAX_EXPONENT) as u16;
        splat(0x7FFF - bound, nvars)
    }
}

/// All exponent vectors of `nvars` nonnegative entries summing to `degree`,
/// in decreasing lexicographic order.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(i: usize, nvars: usize, left: u32, acc: u128, out: &mut Vec<Monomial>) {
        if i + 1 == nvars {
            out.push(Monomial(acc | (left as u128) << shift(i)));
            return;
        }
        for e in (0..=left).rev() {
            rec(i + 1, nvars, left - e, acc | (e as u128) << shift(i), out);
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial::ONE);
        }
        return out;
    }
    rec(0, nvars, degree, 0, &mut out);
    out
}
