//! Exact arithmetic in `F_{p^n}` and in the length-two Witt vectors `W_2(F_{p^n})`.
//!
//! A [`FieldSpec`] fixes the prime and the defining polynomial of the
//! extension. Elements are plain `Copy` values; all arithmetic goes through a
//! ring context ([`ResidueField`] for `k`, [`WittRing`] for `W_2(k)`) that
//! owns a shared reference to the spec.

mod fp_poly;
mod witt;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

pub use witt::{Witt2, WittRing};

/// Largest supported extension degree `n` of `F_{p^n}` over `F_p`.
pub const MAX_EXT_DEGREE: usize = 6;

/// Primes must stay below this bound so that residues mod `p^2` fit in 62 bits.
pub const PRIME_BOUND: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("prime {0} is too large (must be below 2^31)")]
    PrimeTooLarge(u64),
    #[error("extension degree {0} is out of range 1..={max}", max = MAX_EXT_DEGREE)]
    DegreeOutOfRange(usize),
    #[error("modulus must be a monic polynomial of degree {expected} with coefficients mod p")]
    BadModulus { expected: usize },
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not a unit of W_2(k)")]
    NotAUnit,
    #[error("element is not divisible by p")]
    NotDivisibleByP,
    #[error("identification with Z/p^2 needs a prime field, got extension degree {0}")]
    NotPrimeField(usize),
    #[error("field elements come from different fields")]
    MismatchedField,
    #[error("cannot parse {what} from {text:?}: {reason}")]
    Parse {
        what: &'static str,
        text: String,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, ArithError>;

/// Modular arithmetic helper for a modulus below `2^62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Modulus {
    m: u64,
    // products of residues fit in a u64
    small: bool,
}

impl Modulus {
    pub(crate) fn new(m: u64) -> Self {
        Modulus {
            m,
            small: m <= (1 << 32),
        }
    }

    #[inline]
    pub(crate) fn value(self) -> u64 {
        self.m
    }

    #[inline]
    pub(crate) fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub(crate) fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub(crate) fn mul(self, a: u64, b: u64) -> u64 {
        if self.small {
            a * b % self.m
        } else {
            ((a as u128 * b as u128) % self.m as u128) as u64
        }
    }

    pub(crate) fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub(crate) fn from_i64(self, v: i64) -> u64 {
        v.rem_euclid(self.m as i64) as u64
    }
}

/// Inverse of `a` modulo a prime `p` by the extended Euclidean algorithm.
pub(crate) fn inv_mod_prime(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i128) as u64)
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The base field `k = F_p[y]/(modulus)`.
pub struct FieldSpec {
    p: u64,
    n: usize,
    /// Monic, low degree first, length `n + 1`.
    modulus: Vec<u64>,
    fp: Modulus,
    fp2: Modulus,
    witt_consts: OnceLock<Vec<u64>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl Hash for FieldSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.n.hash(state);
        self.modulus.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}[{}]", self.p, self.n, self.modulus_text())
        }
    }
}

impl FieldSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<FieldSpec>> {
        Self::new(p, 1, None)
    }

    /// `F_{p^n}` defined by `modulus` (monic, coefficients low degree first),
    /// or by the smallest monic irreducible polynomial of degree `n` when
    /// `modulus` is `None`.
    pub fn new(p: u64, n: usize, modulus: Option<Vec<u64>>) -> Result<Arc<FieldSpec>> {
        if p >= PRIME_BOUND {
            return Err(ArithError::PrimeTooLarge(p));
        }
        if p < 3 || !is_prime(p) {
            return Err(ArithError::NotOddPrime(p));
        }
        if n == 0 || n > MAX_EXT_DEGREE {
            return Err(ArithError::DegreeOutOfRange(n));
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != n + 1 || m[n] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(ArithError::BadModulus { expected: n });
                }
                if !fp_poly::is_irreducible(&m, p) {
                    return Err(ArithError::ReducibleModulus(p));
                }
                m
            }
            None => fp_poly::smallest_irreducible(n, p),
        };
        Ok(Arc::new(FieldSpec {
            p,
            n,
            modulus,
            fp: Modulus::new(p),
            fp2: Modulus::new(p * p),
            witt_consts: OnceLock::new(),
        }))
    }

    /// Parses a modulus given as polynomial text in `y` (e.g. `y^2+1`) or as a
    /// comma-separated coefficient list, low degree first (e.g. `1,0,1`).
    pub fn parse_modulus(text: &str, p: u64) -> Result<Vec<u64>> {
        fp_poly::parse(text, p)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Extension degree `n`.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn modulus_text(&self) -> String {
        fp_poly::format(&self.modulus, 'y')
    }

    /// `q = p^n`, when it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        let mut q: u64 = 1;
        for _ in 0..self.n {
            q = q.checked_mul(self.p)?;
        }
        Some(q)
    }

    /// `c_i = binom(p, i) / p mod p` for `i = 0..p` (entries 0 unused),
    /// computed once from exact binomials.
    pub(crate) fn witt_sum_constants(&self) -> &[u64] {
        self.witt_consts.get_or_init(|| {
            use num_bigint::BigUint;
            use num_traits::ToPrimitive;
            let p = self.p;
            let mut out = vec![0u64; p as usize];
            let mut binom = BigUint::from(1u32);
            let pb = BigUint::from(p);
            for i in 1..p {
                binom = binom * BigUint::from(p - i + 1) / BigUint::from(i);
                let c = (&binom / &pb) % &pb;
                out[i as usize] = c.to_u64().expect("reduced mod p");
            }
            out
        })
    }
}

/// An element of `k = F_{p^n}`: coefficients of `1, y, ..., y^{n-1}`, each in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct FieldElement(pub(crate) [u64; MAX_EXT_DEGREE]);

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).unwrap_or(0);
        write!(f, "Fq{:?}", &self.0[..=last])
    }
}

impl FieldElement {
    /// The raw coefficient array; entries beyond the extension degree are zero.
    pub fn raw(&self) -> &[u64; MAX_EXT_DEGREE] {
        &self.0
    }
}

/// Ring context for `k = F_{p^n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueField {
    spec: Arc<FieldSpec>,
}

impl ResidueField {
    pub fn new(spec: Arc<FieldSpec>) -> Self {
        ResidueField { spec }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn degree(&self) -> usize {
        self.spec.n
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::default()
    }

    pub fn one(&self) -> FieldElement {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = 1;
        FieldElement(c)
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn from_int(&self, v: i64) -> FieldElement {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = self.spec.fp.from_i64(v);
        FieldElement(c)
    }

    /// Builds an element from coefficients of `1, y, y^2, ...`; extra
    /// coefficients are rejected.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElement> {
        if coeffs.len() > self.spec.n {
            return Err(ArithError::Parse {
                what: "field element",
                text: format!("{coeffs:?}"),
                reason: format!("at most {} coefficients expected", self.spec.n),
            });
        }
        let mut c = [0; MAX_EXT_DEGREE];
        for (slot, &v) in c.iter_mut().zip(coeffs) {
            *slot = self.spec.fp.from_i64(v);
        }
        Ok(FieldElement(c))
    }

    pub fn coeffs<'a>(&self, a: &'a FieldElement) -> &'a [u64] {
        &a.0[..self.spec.n]
    }

    /// The generator `y^j` of the power basis of `k` over `F_p`.
    pub fn basis_element(&self, j: usize) -> FieldElement {
        assert!(j < self.spec.n, "basis index out of range");
        let mut c = [0; MAX_EXT_DEGREE];
        c[j] = 1;
        FieldElement(c)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let m = self.spec.fp;
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = m.add(a.0[i], b.0[i]);
        }
        FieldElement(c)
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let m = self.spec.fp;
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = m.sub(a.0[i], b.0[i]);
        }
        FieldElement(c)
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let m = self.spec.fp;
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = m.neg(a.0[i]);
        }
        FieldElement(c)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let n = self.spec.n;
        let m = self.spec.fp;
        if n == 1 {
            let mut c = [0; MAX_EXT_DEGREE];
            c[0] = m.mul(a.0[0], b.0[0]);
            return FieldElement(c);
        }
        let mut prod = [0u64; 2 * MAX_EXT_DEGREE];
        for i in 0..n {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] = m.add(prod[i + j], m.mul(a.0[i], b.0[j]));
            }
        }
        FieldElement(reduce_by_monic(&mut prod, &self.spec.modulus, m))
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &FieldElement, mut exp: u64) -> FieldElement {
        let mut base = *a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// The absolute Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        if self.spec.n == 1 {
            return *a;
        }
        self.pow(a, self.spec.p)
    }

    /// `a^(p^e)`.
    pub fn frobenius_iter(&self, a: &FieldElement, e: usize) -> FieldElement {
        let e = e % self.spec.n;
        (0..e).fold(*a, |acc, _| self.frobenius(&acc))
    }

    /// Multiplicative inverse; fails on zero.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if self.is_zero(a) {
            return Err(ArithError::DivisionByZero);
        }
        let p = self.spec.p;
        if self.spec.n == 1 {
            let mut c = [0; MAX_EXT_DEGREE];
            c[0] = inv_mod_prime(a.0[0], p).ok_or(ArithError::DivisionByZero)?;
            return Ok(FieldElement(c));
        }
        let coeffs = &a.0[..self.spec.n];
        let inv = fp_poly::inverse_mod(coeffs, &self.spec.modulus, p)
            .ok_or(ArithError::DivisionByZero)?;
        let mut c = [0; MAX_EXT_DEGREE];
        c[..inv.len()].copy_from_slice(&inv);
        Ok(FieldElement(c))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Every element of `k`, in increasing order of `sum c_i p^i`.
    /// Panics when `q` does not fit in a `u64`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let q = self.spec.order().expect("field too large to enumerate");
        let p = self.spec.p;
        let n = self.spec.n;
        (0..q).map(move |mut idx| {
            let mut c = [0; MAX_EXT_DEGREE];
            for slot in c.iter_mut().take(n) {
                *slot = idx % p;
                idx /= p;
            }
            FieldElement(c)
        })
    }

    /// Position of `a` in [`ResidueField::elements`].
    pub fn index_of(&self, a: &FieldElement) -> u64 {
        a.0[..self.spec.n]
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.spec.p + c)
    }

    /// Integer text for `n = 1`, otherwise comma-separated coefficients `c0,c1,...`.
    pub fn format(&self, a: &FieldElement) -> String {
        let parts: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
        parts.join(",")
    }

    pub fn parse(&self, text: &str) -> Result<FieldElement> {
        let err = |reason: String| ArithError::Parse {
            what: "field element",
            text: text.to_string(),
            reason,
        };
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(err("empty input".into()));
        }
        let mut vals = Vec::new();
        for part in trimmed.split(',') {
            let part: String = part.chars().filter(|c| !c.is_whitespace()).collect();
            let v: i64 = part
                .parse()
                .map_err(|_| err(format!("{part:?} is not an integer")))?;
            vals.push(v);
        }
        if vals.len() > self.spec.n {
            return Err(err(format!(
                "{} coefficients given, extension degree is {}",
                vals.len(),
                self.spec.n
            )));
        }
        self.from_coeffs(&vals)
    }
}

/// Reduces a dense product (length `2 * MAX_EXT_DEGREE`) modulo a monic
/// polynomial of degree `n`, returning the low `n` coefficients.
pub(crate) fn reduce_by_monic(
    prod: &mut [u64; 2 * MAX_EXT_DEGREE],
    modulus: &[u64],
    m: Modulus,
) -> [u64; MAX_EXT_DEGREE] {
    let n = modulus.len() - 1;
    for top in (n..2 * n - 1).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        prod[top] = 0;
        // y^top = y^(top-n) * y^n and y^n = -sum modulus[i] y^i
        for (i, &mc) in modulus.iter().enumerate().take(n) {
            if mc != 0 {
                let idx = top - n + i;
                prod[idx] = m.sub(prod[idx], m.mul(c, mc));
            }
        }
    }
    let mut out = [0; MAX_EXT_DEGREE];
    out[..n].copy_from_slice(&prod[..n]);
    out
}

/// A commutative coefficient ring for polynomials and dual elements.
pub trait CoeffRing: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Copy + Eq + Hash + fmt::Debug + Default + Send + Sync;

    /// Short name used in error messages.
    const NAME: &'static str;

    fn spec(&self) -> &Arc<FieldSpec>;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_int(&self, v: i64) -> Self::Elem;
    fn format_elem(&self, a: &Self::Elem) -> String;
    /// Parses an integer or a Witt literal `(a0|a1)`.
    fn parse_elem(&self, text: &str) -> Result<Self::Elem>;
}

impl CoeffRing for ResidueField {
    type Elem = FieldElement;
    const NAME: &'static str = "k";

    fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }
    fn zero(&self) -> FieldElement {
        ResidueField::zero(self)
    }
    fn one(&self) -> FieldElement {
        ResidueField::one(self)
    }
    fn is_zero(&self, a: &FieldElement) -> bool {
        ResidueField::is_zero(self, a)
    }
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        ResidueField::add(self, a, b)
    }
    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        ResidueField::sub(self, a, b)
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        ResidueField::neg(self, a)
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        ResidueField::mul(self, a, b)
    }
    fn from_int(&self, v: i64) -> FieldElement {
        ResidueField::from_int(self, v)
    }
    fn format_elem(&self, a: &FieldElement) -> String {
        self.format(a)
    }
    fn parse_elem(&self, text: &str) -> Result<FieldElement> {
        let t = text.trim();
        if t.starts_with('(') {
            // a Witt literal over k must be a Teichmuller representative
            let w = WittRing::new(self.spec.clone());
            let (a0, a1) = w.parse_coords(t)?;
            if !self.is_zero(&a1) {
                return Err(ArithError::Parse {
                    what: "field element",
                    text: text.to_string(),
                    reason: "Witt literal with nonzero a1 is not an element of k".into(),
                });
            }
            return Ok(a0);
        }
        let v: i64 = t.parse().map_err(|_| ArithError::Parse {
            what: "coefficient",
            text: text.to_string(),
            reason: "expected an integer".into(),
        })?;
        Ok(self.from_int(v))
    }
}
