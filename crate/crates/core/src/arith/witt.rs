//! Length-two Witt vectors over `k = F_{p^n}`.
//!
//! `W_2(k)` is the unramified extension of `Z/p^2` of degree `n`, so elements
//! are stored as residues mod `p^2` in the basis `1, y, ..., y^{n-1}` of
//! `(Z/p^2)[y]/(M)`, where `M` is the defining polynomial of `k` with its
//! coefficients read as integers in `[0, p)`. The Witt coordinates
//! `(a0, a1)` are recovered through the Teichmuller section:
//!
//! ```text
//! (a0, a1) = [a0] + p * [a1^(1/p)]
//! ```
//!
//! The explicit Witt sum and product polynomials are kept as a second,
//! coordinate-level route ([`WittRing::coord_sum`], [`WittRing::coord_product`]).

use std::fmt;
use std::sync::Arc;

use super::{
    reduce_by_monic, ArithError, CoeffRing, FieldElement, FieldSpec, ResidueField, Result,
    MAX_EXT_DEGREE,
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Witt2(pub(crate) [u64; MAX_EXT_DEGREE]);

impl fmt::Debug for Witt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).unwrap_or(0);
        write!(f, "W2{:?}", &self.0[..=last])
    }
}

/// Ring context for `W_2(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WittRing {
    spec: Arc<FieldSpec>,
}

impl WittRing {
    pub fn new(spec: Arc<FieldSpec>) -> Self {
        WittRing { spec }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn residue_field(&self) -> ResidueField {
        ResidueField::new(self.spec.clone())
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn degree(&self) -> usize {
        self.spec.n
    }

    pub fn zero(&self) -> Witt2 {
        Witt2::default()
    }

    pub fn one(&self) -> Witt2 {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = 1;
        Witt2(c)
    }

    pub fn is_zero(&self, a: &Witt2) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    /// The image of an integer under `Z -> W_2(k)`.
    pub fn from_int(&self, v: i64) -> Witt2 {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = self.spec.fp2.from_i64(v);
        Witt2(c)
    }

    pub fn add(&self, a: &Witt2, b: &Witt2) -> Witt2 {
        let m = self.spec.fp2;
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = m.add(a.0[i], b.0[i]);
        }
        Witt2(c)
    }

    pub fn sub(&self, a: &Witt2, b: &Witt2) -> Witt2 {
        let m = self.spec.fp2;
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = m.sub(a.0[i], b.0[i]);
        }
        Witt2(c)
    }

    pub fn neg(&self, a: &Witt2) -> Witt2 {
        let m = self.spec.fp2;
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = m.neg(a.0[i]);
        }
        Witt2(c)
    }

    pub fn mul(&self, a: &Witt2, b: &Witt2) -> Witt2 {
        let n = self.spec.n;
        let m = self.spec.fp2;
        if n == 1 {
            let mut c = [0; MAX_EXT_DEGREE];
            c[0] = m.mul(a.0[0], b.0[0]);
            return Witt2(c);
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
        Witt2(reduce_by_monic(&mut prod, &self.spec.modulus, m))
    }

    /// Multiplication by an integer.
    pub fn scale_int(&self, a: &Witt2, v: i64) -> Witt2 {
        let m = self.spec.fp2;
        let s = m.from_i64(v);
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = m.mul(a.0[i], s);
        }
        Witt2(c)
    }

    pub fn pow(&self, a: &Witt2, mut exp: u64) -> Witt2 {
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

    /// Reduction `W_2(k) -> k`, i.e. the coordinate `a0`.
    pub fn reduce(&self, a: &Witt2) -> FieldElement {
        let p = self.spec.p;
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = a.0[i] % p;
        }
        FieldElement(c)
    }

    /// The lift of `a` whose representative coefficients are those of `a`
    /// itself (in `[0, p)`); for `k = F_p` this is the integer lift.
    pub fn lift_minimal(&self, a: &FieldElement) -> Witt2 {
        Witt2(a.0)
    }

    pub fn is_unit(&self, a: &Witt2) -> bool {
        self.spec.n > 0 && self.reduce(a).0.iter().any(|&c| c != 0)
    }

    /// Whether `a` lies in `p W_2(k)`, the image of [`WittRing::times_p`].
    pub fn is_divisible_by_p(&self, a: &Witt2) -> bool {
        !self.is_unit(a)
    }

    pub fn inv(&self, a: &Witt2) -> Result<Witt2> {
        let k = self.residue_field();
        let a0 = self.reduce(a);
        let inv0 = k.inv(&a0).map_err(|_| ArithError::NotAUnit)?;
        // Newton step: y = y0 (2 - a y0)
        let y0 = self.lift_minimal(&inv0);
        let two = self.from_int(2);
        Ok(self.mul(&y0, &self.sub(&two, &self.mul(a, &y0))))
    }

    /// The Teichmuller representative `[a] = (a, 0)`.
    pub fn teichmuller(&self, a: &FieldElement) -> Witt2 {
        let mut t = self.lift_minimal(a);
        // any lift raised to p^n lands on the multiplicative representative
        for _ in 0..self.spec.n {
            t = self.pow(&t, self.spec.p);
        }
        t
    }

    /// `times_p(a) = (0, a^p)`, the unique additive map with
    /// `times_p(reduce(x)) = p x`.
    pub fn times_p(&self, a: &FieldElement) -> Witt2 {
        let p = self.spec.p;
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = a.0[i] * p;
        }
        Witt2(c)
    }

    /// Inverse of [`WittRing::times_p`] on `p W_2(k)`.
    pub fn div_p(&self, a: &Witt2) -> Result<FieldElement> {
        let p = self.spec.p;
        if a.0.iter().any(|&c| c % p != 0) {
            return Err(ArithError::NotDivisibleByP);
        }
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.spec.n {
            c[i] = a.0[i] / p;
        }
        Ok(FieldElement(c))
    }

    /// Witt coordinates `(a0, a1)`.
    pub fn coords(&self, a: &Witt2) -> (FieldElement, FieldElement) {
        let k = self.residue_field();
        let a0 = self.reduce(a);
        let t = self.teichmuller(&a0);
        let z = self
            .div_p(&self.sub(a, &t))
            .expect("difference with the Teichmuller lift is divisible by p");
        (a0, k.frobenius(&z))
    }

    /// The element with Witt coordinates `(a0, a1)`.
    pub fn from_coords(&self, a0: &FieldElement, a1: &FieldElement) -> Witt2 {
        let k = self.residue_field();
        let root = k.frobenius_iter(a1, self.spec.n - 1);
        self.add(&self.teichmuller(a0), &self.times_p(&root))
    }

    /// The canonical Frobenius lift `(a0, a1) -> (a0^p, a1^p)`.
    pub fn frobenius(&self, a: &Witt2) -> Witt2 {
        if self.spec.n == 1 {
            return *a;
        }
        let k = self.residue_field();
        let a0 = self.reduce(a);
        let t = self.teichmuller(&a0);
        let z = self
            .div_p(&self.sub(a, &t))
            .expect("difference with the Teichmuller lift is divisible by p");
        // phi([a0] + p[z]) = [a0]^p + p[z^p]
        self.add(&self.pow(&t, self.spec.p), &self.times_p(&k.frobenius(&z)))
    }

    /// The ring isomorphism `W_2(F_p) -> Z/p^2`, `(a0, a1) -> a0^p + p a1`.
    pub fn prime_iso(&self, a: &Witt2) -> Result<u64> {
        if self.spec.n != 1 {
            return Err(ArithError::NotPrimeField(self.spec.n));
        }
        Ok(a.0[0])
    }

    /// Inverse of [`WittRing::prime_iso`].
    pub fn from_residue(&self, r: u64) -> Result<Witt2> {
        if self.spec.n != 1 {
            return Err(ArithError::NotPrimeField(self.spec.n));
        }
        Ok(self.from_int((r % (self.spec.p * self.spec.p)) as i64))
    }

    /// All `q^2` elements, ordered by `(index(a0), index(a1))`.
    pub fn elements(&self) -> impl Iterator<Item = Witt2> + '_ {
        let k = self.residue_field();
        let firsts: Vec<FieldElement> = k.elements().collect();
        let seconds = firsts.clone();
        firsts.into_iter().flat_map(move |a0| {
            let seconds = seconds.clone();
            seconds
                .into_iter()
                .map(move |a1| self.from_coords(&a0, &a1))
        })
    }

    /// All lifts `x` with `reduce(x) = a`.
    pub fn lifts<'a>(&'a self, a: &FieldElement) -> impl Iterator<Item = Witt2> + 'a {
        let base = self.lift_minimal(a);
        let k = self.residue_field();
        let ts: Vec<FieldElement> = k.elements().collect();
        ts.into_iter()
            .map(move |t| self.add(&base, &self.times_p(&t)))
    }

    /// Witt sum on coordinates:
    /// `s1 = a1 + b1 - sum_{i=1}^{p-1} c_i a0^i b0^(p-i)`, `c_i = binom(p,i)/p`.
    pub fn coord_sum(
        &self,
        x: (FieldElement, FieldElement),
        y: (FieldElement, FieldElement),
    ) -> (FieldElement, FieldElement) {
        let k = self.residue_field();
        let consts = self.spec.witt_sum_constants();
        let p = self.spec.p as usize;
        let (a0, a1) = x;
        let (b0, b1) = y;
        let mut a_pows = Vec::with_capacity(p);
        let mut b_pows = Vec::with_capacity(p);
        a_pows.push(k.one());
        b_pows.push(k.one());
        for i in 1..p {
            a_pows.push(k.mul(&a_pows[i - 1], &a0));
            b_pows.push(k.mul(&b_pows[i - 1], &b0));
        }
        let mut carry = k.zero();
        for i in 1..p {
            let c = k.from_int(consts[i] as i64);
            let term = k.mul(&c, &k.mul(&a_pows[i], &b_pows[p - i]));
            carry = k.add(&carry, &term);
        }
        (k.add(&a0, &b0), k.sub(&k.add(&a1, &b1), &carry))
    }

    /// Witt product on coordinates: `(a0 b0, a0^p b1 + a1 b0^p)`.
    pub fn coord_product(
        &self,
        x: (FieldElement, FieldElement),
        y: (FieldElement, FieldElement),
    ) -> (FieldElement, FieldElement) {
        let k = self.residue_field();
        let (a0, a1) = x;
        let (b0, b1) = y;
        let s1 = k.add(
            &k.mul(&k.frobenius(&a0), &b1),
            &k.mul(&a1, &k.frobenius(&b0)),
        );
        (k.mul(&a0, &b0), s1)
    }

    /// `"(a0|a1)"` with field-element text for each coordinate.
    pub fn format(&self, a: &Witt2) -> String {
        let k = self.residue_field();
        let (a0, a1) = self.coords(a);
        format!("({}|{})", k.format(&a0), k.format(&a1))
    }

    pub(crate) fn parse_coords(&self, text: &str) -> Result<(FieldElement, FieldElement)> {
        let err = |reason: &str| ArithError::Parse {
            what: "Witt vector",
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let t = text.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| err("expected \"(a0|a1)\""))?;
        let (l, r) = inner
            .split_once('|')
            .ok_or_else(|| err("missing '|' separator"))?;
        let k = self.residue_field();
        Ok((k.parse(l)?, k.parse(r)?))
    }

    /// Parses `"(a0|a1)"` or an integer.
    pub fn parse(&self, text: &str) -> Result<Witt2> {
        let t = text.trim();
        if t.starts_with('(') {
            let (a0, a1) = self.parse_coords(t)?;
            return Ok(self.from_coords(&a0, &a1));
        }
        let v: i64 = t.parse().map_err(|_| ArithError::Parse {
            what: "Witt vector",
            text: text.to_string(),
            reason: "expected an integer or \"(a0|a1)\"".into(),
        })?;
        Ok(self.from_int(v))
    }
}

impl CoeffRing for WittRing {
    type Elem = Witt2;
    const NAME: &'static str = "W2(k)";

    fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }
    fn zero(&self) -> Witt2 {
        WittRing::zero(self)
    }
    fn one(&self) -> Witt2 {
        WittRing::one(self)
    }
    fn is_zero(&self, a: &Witt2) -> bool {
        WittRing::is_zero(self, a)
    }
    fn add(&self, a: &Witt2, b: &Witt2) -> Witt2 {
        WittRing::add(self, a, b)
    }
    fn sub(&self, a: &Witt2, b: &Witt2) -> Witt2 {
        WittRing::sub(self, a, b)
    }
    fn neg(&self, a: &Witt2) -> Witt2 {
        WittRing::neg(self, a)
    }
    fn mul(&self, a: &Witt2, b: &Witt2) -> Witt2 {
        WittRing::mul(self, a, b)
    }
    fn from_int(&self, v: i64) -> Witt2 {
        WittRing::from_int(self, v)
    }
    fn format_elem(&self, a: &Witt2) -> String {
        self.format(a)
    }
    fn parse_elem(&self, text: &str) -> Result<Witt2> {
        self.parse(text)
    }
}
