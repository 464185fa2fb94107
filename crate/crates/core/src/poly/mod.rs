//! Sparse homogeneous polynomials in `x0, ..., x_N` over `k` or `W_2(k)`.
//!
//! A [`HomogPoly`] carries its ring context, its number of variables and its
//! degree. Terms are kept sorted by decreasing lexicographic order of the
//! exponent vectors with zero coefficients removed, so structural equality is
//! polynomial equality.

mod monomial;
pub(crate) mod parse;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::arith::{ArithError, CoeffRing, FieldSpec, ResidueField, WittRing};

pub use monomial::{monomials_of_degree, Monomial, MAX_EXPONENT, MAX_VARS};
pub(crate) use monomial::{splat, LaneMasks};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("number of variables must be between 1 and {max}, got {0}", max = MAX_VARS)]
    TooManyVariables(usize),
    #[error("variable count mismatch: {0} vs {1}")]
    NumVars(usize, usize),
    #[error("variable index {index} out of range for {nvars} variables")]
    VarIndex { index: usize, nvars: usize },
    #[error("polynomials live over different coefficient rings")]
    MismatchedRing,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("exponent exceeds the packed range (max {max})", max = MAX_EXPONENT)]
    ExponentOverflow,
    #[error("polynomial is not homogeneous: term degrees {0:?}")]
    Inhomogeneous(Vec<i64>),
    #[error("negative exponent {0} in a polynomial")]
    NegativeExponent(i64),
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type Result<T> = std::result::Result<T, PolyError>;

pub(crate) fn same_field(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn check_nvars(nvars: usize) -> Result<()> {
    if nvars == 0 || nvars > MAX_VARS {
        Err(PolyError::TooManyVariables(nvars))
    } else {
        Ok(())
    }
}

/// Sorts by decreasing key and drops zero coefficients.
pub(crate) fn canonical_terms<R: CoeffRing>(
    ring: &R,
    map: FxHashMap<Monomial, R::Elem>,
) -> Vec<(Monomial, R::Elem)> {
    let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !ring.is_zero(c)).collect();
    terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    terms
}

/// Below this many term pairs a product is formed on the calling thread.
const PARALLEL_PAIRS: usize = 1 << 15;

/// Sums `a_i * b_j` over all term pairs, mapping monomial pairs through
/// `combine` (which may reject a pair). Work is split over `a` when the
/// product is large; the merge is exact so the result is schedule independent.
pub(crate) fn sparse_product<R, F>(
    ring: &R,
    a: &[(Monomial, R::Elem)],
    b: &[(Monomial, R::Elem)],
    combine: F,
) -> FxHashMap<Monomial, R::Elem>
where
    R: CoeffRing,
    F: Fn(Monomial, Monomial) -> Option<Monomial> + Sync,
{
    let fold = |mut acc: FxHashMap<Monomial, R::Elem>, chunk: &[(Monomial, R::Elem)]| {
        for (ma, ca) in chunk {
            for (mb, cb) in b {
                if let Some(m) = combine(*ma, *mb) {
                    let v = ring.mul(ca, cb);
                    acc.entry(m)
                        .and_modify(|e| *e = ring.add(e, &v))
                        .or_insert(v);
                }
            }
        }
        acc
    };
    if a.len().saturating_mul(b.len()) < PARALLEL_PAIRS || a.len() < 2 {
        return fold(FxHashMap::default(), a);
    }
    let chunk = a.len().div_ceil(4 * rayon::current_num_threads()).max(1);
    a.par_chunks(chunk)
        .map(|c| fold(FxHashMap::default(), c))
        .reduce(FxHashMap::default, |mut x, mut y| {
            if x.len() < y.len() {
                std::mem::swap(&mut x, &mut y);
            }
            for (m, v) in y {
                x.entry(m).and_modify(|e| *e = ring.add(e, &v)).or_insert(v);
            }
            x
        })
}

#[derive(Clone, PartialEq)]
pub struct HomogPoly<R: CoeffRing> {
    ring: R,
    nvars: usize,
    degree: u32,
    terms: Vec<(Monomial, R::Elem)>,
}

impl<R: CoeffRing> HomogPoly<R> {
    /// The zero polynomial of the given degree.
    pub fn zero(ring: &R, nvars: usize, degree: u32) -> Result<Self> {
        check_nvars(nvars)?;
        Ok(HomogPoly {
            ring: ring.clone(),
            nvars,
            degree,
            terms: Vec::new(),
        })
    }

    pub fn constant(ring: &R, nvars: usize, c: R::Elem) -> Result<Self> {
        Self::from_terms(ring, nvars, [(vec![0; nvars], c)])
    }

    /// `c * x^exps`.
    pub fn monomial(ring: &R, nvars: usize, exps: &[u32], c: R::Elem) -> Result<Self> {
        Self::from_terms(ring, nvars, [(exps.to_vec(), c)])
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, combining
    /// repeated monomials. Fails on inhomogeneous input; an empty input gives
    /// the zero polynomial of degree 0.
    pub fn from_terms<I>(ring: &R, nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, R::Elem)>,
    {
        check_nvars(nvars)?;
        let mut map: FxHashMap<Monomial, R::Elem> = FxHashMap::default();
        let mut degrees = Vec::new();
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(PolyError::NumVars(nvars, exps.len()));
            }
            let m = Monomial::from_exponents(&exps).ok_or(PolyError::ExponentOverflow)?;
            let deg = exps.iter().map(|&e| e as i64).sum::<i64>();
            if !degrees.contains(&deg) {
                degrees.push(deg);
            }
            map.entry(m).and_modify(|e| *e = ring.add(e, &c)).or_insert(c);
        }
        if degrees.len() > 1 {
            degrees.sort_unstable();
            return Err(PolyError::Inhomogeneous(degrees));
        }
        let degree = degrees.first().copied().unwrap_or(0);
        if degree > MAX_EXPONENT as i64 {
            return Err(PolyError::ExponentOverflow);
        }
        Ok(HomogPoly {
            ring: ring.clone(),
            nvars,
            degree: degree as u32,
            terms: canonical_terms(ring, map),
        })
    }

    /// Parses polynomial text such as `x0^3 + x1^3 - 3*x0*x1*x2`. The number
    /// of variables is one more than the largest index unless given.
    pub fn parse(text: &str, ring: &R, nvars: Option<usize>) -> Result<Self> {
        let raw = parse::parse_terms(text)?;
        let max_idx = raw
            .iter()
            .flat_map(|t| t.factors.iter().map(|f| f.0))
            .max()
            .unwrap_or(0);
        let nvars = nvars.unwrap_or(max_idx + 1);
        let mut terms = Vec::with_capacity(raw.len());
        for t in raw {
            let mut exps = vec![0u32; nvars];
            for &(v, e) in &t.factors {
                if v >= nvars {
                    return Err(PolyError::VarIndex { index: v, nvars });
                }
                if e < 0 {
                    return Err(PolyError::NegativeExponent(e));
                }
                let slot = &mut exps[v];
                *slot = u32::try_from(e)
                    .ok()
                    .and_then(|e| slot.checked_add(e))
                    .ok_or(PolyError::ExponentOverflow)?;
            }
            let mut c = match &t.coeff {
                Some(txt) => ring.parse_elem(txt)?,
                None => ring.one(),
            };
            if t.negative {
                c = ring.neg(&c);
            }
            terms.push((exps, c));
        }
        Self::from_terms(ring, nvars, terms)
    }

    pub(crate) fn from_sorted(ring: &R, nvars: usize, degree: u32, terms: Vec<(Monomial, R::Elem)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        HomogPoly {
            ring: ring.clone(),
            nvars,
            degree,
            terms,
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in decreasing lexicographic order.
    pub fn terms(&self) -> &[(Monomial, R::Elem)] {
        &self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> R::Elem {
        match self.terms.binary_search_by(|t| m.cmp(&t.0)) {
            Ok(i) => self.terms[i].1,
            Err(_) => self.ring.zero(),
        }
    }

    pub fn coeff_of(&self, exps: &[u32]) -> R::Elem {
        match Monomial::from_exponents(exps) {
            Some(m) if exps.len() == self.nvars => self.coeff(&m),
            _ => self.ring.zero(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(PolyError::NumVars(self.nvars, other.nvars));
        }
        if !same_field(self.ring.spec(), other.ring.spec()) {
            return Err(PolyError::MismatchedRing);
        }
        Ok(())
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(PolyError::DegreeMismatch(self.degree as i64, other.degree as i64));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let r = &self.ring;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let sign = |c: &R::Elem| if negate { r.neg(c) } else { *c };
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 > b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 > a[i].0 {
                out.push((b[j].0, sign(&b[j].1)));
                j += 1;
            } else {
                let c = r.add(&a[i].1, &sign(&b[j].1));
                if !r.is_zero(&c) {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Ok(Self::from_sorted(r, self.nvars, degree, out))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Self {
        let r = &self.ring;
        let terms = self.terms.iter().map(|(m, c)| (*m, r.neg(c))).collect();
        Self::from_sorted(r, self.nvars, self.degree, terms)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let r = &self.ring;
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (*m, r.mul(a, c)))
            .filter(|(_, a)| !r.is_zero(a))
            .collect();
        Self::from_sorted(r, self.nvars, self.degree, terms)
    }

    fn mul_filtered(&self, other: &Self, bound: Option<u32>) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        if degree > MAX_EXPONENT {
            return Err(PolyError::ExponentOverflow);
        }
        // lanes never exceed the total degree, so plain key addition is exact
        let map = match bound {
            None => sparse_product(&self.ring, &self.terms, &other.terms, |a, b| {
                Some(Monomial(a.0 + b.0))
            }),
            Some(bound) => {
                let slack = LaneMasks::slack(self.nvars, bound);
                let high = splat(0x8000, self.nvars);
                sparse_product(&self.ring, &self.terms, &other.terms, |a, b| {
                    let m = Monomial(a.0 + b.0);
                    m.within(slack, high).then_some(m)
                })
            }
        };
        Ok(Self::from_sorted(
            &self.ring,
            self.nvars,
            degree,
            canonical_terms(&self.ring, map),
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_filtered(other, None)
    }

    fn pow_impl(&self, mut e: u32, bound: Option<u32>) -> Result<Self> {
        if (self.degree as u64) * (e as u64) > MAX_EXPONENT as u64 {
            return Err(PolyError::ExponentOverflow);
        }
        let mut acc = Self::constant(&self.ring, self.nvars, self.ring.one())?;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_filtered(&base, bound)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_filtered(&base, bound)?;
            }
        }
        Ok(acc)
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, e: u32) -> Result<Self> {
        self.pow_impl(e, None)
    }

    /// `self^e` with every term having some exponent above `bound` dropped.
    /// Exponents only grow under multiplication, so the surviving terms are
    /// exactly those of the full power.
    pub fn pow_bounded(&self, e: u32, bound: u32) -> Result<Self> {
        self.pow_impl(e, Some(bound))
    }

    /// Formal partial derivative in `x_i`.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if i >= self.nvars {
            return Err(PolyError::VarIndex {
                index: i,
                nvars: self.nvars,
            });
        }
        let r = &self.ring;
        let unit = Monomial::var_power(i, 1).expect("index checked");
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let c = r.mul(c, &r.from_int(e as i64));
            if !r.is_zero(&c) {
                terms.push((Monomial(m.0 - unit.0), c));
            }
        }
        // removing one from the same lane keeps the order
        Ok(Self::from_sorted(r, self.nvars, self.degree.saturating_sub(1), terms))
    }

    /// Substitution `x_i -> x_{perm[i]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.nvars];
        if perm.len() != self.nvars {
            return Err(PolyError::NumVars(self.nvars, perm.len()));
        }
        for &j in perm {
            if j >= self.nvars || seen[j] {
                return Err(PolyError::VarIndex {
                    index: j,
                    nvars: self.nvars,
                });
            }
            seen[j] = true;
        }
        let mut terms: Vec<_> = self.terms.iter().map(|(m, c)| (m.permuted(perm), *c)).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Ok(Self::from_sorted(&self.ring, self.nvars, self.degree, terms))
    }

    /// Substitution `x_i -> s_i * x_i`.
    pub fn scale_vars(&self, s: &[R::Elem]) -> Result<Self> {
        if s.len() != self.nvars {
            return Err(PolyError::NumVars(self.nvars, s.len()));
        }
        let r = &self.ring;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut c = *c;
                for (i, si) in s.iter().enumerate() {
                    for _ in 0..m.exponent(i) {
                        c = r.mul(&c, si);
                    }
                }
                (*m, c)
            })
            .filter(|(_, c)| !r.is_zero(c))
            .collect();
        Ok(Self::from_sorted(r, self.nvars, self.degree, terms))
    }

    /// Sum of `x_i * p_i`; used to test the Euler identity.
    pub fn euler_sum(parts: &[Self]) -> Result<Self> {
        let first = parts.first().ok_or(PolyError::TooManyVariables(0))?;
        let r = first.ring.clone();
        let n = first.nvars;
        let mut acc = Self::zero(&r, n, first.degree + 1)?;
        for (i, q) in parts.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            let xi = Self::monomial(&r, n, &e, r.one())?;
            acc = acc.add(&xi.mul(q)?)?;
        }
        Ok(acc)
    }
}

impl HomogPoly<WittRing> {
    /// The pullback along `x_i -> x_i^p` with the canonical Frobenius on
    /// coefficients.
    pub fn frobenius_pullback(&self) -> Result<Self> {
        let w = &self.ring;
        let p = w.p() as u32;
        let degree = self
            .degree
            .checked_mul(p)
            .filter(|&d| d <= MAX_EXPONENT)
            .ok_or(PolyError::ExponentOverflow)?;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let m = m.scaled(p, self.nvars).expect("degree bound checked");
                (m, w.frobenius(c))
            })
            .collect();
        Ok(Self::from_sorted(w, self.nvars, degree, terms))
    }

    /// Coefficient-wise reduction to `k`.
    pub fn reduce(&self) -> HomogPoly<ResidueField> {
        let k = self.ring.residue_field();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, self.ring.reduce(c)))
            .filter(|(_, c)| !k.is_zero(c))
            .collect();
        HomogPoly::from_sorted(&k, self.nvars, self.degree, terms)
    }

    /// Whether every coefficient lies in `p W_2(k)`.
    pub fn divisible_by_p(&self) -> bool {
        self.terms.iter().all(|(_, c)| self.ring.is_divisible_by_p(c))
    }
}

impl HomogPoly<ResidueField> {
    /// Coefficient-wise minimal lift to `W_2(k)`.
    pub fn lift_minimal(&self) -> HomogPoly<WittRing> {
        let w = WittRing::new(self.ring.spec().clone());
        let terms = self.terms.iter().map(|(m, c)| (*m, w.lift_minimal(c))).collect();
        HomogPoly::from_sorted(&w, self.nvars, self.degree, terms)
    }
}

pub(crate) fn write_terms<R: CoeffRing>(
    f: &mut impl fmt::Write,
    ring: &R,
    nvars: usize,
    terms: &[(Monomial, R::Elem)],
    negate: bool,
) -> fmt::Result {
    if terms.is_empty() {
        return f.write_char('0');
    }
    for (idx, (m, c)) in terms.iter().enumerate() {
        if idx > 0 {
            f.write_str(" + ")?;
        }
        let is_const = m.0 == 0;
        if *c == ring.one() && !is_const {
            m.write(f, nvars, negate)?;
        } else if is_const {
            f.write_str(&ring.format_elem(c))?;
        } else {
            write!(f, "{}*", ring.format_elem(c))?;
            m.write(f, nvars, negate)?;
        }
    }
    Ok(())
}

impl<R: CoeffRing> fmt::Display for HomogPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.ring, self.nvars, &self.terms, false)
    }
}

impl<R: CoeffRing> fmt::Debug for HomogPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomogPoly[{} vars, deg {}]({})", self.nvars, self.degree, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> ResidueField {
        ResidueField::new(FieldSpec::prime(5).unwrap())
    }

    fn w5() -> WittRing {
        WittRing::new(FieldSpec::prime(5).unwrap())
    }

    #[test]
    fn product_examples() {
        let k = f5();
        let a = HomogPoly::parse("x0 + x1", &k, None).unwrap();
        let b = HomogPoly::parse("x0 - x1", &k, None).unwrap();
        let expect = HomogPoly::parse("x0^2 - x1^2", &k, None).unwrap();
        assert_eq!(a.mul(&b).unwrap(), expect);
        let one = HomogPoly::constant(&k, 2, k.one()).unwrap();
        assert_eq!(a.mul(&one).unwrap(), a);
        let c = HomogPoly::parse("2*x0^4", &k, None).unwrap();
        assert_eq!(c.mul(&c).unwrap(), HomogPoly::parse("4*x0^8", &k, None).unwrap());
    }

    #[test]
    fn parse_dwork_example() {
        let k = f5();
        let f = HomogPoly::parse("x0^3 + x1^3 + x2^3 - 3*x0*x1*x2", &k, None).unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.degree(), 3);
        assert_eq!(f.coeff_of(&[1, 1, 1]), k.from_int(2));
        assert_eq!(f.to_string(), "x0^3 + 2*x0*x1*x2 + x1^3 + x2^3");
    }

    #[test]
    fn parse_rejects_inhomogeneous() {
        let k = f5();
        assert_eq!(
            HomogPoly::parse("x0 + x1^2", &k, None).unwrap_err(),
            PolyError::Inhomogeneous(vec![1, 2])
        );
        assert!(matches!(
            HomogPoly::parse("x0 + ", &k, None),
            Err(PolyError::Syntax { .. })
        ));
        assert!(matches!(
            HomogPoly::parse("x3", &k, Some(2)),
            Err(PolyError::VarIndex { .. })
        ));
    }

    #[test]
    fn witt_coefficients_parse() {
        let w = w5();
        let f = HomogPoly::parse("(3|2)*x0^2 - x1^2", &w, None).unwrap();
        assert_eq!(w.prime_iso(&f.coeff_of(&[2, 0])).unwrap(), 3);
        assert_eq!(w.prime_iso(&f.coeff_of(&[0, 2])).unwrap(), 24);
    }

    #[test]
    fn partial_examples() {
        let k = f5();
        let f = HomogPoly::parse("x0^3", &k, None).unwrap();
        assert_eq!(f.partial(0).unwrap(), HomogPoly::parse("3*x0^2", &k, None).unwrap());
        let g = HomogPoly::parse("x1^4", &k, Some(2)).unwrap();
        assert!(g.partial(0).unwrap().is_zero());
        assert!(g.partial(2).is_err());
    }

    #[test]
    fn frobenius_pullback_examples() {
        let w = w5();
        let x0 = HomogPoly::parse("x0", &w, Some(3)).unwrap();
        assert_eq!(
            x0.frobenius_pullback().unwrap(),
            HomogPoly::parse("x0^5", &w, Some(3)).unwrap()
        );
        // p = 5, N = 2, eta = 3
        let f = HomogPoly::parse("3*x0^3 + 3*x1^3 + 3*x2^3 - 3*x0*x1*x2", &w, None).unwrap();
        let ff = f.frobenius_pullback().unwrap();
        let expect =
            HomogPoly::parse("3*x0^15 + 3*x1^15 + 3*x2^15 - 3*x0^5*x1^5*x2^5", &w, None).unwrap();
        assert_eq!(ff, expect);
        assert!(ff.sub(&f.pow(5).unwrap()).unwrap().divisible_by_p());
    }

    #[test]
    fn bounded_power_keeps_low_terms() {
        let w = w5();
        let f = HomogPoly::parse("3*x0^3 + 3*x1^3 + 3*x2^3 - 3*x0*x1*x2", &w, None).unwrap();
        let full = f.pow(4).unwrap();
        let cut = f.pow_bounded(4, 4).unwrap();
        assert_eq!(full.coeff_of(&[4, 4, 4]), cut.coeff_of(&[4, 4, 4]));
        assert!(cut.len() < full.len());
    }

    #[test]
    fn large_product_is_deterministic() {
        let w = w5();
        let f = HomogPoly::parse("x0^2 + 2*x1*x2 + 3*x3^2 + x0*x4 + 4*x5^2 + x1*x5", &w, None)
            .unwrap();
        let a = f.pow(9).unwrap();
        let b = f.pow(4).unwrap().mul(&f.pow(5).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
