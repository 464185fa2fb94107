//! The graded dual module `S^v`: Laurent monomials whose exponents are all
//! negative, with `S` acting by multiply-then-truncate.
//!
//! A [`DualElement`] stores the exponent *magnitudes* (all at least 1) in the
//! same packed [`Monomial`] keys as polynomials. Terms are sorted by decreasing
//! magnitude key, which is increasing lexicographic order on the actual
//! negative exponents.

mod matrix;

use std::fmt;

use rustc_hash::FxHashMap;

use crate::arith::{CoeffRing, WittRing};
use crate::poly::{
    canonical_terms, check_nvars, monomials_of_degree, parse, same_field, sparse_product,
    splat, write_terms, HomogPoly, LaneMasks, Monomial, PolyError, Result, MAX_EXPONENT,
};

pub use matrix::{howell_kernel, in_span, Smith, Witt2Matrix};

#[derive(Clone, PartialEq)]
pub struct DualElement<R: CoeffRing> {
    ring: R,
    nvars: usize,
    degree: i64,
    terms: Vec<(Monomial, R::Elem)>,
}

/// Magnitudes of the monomial basis of `S^v_t`, in increasing lexicographic
/// order of the (negative) exponent vectors.
pub(crate) fn dual_basis_monomials(nvars: usize, t: i64) -> Vec<Monomial> {
    let total = -t - nvars as i64;
    if total < 0 || nvars == 0 {
        return Vec::new();
    }
    let ones = splat(1, nvars);
    monomials_of_degree(nvars, total as u32)
        .into_iter()
        .map(|m| Monomial(m.0 + ones))
        .collect()
}

/// The exponent vectors of the monomial basis of `S^v_t`: all entries at most
/// -1 and summing to `t`, lexicographically increasing. Empty when
/// `t > -nvars`.
pub fn dual_basis(nvars: usize, t: i64) -> Vec<Vec<i64>> {
    dual_basis_monomials(nvars, t)
        .into_iter()
        .map(|m| (0..nvars).map(|i| -(m.exponent(i) as i64)).collect())
        .collect()
}

impl<R: CoeffRing> DualElement<R> {
    pub fn zero(ring: &R, nvars: usize, degree: i64) -> Result<Self> {
        check_nvars(nvars)?;
        Ok(DualElement {
            ring: ring.clone(),
            nvars,
            degree,
            terms: Vec::new(),
        })
    }

    /// Builds an element from `(exponents, coefficient)` pairs. Monomials with
    /// a nonnegative exponent are zero in `S^v` and are dropped.
    pub fn from_terms<I>(ring: &R, nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, R::Elem)>,
    {
        check_nvars(nvars)?;
        let mut map: FxHashMap<Monomial, R::Elem> = FxHashMap::default();
        let mut degrees = Vec::new();
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(PolyError::NumVars(nvars, exps.len()));
            }
            let deg: i64 = exps.iter().sum();
            if !degrees.contains(&deg) {
                degrees.push(deg);
            }
            if exps.iter().any(|&e| e >= 0) {
                continue;
            }
            let mags: Vec<u32> = exps
                .iter()
                .map(|&e| u32::try_from(-e).map_err(|_| PolyError::ExponentOverflow))
                .collect::<Result<_>>()?;
            let m = Monomial::from_exponents(&mags).ok_or(PolyError::ExponentOverflow)?;
            map.entry(m).and_modify(|e| *e = ring.add(e, &c)).or_insert(c);
        }
        if degrees.len() > 1 {
            degrees.sort_unstable();
            return Err(PolyError::Inhomogeneous(degrees));
        }
        Ok(DualElement {
            ring: ring.clone(),
            nvars,
            degree: degrees.first().copied().unwrap_or(0),
            terms: canonical_terms(ring, map),
        })
    }

    /// `c * x^exps`, with every exponent negative.
    pub fn monomial(ring: &R, nvars: usize, exps: &[i64], c: R::Elem) -> Result<Self> {
        if let Some(&e) = exps.iter().find(|&&e| e >= 0) {
            return Err(PolyError::NegativeExponent(e));
        }
        Self::from_terms(ring, nvars, [(exps.to_vec(), c)])
    }

    /// Parses text such as `x0^-2*x1^-2*x2^-2`. Every variable must carry an
    /// exponent; omitted variables count as exponent 0, which makes the term
    /// vanish.
    pub fn parse(text: &str, ring: &R, nvars: usize) -> Result<Self> {
        let raw = parse::parse_terms(text)?;
        let mut terms = Vec::with_capacity(raw.len());
        for t in raw {
            let mut exps = vec![0i64; nvars];
            for &(v, e) in &t.factors {
                if v >= nvars {
                    return Err(PolyError::VarIndex { index: v, nvars });
                }
                exps[v] += e;
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

    pub(crate) fn from_sorted(ring: &R, nvars: usize, degree: i64, terms: Vec<(Monomial, R::Elem)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        DualElement {
            ring: ring.clone(),
            nvars,
            degree,
            terms,
        }
    }

    pub(crate) fn from_map(ring: &R, nvars: usize, degree: i64, map: FxHashMap<Monomial, R::Elem>) -> Self {
        Self::from_sorted(ring, nvars, degree, canonical_terms(ring, map))
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    /// The degree tag; meaningful only for nonzero elements.
    pub fn degree(&self) -> i64 {
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

    /// Terms as `(magnitudes, coefficient)`.
    pub fn terms(&self) -> &[(Monomial, R::Elem)] {
        &self.terms
    }

    /// Terms as `(exponent vector, coefficient)`.
    pub fn exponent_terms(&self) -> Vec<(Vec<i64>, R::Elem)> {
        self.terms
            .iter()
            .map(|(m, c)| ((0..self.nvars).map(|i| -(m.exponent(i) as i64)).collect(), *c))
            .collect()
    }

    pub(crate) fn coeff_mag(&self, m: &Monomial) -> R::Elem {
        match self.terms.binary_search_by(|t| m.cmp(&t.0)) {
            Ok(i) => self.terms[i].1,
            Err(_) => self.ring.zero(),
        }
    }

    /// Coefficient of `x^exps`; zero if any exponent is nonnegative.
    pub fn coeff(&self, exps: &[i64]) -> R::Elem {
        if exps.len() != self.nvars || exps.iter().any(|&e| e >= 0) {
            return self.ring.zero();
        }
        let mags: Option<Vec<u32>> = exps.iter().map(|&e| u32::try_from(-e).ok()).collect();
        match mags.as_deref().and_then(Monomial::from_exponents) {
            Some(m) => self.coeff_mag(&m),
            None => self.ring.zero(),
        }
    }

    fn check_compatible(&self, nvars: usize, ring: &R) -> Result<()> {
        if self.nvars != nvars {
            return Err(PolyError::NumVars(self.nvars, nvars));
        }
        if !same_field(self.ring.spec(), ring.spec()) {
            return Err(PolyError::MismatchedRing);
        }
        Ok(())
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self> {
        self.check_compatible(other.nvars, &other.ring)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(PolyError::DegreeMismatch(self.degree, other.degree));
        }
        let r = &self.ring;
        let mut map: FxHashMap<Monomial, R::Elem> = self.terms.iter().copied().collect();
        for (m, c) in &other.terms {
            let c = if negate { r.neg(c) } else { *c };
            map.entry(*m).and_modify(|e| *e = r.add(e, &c)).or_insert(c);
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        Ok(Self::from_map(r, self.nvars, degree, map))
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

    /// Substitution `x_i -> x_{perm[i]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.nvars {
            return Err(PolyError::NumVars(self.nvars, perm.len()));
        }
        let mut terms: Vec<_> = self.terms.iter().map(|(m, c)| (m.permuted(perm), *c)).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Ok(Self::from_sorted(&self.ring, self.nvars, self.degree, terms))
    }
}

/// The action of `S` on `S^v`: multiply, then delete every monomial with a
/// nonnegative exponent. Truncated monomials are never materialized.
pub fn dual_act<R: CoeffRing>(f: &HomogPoly<R>, g: &DualElement<R>) -> Result<DualElement<R>> {
    g.check_compatible(f.num_vars(), f.ring())?;
    let masks = LaneMasks::new(g.nvars);
    let map = sparse_product(&g.ring, f.terms(), &g.terms, |fm, gm| {
        gm.strict_quotient(fm, &masks)
    });
    Ok(DualElement::from_map(
        &g.ring,
        g.nvars,
        g.degree + f.degree() as i64,
        map,
    ))
}

/// The Serre pairing `S_d x S^v_{-N-1-d} -> ring`: the coefficient of
/// `x0^-1 ... xN^-1` in `f * g`.
pub fn dual_pairing<R: CoeffRing>(f: &HomogPoly<R>, g: &DualElement<R>) -> Result<R::Elem> {
    g.check_compatible(f.num_vars(), f.ring())?;
    let target = -(g.nvars as i64);
    if !g.is_zero() && !f.is_zero() && f.degree() as i64 + g.degree != target {
        return Err(PolyError::DegreeMismatch(f.degree() as i64, g.degree));
    }
    let r = &g.ring;
    let ones = splat(1, g.nvars);
    let mut acc = r.zero();
    for (m, c) in &g.terms {
        let e = Monomial(m.0 - ones);
        acc = r.add(&acc, &r.mul(c, &f.coeff(&e)));
    }
    Ok(acc)
}

/// Formal `d/dx_i` on Laurent monomials.
pub fn dual_partial<R: CoeffRing>(g: &DualElement<R>, i: usize) -> Result<DualElement<R>> {
    if i >= g.nvars {
        return Err(PolyError::VarIndex {
            index: i,
            nvars: g.nvars,
        });
    }
    let r = &g.ring;
    let unit = Monomial::var_power(i, 1).expect("index checked");
    let mut terms = Vec::with_capacity(g.terms.len());
    for (m, c) in &g.terms {
        let a = m.exponent(i);
        if a >= MAX_EXPONENT {
            return Err(PolyError::ExponentOverflow);
        }
        let c = r.mul(c, &r.from_int(-(a as i64)));
        if !r.is_zero(&c) {
            terms.push((Monomial(m.0 + unit.0), c));
        }
    }
    Ok(DualElement::from_sorted(r, g.nvars, g.degree - 1, terms))
}

/// `x_i -> x_i^p` on exponents with the canonical Frobenius on coefficients.
pub fn dual_frobenius(g: &DualElement<WittRing>) -> Result<DualElement<WittRing>> {
    let w = &g.ring;
    let p = w.p() as u32;
    let terms = g
        .terms
        .iter()
        .map(|(m, c)| {
            m.scaled(p, g.nvars)
                .map(|m| (m, w.frobenius(c)))
                .ok_or(PolyError::ExponentOverflow)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DualElement::from_sorted(w, g.nvars, g.degree * p as i64, terms))
}

impl<R: CoeffRing> fmt::Display for DualElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.ring, self.nvars, &self.terms, true)
    }
}

impl<R: CoeffRing> fmt::Debug for DualElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DualElement[{} vars, deg {}]({})", self.nvars, self.degree, self)
    }
}
