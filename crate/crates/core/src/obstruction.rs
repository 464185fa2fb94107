//! The Frobenius obstruction for a lift `f` over `W_2(k)` of a projective
//! hypersurface `X = V(f)` of degree `d` in `P^N`.
//!
//! Classes in `H^{N-1}(X, O_X)` twisted down by one are represented by
//! elements `g` of `S^v_{-2d}` killed by `f`. The lift is canonical exactly
//! when the composite
//!
//! ```text
//! g  ->  (-f^(2p-1) + 2 f^(p-1) F*(f)) * F*(g)
//! ```
//!
//! vanishes on every such `g` that is also in the kernel of the conormal map
//! `g -> (f dg/dx_i + 2 (df/dx_i) g)_i`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ResidueField, Witt2, WittRing};
use crate::dualmod::{
    dual_act, dual_basis_monomials, dual_frobenius, dual_pairing, dual_partial, howell_kernel,
    in_span, DualElement, Witt2Matrix,
};
use crate::poly::{monomials_of_degree, HomogPoly, Monomial, PolyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("no coefficient of f is a unit in W_2(k)")]
    NotPrimitive,
    #[error("f must have positive degree and at least two variables")]
    Degenerate,
    #[error("expected an element of degree {expected}, got {found}")]
    WrongDegree { expected: i64, found: i64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T> = std::result::Result<T, ObstructionError>;

/// A lift `f` together with the powers the obstruction needs, computed once.
#[derive(Clone, Debug)]
pub struct HypersurfaceContext {
    ring: WittRing,
    f: HomogPoly<WittRing>,
    f0: HomogPoly<ResidueField>,
    partials: Vec<HomogPoly<WittRing>>,
    frob_f: HomogPoly<WittRing>,
    /// `-f^(2p-1) + 2 f^(p-1) F*(f)`
    multiplier: HomogPoly<WittRing>,
    f_pm1: HomogPoly<WittRing>,
    f_2pm1: HomogPoly<WittRing>,
}

/// Outcome of the canonicity test.
#[derive(Clone, Debug)]
pub struct CanonicalVerdict {
    pub canonical: bool,
    /// A kernel generator with nonzero image, when not canonical.
    pub witness: Option<DualElement<WittRing>>,
    pub witness_image: Option<DualElement<WittRing>>,
    /// Number of kernel generators.
    pub kernel_rank: usize,
    /// Set when the verdict is negative for a surface (`N = 3`), where the
    /// explicit conormal kernel may be larger than the true one.
    pub inconclusive_n2: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub setup: f64,
    pub kernel: f64,
    pub composite: f64,
    pub total: f64,
}

/// Serializable summary of a canonicity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub schema_version: u32,
    pub p: u64,
    pub n_ext: usize,
    #[serde(rename = "N")]
    pub n_ambient: usize,
    pub d: u32,
    pub canonical: bool,
    pub inconclusive_n2: bool,
    pub witness: Option<String>,
    pub kernel_rank: usize,
    pub timings_ms: Timings,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

impl HypersurfaceContext {
    pub fn new(f: HomogPoly<WittRing>) -> Result<Self> {
        let ring = f.ring().clone();
        let nvars = f.num_vars();
        if f.degree() == 0 || nvars < 2 {
            return Err(ObstructionError::Degenerate);
        }
        if !f.terms().iter().any(|(_, c)| ring.is_unit(c)) {
            return Err(ObstructionError::NotPrimitive);
        }
        let p = ring.p() as u32;
        let f0 = f.reduce();
        let partials = (0..nvars).map(|i| f.partial(i)).collect::<std::result::Result<_, _>>()?;
        let frob_f = f.frobenius_pullback()?;
        let f_pm1 = f.pow(p - 1)?;
        let f_2pm1 = f_pm1.mul(&f_pm1)?.mul(&f)?;
        let two = ring.from_int(2);
        let multiplier = f_pm1.mul(&frob_f)?.scale(&two).sub(&f_2pm1)?;
        Ok(HypersurfaceContext {
            ring,
            f,
            f0,
            partials,
            frob_f,
            multiplier,
            f_pm1,
            f_2pm1,
        })
    }

    /// Parses `f` over `W_2(k)` and builds the context.
    pub fn parse(text: &str, ring: &WittRing, nvars: Option<usize>) -> Result<Self> {
        Self::new(HomogPoly::parse(text, ring, nvars)?)
    }

    pub fn ring(&self) -> &WittRing {
        &self.ring
    }

    pub fn f(&self) -> &HomogPoly<WittRing> {
        &self.f
    }

    /// The reduction of `f` to `k`.
    pub fn f0(&self) -> &HomogPoly<ResidueField> {
        &self.f0
    }

    pub fn num_vars(&self) -> usize {
        self.f.num_vars()
    }

    /// `N`, the dimension of the ambient projective space.
    pub fn ambient_dim(&self) -> usize {
        self.f.num_vars() - 1
    }

    pub fn degree(&self) -> u32 {
        self.f.degree()
    }

    pub fn frobenius_of_f(&self) -> &HomogPoly<WittRing> {
        &self.frob_f
    }

    pub fn f_pow_pm1(&self) -> &HomogPoly<WittRing> {
        &self.f_pm1
    }

    pub fn f_pow_2pm1(&self) -> &HomogPoly<WittRing> {
        &self.f_2pm1
    }

    /// `-f^(2p-1) + 2 f^(p-1) F*(f)`.
    pub fn multiplier(&self) -> &HomogPoly<WittRing> {
        &self.multiplier
    }

    fn source_degree(&self) -> i64 {
        -2 * self.degree() as i64
    }

    fn check_source(&self, g: &DualElement<WittRing>) -> Result<()> {
        if !g.is_zero() && g.degree() != self.source_degree() {
            return Err(ObstructionError::WrongDegree {
                expected: self.source_degree(),
                found: g.degree(),
            });
        }
        Ok(())
    }

    /// Component `i` is `f * dg/dx_i + 2 (df/dx_i) * g`, in `S^v_{-d-1}`.
    pub fn conormal_map(&self, g: &DualElement<WittRing>) -> Result<Vec<DualElement<WittRing>>> {
        self.check_source(g)?;
        let two = self.ring.from_int(2);
        (0..self.num_vars())
            .map(|i| {
                let a = dual_act(&self.f, &dual_partial(g, i)?)?;
                let b = dual_act(&self.partials[i], g)?.scale(&two);
                let mut c = a.add(&b)?;
                if c.is_zero() {
                    c = DualElement::zero(&self.ring, self.num_vars(), -(self.degree() as i64) - 1)?;
                }
                Ok(c)
            })
            .collect()
    }

    /// `sum_i x_i * c_i`, the contraction defining the Euler kernel.
    pub fn euler_contraction(&self, comps: &[DualElement<WittRing>]) -> Result<DualElement<WittRing>> {
        let n = self.num_vars();
        let mut acc = DualElement::zero(&self.ring, n, -(self.degree() as i64))?;
        for (i, c) in comps.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            let xi = HomogPoly::monomial(&self.ring, n, &e, self.ring.one())?;
            acc = acc.add(&dual_act(&xi, c)?)?;
        }
        Ok(acc)
    }

    /// `(-f^(2p-1) + 2 f^(p-1) F*(f)) * F*(g)`, in `S^v_{-d}`.
    pub fn frobenius_composite(&self, g: &DualElement<WittRing>) -> Result<DualElement<WittRing>> {
        self.check_source(g)?;
        Ok(dual_act(&self.multiplier, &dual_frobenius(g)?)?)
    }

    /// Whether `F*(f^2) = f * (-f^(2p-1) + 2 f^(p-1) F*(f))` holds exactly.
    pub fn fsquared_identity_check(&self) -> Result<bool> {
        let lhs = self.f.mul(&self.f)?.frobenius_pullback()?;
        let rhs = self.f.mul(&self.multiplier)?;
        Ok(lhs == rhs)
    }

    /// Monomial basis of `S^v_{-2d}`.
    pub fn source_basis(&self) -> Vec<Monomial> {
        dual_basis_monomials(self.num_vars(), self.source_degree())
    }

    fn basis_element(&self, m: Monomial) -> DualElement<WittRing> {
        DualElement::from_sorted(
            &self.ring,
            self.num_vars(),
            self.source_degree(),
            vec![(m, self.ring.one())],
        )
    }

    fn vector_to_element(&self, basis: &[Monomial], v: &[Witt2]) -> DualElement<WittRing> {
        let terms = basis
            .iter()
            .zip(v)
            .filter(|(_, c)| !self.ring.is_zero(c))
            .map(|(m, c)| (*m, *c))
            .collect();
        DualElement::from_sorted(&self.ring, self.num_vars(), self.source_degree(), terms)
    }

    /// Coordinates of `g` in [`HypersurfaceContext::source_basis`].
    pub fn element_to_vector(&self, basis: &[Monomial], g: &DualElement<WittRing>) -> Vec<Witt2> {
        basis.iter().map(|m| g.coeff_mag(m)).collect()
    }

    /// Stacks the images of basis elements under several linear maps into a
    /// matrix whose rows are indexed by `(map, output monomial)`.
    fn assemble<F>(&self, basis: &[Monomial], images: F) -> Result<Witt2Matrix>
    where
        F: Fn(&DualElement<WittRing>) -> Result<Vec<DualElement<WittRing>>> + Sync,
    {
        let cols: Vec<Vec<DualElement<WittRing>>> = basis
            .par_iter()
            .map(|m| images(&self.basis_element(*m)))
            .collect::<Result<_>>()?;
        let mut index = std::collections::BTreeMap::new();
        for col in &cols {
            for (block, img) in col.iter().enumerate() {
                for (m, _) in img.terms() {
                    let next = index.len();
                    index.entry((block, *m)).or_insert(next);
                }
            }
        }
        let mut mat = Witt2Matrix::zeros(&self.ring, index.len(), basis.len());
        for (j, col) in cols.iter().enumerate() {
            for (block, img) in col.iter().enumerate() {
                for (m, c) in img.terms() {
                    mat.set(index[&(block, *m)], j, *c);
                }
            }
        }
        Ok(mat)
    }

    fn kernel_of<F>(&self, images: F) -> Result<Vec<DualElement<WittRing>>>
    where
        F: Fn(&DualElement<WittRing>) -> Result<Vec<DualElement<WittRing>>> + Sync,
    {
        let basis = self.source_basis();
        let mat = self.assemble(&basis, images)?;
        Ok(howell_kernel(&mat)
            .iter()
            .map(|v| self.vector_to_element(&basis, v))
            .collect())
    }

    /// Generators of `ker(f : S^v_{-2d} -> S^v_{-d})`.
    pub fn multiplication_kernel(&self) -> Result<Vec<DualElement<WittRing>>> {
        self.kernel_of(|g| Ok(vec![dual_act(&self.f, g)?]))
    }

    /// Generators of the annihilator of `S_{d-N-1} * f` under the pairing.
    pub fn pairing_perp(&self) -> Result<Vec<DualElement<WittRing>>> {
        let n = self.num_vars();
        let d = self.degree() as i64;
        let shift = d - n as i64;
        let multiples: Vec<HomogPoly<WittRing>> = if shift < 0 {
            Vec::new()
        } else {
            monomials_of_degree(n, shift as u32)
                .into_iter()
                .map(|m| {
                    HomogPoly::monomial(&self.ring, n, &m.exponents(n), self.ring.one())
                        .and_then(|m| m.mul(&self.f))
                })
                .collect::<std::result::Result<_, _>>()?
        };
        let w = self.ring.clone();
        let ones = vec![-1i64; n];
        // block i holds the pairing with the i-th multiple, stored as the
        // coefficient of x0^-1 ... xN^-1
        self.kernel_of(|g| {
            multiples
                .iter()
                .map(|h| {
                    let c = dual_pairing(h, g)?;
                    Ok(DualElement::from_terms(&w, n, [(ones.clone(), c)])?)
                })
                .collect()
        })
    }

    /// Generators of `{g in S^v_{-2d} : f g = 0 and g is killed by the
    /// conormal map}`.
    pub fn obstruction_kernel(&self) -> Result<Vec<DualElement<WittRing>>> {
        self.kernel_of(|g| {
            let mut out = vec![dual_act(&self.f, g)?];
            out.extend(self.conormal_map(g)?);
            Ok(out)
        })
    }

    /// Whether every element of `a` lies in the span of `b`, over the monomial
    /// basis of `S^v_{-2d}`.
    pub fn contained_in(&self, a: &[DualElement<WittRing>], b: &[DualElement<WittRing>]) -> bool {
        let basis = self.source_basis();
        let gens: Vec<Vec<Witt2>> = b.iter().map(|g| self.element_to_vector(&basis, g)).collect();
        a.iter()
            .all(|g| in_span(&self.ring, &gens, &self.element_to_vector(&basis, g)))
    }

    /// The composite on each kernel generator. The composite is additive and
    /// Frobenius-semilinear, so it is evaluated once per basis monomial and
    /// then combined as `sum phi(c_j) * gamma(e_j)`.
    pub fn kernel_images(
        &self,
        gens: &[DualElement<WittRing>],
    ) -> Result<Vec<DualElement<WittRing>>> {
        let basis = self.source_basis();
        let used: Vec<bool> = basis
            .iter()
            .map(|m| gens.iter().any(|g| !self.ring.is_zero(&g.coeff_mag(m))))
            .collect();
        let images: Vec<Option<DualElement<WittRing>>> = basis
            .par_iter()
            .zip(used.par_iter())
            .map(|(m, &u)| {
                u.then(|| self.frobenius_composite(&self.basis_element(*m)))
                    .transpose()
            })
            .collect::<Result<_>>()?;
        let target = -(self.degree() as i64);
        gens.iter()
            .map(|g| {
                let mut acc = DualElement::zero(&self.ring, self.num_vars(), target)?;
                for (m, c) in g.terms() {
                    let j = basis.binary_search_by(|b| m.cmp(b)).expect("basis monomial");
                    let img = images[j].as_ref().expect("image computed for used monomial");
                    acc = acc.add(&img.scale(&self.ring.frobenius(c)))?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// Tests canonicity: the composite must vanish on every generator of
    /// [`HypersurfaceContext::obstruction_kernel`].
    pub fn is_canonical(&self) -> Result<CanonicalVerdict> {
        let gens = self.obstruction_kernel()?;
        self.verdict_from(gens)
    }

    fn verdict_from(&self, gens: Vec<DualElement<WittRing>>) -> Result<CanonicalVerdict> {
        let images = self.kernel_images(&gens)?;
        let bad = images.iter().position(|img| !img.is_zero());
        let canonical = bad.is_none();
        Ok(CanonicalVerdict {
            canonical,
            witness: bad.map(|i| gens[i].clone()),
            witness_image: bad.map(|i| images[i].clone()),
            kernel_rank: gens.len(),
            inconclusive_n2: !canonical && self.ambient_dim() == 3,
        })
    }

    /// Runs [`HypersurfaceContext::is_canonical`] and packages the result.
    pub fn report(&self) -> Result<ObstructionReport> {
        let start = Instant::now();
        let t = Instant::now();
        let gens = self.obstruction_kernel()?;
        let kernel = ms(t);
        let t = Instant::now();
        let v = self.verdict_from(gens)?;
        let composite = ms(t);
        Ok(ObstructionReport {
            schema_version: 1,
            p: self.ring.p(),
            n_ext: self.ring.degree(),
            n_ambient: self.ambient_dim(),
            d: self.degree(),
            canonical: v.canonical,
            inconclusive_n2: v.inconclusive_n2,
            witness: v.witness.map(|w| w.to_string()),
            kernel_rank: v.kernel_rank,
            timings_ms: Timings {
                setup: 0.0,
                kernel,
                composite,
                total: ms(start),
            },
        })
    }
}

/// Builds the context and reports, timing construction as well.
pub fn check_lift(f: HomogPoly<WittRing>) -> Result<ObstructionReport> {
    let t = Instant::now();
    let ctx = HypersurfaceContext::new(f)?;
    let setup = ms(t);
    let mut r = ctx.report()?;
    r.timings_ms.setup = setup;
    r.timings_ms.total += setup;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FieldSpec;

    fn dwork_ctx(p: u64, eta: i64) -> HypersurfaceContext {
        let w = WittRing::new(FieldSpec::prime(p).unwrap());
        let text = format!("{eta}*x0^3 + {eta}*x1^3 + {eta}*x2^3 - 3*x0*x1*x2");
        HypersurfaceContext::parse(&text, &w, None).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let ctx = dwork_ctx(5, 3);
        let z = DualElement::zero(ctx.ring(), 3, -6).unwrap();
        assert!(ctx.conormal_map(&z).unwrap().iter().all(|c| c.is_zero()));
        assert!(ctx.frobenius_composite(&z).unwrap().is_zero());
    }

    #[test]
    fn conormal_by_hand() {
        // g = x0^-4 x1^-1 x2^-1, f = 3 sum x_i^3 - 3 x0 x1 x2 over Z/25
        let ctx = dwork_ctx(5, 3);
        let w = ctx.ring().clone();
        let g = DualElement::parse("x0^-4*x1^-1*x2^-1", &w, 3).unwrap();
        let c = ctx.conormal_map(&g).unwrap();
        // i = 0: f * (-4 x0^-5 x1^-1 x2^-1) + 2 * 9 x0^2 * g
        //      = -12 x0^-2 x1^-1 x2^-1 + 18 x0^-2 x1^-1 x2^-1
        let e0 = DualElement::parse("6*x0^-2*x1^-1*x2^-1", &w, 3).unwrap();
        assert_eq!(c[0], e0);
        // i = 1: only 3 x0^3 * (-x0^-4 x1^-2 x2^-1) survives truncation
        let e1 = DualElement::parse("-3*x0^-1*x1^-2*x2^-1", &w, 3).unwrap();
        assert_eq!(c[1], e1);
        assert_eq!(c[2], e1.permute_vars(&[0, 2, 1]).unwrap());
    }

    #[test]
    fn fsquared_identity_holds() {
        assert!(dwork_ctx(5, 3).fsquared_identity_check().unwrap());
        let w = WittRing::new(FieldSpec::prime(5).unwrap());
        let ctx = HypersurfaceContext::parse("x0^4 + x1^4 + x2^4 + x3^4", &w, None).unwrap();
        assert!(ctx.fsquared_identity_check().unwrap());
    }

    #[test]
    fn pairing_kernel_rank() {
        let ctx = dwork_ctx(5, 3);
        assert_eq!(ctx.source_basis().len(), 10);
        let ker = ctx.multiplication_kernel().unwrap();
        assert_eq!(ker.len(), 9);
        let perp = ctx.pairing_perp().unwrap();
        assert!(ctx.contained_in(&ker, &perp) && ctx.contained_in(&perp, &ker));
    }

    #[test]
    fn rejects_imprimitive_lift() {
        let w = WittRing::new(FieldSpec::prime(5).unwrap());
        assert_eq!(
            HypersurfaceContext::parse("5*x0^3 + 10*x1^3", &w, None).unwrap_err(),
            ObstructionError::NotPrimitive
        );
    }

    #[test]
    fn canonical_dwork_lift() {
        // eta = 8 is the canonical parameter over lambda = 3 for p = 5
        let v = dwork_ctx(5, 8).is_canonical().unwrap();
        assert!(v.canonical);
        assert!(v.witness.is_none());
        let v = dwork_ctx(5, 3).is_canonical().unwrap();
        assert!(!v.canonical);
        let img = v.witness_image.unwrap();
        assert!(img.terms().iter().all(|(_, c)| v.witness.as_ref().unwrap().ring().is_divisible_by_p(c)));
    }
}
