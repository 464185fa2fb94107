//! The Dwork family `f = lambda * sum x_i^(N+1) - (N+1) * prod x_i` in `P^N`.
//!
//! For this family the obstruction space is spanned by a single invariant
//! class [`g_vee`], and the obstruction becomes one equation in the lifted
//! parameter `eta`. Two closed forms of that equation are provided:
//!
//! * [`closed_form_obstruction`] is `-(N+1) eta^p HD^{p-1}(eta) - phi(eta) HD^{2p-1}(eta)`.
//! * [`invariant_obstruction`] replaces `eta^p HD^{p-1}(eta)` by the marked
//!   Hasse-Dwork value `hd_marked(N+1, p-1, p)(eta)`. The two agree mod `p`
//!   but not mod `p^2`: the marked counts carry an extra factor
//!   `C(a+p, p)`, which is 1 mod `p` only.
//!
//! [`pipeline_obstruction`] computes the same coefficient from scratch through
//! the dual module and is the reference for both.

mod hd;
mod solver;

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::{ArithError, FieldElement, FieldSpec, ResidueField, Witt2, WittRing};
use crate::dualmod::DualElement;
use crate::obstruction::{HypersurfaceContext, ObstructionError};
use crate::poly::{HomogPoly, PolyError, MAX_VARS};

pub use hd::{
    format_terms, harmonic_ph, hd_def, hd_marked, hd_mod, hd_mod_coeffs, katz_coeffs,
    multinomial_count, HDPoly,
};
pub use solver::{
    canonical_eta, canonical_lifts_by_scan, lift_report, ratio_at, ratio_invariant,
    solve_lift_equation, verify_canonical, LiftEquation, LiftReport, LIFT_CSV_COLUMNS,
    SCHEMA_VERSION,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DworkError {
    #[error("N must be between 2 and {max}, got {0}", max = MAX_VARS - 1)]
    BadDimension(usize),
    #[error("p = {p} divides the degree N+1 = {degree}")]
    PDividesDegree { p: u64, degree: u64 },
    #[error("the Dwork hypersurface is singular at this parameter")]
    NotSmooth,
    #[error("the Dwork hypersurface is not ordinary at this parameter")]
    NotOrdinary,
    #[error("a lifted parameter eta is required")]
    MissingEta,
    #[error("harmonic index {k} exceeds 2p-1 for p = {p}")]
    HarmonicRange { k: u64, p: u64 },
    #[error("harmonic multiplier m must be 1 or 2, got {0}")]
    HarmonicMultiplier(u32),
    #[error("division by {0}, which is not a unit mod p")]
    NonUnitDivisor(u64),
    #[error("the lift equation has a singular linear part")]
    UniquenessFailure,
    #[error("the lift equation has no solution over this parameter")]
    NoSolution,
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
}

pub type Result<T> = std::result::Result<T, DworkError>;

/// A member of the Dwork family, with an optional lifted parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct DworkParams {
    spec: Arc<FieldSpec>,
    n_ambient: usize,
    lambda: FieldElement,
    eta: Option<Witt2>,
}

impl DworkParams {
    pub fn new(spec: Arc<FieldSpec>, n_ambient: usize, lambda: FieldElement) -> Result<Self> {
        if !(2..MAX_VARS).contains(&n_ambient) {
            return Err(DworkError::BadDimension(n_ambient));
        }
        Ok(DworkParams {
            spec,
            n_ambient,
            lambda,
            eta: None,
        })
    }

    /// Parameters with lifted `eta`; `lambda` is its reduction.
    pub fn with_eta(spec: Arc<FieldSpec>, n_ambient: usize, eta: Witt2) -> Result<Self> {
        let w = WittRing::new(spec.clone());
        let mut params = Self::new(spec, n_ambient, w.reduce(&eta))?;
        params.eta = Some(eta);
        Ok(params)
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn field(&self) -> ResidueField {
        ResidueField::new(self.spec.clone())
    }

    pub fn witt(&self) -> WittRing {
        WittRing::new(self.spec.clone())
    }

    /// `N`.
    pub fn n_ambient(&self) -> usize {
        self.n_ambient
    }

    /// `N + 1`, the degree and the number of variables.
    pub fn degree(&self) -> u32 {
        self.n_ambient as u32 + 1
    }

    pub fn lambda(&self) -> &FieldElement {
        &self.lambda
    }

    pub fn eta(&self) -> Option<&Witt2> {
        self.eta.as_ref()
    }

    fn require_eta(&self) -> Result<Witt2> {
        self.eta.ok_or(DworkError::MissingEta)
    }

    fn check_degree(&self) -> Result<()> {
        let m = self.degree() as u64;
        if m % self.spec.p() == 0 {
            return Err(DworkError::PDividesDegree {
                p: self.spec.p(),
                degree: m,
            });
        }
        Ok(())
    }
}

fn dwork_terms<E: Copy>(nvars: usize, scale: E, neg_m: E) -> Vec<(Vec<u32>, E)> {
    let m = nvars as u32;
    let mut terms: Vec<(Vec<u32>, E)> = (0..nvars)
        .map(|i| {
            let mut e = vec![0; nvars];
            e[i] = m;
            (e, scale)
        })
        .collect();
    terms.push((vec![1; nvars], neg_m));
    terms
}

/// `lambda * sum x_i^(N+1) - (N+1) prod x_i` over `k`.
pub fn dwork_poly_k(params: &DworkParams) -> Result<HomogPoly<ResidueField>> {
    let k = params.field();
    let nvars = params.n_ambient + 1;
    let neg_m = k.from_int(-(nvars as i64));
    Ok(HomogPoly::from_terms(&k, nvars, dwork_terms(nvars, params.lambda, neg_m))?)
}

/// `eta * sum x_i^(N+1) - (N+1) prod x_i` over `W_2(k)`.
pub fn dwork_poly(params: &DworkParams) -> Result<HomogPoly<WittRing>> {
    dwork_poly_at(&params.witt(), params.n_ambient, &params.require_eta()?)
}

pub fn dwork_poly_at(w: &WittRing, n_ambient: usize, eta: &Witt2) -> Result<HomogPoly<WittRing>> {
    let nvars = n_ambient + 1;
    let neg_m = w.from_int(-(nvars as i64));
    Ok(HomogPoly::from_terms(w, nvars, dwork_terms(nvars, *eta, neg_m))?)
}

/// Smooth iff `p` does not divide `N+1`, `lambda != 0` and `lambda^(N+1) != 1`.
pub fn dwork_smooth(params: &DworkParams) -> bool {
    let k = params.field();
    let m = params.degree() as u64;
    m % params.spec.p() != 0
        && !k.is_zero(&params.lambda)
        && k.pow(&params.lambda, m) != k.one()
}

/// Ordinary iff `HD_{N+1}^{p-1}(lambda) != 0` in `k`. Requires smoothness.
pub fn dwork_ordinary(params: &DworkParams) -> Result<bool> {
    if !dwork_smooth(params) {
        return Err(DworkError::NotSmooth);
    }
    Ok(hasse_invariant_nonzero(params))
}

fn hasse_invariant_nonzero(params: &DworkParams) -> bool {
    let k = params.field();
    let p = params.spec.p() as u32;
    let v = hd_def(params.degree(), p - 1).eval_field(&k, &params.lambda);
    !k.is_zero(&v)
}

/// `x^e` with all of `x_i` raised to `-(N+1)` at one position.
fn gvee_terms(nvars: usize, eta: Witt2, one: Witt2) -> Vec<(Vec<i64>, Witt2)> {
    let mut terms: Vec<(Vec<i64>, Witt2)> = (0..nvars)
        .map(|i| {
            let mut e = vec![-1i64; nvars];
            e[i] = -(nvars as i64) - 1;
            (e, one)
        })
        .collect();
    terms.push((vec![-2; nvars], eta));
    terms
}

/// The invariant class `(sum x_i^-(N+1) + eta prod x_i^-1) prod x_i^-1` in
/// `S^v_{-2(N+1)}`.
pub fn g_vee(params: &DworkParams) -> Result<DualElement<WittRing>> {
    let w = params.witt();
    let eta = params.require_eta()?;
    let nvars = params.n_ambient + 1;
    Ok(DualElement::from_terms(&w, nvars, gvee_terms(nvars, eta, w.one()))?)
}

/// `-(N+1) eta^p HD^{p-1}(eta) - phi(eta) HD^{2p-1}(eta)`.
pub fn closed_form_obstruction(params: &DworkParams) -> Result<Witt2> {
    params.check_degree()?;
    let w = params.witt();
    let eta = params.require_eta()?;
    let n = params.n_ambient as u32;
    let m = w.from_int(params.degree() as i64);
    let h1 = hd_mod(&w, n, 1, &eta)?;
    let h2 = hd_mod(&w, n, 2, &eta)?;
    let a = w.mul(&m, &w.mul(&w.pow(&eta, w.p()), &h1));
    let b = w.mul(&w.frobenius(&eta), &h2);
    Ok(w.neg(&w.add(&a, &b)))
}

/// `-(N+1) HDmarked(eta) - phi(eta) HD^{2p-1}(eta)`, where `HDmarked` is
/// [`hd_marked`]`(N+1, p-1, p)`.
pub fn invariant_obstruction(params: &DworkParams) -> Result<Witt2> {
    params.check_degree()?;
    let w = params.witt();
    let eta = params.require_eta()?;
    Ok(w.neg(&invariant_equation(&w, params.n_ambient, &eta)?))
}

/// `(N+1) HDmarked(eta) + phi(eta) HD^{2p-1}(eta)`.
pub(crate) fn invariant_equation(w: &WittRing, n_ambient: usize, eta: &Witt2) -> Result<Witt2> {
    let p = w.p() as u32;
    let mm = n_ambient as u32 + 1;
    let marked = hd_marked(mm, p - 1, p).eval_witt(w, eta);
    let h2 = hd_mod(w, n_ambient as u32, 2, eta)?;
    let a = w.mul(&w.from_int(mm as i64), &marked);
    Ok(w.add(&a, &w.mul(&w.frobenius(eta), &h2)))
}

/// `(N+1) eta^p HD^{p-1}(eta) + phi(eta) HD^{2p-1}(eta)`.
pub(crate) fn closed_form_equation(w: &WittRing, n_ambient: usize, eta: &Witt2) -> Result<Witt2> {
    let n = n_ambient as u32;
    let h1 = hd_mod(w, n, 1, eta)?;
    let h2 = hd_mod(w, n, 2, eta)?;
    let a = w.mul(&w.from_int(n as i64 + 1), &w.mul(&w.pow(eta, w.p()), &h1));
    Ok(w.add(&a, &w.mul(&w.frobenius(eta), &h2)))
}

/// The coefficient of `x_0^-1 ... x_N^-1` in the Frobenius composite applied
/// to [`g_vee`], computed through the dual module.
pub fn pipeline_obstruction(params: &DworkParams) -> Result<Witt2> {
    let ctx = HypersurfaceContext::new(dwork_poly(params)?)?;
    pipeline_obstruction_in(&ctx, params)
}

pub fn pipeline_obstruction_in(ctx: &HypersurfaceContext, params: &DworkParams) -> Result<Witt2> {
    let img = ctx.frobenius_composite(&g_vee(params)?)?;
    Ok(img.coeff(&vec![-1; params.n_ambient + 1]))
}

/// The coefficient of `(x_0 ... x_N)^P` in `f^P`, by expanding the power.
pub fn hd_coeff_oracle(params: &DworkParams, power: u32) -> Result<Witt2> {
    let f = dwork_poly(params)?;
    let nvars = params.n_ambient + 1;
    let fp = f.pow_bounded(power, power)?;
    Ok(fp.coeff_of(&vec![power; nvars]))
}

/// The coefficient of `x_0^(P+sM) (x_1 ... x_N)^P` in `f^(P+s)`, by expanding
/// the power.
pub fn hd_marked_oracle(params: &DworkParams, power: u32, s: u32) -> Result<Witt2> {
    let f = dwork_poly(params)?;
    let nvars = params.n_ambient + 1;
    let top = power + s * params.degree();
    let fp = f.pow_bounded(power + s, top)?;
    let mut e = vec![power; nvars];
    e[0] = top;
    Ok(fp.coeff_of(&e))
}

/// Whether `poly` is unchanged by every permutation of its variables; the
/// adjacent transpositions generate the symmetric group, so they suffice.
pub fn is_permutation_invariant<R: crate::arith::CoeffRing>(poly: &HomogPoly<R>) -> Result<bool> {
    let n = poly.num_vars();
    for i in 0..n.saturating_sub(1) {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, i + 1);
        if poly.permute_vars(&perm)? != *poly {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A primitive `m`-th root of unity in `k`, if there is one.
pub fn primitive_root_of_unity(k: &ResidueField, m: u64) -> Option<FieldElement> {
    let q = k.spec().order()?;
    if (q - 1) % m != 0 || q > 1 << 20 {
        return None;
    }
    k.elements().find(|z| {
        !k.is_zero(z)
            && k.pow(z, m) == k.one()
            && (1..m).all(|d| m % d != 0 || k.pow(z, d) != k.one())
    })
}

/// Checks the symmetries of the Dwork polynomial: invariance under all
/// permutations, and under the scalings `x_i -> zeta^(e_i) x_i` with
/// `sum e_i = 0 mod N+1` when `k` has a primitive `(N+1)`-th root `zeta`.
/// Also checks that `(N+1)! (N+1)^(N+1)` is prime to `p` when `p > N+1`.
pub fn symmetry_check(params: &DworkParams) -> Result<bool> {
    let f = dwork_poly_k(params)?;
    if !is_permutation_invariant(&f)? {
        return Ok(false);
    }
    let k = params.field();
    let nvars = params.n_ambient + 1;
    let m = nvars as u64;
    if let Some(zeta) = primitive_root_of_unity(&k, m) {
        let zinv = k.inv(&zeta)?;
        // generators (zeta, zeta^-1) at adjacent positions, and the diagonal
        let mut scalings: Vec<Vec<FieldElement>> = (0..nvars - 1)
            .map(|i| {
                let mut s = vec![k.one(); nvars];
                s[i] = zeta;
                s[i + 1] = zinv;
                s
            })
            .collect();
        scalings.push(vec![zeta; nvars]);
        for s in scalings {
            if f.scale_vars(&s)? != f {
                return Ok(false);
            }
        }
    }
    let p = params.spec.p();
    if p > m {
        let mut order = BigUint::from(m).pow(m as u32);
        for i in 2..=m {
            order *= i;
        }
        if (order % p).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
