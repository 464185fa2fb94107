use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    closed_form_equation, dwork_poly_at, dwork_smooth, hasse_invariant_nonzero, hd_mod,
    invariant_equation, pipeline_obstruction_in, DworkError, DworkParams, Result,
};
use crate::arith::{FieldElement, FieldSpec, Witt2, WittRing};
use crate::obstruction::{CanonicalVerdict, HypersurfaceContext};

pub const SCHEMA_VERSION: u32 = 1;

/// Which form of the lift equation to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftEquation {
    /// `(N+1) HDmarked(eta) + phi(eta) HD^{2p-1}(eta) = 0`, which agrees with
    /// the dual-module computation.
    Invariant,
    /// `(N+1) eta^p HD^{p-1}(eta) + phi(eta) HD^{2p-1}(eta) = 0`.
    ClosedForm,
}

fn evaluate(w: &WittRing, n_ambient: usize, eq: LiftEquation, eta: &Witt2) -> Result<Witt2> {
    match eq {
        LiftEquation::Invariant => invariant_equation(w, n_ambient, eta),
        LiftEquation::ClosedForm => closed_form_equation(w, n_ambient, eta),
    }
}

/// Solves `E(eta) = 0` over the lifts of `lambda`.
///
/// Writing `eta = [lambda] + p t` with `[lambda]` the minimal lift, the
/// equation becomes `E([lambda]) + p L(t) = 0` with `L` additive in `t` (it
/// mixes `t` and `t^p`), so `L` is assembled on an `F_p`-basis of `k` and the
/// system is solved over `F_p`.
pub fn solve_lift_equation(
    w: &WittRing,
    n_ambient: usize,
    lambda: &FieldElement,
    eq: LiftEquation,
) -> Result<Witt2> {
    let k = w.residue_field();
    let p = w.p();
    let dim = w.degree();
    let base = w.lift_minimal(lambda);
    let e0 = evaluate(w, n_ambient, eq, &base)?;
    let c0 = w.div_p(&e0).map_err(|_| DworkError::NoSolution)?;
    let mut columns = Vec::with_capacity(dim);
    for j in 0..dim {
        let eta = w.add(&base, &w.times_p(&k.basis_element(j)));
        let diff = w.sub(&evaluate(w, n_ambient, eq, &eta)?, &e0);
        let col = w.div_p(&diff).expect("the linear part is divisible by p");
        columns.push(k.coeffs(&col).to_vec());
    }
    let rhs: Vec<u64> = k.coeffs(&k.neg(&c0)).to_vec();
    let t = solve_fp(p, &columns, &rhs).ok_or(DworkError::UniquenessFailure)?;
    let t: Vec<i64> = t.into_iter().map(|c| c as i64).collect();
    Ok(w.add(&base, &w.times_p(&k.from_coeffs(&t)?)))
}

/// Solves `sum_j t_j columns[j] = rhs` over `F_p`; `None` when the square
/// matrix is singular.
fn solve_fp(p: u64, columns: &[Vec<u64>], rhs: &[u64]) -> Option<Vec<u64>> {
    let n = rhs.len();
    let mut a: Vec<Vec<u64>> = (0..n)
        .map(|r| {
            let mut row: Vec<u64> = columns.iter().map(|c| c[r]).collect();
            row.push(rhs[r]);
            row
        })
        .collect();
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    for c in 0..n {
        let r = (c..n).find(|&r| a[r][c] != 0)?;
        a.swap(c, r);
        let inv = crate::arith::inv_mod_prime(a[c][c], p)?;
        for x in a[c].iter_mut() {
            *x = mul(*x, inv);
        }
        for r in 0..n {
            let f = a[r][c];
            if r != c && f != 0 {
                for j in 0..=n {
                    let s = mul(f, a[c][j]);
                    a[r][j] = (a[r][j] + p - s) % p;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n]).collect())
}

fn check_preconditions(params: &DworkParams) -> Result<()> {
    params.check_degree()?;
    if !dwork_smooth(params) {
        return Err(DworkError::NotSmooth);
    }
    if !hasse_invariant_nonzero(params) {
        return Err(DworkError::NotOrdinary);
    }
    Ok(())
}

/// The canonical parameter over `lambda`, found by solving the invariant
/// form of the lift equation and checking that it vanishes there.
pub fn canonical_eta(spec: Arc<FieldSpec>, n_ambient: usize, lambda: &FieldElement) -> Result<Witt2> {
    let params = DworkParams::new(spec, n_ambient, *lambda)?;
    check_preconditions(&params)?;
    let w = params.witt();
    let eta = solve_lift_equation(&w, n_ambient, lambda, LiftEquation::Invariant)?;
    if !w.is_zero(&invariant_equation(&w, n_ambient, &eta)?) {
        return Err(DworkError::CrossCheck("solved eta does not satisfy the equation".into()));
    }
    Ok(eta)
}

/// Runs the general canonicity test on `eta`, after checking that the
/// invariant form agrees with the dual-module coefficient.
pub fn verify_canonical(params: &DworkParams) -> Result<CanonicalVerdict> {
    let w = params.witt();
    let eta = params.eta().ok_or(DworkError::MissingEta)?;
    let ctx = HypersurfaceContext::new(dwork_poly_at(&w, params.n_ambient(), eta)?)?;
    let pipeline = pipeline_obstruction_in(&ctx, params)?;
    let exact = w.neg(&invariant_equation(&w, params.n_ambient(), eta)?);
    if pipeline != exact {
        return Err(DworkError::CrossCheck(format!(
            "dual-module coefficient {} differs from the closed form {}",
            w.format(&pipeline),
            w.format(&exact)
        )));
    }
    Ok(ctx.is_canonical()?)
}

/// Every lift of `lambda` that passes the general canonicity test.
pub fn canonical_lifts_by_scan(
    spec: Arc<FieldSpec>,
    n_ambient: usize,
    lambda: &FieldElement,
) -> Result<Vec<Witt2>> {
    let w = WittRing::new(spec.clone());
    let lifts: Vec<Witt2> = w.lifts(lambda).collect();
    let verdicts: Vec<Result<bool>> = lifts
        .par_iter()
        .map(|eta| {
            let ctx = HypersurfaceContext::new(dwork_poly_at(&w, n_ambient, eta)?)?;
            Ok(ctx.is_canonical()?.canonical)
        })
        .collect();
    let mut found = Vec::new();
    for (eta, v) in lifts.into_iter().zip(verdicts) {
        if v? {
            found.push(eta);
        }
    }
    Ok(found)
}

/// `HD^{p-1}(eta) / HD^{2p-1}(eta)`.
pub fn ratio_at(w: &WittRing, n_ambient: usize, eta: &Witt2) -> Result<Witt2> {
    let h1 = hd_mod(w, n_ambient as u32, 1, eta)?;
    let h2 = hd_mod(w, n_ambient as u32, 2, eta)?;
    if !w.is_unit(&h1) || !w.is_unit(&h2) {
        return Err(DworkError::NotOrdinary);
    }
    Ok(w.mul(&h1, &w.inv(&h2)?))
}

/// The ratio at the minimal lift of `lambda`; rejects non-ordinary `lambda`.
pub fn ratio_invariant(spec: Arc<FieldSpec>, n_ambient: usize, lambda: &FieldElement) -> Result<Witt2> {
    let params = DworkParams::new(spec, n_ambient, *lambda)?;
    params.check_degree()?;
    if !hasse_invariant_nonzero(&params) {
        return Err(DworkError::NotOrdinary);
    }
    let w = params.witt();
    ratio_at(&w, n_ambient, &w.lift_minimal(lambda))
}

/// One solved (or rejected) parameter, as emitted by the command line tool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub schema_version: u32,
    pub p: u64,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub lambda: String,
    pub smooth: bool,
    pub ordinary: bool,
    pub eta_witt: Option<String>,
    pub eta_zp2: Option<u64>,
    pub cross_checked: bool,
    pub inconclusive_n2: bool,
    pub timing_ms: f64,
}

pub const LIFT_CSV_COLUMNS: [&str; 12] = [
    "schema_version",
    "p",
    "n",
    "N",
    "lambda",
    "smooth",
    "ordinary",
    "eta_witt",
    "eta_zp2",
    "cross_checked",
    "inconclusive_n2",
    "timing_ms",
];

/// Classifies `lambda` and, when it is smooth and ordinary, solves for the
/// canonical parameter. With `verify`, the answer is also run through the
/// general canonicity test; a negative verdict there is a cross-check error.
pub fn lift_report(
    spec: Arc<FieldSpec>,
    n_ambient: usize,
    lambda: &FieldElement,
    verify: bool,
) -> Result<LiftReport> {
    let start = Instant::now();
    let params = DworkParams::new(spec.clone(), n_ambient, *lambda)?;
    let w = params.witt();
    let smooth = dwork_smooth(&params);
    let ordinary = smooth && hasse_invariant_nonzero(&params);
    let mut report = LiftReport {
        schema_version: SCHEMA_VERSION,
        p: spec.p(),
        n: spec.degree(),
        big_n: n_ambient,
        lambda: params.field().format(lambda),
        smooth,
        ordinary,
        eta_witt: None,
        eta_zp2: None,
        cross_checked: false,
        inconclusive_n2: false,
        timing_ms: 0.0,
    };
    if ordinary {
        let eta = canonical_eta(spec.clone(), n_ambient, lambda)?;
        if verify {
            let verdict = verify_canonical(&DworkParams::with_eta(spec.clone(), n_ambient, eta)?)?;
            report.inconclusive_n2 = verdict.inconclusive_n2;
            if !verdict.canonical {
                return Err(DworkError::CrossCheck(format!(
                    "solved eta {} fails the canonicity test",
                    w.format(&eta)
                )));
            }
            report.cross_checked = true;
        }
        report.eta_witt = Some(w.format(&eta));
        report.eta_zp2 = w.prime_iso(&eta).ok().filter(|_| spec.degree() == 1);
    }
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ResidueField;

    fn setup(p: u64) -> (Arc<FieldSpec>, ResidueField, WittRing) {
        let spec = FieldSpec::prime(p).unwrap();
        (spec.clone(), ResidueField::new(spec.clone()), WittRing::new(spec))
    }

    #[test]
    fn solve_fp_small() {
        // [[1,2],[3,4]] t = [5,6] over F_7
        let t = solve_fp(7, &[vec![1, 3], vec![2, 4]], &[5, 6]).unwrap();
        assert_eq!((t[0] + 2 * t[1]) % 7, 5);
        assert_eq!((3 * t[0] + 4 * t[1]) % 7, 6);
        assert!(solve_fp(7, &[vec![1, 2], vec![2, 4]], &[1, 1]).is_none());
    }

    #[test]
    fn canonical_parameters_p5() {
        let (spec, k, w) = setup(5);
        let eta = canonical_eta(spec.clone(), 2, &k.from_int(3)).unwrap();
        assert_eq!(w.prime_iso(&eta).unwrap(), 8);
        let eta = canonical_eta(spec.clone(), 2, &k.from_int(4)).unwrap();
        assert_eq!(w.prime_iso(&eta).unwrap(), 4);
        assert_eq!(canonical_eta(spec.clone(), 2, &k.from_int(2)), Err(DworkError::NotOrdinary));
        assert_eq!(canonical_eta(spec, 2, &k.from_int(1)), Err(DworkError::NotSmooth));
    }

    #[test]
    fn closed_form_solution_p5() {
        let (_, k, w) = setup(5);
        let eta = solve_lift_equation(&w, 2, &k.from_int(3), LiftEquation::ClosedForm).unwrap();
        assert_eq!(w.prime_iso(&eta).unwrap(), 3);
    }

    #[test]
    fn report_for_lambda_three() {
        let (spec, k, _) = setup(5);
        let r = lift_report(spec.clone(), 2, &k.from_int(3), true).unwrap();
        assert!(r.smooth && r.ordinary && r.cross_checked);
        assert_eq!(r.eta_zp2, Some(8));
        let r = lift_report(spec, 2, &k.from_int(2), true).unwrap();
        assert!(r.smooth && !r.ordinary);
        assert_eq!(r.eta_witt, None);
    }

    #[test]
    fn ratio_example() {
        let (spec, k, w) = setup(5);
        let r = ratio_invariant(spec.clone(), 2, &k.from_int(3)).unwrap();
        for eta in w.lifts(&k.from_int(3)) {
            assert_eq!(ratio_at(&w, 2, &eta).unwrap(), r);
        }
        assert_eq!(ratio_invariant(spec, 2, &k.from_int(2)), Err(DworkError::NotOrdinary));
    }
}
