use std::sync::Arc;

use num_bigint::BigInt;

use canlift::dwork::{
    canonical_eta, canonical_lifts_by_scan, closed_form_obstruction, dwork_poly, g_vee,
    harmonic_ph, hd_def, hd_marked, hd_marked_oracle, hd_mod_coeffs, invariant_obstruction,
    katz_coeffs, lift_report, pipeline_obstruction, ratio_invariant, solve_lift_equation,
    symmetry_check, DworkError, DworkParams, LiftEquation,
};
use canlift::obstruction::HypersurfaceContext;
use canlift::{FieldSpec, ResidueField, WittRing};

fn prime(p: u64) -> (Arc<FieldSpec>, ResidueField, WittRing) {
    let spec = FieldSpec::prime(p).unwrap();
    (spec.clone(), ResidueField::new(spec.clone()), WittRing::new(spec))
}

fn lifted(p: u64, n: usize, eta: i64) -> DworkParams {
    let (spec, _, w) = prime(p);
    DworkParams::with_eta(spec, n, w.from_int(eta)).unwrap()
}

#[test]
fn hd_def_examples() {
    let big = |v: i64| BigInt::from(v);
    let h = hd_def(3, 2);
    assert_eq!(h.terms().map(|(e, c)| (e, c.clone())).collect::<Vec<_>>(), vec![(0, big(9))]);
    let h = hd_def(3, 4);
    assert_eq!((h.coeff(0), h.coeff(3)), (big(81), big(-72)));
    let h = hd_def(3, 9);
    let coeffs: Vec<BigInt> = [0, 3, 6, 9].iter().map(|&e| h.coeff(e)).collect();
    assert_eq!(coeffs, vec![big(-19683), big(367416), big(-204120), big(1680)]);
    assert_eq!(h.format_exact(), "-19683 + 367416*X^3 - 204120*X^6 + 1680*X^9");
    assert_eq!(h.format_mod(25), "17 + 16*X^3 + 5*X^6 + 5*X^9 (mod 25)");
}

#[test]
fn constant_coefficient_is_a_power_of_minus_m() {
    for m in 2..6u32 {
        for power in 0..12u32 {
            assert_eq!(hd_def(m, power).coeff(0), BigInt::from(-(m as i64)).pow(power));
        }
    }
}

#[test]
fn harmonic_examples() {
    assert_eq!(harmonic_ph(0, 5).unwrap(), 0);
    assert_eq!(harmonic_ph(3, 5).unwrap(), 5);
    assert_eq!(harmonic_ph(5, 5).unwrap(), 1);
    assert_eq!(harmonic_ph(10, 5), Err(DworkError::HarmonicRange { k: 10, p: 5 }));
}

#[test]
fn hd_mod_rejects_bad_input() {
    assert_eq!(hd_mod_coeffs(2, 3, 1), Err(DworkError::PDividesDegree { p: 3, degree: 3 }));
    assert_eq!(hd_mod_coeffs(2, 5, 3), Err(DworkError::HarmonicMultiplier(3)));
}

#[test]
fn katz_formula_is_hd_mod_reduced() {
    for p in [5u64, 7, 11, 13] {
        for n in 2u32..=6 {
            if (n as u64 + 1) % p == 0 {
                continue;
            }
            let reduced: Vec<(u32, u64)> = hd_mod_coeffs(n, p, 1)
                .unwrap()
                .into_iter()
                .map(|(e, c)| (e, c % p))
                .collect();
            assert_eq!(katz_coeffs(n, p).unwrap(), reduced, "p={p} N={n}");
        }
    }
}

#[test]
fn binomial_congruence_holds_below_the_second_multiple() {
    // C(mp-1, j) = (-1)^j (1 - m pH_j) mod p^2 holds for m = 1 and for
    // m = 2 with j <= p; beyond that the congruence needs H_j mod p^2 rather
    // than mod p.
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        let q = p * p;
        for m in 1u64..=2 {
            let top = if m == 1 { p - 1 } else { p };
            let mut binom = 1u128;
            for j in 0..=top {
                if j > 0 {
                    binom = binom * (m * p - j) as u128 / j as u128;
                }
                let lhs = (binom % q as u128) as u64;
                let h = harmonic_ph(j, p).unwrap();
                let base = (1 + q * m - (m * h) % q) % q;
                let rhs = if j % 2 == 0 { base } else { (q - base) % q };
                assert_eq!(lhs, rhs, "p={p} m={m} j={j}");
            }
        }
    }
}

#[test]
fn marked_counts_match_expansion() {
    let (_, _, w) = prime(5);
    for (n, eta) in [(2usize, 3i64), (2, 8), (3, 2)] {
        let params = lifted(5, n, eta);
        let m = n as u32 + 1;
        for s in 0..3u32 {
            let expect = hd_marked(m, 4, s).eval_witt(&w, &w.from_int(eta));
            assert_eq!(hd_marked_oracle(&params, 4, s).unwrap(), expect);
        }
    }
}

#[test]
fn worked_closed_form_values() {
    // the stated closed form at eta = 3 and eta = 8
    let (_, _, w) = prime(5);
    let v = |eta| w.prime_iso(&closed_form_obstruction(&lifted(5, 2, eta)).unwrap()).unwrap();
    assert_eq!(v(3), 0);
    assert_eq!(v(8), 5);
    // the dual-module computation at the same points
    let v = |eta| w.prime_iso(&pipeline_obstruction(&lifted(5, 2, eta)).unwrap()).unwrap();
    assert_eq!(v(3), 20);
    assert_eq!(v(8), 0);
}

#[test]
fn invariant_form_equals_pipeline_on_the_grid() {
    for p in [5u64, 7] {
        let (spec, _, w) = prime(p);
        for n in 2usize..=4 {
            if (n as u64 + 1) % p == 0 {
                continue;
            }
            for r in (0..p * p).step_by(3) {
                let params = DworkParams::with_eta(spec.clone(), n, w.from_residue(r).unwrap()).unwrap();
                assert_eq!(
                    invariant_obstruction(&params).unwrap(),
                    pipeline_obstruction(&params).unwrap(),
                    "p={p} N={n} eta={r}"
                );
            }
        }
    }
}

#[test]
fn canonical_parameters_match_the_scan() {
    let expected: [(u64, usize, i64, u64); 9] = [
        (5, 2, 3, 8),
        (5, 2, 4, 4),
        (7, 2, 3, 24),
        (7, 2, 5, 40),
        (7, 2, 6, 34),
        (7, 3, 2, 16),
        (7, 3, 5, 33),
        (7, 4, 3, 10),
        (7, 4, 6, 6),
    ];
    for (p, n, lambda, eta) in expected {
        let (spec, k, w) = prime(p);
        let lam = k.from_int(lambda);
        let solved = canonical_eta(spec.clone(), n, &lam).unwrap();
        assert_eq!(w.prime_iso(&solved).unwrap(), eta, "p={p} N={n} lambda={lambda}");
        assert_eq!(canonical_lifts_by_scan(spec, n, &lam).unwrap(), vec![solved]);
    }
}

#[test]
fn closed_form_root_is_not_canonical() {
    let (_, k, w) = prime(5);
    let eta = solve_lift_equation(&w, 2, &k.from_int(3), LiftEquation::ClosedForm).unwrap();
    let ctx = HypersurfaceContext::new(dwork_poly(&lifted(5, 2, w.prime_iso(&eta).unwrap() as i64)).unwrap()).unwrap();
    assert!(!ctx.is_canonical().unwrap().canonical);
}

#[test]
fn solver_preconditions() {
    let (spec, k, _) = prime(5);
    assert_eq!(canonical_eta(spec.clone(), 2, &k.from_int(2)), Err(DworkError::NotOrdinary));
    assert_eq!(canonical_eta(spec.clone(), 3, &k.from_int(0)), Err(DworkError::NotSmooth));
    assert_eq!(
        canonical_eta(spec.clone(), 4, &k.from_int(1)),
        Err(DworkError::PDividesDegree { p: 5, degree: 5 })
    );
    assert_eq!(DworkParams::new(spec, 1, k.one()), Err(DworkError::BadDimension(1)));
}

#[test]
fn solver_over_an_extension_field() {
    let spec = FieldSpec::new(5, 2, None).unwrap();
    let k = ResidueField::new(spec.clone());
    let w = WittRing::new(spec.clone());
    let mut solved = 0;
    for lambda in k.elements().skip(2).step_by(5).take(4) {
        match canonical_eta(spec.clone(), 2, &lambda) {
            Ok(eta) => {
                assert_eq!(w.reduce(&eta), lambda);
                let params = DworkParams::with_eta(spec.clone(), 2, eta).unwrap();
                assert!(w.is_zero(&invariant_obstruction(&params).unwrap()));
                assert!(w.is_zero(&pipeline_obstruction(&params).unwrap()));
                solved += 1;
            }
            Err(DworkError::NotSmooth | DworkError::NotOrdinary) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(solved > 0);
}

#[test]
fn ratio_example() {
    let (spec, k, w) = prime(5);
    let r = ratio_invariant(spec.clone(), 2, &k.from_int(3)).unwrap();
    assert_eq!(w.prime_iso(&r).unwrap(), 18);
    assert_eq!(ratio_invariant(spec, 2, &k.from_int(2)), Err(DworkError::NotOrdinary));
}

#[test]
fn gvee_is_symmetric_and_in_the_kernel() {
    let params = lifted(7, 3, 16);
    let g = g_vee(&params).unwrap();
    for perm in [[1, 0, 2, 3], [0, 2, 3, 1], [3, 2, 1, 0]] {
        assert_eq!(g.permute_vars(&perm).unwrap(), g);
    }
    let ctx = HypersurfaceContext::new(dwork_poly(&params).unwrap()).unwrap();
    assert!(ctx.contained_in(&[g], &ctx.obstruction_kernel().unwrap()));
}

#[test]
fn symmetries_over_various_fields() {
    for (p, n, lambda) in [(5u64, 2usize, 3i64), (7, 2, 3), (7, 3, 2), (13, 3, 5)] {
        let (spec, k, _) = prime(p);
        let params = DworkParams::new(spec, n, k.from_int(lambda)).unwrap();
        assert!(symmetry_check(&params).unwrap(), "p={p} N={n}");
    }
}

#[test]
fn report_for_a_table_row() {
    let (spec, k, _) = prime(5);
    let rows: Vec<_> = (0..5)
        .map(|l| lift_report(spec.clone(), 2, &k.from_int(l), true).unwrap())
        .collect();
    let flags: Vec<(bool, bool)> = rows.iter().map(|r| (r.smooth, r.ordinary)).collect();
    assert_eq!(flags, vec![(false, false), (false, false), (true, false), (true, true), (true, true)]);
    assert_eq!(rows[3].eta_witt.as_deref(), Some("(3|3)"));
    assert_eq!(rows[4].eta_zp2, Some(4));
}
