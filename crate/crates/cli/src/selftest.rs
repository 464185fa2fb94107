use std::sync::Arc;

use serde::Serialize;

use canlift::dwork::{
    canonical_eta, canonical_lifts_by_scan, dwork_ordinary, dwork_poly_at, dwork_smooth,
    harmonic_ph, hd_coeff_oracle, hd_def, hd_mod, hd_mod_coeffs, invariant_obstruction,
    katz_coeffs, pipeline_obstruction, ratio_at, DworkParams,
};
use canlift::obstruction::HypersurfaceContext;
use canlift::poly::HomogPoly;
use canlift::{FieldSpec, ResidueField, WittRing};

#[derive(Clone, Debug, Serialize)]
pub struct SelfTestResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<String, String>;

pub fn run_all() -> Vec<SelfTestResult> {
    let checks: [(&'static str, Check); 9] = [
        ("witt-iso", witt_iso),
        ("hd-three-way", hd_three_way),
        ("katz-reduction", katz_reduction),
        ("harmonic", harmonic),
        ("invariant-vs-pipeline", invariant_vs_pipeline),
        ("solver-vs-scan", solver_vs_scan),
        ("ratio", ratio),
        ("fermat", fermat),
        ("structural", structural),
    ];
    checks
        .iter()
        .map(|(name, check)| {
            let (passed, detail) = match check() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            SelfTestResult { name, passed, detail }
        })
        .collect()
}

fn prime(p: u64) -> (Arc<FieldSpec>, ResidueField, WittRing) {
    let spec = FieldSpec::prime(p).expect("small odd prime");
    (spec.clone(), ResidueField::new(spec.clone()), WittRing::new(spec))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn witt_iso() -> Result<String, String> {
    let (_, _, w) = prime(5);
    for r in 0..25 {
        let x = w.from_residue(r).map_err(|e| e.to_string())?;
        for s in 0..25 {
            let y = w.from_residue(s).map_err(|e| e.to_string())?;
            let sum = w.prime_iso(&w.add(&x, &y)).map_err(|e| e.to_string())?;
            let prod = w.prime_iso(&w.mul(&x, &y)).map_err(|e| e.to_string())?;
            ensure(sum == (r + s) % 25 && prod == r * s % 25, || format!("fails at {r}, {s}"))?;
        }
    }
    Ok("W_2(F_5) = Z/25 on all 625 pairs".into())
}

fn hd_three_way() -> Result<String, String> {
    let mut cases = 0;
    for p in [5u64, 7] {
        let (spec, k, w) = prime(p);
        for n in 2usize..=3 {
            for m in 1..=2u32 {
                let power = m * p as u32 - 1;
                let def = hd_def(n as u32 + 1, power);
                for l in 0..p as i64 {
                    let eta = w.lift_minimal(&k.from_int(l));
                    let a = def.eval_witt(&w, &eta);
                    let b = hd_mod(&w, n as u32, m, &eta).map_err(|e| e.to_string())?;
                    let params = DworkParams::with_eta(spec.clone(), n, eta).map_err(|e| e.to_string())?;
                    let c = hd_coeff_oracle(&params, power).map_err(|e| e.to_string())?;
                    ensure(a == b && b == c, || format!("p={p} N={n} m={m} lambda={l}"))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} evaluations agree"))
}

fn katz_reduction() -> Result<String, String> {
    for p in [5u64, 7, 11] {
        for n in 2u32..=4 {
            if (n as u64 + 1) % p == 0 {
                continue;
            }
            let full = hd_mod_coeffs(n, p, 1).map_err(|e| e.to_string())?;
            let reduced: Vec<(u32, u64)> = full.into_iter().map(|(e, c)| (e, c % p)).collect();
            ensure(katz_coeffs(n, p).map_err(|e| e.to_string())? == reduced, || {
                format!("p={p} N={n}")
            })?;
        }
    }
    Ok("Katz coefficients match mod p".into())
}

fn harmonic() -> Result<String, String> {
    let values: Vec<u64> = [0, 3, 5]
        .iter()
        .map(|&k| harmonic_ph(k, 5))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(values == [0, 5, 1], || format!("pH_0, pH_3, pH_5 mod 25 = {values:?}"))?;
    Ok("pH_0, pH_3, pH_5 = 0, 5, 1 mod 25".into())
}

fn invariant_vs_pipeline() -> Result<String, String> {
    let (spec, _, w) = prime(5);
    for r in 0..25 {
        let eta = w.from_residue(r).map_err(|e| e.to_string())?;
        let params = DworkParams::with_eta(spec.clone(), 2, eta).map_err(|e| e.to_string())?;
        let a = invariant_obstruction(&params).map_err(|e| e.to_string())?;
        let b = pipeline_obstruction(&params).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("eta = {r}"))?;
    }
    Ok("p=5 N=2, all 25 parameters".into())
}

fn solver_vs_scan() -> Result<String, String> {
    let mut solved = 0;
    for (p, n) in [(5u64, 2usize), (7, 2)] {
        let (spec, k, _) = prime(p);
        for l in 0..p as i64 {
            let lam = k.from_int(l);
            let params = DworkParams::new(spec.clone(), n, lam).map_err(|e| e.to_string())?;
            if !dwork_smooth(&params) || !dwork_ordinary(&params).map_err(|e| e.to_string())? {
                continue;
            }
            let eta = canonical_eta(spec.clone(), n, &lam).map_err(|e| e.to_string())?;
            let scan = canonical_lifts_by_scan(spec.clone(), n, &lam).map_err(|e| e.to_string())?;
            ensure(scan == vec![eta], || format!("p={p} N={n} lambda={l}"))?;
            solved += 1;
        }
    }
    Ok(format!("{solved} parameters, one canonical lift each"))
}

fn ratio() -> Result<String, String> {
    let (_, k, w) = prime(7);
    for l in 1..7 {
        let lam = k.from_int(l);
        let ratios: Vec<_> = w
            .lifts(&lam)
            .map(|eta| ratio_at(&w, 2, &eta))
            .filter_map(Result::ok)
            .collect();
        ensure(ratios.windows(2).all(|r| r[0] == r[1]), || format!("lambda = {l}"))?;
    }
    Ok("p=7 N=2, ratio independent of the lift".into())
}

fn fermat() -> Result<String, String> {
    let (_, _, w) = prime(7);
    let f = HomogPoly::parse("x0^3 + x1^3 + x2^3", &w, None).map_err(|e| e.to_string())?;
    let ctx = HypersurfaceContext::new(f).map_err(|e| e.to_string())?;
    let v = ctx.is_canonical().map_err(|e| e.to_string())?;
    ensure(v.canonical, || "Fermat cubic over W_2(F_7) is not canonical".into())?;
    Ok("Fermat cubic over W_2(F_7) is canonical".into())
}

fn structural() -> Result<String, String> {
    let (_, _, w) = prime(5);
    let ctx = HypersurfaceContext::new(dwork_poly_at(&w, 2, &w.from_int(8)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(ctx.fsquared_identity_check().map_err(|e| e.to_string())?, || {
        "F*(f^2) identity".into()
    })?;
    let perp = ctx.pairing_perp().map_err(|e| e.to_string())?;
    let kernel = ctx.multiplication_kernel().map_err(|e| e.to_string())?;
    ensure(ctx.contained_in(&perp, &kernel) && ctx.contained_in(&kernel, &perp), || {
        "pairing annihilator differs from ker(f)".into()
    })?;
    Ok("F*(f^2) identity and annihilator = ker(f) at p=5 N=2 eta=8".into())
}
