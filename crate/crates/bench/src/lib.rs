//! Fixtures shared by the benchmarks in `benches/`.

use canlift::dwork::dwork_poly_at;
use canlift::obstruction::HypersurfaceContext;
use canlift::poly::HomogPoly;
use canlift::{FieldSpec, WittRing};

pub fn witt(p: u64) -> WittRing {
    WittRing::new(FieldSpec::prime(p).expect("odd prime"))
}

/// The Dwork polynomial over `W_2(F_p)` at the integer parameter `eta`.
pub fn dwork(p: u64, n_ambient: usize, eta: i64) -> HomogPoly<WittRing> {
    let w = witt(p);
    dwork_poly_at(&w, n_ambient, &w.from_int(eta)).expect("valid Dwork parameters")
}

pub fn dwork_context(p: u64, n_ambient: usize, eta: i64) -> HypersurfaceContext {
    HypersurfaceContext::new(dwork(p, n_ambient, eta)).expect("primitive polynomial")
}
