//! Canonical liftings modulo `p^2` of ordinary projective hypersurfaces.
//!
//! The crate is layered bottom-up:
//!
//! * [`arith`]: `F_{p^n}` and the length-two Witt vectors `W_2(F_{p^n})`.
//! * [`poly`]: sparse homogeneous polynomials over either ring.
//! * [`dualmod`]: the graded dual module of Laurent monomials with negative
//!   exponents, and linear algebra over `W_2(k)`.
//! * [`obstruction`]: the Frobenius obstruction for a lift `f` of a
//!   hypersurface, and the resulting canonicity test.
//! * [`dwork`]: Hasse-Dwork polynomials and the lift solver for the Dwork
//!   family `lambda * sum x_i^(N+1) - (N+1) * prod x_i`.

pub mod arith;
pub mod poly;
pub mod dualmod;
pub mod obstruction;
pub mod dwork;

pub use arith::{
    ArithError, CoeffRing, FieldElement, FieldSpec, ResidueField, Witt2, WittRing,
};
