//! Hasse-Dwork polynomials.
//!
//! `HD_M^P(X)` is the coefficient of `(x_0 ... x_{M-1})^P` in
//! `(X sum x_i^M - M prod x_i)^P`. Choosing `i` copies of each `X x_j^M` and
//! `P - iM` copies of the product term gives
//!
//! ```text
//! HD_M^P(X) = sum_i  C(P,i) C(P-i,i) ... C(P-(M-1)i,i) (-M)^(P-iM) X^(iM).
//! ```
//!
//! [`hd_def`] evaluates this with big integers. [`hd_mod`] is the fast path
//! modulo `p^2` for `P = mp - 1`, built from Pochhammer symbols and the
//! guarded harmonic numbers `pH_k`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::DworkError;
use crate::arith::{inv_mod_prime, is_prime, CoeffRing, FieldElement, Modulus, ResidueField, Witt2, WittRing};

/// A polynomial in `X` with exact integer coefficients supported on the
/// exponents `shift, shift + M, shift + 2M, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HDPoly {
    m: u32,
    power: u32,
    shift: u32,
    coeffs: Vec<BigInt>,
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Number of ways to pick `i` copies of each `x_j^M` and `P - iM` copies of
/// the product term among `P` factors.
pub fn multinomial_count(m: u32, power: u32, i: u32) -> BigUint {
    let mut rest = power as u64;
    let mut acc = BigUint::one();
    for _ in 0..m {
        acc *= binomial(rest, i as u64);
        rest = rest.saturating_sub(i as u64);
    }
    acc
}

/// `HD_M^P` with exact coefficients.
pub fn hd_def(m: u32, power: u32) -> HDPoly {
    assert!(m >= 2, "M must be at least 2");
    let neg_m = BigInt::from(-(m as i64));
    let coeffs = (0..=power / m)
        .map(|i| {
            let count = BigInt::from(multinomial_count(m, power, i));
            count * num_traits::pow(neg_m.clone(), (power - i * m) as usize)
        })
        .collect();
    HDPoly {
        m,
        power,
        shift: 0,
        coeffs,
    }
}

/// The coefficient of `x_0^(P+sM) (x_1 ... x_{M-1})^P` in
/// `(X sum x_i^M - M prod x_i)^(P+s)`, as a polynomial in `X`.
///
/// Taking `a + s` copies of `X x_0^M`, `a` copies of each other `X x_j^M` and
/// `b = P - aM` copies of the product gives the term
/// `(P+s)! / ((a+s)! a!^(M-1) b!) (-M)^b X^(s+aM)`. For `s = 0` this is
/// [`hd_def`].
pub fn hd_marked(m: u32, power: u32, s: u32) -> HDPoly {
    assert!(m >= 2, "M must be at least 2");
    let neg_m = BigInt::from(-(m as i64));
    let top = factorial((power + s) as u64);
    let coeffs = (0..=power / m)
        .map(|a| {
            let b = power - a * m;
            let mut den = factorial((a + s) as u64) * factorial(b as u64);
            for _ in 1..m {
                den *= factorial(a as u64);
            }
            let (q, r) = top.div_rem(&den);
            debug_assert!(r.is_zero());
            BigInt::from(q) * num_traits::pow(neg_m.clone(), b as usize)
        })
        .collect();
    HDPoly {
        m,
        power,
        shift: s,
        coeffs,
    }
}

impl HDPoly {
    /// The degree `M` of the underlying Dwork polynomial.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// The exponent `P`.
    pub fn power(&self) -> u32 {
        self.power
    }

    /// `(exponent, coefficient)` pairs, lowest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigInt)> {
        let (m, s) = (self.m, self.shift);
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (s + i as u32 * m, c))
    }

    pub fn coeff(&self, exp: u32) -> BigInt {
        if exp < self.shift || (exp - self.shift) % self.m != 0 {
            return BigInt::zero();
        }
        self.coeffs
            .get(((exp - self.shift) / self.m) as usize)
            .cloned()
            .unwrap_or_default()
    }

    /// Coefficients reduced into `[0, q)`.
    pub fn reduce_mod(&self, q: u64) -> Vec<(u32, u64)> {
        let qb = BigInt::from(q);
        self.terms()
            .map(|(e, c)| (e, c.mod_floor(&qb).to_u64().expect("reduced below q")))
            .collect()
    }

    fn eval_with<R: CoeffRing>(&self, ring: &R, x: &R::Elem, q: u64) -> R::Elem {
        let xm = pow_elem(ring, x, self.m as u64);
        let mut acc = ring.zero();
        // Horner in X^M, then the common factor X^shift
        for (_, c) in self.reduce_mod(q).iter().rev() {
            acc = ring.add(&ring.mul(&acc, &xm), &ring.from_int(*c as i64));
        }
        ring.mul(&acc, &pow_elem(ring, x, self.shift as u64))
    }

    /// Value at `x` in `W_2(k)`.
    pub fn eval_witt(&self, w: &WittRing, x: &Witt2) -> Witt2 {
        let p = w.p();
        self.eval_with(w, x, p * p)
    }

    /// Value at `x` in `k`.
    pub fn eval_field(&self, k: &ResidueField, x: &FieldElement) -> FieldElement {
        self.eval_with(k, x, k.p())
    }

    /// Exact integer text, e.g. `-19683 + 367416*X^3 - 204120*X^6 + 1680*X^9`.
    pub fn format_exact(&self) -> String {
        let terms: Vec<(u32, BigInt)> = self.terms().map(|(e, c)| (e, c.clone())).collect();
        format_terms(&terms)
    }

    /// Coefficients reduced mod `q`, e.g. `17 + 16*X^3 + 5*X^6 + 5*X^9 (mod 25)`.
    pub fn format_mod(&self, q: u64) -> String {
        let terms: Vec<(u32, BigInt)> = self
            .reduce_mod(q)
            .into_iter()
            .map(|(e, c)| (e, BigInt::from(c)))
            .collect();
        format!("{} (mod {q})", format_terms(&terms))
    }
}

impl fmt::Display for HDPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_exact())
    }
}

/// Formats `(exponent, coefficient)` pairs with ASCII signs, skipping zeros.
pub fn format_terms(terms: &[(u32, BigInt)]) -> String {
    let mut out = String::new();
    for (e, c) in terms.iter().filter(|(_, c)| !c.is_zero()) {
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        match *e {
            0 => out.push_str(&mag.to_string()),
            _ if mag.is_one() => out.push_str(&monomial_text(*e)),
            _ => out.push_str(&format!("{mag}*{}", monomial_text(*e))),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn monomial_text(e: u32) -> String {
    if e == 1 {
        "X".into()
    } else {
        format!("X^{e}")
    }
}

fn pow_elem<R: CoeffRing>(ring: &R, x: &R::Elem, mut e: u64) -> R::Elem {
    let mut base = *x;
    let mut acc = ring.one();
    while e > 0 {
        if e & 1 == 1 {
            acc = ring.mul(&acc, &base);
        }
        base = ring.mul(&base, &base);
        e >>= 1;
    }
    acc
}

fn check_prime(p: u64) -> Result<(), DworkError> {
    if p < 3 || !is_prime(p) {
        return Err(DworkError::Arith(crate::arith::ArithError::NotOddPrime(p)));
    }
    Ok(())
}

/// `p H_k mod p^2` for `0 <= k <= 2p - 1`. The `j = p` summand is `p/p = 1`
/// exactly; every other summand is `p` times the inverse of `j` mod `p`.
pub fn harmonic_ph(k: u64, p: u64) -> Result<u64, DworkError> {
    check_prime(p)?;
    if k > 2 * p - 1 {
        return Err(DworkError::HarmonicRange { k, p });
    }
    let q = Modulus::new(p * p);
    let mut acc = 0;
    for j in 1..=k {
        let term = if j == p {
            1
        } else {
            p * inv_mod_prime(j % p, p).expect("j is prime to p")
        };
        acc = q.add(acc, term);
    }
    Ok(acc)
}

/// Coefficients mod `p^2` of `HD_{N+1}^{mp-1}` from the extended Katz formula
///
/// ```text
/// (-(N+1))^(mp-1) sum_i (1 - m pH_{i(N+1)}) prod_j {j/(N+1)}_i / (i!)^N X^(i(N+1))
/// ```
///
/// where `{a}_i` is the rising factorial. Pochhammer factors are multiplied
/// in `Z/p^2` before the only division, by `(i!)^N`, which is a unit because
/// `i < p`.
pub fn hd_mod_coeffs(n_ambient: u32, p: u64, m: u32) -> Result<Vec<(u32, u64)>, DworkError> {
    check_prime(p)?;
    if !(1..=2).contains(&m) {
        return Err(DworkError::HarmonicMultiplier(m));
    }
    let mm = n_ambient as u64 + 1;
    if mm % p == 0 {
        return Err(DworkError::PDividesDegree { p, degree: mm });
    }
    let q = Modulus::new(p * p);
    let power = m as u64 * p - 1;
    let inv_m = inv_unit(mm, p)?;
    let lead = q.pow(q.from_i64(-(mm as i64)), power);
    let mut out = Vec::new();
    for i in 0..=power / mm {
        let mut poch = 1;
        for j in 1..mm {
            let a = q.mul(j, inv_m);
            for k in 0..i {
                poch = q.mul(poch, q.add(a, k % (p * p)));
            }
        }
        let fact = (1..=i).fold(1, |acc, x| q.mul(acc, x % (p * p)));
        let inv_fact = inv_unit(fact, p)?;
        let harmonic = harmonic_ph(i * mm, p)?;
        let h = q.sub(1, q.mul(m as u64, harmonic));
        let mut c = q.mul(h, poch);
        c = q.mul(c, q.pow(inv_fact, n_ambient as u64));
        c = q.mul(c, lead);
        out.push(((i * mm) as u32, c));
    }
    Ok(out)
}

/// Inverse of a unit mod `p^2` by lifting the inverse mod `p`.
fn inv_unit(x: u64, p: u64) -> Result<u64, DworkError> {
    let q = Modulus::new(p * p);
    let y0 = inv_mod_prime(x % p, p).ok_or(DworkError::NonUnitDivisor(x))?;
    // one Newton step: y = y0 (2 - x y0)
    Ok(q.mul(y0, q.sub(2, q.mul(x % (p * p), y0))))
}

/// `HD_{N+1}^{mp-1}(x)` in `W_2(k)` through [`hd_mod_coeffs`].
pub fn hd_mod(w: &WittRing, n_ambient: u32, m: u32, x: &Witt2) -> Result<Witt2, DworkError> {
    let coeffs = hd_mod_coeffs(n_ambient, w.p(), m)?;
    let mm = n_ambient as u64 + 1;
    let xm = w.pow(x, mm);
    let mut acc = w.zero();
    for (_, c) in coeffs.iter().rev() {
        acc = w.add(&w.mul(&acc, &xm), &w.from_int(*c as i64));
    }
    Ok(acc)
}

/// Katz's congruence: `HD_{N+1}^{p-1}` mod `p` has coefficients
/// `(-(N+1))^(p-1) prod_j {j/(N+1)}_i / (i!)^N`.
pub fn katz_coeffs(n_ambient: u32, p: u64) -> Result<Vec<(u32, u64)>, DworkError> {
    check_prime(p)?;
    let mm = n_ambient as u64 + 1;
    if mm % p == 0 {
        return Err(DworkError::PDividesDegree { p, degree: mm });
    }
    let fp = Modulus::new(p);
    let inv_m = inv_mod_prime(mm % p, p).expect("p does not divide N+1");
    let lead = fp.pow(fp.from_i64(-(mm as i64)), p - 1);
    let mut out = Vec::new();
    for i in 0..=(p - 1) / mm {
        let mut c = lead;
        for j in 1..mm {
            let a = fp.mul(j % p, inv_m);
            for k in 0..i {
                c = fp.mul(c, fp.add(a, k % p));
            }
        }
        let fact = (1..=i).fold(1, |acc, x| fp.mul(acc, x % p));
        let inv = inv_mod_prime(fact, p).ok_or(DworkError::NonUnitDivisor(fact))?;
        c = fp.mul(c, fp.pow(inv, n_ambient as u64));
        out.push(((i * mm) as u32, c));
    }
    Ok(out)
}
