//! Dense univariate polynomials over `F_p`, just enough to validate and pick
//! the defining polynomial of `F_{p^n}`.

use super::{inv_mod_prime, ArithError, Modulus, Result};

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn sub(a: &[u64], b: &[u64], m: Modulus) -> Vec<u64> {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| m.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trim(out)
}

fn mul(a: &[u64], b: &[u64], m: Modulus) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = m.add(out[i + j], m.mul(x, y));
        }
    }
    trim(out)
}

/// Quotient and remainder of `a` by nonzero `b`.
fn divrem(a: &[u64], b: &[u64], m: Modulus) -> (Vec<u64>, Vec<u64>) {
    let b = trim(b.to_vec());
    let lead_inv = inv_mod_prime(*b.last().expect("division by zero polynomial"), m.value())
        .expect("leading coefficient is a unit");
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0; r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = m.mul(*r.last().unwrap(), lead_inv);
        q[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = m.sub(r[shift + i], m.mul(c, bc));
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn gcd(a: &[u64], b: &[u64], m: Modulus) -> Vec<u64> {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y, m);
        x = y;
        y = r;
    }
    x
}

fn mulmod(a: &[u64], b: &[u64], modulus: &[u64], m: Modulus) -> Vec<u64> {
    divrem(&mul(a, b, m), modulus, m).1
}

fn powmod(base: &[u64], mut exp: u64, modulus: &[u64], m: Modulus) -> Vec<u64> {
    let mut acc = vec![1];
    let mut b = divrem(base, modulus, m).1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(&acc, &b, modulus, m);
        }
        b = mulmod(&b, &b, modulus, m);
        exp >>= 1;
    }
    acc
}

/// Ben-Or irreducibility test: no factor of degree `i <= n/2` divides `modulus`.
pub(super) fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let m = Modulus::new(p);
    let f = trim(modulus.to_vec());
    let n = f.len() - 1;
    if n <= 1 {
        return n == 1;
    }
    let y = vec![0, 1];
    let mut y_pow = y.clone();
    for _ in 0..n / 2 {
        y_pow = powmod(&y_pow, p, &f, m);
        let g = gcd(&f, &sub(&y_pow, &y, m), m);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// The monic irreducible polynomial of degree `n` with the smallest index
/// `sum c_i p^i` over its non-leading coefficients.
pub(super) fn smallest_irreducible(n: usize, p: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0, 1];
    }
    let mut idx: u64 = 0;
    loop {
        let mut c = Vec::with_capacity(n + 1);
        let mut rest = idx;
        for _ in 0..n {
            c.push(rest % p);
            rest /= p;
        }
        c.push(1);
        if c[0] != 0 && is_irreducible(&c, p) {
            return c;
        }
        idx += 1;
    }
}

/// Inverse of `a` modulo the irreducible `modulus`, padded to length `deg(modulus)`.
pub(super) fn inverse_mod(a: &[u64], modulus: &[u64], p: u64) -> Option<Vec<u64>> {
    let m = Modulus::new(p);
    let n = modulus.len() - 1;
    let (mut r0, mut r1) = (trim(modulus.to_vec()), trim(a.to_vec()));
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
    if r1.is_empty() {
        return None;
    }
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, m);
        let s2 = sub(&s0, &mul(&q, &s1, m), m);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    if r0.len() != 1 {
        return None;
    }
    let c = inv_mod_prime(r0[0], p)?;
    let mut out: Vec<u64> = s0.iter().map(|&x| m.mul(x, c)).collect();
    out = divrem(&out, modulus, m).1;
    out.resize(n, 0);
    Some(out)
}

pub(super) fn format(coeffs: &[u64], var: char) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Accepts `y^2+1`-style text or a coefficient list `1,0,1` (low degree first).
pub(super) fn parse(text: &str, p: u64) -> Result<Vec<u64>> {
    let m = Modulus::new(p);
    let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |reason: &str| ArithError::Parse {
        what: "modulus",
        text: text.to_string(),
        reason: reason.to_string(),
    };
    if src.is_empty() {
        return Err(err("empty input"));
    }
    if !src.contains('y') {
        let mut out = Vec::new();
        for part in src.split(',') {
            let v: i64 = part.parse().map_err(|_| err("expected integers"))?;
            out.push(m.from_i64(v));
        }
        return Ok(out);
    }
    let mut out: Vec<u64> = Vec::new();
    let mut add_term = |coef: i64, deg: usize| {
        if out.len() <= deg {
            out.resize(deg + 1, 0);
        }
        out[deg] = m.add(out[deg], m.from_i64(coef));
    };
    let normalized = src.replace('-', "+-");
    for term in normalized.split('+').filter(|t| !t.is_empty()) {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1, term),
        };
        let (coef_txt, mono) = match body.find('y') {
            Some(pos) => (body[..pos].trim_end_matches('*'), &body[pos..]),
            None => (body, ""),
        };
        let coef: i64 = if coef_txt.is_empty() {
            1
        } else {
            coef_txt.parse().map_err(|_| err("bad coefficient"))?
        };
        let deg = if mono.is_empty() {
            0
        } else if mono == "y" {
            1
        } else if let Some(e) = mono.strip_prefix("y^") {
            e.parse().map_err(|_| err("bad exponent"))?
        } else {
            return Err(err("unexpected token"));
        };
        add_term(sign * coef, deg);
    }
    Ok(trim(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&[1, 0, 1], 3));
        assert!(!is_irreducible(&[1, 0, 1], 5));
        assert!(is_irreducible(&[2, 0, 1], 5));
        // (y^2 + 1)^2 over F_3 has no roots but is reducible
        assert!(!is_irreducible(&[1, 0, 2, 0, 1], 3));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse("y^2+1", 3).unwrap(), vec![1, 0, 1]);
        assert_eq!(parse("1,0,1", 3).unwrap(), vec![1, 0, 1]);
        assert_eq!(parse("y^3 - y + 2", 3).unwrap(), vec![2, 2, 0, 1]);
        assert_eq!(format(&[2, 2, 0, 1], 'y'), "y^3+2*y+2");
    }
}
