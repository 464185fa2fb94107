//! Dense matrices over `W_2(k)` and their kernels.
//!
//! `W_2(k)` is a local principal ideal ring whose only ideals are
//! `0 < pW_2 < W_2`, so every matrix has a diagonal form `U M V = D` with
//! `U`, `V` invertible and each diagonal entry either a unit or `p` times a
//! unit. Elimination first exhausts unit pivots and then works with pivots of
//! valuation one, where quotients are computed in `k` through `div_p`.

use std::fmt;

use crate::arith::{Witt2, WittRing};

#[derive(Clone, PartialEq, Eq)]
pub struct Witt2Matrix {
    ring: WittRing,
    rows: usize,
    cols: usize,
    data: Vec<Witt2>,
}

impl fmt::Debug for Witt2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Witt2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| self.ring.format(&self.get(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Witt2Matrix {
    pub fn zeros(ring: &WittRing, rows: usize, cols: usize) -> Self {
        Witt2Matrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &WittRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(ring: &WittRing, cols: usize, rows: Vec<Vec<Witt2>>) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        Witt2Matrix {
            ring: ring.clone(),
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn ring(&self) -> &WittRing {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Witt2 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Witt2) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul_vec(&self, v: &[Witt2]) -> Vec<Witt2> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let w = &self.ring;
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(w.zero(), |acc, c| {
                    w.add(&acc, &w.mul(&self.get(r, c), &v[c]))
                })
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// `row[dst] -= q * row[src]`
    fn row_axpy(&mut self, dst: usize, src: usize, q: &Witt2) {
        let w = self.ring.clone();
        for c in 0..self.cols {
            let s = self.get(src, c);
            if !w.is_zero(&s) {
                let v = w.sub(&self.get(dst, c), &w.mul(q, &s));
                self.set(dst, c, v);
            }
        }
    }

    /// `col[dst] -= q * col[src]`
    fn col_axpy(&mut self, dst: usize, src: usize, q: &Witt2) {
        let w = self.ring.clone();
        for r in 0..self.rows {
            let s = self.get(r, src);
            if !w.is_zero(&s) {
                let v = w.sub(&self.get(r, dst), &w.mul(q, &s));
                self.set(r, dst, v);
            }
        }
    }

    /// Diagonal form of the matrix, with the transforms that produce it.
    pub fn smith(&self) -> Smith {
        let w = &self.ring;
        let mut a = self.clone();
        let mut u = Witt2Matrix::identity(w, self.rows);
        let mut v = Witt2Matrix::identity(w, self.cols);
        let mut diag = Vec::new();
        let mut valuations = Vec::new();
        let limit = self.rows.min(self.cols);
        for r in 0..limit {
            let mut best: Option<(u8, usize, usize)> = None;
            'search: for i in r..a.rows {
                for j in r..a.cols {
                    let val = valuation(w, &a.get(i, j));
                    if val < 2 && best.map_or(true, |b| val < b.0) {
                        best = Some((val, i, j));
                        if val == 0 {
                            break 'search;
                        }
                    }
                }
            }
            let Some((val, i, j)) = best else { break };
            a.swap_rows(r, i);
            u.swap_rows(r, i);
            a.swap_cols(r, j);
            v.swap_cols(r, j);
            let pivot = a.get(r, r);
            for i in 0..a.rows {
                let x = a.get(i, r);
                if i != r && !w.is_zero(&x) {
                    let q = exact_quotient(w, &x, &pivot, val);
                    a.row_axpy(i, r, &q);
                    u.row_axpy(i, r, &q);
                }
            }
            for j in 0..a.cols {
                let x = a.get(r, j);
                if j != r && !w.is_zero(&x) {
                    let q = exact_quotient(w, &x, &pivot, val);
                    a.col_axpy(j, r, &q);
                    v.col_axpy(j, r, &q);
                }
            }
            diag.push(pivot);
            valuations.push(val);
        }
        Smith {
            u,
            v,
            diag,
            valuations,
        }
    }

    /// Generators of `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Witt2>> {
        self.smith().kernel(&self.ring)
    }

    /// Some `x` with `M x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Witt2]) -> Option<Vec<Witt2>> {
        assert_eq!(b.len(), self.rows, "right-hand side length must match row count");
        self.smith().solve(&self.ring, b)
    }
}

/// 0 for units, 1 for nonzero multiples of `p`, 2 for zero.
fn valuation(w: &WittRing, x: &Witt2) -> u8 {
    if w.is_unit(x) {
        0
    } else if w.is_zero(x) {
        2
    } else {
        1
    }
}

/// `q` with `x = q * pivot`, for `pivot` of valuation `val` and `x` of
/// valuation at least `val`.
fn exact_quotient(w: &WittRing, x: &Witt2, pivot: &Witt2, val: u8) -> Witt2 {
    if val == 0 {
        return w.mul(x, &w.inv(pivot).expect("unit pivot"));
    }
    let k = w.residue_field();
    let xs = w.div_p(x).expect("entry has valuation at least that of the pivot");
    let ps = w.div_p(pivot).expect("pivot of valuation one");
    let q = k.div(&xs, &ps).expect("pivot is p times a unit");
    w.lift_minimal(&q)
}

/// `U M V = diag(d_0, ..., d_{r-1}, 0, ...)`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Witt2Matrix,
    pub v: Witt2Matrix,
    pub diag: Vec<Witt2>,
    /// 0 (unit) or 1 (p times a unit) for each diagonal entry.
    pub valuations: Vec<u8>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    fn column(&self, j: usize) -> Vec<Witt2> {
        (0..self.v.rows).map(|r| self.v.get(r, j)).collect()
    }

    /// Kernel generators: columns of `V` past the rank, and `p` times the
    /// columns whose pivot has valuation one.
    pub fn kernel(&self, w: &WittRing) -> Vec<Vec<Witt2>> {
        let p = w.from_int(w.p() as i64);
        let mut gens = Vec::new();
        for j in 0..self.v.cols {
            match self.valuations.get(j) {
                Some(0) => {}
                Some(_) => gens.push(self.column(j).iter().map(|x| w.mul(x, &p)).collect()),
                None => gens.push(self.column(j)),
            }
        }
        gens
    }

    pub fn solve(&self, w: &WittRing, b: &[Witt2]) -> Option<Vec<Witt2>> {
        let k = w.residue_field();
        let ub = self.u.mul_vec(b);
        if ub[self.rank()..].iter().any(|x| !w.is_zero(x)) {
            return None;
        }
        let mut y = vec![w.zero(); self.v.cols];
        for (j, (d, &val)) in self.diag.iter().zip(&self.valuations).enumerate() {
            y[j] = if val == 0 {
                w.mul(&ub[j], &w.inv(d).ok()?)
            } else {
                let num = w.div_p(&ub[j]).ok()?;
                let den = w.div_p(d).ok()?;
                w.lift_minimal(&k.div(&num, &den).ok()?)
            };
        }
        Some(self.v.mul_vec(&y))
    }
}

/// Generators of the kernel of `M` as a `W_2(k)`-module.
pub fn howell_kernel(m: &Witt2Matrix) -> Vec<Vec<Witt2>> {
    m.kernel()
}

/// Whether `v` is a `W_2(k)`-combination of `gens`.
pub fn in_span(w: &WittRing, gens: &[Vec<Witt2>], v: &[Witt2]) -> bool {
    if gens.is_empty() {
        return v.iter().all(|x| w.is_zero(x));
    }
    let rows = v.len();
    let mut m = Witt2Matrix::zeros(w, rows, gens.len());
    for (j, g) in gens.iter().enumerate() {
        assert_eq!(g.len(), rows, "generator length mismatch");
        for (i, x) in g.iter().enumerate() {
            m.set(i, j, *x);
        }
    }
    m.solve(v).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FieldSpec;

    fn w3() -> WittRing {
        WittRing::new(FieldSpec::prime(3).unwrap())
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let w = w3();
        assert!(howell_kernel(&Witt2Matrix::identity(&w, 3)).is_empty());
    }

    #[test]
    fn zero_row_kernel_is_everything() {
        let w = w3();
        let gens = howell_kernel(&Witt2Matrix::zeros(&w, 1, 2));
        assert_eq!(gens, vec![vec![w.one(), w.zero()], vec![w.zero(), w.one()]]);
    }

    #[test]
    fn multiplication_by_p_has_torsion_kernel() {
        let w = w3();
        let k = w.residue_field();
        let m = Witt2Matrix::from_rows(&w, 1, vec![vec![w.times_p(&k.one())]]);
        let gens = howell_kernel(&m);
        assert_eq!(gens.len(), 1);
        assert_eq!(w.coords(&gens[0][0]), (k.zero(), k.one()));
        // the kernel is exactly pW_2, checked against all 9 elements
        let kernel: Vec<_> = w.elements().filter(|x| w.is_zero(&m.mul_vec(&[*x])[0])).collect();
        assert_eq!(kernel.len(), 3);
        for x in kernel {
            assert!(in_span(&w, &gens, &[x]));
        }
    }

    #[test]
    fn solve_round_trip() {
        let w = WittRing::new(FieldSpec::new(3, 2, None).unwrap());
        let vals: Vec<Witt2> = w.elements().step_by(7).take(6).collect();
        let m = Witt2Matrix::from_rows(&w, 3, vec![vals[..3].to_vec(), vals[3..].to_vec()]);
        let x = vec![w.from_int(2), w.one(), w.from_int(5)];
        let b = m.mul_vec(&x);
        let y = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&y), b);
    }
}
