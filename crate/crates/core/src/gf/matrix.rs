use std::fmt;

use serde::{Deserialize, Serialize};

use super::subspace::Subspace;
use super::vector::{add3, low_mask, sub3, Prime, Vector};
use crate::error::{Error, Result};

/// An `m x n` matrix over F_p with at most 64 entries, stored row-major in one
/// packed [`Vector`]: entry `(i, j)` is coordinate `i * n + j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatrixGF {
    p: Prime,
    m: u8,
    n: u8,
    data: Vector,
}

const MAX_ROWS: usize = 16;

impl MatrixGF {
    pub fn zero(p: Prime, m: usize, n: usize) -> MatrixGF {
        assert!(m >= 1 && n >= 1 && m * n <= 64, "unsupported shape {m}x{n}");
        MatrixGF { p, m: m as u8, n: n as u8, data: Vector::ZERO }
    }

    pub fn identity(p: Prime, n: usize) -> MatrixGF {
        let mut d = Vector::ZERO;
        for i in 0..n {
            d.set(i * n + i, 1);
        }
        MatrixGF::from_vector(p, n, n, d)
    }

    pub fn scalar(p: Prime, n: usize, c: u32) -> MatrixGF {
        let id = MatrixGF::identity(p, n);
        id.scale(c)
    }

    #[inline]
    pub fn from_vector(p: Prime, m: usize, n: usize, data: Vector) -> MatrixGF {
        debug_assert!(m * n <= 64);
        debug_assert!(data.support() & !low_mask(m * n) == 0);
        MatrixGF { p, m: m as u8, n: n as u8, data }
    }

    pub fn from_rows(p: Prime, n: usize, rows: &[Vector]) -> MatrixGF {
        let m = rows.len();
        let mut d = Vector::ZERO;
        for (i, r) in rows.iter().enumerate() {
            d = d.or(r.mask(low_mask(n)).shift_up(i * n));
        }
        MatrixGF::from_vector(p, m, n, d)
    }

    pub fn from_digit_rows(p: Prime, rows: &[Vec<u32>]) -> MatrixGF {
        let n = rows[0].len();
        let vecs: Vec<Vector> = rows.iter().map(|r| Vector::from_digits(r)).collect();
        MatrixGF::from_rows(p, n, &vecs)
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.m as usize
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.n as usize
    }
    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.m as usize, self.n as usize)
    }
    #[inline]
    pub fn vector(&self) -> Vector {
        self.data
    }
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.data.is_zero()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data.get(i * self.n as usize + j)
    }

    pub fn with_entry(&self, i: usize, j: usize, v: u32) -> MatrixGF {
        let mut m = *self;
        m.data.set(i * self.n as usize + j, v % self.p.value());
        m
    }

    #[inline]
    pub fn row(&self, i: usize) -> Vector {
        let n = self.n as usize;
        self.data.shift_down(i * n).mask(low_mask(n))
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows()).map(|i| self.row(i)).collect()
    }

    pub fn add(&self, other: &MatrixGF) -> MatrixGF {
        debug_assert_eq!(self.shape(), other.shape());
        MatrixGF { data: self.p.add(self.data, other.data), ..*self }
    }

    pub fn sub(&self, other: &MatrixGF) -> MatrixGF {
        debug_assert_eq!(self.shape(), other.shape());
        MatrixGF { data: self.p.sub(self.data, other.data), ..*self }
    }

    pub fn scale(&self, c: u32) -> MatrixGF {
        MatrixGF { data: self.p.scale(c, self.data), ..*self }
    }

    pub fn transpose(&self) -> MatrixGF {
        let (m, n) = self.shape();
        let mut d = Vector::ZERO;
        for i in 0..m {
            for j in 0..n {
                let v = self.get(i, j);
                if v != 0 {
                    d.set(j * m + i, v);
                }
            }
        }
        MatrixGF::from_vector(self.p, n, m, d)
    }

    pub fn mul(&self, other: &MatrixGF) -> MatrixGF {
        assert_eq!(self.cols(), other.rows(), "shape mismatch in product");
        let (m, k) = self.shape();
        let n = other.cols();
        let kmask = low_mask(k);
        let nmask = low_mask(n);
        let mut d = Vector::ZERO;
        match self.p {
            Prime::Two => {
                let mut rows = [0u64; 64];
                for (t, r) in rows.iter_mut().enumerate().take(k) {
                    *r = (other.data.lo >> (t * n)) & nmask;
                }
                for i in 0..m {
                    let mut bits = (self.data.lo >> (i * k)) & kmask;
                    let mut acc = 0u64;
                    while bits != 0 {
                        acc ^= rows[bits.trailing_zeros() as usize];
                        bits &= bits - 1;
                    }
                    d.lo |= acc << (i * n);
                }
            }
            Prime::Three => {
                let mut rows = [Vector::ZERO; 64];
                for (t, r) in rows.iter_mut().enumerate().take(k) {
                    *r = other.data.shift_down(t * n).mask(nmask);
                }
                for i in 0..m {
                    let row = self.data.shift_down(i * k).mask(kmask);
                    let mut acc = Vector::ZERO;
                    let mut ones = row.lo;
                    while ones != 0 {
                        acc = add3(acc, rows[ones.trailing_zeros() as usize]);
                        ones &= ones - 1;
                    }
                    let mut twos = row.hi;
                    while twos != 0 {
                        acc = sub3(acc, rows[twos.trailing_zeros() as usize]);
                        twos &= twos - 1;
                    }
                    d = d.or(acc.shift_up(i * n));
                }
            }
        }
        MatrixGF::from_vector(self.p, m, n, d)
    }

    /// Row vector `x` (length m) times this matrix.
    pub fn left_apply(&self, x: Vector) -> Vector {
        let p = self.p;
        let mut acc = Vector::ZERO;
        for i in 0..self.rows() {
            let c = x.get(i);
            if c != 0 {
                acc = p.axpy(acc, c, self.row(i));
            }
        }
        acc
    }

    /// This matrix times the column vector `v` (length n).
    pub fn apply(&self, v: Vector) -> Vector {
        let mut out = Vector::ZERO;
        for i in 0..self.rows() {
            out.set(i, self.row(i).dot(self.p, v));
        }
        out
    }

    pub fn rank(&self) -> usize {
        rank_of(self.p, self.data, self.m as usize, self.n as usize)
    }

    pub fn is_invertible(&self) -> bool {
        self.m == self.n && self.rank() == self.rows()
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self) -> (MatrixGF, Vec<usize>) {
        let s = Subspace::span(self.p, self.cols(), self.row_vectors());
        let mut rows: Vec<Vector> = s.basis().to_vec();
        rows.resize(self.rows(), Vector::ZERO);
        (MatrixGF::from_rows(self.p, self.cols(), &rows), s.pivots().to_vec())
    }

    pub fn row_space(&self) -> Subspace {
        Subspace::span(self.p, self.cols(), self.row_vectors())
    }

    /// Right kernel `{ v : M v = 0 }` as a subspace of F_p^n.
    pub fn kernel(&self) -> Subspace {
        self.row_space().orthogonal_complement()
    }

    /// Left kernel `{ x : x M = 0 }` as a subspace of F_p^m.
    pub fn left_kernel(&self) -> Subspace {
        self.transpose().kernel()
    }

    pub fn inverse(&self) -> Option<MatrixGF> {
        let n = self.rows();
        if n != self.cols() || 2 * n > 64 {
            return None;
        }
        let p = self.p;
        // echelonise [M | I] with the M block in the low coordinates
        let mut rows: Vec<Vector> = (0..n)
            .map(|i| self.row(i).or(Vector::ZERO.with(n + i, 1)))
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| rows[r].get(col) != 0)?;
            rows.swap(col, piv);
            let inv = p.inv_scalar(rows[col].get(col));
            rows[col] = p.scale(inv, rows[col]);
            for r in 0..n {
                if r != col {
                    let c = rows[r].get(col);
                    if c != 0 {
                        rows[r] = p.axpy(rows[r], p.value() - c, rows[col]);
                    }
                }
            }
        }
        let out: Vec<Vector> = rows.iter().map(|r| r.shift_down(n)).collect();
        Some(MatrixGF::from_rows(p, n, &out))
    }

    pub fn pow(&self, e: u32) -> MatrixGF {
        let mut acc = MatrixGF::identity(self.p, self.rows());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Characteristic polynomial `det(tI - M)`, coefficients from constant term
    /// upwards (monic, length n + 1).
    pub fn charpoly(&self) -> Vec<u32> {
        assert_eq!(self.rows(), self.cols());
        charpoly_hessenberg(self)
    }

    /// A similarity invariant: characteristic polynomial together with the ranks
    /// of `f(M)` for every monic `f` of degree 1 and 2.
    pub fn conjugacy_invariant(&self) -> u64 {
        let p = self.p;
        let n = self.rows();
        let pv = p.value();
        let mut h: u64 = 0xcbf29ce484222325;
        let mut mix = |x: u64| {
            h ^= x;
            h = h.wrapping_mul(0x100000001b3);
        };
        for &c in &charpoly_array(self)[..=n] {
            mix(c as u64);
        }
        let id = MatrixGF::identity(p, n);
        let sq = self.mul(self);
        for a in 0..pv {
            let lin = self.add(&id.scale(a));
            mix(lin.rank() as u64);
            for b in 0..pv {
                let quad = sq.add(&self.scale(a)).add(&id.scale(b));
                mix(quad.rank() as u64 + 16);
            }
        }
        h
    }

    /// One row per line, one digit per entry.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                s.push(char::from_digit(self.get(i, j), 10).unwrap());
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_text(p: Prime, text: &str) -> Result<MatrixGF> {
        let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        parse_rows(p, &rows, 0)
    }
}

/// Parses a block of digit rows; `first_line` is used only for diagnostics.
pub(crate) fn parse_rows(p: Prime, rows: &[&str], first_line: usize) -> Result<MatrixGF> {
    if rows.is_empty() {
        return Err(Error::Parse { line: first_line, msg: "empty matrix".into() });
    }
    let n = rows[0].len();
    let m = rows.len();
    if n == 0 || m * n > 64 {
        return Err(Error::Parse { line: first_line, msg: format!("unsupported shape {m}x{n}") });
    }
    let mut d = Vector::ZERO;
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::Parse { line: first_line + i, msg: "ragged matrix rows".into() });
        }
        for (j, ch) in r.chars().enumerate() {
            let v = ch
                .to_digit(10)
                .filter(|&v| v < p.value())
                .ok_or_else(|| Error::Parse {
                    line: first_line + i,
                    msg: format!("invalid digit {ch:?} for p = {}", p.value()),
                })?;
            d.set(i * n + j, v);
        }
    }
    Ok(MatrixGF::from_vector(p, m, n, d))
}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixGF[{}x{} over F_{}](", self.m, self.n, self.p.value())?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, "/")?;
            }
            for j in 0..self.cols() {
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Display for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Rank of the `m x n` matrix packed row-major in `data`.
#[inline]
pub fn rank_of(p: Prime, data: Vector, m: usize, n: usize) -> usize {
    if m <= MAX_ROWS {
        let mask = low_mask(n);
        match p {
            Prime::Two => {
                let mut rows = [0u64; MAX_ROWS];
                for (i, r) in rows.iter_mut().enumerate().take(m) {
                    *r = (data.lo >> (i * n)) & mask;
                }
                rank2(&mut rows[..m])
            }
            Prime::Three => {
                let mut rows = [Vector::ZERO; MAX_ROWS];
                for (i, r) in rows.iter_mut().enumerate().take(m) {
                    *r = data.shift_down(i * n).mask(mask);
                }
                rank3(&mut rows[..m])
            }
        }
    } else {
        let mat = MatrixGF::from_vector(p, m, n, data);
        mat.row_space().dim()
    }
}

#[inline]
pub(crate) fn rank2(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for r in 0..rows.len() {
        let x = rows[r];
        if x == 0 {
            continue;
        }
        rank += 1;
        let low = x & x.wrapping_neg();
        for s in rows.iter_mut().skip(r + 1) {
            if *s & low != 0 {
                *s ^= x;
            }
        }
    }
    rank
}

#[inline]
pub(crate) fn rank3(rows: &mut [Vector]) -> usize {
    let mut rank = 0;
    for r in 0..rows.len() {
        let x = rows[r];
        let s = x.support();
        if s == 0 {
            continue;
        }
        rank += 1;
        let low = s & s.wrapping_neg();
        // normalise so the pivot entry is 1
        let x = if x.lo & low != 0 { x } else { Vector { lo: x.hi, hi: x.lo } };
        for row in rows.iter_mut().skip(r + 1) {
            if row.lo & low != 0 {
                *row = sub3(*row, x);
            } else if row.hi & low != 0 {
                *row = add3(*row, x);
            }
        }
    }
    rank
}

fn charpoly_hessenberg(mat: &MatrixGF) -> Vec<u32> {
    let n = mat.rows();
    charpoly_array(mat)[..=n].iter().map(|&c| c as u32).collect()
}

/// Coefficients of the characteristic polynomial, low to high, in a fixed
/// array (square matrices have at most 8 rows).
fn charpoly_array(mat: &MatrixGF) -> [i32; 9] {
    let n = mat.rows();
    let pv = mat.prime().value() as i32;
    let md = |x: i32| x.rem_euclid(pv);
    // in F_2 and F_3 every nonzero element is its own inverse
    let inv = |x: i32| x;
    let mut h = [[0i32; 8]; 8];
    for (i, row) in h.iter_mut().enumerate().take(n) {
        for (j, e) in row.iter_mut().enumerate().take(n) {
            *e = mat.get(i, j) as i32;
        }
    }
    // reduce to upper Hessenberg form by similarity transforms
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| h[i][m - 1] != 0) else {
            continue;
        };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut().take(n) {
                row.swap(i, m);
            }
        }
        let t = inv(h[m][m - 1]);
        for i in m + 1..n {
            let u = md(h[i][m - 1] * t);
            if u != 0 {
                let pivot = h[m];
                for (e, &v) in h[i].iter_mut().zip(&pivot).take(n) {
                    *e = md(*e - u * v);
                }
                for row in h.iter_mut().take(n) {
                    row[m] = md(row[m] + u * row[i]);
                }
            }
        }
    }
    // characteristic polynomials of leading principal blocks
    let mut polys = [[0i32; 9]; 9];
    polys[0][0] = 1;
    for m in 1..=n {
        let mut next = [0i32; 9];
        for k in 0..m {
            let c = polys[m - 1][k];
            next[k + 1] = md(next[k + 1] + c);
            next[k] = md(next[k] - h[m - 1][m - 1] * c);
        }
        let mut tprod = 1i32;
        for i in 1..m {
            tprod = md(tprod * h[m - i][m - i - 1]);
            let coef = md(tprod * h[m - i - 1][m - 1]);
            if coef != 0 {
                for k in 0..=(m - i - 1) {
                    next[k] = md(next[k] - coef * polys[m - i - 1][k]);
                }
            }
        }
        polys[m] = next;
    }
    polys[n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_rank(mat: &MatrixGF) -> usize {
        // plain Gaussian elimination on digit arrays
        let p = mat.prime().value();
        let (m, n) = mat.shape();
        let mut a: Vec<Vec<u32>> = (0..m).map(|i| (0..n).map(|j| mat.get(i, j)).collect()).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..m).find(|&r| a[r][col] != 0) else { continue };
            a.swap(rank, piv);
            // nonzero elements of F_2 and F_3 are self-inverse
            let inv = a[rank][col];
            for e in a[rank].iter_mut() {
                *e = *e * inv % p;
            }
            let pivot = a[rank].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != rank && row[col] != 0 {
                    let c = row[col];
                    for (e, &v) in row.iter_mut().zip(&pivot) {
                        *e = (*e + p * p - c * v) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn lcg(seed: &mut u64) -> u64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *seed >> 11
    }

    fn random_matrix(p: Prime, m: usize, n: usize, seed: &mut u64) -> MatrixGF {
        let mut d = Vector::ZERO;
        for i in 0..m * n {
            d.set(i, (lcg(seed) % p.value() as u64) as u32);
        }
        MatrixGF::from_vector(p, m, n, d)
    }

    #[test]
    fn rank_trivial_cases() {
        assert_eq!(MatrixGF::identity(Prime::Two, 4).rank(), 4);
        assert_eq!(MatrixGF::zero(Prime::Three, 3, 4).rank(), 0);
    }

    #[test]
    fn rank_matches_naive_elimination() {
        let mut seed = 7;
        for p in [Prime::Two, Prime::Three] {
            for _ in 0..10_000 {
                let m = random_matrix(p, 5, 5, &mut seed);
                assert_eq!(m.rank(), naive_rank(&m), "{m:?}");
                assert_eq!(m.rank(), m.transpose().rank());
                assert_eq!(m.rank() + m.kernel().dim(), 5);
            }
        }
    }

    #[test]
    fn kernel_cases() {
        let p = Prime::Two;
        assert_eq!(MatrixGF::identity(p, 4).kernel().dim(), 0);
        assert_eq!(MatrixGF::zero(p, 4, 4).kernel().dim(), 4);
        let m = MatrixGF::from_digit_rows(
            p,
            &[vec![1, 0, 0, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1], vec![1, 1, 1, 1]],
        );
        assert_eq!(m.rank(), 3);
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        assert!(m.apply(k.basis()[0]).is_zero());
    }

    #[test]
    fn rref_idempotent_and_rank_preserving() {
        let mut seed = 99;
        for p in [Prime::Two, Prime::Three] {
            for _ in 0..500 {
                let m = random_matrix(p, 4, 6, &mut seed);
                let (r, piv) = m.rref();
                assert_eq!(r.rank(), m.rank());
                assert_eq!(piv.len(), m.rank());
                assert_eq!(r.rref().0, r);
            }
        }
        let p = Prime::Two;
        let perm = MatrixGF::from_digit_rows(p, &[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert_eq!(perm.rref().0, MatrixGF::identity(p, 3));
    }

    #[test]
    fn inverse_round_trip() {
        let mut seed = 3;
        for p in [Prime::Two, Prime::Three] {
            let mut found = 0;
            while found < 200 {
                let m = random_matrix(p, 4, 4, &mut seed);
                match m.inverse() {
                    Some(inv) => {
                        found += 1;
                        assert_eq!(m.mul(&inv), MatrixGF::identity(p, 4));
                    }
                    None => assert!(m.rank() < 4),
                }
            }
        }
    }

    #[test]
    fn charpoly_agrees_with_determinant_evaluation() {
        // det(cI - M) computed by elimination equals charpoly(c) for all c in F_p
        let mut seed = 11;
        for p in [Prime::Two, Prime::Three] {
            let pv = p.value();
            for _ in 0..300 {
                let m = random_matrix(p, 4, 4, &mut seed);
                let cp = m.charpoly();
                assert_eq!(cp.len(), 5);
                assert_eq!(cp[4], 1);
                for c in 0..pv {
                    let val = cp.iter().rev().fold(0, |acc, &k| (acc * c + k) % pv);
                    let shifted = MatrixGF::scalar(p, 4, c).sub(&m);
                    assert_eq!(val == 0, shifted.rank() < 4);
                }
                // trace coefficient
                let tr: u32 = (0..4).map(|i| m.get(i, i)).sum::<u32>() % pv;
                assert_eq!((cp[3] + tr) % pv, 0);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let m = MatrixGF::from_digit_rows(Prime::Three, &[vec![0, 1, 2], vec![2, 2, 0]]);
        assert_eq!(m.to_text(), "012\n220\n");
        assert_eq!(MatrixGF::parse_text(Prime::Three, &m.to_text()).unwrap(), m);
        assert!(MatrixGF::parse_text(Prime::Two, "012\n").is_err());
    }
}
