//! Two-dimensional starting codes `<I, Y>` with every nonzero member invertible.
//!
//! Such a code is determined up to equivalence by the similarity class of `Y`,
//! so one rational canonical form per class suffices. `Y + cI` is invertible
//! for every `c` exactly when the characteristic polynomial has no root.

use crate::codes::AdditiveCode;
use crate::gf::{MatrixGF, Prime};

type Poly = Vec<u32>;

fn trim(mut f: Poly) -> Poly {
    while f.len() > 1 && *f.last().unwrap() == 0 {
        f.pop();
    }
    f
}

fn monic_polys(p: Prime, deg: usize) -> Vec<Poly> {
    let q = p.value();
    let count = q.pow(deg as u32);
    (0..count)
        .map(|mut idx| {
            let mut f = Vec::with_capacity(deg + 1);
            for _ in 0..deg {
                f.push(idx % q);
                idx /= q;
            }
            f.push(1);
            f
        })
        .collect()
}

fn has_root(p: Prime, f: &Poly) -> bool {
    let q = p.value();
    (0..q).any(|a| f.iter().rev().fold(0, |acc, &c| (acc * a + c) % q) == 0)
}

/// Remainder of `g` divided by the monic `f`.
fn rem(p: Prime, g: &Poly, f: &Poly) -> Poly {
    let q = p.value();
    let mut r = g.clone();
    let df = f.len() - 1;
    while r.len() > df && r.len() > 1 {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        for (i, &c) in f.iter().enumerate() {
            r[shift + i] = (r[shift + i] + q * q - lead * c % q) % q;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn divides(p: Prime, f: &Poly, g: &Poly) -> bool {
    rem(p, g, f).iter().all(|&c| c == 0)
}

fn companion(p: Prime, f: &Poly) -> MatrixGF {
    let q = p.value();
    let n = f.len() - 1;
    let mut rows = vec![vec![0u32; n]; n];
    for (i, row) in rows.iter_mut().enumerate().take(n - 1) {
        row[i + 1] = 1;
    }
    for j in 0..n {
        rows[n - 1][j] = (q - f[j]) % q;
    }
    MatrixGF::from_digit_rows(p, &rows)
}

fn block_diagonal(p: Prime, blocks: &[MatrixGF]) -> MatrixGF {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut rows = vec![vec![0u32; n]; n];
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                rows[off + i][off + j] = b.get(i, j);
            }
        }
        off += b.rows();
    }
    MatrixGF::from_digit_rows(p, &rows)
}

/// Invariant factor chains `f_1 | ... | f_r` of total degree `n` whose
/// polynomials have no root in the prime field.
fn root_free_chains(p: Prime, n: usize) -> Vec<Vec<Poly>> {
    fn rec(p: Prime, left: usize, above: Option<&Poly>, acc: &mut Vec<Poly>, out: &mut Vec<Vec<Poly>>) {
        if left == 0 {
            let mut chain = acc.clone();
            chain.reverse();
            out.push(chain);
            return;
        }
        let max = above.map_or(left, |f| (f.len() - 1).min(left));
        for deg in 2..=max {
            for f in monic_polys(p, deg) {
                let ok = match above {
                    Some(g) => divides(p, &f, g),
                    None => !has_root(p, &f),
                };
                if ok {
                    acc.push(f.clone());
                    rec(p, left - deg, Some(&f), acc, out);
                    acc.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(p, n, None, &mut Vec::new(), &mut out);
    out
}

/// One `Y` per similarity class of `n x n` matrices without eigenvalues in F_p.
pub fn eigenvalue_free_classes(p: Prime, n: usize) -> Vec<MatrixGF> {
    root_free_chains(p, n)
        .iter()
        .map(|chain| {
            let blocks: Vec<MatrixGF> = chain.iter().map(|f| companion(p, f)).collect();
            block_diagonal(p, &blocks)
        })
        .collect()
}

/// The codes `<I, Y>` for every eigenvalue-free class `Y`.
pub fn pencil_seeds(p: Prime, n: usize) -> Vec<AdditiveCode> {
    let id = MatrixGF::identity(p, n);
    eigenvalue_free_classes(p, n)
        .into_iter()
        .map(|y| AdditiveCode::from_basis(&[id, y]).expect("same shape"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Brute force count of similarity classes via orbit enumeration.
    fn brute_classes(p: Prime, n: usize) -> usize {
        let total = p.powers((n * n) as u32);
        let all: Vec<MatrixGF> = (0..total)
            .map(|i| MatrixGF::from_vector(p, n, n, crate::gf::Vector::from_index(p, n * n, i)))
            .collect();
        let gl: Vec<MatrixGF> = all.iter().copied().filter(|a| a.is_invertible()).collect();
        let free: Vec<MatrixGF> = all
            .into_iter()
            .filter(|y| (0..p.value()).all(|c| y.sub(&MatrixGF::scalar(p, n, c)).is_invertible()))
            .collect();
        let mut seen = HashSet::new();
        let mut classes = 0;
        for y in free {
            if seen.contains(&y.vector()) {
                continue;
            }
            classes += 1;
            for a in &gl {
                seen.insert(a.mul(&y).mul(&a.inverse().unwrap()).vector());
            }
        }
        classes
    }

    #[test]
    fn class_counts_match_orbit_enumeration() {
        for (p, n) in [(Prime::Two, 2), (Prime::Two, 3), (Prime::Three, 2), (Prime::Two, 4)] {
            let reps = eigenvalue_free_classes(p, n);
            assert_eq!(reps.len(), brute_classes(p, n), "p={p:?} n={n}");
        }
    }

    #[test]
    fn pencils_are_spread_like() {
        for c in pencil_seeds(Prime::Three, 3) {
            assert_eq!(c.minimum_distance().unwrap(), 3);
        }
    }
}
