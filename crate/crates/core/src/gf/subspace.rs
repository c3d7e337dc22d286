use serde::{Deserialize, Serialize};

use super::vector::{low_mask, Prime, Vector};

/// A subspace of F_p^N held as a reduced row-echelon basis.
///
/// The pivot of a basis vector is its first nonzero coordinate. Pivots are
/// strictly increasing, each pivot entry is 1, and every other basis vector is
/// zero at that coordinate, so the basis is unique for the subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    p: Prime,
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: Prime, ambient: usize) -> Subspace {
        assert!(ambient <= 64);
        Subspace { p, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: Prime, ambient: usize) -> Subspace {
        let mut s = Subspace::zero(p, ambient);
        for i in 0..ambient {
            s.basis.push(Vector::ZERO.with(i, 1));
            s.pivots.push(i);
        }
        s
    }

    pub fn span<I: IntoIterator<Item = Vector>>(p: Prime, ambient: usize, vectors: I) -> Subspace {
        let mut s = Subspace::zero(p, ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    #[inline]
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after elimination against the basis. Zero iff `v` is a member.
    #[inline]
    pub fn reduce(&self, mut v: Vector) -> Vector {
        let p = self.p;
        for (b, &piv) in self.basis.iter().zip(&self.pivots) {
            let c = v.get(piv);
            if c != 0 {
                v = p.axpy(v, p.value() - c, *b);
            }
        }
        v
    }

    #[inline]
    pub fn contains(&self, v: Vector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span, keeping the basis reduced. Returns false if `v` was already a member.
    pub fn insert(&mut self, v: Vector) -> bool {
        debug_assert!(v.support() & !low_mask(self.ambient) == 0);
        let p = self.p;
        let mut r = self.reduce(v);
        let Some(piv) = r.leading() else {
            return false;
        };
        // normalise the pivot entry to 1
        r = p.scale(p.inv_scalar(r.get(piv)), r);
        for b in self.basis.iter_mut() {
            let c = b.get(piv);
            if c != 0 {
                *b = p.axpy(*b, p.value() - c, r);
            }
        }
        let pos = self.pivots.partition_point(|&x| x < piv);
        self.pivots.insert(pos, piv);
        self.basis.insert(pos, r);
        true
    }

    /// Coordinates of a member `v` with respect to the basis.
    pub fn coordinates(&self, v: Vector) -> Option<Vec<u32>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&piv| v.get(piv)).collect())
    }

    /// Linear combination of the basis with the given coefficients.
    pub fn combine(&self, coeffs: &[u32]) -> Vector {
        let p = self.p;
        coeffs
            .iter()
            .zip(&self.basis)
            .fold(Vector::ZERO, |acc, (&c, &b)| p.axpy(acc, c, b))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|&b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for &b in &other.basis {
            s.insert(b);
        }
        s
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // Zassenhaus: echelonise [u | u] and [w | 0] in doubled coordinates.
        let n = self.ambient;
        assert!(2 * n <= 64, "intersection needs 2N <= 64");
        let mut big = Subspace::zero(self.p, 2 * n);
        for &u in &self.basis {
            big.insert(u.or(u.shift_up(n)));
        }
        for &w in &other.basis {
            big.insert(w);
        }
        let mask = low_mask(n);
        let vecs = big
            .basis
            .iter()
            .filter(|b| b.mask(mask).is_zero())
            .map(|b| b.shift_down(n));
        Subspace::span(self.p, n, vecs)
    }

    /// `{ x : <x, b> = 0 for all b in basis }` under the standard dot product.
    pub fn orthogonal_complement(&self) -> Subspace {
        let p = self.p;
        let n = self.ambient;
        let free: Vec<usize> = (0..n).filter(|i| !self.pivots.contains(i)).collect();
        let mut out = Subspace::zero(p, n);
        for &f in &free {
            // x_f = 1, other free coords 0, pivot coords forced
            let mut x = Vector::ZERO.with(f, 1);
            for (b, &piv) in self.basis.iter().zip(&self.pivots) {
                let c = b.get(f);
                if c != 0 {
                    x.set(piv, (p.value() - c) % p.value());
                }
            }
            out.insert(x);
        }
        out
    }

    /// Every element of the subspace, in a fixed order starting with zero.
    pub fn elements(&self) -> Vec<Vector> {
        let p = self.p;
        let mut out = vec![Vector::ZERO];
        for &b in &self.basis {
            let len = out.len();
            for c in 1..p.value() {
                for i in 0..len {
                    let v = p.axpy(out[i], c, b);
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn cardinality(&self) -> u64 {
        self.p.powers(self.dim() as u32)
    }

    /// `{ v in self : f(v) = 0 }` for an F_p-linear `f` with `out_dim` output
    /// coordinates. Needs `out_dim + dim <= 64`.
    pub fn restrict<F: Fn(Vector) -> Vector>(&self, out_dim: usize, f: F) -> Subspace {
        let k = self.dim();
        assert!(out_dim + k <= 64, "restriction needs out_dim + dim <= 64");
        let mut aug = Subspace::zero(self.p, out_dim + k);
        for (i, &b) in self.basis.iter().enumerate() {
            aug.insert(f(b).or(Vector::ZERO.with(out_dim + i, 1)));
        }
        let mask = low_mask(out_dim);
        let kept = aug
            .basis
            .iter()
            .filter(|v| v.mask(mask).is_zero())
            .map(|v| self.combine(&v.shift_down(out_dim).digits(k)));
        Subspace::span(self.p, self.ambient, kept)
    }
}
