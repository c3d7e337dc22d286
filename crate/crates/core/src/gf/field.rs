use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::matrix::MatrixGF;
use super::subspace::Subspace;
use super::vector::{low_mask, Prime, Vector};
use crate::error::{Error, Result};

/// Conway polynomials, coefficients from the constant term upwards, leading 1 omitted.
fn conway(p: Prime, n: usize) -> Option<&'static [u32]> {
    let c: &'static [u32] = match (p, n) {
        (Prime::Two, 1) => &[1],
        (Prime::Two, 2) => &[1, 1],
        (Prime::Two, 3) => &[1, 1, 0],
        (Prime::Two, 4) => &[1, 1, 0, 0],
        (Prime::Two, 5) => &[1, 0, 1, 0, 0],
        (Prime::Two, 6) => &[1, 1, 0, 1, 1, 0],
        (Prime::Two, 7) => &[1, 1, 0, 0, 0, 0, 0],
        (Prime::Two, 8) => &[1, 0, 1, 1, 1, 0, 0, 0],
        (Prime::Two, 9) => &[1, 0, 0, 0, 1, 0, 0, 0, 0],
        (Prime::Two, 10) => &[1, 1, 1, 1, 0, 1, 1, 0, 0, 0],
        (Prime::Two, 11) => &[1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        (Prime::Two, 12) => &[1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0],
        (Prime::Three, 1) => &[1],
        (Prime::Three, 2) => &[2, 2],
        (Prime::Three, 3) => &[1, 2, 0],
        (Prime::Three, 4) => &[2, 0, 0, 2],
        (Prime::Three, 5) => &[1, 2, 0, 0, 0],
        (Prime::Three, 6) => &[2, 2, 1, 0, 2, 0],
        (Prime::Three, 7) => &[1, 0, 2, 0, 0, 0, 0],
        (Prime::Three, 8) => &[2, 2, 2, 0, 1, 2, 0, 0],
        _ => return None,
    };
    Some(c)
}

/// An element of F_{p^n}: coefficients in the polynomial basis `1, x, ..., x^(n-1)`
/// modulo the Conway polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct FieldElement(pub Vector);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(Vector::ZERO);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    /// Coefficient vector in the polynomial basis.
    #[inline]
    pub fn coords(self) -> Vector {
        self.0
    }
}

/// Arithmetic context for F_{p^n} with `p` in {2, 3}.
///
/// Multiplication goes through log/exp tables keyed by the packed coefficient
/// vector; the generator `x` is primitive because the defining polynomial is a
/// Conway polynomial.
#[derive(Debug)]
pub struct FieldCtx {
    p: Prime,
    n: usize,
    modulus: Vec<u32>,
    order: u64,
    exp: Vec<FieldElement>,
    log: Vec<u32>,
}

const NO_LOG: u32 = u32::MAX;

impl FieldCtx {
    pub fn new(p: Prime, n: usize) -> Result<Arc<FieldCtx>> {
        let tail = conway(p, n).ok_or(Error::UnsupportedField { p: p.value(), n })?;
        let order = p.powers(n as u32);
        let mut modulus = tail.to_vec();
        modulus.push(1);
        let mut ctx = FieldCtx {
            p,
            n,
            modulus,
            order,
            exp: Vec::with_capacity(order as usize - 1),
            log: vec![NO_LOG; key_space(p, n)],
        };
        let mut cur = FieldElement(Vector::ZERO.with(0, 1));
        for i in 0..order - 1 {
            let k = ctx.key(cur);
            if ctx.log[k] != NO_LOG {
                return Err(Error::Invariant(format!(
                    "defining polynomial for F_{}^{} is not primitive",
                    p.value(),
                    n
                )));
            }
            ctx.log[k] = i as u32;
            ctx.exp.push(cur);
            cur = ctx.mul_by_x(cur);
        }
        Ok(Arc::new(ctx))
    }

    #[inline]
    fn key(&self, a: FieldElement) -> usize {
        match self.p {
            Prime::Two => a.0.lo as usize,
            Prime::Three => (a.0.lo | (a.0.hi << self.n)) as usize,
        }
    }

    fn mul_by_x(&self, a: FieldElement) -> FieldElement {
        let p = self.p;
        let top = a.0.get(self.n - 1);
        let mut shifted = a.0.shift_up(1).mask(low_mask(self.n));
        if top != 0 {
            // x^n = -(c_0 + c_1 x + ... )
            let red = Vector::from_digits(&self.modulus[..self.n]);
            shifted = p.axpy(shifted, p.value() - top, red);
        }
        FieldElement(shifted)
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }
    /// Extension degree over the prime field.
    #[inline]
    pub fn degree(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }
    pub fn one(&self) -> FieldElement {
        FieldElement(Vector::ZERO.with(0, 1))
    }
    /// The primitive element `x`.
    pub fn generator(&self) -> FieldElement {
        self.exp[1 % self.exp.len()]
    }

    pub fn from_prime(&self, c: u32) -> FieldElement {
        FieldElement(Vector::ZERO.with(0, c % self.p.value()))
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElement> {
        if coords.len() > self.n || coords.iter().any(|&c| c >= self.p.value()) {
            return Err(Error::ContextMismatch(format!(
                "coefficients {coords:?} do not describe an element of F_{}^{}",
                self.p.value(),
                self.n
            )));
        }
        Ok(FieldElement(Vector::from_digits(coords)))
    }

    pub fn from_index(&self, idx: u64) -> FieldElement {
        FieldElement(Vector::from_index(self.p, self.n, idx))
    }

    pub fn index_of(&self, a: FieldElement) -> u64 {
        a.0.to_index(self.p, self.n)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(move |i| self.from_index(i))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.order).map(move |i| self.from_index(i))
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0.support() & !low_mask(self.n) == 0
    }

    pub fn check(&self, a: FieldElement) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!(
                "{a:?} is not an element of F_{}^{}",
                self.p.value(),
                self.n
            )))
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.p.add(a.0, b.0))
    }
    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.p.sub(a.0, b.0))
    }
    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.p.neg(a.0))
    }

    #[inline]
    pub fn log(&self, a: FieldElement) -> Option<u64> {
        if a.is_zero() {
            None
        } else {
            Some(self.log[self.key(a)] as u64)
        }
    }

    #[inline]
    pub fn exp(&self, e: u64) -> FieldElement {
        self.exp[(e % (self.order - 1)) as usize]
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match (self.log(a), self.log(b)) {
            (Some(x), Some(y)) => self.exp(x + y),
            _ => FieldElement::ZERO,
        }
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        self.log(a).map(|x| self.exp(self.order - 1 - x))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return self.one();
        }
        match self.log(a) {
            None => FieldElement::ZERO,
            Some(x) => self.exp(((x as u128 * e as u128) % (self.order as u128 - 1)) as u64),
        }
    }

    /// `a^(p^s)`; `s` is reduced modulo the degree.
    pub fn frobenius(&self, a: FieldElement, s: u64) -> FieldElement {
        let s = s % self.n as u64;
        self.pow(a, self.p.powers(s as u32))
    }

    /// Norm to the prime field, `a^((p^n - 1)/(p - 1))`, as a value in `0..p`.
    pub fn field_norm(&self, a: FieldElement) -> Result<u32> {
        self.check(a)?;
        let e = (self.order - 1) / (self.p.value() as u64 - 1);
        let v = self.pow(a, e);
        debug_assert!(v.0.support() & !1 == 0, "norm must land in the prime field");
        Ok(v.0.get(0))
    }

    /// Norm to F_p. The base field of every context is the prime field, so this
    /// agrees with [`FieldCtx::field_norm`].
    pub fn norm_to_prime(&self, a: FieldElement) -> Result<u32> {
        self.field_norm(a)
    }

    /// Whether a prime-field value is a nonzero square.
    pub fn is_prime_square(&self, c: u32) -> bool {
        match self.p {
            Prime::Two => c % 2 == 1,
            Prime::Three => c % 3 == 1,
        }
    }

    /// The subfield of order `p^d` (`d` must divide the degree).
    pub fn subfield(&self, d: usize) -> Result<Subspace> {
        if d == 0 || !self.n.is_multiple_of(d) {
            return Err(Error::InvalidParameters(format!("{d} does not divide {}", self.n)));
        }
        let step = (self.order - 1) / (self.p.powers(d as u32) - 1);
        let gen = self.exp(step);
        let mut s = Subspace::zero(self.p, self.n);
        let mut cur = self.one();
        for _ in 0..d {
            s.insert(cur.0);
            cur = self.mul(cur, gen);
        }
        Ok(s)
    }

    /// Matrix of the F_p-linear map `x -> f(x)` in the given basis, with the
    /// convention that row `i` holds the coordinates of `f(basis[i])`.
    pub fn linear_map_to_matrix<F>(&self, f: F, basis: &[FieldElement]) -> Result<MatrixGF>
    where
        F: Fn(FieldElement) -> FieldElement,
    {
        let coords = CoordinateSystem::new(self, basis)?;
        let rows: Vec<Vector> = basis.iter().map(|&b| coords.coords(f(b))).collect();
        Ok(MatrixGF::from_rows(self.p, self.n, &rows))
    }

    pub fn polynomial_basis(&self) -> Vec<FieldElement> {
        (0..self.n).map(|i| FieldElement(Vector::ZERO.with(i, 1))).collect()
    }
}

fn key_space(p: Prime, n: usize) -> usize {
    match p {
        Prime::Two => 1 << n,
        Prime::Three => 1 << (2 * n),
    }
}

/// Coordinates of field elements with respect to an arbitrary F_p-basis.
pub struct CoordinateSystem {
    p: Prime,
    n: usize,
    // rows: polynomial-basis coordinates of the inverse change of basis
    to_basis: MatrixGF,
    identity: bool,
}

impl CoordinateSystem {
    pub fn new(ctx: &FieldCtx, basis: &[FieldElement]) -> Result<CoordinateSystem> {
        let n = ctx.degree();
        if basis.len() != n {
            return Err(Error::InvalidParameters(format!(
                "basis has {} elements, need {n}",
                basis.len()
            )));
        }
        let rows: Vec<Vector> = basis.iter().map(|b| b.0).collect();
        let change = MatrixGF::from_rows(ctx.prime(), n, &rows);
        let to_basis = change
            .inverse()
            .ok_or_else(|| Error::InvalidParameters("basis is not linearly independent".into()))?;
        let identity = change == MatrixGF::identity(ctx.prime(), n);
        Ok(CoordinateSystem { p: ctx.prime(), n, to_basis, identity })
    }

    /// Row vector `c` with `a = sum c_i basis[i]`.
    pub fn coords(&self, a: FieldElement) -> Vector {
        if self.identity {
            a.0
        } else {
            self.to_basis.left_apply(a.0).mask(low_mask(self.n))
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_supported_context_builds() {
        for n in 1..=12 {
            let f = FieldCtx::new(Prime::Two, n).unwrap();
            assert_eq!(f.exp.len() as u64, f.order() - 1);
        }
        for n in 1..=8 {
            FieldCtx::new(Prime::Three, n).unwrap();
        }
    }

    #[test]
    fn inverses_round_trip_exhaustively() {
        for (p, n) in [(Prime::Two, 4), (Prime::Two, 6), (Prime::Three, 4)] {
            let f = FieldCtx::new(p, n).unwrap();
            for a in f.nonzero_elements() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        let f = FieldCtx::new(Prime::Three, 2).unwrap();
        let all: Vec<_> = f.elements().collect();
        for &a in &all {
            for &b in &all {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &all {
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn norm_basics() {
        let f = FieldCtx::new(Prime::Three, 4).unwrap();
        assert_eq!(f.field_norm(f.one()).unwrap(), 1);
        assert_eq!(f.field_norm(f.zero()).unwrap(), 0);
        let mut counts = [0; 3];
        for a in f.nonzero_elements() {
            counts[f.field_norm(a).unwrap() as usize] += 1;
        }
        assert_eq!(counts, [0, 40, 40]);
        for a in f.elements() {
            for b in f.elements() {
                let lhs = f.field_norm(f.mul(a, b)).unwrap();
                let rhs = f.field_norm(a).unwrap() * f.field_norm(b).unwrap() % 3;
                assert_eq!(lhs, rhs);
            }
        }
        // the norm to F_3 equals the product of the Galois conjugates
        for a in f.elements() {
            let prod = (0..4).fold(f.one(), |acc, s| f.mul(acc, f.frobenius(a, s)));
            assert_eq!(prod.0.get(0), f.norm_to_prime(a).unwrap());
            assert_eq!(prod.0.support() & !1, 0);
        }
        let g = FieldCtx::new(Prime::Two, 5).unwrap();
        for a in g.nonzero_elements() {
            assert_eq!(g.norm_to_prime(a).unwrap(), 1);
        }
        assert!(f.field_norm(FieldElement(Vector::ZERO.with(7, 1))).is_err());
    }

    #[test]
    fn frobenius_properties() {
        let f = FieldCtx::new(Prime::Two, 6).unwrap();
        let mut seed = 5u64;
        for a in f.elements() {
            assert_eq!(f.frobenius(a, 0), a);
            assert_eq!(f.frobenius(a, 6), a);
        }
        for _ in 0..1000 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let a = f.from_index((seed >> 20) % 64);
            let b = f.from_index((seed >> 40) % 64);
            for s in 0..6 {
                assert_eq!(f.frobenius(f.add(a, b), s), f.add(f.frobenius(a, s), f.frobenius(b, s)));
                assert_eq!(f.frobenius(f.mul(a, b), s), f.mul(f.frobenius(a, s), f.frobenius(b, s)));
            }
        }
    }

    #[test]
    fn linear_maps_to_matrices() {
        let f = FieldCtx::new(Prime::Two, 4).unwrap();
        let basis = f.polynomial_basis();
        let id = f.linear_map_to_matrix(|x| x, &basis).unwrap();
        assert_eq!(id, MatrixGF::identity(Prime::Two, 4));
        let frob = f.linear_map_to_matrix(|x| f.frobenius(x, 1), &basis).unwrap();
        assert_eq!(frob.pow(4), MatrixGF::identity(Prime::Two, 4));
        let shifted = frob.sub(&MatrixGF::identity(Prime::Two, 4));
        assert_eq!(shifted.rank(), 3);

        let g = FieldCtx::new(Prime::Three, 3).unwrap();
        let b3 = g.polynomial_basis();
        let two = g.linear_map_to_matrix(|x| g.mul(g.from_prime(2), x), &b3).unwrap();
        assert_eq!(two, MatrixGF::scalar(Prime::Three, 3, 2));

        let dependent = vec![f.one(), f.one(), f.generator(), f.exp(2)];
        assert!(f.linear_map_to_matrix(|x| x, &dependent).is_err());
    }

    #[test]
    fn matrices_respect_a_non_standard_basis() {
        let f = FieldCtx::new(Prime::Three, 3).unwrap();
        let basis = vec![f.exp(5), f.exp(11), f.exp(17)];
        let coords = CoordinateSystem::new(&f, &basis).unwrap();
        let a = f.exp(7);
        let m = f.linear_map_to_matrix(|x| f.mul(a, x), &basis).unwrap();
        for x in f.elements() {
            let cx = coords.coords(x);
            assert_eq!(m.left_apply(cx), coords.coords(f.mul(a, x)));
        }
    }

    #[test]
    fn subfields() {
        let f = FieldCtx::new(Prime::Three, 4).unwrap();
        let sub = f.subfield(2).unwrap();
        assert_eq!(sub.dim(), 2);
        for v in sub.elements() {
            let a = FieldElement(v);
            assert_eq!(f.frobenius(a, 2), a);
        }
    }
}
