//! Known additive MRD families and presemifield spread sets.
//!
//! Every code lives in `End_{F_p}(F_{p^n})`, written as `n x n` matrices in the
//! polynomial basis of the Conway field with the row convention: row `i` of the
//! matrix of `f` holds the coordinates of `f(x^i)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codes::AdditiveCode;
use crate::error::{Error, Result};
use crate::gf::{CoordinateSystem, FieldCtx, FieldElement, MatrixGF, Prime, Vector};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `x -> sum_i c_i x^(p^(s i))` over F_{p^n}.
#[derive(Clone)]
pub struct LinearizedPoly {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<FieldElement>,
    stride: usize,
}

impl LinearizedPoly {
    pub fn new(ctx: Arc<FieldCtx>, coeffs: Vec<FieldElement>, stride: usize) -> Result<LinearizedPoly> {
        let n = ctx.degree();
        if coeffs.len() > n {
            return Err(Error::InvalidParameters(format!("{} coefficients exceed degree {n}", coeffs.len())));
        }
        if gcd(stride, n) != 1 {
            return Err(Error::InvalidParameters(format!("stride {stride} is not coprime to {n}")));
        }
        for &c in &coeffs {
            ctx.check(c)?;
        }
        Ok(LinearizedPoly { ctx, coeffs, stride })
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let f = &self.ctx;
        self.coeffs.iter().enumerate().fold(FieldElement::ZERO, |acc, (i, &c)| {
            let xi = f.frobenius(x, (self.stride * i) as u64);
            f.add(acc, f.mul(c, xi))
        })
    }

    pub fn add(&self, other: &LinearizedPoly) -> Result<LinearizedPoly> {
        if self.stride != other.stride {
            return Err(Error::InvalidParameters("strides differ".into()));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[FieldElement], i: usize| v.get(i).copied().unwrap_or(FieldElement::ZERO);
        let coeffs = (0..len)
            .map(|i| self.ctx.add(get(&self.coeffs, i), get(&other.coeffs, i)))
            .collect();
        LinearizedPoly::new(self.ctx.clone(), coeffs, self.stride)
    }

    pub fn to_matrix(&self, basis: &[FieldElement]) -> Result<MatrixGF> {
        self.ctx.linear_map_to_matrix(|x| self.eval(x), basis)
    }
}

/// An F_p-linear map on F_{p^n}, held as its matrix in the polynomial basis.
#[derive(Clone)]
pub struct AdditiveMap {
    ctx: Arc<FieldCtx>,
    matrix: MatrixGF,
}

impl AdditiveMap {
    pub fn from_fn<F: Fn(FieldElement) -> FieldElement>(ctx: &Arc<FieldCtx>, f: F) -> AdditiveMap {
        let basis = ctx.polynomial_basis();
        let matrix = ctx.linear_map_to_matrix(f, &basis).expect("polynomial basis");
        AdditiveMap { ctx: ctx.clone(), matrix }
    }

    pub fn identity(ctx: &Arc<FieldCtx>) -> AdditiveMap {
        AdditiveMap::from_fn(ctx, |a| a)
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> AdditiveMap {
        AdditiveMap::from_fn(ctx, |_| FieldElement::ZERO)
    }

    /// `a -> eta * a^(p^h)`.
    pub fn scaled_frobenius(ctx: &Arc<FieldCtx>, eta: FieldElement, h: usize) -> AdditiveMap {
        AdditiveMap::from_fn(ctx, |a| ctx.mul(eta, ctx.frobenius(a, h as u64)))
    }

    pub fn from_linearized(poly: &LinearizedPoly) -> AdditiveMap {
        AdditiveMap::from_fn(&poly.ctx, |a| poly.eval(a))
    }

    #[inline]
    pub fn apply(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.matrix.left_apply(a.0))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn matrix(&self) -> &MatrixGF {
        &self.matrix
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }
}

/// Result of checking `N(phi1(a)) != (-1)^(nk) N(phi2(a))` for all nonzero `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormCheck {
    pub holds: bool,
    pub witness: Option<FieldElement>,
}

pub fn check_norm_condition(ctx: &FieldCtx, k: usize, phi1: &AdditiveMap, phi2: &AdditiveMap) -> NormCheck {
    let pv = ctx.prime().value();
    let sign = if (ctx.degree() * k).is_multiple_of(2) { 1 } else { pv - 1 };
    for a in ctx.nonzero_elements() {
        let lhs = ctx.field_norm(phi1.apply(a)).expect("in field");
        let rhs = sign * ctx.field_norm(phi2.apply(a)).expect("in field") % pv;
        if lhs == rhs {
            return NormCheck { holds: false, witness: Some(a) };
        }
    }
    NormCheck { holds: true, witness: None }
}

/// `{ x -> phi1(a) x + sum_{i=1}^{k-1} f_i x^(sigma^i) + phi2(a) x^(sigma^k) }` with
/// `sigma = p^s`. The code has dimension `n k` over F_p.
pub fn h_k_code(
    ctx: &Arc<FieldCtx>,
    k: usize,
    s: usize,
    phi1: &AdditiveMap,
    phi2: &AdditiveMap,
) -> Result<AdditiveCode> {
    let n = ctx.degree();
    if k < 1 || k >= n {
        return Err(Error::InvalidParameters(format!("need 1 <= k <= n - 1, got k = {k}, n = {n}")));
    }
    if gcd(s, n) != 1 {
        return Err(Error::InvalidParameters(format!("s = {s} is not coprime to n = {n}")));
    }
    if phi1.is_zero() && phi2.is_zero() {
        return Err(Error::InvalidParameters("phi1 = phi2 = 0 is degenerate".into()));
    }
    let basis = ctx.polynomial_basis();
    let sig = |x: FieldElement, i: usize| ctx.frobenius(x, (s * i) as u64);
    let mut mats = Vec::with_capacity(n * k);
    for &b in &basis {
        let (c0, ck) = (phi1.apply(b), phi2.apply(b));
        mats.push(ctx.linear_map_to_matrix(|x| ctx.add(ctx.mul(c0, x), ctx.mul(ck, sig(x, k))), &basis)?);
    }
    for i in 1..k {
        for &b in &basis {
            mats.push(ctx.linear_map_to_matrix(|x| ctx.mul(b, sig(x, i)), &basis)?);
        }
    }
    let code = AdditiveCode::from_basis(&mats)?;
    if code.dim() != n * k {
        return Err(Error::InvalidParameters(format!(
            "phi-images are dependent: dimension {} instead of {}",
            code.dim(),
            n * k
        )));
    }
    Ok(code)
}

/// Delsarte-Gabidulin code (generalised when `s > 1`), minimum distance `n - k + 1`.
pub fn delsarte_gabidulin(p: Prime, n: usize, k: usize, s: usize) -> Result<AdditiveCode> {
    let ctx = FieldCtx::new(p, n)?;
    h_k_code(&ctx, k, s, &AdditiveMap::identity(&ctx), &AdditiveMap::zero(&ctx))
}

/// Twisted Gabidulin code with `phi2(a) = eta a^(p^h)`.
pub fn twisted_gabidulin(
    p: Prime,
    n: usize,
    k: usize,
    s: usize,
    eta: FieldElement,
    h: usize,
) -> Result<AdditiveCode> {
    let ctx = FieldCtx::new(p, n)?;
    ctx.check(eta)?;
    let phi1 = AdditiveMap::identity(&ctx);
    let phi2 = AdditiveMap::scaled_frobenius(&ctx, eta, h);
    if !check_norm_condition(&ctx, k, &phi1, &phi2).holds {
        return Err(Error::NormCondition);
    }
    h_k_code(&ctx, k, s, &phi1, &phi2)
}

/// Projections `a -> a_0` and `a -> a_1` for `a = a_0 + a_1 w` with `a_0, a_1` in
/// the index-2 subfield.
pub fn subfield_split(ctx: &Arc<FieldCtx>, w: FieldElement) -> Result<(AdditiveMap, AdditiveMap)> {
    let n = ctx.degree();
    let sub = ctx.subfield(n / 2)?;
    let sub_basis: Vec<FieldElement> = sub.basis().iter().map(|&v| FieldElement(v)).collect();
    let mut basis = sub_basis.clone();
    basis.extend(sub_basis.iter().map(|&b| ctx.mul(b, w)));
    let coords = CoordinateSystem::new(ctx, &basis)
        .map_err(|_| Error::InvalidParameters("w lies in the index-2 subfield".into()))?;
    let half = n / 2;
    let project = |a: FieldElement, second: bool| {
        let c = coords.coords(a);
        let range = if second { half..n } else { 0..half };
        range.fold(FieldElement::ZERO, |acc, i| {
            let t = c.get(i);
            if t == 0 {
                acc
            } else {
                ctx.add(acc, FieldElement(ctx.prime().scale(t, sub_basis[i % half].0)))
            }
        })
    };
    Ok((AdditiveMap::from_fn(ctx, |a| project(a, false)), AdditiveMap::from_fn(ctx, |a| project(a, true))))
}

/// Trombetti-Zhou code `phi1(a) = a_0`, `phi2(a) = eta a_1`, splitting over the
/// index-2 subfield along the field generator.
pub fn trombetti_zhou(p: Prime, n: usize, k: usize, s: usize, eta: FieldElement) -> Result<AdditiveCode> {
    let ctx = FieldCtx::new(p, n)?;
    let w = ctx.generator();
    trombetti_zhou_with_split(&ctx, k, s, eta, w)
}

pub fn trombetti_zhou_with_split(
    ctx: &Arc<FieldCtx>,
    k: usize,
    s: usize,
    eta: FieldElement,
    w: FieldElement,
) -> Result<AdditiveCode> {
    let n = ctx.degree();
    if ctx.prime() == Prime::Two {
        return Err(Error::InvalidParameters("Trombetti-Zhou codes need odd characteristic".into()));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!("Trombetti-Zhou codes need even n, got {n}")));
    }
    ctx.check(eta)?;
    let norm = ctx.field_norm(eta)?;
    if norm == 0 || ctx.is_prime_square(norm) {
        return Err(Error::InvalidParameters("N(eta) must be a nonsquare".into()));
    }
    let (a0, a1) = subfield_split(ctx, w)?;
    let phi2 = AdditiveMap::from_fn(ctx, |a| ctx.mul(eta, a1.apply(a)));
    if !check_norm_condition(ctx, k, &a0, &phi2).holds {
        return Err(Error::NormCondition);
    }
    h_k_code(ctx, k, s, &a0, &phi2)
}

/// A presemifield on F_p^n given by its right multiplications: `x o e_j = x R_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presemifield {
    pub name: String,
    pub provenance: String,
    right_mults: Vec<MatrixGF>,
    #[serde(skip)]
    spread: Option<AdditiveCode>,
}

impl Presemifield {
    /// Builds from the right-multiplication matrices, validating that every
    /// nonzero combination is invertible.
    pub fn from_right_mults(name: &str, provenance: &str, right_mults: Vec<MatrixGF>) -> Result<Presemifield> {
        let n = right_mults.len();
        if n == 0 || right_mults.iter().any(|r| r.shape() != (n, n)) {
            return Err(Error::NotSpreadSet(format!("{name}: need n matrices of size n x n")));
        }
        let spread = AdditiveCode::from_basis(&right_mults)?;
        if spread.dim() != n {
            return Err(Error::NotSpreadSet(format!("{name}: right multiplications are dependent")));
        }
        if let Some(w) = spread.low_rank_witness(n) {
            return Err(Error::NotSpreadSet(format!(
                "{name}: zero divisor, singular element\n{}",
                w.to_text()
            )));
        }
        Ok(Presemifield { name: name.into(), provenance: provenance.into(), right_mults, spread: Some(spread) })
    }

    /// From a product table: `table[i][j] = e_i o e_j`.
    pub fn from_multiplication(name: &str, p: Prime, table: &[Vec<Vector>]) -> Result<Presemifield> {
        let n = table.len();
        if table.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameters("multiplication table must be n x n".into()));
        }
        let mats = (0..n)
            .map(|j| MatrixGF::from_rows(p, n, &(0..n).map(|i| table[i][j]).collect::<Vec<_>>()))
            .collect();
        Presemifield::from_right_mults(name, "multiplication table", mats)
    }

    /// Takes any basis of a semifield spread set as the right multiplications.
    pub fn from_spread_set(name: &str, provenance: &str, code: &AdditiveCode) -> Result<Presemifield> {
        Presemifield::from_right_mults(name, provenance, code.basis())
    }

    pub fn prime(&self) -> Prime {
        self.right_mults[0].prime()
    }

    pub fn dimension(&self) -> usize {
        self.right_mults.len()
    }

    pub fn right_mults(&self) -> &[MatrixGF] {
        &self.right_mults
    }

    pub fn spread_set(&self) -> AdditiveCode {
        match &self.spread {
            Some(c) => c.clone(),
            None => AdditiveCode::from_basis(&self.right_mults).expect("validated"),
        }
    }

    /// `x o y` on coordinate vectors.
    pub fn multiply(&self, x: Vector, y: Vector) -> Vector {
        let p = self.prime();
        let mut r = MatrixGF::zero(p, self.dimension(), self.dimension());
        for (j, m) in self.right_mults.iter().enumerate() {
            r = r.add(&m.scale(y.get(j)));
        }
        r.left_apply(x)
    }

    pub fn product_table(&self) -> Vec<Vec<Vector>> {
        let n = self.dimension();
        (0..n).map(|i| (0..n).map(|j| self.right_mults[j].row(i)).collect()).collect()
    }

    /// The opposite multiplication `x * y = y o x`.
    pub fn dual(&self) -> Presemifield {
        let n = self.dimension();
        let p = self.prime();
        let t = self.product_table();
        let mats = (0..n)
            .map(|j| MatrixGF::from_rows(p, n, &(0..n).map(|i| t[j][i]).collect::<Vec<_>>()))
            .collect();
        Presemifield::from_right_mults(&format!("{}^d", self.name), &self.provenance, mats)
            .expect("the opposite of a presemifield is a presemifield")
    }

    /// Knuth transpose: the spread set of transposed right multiplications.
    pub fn transpose(&self) -> Presemifield {
        let mats = self.right_mults.iter().map(|m| m.transpose()).collect();
        Presemifield::from_right_mults(&format!("{}^t", self.name), &self.provenance, mats)
            .expect("transposes of invertible matrices are invertible")
    }

    pub fn is_commutative(&self) -> bool {
        let t = self.product_table();
        let n = self.dimension();
        (0..n).all(|i| (0..n).all(|j| t[i][j] == t[j][i]))
    }
}

/// `C(F_{p^n})`: the matrices of `x -> x a` for `a` in F_{p^n}.
pub fn field_spread_set(p: Prime, n: usize) -> Result<Presemifield> {
    let ctx = FieldCtx::new(p, n)?;
    let basis = ctx.polynomial_basis();
    let mats = basis
        .iter()
        .map(|&a| ctx.linear_map_to_matrix(|x| ctx.mul(x, a), &basis))
        .collect::<Result<Vec<_>>>()?;
    Presemifield::from_right_mults(&format!("F{}", ctx.order()), "field", mats)
}

/// Matrix of `x -> x a` in the polynomial basis.
pub fn multiplication_matrix(ctx: &FieldCtx, a: FieldElement) -> MatrixGF {
    let basis = ctx.polynomial_basis();
    ctx.linear_map_to_matrix(|x| ctx.mul(x, a), &basis).expect("polynomial basis")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_spread_set_small() {
        let s = field_spread_set(Prime::Two, 4).unwrap();
        let c = s.spread_set();
        assert_eq!(c.cardinality(), 16);
        assert!(c.contains(&MatrixGF::identity(Prime::Two, 4)));
        assert_eq!(c.rank_distribution().count(4), 15);
        // M_a M_b = M_ab
        let ctx = FieldCtx::new(Prime::Two, 4).unwrap();
        for a in ctx.elements() {
            for b in ctx.elements() {
                let lhs = multiplication_matrix(&ctx, a).mul(&multiplication_matrix(&ctx, b));
                assert_eq!(lhs, multiplication_matrix(&ctx, ctx.mul(a, b)));
                let sum = multiplication_matrix(&ctx, ctx.add(a, b));
                assert_eq!(sum, multiplication_matrix(&ctx, a).add(&multiplication_matrix(&ctx, b)));
            }
        }
        assert!(field_spread_set(Prime::Two, 5).unwrap().spread_set().is_mrd().is_mrd);
    }

    #[test]
    fn dg_distance_three_in_m4f2() {
        let c = delsarte_gabidulin(Prime::Two, 4, 2, 1).unwrap();
        assert_eq!(c.dim(), 8);
        assert_eq!(c.minimum_distance().unwrap(), 3);
        let rd = c.rank_distribution();
        assert_eq!((rd.count(0), rd.count(3), rd.count(4)), (1, 225, 30));
    }

    #[test]
    fn norm_condition_cases() {
        let ctx = FieldCtx::new(Prime::Three, 4).unwrap();
        let id = AdditiveMap::identity(&ctx);
        let zero = AdditiveMap::zero(&ctx);
        assert!(check_norm_condition(&ctx, 2, &id, &zero).holds);
        let same = check_norm_condition(&ctx, 2, &id, &id);
        assert!(!same.holds);
        assert_eq!(same.witness, Some(ctx.one()));
        // k = 1 with a nonsquare-norm eta: condition holds
        let eta = ctx.nonzero_elements().find(|&e| ctx.field_norm(e).unwrap() == 2).unwrap();
        let tw = AdditiveMap::scaled_frobenius(&ctx, eta, 0);
        assert!(check_norm_condition(&ctx, 1, &id, &tw).holds);
    }

    #[test]
    fn violated_norm_condition_lowers_distance() {
        // N(eta) = (-1)^(nk) = 1 for n = 4, k = 2
        let ctx = FieldCtx::new(Prime::Three, 4).unwrap();
        let eta = ctx.one();
        let id = AdditiveMap::identity(&ctx);
        let phi2 = AdditiveMap::scaled_frobenius(&ctx, eta, 0);
        assert!(!check_norm_condition(&ctx, 2, &id, &phi2).holds);
        let code = h_k_code(&ctx, 2, 1, &id, &phi2).unwrap();
        assert!(code.minimum_distance().unwrap() < 3);
        assert!(matches!(
            twisted_gabidulin(Prime::Three, 4, 2, 1, eta, 0),
            Err(Error::NormCondition)
        ));
    }

    #[test]
    fn twisted_and_tz_codes_are_mrd() {
        let ctx = FieldCtx::new(Prime::Three, 4).unwrap();
        let eta = ctx.nonzero_elements().find(|&e| ctx.field_norm(e).unwrap() == 2).unwrap();
        let tg = twisted_gabidulin(Prime::Three, 4, 2, 1, eta, 0).unwrap();
        assert_eq!(tg.is_mrd(), crate::codes::MrdCheck { is_mrd: true, minimum_distance: 3 });
        let tz = trombetti_zhou(Prime::Three, 4, 2, 1, eta).unwrap();
        assert_eq!(tz.rank_distribution().minimum_distance(), Some(3));
        assert!(tz.is_mrd().is_mrd);
        assert!(trombetti_zhou(Prime::Two, 4, 2, 1, FieldElement::ZERO).is_err());
        // eta = 0 twisted code is the DG code
        let dg = delsarte_gabidulin(Prime::Three, 4, 2, 1).unwrap();
        assert_eq!(twisted_gabidulin(Prime::Three, 4, 2, 1, FieldElement::ZERO, 0).unwrap(), dg);
    }

    #[test]
    fn degenerate_h_k_rejected() {
        let ctx = FieldCtx::new(Prime::Two, 4).unwrap();
        let z = AdditiveMap::zero(&ctx);
        assert!(h_k_code(&ctx, 2, 1, &z, &z).is_err());
        let id = AdditiveMap::identity(&ctx);
        assert!(h_k_code(&ctx, 2, 2, &id, &z).is_err());
        assert!(h_k_code(&ctx, 4, 1, &id, &z).is_err());
    }

    #[test]
    fn presemifield_operations() {
        let f = field_spread_set(Prime::Three, 3).unwrap();
        assert!(f.is_commutative());
        assert_eq!(f.dual().spread_set(), f.spread_set());
        let t = f.transpose();
        assert_eq!(t.transpose().spread_set(), f.spread_set());
        assert_eq!(f.dual().dual().right_mults(), f.right_mults());
        // table round trip
        let again = Presemifield::from_multiplication("again", Prime::Three, &f.product_table()).unwrap();
        assert_eq!(again.right_mults(), f.right_mults());
        // a zero divisor is rejected
        let mut table = f.product_table();
        table[1][1] = Vector::ZERO;
        table[1][2] = Vector::ZERO;
        table[1][0] = Vector::ZERO;
        assert!(matches!(
            Presemifield::from_multiplication("bad", Prime::Three, &table),
            Err(Error::NotSpreadSet(_))
        ));
    }

    #[test]
    fn linearized_polys() {
        let ctx = FieldCtx::new(Prime::Two, 4).unwrap();
        let basis = ctx.polynomial_basis();
        let id = LinearizedPoly::new(ctx.clone(), vec![ctx.one()], 1).unwrap();
        assert_eq!(id.to_matrix(&basis).unwrap(), MatrixGF::identity(Prime::Two, 4));
        let f = LinearizedPoly::new(ctx.clone(), vec![ctx.exp(3), ctx.exp(7)], 1).unwrap();
        let g = LinearizedPoly::new(ctx.clone(), vec![ctx.exp(1), FieldElement::ZERO, ctx.exp(2)], 1).unwrap();
        let sum = f.add(&g).unwrap();
        assert_eq!(
            sum.to_matrix(&basis).unwrap(),
            f.to_matrix(&basis).unwrap().add(&g.to_matrix(&basis).unwrap())
        );
        assert!(LinearizedPoly::new(ctx.clone(), vec![ctx.one()], 2).is_err());
    }
}
