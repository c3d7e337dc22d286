//! The correspondence between MRD codes in `M_{m x n}` with `d = m` and
//! `m`-dimensional subspaces of `M_n` whose nonzero members are invertible.

use serde::{Deserialize, Serialize};

use crate::codes::AdditiveCode;
use crate::error::{Error, Result};
use crate::gf::{MatrixGF, Prime};

/// `T(w, u, v) = (E_v)_{w,u}` for a code with basis `E_1, ..., E_n` in `M_{m x n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrilinearForm {
    pub prime: Prime,
    pub dims: (usize, usize, usize),
    /// Indexed `[w][u][v]`.
    pub coefficients: Vec<Vec<Vec<u32>>>,
}

impl TrilinearForm {
    pub fn from_code(c: &AdditiveCode) -> TrilinearForm {
        let (m, n) = c.shape();
        let basis = c.basis();
        let k = basis.len();
        let coefficients = (0..m)
            .map(|w| (0..n).map(|u| (0..k).map(|v| basis[v].get(w, u)).collect()).collect())
            .collect();
        TrilinearForm { prime: c.prime(), dims: (m, n, k), coefficients }
    }

    pub fn eval(&self, w: &[u32], u: &[u32], v: &[u32]) -> u32 {
        let q = self.prime.value();
        let mut acc = 0;
        for (i, wi) in w.iter().enumerate().filter(|x| *x.1 != 0) {
            for (j, uj) in u.iter().enumerate().filter(|x| *x.1 != 0) {
                for (l, vl) in v.iter().enumerate().filter(|x| *x.1 != 0) {
                    acc = (acc + wi * uj * vl * self.coefficients[i][j][l]) % q;
                }
            }
        }
        acc
    }

    /// The slice `(u, v) -> T(e_w, u, v)`.
    pub fn slice(&self, w: usize) -> MatrixGF {
        MatrixGF::from_digit_rows(self.prime, &self.coefficients[w])
    }

    /// A slot is nondegenerate when no nonzero vector there kills the form.
    pub fn nondegenerate(&self) -> [bool; 3] {
        let (m, n, k) = self.dims;
        let p = self.prime;
        let flat = |f: &dyn Fn(usize, usize, usize) -> u32, a: usize, b: usize, c: usize| {
            // rows indexed by the slot, columns by the other two
            let rows: Vec<Vec<u32>> = (0..a).map(|i| (0..b * c).map(|jk| f(i, jk / c, jk % c)).collect()).collect();
            MatrixGF::from_digit_rows(p, &rows).rank() == a
        };
        let t = &self.coefficients;
        [
            flat(&|w, u, v| t[w][u][v], m, n, k),
            flat(&|u, w, v| t[w][u][v], n, m, k),
            flat(&|v, w, u| t[w][u][v], k, m, n),
        ]
    }
}

/// `{T_a : a in F_q^m}` for an MRD code `C` in `M_{m x n}` with `d = m <= n`.
pub fn tensorize(c: &AdditiveCode) -> Result<AdditiveCode> {
    let (m, n) = c.shape();
    if m > n || c.dim() != n {
        return Err(Error::Precondition(format!("need an n-dimensional code with m <= n, got {m}x{n} of dimension {}", c.dim())));
    }
    if let Some(w) = c.low_rank_witness(m) {
        return Err(Error::Precondition(format!("codeword of rank {} below m = {m}", w.rank())));
    }
    let t = TrilinearForm::from_code(c);
    AdditiveCode::from_basis(&(0..m).map(|w| t.slice(w)).collect::<Vec<_>>())
}

/// Inverse of [`tensorize`]: an `m`-dimensional subspace of `M_n` with every
/// nonzero member invertible gives an MRD code in `M_{m x n}` with `d = m`.
pub fn detensorize(s: &AdditiveCode) -> Result<AdditiveCode> {
    let (r, n) = s.shape();
    let m = s.dim();
    if r != n || m == 0 || m > n {
        return Err(Error::Precondition(format!("need a subspace of M_n of dimension at most n, got {r}x{n} of dimension {m}")));
    }
    if let Some(w) = s.low_rank_witness(n) {
        return Err(Error::Precondition(format!("singular member of rank {}", w.rank())));
    }
    let slices = s.basis();
    let p = s.prime();
    let basis: Vec<MatrixGF> = (0..n)
        .map(|v| {
            let rows: Vec<Vec<u32>> = (0..m).map(|w| (0..n).map(|u| slices[w].get(u, v)).collect()).collect();
            MatrixGF::from_digit_rows(p, &rows)
        })
        .collect();
    AdditiveCode::from_basis(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{delsarte_gabidulin, field_spread_set};

    #[test]
    fn field_spread_set_round_trips() {
        let c = field_spread_set(Prime::Three, 3).unwrap().spread_set();
        let s = tensorize(&c).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.minimum_distance().unwrap(), 3);
        let back = detensorize(&s).unwrap();
        let opts = crate::equivalence::EquivalenceOptions::default();
        assert!(crate::equivalence::are_equivalent(&back, &c, &opts).unwrap().is_some());
    }

    #[test]
    fn form_matches_slices() {
        let c = field_spread_set(Prime::Two, 3).unwrap().spread_set();
        let t = TrilinearForm::from_code(&c);
        assert_eq!(t.nondegenerate(), [true, true, true]);
        let s = t.slice(1);
        assert_eq!(t.eval(&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]), s.get(2, 0));
    }

    #[test]
    fn non_mrd_input_is_rejected() {
        let dg = delsarte_gabidulin(Prime::Two, 3, 2, 1).unwrap();
        assert!(tensorize(&dg).is_err());
    }
}
