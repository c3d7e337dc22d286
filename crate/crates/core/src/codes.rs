//! Additive (F_p-linear) rank-metric codes in `M_{m x n}(F_p)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::matrix::parse_rows;
use crate::gf::{rank_of, MatrixGF, Prime, Subspace, Vector};

/// An F_p-subspace of `M_{m x n}(F_p)`, stored as the canonical reduced
/// row-echelon basis of the row-major flattened matrices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdditiveCode {
    m: usize,
    n: usize,
    space: Subspace,
}

/// Number of codewords of each rank. Rank 0 always carries the zero word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankDistribution(pub BTreeMap<usize, u64>);

impl RankDistribution {
    pub fn count(&self, r: usize) -> u64 {
        self.0.get(&r).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    /// Smallest nonzero rank present.
    pub fn minimum_distance(&self) -> Option<usize> {
        self.0.iter().find(|(&r, &c)| r > 0 && c > 0).map(|(&r, _)| r)
    }

    fn from_histogram(hist: &[u64]) -> RankDistribution {
        let mut map = BTreeMap::new();
        map.insert(0, 0);
        for (r, &c) in hist.iter().enumerate() {
            if c > 0 {
                map.insert(r, c);
            }
        }
        RankDistribution(map)
    }
}

/// Outcome of an MRD test: the verdict and the code's minimum distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrdCheck {
    pub is_mrd: bool,
    pub minimum_distance: usize,
}

// Codes up to this dimension are enumerated in one Gray walk; larger ones are
// split into independent chunks.
const CHUNK_DIM: usize = 12;

impl AdditiveCode {
    pub fn from_basis(matrices: &[MatrixGF]) -> Result<AdditiveCode> {
        let first = matrices.first().ok_or_else(|| Error::Empty("no basis matrices".into()))?;
        let (m, n) = first.shape();
        let p = first.prime();
        if let Some(bad) = matrices.iter().find(|x| x.shape() != (m, n) || x.prime() != p) {
            return Err(Error::InvalidParameters(format!(
                "basis matrix {bad:?} does not match shape {m}x{n} over F_{}",
                p.value()
            )));
        }
        Ok(AdditiveCode::from_subspace(m, n, Subspace::span(p, m * n, matrices.iter().map(|x| x.vector()))))
    }

    pub fn from_subspace(m: usize, n: usize, space: Subspace) -> AdditiveCode {
        assert_eq!(space.ambient_dim(), m * n);
        AdditiveCode { m, n, space }
    }

    pub fn zero(p: Prime, m: usize, n: usize) -> AdditiveCode {
        AdditiveCode::from_subspace(m, n, Subspace::zero(p, m * n))
    }

    pub fn full(p: Prime, m: usize, n: usize) -> AdditiveCode {
        AdditiveCode::from_subspace(m, n, Subspace::full(p, m * n))
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.space.prime()
    }
    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.m
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.n
    }
    /// Dimension over F_p.
    #[inline]
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
    pub fn cardinality(&self) -> u64 {
        self.space.cardinality()
    }
    #[inline]
    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> Vec<MatrixGF> {
        self.space.basis().iter().map(|&v| self.matrix(v)).collect()
    }

    #[inline]
    pub fn matrix(&self, v: Vector) -> MatrixGF {
        MatrixGF::from_vector(self.prime(), self.m, self.n, v)
    }

    pub fn contains(&self, x: &MatrixGF) -> bool {
        x.shape() == self.shape() && self.space.contains(x.vector())
    }

    /// Canonical byte string; equal iff the codes are equal as sets.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = vec![self.prime().value() as u8, self.m as u8, self.n as u8];
        for b in self.space.basis() {
            out.extend_from_slice(&b.lo.to_le_bytes());
            out.extend_from_slice(&b.hi.to_le_bytes());
        }
        out
    }

    pub fn with(&self, extra: &MatrixGF) -> AdditiveCode {
        let mut s = self.space.clone();
        s.insert(extra.vector());
        AdditiveCode::from_subspace(self.m, self.n, s)
    }

    pub fn is_subcode_of(&self, other: &AdditiveCode) -> bool {
        self.shape() == other.shape() && self.space.is_subspace_of(&other.space)
    }

    /// All codewords in p-ary reflected Gray order, zero first.
    pub fn codewords(&self) -> Codewords<'_> {
        Codewords::new(self.prime(), self.m, self.n, self.space.basis())
    }

    /// Codeword vectors collected in Gray order.
    pub fn codeword_vectors(&self) -> Vec<Vector> {
        let mut out = Vec::with_capacity(self.cardinality() as usize);
        gray_walk(self.prime(), self.space.basis(), Vector::ZERO, |v| {
            out.push(v);
            true
        });
        out
    }

    fn chunks(&self) -> (Vec<Vector>, Vec<Vector>) {
        let basis = self.space.basis();
        let split = basis.len().saturating_sub(CHUNK_DIM);
        let (high, low) = basis.split_at(split);
        let offsets = if high.is_empty() {
            vec![Vector::ZERO]
        } else {
            Subspace::span(self.prime(), self.m * self.n, high.iter().copied()).elements()
        };
        (offsets, low.to_vec())
    }

    pub fn rank_distribution(&self) -> RankDistribution {
        let (p, m, n) = (self.prime(), self.m, self.n);
        let (offsets, low) = self.chunks();
        let hist = offsets
            .par_iter()
            .map(|&off| {
                let mut h = vec![0u64; m.min(n) + 1];
                gray_walk(p, &low, off, |v| {
                    h[rank_of(p, v, m, n)] += 1;
                    true
                });
                h
            })
            .reduce(
                || vec![0u64; m.min(n) + 1],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        RankDistribution::from_histogram(&hist)
    }

    pub fn minimum_distance(&self) -> Result<usize> {
        if self.dim() == 0 {
            return Err(Error::ZeroCode);
        }
        Ok(self.rank_distribution().minimum_distance().expect("nonzero code"))
    }

    /// Whether every nonzero codeword has rank at least `d`; stops at the first
    /// counterexample, which is returned.
    pub fn low_rank_witness(&self, d: usize) -> Option<MatrixGF> {
        let (p, m, n) = (self.prime(), self.m, self.n);
        let (offsets, low) = self.chunks();
        // first hit in chunk order, so the reported witness is deterministic
        let found = offsets.par_iter().find_map_first(|&off| {
            let mut hit = None;
            gray_walk(p, &low, off, |v| {
                if !v.is_zero() && rank_of(p, v, m, n) < d {
                    hit = Some(v);
                    return false;
                }
                true
            });
            hit
        });
        found.map(|v| self.matrix(v))
    }

    /// Tests `|C| = p^(n(m-d+1))` (for `m <= n`, transposing otherwise) together
    /// with the rank bound. When the dual is smaller the test runs there, since an
    /// additive code is MRD exactly when its Delsarte dual is.
    pub fn is_mrd(&self) -> MrdCheck {
        if self.m > self.n {
            return self.transpose().is_mrd();
        }
        let (m, n, k) = (self.m, self.n, self.dim());
        if k == 0 {
            return MrdCheck { is_mrd: false, minimum_distance: 0 };
        }
        let not_mrd = |c: &AdditiveCode| MrdCheck {
            is_mrd: false,
            minimum_distance: c.minimum_distance().expect("nonzero"),
        };
        if k % n != 0 {
            return not_mrd(self);
        }
        let target = m - k / n + 1;
        if target == 1 {
            return MrdCheck { is_mrd: true, minimum_distance: 1 };
        }
        let ok = if 2 * k > m * n {
            let dual = self.delsarte_dual();
            let dual_target = m - dual.dim() / n + 1;
            dual.low_rank_witness(dual_target).is_none()
        } else {
            self.low_rank_witness(target).is_none()
        };
        if ok {
            MrdCheck { is_mrd: true, minimum_distance: target }
        } else {
            not_mrd(self)
        }
    }

    /// `p^(n(m-d)) < |C| < p^(n(m-d+1))` for the code's own minimum distance.
    pub fn is_quasi_mrd(&self) -> bool {
        if self.m > self.n {
            return self.transpose().is_quasi_mrd();
        }
        let Ok(d) = self.minimum_distance() else {
            return false;
        };
        let k = self.dim();
        let lower = self.n * (self.m - d);
        let upper = self.n * (self.m - d + 1);
        lower < k && k < upper
    }

    /// Orthogonal complement under `<X, Y> = sum X_ij Y_ij`.
    pub fn delsarte_dual(&self) -> AdditiveCode {
        AdditiveCode::from_subspace(self.m, self.n, self.space.orthogonal_complement())
    }

    pub fn transpose(&self) -> AdditiveCode {
        let t: Vec<Vector> = self.basis().iter().map(|x| x.transpose().vector()).collect();
        AdditiveCode::from_subspace(self.n, self.m, Subspace::span(self.prime(), self.m * self.n, t))
    }

    /// The code `{ A X B }` (or `{ A X^T B }` when `transpose` is set).
    pub fn transform(&self, a: &MatrixGF, b: &MatrixGF, transpose: bool) -> AdditiveCode {
        let src = if transpose { self.transpose() } else { self.clone() };
        let images: Vec<Vector> = src.basis().iter().map(|x| a.mul(x).mul(b).vector()).collect();
        let (m, n) = (a.rows(), b.cols());
        AdditiveCode::from_subspace(m, n, Subspace::span(self.prime(), m * n, images))
    }

    /// Lifts each codeword `A` to the row space of `[I_m | A]` in `V(m + n, p)`.
    pub fn lift(&self) -> Vec<Subspace> {
        self.codewords().map(|a| lift_matrix(&a)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {} {}", self.prime().value(), self.m, self.n, self.dim());
        for (i, b) in self.basis().iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            s.push_str(&b.to_text());
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<AdditiveCode> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().starts_with('#'));
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| Error::Parse { line: 1, msg: "missing header".into() })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: hline + 1, msg: format!("bad header: {e}") })?;
        let [q, m, n, k] = nums[..] else {
            return Err(Error::Parse { line: hline + 1, msg: "header must be `q m n k`".into() });
        };
        let p = Prime::from_u32(q as u32)
            .ok_or_else(|| Error::Parse { line: hline + 1, msg: format!("unsupported q = {q}") })?;
        let rest: Vec<(usize, &str)> = lines.map(|(i, l)| (i + 1, l.trim())).collect();
        let matrices = parse_matrix_blocks(p, &rest, m, n)?;
        if matrices.len() != k {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("header promises {k} matrices, found {}", matrices.len()),
            });
        }
        if k == 0 {
            return Ok(AdditiveCode::zero(p, m, n));
        }
        let code = AdditiveCode::from_basis(&matrices)?;
        if code.dim() != k {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("basis matrices are dependent: rank {} < {k}", code.dim()),
            });
        }
        Ok(code)
    }
}

impl std::fmt::Debug for AdditiveCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "AdditiveCode[F_{}, {}x{}, dim {}]",
            self.prime().value(),
            self.m,
            self.n,
            self.dim()
        )
    }
}

/// Splits `(line number, text)` pairs into blank-line separated `m x n` blocks.
pub(crate) fn parse_matrix_blocks(
    p: Prime,
    lines: &[(usize, &str)],
    m: usize,
    n: usize,
) -> Result<Vec<MatrixGF>> {
    let mut out = Vec::new();
    let mut block: Vec<&str> = Vec::new();
    let mut start = 0;
    let flush = |block: &mut Vec<&str>, start: usize, out: &mut Vec<MatrixGF>| -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        let mat = parse_rows(p, block, start)?;
        if mat.shape() != (m, n) {
            return Err(Error::Parse {
                line: start,
                msg: format!("expected a {m}x{n} matrix, found {}x{}", mat.rows(), mat.cols()),
            });
        }
        out.push(mat);
        block.clear();
        Ok(())
    };
    for &(ln, l) in lines {
        if l.is_empty() {
            flush(&mut block, start, &mut out)?;
        } else {
            if block.is_empty() {
                start = ln;
            }
            block.push(l);
            if block.len() == m {
                flush(&mut block, start, &mut out)?;
            }
        }
    }
    flush(&mut block, start, &mut out)?;
    Ok(out)
}

/// Row space of `[I_m | A]`.
pub fn lift_matrix(a: &MatrixGF) -> Subspace {
    let (m, n) = a.shape();
    assert!(m + n <= 64);
    let rows = (0..m).map(|i| Vector::ZERO.with(i, 1).or(a.row(i).shift_up(m)));
    Subspace::span(a.prime(), m + n, rows)
}

/// Iterator over the codewords of a code in p-ary reflected Gray order.
pub struct Codewords<'a> {
    p: Prime,
    m: usize,
    n: usize,
    basis: &'a [Vector],
    digits: Vec<u32>,
    up: Vec<bool>,
    current: Vector,
    started: bool,
}

impl<'a> Codewords<'a> {
    fn new(p: Prime, m: usize, n: usize, basis: &'a [Vector]) -> Self {
        Codewords {
            p,
            m,
            n,
            basis,
            digits: vec![0; basis.len()],
            up: vec![true; basis.len()],
            current: Vector::ZERO,
            started: false,
        }
    }
}

impl<'a> Iterator for Codewords<'a> {
    type Item = MatrixGF;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return Some(MatrixGF::from_vector(self.p, self.m, self.n, self.current));
        }
        let top = self.p.value() - 1;
        for i in 0..self.basis.len() {
            if self.up[i] && self.digits[i] < top {
                self.digits[i] += 1;
                self.current = self.p.add(self.current, self.basis[i]);
            } else if !self.up[i] && self.digits[i] > 0 {
                self.digits[i] -= 1;
                self.current = self.p.sub(self.current, self.basis[i]);
            } else {
                continue;
            }
            for d in self.up.iter_mut().take(i) {
                *d = !*d;
            }
            return Some(MatrixGF::from_vector(self.p, self.m, self.n, self.current));
        }
        None
    }
}

/// Calls `f` on every vector of `offset + span(basis)` in Gray order until it
/// returns false. Returns false if stopped early.
pub fn gray_walk<F: FnMut(Vector) -> bool>(p: Prime, basis: &[Vector], offset: Vector, mut f: F) -> bool {
    let k = basis.len();
    let top = p.value() - 1;
    let mut digits = vec![0u32; k];
    let mut up = vec![true; k];
    let mut cur = offset;
    if !f(cur) {
        return false;
    }
    loop {
        let mut moved = false;
        for i in 0..k {
            if up[i] && digits[i] < top {
                digits[i] += 1;
                cur = p.add(cur, basis[i]);
            } else if !up[i] && digits[i] > 0 {
                digits[i] -= 1;
                cur = p.sub(cur, basis[i]);
            } else {
                continue;
            }
            for d in up.iter_mut().take(i) {
                *d = !*d;
            }
            moved = true;
            break;
        }
        if !moved {
            return true;
        }
        if !f(cur) {
            return false;
        }
    }
}
