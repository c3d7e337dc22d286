//! Equivalence of codes under `X -> A X B` and transposition, idealisers,
//! automorphism groups and invariant fingerprints.
//!
//! Square codes containing an invertible matrix are handled by normalising:
//! if `A C2 B = C1` and `X1 = A X2 B` is invertible, then `B = X2^-1 A^-1 X1` and
//! `A (C2 X2^-1) A^-1 = C1 X1^-1`. Both normalised spaces contain the identity, so
//! the problem becomes a simultaneous conjugacy search anchored on a matrix with a
//! rare similarity class. Everything else falls back to enumerating `GL(m)` and
//! solving for `B` linearly.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{gray_walk, AdditiveCode};
use crate::error::{Error, Result};
use crate::gf::{MatrixGF, Prime, Subspace, Vector};
use crate::report::{ClassEntry, ClassificationReport};
use crate::util::stable_hash;

pub const DEFAULT_PAIR_TIMEOUT: Duration = Duration::from_secs(600);

/// Largest `p^(m^2)` for which `GL(m)` is enumerated outright.
const GL_ENUMERATION_LIMIT: u64 = 1 << 22;
/// Largest solution space (as F_p-dimension) enumerated for `B`.
const SOLUTION_DIM_LIMIT: usize = 20;
/// Conjugacy profiles are only computed for codes at most this large.
pub const PROFILE_LIMIT: u64 = 729;

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget { deadline: None }
    }

    pub fn within(limit: Duration) -> Budget {
        Budget { deadline: Instant::now().checked_add(limit) }
    }

    pub fn exceeded(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn check(&self, what: &str) -> Result<()> {
        if self.exceeded() {
            Err(Error::Budget(format!("time budget exhausted during {what}")))
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::within(DEFAULT_PAIR_TIMEOUT)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EquivalenceOptions {
    /// Only `X -> A X B`; the transposed branch is skipped.
    pub isotopy_only: bool,
    pub budget: Budget,
}

/// `C1 = { A X' B : X in C2 }` where `X' = X^T` if `transposed`. The field
/// automorphism exponent is always 0 over a prime field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    pub a: MatrixGF,
    pub b: MatrixGF,
    pub rho: u32,
    pub transposed: bool,
}

impl EquivalenceWitness {
    pub fn apply(&self, c2: &AdditiveCode) -> AdditiveCode {
        c2.transform(&self.a, &self.b, self.transposed)
    }

    pub fn verify(&self, c1: &AdditiveCode, c2: &AdditiveCode) -> bool {
        self.a.is_invertible() && self.b.is_invertible() && self.apply(c2) == *c1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idealiser {
    pub order: u64,
    pub basis: Vec<MatrixGF>,
}

/// Inner products of `v` with each parity-check vector.
#[inline]
fn syndrome(p: Prime, checks: &[Vector], v: Vector) -> Vector {
    let mut out = Vector::ZERO;
    for (i, h) in checks.iter().enumerate() {
        out.set(i, h.dot(p, v));
    }
    out
}

fn idealiser(c: &AdditiveCode, left: bool) -> Result<Idealiser> {
    let (m, n) = c.shape();
    if m != n {
        return Err(Error::Precondition(format!("idealisers need a square code, got {m} x {n}")));
    }
    let p = c.prime();
    let checks = c.space().orthogonal_complement();
    let checks = checks.basis();
    let mut sol = Subspace::full(p, n * n);
    for x in c.basis() {
        sol = sol.restrict(checks.len(), |a| {
            let a = MatrixGF::from_vector(p, n, n, a);
            let prod = if left { a.mul(&x) } else { x.mul(&a) };
            syndrome(p, checks, prod.vector())
        });
    }
    Ok(Idealiser {
        order: sol.cardinality(),
        basis: sol.basis().iter().map(|&v| MatrixGF::from_vector(p, n, n, v)).collect(),
    })
}

/// `{ A : A C ⊆ C }`.
pub fn left_idealiser(c: &AdditiveCode) -> Result<Idealiser> {
    idealiser(c, true)
}

/// `{ B : C B ⊆ C }`.
pub fn right_idealiser(c: &AdditiveCode) -> Result<Idealiser> {
    idealiser(c, false)
}

fn is_scalar(x: &MatrixGF) -> bool {
    let n = x.rows();
    let c = x.get(0, 0);
    *x == MatrixGF::scalar(x.prime(), n, c)
}

fn invertibles(c: &AdditiveCode) -> Vec<MatrixGF> {
    c.codewords().filter(|x| x.is_invertible()).collect()
}

fn centraliser_dim(y: &MatrixGF) -> usize {
    let p = y.prime();
    let n = y.rows();
    Subspace::full(p, n * n)
        .restrict(n * n, |a| {
            let a = MatrixGF::from_vector(p, n, n, a);
            a.mul(y).sub(&y.mul(&a)).vector()
        })
        .dim()
}

/// `C1 X1^-1` with its elements sorted by similarity class.
struct ConjugacyTarget {
    p: Prime,
    n: usize,
    x1: MatrixGF,
    s1: Subspace,
    classes: HashMap<u64, Vec<MatrixGF>>,
}

impl ConjugacyTarget {
    fn new(c1: &AdditiveCode, x1: MatrixGF) -> ConjugacyTarget {
        let p = c1.prime();
        let n = c1.rows();
        let x1inv = x1.inverse().expect("anchor is invertible");
        let s1 = Subspace::span(p, n * n, c1.basis().iter().map(|b| b.mul(&x1inv).vector()));
        let members: Vec<MatrixGF> = {
            let mut v = Vec::with_capacity(s1.cardinality() as usize);
            gray_walk(p, s1.basis(), Vector::ZERO, |w| {
                v.push(MatrixGF::from_vector(p, n, n, w));
                true
            });
            v
        };
        let keyed: Vec<(u64, MatrixGF)> = members
            .par_iter()
            .filter(|x| !is_scalar(x))
            .map(|x| (x.conjugacy_invariant(), *x))
            .collect();
        let mut classes: HashMap<u64, Vec<MatrixGF>> = HashMap::new();
        for (k, x) in keyed {
            classes.entry(k).or_default().push(x);
        }
        ConjugacyTarget { p, n, x1, s1, classes }
    }

    /// All (or the first) `(A, B)` with `A X2 B = X1` and `A C2 B = C1`.
    fn solve(&self, c2_basis: &[MatrixGF], x2: &MatrixGF, all: bool) -> Vec<Pair> {
        let (p, n) = (self.p, self.n);
        let Some(x2inv) = x2.inverse() else {
            return Vec::new();
        };
        let s2: Vec<MatrixGF> = c2_basis.iter().map(|b| b.mul(&x2inv)).collect();
        let mut pool = s2.clone();
        pool.extend(s2.windows(2).map(|w| w[0].add(&w[1])));
        let mut best: Option<(u64, MatrixGF, &Vec<MatrixGF>)> = None;
        for y in &pool {
            if is_scalar(y) {
                continue;
            }
            let Some(zs) = self.classes.get(&y.conjugacy_invariant()) else {
                return Vec::new();
            };
            let cost = zs.len() as u64 * p.powers(centraliser_dim(y) as u32);
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, *y, zs));
            }
        }
        let Some((_, y, zs)) = best else {
            return Vec::new();
        };
        let full = Subspace::full(p, n * n);
        let per_target = |z: &MatrixGF| -> Vec<Pair> {
            let v = full.restrict(n * n, |a| {
                let a = MatrixGF::from_vector(p, n, n, a);
                a.mul(&y).sub(&z.mul(&a)).vector()
            });
            let mut found = Vec::new();
            gray_walk(p, v.basis(), Vector::ZERO, |w| {
                let a = MatrixGF::from_vector(p, n, n, w);
                let Some(ainv) = a.inverse() else {
                    return true;
                };
                if s2.iter().all(|s| self.s1.contains(a.mul(s).mul(&ainv).vector())) {
                    found.push((a, x2inv.mul(&ainv).mul(&self.x1)));
                    return all;
                }
                true
            });
            found
        };
        if all {
            zs.par_iter().flat_map_iter(per_target).collect()
        } else {
            zs.par_iter()
                .find_map_first(|z| per_target(z).into_iter().next())
                .into_iter()
                .collect()
        }
    }
}

type Pair = (MatrixGF, MatrixGF);

#[inline]
fn act(g: &Pair, x: &MatrixGF) -> MatrixGF {
    g.0.mul(x).mul(&g.1)
}

fn compose(g: &Pair, h: &Pair) -> Pair {
    // g after h: X -> g0 h0 X h1 g1
    (g.0.mul(&h.0), h.1.mul(&g.1))
}

/// Orbit of `start` under the group generated by `gens`.
fn orbit_of(start: MatrixGF, gens: &[Pair]) -> HashSet<Vector> {
    let mut seen = HashSet::from([start.vector()]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = act(g, &x);
            if seen.insert(y.vector()) {
                stack.push(y);
            }
        }
    }
    seen
}

/// One point per orbit, in order of first appearance in `points`.
fn orbit_representatives(points: &[MatrixGF], gens: &[Pair]) -> Vec<MatrixGF> {
    let mut seen: HashSet<Vector> = HashSet::new();
    let mut reps = Vec::new();
    for &x in points {
        if seen.contains(&x.vector()) {
            continue;
        }
        reps.push(x);
        seen.extend(orbit_of(x, gens));
    }
    reps
}

/// A subset of `cands` generating the same group, chosen greedily.
fn prune_generators(cands: &[Pair]) -> Vec<Pair> {
    let Some(first) = cands.first() else {
        return Vec::new();
    };
    let p = first.0.prime();
    let (m, n) = (first.0.rows(), first.1.rows());
    let id = (MatrixGF::identity(p, m), MatrixGF::identity(p, n));
    let key = |g: &Pair| (g.0.vector(), g.1.vector());
    let mut closure: HashSet<(Vector, Vector)> = HashSet::from([key(&id)]);
    let mut elems = vec![id];
    let mut gens: Vec<Pair> = Vec::new();
    for g in cands {
        if closure.contains(&key(g)) {
            continue;
        }
        gens.push(*g);
        // the new closure is generated by multiplying known elements by generators
        let mut frontier = elems.clone();
        while let Some(x) = frontier.pop() {
            for h in &gens {
                let y = compose(h, &x);
                if closure.insert(key(&y)) {
                    elems.push(y);
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// Pairs `(a, I)` and `(I, b)` from units of the idealisers, which always lie in
/// the automorphism group.
fn idealiser_unit_generators(c: &AdditiveCode) -> Result<Vec<Pair>> {
    let p = c.prime();
    let n = c.rows();
    let id = MatrixGF::identity(p, n);
    let mut gens = Vec::new();
    for (left, ideal) in [(true, left_idealiser(c)?), (false, right_idealiser(c)?)] {
        let space = Subspace::span(p, n * n, ideal.basis.iter().map(|b| b.vector()));
        let mut units = Vec::new();
        gray_walk(p, space.basis(), Vector::ZERO, |w| {
            let u = MatrixGF::from_vector(p, n, n, w);
            if u.is_invertible() {
                units.push(if left { (u, id) } else { (id, u) });
            }
            true
        });
        gens.extend(prune_generators(&units));
    }
    Ok(gens)
}

fn conjugacy_applicable(c1: &AdditiveCode, c2: &AdditiveCode) -> bool {
    let (m, n) = c1.shape();
    m == n && c1.shape() == c2.shape() && has_nonscalar(c1) && has_nonscalar(c2) && {
        let inv = |c: &AdditiveCode| c.rank_distribution().count(n) > 0;
        inv(c1) && inv(c2)
    }
}

fn has_nonscalar(c: &AdditiveCode) -> bool {
    c.basis().iter().any(|b| !is_scalar(b))
}

fn anchor_of(c: &AdditiveCode) -> MatrixGF {
    match c.basis().into_iter().find(|b| b.is_invertible()) {
        Some(x) => x,
        None => invertibles(c)[0],
    }
}

fn general_linear_group(p: Prime, m: usize) -> Result<Vec<MatrixGF>> {
    let total = p.powers((m * m) as u32);
    if total > GL_ENUMERATION_LIMIT {
        return Err(Error::Budget(format!("GL({m}, {}) is too large to enumerate", p.value())));
    }
    Ok((0..total)
        .into_par_iter()
        .map(|i| MatrixGF::from_vector(p, m, m, Vector::from_index(p, m * m, i)))
        .filter(|a| a.is_invertible())
        .collect())
}

/// Pairs `(A, B)` with `A C2 B = C1`, enumerating `A` over `GL(m)`. Needs `m <= n`.
fn linear_group_search(c1: &AdditiveCode, c2: &AdditiveCode, all: bool, budget: &Budget) -> Result<Vec<Pair>> {
    let p = c1.prime();
    let (m, n) = c1.shape();
    let checks_space = c1.space().orthogonal_complement();
    let checks = checks_space.basis();
    let basis2 = c2.basis();
    let group = general_linear_group(p, m)?;
    let solve = |a: &MatrixGF| -> Result<Vec<Pair>> {
        budget.check("equivalence search")?;
        let mut sol = Subspace::full(p, n * n);
        for x in &basis2 {
            let ax = a.mul(x);
            sol = sol.restrict(checks.len(), |b| syndrome(p, checks, ax.mul(&MatrixGF::from_vector(p, n, n, b)).vector()));
            if sol.dim() == 0 {
                return Ok(Vec::new());
            }
        }
        if sol.dim() > SOLUTION_DIM_LIMIT {
            return Err(Error::Budget(format!("solution space of dimension {} for B", sol.dim())));
        }
        let mut out = Vec::new();
        gray_walk(p, sol.basis(), Vector::ZERO, |w| {
            let b = MatrixGF::from_vector(p, n, n, w);
            if b.is_invertible() {
                out.push((*a, b));
                return all;
            }
            true
        });
        Ok(out)
    };
    if all {
        let parts: Vec<Result<Vec<Pair>>> = group.par_iter().map(solve).collect();
        let mut out = Vec::new();
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    } else {
        let hit = group.par_iter().find_map_first(|a| match solve(a) {
            Ok(v) => v.into_iter().next().map(Ok),
            Err(e) => Some(Err(e)),
        });
        match hit {
            Some(Ok(pair)) => Ok(vec![pair]),
            Some(Err(e)) => Err(e),
            None => Ok(Vec::new()),
        }
    }
}

/// Linear-group search with the shorter side enumerated.
fn linear_group_search_any(c1: &AdditiveCode, c2: &AdditiveCode, all: bool, budget: &Budget) -> Result<Vec<Pair>> {
    let (m, n) = c1.shape();
    if m <= n {
        linear_group_search(c1, c2, all, budget)
    } else {
        let swapped = linear_group_search(&c1.transpose(), &c2.transpose(), all, budget)?;
        Ok(swapped.into_iter().map(|(a, b)| (b.transpose(), a.transpose())).collect())
    }
}

/// One `(A, B)` with `A C2 B = C1`, if any. `aut2` (generators of `Aut(C2)`)
/// lets the search try one invertible word per orbit.
fn find_isotopism(
    c1: &AdditiveCode,
    c2: &AdditiveCode,
    aut2: Option<&[Pair]>,
    index2: Option<(&AnchorIndex, bool)>,
    budget: &Budget,
) -> Result<Option<Pair>> {
    if c1.shape() != c2.shape() || c1.dim() != c2.dim() {
        return Ok(None);
    }
    if c1.dim() == 0 {
        return Err(Error::ZeroCode);
    }
    if !conjugacy_applicable(c1, c2) {
        return Ok(linear_group_search_any(c1, c2, false, budget)?.into_iter().next());
    }
    let x1 = anchor_of(c1);
    let target = ConjugacyTarget::new(c1, x1);
    let gens = match aut2 {
        Some(g) => g.to_vec(),
        None => idealiser_unit_generators(c2)?,
    };
    let basis2 = c2.basis();
    let words1: Vec<MatrixGF> = c1.codewords().collect();
    let wanted = anchored_signature(&words1, &x1);
    let anchors = match index2 {
        Some((index, transposed)) => index.anchors(wanted, transposed),
        None => {
            let reps = orbit_representatives(&invertibles(c2), &gens);
            let words2: Vec<MatrixGF> = c2.codewords().collect();
            let sigs = signatures(&words2, &reps);
            reps.into_iter().zip(sigs).filter(|(_, h)| *h == wanted).map(|(x, _)| x).collect()
        }
    };
    for x2 in anchors {
        budget.check("equivalence test")?;
        if let Some(g) = target.solve(&basis2, &x2, false).into_iter().next() {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// A witness that `C1` and `C2` are equivalent, or `None`.
pub fn are_equivalent(
    c1: &AdditiveCode,
    c2: &AdditiveCode,
    opts: &EquivalenceOptions,
) -> Result<Option<EquivalenceWitness>> {
    are_equivalent_with(c1, c2, None, opts)
}

/// As [`are_equivalent`], reusing a known automorphism group of `C2`.
pub fn are_equivalent_with(
    c1: &AdditiveCode,
    c2: &AdditiveCode,
    aut2: Option<&AutomorphismGroup>,
    opts: &EquivalenceOptions,
) -> Result<Option<EquivalenceWitness>> {
    are_equivalent_indexed(c1, c2, aut2, None, opts)
}

/// As [`are_equivalent_with`], with an [`AnchorIndex`] of `C2` built from `aut2`.
pub fn are_equivalent_indexed(
    c1: &AdditiveCode,
    c2: &AdditiveCode,
    aut2: Option<&AutomorphismGroup>,
    index2: Option<&AnchorIndex>,
    opts: &EquivalenceOptions,
) -> Result<Option<EquivalenceWitness>> {
    if c1.prime() != c2.prime() {
        return Err(Error::Precondition("codes over different fields".into()));
    }
    let (s1, s2) = (c1.shape(), c2.shape());
    let swapped = (s2.1, s2.0);
    if s1 != s2 && s1 != swapped {
        return Err(Error::Precondition(format!("shapes {s1:?} and {s2:?} are incompatible")));
    }
    if c1.dim() != c2.dim() {
        return Ok(None);
    }
    if c1 == c2 && s1 == s2 {
        return Ok(Some(EquivalenceWitness {
            a: MatrixGF::identity(c1.prime(), s1.0),
            b: MatrixGF::identity(c1.prime(), s1.1),
            rho: 0,
            transposed: false,
        }));
    }
    if c1.dim() == 0 || c1.rank_distribution() != c2.rank_distribution() {
        return Ok(None);
    }
    let mut branches = Vec::new();
    if s1 == s2 {
        branches.push(false);
    }
    if s1 == swapped && !opts.isotopy_only {
        branches.push(true);
    }
    let square = s1.0 == s1.1;
    let ideal1 = if square { Some((left_idealiser(c1)?.order, right_idealiser(c1)?.order)) } else { None };
    for transposed in branches {
        let src = if transposed { c2.transpose() } else { c2.clone() };
        if let Some((l1, r1)) = ideal1 {
            if (left_idealiser(&src)?.order, right_idealiser(&src)?.order) != (l1, r1) {
                continue;
            }
        }
        let gens: Option<Vec<Pair>> = aut2.map(|g| {
            if transposed {
                g.generators.iter().map(|(a, b)| (b.transpose(), a.transpose())).collect()
            } else {
                g.generators.clone()
            }
        });
        if let Some((a, b)) = find_isotopism(c1, &src, gens.as_deref(), index2.map(|i| (i, transposed)), &opts.budget)? {
            let w = EquivalenceWitness { a, b, rho: 0, transposed };
            debug_assert!(w.verify(c1, c2));
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// `{ (A, B) : A C B = C }`, held by generators. The order agrees with the
/// `A C B^T = C` convention.
#[derive(Clone, Debug)]
pub struct AutomorphismGroup {
    pub order: u64,
    pub generators: Vec<(MatrixGF, MatrixGF)>,
}

impl AutomorphismGroup {
    /// Every element, by closure. Only sensible for small groups.
    pub fn elements(&self, shape: (usize, usize), p: Prime) -> Vec<(MatrixGF, MatrixGF)> {
        let id = (MatrixGF::identity(p, shape.0), MatrixGF::identity(p, shape.1));
        let key = |g: &Pair| (g.0.vector(), g.1.vector());
        let mut seen = HashSet::from([key(&id)]);
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for g in &self.generators {
                let y = compose(g, &x);
                if seen.insert(key(&y)) {
                    out.push(y);
                }
            }
            i += 1;
        }
        out
    }

    /// Images of `x` under the group.
    pub fn orbit(&self, x: &MatrixGF) -> Vec<MatrixGF> {
        let (m, n) = x.shape();
        orbit_of(*x, &self.generators)
            .into_iter()
            .map(|v| MatrixGF::from_vector(x.prime(), m, n, v))
            .collect()
    }
}

pub fn automorphism_group(c: &AdditiveCode, budget: &Budget) -> Result<AutomorphismGroup> {
    if c.dim() == 0 {
        return Err(Error::ZeroCode);
    }
    if !conjugacy_applicable(c, c) {
        let elements = linear_group_search_any(c, c, true, budget)?;
        return Ok(AutomorphismGroup { order: elements.len() as u64, generators: prune_generators(&elements) });
    }
    let x1 = anchor_of(c);
    let target = ConjugacyTarget::new(c, x1);
    let basis = c.basis();
    let stabiliser = target.solve(&basis, &x1, true);
    let mut gens = idealiser_unit_generators(c)?;
    gens.extend(prune_generators(&stabiliser));
    let mut orbit = orbit_of(x1, &gens);
    let mut outside: HashSet<Vector> = HashSet::new();
    let words: Vec<MatrixGF> = c.codewords().collect();
    let wanted = anchored_signature(&words, &x1);
    let all = invertibles(c);
    let sigs = signatures(&words, &all);
    let candidates: Vec<MatrixGF> = all.into_iter().zip(sigs).filter(|(_, h)| *h == wanted).map(|(x, _)| x).collect();
    for x2 in candidates {
        let key = x2.vector();
        if orbit.contains(&key) || outside.contains(&key) {
            continue;
        }
        budget.check("automorphism search")?;
        match target.solve(&basis, &x2, false).into_iter().next() {
            Some(g) => {
                gens.push(g);
                orbit = orbit_of(x1, &gens);
            }
            None => outside.extend(orbit_of(x2, &gens)),
        }
    }
    Ok(AutomorphismGroup { order: orbit.len() as u64 * stabiliser.len() as u64, generators: gens })
}

/// Hash of the multiset of similarity classes of a square matrix set.
fn class_multiset_hash<I: Iterator<Item = MatrixGF>>(mats: I) -> u64 {
    let mut counts: BTreeMap<u64, u32> = BTreeMap::new();
    for x in mats {
        *counts.entry(x.conjugacy_invariant()).or_default() += 1;
    }
    stable_hash(&counts.into_iter().collect::<Vec<_>>())
}

/// Similarity classes of `C X^-1`. Equal for `X1` and `X2` whenever an
/// isotopism maps `C2` onto `C1` and `X2` onto `X1`.
fn anchored_signature(words: &[MatrixGF], x: &MatrixGF) -> u64 {
    let xinv = x.inverse().expect("anchor is invertible");
    class_multiset_hash(words.iter().map(|y| y.mul(&xinv)))
}

/// `x` scaled so its first nonzero coordinate is 1.
fn projective_normal(x: &MatrixGF) -> MatrixGF {
    match x.vector().leading() {
        Some(i) if x.vector().get(i) != 1 => x.scale(x.vector().get(i)),
        _ => *x,
    }
}

/// Anchored signatures of `xs`, computing one per projective point.
fn signatures(words: &[MatrixGF], xs: &[MatrixGF]) -> Vec<u64> {
    let mut points: Vec<MatrixGF> = xs.iter().map(projective_normal).collect();
    points.sort_by_key(|x| x.vector());
    points.dedup();
    let sig: HashMap<Vector, u64> = points.par_iter().map(|x| (x.vector(), anchored_signature(words, x))).collect();
    xs.iter().map(|x| sig[&projective_normal(x).vector()]).collect()
}

/// Orbit representatives of the invertible words of a square code under its
/// automorphism group, grouped by anchored signature. Built once per class
/// representative so that each equivalence test against it only needs the
/// signature of one anchor on the other side.
#[derive(Clone, Debug, Default)]
pub struct AnchorIndex {
    by_signature: HashMap<u64, Vec<MatrixGF>>,
}

impl AnchorIndex {
    pub fn new(c: &AdditiveCode, aut: &AutomorphismGroup) -> Option<AnchorIndex> {
        if !conjugacy_applicable(c, c) {
            return None;
        }
        let words: Vec<MatrixGF> = c.codewords().collect();
        let reps = orbit_representatives(&invertibles(c), &aut.generators);
        let mut by_signature: HashMap<u64, Vec<MatrixGF>> = HashMap::new();
        for (x, h) in reps.iter().zip(signatures(&words, &reps)) {
            by_signature.entry(h).or_default().push(*x);
        }
        Some(AnchorIndex { by_signature })
    }

    fn anchors(&self, signature: u64, transposed: bool) -> Vec<MatrixGF> {
        let xs = self.by_signature.get(&signature).map_or(&[][..], Vec::as_slice);
        xs.iter().map(|x| if transposed { x.transpose() } else { *x }).collect()
    }
}

/// For square codes: the multiset over invertible `X` in `C` of the similarity
/// class multiset of `C X^-1`. Invariant under `A . B` and transposition.
pub fn conjugacy_profile(c: &AdditiveCode) -> Option<u64> {
    let (m, n) = c.shape();
    if m != n || c.cardinality() > PROFILE_LIMIT {
        return None;
    }
    let words: Vec<MatrixGF> = c.codewords().collect();
    // C (aX)^-1 = C X^-1 as sets, so one X per projective point suffices
    let scalars = c.prime().value() as usize - 1;
    let mut hashes: Vec<u64> = words
        .par_iter()
        .filter(|x| x.vector().leading().is_some_and(|i| x.vector().get(i) == 1) && x.is_invertible())
        .flat_map_iter(|x| std::iter::repeat_n(anchored_signature(&words, x), scalars))
        .collect();
    hashes.sort_unstable();
    Some(stable_hash(&hashes))
}

/// For square codes too large for a conjugacy profile: how the words of rank
/// `n - 1` connect kernels to left kernels. Each word gives an edge between
/// two projective points; the hash covers the degree multisets of both sides
/// and the multiset of neighbour-degree lists, symmetrised under transposition.
pub fn kernel_profile(c: &AdditiveCode) -> Option<u64> {
    let (m, n) = c.shape();
    if m != n || c.cardinality() <= PROFILE_LIMIT {
        return None;
    }
    let edges: Vec<(Vector, Vector)> = c
        .codewords()
        .collect::<Vec<_>>()
        .par_iter()
        .filter(|x| x.rank() + 1 == n)
        .map(|x| (x.kernel().basis()[0], x.left_kernel().basis()[0]))
        .collect();
    let side = |flip: bool| {
        let mut degree: HashMap<Vector, u32> = HashMap::new();
        let mut other: HashMap<Vector, u32> = HashMap::new();
        for &(k, l) in &edges {
            let (a, b) = if flip { (l, k) } else { (k, l) };
            *degree.entry(a).or_default() += 1;
            *other.entry(b).or_default() += 1;
        }
        let mut nbrs: HashMap<Vector, Vec<u32>> = HashMap::new();
        for &(k, l) in &edges {
            let (a, b) = if flip { (l, k) } else { (k, l) };
            nbrs.entry(a).or_default().push(other[&b]);
        }
        let mut lists: Vec<Vec<u32>> = nbrs
            .into_values()
            .map(|mut v| {
                v.sort_unstable();
                v
            })
            .collect();
        lists.sort_unstable();
        let mut degrees: Vec<u32> = degree.into_values().collect();
        degrees.sort_unstable();
        stable_hash(&(degrees, lists))
    };
    let mut pair = [side(false), side(true)];
    pair.sort_unstable();
    Some(stable_hash(&pair))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub q: u32,
    /// Shape with the smaller side first.
    pub shape: (usize, usize),
    pub dim: usize,
    pub rank_distribution: Vec<(usize, u64)>,
    /// Left and right idealiser orders, sorted (square codes only).
    pub idealisers: Option<[u64; 2]>,
    pub conjugacy_profile: Option<u64>,
    #[serde(default)]
    pub kernel_profile: Option<u64>,
    /// Sorted profiles of the maximum-distance subcodes of a `d = n - 1` code.
    #[serde(default)]
    pub subcodes: Vec<u64>,
    #[serde(default)]
    pub automorphism_order: Option<u64>,
}

impl Fingerprint {
    /// The part compared when bucketing codes; excludes the lazily filled fields.
    pub fn key(&self) -> u64 {
        stable_hash(&(self.q, self.shape, self.dim, &self.rank_distribution, self.idealisers, self.conjugacy_profile, self.kernel_profile, &self.subcodes))
    }
}

/// Cheap invariants: rank distribution, idealiser orders and, for small codes,
/// the conjugacy profile.
pub fn fingerprint(c: &AdditiveCode) -> Fingerprint {
    let (m, n) = c.shape();
    let idealisers = if m == n {
        let mut o = [
            left_idealiser(c).expect("square").order,
            right_idealiser(c).expect("square").order,
        ];
        o.sort_unstable();
        Some(o)
    } else {
        None
    };
    Fingerprint {
        q: c.prime().value(),
        shape: (m.min(n), m.max(n)),
        dim: c.dim(),
        rank_distribution: c.rank_distribution().0.into_iter().collect(),
        idealisers,
        conjugacy_profile: conjugacy_profile(c),
        kernel_profile: kernel_profile(c),
        subcodes: Vec::new(),
        automorphism_order: None,
    }
}

/// Fingerprint plus the automorphism group order and, for square codes with
/// `d = n - 1`, the profiles of the contained semifield spread sets.
pub fn full_fingerprint(c: &AdditiveCode) -> Fingerprint {
    match automorphism_group(c, &Budget::default()) {
        Ok(g) => fingerprint_with_group(c, &g),
        Err(_) => fingerprint(c),
    }
}

pub fn fingerprint_with_group(c: &AdditiveCode, aut: &AutomorphismGroup) -> Fingerprint {
    let mut f = fingerprint(c);
    f.automorphism_order = Some(aut.order);
    let (m, n) = c.shape();
    let d = f.rank_distribution.iter().find(|(r, _)| *r > 0).map(|x| x.0);
    if m == n && n >= 3 && d == Some(n - 1) {
        f.subcodes = subcode_profiles(c, aut);
    }
    f
}

/// Sorted profiles of the spread sets inside `c`, computing one profile per
/// orbit of the automorphism group.
fn subcode_profiles(c: &AdditiveCode, aut: &AutomorphismGroup) -> Vec<u64> {
    let subs = crate::spread::maximum_distance_subcodes(c);
    let mut seen: HashSet<Subspace> = HashSet::new();
    let mut orbits: Vec<(AdditiveCode, usize)> = Vec::new();
    for s in subs {
        if seen.contains(s.space()) {
            continue;
        }
        let mut size = 0;
        let mut stack = vec![s.clone()];
        seen.insert(s.space().clone());
        while let Some(x) = stack.pop() {
            size += 1;
            for (a, b) in &aut.generators {
                let y = x.transform(a, b, false);
                if seen.insert(y.space().clone()) {
                    stack.push(y);
                }
            }
        }
        orbits.push((s, size));
    }
    let profiles: Vec<(u64, usize)> = orbits
        .par_iter()
        .map(|(s, size)| {
            let h = conjugacy_profile(s).unwrap_or_else(|| stable_hash(&fingerprint(s).rank_distribution));
            (h, *size)
        })
        .collect();
    let mut out: Vec<u64> = profiles.into_iter().flat_map(|(h, k)| std::iter::repeat_n(h, k)).collect();
    out.sort_unstable();
    out
}

/// Partitions `codes` into equivalence classes. Class order and representatives
/// depend only on the set of inputs: codes are processed by (fingerprint,
/// canonical bytes), and the first code of each class represents it.
pub fn classify_up_to_equivalence(
    codes: &[(String, AdditiveCode)],
    opts: &EquivalenceOptions,
) -> Result<ClassificationReport> {
    let start = Instant::now();
    let first = codes.first().ok_or_else(|| Error::Empty("no codes to classify".into()))?;
    let (m, n) = first.1.shape();
    let q = first.1.prime().value();
    let prints: Vec<Fingerprint> = codes.par_iter().map(|(_, c)| full_fingerprint(c)).collect();
    let mut order: Vec<usize> = (0..codes.len()).collect();
    order.sort_by(|&i, &j| {
        (&prints[i], codes[i].1.canonical_bytes()).cmp(&(&prints[j], codes[j].1.canonical_bytes()))
    });
    let mut reps: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut by_key: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut tests = 0u64;
    for &i in &order {
        let key = prints[i].key();
        let bucket = by_key.entry(key).or_default();
        let mut home = None;
        for &cls in bucket.iter() {
            tests += 1;
            let rep = reps[cls];
            let eq = are_equivalent(&codes[rep].1, &codes[i].1, opts).map_err(|e| match e {
                Error::Budget(msg) => Error::Budget(format!("{msg} ({} vs {})", codes[rep].0, codes[i].0)),
                other => other,
            })?;
            if eq.is_some() {
                home = Some(cls);
                break;
            }
        }
        match home {
            Some(cls) => members[cls].push(i),
            None => {
                bucket.push(reps.len());
                reps.push(i);
                members.push(vec![i]);
            }
        }
    }
    let mut report = ClassificationReport::new(q, m, n, None);
    report.classes = reps
        .iter()
        .zip(&members)
        .map(|(&r, ms)| ClassEntry {
            representative: codes[r].1.to_text(),
            size: ms.len(),
            fingerprint: prints[r].clone(),
            members: ms.iter().map(|&i| codes[i].0.clone()).collect(),
            provenance: Vec::new(),
        })
        .collect();
    report.stats.equivalence_tests = tests;
    report.stats.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}
