//! Kernel-space decomposition of minimum-rank codewords, the induced partial
//! spread, and extraction of semifield spread sets contained in a code.

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use rayon::prelude::*;

use crate::codes::AdditiveCode;
use crate::constructions::Presemifield;
use crate::equivalence::Budget;
use crate::error::{Error, Result};
use crate::gf::{MatrixGF, Prime, Subspace, Vector};
use crate::util::stable_hash;

/// `C_U = { X in C : U <= ker(X) }` for one kernel `U` of a minimum-rank word.
/// Kernels are left kernels `{ u : u X = 0 }` in F_p^m.
#[derive(Clone, Debug)]
pub struct KernelSpace {
    pub kernel: Subspace,
    pub code: AdditiveCode,
}

#[derive(Clone, Debug)]
pub struct KernelSpaceFamily {
    pub minimum_distance: usize,
    pub members: Vec<KernelSpace>,
}

impl KernelSpaceFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of distinct nonzero words covered, `sum (|C_U| - 1)`.
    pub fn covered(&self) -> u64 {
        self.members.iter().map(|k| k.code.cardinality() - 1).sum()
    }
}

/// Gaussian binomial `[m choose k]_p`.
pub fn gaussian_binomial(p: Prime, m: usize, k: usize) -> u64 {
    if k > m {
        return 0;
    }
    let q = p.value() as u64;
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num *= q.pow((m - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Groups the minimum-rank words of an MRD code by kernel.
pub fn kernel_space_family(c: &AdditiveCode) -> Result<KernelSpaceFamily> {
    let p = c.prime();
    let (m, n) = c.shape();
    let d = c.minimum_distance()?;
    let words: Vec<MatrixGF> = c.codewords().collect();
    let kernels: Vec<Subspace> = words
        .par_iter()
        .filter(|x| !x.is_zero() && x.rank() == d)
        .map(|x| x.left_kernel())
        .collect();
    let mut grouped: BTreeMap<Subspace, u64> = BTreeMap::new();
    for k in kernels {
        *grouped.entry(k).or_default() += 1;
    }
    let mut members = Vec::with_capacity(grouped.len());
    for (kernel, count) in grouped {
        // C_U is the F_p-linear condition u X = 0 for u in a basis of U
        let sub = c.space().restrict(kernel.dim() * n, |v| {
            let x = MatrixGF::from_vector(p, m, n, v);
            let mut out = Vector::ZERO;
            for (i, &u) in kernel.basis().iter().enumerate() {
                out = out.or(x.left_apply(u).shift_up(i * n));
            }
            out
        });
        let code = AdditiveCode::from_subspace(m, n, sub);
        if code.cardinality() != count + 1 {
            return Err(Error::Invariant(format!(
                "kernel class of size {count} spans {} words",
                code.cardinality() - 1
            )));
        }
        members.push(KernelSpace { kernel, code });
    }
    let family = KernelSpaceFamily { minimum_distance: d, members };
    let expected = gaussian_binomial(p, m, d);
    let mrd = c.is_mrd().is_mrd;
    if mrd && (family.len() as u64 != expected || family.members.iter().any(|k| k.code.dim() != n)) {
        return Err(Error::Invariant(format!(
            "MRD code gives {} kernel spaces, expected {expected} of dimension {n}",
            family.len()
        )));
    }
    if !mrd {
        return Err(Error::Invariant("code is not MRD; kernel spaces need not form a partial spread".into()));
    }
    Ok(family)
}

/// A partial `t`-spread of F_p^ambient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSpread {
    pub prime: Prime,
    pub ambient: usize,
    pub t: usize,
    pub members: Vec<Subspace>,
}

impl PartialSpread {
    pub fn new(prime: Prime, ambient: usize, t: usize, members: Vec<Subspace>) -> Result<PartialSpread> {
        for (i, a) in members.iter().enumerate() {
            if a.dim() != t || a.ambient_dim() != ambient {
                return Err(Error::InvalidParameters(format!("member {i} is not a {t}-subspace of F^{ambient}")));
            }
            for b in &members[i + 1..] {
                if a.intersection(b).dim() != 0 {
                    return Err(Error::InvalidParameters("members intersect nontrivially".into()));
                }
            }
        }
        Ok(PartialSpread { prime, ambient, t, members })
    }

    /// Nonzero vectors outside every member.
    pub fn uncovered(&self) -> Vec<Vector> {
        let covered: HashSet<Vector> = self.members.iter().flat_map(|s| s.elements()).collect();
        Subspace::full(self.prime, self.ambient)
            .elements()
            .into_iter()
            .filter(|v| !v.is_zero() && !covered.contains(v))
            .collect()
    }
}

/// The kernel spaces of `C` as subspaces of `C` itself (coordinates in its basis).
pub fn partial_spread_of(c: &AdditiveCode) -> Result<PartialSpread> {
    let fam = kernel_space_family(c)?;
    let k = c.dim();
    let p = c.prime();
    let members = fam
        .members
        .iter()
        .map(|ks| {
            Subspace::span(
                p,
                k,
                ks.code
                    .space()
                    .basis()
                    .iter()
                    .map(|&v| Vector::from_digits(&c.space().coordinates(v).expect("subcode"))),
            )
        })
        .collect();
    let t = c.cols();
    Ok(PartialSpread { prime: p, ambient: k, t, members })
}

/// Membership by dense index: a bitmap for small ambient spaces.
enum IndexSet {
    Dense(Vec<bool>),
    Sparse(HashSet<u64>),
}

impl IndexSet {
    fn new<I: Iterator<Item = u64>>(p: Prime, ambient: usize, members: I) -> IndexSet {
        let size = p.powers(ambient as u32);
        if size <= 1 << 24 {
            let mut bits = vec![false; size as usize];
            for i in members {
                bits[i as usize] = true;
            }
            IndexSet::Dense(bits)
        } else {
            IndexSet::Sparse(members.collect())
        }
    }

    #[inline]
    fn contains(&self, i: u64) -> bool {
        match self {
            IndexSet::Dense(bits) => bits[i as usize],
            IndexSet::Sparse(set) => set.contains(&i),
        }
    }
}

/// Every `t`-dimensional subspace whose nonzero vectors all lie in `allowed`.
/// Each subspace is produced once, through its greedy basis (each basis vector
/// is the least element, by index, outside the span of its predecessors).
pub fn subspaces_within(
    p: Prime,
    ambient: usize,
    allowed: &[Vector],
    t: usize,
    limit: Option<usize>,
    budget: &Budget,
) -> Result<Vec<Vec<Vector>>> {
    let mut sorted: Vec<(u64, Vector)> = allowed.iter().map(|v| (v.to_index(p, ambient), *v)).collect();
    sorted.sort_unstable_by_key(|x| x.0);
    sorted.dedup_by_key(|x| x.0);
    let index = IndexSet::new(p, ambient, sorted.iter().map(|x| x.0));
    // first vectors are the least element of their line
    let firsts: Vec<usize> = (0..sorted.len())
        .filter(|&i| {
            let (idx, v) = sorted[i];
            (2..p.value()).all(|c| p.scale(c, v).to_index(p, ambient) > idx)
        })
        .collect();
    let cap = limit.unwrap_or(usize::MAX);
    let all_candidates: Vec<usize> = (0..sorted.len()).collect();
    let found: Vec<Result<Vec<Vec<Vector>>>> = firsts
        .par_iter()
        .map(|&i| {
            let mut out = Vec::new();
            let search = GreedySearch { p, ambient, sorted: &sorted, index: &index, t, cap, budget };
            search.extend(&[sorted[i].1], &[Vector::ZERO], i, &all_candidates, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for f in found {
        all.extend(f?);
        if all.len() >= cap {
            all.truncate(cap);
            break;
        }
    }
    Ok(all)
}

struct GreedySearch<'a> {
    p: Prime,
    ambient: usize,
    sorted: &'a [(u64, Vector)],
    index: &'a IndexSet,
    t: usize,
    cap: usize,
    budget: &'a Budget,
}

impl GreedySearch<'_> {
    /// `basis` ends with the vector `sorted[last]` just added to `span_before`
    /// (the span of the earlier basis vectors). `cands` are the vectors that
    /// were admissible before that addition.
    fn extend(
        &self,
        basis: &[Vector],
        span_before: &[Vector],
        last: usize,
        cands: &[usize],
        out: &mut Vec<Vec<Vector>>,
    ) -> Result<()> {
        let p = self.p;
        if basis.len() == self.t {
            out.push(basis.to_vec());
            return Ok(());
        }
        self.budget.check("subspace search")?;
        let u = *basis.last().expect("nonempty basis");
        // span after adding u
        let mut span = span_before.to_vec();
        for c in 1..p.value() {
            let cu = p.scale(c, u);
            span.extend(span_before.iter().map(|&w| p.add(w, cu)));
        }
        // v stays admissible if every a (v + c u + w) is allowed and not below v
        let next: Vec<usize> = cands
            .iter()
            .copied()
            .filter(|&j| j > last)
            .filter(|&j| {
                let (vidx, v) = self.sorted[j];
                span[span_before.len()..].iter().all(|&w| {
                    let x = p.add(v, w);
                    (1..p.value()).all(|a| {
                        let xi = p.scale(a, x).to_index(p, self.ambient);
                        xi >= vidx && self.index.contains(xi)
                    })
                })
            })
            .collect();
        let remaining = self.t - basis.len();
        if next.len() < remaining {
            return Ok(());
        }
        for (pos, &j) in next.iter().enumerate() {
            if out.len() >= self.cap {
                return Ok(());
            }
            let mut b = basis.to_vec();
            b.push(self.sorted[j].1);
            self.extend(&b, &span, j, &next[pos..], out)?;
        }
        Ok(())
    }
}

/// Whether no `t`-subspace meets every member trivially; otherwise a witness.
pub fn is_maximal_partial_spread(d: &PartialSpread, budget: &Budget) -> Result<(bool, Option<Subspace>)> {
    let free = d.uncovered();
    let hit = subspaces_within(d.prime, d.ambient, &free, d.t, Some(1), budget)?;
    Ok(match hit.into_iter().next() {
        Some(b) => (false, Some(Subspace::span(d.prime, d.ambient, b))),
        None => (true, None),
    })
}

/// All subcodes of a square code of dimension `n` whose nonzero words are
/// invertible, i.e. the semifield spread sets inside `C`.
pub fn maximum_distance_subcodes(c: &AdditiveCode) -> Vec<AdditiveCode> {
    let (m, n) = c.shape();
    if m != n || c.dim() < n {
        return Vec::new();
    }
    let p = c.prime();
    let k = c.dim();
    // search in coordinates with respect to the code's basis
    let allowed: Vec<Vector> = (0..c.cardinality())
        .into_par_iter()
        .filter_map(|i| {
            let coords = Vector::from_index(p, k, i);
            let x = c.matrix(c.space().combine(&coords.digits(k)));
            x.is_invertible().then_some(coords)
        })
        .collect();
    let found = subspaces_within(p, k, &allowed, n, None, &Budget::unlimited()).expect("unlimited budget");
    let mut codes: Vec<AdditiveCode> = found
        .into_iter()
        .map(|b| {
            let mats = b.iter().map(|v| c.space().combine(&v.digits(k)));
            AdditiveCode::from_subspace(n, n, Subspace::span(p, n * n, mats))
        })
        .collect();
    codes.sort_by_key(|s| s.canonical_bytes());
    codes
}

fn check_dminus1(c: &AdditiveCode) -> Result<()> {
    let (m, n) = c.shape();
    if m != n {
        return Err(Error::Precondition("square code required".into()));
    }
    let mrd = c.is_mrd();
    if !mrd.is_mrd || mrd.minimum_distance + 1 != n {
        return Err(Error::Precondition(format!(
            "need an MRD code with d = n - 1 = {}, got d = {} (MRD: {})",
            n - 1,
            mrd.minimum_distance,
            mrd.is_mrd
        )));
    }
    Ok(())
}

/// The semifield spread sets inside an MRD code with `d = n - 1`.
pub fn extract_semifield_subcodes(c: &AdditiveCode) -> Result<Vec<Presemifield>> {
    check_dminus1(c)?;
    maximum_distance_subcodes(c)
        .iter()
        .enumerate()
        .map(|(i, s)| Presemifield::from_spread_set(&format!("sub{i}"), "extracted", s))
        .collect()
}

fn dump_counterexample(c: &AdditiveCode, reason: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("mrd-counterexample-{:016x}.txt", stable_hash(&c.canonical_bytes())));
    let body = format!("# {reason}\n{}", c.to_text());
    // the dump is best effort; the error below carries the reason regardless
    let _ = std::fs::write(&path, body);
    path
}

/// Splits a binary MRD code with `d = n - 1` as `{ a * x - b o x }`: two spread
/// sets that meet trivially and span the code. Any failure contradicts the
/// structure theorem for such codes; the code is dumped for inspection.
pub fn decompose_as_two_presemifields(c: &AdditiveCode) -> Result<(Presemifield, Presemifield)> {
    if c.prime() != Prime::Two {
        return Err(Error::Precondition("decomposition applies to binary codes only".into()));
    }
    check_dminus1(c)?;
    let n = c.rows();
    let subs = maximum_distance_subcodes(c);
    let fail = |why: String| {
        let path = dump_counterexample(c, &why);
        Error::Invariant(format!("{why}; code written to {}", path.display()))
    };
    if subs.len() != 2 {
        return Err(fail(format!("expected exactly 2 spread sets, found {}", subs.len())));
    }
    let (s, t) = (&subs[0], &subs[1]);
    if s.space().intersection(t.space()).dim() != 0 {
        return Err(fail("the two spread sets intersect nontrivially".into()));
    }
    if s.space().sum(t.space()).dim() != 2 * n {
        return Err(fail("the two spread sets do not span the code".into()));
    }
    Ok((
        Presemifield::from_spread_set("first", "decomposition", s)?,
        Presemifield::from_spread_set("second", "decomposition", t)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{delsarte_gabidulin, field_spread_set};
    use crate::equivalence::{are_equivalent, EquivalenceOptions};

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(Prime::Two, 4, 3), 15);
        assert_eq!(gaussian_binomial(Prime::Two, 5, 4), 31);
        assert_eq!(gaussian_binomial(Prime::Three, 4, 3), 40);
        assert_eq!(gaussian_binomial(Prime::Two, 4, 2), 35);
    }

    #[test]
    fn family_of_dg_code() {
        let c = delsarte_gabidulin(Prime::Two, 4, 2, 1).unwrap();
        let fam = kernel_space_family(&c).unwrap();
        assert_eq!(fam.len(), 15);
        assert!(fam.members.iter().all(|k| k.code.dim() == 4 && k.kernel.dim() == 1));
        assert_eq!(fam.covered(), 225);
        let f16 = field_spread_set(Prime::Two, 4).unwrap().spread_set();
        let single = kernel_space_family(&f16).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.members[0].code, f16);
    }

    #[test]
    fn partial_spread_counts() {
        let c = delsarte_gabidulin(Prime::Two, 4, 2, 1).unwrap();
        let d = partial_spread_of(&c).unwrap();
        assert_eq!((d.ambient, d.t, d.members.len()), (8, 4, 15));
        assert_eq!(d.uncovered().len(), 30);
        let (maximal, witness) = is_maximal_partial_spread(&d, &Budget::unlimited()).unwrap();
        assert!(!maximal);
        let w = witness.unwrap();
        assert!(d.members.iter().all(|m| m.intersection(&w).dim() == 0));
    }

    #[test]
    fn small_partial_spreads() {
        let p = Prime::Two;
        let e = |i: usize| Vector::ZERO.with(i, 1);
        let one = PartialSpread::new(p, 4, 2, vec![Subspace::span(p, 4, [e(0), e(1)])]).unwrap();
        let (maximal, w) = is_maximal_partial_spread(&one, &Budget::unlimited()).unwrap();
        assert!(!maximal && w.is_some());
        // lines of the F_4-spread of F_2^4: 5 lines, a full spread
        let f4 = field_spread_set(p, 2).unwrap().spread_set();
        let mut members = vec![Subspace::span(p, 4, [e(0), e(1)])];
        for x in f4.codewords() {
            // graph { (u, u X) }
            members.push(Subspace::span(p, 4, (0..2).map(|i| e(i + 2).or(x.row(i)))));
        }
        let full = PartialSpread::new(p, 4, 2, members).unwrap();
        assert!(full.uncovered().is_empty());
        assert!(is_maximal_partial_spread(&full, &Budget::unlimited()).unwrap().0);
    }

    #[test]
    fn dg_splits_into_two_fields() {
        let c = delsarte_gabidulin(Prime::Two, 4, 2, 1).unwrap();
        let subs = extract_semifield_subcodes(&c).unwrap();
        assert_eq!(subs.len(), 2);
        let f16 = field_spread_set(Prime::Two, 4).unwrap().spread_set();
        for s in &subs {
            let w = are_equivalent(&f16, &s.spread_set(), &EquivalenceOptions::default()).unwrap();
            assert!(w.is_some());
        }
        let (a, b) = decompose_as_two_presemifields(&c).unwrap();
        let span = a.spread_set().space().sum(b.spread_set().space());
        assert_eq!(span.cardinality(), 256);
    }

    #[test]
    fn q3_decomposition_rejected() {
        let c = delsarte_gabidulin(Prime::Three, 4, 2, 1).unwrap();
        assert!(matches!(decompose_as_two_presemifields(&c), Err(Error::Precondition(_))));
    }
}
