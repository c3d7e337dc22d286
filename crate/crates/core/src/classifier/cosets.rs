//! Admissible extension vectors of a code, kept as normalised coset
//! representatives modulo the code.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::codes::AdditiveCode;
use crate::gf::{rank_of, MatrixGF, Prime, Vector};

/// Scales `v` so its first nonzero coordinate is 1.
#[inline]
pub(crate) fn normalise(p: Prime, v: Vector) -> Vector {
    match v.leading() {
        Some(i) => {
            let c = v.get(i);
            if c == 1 {
                v
            } else {
                p.scale(p.inv_scalar(c), v)
            }
        }
        None => v,
    }
}

/// Normalised representative of the coset `v + C`.
#[inline]
pub(crate) fn coset_key(c: &AdditiveCode, v: Vector) -> Vector {
    normalise(c.prime(), c.space().reduce(v))
}

fn admissible(p: Prime, m: usize, n: usize, d: usize, v: Vector, words: &[Vector]) -> bool {
    words.iter().all(|&w| rank_of(p, p.add(v, w), m, n) >= d)
}

/// Every coset `v + C` (one normalised point per projective class) whose
/// members all have rank at least `d`.
pub(crate) fn admissible_cosets(c: &AdditiveCode, d: usize) -> Vec<Vector> {
    let p = c.prime();
    let (m, n) = c.shape();
    let pivots = c.space().pivots();
    let free: Vec<usize> = (0..m * n).filter(|i| !pivots.contains(i)).collect();
    let f = free.len();
    let mut words = c.codeword_vectors();
    // the zero word is checked first; it rejects most candidates
    words.sort_by_key(|w| w.support().count_ones());
    let total = p.powers(f as u32);
    let chunk = 1u64 << 12;
    let chunks = total.div_ceil(chunk);
    let mut out: Vec<Vector> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let lo = k * chunk;
            let hi = (lo + chunk).min(total);
            let words = &words;
            let free = &free;
            (lo..hi).filter_map(move |idx| {
                let digits = Vector::from_index(p, f, idx);
                let lead = digits.leading()?;
                if digits.get(lead) != 1 {
                    return None;
                }
                let mut v = Vector::ZERO;
                for (j, &pos) in free.iter().enumerate() {
                    let x = digits.get(j);
                    if x != 0 {
                        v.set(pos, x);
                    }
                }
                admissible(p, m, n, d, v, words).then_some(v)
            })
        })
        .collect();
    out.par_sort_unstable();
    out
}

/// Admissible cosets of `C + <v>` derived from those of `C`: a coset of the
/// larger code is admissible iff each of its `p` slices modulo `C` is.
pub(crate) fn inherit_cosets(parent: &AdditiveCode, valid: &[Vector], v: Vector, child: &AdditiveCode) -> Vec<Vector> {
    let p = parent.prime();
    let set: std::collections::HashSet<Vector> = valid.iter().copied().collect();
    let v = coset_key(parent, v);
    let mut out: Vec<Vector> = valid
        .par_iter()
        .filter(|&&w| w != v)
        .filter(|&&w| (1..p.value()).all(|a| set.contains(&normalise(p, p.axpy(w, a, v)))))
        .map(|&w| coset_key(child, w))
        .collect();
    out.par_sort_unstable();
    out.dedup();
    out
}

/// One representative per orbit of the group generated by `gens` acting on the
/// admissible cosets of `C` (by `X -> A X B`). Representatives are the least
/// members of their orbits in the order of `valid`.
pub(crate) fn orbit_representatives(
    c: &AdditiveCode,
    valid: &[Vector],
    gens: &[(MatrixGF, MatrixGF)],
) -> Vec<Vector> {
    let p = c.prime();
    let (m, n) = c.shape();
    let index: HashMap<Vector, u32> = valid.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let images: Vec<Vec<u32>> = gens
        .par_iter()
        .map(|(a, b)| {
            valid
                .iter()
                .map(|&v| {
                    let x = a.mul(&MatrixGF::from_vector(p, m, n, v)).mul(b);
                    *index.get(&coset_key(c, x.vector())).expect("automorphisms permute admissible cosets")
                })
                .collect()
        })
        .collect();
    let mut parent: Vec<u32> = (0..valid.len() as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for img in &images {
        for (i, &j) in img.iter().enumerate() {
            let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j));
            if a != b {
                // keep the smaller index as root so roots are orbit minima
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    (0..valid.len()).filter(|&i| find(&mut parent, i as u32) == i as u32).map(|i| valid[i]).collect()
}

/// Frontiers larger than this skip the exact lookahead; the point count
/// bound still applies.
const LOOKAHEAD_LIMIT: usize = 4096;

/// Whether `t` more dimensions can be added, i.e. whether the admissible
/// cosets `valid` (normalised and reduced modulo the code) contain all points
/// of some `t`-dimensional subspace. Only a necessary condition is checked for
/// frontiers beyond [`LOOKAHEAD_LIMIT`].
pub(crate) fn can_extend(p: Prime, valid: &[Vector], t: usize) -> bool {
    let points = (p.powers(t as u32) - 1) / (p.value() as u64 - 1);
    if t == 0 {
        return true;
    }
    if (valid.len() as u64) < points {
        return false;
    }
    if t == 1 || valid.len() > LOOKAHEAD_LIMIT {
        return true;
    }
    let mut sorted = valid.to_vec();
    sorted.sort_unstable();
    subspace_search(p, &sorted, t)
}

/// Depth-first search for a basis `b_1 < ... < b_t` inside `cands`, where each
/// candidate set keeps the points whose whole coset modulo the chosen span is
/// admissible.
fn subspace_search(p: Prime, cands: &[Vector], t: usize) -> bool {
    if t == 0 {
        return true;
    }
    let points = (p.powers(t as u32) - 1) / (p.value() as u64 - 1);
    if (cands.len() as u64) < points {
        return false;
    }
    if t == 1 {
        return true;
    }
    let set: std::collections::HashSet<Vector> = cands.iter().copied().collect();
    cands.iter().enumerate().any(|(i, &b)| {
        let next: Vec<Vector> = cands[i + 1..]
            .iter()
            .copied()
            .filter(|&u| (1..p.value()).all(|a| set.contains(&normalise(p, p.axpy(u, a, b)))))
            .collect();
        subspace_search(p, &next, t - 1)
    })
}
