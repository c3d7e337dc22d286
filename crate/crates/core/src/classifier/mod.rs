//! Isomorph-free extension search and the classification pipelines built on it.
//!
//! Codes grow one dimension at a time. At each level the search keeps one
//! representative per equivalence class, extends it by one representative of
//! each orbit of its automorphism group on the admissible cosets, and merges the
//! children into classes again. Every code of the next level containing a seed
//! has a subcode one dimension smaller that also contains it, so the levels are
//! exhaustive relative to the seeds.

mod cosets;
mod seeds;
mod tensor;

use std::cell::OnceCell;
use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::AdditiveCode;
use crate::equivalence::{
    are_equivalent_indexed, automorphism_group, fingerprint, fingerprint_with_group, left_idealiser, AnchorIndex, AutomorphismGroup, Budget,
    EquivalenceOptions, Fingerprint,
};
use crate::error::{Error, Result};
use crate::gf::{MatrixGF, Vector};
use crate::report::{ClassEntry, ClassificationReport};

pub use seeds::{eigenvalue_free_classes, pencil_seeds};
pub use tensor::{detensorize, tensorize, TrilinearForm};

/// Time, node and checkpoint settings shared by the pipelines. The default has
/// no deadline and no node limit.
#[derive(Clone, Debug)]
pub struct SearchLimits {
    pub budget: Budget,
    pub max_nodes: Option<u64>,
    /// Directory receiving one checkpoint file per completed level.
    pub checkpoint_dir: Option<PathBuf>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { budget: Budget::unlimited(), max_nodes: None, checkpoint_dir: None }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    pub isotopy_only: bool,
    pub limits: SearchLimits,
}

impl SearchOptions {
    fn equivalence(&self) -> EquivalenceOptions {
        EquivalenceOptions { isotopy_only: self.isotopy_only, budget: self.limits.budget }
    }
}

/// A code in the search together with its admissible extension cosets.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub code: AdditiveCode,
    pub d: usize,
    pub target_dim: usize,
    /// Normalised coset representatives `X` with `rank(X + c) >= d` for all `c`.
    pub frontier: Arc<Vec<Vector>>,
    /// Equal iff the codes are equal as sets.
    pub stamp: Vec<u8>,
}

impl SearchNode {
    pub fn new(code: AdditiveCode, d: usize, target_dim: usize) -> SearchNode {
        let frontier = if code.dim() < target_dim { cosets::admissible_cosets(&code, d) } else { Vec::new() };
        SearchNode::with_frontier(code, d, target_dim, frontier)
    }

    fn with_frontier(code: AdditiveCode, d: usize, target_dim: usize, frontier: Vec<Vector>) -> SearchNode {
        let stamp = code.canonical_bytes();
        SearchNode { code, d, target_dim, frontier: Arc::new(frontier), stamp }
    }

    /// One extension per orbit of `aut` on the frontier.
    pub fn children(&self, aut: &AutomorphismGroup) -> Vec<(Vector, AdditiveCode)> {
        cosets::orbit_representatives(&self.code, &self.frontier, &aut.generators)
            .into_iter()
            .map(|v| (v, self.code.with(&self.code.matrix(v))))
            .collect()
    }
}

/// One equivalence class found at a level.
#[derive(Clone, Debug)]
pub struct LevelClass {
    pub code: AdditiveCode,
    pub fingerprint: Fingerprint,
    pub automorphisms: AutomorphismGroup,
    /// Indices of the seeds some member of the class contains.
    pub seeds: BTreeSet<usize>,
    /// Number of generated codes merged into this class.
    pub merged: usize,
}

#[derive(Clone, Debug)]
pub struct Level {
    pub dim: usize,
    pub classes: Vec<LevelClass>,
    pub nodes: u64,
    pub equivalence_tests: u64,
}

struct Candidate {
    code: AdditiveCode,
    seeds: BTreeSet<usize>,
    origin: Option<(usize, Vector)>,
}

struct Merged {
    class: LevelClass,
    origin: Option<(usize, Vector)>,
}

/// Splits candidates into classes. Buckets of equal cheap fingerprints are
/// independent; within a bucket candidates are taken in canonical order so
/// the representatives do not depend on scheduling.
fn merge_classes(cands: Vec<Candidate>, opts: &SearchOptions) -> Result<(Vec<Merged>, u64)> {
    let eq = opts.equivalence();
    let prints: Vec<Fingerprint> = cands.par_iter().map(|c| fingerprint(&c.code)).collect();
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, f) in prints.iter().enumerate() {
        buckets.entry(f.key()).or_default().push(i);
    }
    let mut buckets: Vec<Vec<usize>> = buckets.into_values().collect();
    for b in buckets.iter_mut() {
        b.sort_by(|&i, &j| cands[i].code.canonical_bytes().cmp(&cands[j].code.canonical_bytes()));
    }
    let results: Vec<Result<(Vec<Merged>, u64)>> = buckets
        .par_iter()
        .map(|bucket| {
            let mut reps: Vec<Merged> = Vec::new();
            let mut indexes: Vec<OnceCell<Option<AnchorIndex>>> = Vec::new();
            let mut tests = 0u64;
            for &i in bucket {
                let cand = &cands[i];
                let mut home = None;
                for (r, rep) in reps.iter().enumerate() {
                    tests += 1;
                    let aut = &rep.class.automorphisms;
                    let index = indexes[r].get_or_init(|| AnchorIndex::new(&rep.class.code, aut));
                    if are_equivalent_indexed(&cand.code, &rep.class.code, Some(aut), index.as_ref(), &eq)?.is_some() {
                        home = Some(r);
                        break;
                    }
                }
                match home {
                    Some(r) => {
                        reps[r].class.seeds.extend(cand.seeds.iter().copied());
                        reps[r].class.merged += 1;
                    }
                    None => {
                        let aut = automorphism_group(&cand.code, &opts.limits.budget)?;
                        let mut fp = fingerprint_with_group(&cand.code, &aut);
                        fp.subcodes.clear();
                        indexes.push(OnceCell::new());
                        reps.push(Merged {
                            class: LevelClass {
                                code: cand.code.clone(),
                                fingerprint: fp,
                                automorphisms: aut,
                                seeds: cand.seeds.clone(),
                                merged: 1,
                            },
                            origin: cand.origin,
                        });
                    }
                }
            }
            Ok((reps, tests))
        })
        .collect();
    let mut all = Vec::new();
    let mut tests = 0;
    for r in results {
        let (reps, t) = r?;
        all.extend(reps);
        tests += t;
    }
    all.sort_by(|a, b| {
        (&a.class.fingerprint, a.class.code.canonical_bytes()).cmp(&(&b.class.fingerprint, b.class.code.canonical_bytes()))
    });
    Ok((all, tests))
}

#[derive(Serialize, Deserialize)]
struct CheckpointClass {
    code: String,
    seeds: Vec<usize>,
    merged: usize,
    fingerprint: Fingerprint,
    aut_order: u64,
    aut_generators: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    d: usize,
    isotopy_only: bool,
    /// Hash of the seeds' canonical forms; guards against resuming a different search.
    seeds_hash: u64,
    dim: usize,
    nodes: u64,
    equivalence_tests: u64,
    classes: Vec<CheckpointClass>,
}

const CHECKPOINT_VERSION: u32 = 2;

fn checkpoint_path(dir: &Path, sample: &AdditiveCode, d: usize, dim: usize, prune: bool) -> PathBuf {
    let (m, n) = sample.shape();
    let kind = if prune { "-extendable" } else { "" };
    dir.join(format!("level-q{}-{m}x{n}-d{d}-dim{dim}{kind}.json", sample.prime().value()))
}

fn seeds_hash(seeds: &[AdditiveCode]) -> u64 {
    crate::stable_hash(&seeds.iter().map(|s| s.canonical_bytes()).collect::<Vec<_>>())
}

fn write_checkpoint(dir: &Path, sample: &AdditiveCode, level: &Level, d: usize, opts: &SearchOptions, hash: u64, prune: bool) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let ck = Checkpoint {
        version: CHECKPOINT_VERSION,
        d,
        isotopy_only: opts.isotopy_only,
        seeds_hash: hash,
        dim: level.dim,
        nodes: level.nodes,
        equivalence_tests: level.equivalence_tests,
        classes: level
            .classes
            .iter()
            .map(|c| CheckpointClass {
                code: c.code.to_text(),
                seeds: c.seeds.iter().copied().collect(),
                merged: c.merged,
                fingerprint: c.fingerprint.clone(),
                aut_order: c.automorphisms.order,
                aut_generators: c.automorphisms.generators.iter().map(|(a, b)| (a.to_text(), b.to_text())).collect(),
            })
            .collect(),
    };
    let path = checkpoint_path(dir, sample, d, level.dim, prune);
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec_pretty(&ck)?)?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

fn level_from_checkpoint(ck: Checkpoint, p: crate::gf::Prime) -> Result<Level> {
    let classes = ck
        .classes
        .into_iter()
        .map(|c| {
            let generators = c
                .aut_generators
                .iter()
                .map(|(a, b)| Ok((MatrixGF::parse_text(p, a)?, MatrixGF::parse_text(p, b)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(LevelClass {
                code: AdditiveCode::parse_text(&c.code)?,
                fingerprint: c.fingerprint,
                automorphisms: AutomorphismGroup { order: c.aut_order, generators },
                seeds: c.seeds.into_iter().collect(),
                merged: c.merged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Level { dim: ck.dim, classes, nodes: ck.nodes, equivalence_tests: ck.equivalence_tests })
}

/// The checkpointed levels for this search, contiguous from the seed dimension.
fn read_checkpoints(dir: &Path, seeds: &[AdditiveCode], d: usize, opts: &SearchOptions, prune: bool) -> Result<Vec<Level>> {
    let sample = &seeds[0];
    let hash = seeds_hash(seeds);
    let mut levels = Vec::new();
    for dim in sample.dim().. {
        let path = checkpoint_path(dir, sample, d, dim, prune);
        if !path.exists() {
            break;
        }
        let ck: Checkpoint = serde_json::from_slice(&std::fs::read(&path)?)?;
        if ck.version != CHECKPOINT_VERSION || ck.isotopy_only != opts.isotopy_only || ck.seeds_hash != hash || ck.dim != dim {
            return Err(Error::Precondition(format!("checkpoint {} was written by a different search", path.display())));
        }
        let empty = ck.classes.is_empty();
        levels.push(level_from_checkpoint(ck, sample.prime())?);
        if empty {
            break;
        }
    }
    Ok(levels)
}

/// All levels from the seeds' dimension up to `target_dim` of codes with
/// minimum distance at least `d` containing a seed, one representative per
/// equivalence class. All seeds must share shape and dimension.
pub fn extension_levels(seeds: &[AdditiveCode], d: usize, target_dim: usize, opts: &SearchOptions) -> Result<Vec<Level>> {
    grow(seeds, d, target_dim, opts, false)
}

/// Like [`extension_levels`], but children that cannot reach `target_dim` are
/// dropped before merging, so intermediate levels only hold classes lying
/// under some code of the final level.
pub fn extendable_levels(seeds: &[AdditiveCode], d: usize, target_dim: usize, opts: &SearchOptions) -> Result<Vec<Level>> {
    grow(seeds, d, target_dim, opts, true)
}

fn grow(seeds: &[AdditiveCode], d: usize, target_dim: usize, opts: &SearchOptions, prune: bool) -> Result<Vec<Level>> {
    let first = seeds.first().ok_or_else(|| Error::Empty("no seeds".into()))?;
    let base = first.dim();
    if seeds.iter().any(|s| s.shape() != first.shape() || s.dim() != base || s.prime() != first.prime()) {
        return Err(Error::InvalidParameters("seeds differ in field, shape or dimension".into()));
    }
    if target_dim < base {
        return Err(Error::InvalidParameters(format!("target dimension {target_dim} is below the seed dimension {base}")));
    }
    for (i, s) in seeds.iter().enumerate() {
        if let Some(w) = s.low_rank_witness(d) {
            return Err(Error::Precondition(format!("seed {i} has a word of rank {} < {d}", w.rank())));
        }
    }
    let mut nodes = 0u64;
    let mut levels: Vec<Level> = Vec::new();
    let mut cands: Vec<Candidate> = seeds
        .iter()
        .enumerate()
        .map(|(i, s)| Candidate { code: s.clone(), seeds: BTreeSet::from([i]), origin: None })
        .collect();
    let mut dim = base;
    let hash = seeds_hash(seeds);
    // a resumed run restarts from the deepest saved level, already merged
    let mut resumed: Option<Level> = None;
    if let Some(dir) = &opts.limits.checkpoint_dir {
        let mut saved = read_checkpoints(dir, seeds, d, opts, prune)?;
        saved.retain(|l| l.dim <= target_dim);
        if let Some(last) = saved.pop() {
            dim = last.dim;
            levels = saved;
            resumed = Some(last);
        }
    }
    let mut parents: Vec<SearchNode> = Vec::new();
    let started = Instant::now();
    loop {
        opts.limits.budget.check(&format!("extension search at dimension {dim}"))?;
        let (merged, tests, level_nodes) = match resumed.take() {
            Some(level) => {
                let merged = level.classes.into_iter().map(|class| Merged { class, origin: None }).collect::<Vec<_>>();
                (merged, level.equivalence_tests, level.nodes)
            }
            None => {
                let (merged, tests) = merge_classes(std::mem::take(&mut cands), opts)?;
                let level_nodes = merged.iter().map(|m| m.class.merged as u64).sum();
                (merged, tests, level_nodes)
            }
        };
        // frontiers of the new representatives, inherited when the parent is known
        let frontier_started = Instant::now();
        let nodes_here: Vec<SearchNode> = if dim < target_dim {
            merged
                .iter()
                .map(|m| match m.origin {
                    Some((pi, v)) => {
                        let parent = &parents[pi];
                        let f = cosets::inherit_cosets(&parent.code, &parent.frontier, v, &m.class.code);
                        SearchNode::with_frontier(m.class.code.clone(), d, target_dim, f)
                    }
                    None => SearchNode::new(m.class.code.clone(), d, target_dim),
                })
                .collect()
        } else {
            Vec::new()
        };
        log::debug!("dimension {dim}: frontiers in {:.1?}", frontier_started.elapsed());
        log::info!(
            "dimension {dim}: {} classes from {level_nodes} codes, {tests} equivalence tests, {:.1?} elapsed",
            merged.len(),
            started.elapsed()
        );
        let level = Level {
            dim,
            classes: merged.into_iter().map(|m| m.class).collect(),
            nodes: level_nodes,
            equivalence_tests: tests,
        };
        if let Some(dir) = &opts.limits.checkpoint_dir {
            write_checkpoint(dir, first, &level, d, opts, hash, prune)?;
        }
        if dim == target_dim || level.classes.is_empty() {
            levels.push(level);
            break;
        }
        let mut next = Vec::new();
        let children_started = Instant::now();
        for (pi, (node, class)) in nodes_here.iter().zip(&level.classes).enumerate() {
            opts.limits.budget.check(&format!("extension search at dimension {}", dim + 1))?;
            let before = next.len();
            let mut children = node.children(&class.automorphisms);
            if prune {
                let rest = target_dim - dim - 1;
                let p = node.code.prime();
                children = children
                    .into_par_iter()
                    .filter(|(v, child)| cosets::can_extend(p, &cosets::inherit_cosets(&node.code, &node.frontier, *v, child), rest))
                    .collect();
            }
            for (v, child) in children {
                next.push(Candidate { code: child, seeds: class.seeds.clone(), origin: Some((pi, v)) });
            }
            nodes += (next.len() - before) as u64;
            if let Some(max) = opts.limits.max_nodes {
                if nodes > max {
                    return Err(Error::Budget(format!("node limit {max} reached at dimension {}", dim + 1)));
                }
            }
        }
        log::debug!("dimension {}: {} candidates in {:.1?}", dim + 1, next.len(), children_started.elapsed());
        levels.push(level);
        parents = nodes_here;
        cands = next;
        dim += 1;
    }
    Ok(levels)
}

/// All codes `D` containing `C` of dimension `target_dim` with minimum distance
/// at least `d`, one per equivalence class.
pub fn extend_code(c: &AdditiveCode, d: usize, target_dim: usize, opts: &SearchOptions) -> Result<Vec<AdditiveCode>> {
    let levels = extendable_levels(std::slice::from_ref(c), d, target_dim, opts)?;
    let last = levels.last().expect("at least one level");
    if last.dim != target_dim {
        return Ok(Vec::new());
    }
    Ok(last.classes.iter().map(|k| k.code.clone()).collect())
}

fn report_from_level(level: &Level, d: Option<usize>, seed_names: &[String], elapsed: Instant) -> ClassificationReport {
    let sample = level.classes.first().map(|c| &c.code);
    let (q, (m, n)) = sample.map_or((0, (0, 0)), |c| (c.prime().value(), c.shape()));
    let mut report = ClassificationReport::new(q, m, n, d);
    report.classes = level
        .classes
        .iter()
        .map(|c| ClassEntry {
            representative: c.code.to_text(),
            size: c.merged,
            fingerprint: c.fingerprint.clone(),
            members: Vec::new(),
            provenance: c.seeds.iter().filter_map(|&i| seed_names.get(i).cloned()).collect(),
        })
        .collect();
    report.stats.nodes = level.nodes;
    report.stats.equivalence_tests = level.equivalence_tests;
    report.stats.elapsed_ms = elapsed.elapsed().as_millis() as u64;
    report
}

/// Semifield spread sets of order `q^n` up to equivalence (or isotopy), i.e.
/// all additive codes in `M_n(F_q)` with minimum distance `n` and dimension `n`.
/// Every such code is equivalent to one containing the identity, so the search
/// starts from the pencils `<I, Y>`.
pub fn classify_semifields(q: u32, n: usize, opts: &SearchOptions) -> Result<ClassificationReport> {
    let start = Instant::now();
    let p = prime(q)?;
    if n < 2 {
        return Err(Error::InvalidParameters("semifield search needs n >= 2".into()));
    }
    let seeds = pencil_seeds(p, n);
    let levels = extendable_levels(&seeds, n, n, opts)?;
    let last = levels.last().expect("at least one level");
    let mut report = report_from_level(last, Some(n), &[], start);
    for c in report.classes.iter_mut() {
        c.provenance.clear();
    }
    report.q = q;
    report.m = n;
    report.n = n;
    report.stats.nodes = levels.iter().map(|l| l.nodes).sum();
    report.stats.equivalence_tests = levels.iter().map(|l| l.equivalence_tests).sum();
    Ok(report)
}

fn prime(q: u32) -> Result<crate::gf::Prime> {
    crate::gf::Prime::from_u32(q).ok_or(Error::UnsupportedField { p: q, n: 1 })
}

/// Per-dimension census of the codes grown from a set of seeds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub dim: usize,
    pub classes: usize,
    /// For each seed, the number of classes containing it (`None` once a
    /// seed stopped extending).
    pub containing: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub q: u32,
    pub n: usize,
    pub d: usize,
    pub seed_names: Vec<String>,
    /// Index of the seed equivalent to the field spread set, if present.
    pub field_seed: Option<usize>,
    pub rows: Vec<CensusRow>,
    /// True when every dimension up to the Singleton bound was reached.
    pub complete: bool,
}

impl Census {
    fn from_levels(q: u32, n: usize, d: usize, seed_names: Vec<String>, levels: &[Level], top: usize) -> Census {
        let k = seed_names.len();
        let mut alive = vec![true; k];
        let mut rows = Vec::new();
        for level in levels {
            let mut containing = Vec::with_capacity(k);
            for (s, live) in alive.iter_mut().enumerate() {
                if !*live {
                    containing.push(None);
                    continue;
                }
                let count = level.classes.iter().filter(|c| c.seeds.contains(&s)).count();
                if count == 0 {
                    *live = false;
                }
                containing.push(Some(count));
            }
            rows.push(CensusRow { dim: level.dim, classes: level.classes.len(), containing });
        }
        let reached = rows.last().map_or(0, |r| r.dim);
        // extend with empty rows when the search died out early
        let mut dim = reached + 1;
        while dim <= top && rows.last().is_some_and(|r| r.classes == 0) {
            rows.push(CensusRow { dim, classes: 0, containing: vec![None; k] });
            dim += 1;
        }
        Census { q, n, d, seed_names, field_seed: None, rows, complete: true }
    }

    /// Seeds with identical containment columns grouped together: the field
    /// first, then larger groups before smaller ones.
    pub fn grouped(&self) -> Vec<CensusColumn> {
        let mut groups: Vec<CensusColumn> = Vec::new();
        for s in 0..self.seed_names.len() {
            let values: Vec<Option<usize>> = self.rows.iter().map(|r| r.containing[s]).collect();
            let is_field = self.field_seed == Some(s);
            match groups.iter_mut().find(|g| !is_field && !g.field && g.values == values) {
                Some(g) => g.seeds.push(self.seed_names[s].clone()),
                None => groups.push(CensusColumn { field: is_field, seeds: vec![self.seed_names[s].clone()], values }),
            }
        }
        groups.sort_by(|a, b| b.field.cmp(&a.field).then(b.seeds.len().cmp(&a.seeds.len())));
        groups
    }

    /// The grouped table: `Dim`, `#`, then one column per seed group.
    pub fn to_grouped_tsv(&self) -> String {
        let groups = self.grouped();
        let order = (self.q as u64).pow(self.n as u32);
        let mut out = String::from("Dim\t#");
        for g in &groups {
            out.push('\t');
            if g.field {
                out.push_str(&format!("C(F_{order})"));
            } else {
                out.push_str(&format!("C({})", g.seeds.join(",")));
            }
        }
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            out.push_str(&format!("{}\t{}", r.dim, r.classes));
            for g in &groups {
                out.push('\t');
                match g.values[i] {
                    Some(x) => out.push_str(&x.to_string()),
                    None => out.push('-'),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Tab-separated table: dimension, class count, then one column per seed.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("Dim\t#");
        for name in &self.seed_names {
            out.push('\t');
            out.push_str(name);
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{}\t{}", r.dim, r.classes));
            for c in &r.containing {
                out.push('\t');
                match c {
                    Some(x) => out.push_str(&x.to_string()),
                    None => out.push('-'),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Seeds sharing one containment column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusColumn {
    pub field: bool,
    pub seeds: Vec<String>,
    pub values: Vec<Option<usize>>,
}

/// Codes in `M_n(F_q)` with minimum distance `d` containing one of `seeds`
/// (semifield spread sets), counted by dimension from `n` to the Singleton
/// bound `n (n - d + 1)`, together with the final level as a report.
pub fn quasi_mrd_census(
    seeds: &[(String, AdditiveCode)],
    d: usize,
    opts: &SearchOptions,
) -> Result<(Census, Vec<Level>)> {
    let first = seeds.first().ok_or_else(|| Error::Empty("no seeds".into()))?;
    let (m, n) = first.1.shape();
    if m != n || first.1.dim() != n || d == 0 || d > n {
        return Err(Error::InvalidParameters("seeds must be n-dimensional spread sets in M_n and 1 <= d <= n".into()));
    }
    let codes: Vec<AdditiveCode> = seeds.iter().map(|s| s.1.clone()).collect();
    let top = n * (n - d + 1);
    let levels = extension_levels(&codes, d, top, opts)?;
    let names = seeds.iter().map(|s| s.0.clone()).collect();
    let mut census = Census::from_levels(first.1.prime().value(), n, d, names, &levels, top);
    let order = first.1.cardinality();
    census.field_seed = codes.iter().position(|c| left_idealiser(c).is_ok_and(|i| i.order == order));
    Ok((census, levels))
}

/// Additive MRD codes in `M_n(F_q)` with minimum distance `n - 1` containing a
/// semifield spread set from `catalog`. For `q = 2` every such code contains
/// one, so the result is complete when the catalog covers every class.
pub fn classify_dminus1(
    catalog: &[(String, AdditiveCode)],
    catalog_complete: bool,
    opts: &SearchOptions,
) -> Result<ClassificationReport> {
    let start = Instant::now();
    let first = catalog.first().ok_or_else(|| Error::Empty("empty catalog".into()))?;
    let n = first.1.rows();
    if n < 2 {
        return Err(Error::InvalidParameters("d = n - 1 needs n >= 2".into()));
    }
    let codes: Vec<AdditiveCode> = catalog.iter().map(|s| s.1.clone()).collect();
    if codes.iter().any(|c| c.shape() != (n, n) || c.dim() != n) {
        return Err(Error::InvalidParameters("seeds must be n-dimensional spread sets in M_n".into()));
    }
    let levels = extendable_levels(&codes, n - 1, 2 * n, opts)?;
    let last = levels.last().expect("at least one level");
    let names: Vec<String> = catalog.iter().map(|s| s.0.clone()).collect();
    let mut report = if last.dim == 2 * n {
        report_from_level(last, Some(n - 1), &names, start)
    } else {
        let mut r = ClassificationReport::new(first.1.prime().value(), n, n, Some(n - 1));
        r.stats.elapsed_ms = start.elapsed().as_millis() as u64;
        r
    };
    report.q = first.1.prime().value();
    report.m = n;
    report.n = n;
    report.stats.nodes = levels.iter().map(|l| l.nodes).sum();
    report.stats.equivalence_tests = levels.iter().map(|l| l.equivalence_tests).sum();
    if !catalog_complete {
        report.complete = false;
        report.notes.push("the seed catalog is not known to cover every semifield class".into());
    } else if report.q != 2 {
        report.notes.push("complete among codes containing a semifield spread set".into());
    }
    Ok(report)
}

/// Additive MRD codes in `M_{m x n}(F_q)` with minimum distance `m <= n`, up to
/// equivalence, found as `m`-dimensional subspaces of `M_n(F_q)` with every
/// nonzero member invertible (up to isotopy) and mapped back.
pub fn classify_rectangular(q: u32, m: usize, n: usize, opts: &SearchOptions) -> Result<ClassificationReport> {
    let start = Instant::now();
    let p = prime(q)?;
    if m < 2 || m > n {
        return Err(Error::InvalidParameters(format!("need 2 <= m <= n, got m = {m}, n = {n}")));
    }
    let mut inner = opts.clone();
    inner.isotopy_only = true;
    let seeds = pencil_seeds(p, n);
    let levels = extendable_levels(&seeds, n, m, &inner)?;
    let last = levels.last().expect("at least one level");
    let mut report = ClassificationReport::new(q, m, n, Some(m));
    if last.dim == m {
        report.classes = last
            .classes
            .iter()
            .map(|c| {
                let code = detensorize(&c.code)?;
                Ok(ClassEntry {
                    representative: code.to_text(),
                    size: c.merged,
                    fingerprint: fingerprint(&code),
                    members: Vec::new(),
                    provenance: vec![format!("tensor:{}", crate::util::stable_hash(&c.code.canonical_bytes()))],
                })
            })
            .collect::<Result<Vec<_>>>()?;
    }
    report.stats.nodes = levels.iter().map(|l| l.nodes).sum();
    report.stats.equivalence_tests = levels.iter().map(|l| l.equivalence_tests).sum();
    report.stats.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}
