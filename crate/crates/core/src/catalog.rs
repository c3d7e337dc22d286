//! Semifield catalogs and persisted classification reports.
//!
//! Catalog files are line oriented:
//!
//! ```text
//! # comment
//! entry S1
//! source search:isotopy
//! meta nuclei 3,9
//! 3 4
//! 1000
//! 0100
//! ...            (n matrices of n rows, separated by blank lines)
//! end
//! checksum <sha256 of everything above this line>
//! ```
//!
//! The matrices are the right multiplications `R_1, ..., R_n`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codes::AdditiveCode;
use crate::constructions::{field_spread_set, Presemifield};
use crate::equivalence::{are_equivalent, left_idealiser, right_idealiser, EquivalenceOptions};
use crate::error::{Error, Result};
use crate::gf::{matrix::parse_rows, MatrixGF, Prime};
use crate::report::{ClassificationReport, REPORT_VERSION};

/// Environment variable naming a directory of catalog files that replaces the
/// bundled data.
pub const CATALOG_DIR_ENV: &str = "MRD_CATALOG_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub source: String,
    pub q: u32,
    pub n: usize,
    pub basis: Vec<MatrixGF>,
    pub metadata: BTreeMap<String, String>,
}

impl CatalogEntry {
    pub fn presemifield(&self) -> Result<Presemifield> {
        Presemifield::from_right_mults(&self.name, &self.source, self.basis.clone())
    }

    pub fn spread_set(&self) -> Result<AdditiveCode> {
        AdditiveCode::from_basis(&self.basis)
    }

    fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "entry {}", self.name);
        let _ = writeln!(s, "source {}", self.source);
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "meta {k} {v}");
        }
        let _ = writeln!(s, "{} {}", self.q, self.n);
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            s.push_str(&b.to_text());
        }
        s.push_str("end\n");
        s
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses and validates catalog text. Every entry must be a semifield spread
/// set, names must be unique, and no two entries may span the same code.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    let mut body_end = text.len();
    let mut expected: Option<(usize, String)> = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(sum) = line.trim().strip_prefix("checksum ") {
            let offset = line.as_ptr() as usize - text.as_ptr() as usize;
            body_end = offset;
            expected = Some((i + 1, sum.trim().to_string()));
        }
    }
    if let Some((line, sum)) = &expected {
        let actual = sha256_hex(&text.as_bytes()[..body_end]);
        if &actual != sum {
            return Err(parse_err(*line, format!("checksum mismatch: file has {sum}, content hashes to {actual}")));
        }
    }
    let lines: Vec<(usize, &str)> =
        text[..body_end].lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.starts_with('#')).collect();
    let mut entries: Vec<CatalogEntry> = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut spans: HashMap<Vec<u8>, String> = HashMap::new();
    let mut i = 0;
    while i < lines.len() {
        let (ln, l) = lines[i];
        if l.is_empty() {
            i += 1;
            continue;
        }
        let name = l.strip_prefix("entry ").ok_or_else(|| parse_err(ln, format!("expected `entry <name>`, found {l:?}")))?.trim();
        if let Some(prev) = names.insert(name.to_string(), ln) {
            return Err(parse_err(ln, format!("duplicate entry name {name:?} (first at line {prev})")));
        }
        i += 1;
        let mut source = String::new();
        let mut metadata = BTreeMap::new();
        let header;
        loop {
            let (ln, l) = *lines.get(i).ok_or_else(|| parse_err(ln, format!("entry {name:?} is truncated")))?;
            i += 1;
            if let Some(s) = l.strip_prefix("source ") {
                source = s.trim().to_string();
            } else if let Some(m) = l.strip_prefix("meta ") {
                let (k, v) = m.trim().split_once(' ').ok_or_else(|| parse_err(ln, "meta needs a key and a value"))?;
                metadata.insert(k.to_string(), v.trim().to_string());
            } else if !l.is_empty() {
                header = (ln, l);
                break;
            }
        }
        let nums: Vec<usize> = header
            .1
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(header.0, format!("bad `q n` line: {e}")))?;
        let [q, n] = nums[..] else {
            return Err(parse_err(header.0, "expected `q n`"));
        };
        let p = Prime::from_u32(q as u32).ok_or_else(|| parse_err(header.0, format!("unsupported q = {q}")))?;
        let mut basis = Vec::new();
        let mut block: Vec<&str> = Vec::new();
        let mut block_start = 0;
        loop {
            let (ln, l) = *lines.get(i).ok_or_else(|| parse_err(header.0, format!("entry {name:?} has no `end`")))?;
            i += 1;
            if l == "end" || l.is_empty() {
                if !block.is_empty() {
                    basis.push(parse_rows(p, &block, block_start)?);
                    block.clear();
                }
                if l == "end" {
                    break;
                }
            } else {
                if block.is_empty() {
                    block_start = ln;
                }
                block.push(l);
            }
        }
        if basis.len() != n || basis.iter().any(|b| b.shape() != (n, n)) {
            return Err(parse_err(header.0, format!("entry {name:?} needs {n} matrices of size {n}x{n}")));
        }
        let entry = CatalogEntry { name: name.to_string(), source, q: q as u32, n, basis, metadata };
        entry.presemifield().map_err(|e| match e {
            Error::NotSpreadSet(msg) => Error::NotSpreadSet(format!("catalog entry at line {}: {msg}", header.0)),
            other => other,
        })?;
        let key = entry.spread_set()?.canonical_bytes();
        if let Some(other) = spans.insert(key, name.to_string()) {
            return Err(parse_err(header.0, format!("entry {name:?} spans the same spread set as {other:?}")));
        }
        entries.push(entry);
    }
    Ok(entries)
}

pub fn load_catalog(path: &Path) -> Result<Vec<CatalogEntry>> {
    parse_catalog(&std::fs::read_to_string(path)?)
}

/// Catalog text with a trailing checksum line.
pub fn catalog_text(entries: &[CatalogEntry], comment: &str) -> String {
    let mut s = String::new();
    for line in comment.lines() {
        let _ = writeln!(s, "# {line}");
    }
    for e in entries {
        s.push_str(&e.to_text());
    }
    let sum = sha256_hex(s.as_bytes());
    let _ = writeln!(s, "checksum {sum}");
    s
}

pub fn save_catalog(entries: &[CatalogEntry], comment: &str, path: &Path) -> Result<()> {
    std::fs::write(path, catalog_text(entries, comment))?;
    Ok(())
}

const BUNDLED: &[(u32, usize, &str)] = &[
    (2, 4, include_str!("../data/semifields-16.txt")),
    (2, 5, include_str!("../data/semifields-32.txt")),
    (3, 4, include_str!("../data/semifields-81.txt")),
];

pub fn catalog_file_name(q: u32, n: usize) -> String {
    format!("semifields-{}.txt", (q as u64).pow(n as u32))
}

/// The semifield catalog of order `q^n`: from `dir` if given, else from the
/// directory in [`CATALOG_DIR_ENV`], else the bundled data.
pub fn semifield_catalog(q: u32, n: usize, dir: Option<&Path>) -> Result<Vec<CatalogEntry>> {
    let env_dir = std::env::var_os(CATALOG_DIR_ENV).map(PathBuf::from);
    if let Some(d) = dir.map(Path::to_path_buf).or(env_dir) {
        let path = d.join(catalog_file_name(q, n));
        if path.exists() {
            return load_catalog(&path);
        }
    }
    match bundled_text(q, n) {
        Some(text) => parse_catalog(text),
        None => Err(Error::Precondition(format!(
            "no catalog for order {}^{n}; supply {} via --catalog or {CATALOG_DIR_ENV}",
            q,
            catalog_file_name(q, n)
        ))),
    }
}

/// Raw text of a bundled catalog.
pub fn bundled_text(q: u32, n: usize) -> Option<&'static str> {
    BUNDLED.iter().find(|b| b.0 == q && b.1 == n).map(|b| b.2)
}

/// Orders with a bundled catalog.
pub fn bundled_orders() -> Vec<(u32, usize)> {
    BUNDLED.iter().map(|b| (b.0, b.1)).collect()
}

#[derive(Serialize, Deserialize)]
struct ReportEnvelope {
    version: u32,
    sha256: String,
}

/// Writes a header line (version and SHA-256 of the body) followed by the
/// report as JSON.
pub fn report_text(report: &ClassificationReport) -> Result<String> {
    let body = serde_json::to_string_pretty(report)?;
    let head = serde_json::to_string(&ReportEnvelope { version: REPORT_VERSION, sha256: sha256_hex(body.as_bytes()) })?;
    Ok(format!("{head}\n{body}\n"))
}

pub fn parse_report(text: &str) -> Result<ClassificationReport> {
    let (head, body) = text.split_once('\n').ok_or_else(|| Error::Report("missing header line".into()))?;
    let env: ReportEnvelope = serde_json::from_str(head).map_err(|e| Error::Report(format!("bad header: {e}")))?;
    if env.version != REPORT_VERSION {
        return Err(Error::Report(format!("report version {} is not supported (expected {REPORT_VERSION})", env.version)));
    }
    let body = body.strip_suffix('\n').unwrap_or(body);
    if sha256_hex(body.as_bytes()) != env.sha256 {
        return Err(Error::Report("checksum mismatch: the report is truncated or corrupted".into()));
    }
    let report: ClassificationReport = serde_json::from_str(body)?;
    if report.version != REPORT_VERSION {
        return Err(Error::Report(format!("report body version {} is not supported", report.version)));
    }
    Ok(report)
}

pub fn save_report(report: &ClassificationReport, path: &Path) -> Result<()> {
    std::fs::write(path, report_text(report)?)?;
    Ok(())
}

pub fn load_report(path: &Path) -> Result<ClassificationReport> {
    parse_report(&std::fs::read_to_string(path)?)
}

/// Outcome of re-checking an entry's family metadata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribution {
    pub name: String,
    pub family: Option<String>,
    pub left_nucleus: u64,
    pub right_nucleus: u64,
    /// Checks that were possible, with their results.
    pub checks: Vec<(String, bool)>,
}

impl Attribution {
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

/// Re-verifies what the metadata claims: `family field` must be equivalent to
/// the field spread set, `nuclei a,b` must match the idealiser orders.
pub fn verify_catalog_against_families(catalog: &[CatalogEntry]) -> Result<Vec<Attribution>> {
    catalog
        .iter()
        .map(|e| {
            let code = e.spread_set()?;
            let l = left_idealiser(&code)?.order;
            let r = right_idealiser(&code)?.order;
            let family = e.metadata.get("family").cloned();
            let mut checks = Vec::new();
            if family.as_deref() == Some("field") {
                let p = code.prime();
                let field = field_spread_set(p, e.n)?.spread_set();
                let ok = are_equivalent(&field, &code, &EquivalenceOptions::default())?.is_some();
                checks.push(("equivalent to the field spread set".to_string(), ok));
                checks.push((format!("left idealiser of order {}", field.cardinality()), l == field.cardinality()));
            }
            if let Some(nuc) = e.metadata.get("nuclei") {
                let claimed: Vec<u64> = nuc.split(',').filter_map(|x| x.trim().parse().ok()).collect();
                checks.push((format!("idealiser orders [{nuc}]"), claimed == [l, r]));
            }
            Ok(Attribution { name: e.name.clone(), family, left_nucleus: l, right_nucleus: r, checks })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_catalog() -> String {
        let f = field_spread_set(Prime::Two, 2).unwrap();
        let e = CatalogEntry {
            name: "F4".into(),
            source: "test".into(),
            q: 2,
            n: 2,
            basis: f.right_mults().to_vec(),
            metadata: BTreeMap::from([("family".to_string(), "field".to_string())]),
        };
        catalog_text(&[e], "tiny")
    }

    #[test]
    fn round_trip_and_checksum() {
        let text = tiny_catalog();
        let entries = parse_catalog(&text).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(catalog_text(&entries, "tiny"), text);
        let tampered = text.replacen("source test", "source tset", 1);
        assert!(matches!(parse_catalog(&tampered), Err(Error::Parse { .. })));
    }

    #[test]
    fn zero_divisor_is_rejected() {
        let text = "entry bad\nsource test\n2 2\n10\n01\n\n11\n11\nend\n";
        let err = parse_catalog(text).unwrap_err();
        assert!(matches!(err, Error::NotSpreadSet(_)), "{err}");
    }

    #[test]
    fn duplicates_are_rejected() {
        let one = "entry a\n2 2\n10\n01\n\n01\n11\nend\n";
        let same_span = "entry b\n2 2\n10\n01\n\n11\n10\nend\n";
        assert!(parse_catalog(&format!("{one}{same_span}")).is_err());
        assert!(parse_catalog(&format!("{one}{one}")).is_err());
    }

    #[test]
    fn report_round_trip_and_corruption() {
        let mut r = ClassificationReport::new(2, 4, 4, Some(3));
        r.notes.push("x".into());
        let text = report_text(&r).unwrap();
        assert_eq!(parse_report(&text).unwrap(), r);
        assert!(matches!(parse_report(&text[..text.len() - 10]), Err(Error::Report(_))));
        let bumped = text.replacen("\"version\":1", "\"version\":2", 1);
        assert!(matches!(parse_report(&bumped), Err(Error::Report(_))));
    }

    #[test]
    fn field_metadata_is_checked() {
        let entries = parse_catalog(&tiny_catalog()).unwrap();
        let att = verify_catalog_against_families(&entries).unwrap();
        assert!(att[0].consistent());
        assert_eq!(att[0].left_nucleus, 4);
    }
}
