//! Regenerates the bundled semifield catalogs from scratch.
//!
//! `cargo run --release --example generate_catalogs -- <out-dir>`

use std::collections::BTreeMap;
use std::path::PathBuf;

use mrd::catalog::{catalog_file_name, save_catalog, CatalogEntry};
use mrd::classifier::{classify_semifields, SearchOptions};
use mrd::equivalence::{left_idealiser, right_idealiser};

fn main() -> mrd::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/core/data".into()));
    let opts = SearchOptions { isotopy_only: true, ..Default::default() };
    for (q, n) in [(2u32, 4usize), (2, 5), (3, 4)] {
        let report = classify_semifields(q, n, &opts)?;
        let order = (q as u64).pow(n as u32);
        let entries = report
            .classes
            .iter()
            .enumerate()
            .map(|(i, class)| {
                let code = class.code()?;
                let (l, r) = (left_idealiser(&code)?.order, right_idealiser(&code)?.order);
                let mut metadata = BTreeMap::from([("nuclei".to_string(), format!("{l},{r}"))]);
                if l == order {
                    metadata.insert("family".into(), "field".into());
                }
                Ok(CatalogEntry {
                    name: format!("S{order}_{}", i + 1),
                    source: "search:isotopy".into(),
                    q,
                    n,
                    basis: code.basis(),
                    metadata,
                })
            })
            .collect::<mrd::Result<Vec<_>>>()?;
        let comment = format!(
            "Semifield spread sets of order {order}, one per isotopy class ({} classes).\n\
             Generated by examples/generate_catalogs.rs; matrices are right multiplications.",
            entries.len()
        );
        save_catalog(&entries, &comment, &out.join(catalog_file_name(q, n)))?;
        println!("order {order}: {} entries", entries.len());
    }
    Ok(())
}
