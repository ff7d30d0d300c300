//! Writes a seeded Gaussian-cluster data set for trying out the CLI:
//!
//!     cargo run --example make_clusters -- <out-dir> [seed]
//!
//! Produces `features.csv`, `labels.csv` (the revealed few) and
//! `truth.csv` (every sample).

use std::fmt::Write as _;
use std::path::PathBuf;

use dldl::synthetic::{gaussian_clusters, ClusterSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let data = gaussian_clusters(&ClusterSpec::default(), seed)?;

    let mut features = String::new();
    for n in 0..data.features.n_samples() {
        let row: Vec<String> = data.features.sample(n).iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(features, "{}", row.join(","))?;
    }
    let mut labels = String::new();
    for (i, l) in data.labels.iter().enumerate() {
        if let Some(c) = l {
            writeln!(labels, "{i},{c}")?;
        }
    }
    let mut truth = String::new();
    for (i, c) in data.truth.iter().enumerate() {
        writeln!(truth, "{i},{c}")?;
    }

    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("features.csv"), features)?;
    std::fs::write(dir.join("labels.csv"), labels)?;
    std::fs::write(dir.join("truth.csv"), truth)?;
    println!("wrote {} samples to {}", data.truth.len(), dir.display());
    Ok(())
}
