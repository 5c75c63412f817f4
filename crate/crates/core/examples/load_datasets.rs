//! Reading dense CSV and svmlight files, and writing a generated set back out.

use alrl::data::{load_dataset, save_dense_csv, DataFormat};
use alrl::prelude::*;

fn main() -> Result<()> {
    let digits = load_dataset(concat!(env!("CARGO_MANIFEST_DIR"), "/data/digits1000.csv"), DataFormat::DenseCsv)?;
    println!("digits: {} x {}, classes {:?}", digits.len(), digits.dim(), digits.class_counts());

    let dir = std::env::temp_dir().join("alrl-load-example");
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
    let svm = dir.join("tiny.svm");
    std::fs::write(&svm, "# label idx:val\n+1 1:0.5 3:2\n-1 2:1.5\n+1 1:0.1 2:0.2 3:0.3\n")
        .map_err(|source| Error::Io { path: svm.clone(), source })?;
    let tiny = load_dataset(&svm, DataFormat::SparseSvmlight)?;
    println!("svmlight: {:?}, labels {:?} named {:?}", tiny.features.dim(), tiny.labels, tiny.class_names);

    let out = dir.join("fig1.csv");
    save_dense_csv(&SynthSpec::default().generate()?, &out)?;
    let back = load_dataset(&out, DataFormat::DenseCsv)?;
    println!("wrote and reread {} rows to {}", back.len(), out.display());
    Ok(())
}
