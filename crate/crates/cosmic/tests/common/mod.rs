#![allow(dead_code)]

use std::path::{Path, PathBuf};

use cosmic::io::{write_cemb, write_manifest, Manifest};
use cosmic_core::{EmbeddingMatrix, PairedDataset};

/// Runs the CLI in-process, returning (exit code, stdout, stderr).
pub fn cosmic(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cosmic").chain(args.iter().copied());
    let code = cosmic::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Writes both sides of `pairs` as `source.cemb` and `summary.cemb` in `dir`.
pub fn write_pairs(dir: &Path, pairs: &PairedDataset) -> (PathBuf, PathBuf) {
    let source = dir.join("source.cemb");
    let summary = dir.join("summary.cemb");
    write_cemb(pairs.source(), &source).unwrap();
    write_cemb(pairs.summary(), &summary).unwrap();
    (source, summary)
}

/// Writes `matrix` and a manifest naming it `name`; returns the manifest path.
pub fn write_set(dir: &Path, name: &str, matrix: &EmbeddingMatrix) -> PathBuf {
    let cemb = dir.join(format!("{name}.cemb"));
    write_cemb(matrix, &cemb).unwrap();
    let manifest = Manifest {
        dataset_name: "synthetic".into(),
        embedder_name: "none".into(),
        summarizer_name: name.into(),
        embedding_file: cemb.clone(),
        ids_file: cosmic::io::ids_path(&cemb),
        created_by: "tests".into(),
        extra: Default::default(),
    };
    let path = dir.join(format!("{name}.manifest"));
    write_manifest(&manifest, &path).unwrap();
    path
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
