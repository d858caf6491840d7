//! The scripted question corpus shipped with the core crate.

use std::fs;
use std::path::PathBuf;

use ontoslice::gateway::Transcript;
use serde::Deserialize;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

#[derive(Debug, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub outcome: String,
}

pub struct GoldenCase {
    pub id: String,
    pub outcome: String,
    pub question: String,
    pub transcript: Transcript,
    pub dir: PathBuf,
}

pub fn golden_cases() -> Vec<GoldenCase> {
    let root = data_dir().join("golden");
    let manifest: Vec<ManifestEntry> =
        serde_json::from_str(&fs::read_to_string(root.join("manifest.json")).unwrap()).unwrap();
    manifest
        .into_iter()
        .map(|entry| {
            let dir = root.join(&entry.id);
            GoldenCase {
                question: fs::read_to_string(dir.join("question.txt"))
                    .unwrap()
                    .trim()
                    .to_string(),
                transcript: Transcript::from_json(
                    &fs::read_to_string(dir.join("transcript.json")).unwrap(),
                )
                .unwrap(),
                id: entry.id,
                outcome: entry.outcome,
                dir,
            }
        })
        .collect()
}

/// Rewrites golden files instead of comparing when set.
pub fn blessing() -> bool {
    std::env::var_os("ONTOSLICE_BLESS").is_some()
}
