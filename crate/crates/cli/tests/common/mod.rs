#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn config(name: &str) -> PathBuf {
    repo_root().join("configs").join(name)
}

pub fn qkern(config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkern"))
        .arg(config)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("spawn qkern")
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Wall-clock timings are the only fields allowed to differ between runs.
pub fn mask_seconds(text: &str) -> String {
    text.lines()
        .map(|l| match l.find("\"seconds\": ") {
            Some(i) => format!("{}\"seconds\": <masked>{}", &l[..i], if l.ends_with(',') { "," } else { "" }),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// File name → contents (timings masked) of every file in `dir`.
pub fn snapshot(dir: &Path) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        files.insert(path.file_name().unwrap().to_string_lossy().into_owned(), mask_seconds(&text));
    }
    files
}
