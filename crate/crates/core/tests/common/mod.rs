#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn run_cli(args: &[&str]) -> CliRun {
    let out = Command::new(env!("CARGO_BIN_EXE_costshift"))
        .args(args)
        .output()
        .expect("binary runs");
    CliRun {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn tmp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("costshift-{}-{name}", std::process::id()))
}

/// Replaces the given CSV columns with `*` on every row but the header.
pub fn mask_columns(csv: &str, columns: &[usize]) -> String {
    let mut out = String::new();
    for (i, line) in csv.lines().enumerate() {
        if i == 0 {
            out.push_str(line);
        } else {
            let cells: Vec<&str> = line
                .split(',')
                .enumerate()
                .map(|(k, c)| {
                    if columns.contains(&k) && !c.is_empty() {
                        "*"
                    } else {
                        c
                    }
                })
                .collect();
            out.push_str(&cells.join(","));
        }
        out.push('\n');
    }
    out
}
