//! Regenerates `fixtures/chiral_calibration.json`.
//!
//! Run once with `cargo run --release --example calibrate`; the acceptance
//! suite compares later runs against the written values.

use std::collections::BTreeMap;
use std::process::Command;

use confmod::chiral::{ladder, Calibration};
use confmod::tolerances::CEILING_SLACK;

fn rustc_version() -> String {
    Command::new("rustc")
        .arg("--version")
        .output()
        .ok()
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sizes = [64, 128, 256];
    let rows = ladder(&sizes)?;
    let mut env = BTreeMap::new();
    env.insert("rustc".into(), rustc_version());
    env.insert("os".into(), std::env::consts::OS.into());
    env.insert("arch".into(), std::env::consts::ARCH.into());
    env.insert("profile".into(), if cfg!(debug_assertions) { "debug" } else { "release" }.into());
    let cal = Calibration::from_rows(&rows, 42, CEILING_SLACK, env)?;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/chiral_calibration.json");
    std::fs::write(path, serde_json::to_string_pretty(&cal)? + "\n")?;
    println!("wrote {path}");
    Ok(())
}
