#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nmr-squeeze"));
    cmd.env_remove("SOURCE_DATE_EPOCH");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn reference_device() -> Value {
    json!({
        "EJ_over_h": 4e9,
        "Omega_over_2pi": 10e9,
        "n_g": 0.6,
        "m": 0,
        "Cg_over_CSigma": 0.1,
        "V0": 2e-6,
        "B": 0.2,
        "W": 1e-6,
        "omega_a_over_2pi": 3e9,
        "omega_b_over_2pi": 1.5e9,
        "x0": 1e-12
    })
}

pub fn physical_config() -> Value {
    json!({ "units": "physical", "device": reference_device() })
}

pub fn write_config(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Header and numeric rows of a CSV, skipping `#` lines; text cells are NaN.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

pub fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}
