use std::path::Path;
use std::process::{Command, Output};

/// One fixture per solve subcommand.
pub const FIXTURES: &[(&str, &[&str])] = &[
    ("tri", &["tri", "--f1", "0.1,0.2", "--f2", "-0.3,0"]),
    ("quad", &["quad", "--f1", "-0.28,0.12", "--f2", "0.6,0.24"]),
    (
        "quad-mixmatch",
        &["quad-mixmatch", "--f1", "0.3,-0.1", "--p", "0.2,0.25"],
    ),
    ("quad-family", &["quad-family", "--p", "0.2,0.25", "--alpha", "0.3,0.1"]),
    ("pent", &["pent", "--f1", "0.5,0", "--f2", "0,0.3"]),
    ("hex", &["hex", "--f1", "0.3,0.1", "--f2", "-0.2,0.25"]),
    ("hex-free", &["hex", "--f1", "0,0", "--f2", "0,0"]),
    (
        "hex-from-pentagram",
        &["hex-from-pentagram", "--f3", "0.2,0.1", "--f4", "-0.3,0.2"],
    ),
    (
        "hex-from-brianchon",
        &["hex-from-brianchon", "--f5", "0.1,0.2", "--x", "1.0", "--y", "2.0"],
    ),
];

pub fn poncelet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poncelet"))
        .args(args)
        .env_remove("PONCELET_CONFIG")
        .output()
        .expect("binary runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

/// `solve`, `certify` and `plot` for one fixture inside `dir`; returns the
/// JSON and SVG bytes.
pub fn pipeline(dir: &Path, name: &str, args: &[&str]) -> Result<(Vec<u8>, Vec<u8>), String> {
    let json = dir.join(format!("{name}.json"));
    let svg = dir.join(format!("{name}.svg"));
    let (js, ss) = (json.to_str().expect("utf-8"), svg.to_str().expect("utf-8"));
    let mut solve = vec!["solve"];
    solve.extend_from_slice(args);
    solve.extend_from_slice(&["-o", js]);
    for step in [solve, vec!["certify", js], vec!["plot", js, "-o", ss]] {
        let o = poncelet(&step);
        if code(&o) != 0 {
            return Err(format!(
                "{name}: `{}` exited {}: {}",
                step.join(" "),
                code(&o),
                String::from_utf8_lossy(&o.stderr).trim()
            ));
        }
    }
    let read = |p: &Path| std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()));
    Ok((read(&json)?, read(&svg)?))
}
