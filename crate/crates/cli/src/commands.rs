//! `solve`, `certify` and `plot`.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use poncelet_core::solvers::{
    analyze, hexagon_from_brianchon, hexagon_from_pentagram, quad_family, quad_mixmatch, solve_hexagon, solve_pentagon,
    solve_quad, solve_tri, Pentagram,
};
use poncelet_core::{PentagonSolutionSet, PonceletConfig, Tolerances};

use crate::args::{Cli, Command, Layer, SolveCommand};
use crate::json::{Document, Input, Payload};
use crate::settings::{effective_tolerances, ConfigFile};
use crate::svg::{render, PlotOptions};
use crate::{CliError, EXIT_OK};

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    match &cli.command {
        Command::Solve { which, output } => {
            let tol = effective_tolerances(Tolerances::default(), file.as_ref(), &cli.tol)?;
            let doc = solve(which, &tol)?;
            let dest = output
                .clone()
                .or_else(|| file.as_ref().and_then(|f| f.output.json.clone()));
            emit(dest.as_deref(), &doc.to_json()?)?;
            Ok(EXIT_OK)
        }
        Command::Certify { file: path } => {
            let doc = Document::read(path)?;
            let tol = effective_tolerances(doc.tolerances, file.as_ref(), &cli.tol)?;
            let report = certify(&doc, &tol)?;
            if !report.passed() {
                return Err(CliError::Certification(report.render_failures()));
            }
            println!("{}: certified ({} checks)", path.display(), report.checks.len());
            Ok(EXIT_OK)
        }
        Command::Plot {
            file: path,
            lambdas,
            show,
            output,
        } => {
            let doc = Document::read(path)?;
            let opts = PlotOptions {
                lambdas: *lambdas,
                pentagram: show.contains(&Layer::Pentagram),
                brianchon: show.contains(&Layer::Brianchon),
                chains: show.contains(&Layer::Chains),
            };
            let svg = render(&doc, &opts)?;
            let dest = output
                .clone()
                .or_else(|| file.as_ref().and_then(|f| f.output.svg.clone()));
            emit(dest.as_deref(), &svg)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(dest: Option<&Path>, text: &str) -> Result<(), CliError> {
    let io = |path: PathBuf| move |source| CliError::Io { path, source };
    match dest {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
            }
            std::fs::write(p, text).map_err(io(p.to_path_buf()))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(io(PathBuf::from("<stdout>"))),
    }
}

/// Runs the solver behind `cmd` and wraps the certified result.
pub fn solve(cmd: &SolveCommand, tol: &Tolerances) -> Result<Document, CliError> {
    let mut input = Input::default();
    let poncelet = |c: PonceletConfig| Payload::Poncelet { config: c };
    let payload = match *cmd {
        SolveCommand::Tri(f) => {
            input = foci_input("tri", f.f1, f.f2);
            poncelet(solve_tri(f.f1, f.f2, tol)?)
        }
        SolveCommand::Quad(f) => {
            input = foci_input("quad", f.f1, f.f2);
            poncelet(solve_quad(f.f1, f.f2, tol)?)
        }
        SolveCommand::QuadMixmatch { f1, p } => {
            input.command = "quad-mixmatch".into();
            (input.f1, input.p) = (Some(f1), Some(p));
            poncelet(quad_mixmatch(f1, p, tol)?)
        }
        SolveCommand::QuadFamily { p, alpha } => {
            input.command = "quad-family".into();
            (input.p, input.alpha) = (Some(p), Some(alpha));
            poncelet(quad_family(p, alpha, tol)?)
        }
        SolveCommand::Pent(f) => {
            input = foci_input("pent", f.f1, f.f2);
            let solution_set = solve_pentagon(f.f1, f.f2, tol)?;
            Payload::Pentagon {
                poncelet: solution_set.poncelet_config(tol)?,
                pentagram: solution_set.pentagram_config(tol)?,
                solution_set,
            }
        }
        SolveCommand::Hex(f) => {
            input = foci_input("hex", f.f1, f.f2);
            poncelet(solve_hexagon(f.f1, f.f2, tol)?)
        }
        SolveCommand::HexFromPentagram { f3, f4 } => {
            input.command = "hex-from-pentagram".into();
            (input.f3, input.f4) = (Some(f3), Some(f4));
            poncelet(hexagon_from_pentagram(f3, f4, tol)?)
        }
        SolveCommand::HexFromBrianchon { f5, x, y } => {
            input.command = "hex-from-brianchon".into();
            (input.f5, input.x, input.y) = (Some(f5), Some(x), Some(y));
            poncelet(hexagon_from_brianchon(f5, x, y, tol)?)
        }
    };
    Ok(Document::new(*tol, input, payload))
}

fn foci_input(command: &str, f1: C64, f2: C64) -> Input {
    Input {
        command: command.into(),
        f1: Some(f1),
        f2: Some(f2),
        ..Input::default()
    }
}

/// One stored value against its recomputed counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub field: String,
    pub stored: String,
    pub recomputed: String,
    pub deviation: f64,
    pub limit: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation <= self.limit
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CertifyReport {
    pub checks: Vec<Check>,
    /// Certificates of the recomputed configurations above their thresholds.
    pub failures: Vec<String>,
}

impl CertifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks.iter().all(Check::passed)
    }

    /// One line per failed check.
    pub fn render_failures(&self) -> String {
        let mut lines: Vec<String> = self.failures.clone();
        for c in self.checks.iter().filter(|c| !c.passed()) {
            lines.push(format!(
                "{}: stored {}, recomputed {}, deviation {:e} > {:e}",
                c.field, c.stored, c.recomputed, c.deviation, c.limit
            ));
        }
        lines.join("\n")
    }

    fn push(&mut self, field: String, stored: String, recomputed: String, deviation: f64, limit: f64) {
        let deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        self.checks.push(Check {
            field,
            stored,
            recomputed,
            deviation,
            limit,
        });
    }

    fn scalar(&mut self, field: String, stored: f64, recomputed: f64, limit: f64) {
        self.push(
            field,
            stored.to_string(),
            recomputed.to_string(),
            (stored - recomputed).abs(),
            limit,
        );
    }

    fn point(&mut self, field: String, stored: C64, recomputed: C64, limit: f64) {
        self.push(
            field,
            fmt_c(stored),
            fmt_c(recomputed),
            (stored - recomputed).norm(),
            limit,
        );
    }

    fn missing(&mut self, field: String, stored: &str, recomputed: &str) {
        self.push(field, stored.into(), recomputed.into(), f64::INFINITY, 0.0);
    }
}

fn fmt_c(z: C64) -> String {
    format!("[{}, {}]", z.re, z.im)
}

/// Re-derives every configuration of `doc` from its Verblunsky sequence
/// alone and compares the result with the stored values.
pub fn certify(doc: &Document, tol: &Tolerances) -> Result<CertifyReport, CliError> {
    let mut report = CertifyReport::default();
    for (name, stored) in doc.payload.configs() {
        match analyze(&stored.verblunsky, tol) {
            Ok(recomputed) => compare_config(&mut report, name, stored, &recomputed, tol),
            Err(e) => report.failures.push(format!("{name}: {e}")),
        }
    }
    if let Payload::Pentagon {
        solution_set, poncelet, ..
    } = &doc.payload
    {
        match analyze(&poncelet.verblunsky, tol) {
            Ok(r) => compare_solution_set(&mut report, solution_set, &r, tol),
            Err(e) => report.failures.push(format!("solution_set: {e}")),
        }
    }
    Ok(report)
}

fn compare_config(report: &mut CertifyReport, name: &str, s: &PonceletConfig, r: &PonceletConfig, tol: &Tolerances) {
    for f in r.certificates.failures(tol) {
        report.failures.push(format!("{name}: recomputed {f}"));
    }
    if s.n != r.n {
        report.missing(format!("{name}.n"), &s.n.to_string(), &r.n.to_string());
        return;
    }
    // eigenvalues as a multiset
    let mut free: Vec<C64> = r.eigenvalues.clone();
    for (i, &z) in s.eigenvalues.iter().enumerate() {
        let (j, _) = free
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - z).norm().total_cmp(&(b.1 - z).norm()))
            .expect("same count");
        let w = free.swap_remove(j);
        report.point(format!("{name}.eigenvalues[{i}]"), z, w, tol.certification);
    }
    let (sf1, sf2) = (s.poncelet.f1, s.poncelet.f2);
    let (rf1, rf2) = matched(sf1, sf2, r.poncelet.f1, r.poncelet.f2);
    report.point(format!("{name}.poncelet.f1"), sf1, rf1, tol.certification);
    report.point(format!("{name}.poncelet.f2"), sf2, rf2, tol.certification);
    report.scalar(
        format!("{name}.poncelet.b_minor"),
        s.poncelet.b_minor,
        r.poncelet.b_minor,
        tol.certification,
    );
    match (&s.pentagram, &r.pentagram) {
        (None, None) => {}
        (Some(Pentagram::Point(a)), Some(Pentagram::Point(b))) => {
            report.point(format!("{name}.pentagram.point"), *a, *b, tol.boundary)
        }
        (Some(Pentagram::Ellipse(a)), Some(Pentagram::Ellipse(b))) => {
            let (f1, f2) = matched(a.f1, a.f2, b.f1, b.f2);
            report.point(format!("{name}.pentagram.ellipse.f1"), a.f1, f1, tol.boundary);
            report.point(format!("{name}.pentagram.ellipse.f2"), a.f2, f2, tol.boundary);
            report.scalar(
                format!("{name}.pentagram.ellipse.b_minor"),
                a.b_minor,
                b.b_minor,
                tol.boundary,
            );
        }
        (a, b) => report.missing(format!("{name}.pentagram"), &describe(a), &describe(b)),
    }
    match (s.brianchon, r.brianchon) {
        (None, None) => {}
        (Some(a), Some(b)) => report.point(format!("{name}.brianchon"), a, b, tol.boundary),
        (a, b) => report.missing(
            format!("{name}.brianchon"),
            &a.map_or("absent".into(), fmt_c),
            &b.map_or("absent".into(), fmt_c),
        ),
    }
    let (sc, rc) = (&s.certificates, &r.certificates);
    let pairs = [
        (
            "closure_defect",
            Some(sc.closure_defect),
            Some(rc.closure_defect),
            tol.certification,
        ),
        (
            "foci_sum_residual",
            Some(sc.foci_sum_residual),
            Some(rc.foci_sum_residual),
            tol.boundary,
        ),
        (
            "mirman_residual",
            Some(sc.mirman_residual),
            Some(rc.mirman_residual),
            tol.structural,
        ),
        (
            "roundtrip_residual",
            Some(sc.roundtrip_residual),
            Some(rc.roundtrip_residual),
            tol.structural,
        ),
        (
            "pentagram_residual",
            sc.pentagram_residual,
            rc.pentagram_residual,
            tol.boundary,
        ),
        (
            "brianchon_residual",
            sc.brianchon_residual,
            rc.brianchon_residual,
            tol.boundary,
        ),
    ];
    for (field, a, b, limit) in pairs {
        let field = format!("{name}.certificates.{field}");
        match (a, b) {
            (None, None) => {}
            (Some(a), Some(b)) => report.scalar(field, a, b, limit),
            (a, b) => report.missing(
                field,
                &a.map_or("absent".into(), |v| v.to_string()),
                &b.map_or("absent".into(), |v| v.to_string()),
            ),
        }
    }
}

fn describe(p: &Option<Pentagram>) -> String {
    match p {
        None => "absent".into(),
        Some(Pentagram::Point(z)) => format!("point {}", fmt_c(*z)),
        Some(Pentagram::Ellipse(e)) => format!("ellipse {} {} {}", fmt_c(e.f1), fmt_c(e.f2), e.b_minor),
    }
}

/// `(c, d)` ordered to match `(a, b)`.
fn matched(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    if (a - c).norm().max((b - d).norm()) <= (a - d).norm().max((b - c).norm()) {
        (c, d)
    } else {
        (d, c)
    }
}

fn compare_solution_set(
    report: &mut CertifyReport,
    s: &PentagonSolutionSet,
    poncelet: &PonceletConfig,
    tol: &Tolerances,
) {
    let (f1, f2) = matched(
        s.f1,
        s.f2,
        poncelet.eigenvalues[0],
        poncelet.eigenvalues[poncelet.n - 2],
    );
    report.point("solution_set.f1".into(), s.f1, f1, tol.certification);
    report.point("solution_set.f2".into(), s.f2, f2, tol.certification);
    let r = match solve_pentagon(f1, f2, tol) {
        Ok(r) => r,
        Err(e) => {
            report.failures.push(format!("solution_set: {e}"));
            return;
        }
    };
    if r.pairs.len() != s.pairs.len() {
        report.missing(
            "solution_set.pairs".into(),
            &s.pairs.len().to_string(),
            &r.pairs.len().to_string(),
        );
        return;
    }
    for (i, (a, b)) in s.pairs.iter().zip(&r.pairs).enumerate() {
        let at = |f: &str| format!("solution_set.pairs[{i}].{f}");
        if a.class != b.class {
            report.missing(at("class"), &format!("{:?}", a.class), &format!("{:?}", b.class));
        }
        report.scalar(at("t"), a.t, b.t, tol.certification);
        let scale = |z: C64| tol.certification * z.norm().max(1.0);
        report.point(at("z"), a.z, b.z, scale(a.z));
        report.point(at("w"), a.w, b.w, scale(a.w));
    }
}
