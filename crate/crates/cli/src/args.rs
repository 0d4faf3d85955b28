//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use poncelet_core::Tolerances;

#[derive(Debug, Parser)]
#[command(
    name = "poncelet",
    version,
    about = "Poncelet ellipses from OPUC eigenvalue configurations"
)]
pub struct Cli {
    /// TOML settings file.
    #[arg(long, global = true, env = "PONCELET_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolOverrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a configuration and write it as JSON.
    Solve {
        #[command(subcommand)]
        which: SolveCommand,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Recompute every certificate of a stored configuration.
    Certify { file: PathBuf },
    /// Draw a stored configuration as SVG.
    Plot {
        file: PathBuf,
        /// Number of polygon chains.
        #[arg(long, default_value_t = 3)]
        lambdas: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [Layer::Pentagram, Layer::Brianchon, Layer::Chains])]
        show: Vec<Layer>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layer {
    Pentagram,
    Brianchon,
    Chains,
}

impl std::fmt::Display for Layer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Layer::Pentagram => "pentagram",
            Layer::Brianchon => "brianchon",
            Layer::Chains => "chains",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum SolveCommand {
    /// Triangle: the 3-ellipse with foci f1, f2.
    Tri(Foci),
    /// Quadrilateral with foci f1, f2.
    Quad(Foci),
    /// Quadrilateral with focus f1 and pentagram point p.
    QuadMixmatch {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        f1: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        p: C64,
    },
    /// Quadrilateral with pentagram point p, family member alpha.
    QuadFamily {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        p: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha: C64,
    },
    /// Pentagon solution set for foci f1, f2.
    Pent(Foci),
    /// Hexagon with foci f1, f2.
    Hex(Foci),
    /// Hexagon whose pentagram ellipse has foci f3, f4.
    HexFromPentagram {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        f3: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        f4: C64,
    },
    /// Hexagon with Brianchon point f5 and chord angles x < y.
    HexFromBrianchon {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        f5: C64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Foci {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub f1: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub f2: C64,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TolOverrides {
    #[arg(long, global = true)]
    pub tol_structural: Option<f64>,
    #[arg(long, global = true)]
    pub tol_certification: Option<f64>,
    #[arg(long, global = true)]
    pub tol_boundary: Option<f64>,
    #[arg(long, global = true)]
    pub tol_bisection: Option<f64>,
    #[arg(long, global = true)]
    pub tol_boundary_samples: Option<usize>,
    #[arg(long, global = true)]
    pub tol_family_samples: Option<usize>,
    #[arg(long, global = true)]
    pub tol_closure_starts: Option<usize>,
}

impl TolOverrides {
    pub fn apply(&self, t: &mut Tolerances) {
        let TolOverrides {
            tol_structural,
            tol_certification,
            tol_boundary,
            tol_bisection,
            tol_boundary_samples,
            tol_family_samples,
            tol_closure_starts,
        } = *self;
        t.structural = tol_structural.unwrap_or(t.structural);
        t.certification = tol_certification.unwrap_or(t.certification);
        t.boundary = tol_boundary.unwrap_or(t.boundary);
        t.bisection = tol_bisection.unwrap_or(t.bisection);
        t.boundary_samples = tol_boundary_samples.unwrap_or(t.boundary_samples);
        t.family_samples = tol_family_samples.unwrap_or(t.family_samples);
        t.closure_starts = tol_closure_starts.unwrap_or(t.closure_starts);
    }

    pub fn is_empty(&self) -> bool {
        self.tol_structural.is_none()
            && self.tol_certification.is_none()
            && self.tol_boundary.is_none()
            && self.tol_bisection.is_none()
            && self.tol_boundary_samples.is_none()
            && self.tol_family_samples.is_none()
            && self.tol_closure_starts.is_none()
    }
}

/// Parses `"re,im"`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im but got {s:?}"))?;
    let part = |p: &str| {
        p.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("{p:?} is not a finite number"))
    };
    Ok(C64::new(part(re)?, part(im)?))
}
