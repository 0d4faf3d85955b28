//! Deterministic SVG figures on an 800×800 canvas, with the unit disk drawn
//! as a circle of diameter 720 pixels.

use std::f64::consts::TAU;
use std::fmt::Write;

use num_complex::Complex64 as C64;
use poncelet_core::opuc::popuc;
use poncelet_core::solvers::Pentagram;
use poncelet_core::{Ellipse, PentagonSolutionSet, PonceletConfig};

use crate::json::{Document, Payload};
use crate::CliError;

pub const CANVAS: f64 = 800.0;
pub const DISK_RADIUS: f64 = 360.0;
const ELLIPSE_SAMPLES: usize = 240;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlotOptions {
    /// Number of polygon chains, drawn for `λ = e^{i(0.1 + 2πj/k)}`.
    pub lambdas: usize,
    pub pentagram: bool,
    pub brianchon: bool,
    pub chains: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            lambdas: 3,
            pentagram: true,
            brianchon: true,
            chains: true,
        }
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn xy(z: C64) -> (String, String) {
    (
        num(CANVAS / 2.0 + DISK_RADIUS * z.re),
        num(CANVAS / 2.0 - DISK_RADIUS * z.im),
    )
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">",
            c = CANVAS
        );
        let _ = writeln!(out, "<title>{title}</title>");
        let _ = writeln!(
            out,
            "<rect x=\"0\" y=\"0\" width=\"{c}\" height=\"{c}\" fill=\"white\"/>",
            c = CANVAS
        );
        let mut c = Self { out };
        c.open("unit-circle");
        let _ = writeln!(
            c.out,
            "<circle cx=\"{h}\" cy=\"{h}\" r=\"{r}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
            h = CANVAS / 2.0,
            r = DISK_RADIUS
        );
        c.close();
        c
    }

    fn open(&mut self, id: &str) {
        let _ = writeln!(self.out, "<g id=\"{id}\">");
    }

    fn close(&mut self) {
        self.out.push_str("</g>\n");
    }

    fn polyline(&mut self, pts: &[C64], closed: bool, style: &str) {
        let mut d = String::new();
        for (i, &z) in pts.iter().enumerate() {
            let (x, y) = xy(z);
            let _ = write!(d, "{}{x} {y}", if i == 0 { "M" } else { " L" });
        }
        if closed {
            d.push_str(" Z");
        }
        let _ = writeln!(self.out, "<path d=\"{d}\" {style}/>");
    }

    fn ellipse(&mut self, e: &Ellipse, style: &str) {
        let pts: Vec<C64> = (0..ELLIPSE_SAMPLES)
            .map(|k| e.point(TAU * k as f64 / ELLIPSE_SAMPLES as f64))
            .collect();
        self.polyline(&pts, true, style);
    }

    fn dot(&mut self, z: C64, r: f64, style: &str) {
        let (x, y) = xy(z);
        let _ = writeln!(self.out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"{r}\" {style}/>");
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

const CHAIN: &str = "fill=\"none\" stroke=\"#9a9a9a\" stroke-width=\"1\"";
const PONCELET: &str = "fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\"";
const PENTAGRAM: &str = "fill=\"none\" stroke=\"#2a8a3e\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"";
const DIAGONAL: &str = "fill=\"none\" stroke=\"#d07a1a\" stroke-width=\"0.75\"";
const LINE: &str = "fill=\"none\" stroke=\"#7a3aa0\" stroke-width=\"1\" stroke-dasharray=\"4 3\"";
const FOCUS: &str = "fill=\"#c0272d\" stroke=\"none\"";
const EIGEN: &str = "fill=\"white\" stroke=\"black\" stroke-width=\"1\"";
const MARK: &str = "fill=\"#2a8a3e\" stroke=\"none\"";
const BRIANCHON: &str = "fill=\"#d07a1a\" stroke=\"none\"";

/// Vertices of the polygon chains for the chosen `λ` samples.
fn chains(c: &PonceletConfig, k: usize) -> Result<Vec<Vec<C64>>, CliError> {
    (0..k)
        .map(|j| {
            let lambda = C64::from_polar(1.0, 0.1 + TAU * j as f64 / k as f64);
            popuc(&c.verblunsky, lambda)
                .map(|p| p.zeros)
                .map_err(|e| CliError::Certification(e.to_string()))
        })
        .collect()
}

fn draw_config(canvas: &mut Canvas, c: &PonceletConfig, opts: &PlotOptions, pentagram: bool) -> Result<(), CliError> {
    let polys = if opts.chains || (opts.brianchon && c.brianchon.is_some()) {
        chains(c, opts.lambdas)?
    } else {
        Vec::new()
    };
    if opts.chains {
        canvas.open("chains");
        for p in &polys {
            canvas.polyline(p, true, CHAIN);
        }
        canvas.close();
    }
    canvas.open("poncelet-ellipse");
    canvas.ellipse(&c.poncelet, PONCELET);
    canvas.close();
    canvas.open("eigenvalues");
    for &z in &c.eigenvalues {
        canvas.dot(z, 3.0, EIGEN);
    }
    canvas.close();
    if opts.pentagram && pentagram {
        match c.pentagram {
            Some(Pentagram::Ellipse(e)) => {
                canvas.open("pentagram-ellipse");
                canvas.ellipse(&e, PENTAGRAM);
                canvas.close();
            }
            Some(Pentagram::Point(z)) => {
                canvas.open("pentagram-point");
                canvas.dot(z, 4.0, MARK);
                canvas.close();
            }
            None => {}
        }
    }
    if let (true, Some(b)) = (opts.brianchon, c.brianchon) {
        canvas.open("brianchon");
        for p in polys.iter().filter(|p| p.len() % 2 == 0) {
            let h = p.len() / 2;
            for j in 0..h {
                canvas.polyline(&[p[j], p[j + h]], false, DIAGONAL);
            }
        }
        canvas.dot(b, 4.0, BRIANCHON);
        canvas.close();
    }
    let (f1, f2) = (c.poncelet.f1, c.poncelet.f2);
    canvas.open("foci");
    canvas.dot(f1, 2.5, FOCUS);
    canvas.dot(f2, 2.5, FOCUS);
    canvas.close();
    Ok(())
}

/// Segment through three nearly collinear points, spanning their extent.
fn span(pts: [C64; 3]) -> [C64; 2] {
    let (mut best, mut pair) = (-1.0, (0, 1));
    for i in 0..3 {
        for j in i + 1..3 {
            let d = (pts[i] - pts[j]).norm();
            if d > best {
                (best, pair) = (d, (i, j));
            }
        }
    }
    let (a, b) = (pts[pair.0], pts[pair.1]);
    let pad = (b - a) * 0.05;
    [a - pad, b + pad]
}

fn draw_pentagon(
    canvas: &mut Canvas,
    s: &PentagonSolutionSet,
    poncelet: &PonceletConfig,
    pentagram: &PonceletConfig,
    opts: &PlotOptions,
) -> Result<(), CliError> {
    draw_config(canvas, poncelet, opts, false)?;
    if opts.pentagram {
        if let Some(Pentagram::Ellipse(e)) = pentagram.pentagram {
            canvas.open("pentagram-ellipse");
            canvas.ellipse(&e, PENTAGRAM);
            canvas.close();
        }
    }
    if s.pairs.len() == 3 {
        canvas.open("collinearity");
        let zs = [s.pairs[0].z, s.pairs[1].z, s.pairs[2].z];
        let ws = [s.pairs[0].w, s.pairs[1].w, s.pairs[2].w];
        canvas.polyline(&span(zs), false, LINE);
        canvas.polyline(&span(ws), false, LINE);
        for z in zs.into_iter().chain(ws) {
            canvas.dot(z, 3.0, MARK);
        }
        canvas.close();
    }
    Ok(())
}

/// SVG text for a document. The output depends only on `doc` and `opts`.
pub fn render(doc: &Document, opts: &PlotOptions) -> Result<String, CliError> {
    match &doc.payload {
        Payload::Poncelet { config } => {
            let mut canvas = Canvas::new(&format!("Poncelet {}-ellipse ({})", config.n, doc.input.command));
            draw_config(&mut canvas, config, opts, true)?;
            Ok(canvas.finish())
        }
        Payload::Pentagon {
            solution_set,
            poncelet,
            pentagram,
        } => {
            let mut canvas = Canvas::new("Poncelet 5-ellipse and pentagram ellipse with shared foci");
            draw_pentagon(&mut canvas, solution_set, poncelet, pentagram, opts)?;
            Ok(canvas.finish())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates() {
        assert_eq!(xy(C64::new(0.0, 0.0)), ("400.000".to_string(), "400.000".to_string()));
        assert_eq!(xy(C64::new(1.0, 1.0)), ("760.000".to_string(), "40.000".to_string()));
        assert_eq!(num(-1e-9), "0.000");
    }

    #[test]
    fn span_covers_all_points() {
        let pts = [C64::new(0.0, 0.0), C64::new(2.0, 2.0), C64::new(1.0, 1.0)];
        let [a, b] = span(pts);
        assert!((a - C64::new(-0.1, -0.1)).norm() < 1e-15);
        assert!((b - C64::new(2.1, 2.1)).norm() < 1e-15);
    }

    #[test]
    fn empty_canvas_is_well_formed() {
        let s = Canvas::new("t").finish();
        assert!(s.starts_with("<?xml"));
        assert!(s.contains("r=\"360\""));
        assert_eq!(s.matches("<g ").count(), s.matches("</g>").count());
        assert!(s.ends_with("</svg>\n"));
    }
}
