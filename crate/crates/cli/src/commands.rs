use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use poncelet::bowtie::{
    bowtie_row, crossing_angle, midpoint_locus_check, radical_axes, special_ratios, u_samples, u_symmetric,
    BowtieCircles, BowtieRow, SpecialRatios,
};
use poncelet::conic::invert_point;
use poncelet::invariants::InvariantCode;
use poncelet::orbit::seeds::{n4_self_u_max, n4_self_vertices};
use poncelet::orbit::{build, window, FamilyWindow, OrbitResiduals};
use poncelet::sweep::{aspect_scan, run_sweep, ScanEntry, ScanStatus, SweepReport, SweepSpec};
use poncelet::tol::Tolerances;
use poncelet::{Billiard, CausticKind, InversionContext, Polygon, Tag, Topology, Vec2};

use crate::svg::Figure;

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+g", env!("PONCELET_GIT_REV"));

/// Validated run configuration shared by all subcommands.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub a: f64,
    pub b: f64,
    #[serde(skip)]
    pub billiard: Billiard,
    pub topology: Option<Topology>,
    pub ctx: InversionContext,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub scale: f64,
}

impl RunConfig {
    pub fn new(ab: f64, ctx: InversionContext, tol: Tolerances, out: Option<PathBuf>, scale: f64) -> Result<RunConfig> {
        let billiard = Billiard::with_ratio(ab)?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(poncelet::Error::Invalid(format!("scale must be positive, got {scale}")).into());
        }
        Ok(RunConfig { a: billiard.a, b: billiard.b, billiard, topology: None, ctx, tolerances: tol, out, scale })
    }

    /// Attaches a family and checks that it exists at this aspect ratio.
    pub fn with_family(self, n: usize, tag: Tag) -> Result<RunConfig> {
        let cfg = self.with_topology(n, tag)?;
        window(&cfg.billiard, cfg.topology.as_ref().expect("just set"))?;
        Ok(cfg)
    }

    pub fn with_topology(mut self, n: usize, tag: Tag) -> Result<RunConfig> {
        self.topology = Some(Topology::new(n, tag)?);
        Ok(self)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let dir = self.out.as_deref().unwrap_or(Path::new("."));
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn figure(&self, extra: f64) -> Figure {
        let b = &self.billiard;
        Figure::new(1.15 * b.a + extra, 1.15 * b.b + extra, self.scale)
    }
}

fn pts(p: &Polygon) -> Vec<[f64; 2]> {
    p.vertices.iter().map(|v| [v.x, v.y]).collect()
}

/// Outcome of a subcommand: whether every checked claim held.
pub struct Outcome {
    pub reproduced: bool,
}

#[derive(Serialize)]
struct OrbitOutput {
    version: &'static str,
    config: RunConfig,
    label: String,
    n: usize,
    turning: i32,
    caustic_kind: CausticKind,
    caustic_semi_axes: [f64; 2],
    window: String,
    param: f64,
    j: f64,
    l: f64,
    vertices: Vec<[f64; 2]>,
    residuals: OrbitResiduals,
    valid: bool,
    outer: Option<Vec<[f64; 2]>>,
    inner: Option<Vec<[f64; 2]>>,
    inversive: Option<Vec<[f64; 2]>>,
}

pub fn cmd_orbit(cfg: &RunConfig, param: Option<f64>) -> Result<Outcome> {
    let t = cfg.topology.expect("family attached");
    let b = &cfg.billiard;
    let param = match (param, window(b, &t)?) {
        (Some(p), _) => p,
        (None, FamilyWindow::Angle) => 0.0,
        (None, FamilyWindow::Abscissa { .. }) if (t.n, t.tag) == (4, Tag::TypeI) => u_symmetric(b)?,
        (None, FamilyWindow::Abscissa { u_max }) => 0.5 * u_max,
    };
    let o = build(b, &t, param)?;
    let r = o.residuals()?;
    let tol = &cfg.tolerances;
    let valid = r.vertex < tol.vertex
        && r.reflection < tol.reflection
        && r.tangency < tol.tangency
        && r.j_spread < tol.j_spread
        && r.closure < tol.closure
        && r.turning.abs() == t.turning;
    let outer = o.outer_polygon().ok();
    let inner = o.inner_polygon().ok();
    let inversive =
        o.vertices.vertices.iter().map(|p| invert_point(b, &cfg.ctx, *p)).collect::<poncelet::Result<Vec<Vec2>>>().ok();
    let out = OrbitOutput {
        version: VERSION,
        config: cfg.clone(),
        label: t.label(),
        n: t.n,
        turning: r.turning.abs(),
        caustic_kind: o.caustic.kind,
        caustic_semi_axes: [o.caustic.a2, o.caustic.b2],
        window: describe_window(b, &t)?,
        param,
        j: o.j,
        l: o.l,
        vertices: pts(&o.vertices),
        residuals: r,
        valid,
        outer: outer.as_ref().map(pts),
        inner: inner.as_ref().map(pts),
        inversive: inversive.as_ref().map(|v| v.iter().map(|p| [p.x, p.y]).collect()),
    };
    let json = serde_json::to_string_pretty(&out)? + "\n";
    if !valid && (t.n, t.tag) == (4, Tag::TypeI) {
        eprintln!(
            "note: u = 0 and |u| = u_max give doubled-up polygons; the bowtie with vertical sides is at u = {}",
            u_symmetric(b)?
        );
    }
    if cfg.out.is_none() {
        print!("{json}");
        return Ok(Outcome { reproduced: valid });
    }
    let extent = outer
        .as_ref()
        .map(|p| p.vertices.iter().map(|v| (v.x.abs() - b.a).max(v.y.abs() - b.b)).fold(0.0, f64::max))
        .unwrap_or(0.0)
        .min(b.a);
    let mut fig = cfg.figure(extent);
    fig.billiard(b);
    fig.caustic(&o.caustic, "#c0392b");
    if let Some(p) = &outer {
        fig.polyline(&p.vertices, true, "#7f8c8d", 1.0, true);
    }
    if let Some(p) = &inner {
        fig.polyline(&p.vertices, true, "#27ae60", 1.0, false);
    }
    fig.polyline(&o.vertices.vertices, true, "#2c3e50", 2.0, false);
    for v in &o.vertices.vertices {
        fig.dot(*v, 3.0, "#2c3e50");
    }
    let j = cfg.write("orbit.json", &json)?;
    let s = cfg.write("orbit.svg", &fig.render(&format!("poncelet {VERSION}: {} orbit, a/b={}", t.label(), b.a)))?;
    println!(
        "{} a/b={} param={param}: turning {}, L={:.12}, J={:.12}, {}",
        t.label(),
        b.a,
        r.turning.abs(),
        o.l,
        o.j,
        if valid { "valid" } else { "INVALID" }
    );
    println!("wrote {} and {}", j.display(), s.display());
    Ok(Outcome { reproduced: valid })
}

pub fn cmd_sweep(cfg: &RunConfig, codes: Option<Vec<InvariantCode>>, samples: usize) -> Result<Outcome> {
    let t = cfg.topology.expect("family attached");
    let mut spec = SweepSpec::new(cfg.billiard, t).with_samples(samples);
    if let Some(c) = codes {
        spec = spec.with_codes(c);
    }
    spec.ctx = cfg.ctx;
    let report = run_sweep(&spec, &cfg.tolerances)?;
    let reproduced = report.all_reproduced();
    #[derive(Serialize)]
    struct SweepOutput<'a> {
        version: &'static str,
        reproduced: bool,
        #[serde(flatten)]
        report: &'a SweepReport,
    }
    let json = serde_json::to_string_pretty(&SweepOutput { version: VERSION, reproduced, report: &report })? + "\n";
    if cfg.out.is_none() {
        print!("{json}");
        return Ok(Outcome { reproduced });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["param", "code", "value"])?;
    for v in &report.values {
        w.write_record([v.param.to_string(), v.code.to_string(), v.value.to_string()])?;
    }
    let csv = String::from_utf8(w.into_inner()?)?;
    let c = cfg.write("sweep.csv", &csv)?;
    let j = cfg.write("sweep.json", &json)?;
    println!("{} a/b={} over {} samples", report.topology, report.a, report.samples);
    println!("{:<6} {:<12} {:<12} {:>12} {:>20}", "code", "verdict", "expected", "rel_spread", "mean");
    for c in &report.codes {
        let exp = c.expected.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
        let flag = if c.reproduced(&report.tolerances) { "" } else { "  MISMATCH" };
        println!(
            "{:<6} {:<12} {:<12} {:>12.3e} {:>20.10e}{flag}",
            c.code.to_string(),
            c.verdict.to_string(),
            exp,
            c.rel_spread,
            c.mean
        );
    }
    println!("wrote {} and {}", c.display(), j.display());
    Ok(Outcome { reproduced })
}

#[derive(Serialize)]
struct BowtieMax {
    concyclic: f64,
    harmonic: f64,
    power: f64,
    midpoint_collinear: f64,
    midpoint_quartic: f64,
    radical_perpendicular: f64,
    outer_intersections: f64,
}

#[derive(Serialize)]
struct BowtieOutput {
    version: &'static str,
    config: RunConfig,
    u_max: f64,
    u_symmetric: f64,
    crossing_angle_symmetric_deg: f64,
    special_ratios: SpecialRatios,
    rows: Vec<BowtieRow>,
    skipped: Vec<(f64, String)>,
    max_residuals: BowtieMax,
    reproduced: bool,
}

pub fn cmd_bowtie(cfg: &RunConfig, samples: usize) -> Result<Outcome> {
    let b = &cfg.billiard;
    let u_max = n4_self_u_max(b)?;
    let u_sym = u_symmetric(b)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for u in u_samples(b, samples)? {
        match bowtie_row(b, u, &cfg.ctx) {
            Ok(r) => rows.push(r),
            Err(poncelet::Error::Degenerate(m)) => skipped.push((u, m)),
            Err(e) => return Err(e.into()),
        }
    }
    let fold = |f: &dyn Fn(&BowtieRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let max = BowtieMax {
        concyclic: fold(&|r| r.checks.concyclic.max(r.checks.concyclic_outer)),
        harmonic: fold(&|r| r.checks.harmonic),
        power: fold(&|r| r.checks.power.max(r.checks.power_outer)),
        midpoint_collinear: fold(&|r| r.midpoint_collinear),
        midpoint_quartic: fold(&|r| r.midpoint_quartic),
        radical_perpendicular: fold(&|r| r.radical_perpendicular),
        outer_intersections: fold(&|r| r.outer_intersections),
    };
    let reproduced = !rows.is_empty()
        && max.concyclic < 1e-9
        && max.harmonic < 1e-12
        && max.power < 1e-10
        && max.midpoint_collinear < 1e-10
        && max.midpoint_quartic < 1e-8
        && max.radical_perpendicular < 1e-10
        && max.outer_intersections < 1e-9;
    let angle = crossing_angle(b, u_sym)?;
    let out = BowtieOutput {
        version: VERSION,
        config: cfg.clone(),
        u_max,
        u_symmetric: u_sym,
        crossing_angle_symmetric_deg: angle,
        special_ratios: special_ratios()?,
        rows,
        skipped,
        max_residuals: max,
        reproduced,
    };
    let json = serde_json::to_string_pretty(&out)? + "\n";
    if cfg.out.is_none() {
        print!("{json}");
        return Ok(Outcome { reproduced });
    }
    let svg = bowtie_figure(cfg, u_max, samples)?;
    let j = cfg.write("bowtie.json", &json)?;
    let s = cfg.write("bowtie.svg", &svg)?;
    let m = &out.max_residuals;
    println!("bowtie a/b={}: u_max={:.10}, symmetric u={:.10}, crossing angle there {:.6}°", b.a, u_max, u_sym, angle);
    println!(
        "{} positions ({} skipped); worst concyclic {:.1e}, harmonic {:.1e}, power {:.1e}, midpoint {:.1e}/{:.1e}, perpendicular {:.1e}, outer {:.1e}",
        out.rows.len(),
        out.skipped.len(),
        m.concyclic,
        m.harmonic,
        m.power,
        m.midpoint_collinear,
        m.midpoint_quartic,
        m.radical_perpendicular,
        m.outer_intersections
    );
    println!("wrote {} and {}", j.display(), s.display());
    Ok(Outcome { reproduced })
}

fn bowtie_figure(cfg: &RunConfig, u_max: f64, samples: usize) -> Result<String> {
    let b = &cfg.billiard;
    let u = 0.4 * u_max;
    let k: BowtieCircles = poncelet::bowtie::bowtie_circles(b, u)?;
    let mut fig = cfg.figure(0.6 * b.a);
    fig.billiard(b);
    let t = Topology::new(4, Tag::TypeI)?;
    fig.caustic(&build(b, &t, u)?.caustic, "#c0392b");
    for (c, r) in [(k.c, k.r), (k.cp, k.rp)] {
        fig.ellipse(r, r, c, "#2980b9", 1.0, false);
    }
    if let Ok(ra) = radical_axes(b, u, &cfg.ctx) {
        fig.line(&ra.axis1, "#8e44ad");
        fig.line(&ra.axis2, "#8e44ad");
    }
    let locus: Vec<Vec2> = u_samples(b, samples.max(50) * 4)?
        .into_iter()
        .filter_map(|u| midpoint_locus_check(b, u).ok())
        .flat_map(|m| m.midpoints)
        .collect();
    for p in locus {
        fig.dot(p, 0.8, "#16a085");
    }
    let v = n4_self_vertices(b, u)?;
    fig.polyline(&v, true, "#2c3e50", 2.0, false);
    Ok(fig.render(&format!("poncelet {VERSION}: bowtie, a/b={}, u={u}", b.a)))
}

pub fn cmd_scan(cfg: &RunConfig, code: InvariantCode, grid: &[f64], samples: usize) -> Result<Outcome> {
    let t = cfg.topology.expect("family attached");
    let entries = aspect_scan(code, &t, grid, samples, &cfg.tolerances)?;
    #[derive(Serialize)]
    struct ScanOutput<'a> {
        version: &'static str,
        code: String,
        topology: String,
        tolerances: &'a Tolerances,
        entries: &'a [ScanEntry],
    }
    let json = serde_json::to_string_pretty(&ScanOutput {
        version: VERSION,
        code: code.to_string(),
        topology: t.label(),
        tolerances: &cfg.tolerances,
        entries: &entries,
    })? + "\n";
    let reproduced = entries.iter().all(|e| match &e.status {
        ScanStatus::Exists(r) => r.reproduced(&cfg.tolerances),
        ScanStatus::Nonexistent(_) => true,
    });
    if cfg.out.is_none() {
        print!("{json}");
        return Ok(Outcome { reproduced });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["ab", "code", "status", "rel_spread", "mean"])?;
    for e in &entries {
        let rec = match &e.status {
            ScanStatus::Exists(r) => [
                e.ab.to_string(),
                code.to_string(),
                r.verdict.to_string(),
                r.rel_spread.to_string(),
                r.mean.to_string(),
            ],
            ScanStatus::Nonexistent(_) => {
                [e.ab.to_string(), code.to_string(), "Nonexistent".into(), String::new(), String::new()]
            }
        };
        w.write_record(rec)?;
    }
    let c = cfg.write("scan.csv", &String::from_utf8(w.into_inner()?)?)?;
    let j = cfg.write("scan.json", &json)?;
    for e in &entries {
        match &e.status {
            ScanStatus::Exists(r) => {
                println!("a/b={:<8.4} {:<12} rel_spread {:.3e}", e.ab, r.verdict.to_string(), r.rel_spread)
            }
            ScanStatus::Nonexistent(m) => println!("a/b={:<8.4} Nonexistent  {m}", e.ab),
        }
    }
    println!("wrote {} and {}", c.display(), j.display());
    Ok(Outcome { reproduced })
}

/// Parameter range of a family.
pub fn describe_window(b: &Billiard, t: &Topology) -> Result<String> {
    Ok(match window(b, t)? {
        FamilyWindow::Angle => "boundary angle t in [0, 2π)".into(),
        FamilyWindow::Abscissa { u_max } => format!("abscissa u in [-{u_max}, {u_max}]"),
    })
}
