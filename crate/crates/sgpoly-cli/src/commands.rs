//! Subcommand implementations. Each returns its artifacts; [`emit`] decides
//! whether they go to files or to the terminal.

use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use sgpoly::mesh::{planar, word_string};
use sgpoly::spectrum::{Branch, Decimation, branch_limit};
use sgpoly::{Backend, CoeffVector, Float, JetCalculus, LaplacianParams, MonomialTable, Scalar};

use crate::config::{Settings, default_verify_rs};
use crate::error::{CliError, Result};
use crate::report::{self, PointReport, local_max_near, nearest, render_dev, render_opt, special_root};
use crate::svg::{LinePlot, Series, heightfield};
use crate::verify::verify_all;

/// Largest mesh level `refine` accepts.
pub const MAX_LEVEL: usize = 7;
/// Bracket width for root localization.
pub const ROOT_WIDTH: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug)]
pub struct Output {
    /// Written to stdout when no output directory is given.
    pub primary: Artifact,
    pub extra: Vec<Artifact>,
    /// Human-readable summary; stderr when the primary goes to stdout.
    pub summary: String,
    pub success: bool,
}

impl Output {
    fn new(primary: Artifact) -> Self {
        Output { primary, extra: Vec::new(), summary: String::new(), success: true }
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        std::iter::once(&self.primary).chain(&self.extra).find(|a| a.name == name)
    }
}

pub fn emit(out: &Output, dir: Option<&Path>) -> Result<()> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            for a in std::iter::once(&out.primary).chain(&out.extra) {
                std::fs::write(d.join(&a.name), &a.contents)?;
            }
            print!("{}", out.summary);
        }
        None => {
            print!("{}", out.primary.contents);
            eprint!("{}", out.summary);
        }
    }
    Ok(())
}

fn artifact(name: &str, contents: String) -> Artifact {
    Artifact { name: name.into(), contents }
}

pub fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Runs `$body` with `$like` bound to a zero of the selected backend.
macro_rules! with_backend {
    ($backend:expr, |$like:ident| $body:expr) => {
        match $backend {
            Backend::Exact => {
                let $like = BigRational::zero();
                $body
            }
            Backend::Float { precision } => {
                let $like = Float::from_i64(0, precision);
                $body
            }
        }
    };
}

pub fn params(s: &Settings) -> Result<Output> {
    let r = s.single_r()?;
    let p = LaplacianParams::derive(r.clone())?;
    let fields = [
        ("r", &p.r),
        ("r0", &p.r0),
        ("r1", &p.r1),
        ("mu0", &p.mu0),
        ("mu1", &p.mu1),
        ("L", &p.l),
        ("lam_sym", &p.lam_sym),
        ("lam_skew", &p.lam_skew),
    ];
    let text: String = fields.iter().map(|(n, v)| format!("{n} = {v} ({})\n", v.to_f64())).collect();
    Ok(Output::new(artifact("params.txt", text)))
}

pub fn table_csv<S: Scalar>(t: &MonomialTable<S>) -> Result<String> {
    let rows = (0..=t.jmax()).flat_map(|j| {
        (1..=3).map(move |k| {
            let row = t.row(k, j);
            let mut rec = vec![j.to_string(), k.to_string(), row.value.render()];
            rec.extend(row.aux.iter().map(Scalar::render));
            rec.push(t.normal(k, j).render());
            rec.push(t.tangential(k, j).render());
            rec
        })
    });
    csv_string(&["j", "k", "value", "a", "b", "c", "d", "e", "f", "n", "t"], rows)
}

pub fn table(s: &Settings) -> Result<Output> {
    let r = s.single_r()?;
    let csv = with_backend!(s.backend, |like| {
        let t = MonomialTable::build(LaplacianParams::derive(like.lift(r))?, s.jmax)?;
        table_csv(&t)?
    });
    let mut out = Output::new(artifact("table.csv", csv));
    out.summary = format!("monomial table at r={r}, j<={}\n", s.jmax);
    Ok(out)
}

fn refine_with<S: Scalar>(like: &S, r: &BigRational, j: usize, k: usize, level: usize) -> Result<Output> {
    let t = MonomialTable::build(LaplacianParams::derive(like.lift(r))?, j)?;
    let calc = JetCalculus::new(&t);
    let m = calc.refine(&CoeffVector::monomial(j, k, like), level)?;
    let g = &m.mesh.geometry;
    let value = |v: usize| m.mesh.values[v].as_ref().expect("complete mesh");
    let rows = g.vertices.iter().enumerate().map(|(v, vert)| {
        let (x, y) = planar(vert.point, level);
        vec![word_string(&vert.addr.word), vert.addr.corner.to_string(), x.to_string(), y.to_string(), value(v).render()]
    });
    let csv = csv_string(&["word", "vertex_index", "x", "y", "value"], rows)?;
    let triangles: Vec<([(f64, f64); 3], f64)> = g
        .corners
        .iter()
        .map(|c| {
            let pts = c.map(|v| planar(g.vertices[v].point, level));
            let mean = c.iter().map(|&v| value(v).to_f64()).sum::<f64>() / 3.0;
            (pts, mean)
        })
        .collect();
    let title = format!("P_{{{j},{k}}} at r = {r}, level {level}");
    let mut out = Output::new(artifact("refine.csv", csv));
    out.extra.push(artifact("refine.svg", heightfield(&title, &triangles)));
    let b: Vec<String> = (0..3).map(|s| value(g.boundary_vertex(s)).render()).collect();
    out.summary = format!("{title}: {} vertices, boundary values ({})\n", g.vertices.len(), b.join(", "));
    Ok(out)
}

pub fn refine(s: &Settings) -> Result<Output> {
    let r = s.single_r()?;
    if s.level > MAX_LEVEL {
        return Err(CliError::Usage(format!("level {} exceeds the cap of {MAX_LEVEL}", s.level)));
    }
    if !(1..=3).contains(&s.k) {
        return Err(CliError::Usage(format!("k must be 1, 2 or 3, got {}", s.k)));
    }
    with_backend!(s.backend, |like| refine_with(&like, r, s.j, s.k, s.level))
}

/// Branch limits at one r, in [`Branch::ALL`] order.
#[derive(Clone, Debug)]
pub struct SpectrumPoint {
    pub r: f64,
    pub seeds: Vec<Float>,
    pub limits: Vec<Float>,
    pub iterations: Vec<usize>,
}

impl SpectrumPoint {
    pub fn lambda2(&self) -> &Float {
        &self.limits[1]
    }

    pub fn lambda3(&self) -> &Float {
        &self.limits[2]
    }

    pub fn target(&self) -> Float {
        let (l2, l3) = (self.lambda2(), self.lambda3());
        -(l2.one_like() / (l3.int(2) * l3 - l2))
    }

    /// Whether the limits sort in the same order as the seeds.
    pub fn order_preserved(&self) -> bool {
        let mut idx: Vec<usize> = (0..self.seeds.len()).collect();
        idx.sort_by(|&a, &b| self.seeds[a].partial_cmp(&self.seeds[b]).expect("finite"));
        idx.windows(2).all(|w| self.limits[w[0]] <= self.limits[w[1]])
    }
}

pub fn spectrum_point(r: &Float, shown: f64) -> Result<SpectrumPoint> {
    let dec = Decimation::new(LaplacianParams::derive(r.clone())?);
    let mut out = SpectrumPoint { r: shown, seeds: Vec::new(), limits: Vec::new(), iterations: Vec::new() };
    for b in Branch::ALL {
        let t = branch_limit(&dec, b)?;
        out.seeds.push(b.seed(r));
        out.limits.push(t.limit.clone());
        out.iterations.push(t.iterations());
    }
    Ok(out)
}

pub fn spectrum(s: &Settings) -> Result<Output> {
    let prec = s.precision;
    let inputs: Vec<(Float, f64)> = if !s.rs.is_empty() && !s.grid_requested {
        s.rs.iter().map(|q| (Float::from_rational(q, prec), sgpoly::scalar::ratio_to_f64(q))).collect()
    } else {
        s.grid.values().into_iter().map(|r| (Float::from_f64(r, prec), r)).collect()
    };
    let points: Vec<SpectrumPoint> =
        inputs.par_iter().map(|(r, shown)| spectrum_point(r, *shown)).collect::<Result<_>>()?;
    let rows = points.iter().flat_map(|p| {
        Branch::ALL.iter().enumerate().map(move |(i, b)| {
            vec![
                p.r.to_string(),
                p.seeds[i].render(),
                b.multiplicity().to_string(),
                p.limits[i].render(),
                p.iterations[i].to_string(),
            ]
        })
    });
    let csv = csv_string(&["r", "branch_seed", "multiplicity", "lambda_limit", "iterations"], rows)?;
    let target_rows = points.iter().map(|p| {
        vec![p.r.to_string(), p.lambda2().render(), p.lambda3().render(), p.target().render()]
    });
    let target_csv = csv_string(&["r", "lambda2", "lambda3", "target_ratio"], target_rows)?;
    let mut out = Output::new(artifact("spectrum.csv", csv));
    out.extra.push(artifact("target.csv", target_csv));
    if points.len() > 1 {
        let plot = LinePlot {
            title: "First six nonzero Neumann eigenvalues".into(),
            x_label: "r".into(),
            y_label: "eigenvalue".into(),
            log_x: s.grid.log,
            log_y: true,
            y_range: None,
            series: Branch::ALL
                .iter()
                .enumerate()
                .map(|(i, b)| Series {
                    name: format!("{} (x{})", b.name(), b.multiplicity()),
                    points: points.iter().map(|p| (p.r, p.limits[i].to_f64())).collect(),
                })
                .collect(),
        };
        out.extra.push(artifact("spectrum.svg", plot.render()));
    }
    let mut summary = String::new();
    for p in &points {
        let lims: Vec<String> = p.limits.iter().map(|l| format!("{:.10}", l.to_f64())).collect();
        summary.push_str(&format!("r={}: limits {}; target {:.12e}\n", p.r, lims.join(" "), p.target().to_f64()));
    }
    let violations: Vec<String> = points.iter().filter(|p| !p.order_preserved()).map(|p| p.r.to_string()).collect();
    if !violations.is_empty() {
        summary.push_str(&format!("limit order differs from seed order at r = {}\n", violations.join(", ")));
    }
    out.summary = summary;
    Ok(out)
}

fn conjectures_with<S: Scalar>(like: &S, s: &Settings) -> Result<Output> {
    let rs = s.grid.values();
    let jmax = s.jmax;
    let reports: Vec<PointReport<S>> = report::sweep(like, &rs, jmax, s.precision)?;
    let per_j = reports.iter().flat_map(|p| {
        p.rows.iter().map(move |row| {
            vec![
                p.r.to_string(),
                row.j.to_string(),
                render_opt(&row.alpha),
                render_opt(&row.beta),
                render_opt(&row.gamma),
                render_opt(&row.gamma_alpha),
                p.target.target.render(),
                render_dev(p.deviation(&row.alpha)),
                render_dev(p.deviation(&row.beta)),
            ]
        })
    });
    let header = [
        "r",
        "j",
        "alpha_ratio",
        "beta_ratio",
        "gamma_ratio",
        "gamma_alpha_ratio",
        "target_ratio",
        "alpha_dev",
        "beta_dev",
    ];
    let ratios_csv = csv_string(&header, per_j)?;
    let last = reports.iter().map(|p| {
        let row = p.last();
        vec![
            p.r.to_string(),
            row.j.to_string(),
            render_opt(&row.alpha),
            render_opt(&row.beta),
            render_opt(&row.gamma),
            render_opt(&row.gamma_alpha),
            p.target.target.render(),
            render_dev(p.deviation(&row.alpha)),
            render_dev(p.deviation(&row.beta)),
        ]
    });
    let summary_csv = csv_string(&header, last)?;

    let alpha_vals: Vec<S> = reports.iter().map(|p| p.alpha_last.clone()).collect();
    let gamma_vals: Vec<S> = reports.iter().map(|p| p.gamma_last.clone()).collect();
    let alpha_roots = report::localize_roots(like, 1, jmax, &rs, &alpha_vals, ROOT_WIDTH)?;
    let gamma_roots = report::localize_roots(like, 3, jmax, &rs, &gamma_vals, ROOT_WIDTH)?;
    let roots_csv = csv_string(
        &["sequence", "j", "r_lo", "r_hi"],
        alpha_roots
            .iter()
            .chain(&gamma_roots)
            .map(|b| vec![b.sequence().into(), b.j.to_string(), b.lo.to_string(), b.hi.to_string()]),
    )?;

    let target_pts: Vec<(f64, f64)> = reports.iter().map(|p| (p.r, p.target_f64())).collect();
    let t_lo = target_pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let t_hi = target_pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let ratio_series = |name: &str, f: &dyn Fn(&PointReport<S>) -> Option<f64>| Series {
        name: name.into(),
        points: reports.iter().map(|p| (p.r, f(p).unwrap_or(f64::NAN))).collect(),
    };
    let plot = LinePlot {
        title: format!("Consecutive ratios at j = {} against -1/(2 lambda3 - lambda2)", jmax - 1),
        x_label: "r".into(),
        y_label: "ratio".into(),
        log_x: s.grid.log,
        log_y: false,
        y_range: Some((2.0 * t_lo, t_hi.min(0.0) * 0.25)),
        series: vec![
            ratio_series("alpha ratio", &|p| p.last().alpha.as_ref().map(Scalar::to_f64)),
            ratio_series("beta ratio", &|p| p.last().beta.as_ref().map(Scalar::to_f64)),
            Series { name: "target".into(), points: target_pts },
        ],
    };

    let mut summary = format!(
        "grid: {} points on [{}, {}] ({}), jmax={jmax}\n",
        rs.len(),
        s.grid.r_min,
        s.grid.r_max,
        if s.grid.log { "log" } else { "linear" }
    );
    let worst = |f: &dyn Fn(&PointReport<S>) -> Option<f64>| {
        reports.iter().filter_map(|p| f(p).map(|d| (p.r, d))).max_by(|a, b| a.1.total_cmp(&b.1))
    };
    if let Some((r, d)) = worst(&|p| p.deviation(&p.last().alpha)) {
        summary.push_str(&format!("max alpha ratio deviation at j={}: {d:.4e} (r={r})\n", jmax - 1));
    }
    if let Some((r, d)) = worst(&|p| p.deviation(&p.last().beta)) {
        summary.push_str(&format!("max beta ratio deviation at j={}: {d:.4e} (r={r})\n", jmax - 1));
    }
    for (label, x) in [("(sqrt(17)-3)/4", special_root()), ("1", 1.0)] {
        match nearest(&alpha_roots, x) {
            Some(b) => summary.push_str(&format!(
                "alpha_{jmax} root nearest {label}: [{}, {}], distance {:.3e}\n",
                b.lo,
                b.hi,
                (b.mid() - x).abs()
            )),
            None => summary.push_str(&format!("alpha_{jmax}: no sign change on the grid\n")),
        }
    }
    let g: Vec<String> = gamma_roots.iter().map(|b| format!("{:.6}", b.mid())).collect();
    summary.push_str(&format!("gamma_{jmax} roots: {}\n", if g.is_empty() { "none".into() } else { g.join(", ") }));
    let beta_ratio: Vec<Option<f64>> = reports.iter().map(|p| p.last().beta.as_ref().map(Scalar::to_f64)).collect();
    if let Some((r, v)) = local_max_near(&rs, &beta_ratio, special_root()) {
        summary.push_str(&format!("beta ratio local maximum nearest {:.7}: {v:.6e} at r={r}\n", special_root()));
    }

    let mut out = Output::new(artifact("conjectures.csv", summary_csv));
    out.extra.push(artifact("ratios.csv", ratios_csv));
    out.extra.push(artifact("roots.csv", roots_csv));
    out.extra.push(artifact("ratios.svg", plot.render()));
    out.summary = summary;
    Ok(out)
}

pub fn conjectures(s: &Settings) -> Result<Output> {
    if s.jmax == 0 {
        return Err(CliError::Usage("jmax must be at least 1".into()));
    }
    with_backend!(s.backend, |like| conjectures_with(&like, s))
}

/// Degree bound of the mesh identities in `verify`.
pub const VERIFY_MESH_JMAX: usize = 10;
pub const VERIFY_LEVEL: usize = 2;

pub fn verify(s: &Settings) -> Result<Output> {
    let rs = if s.rs.is_empty() { default_verify_rs() } else { s.rs.clone() };
    let report = verify_all(&rs, s.jmax, VERIFY_MESH_JMAX, VERIFY_LEVEL)?;
    let text = report.render();
    let mut out = Output::new(artifact("verify.txt", text));
    out.success = report.passed();
    out.summary = if out.success { "all checks passed\n".into() } else { "some checks failed\n".into() };
    Ok(out)
}
