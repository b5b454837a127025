//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! status if any criterion fails.

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sgpoly::oracle;
use sgpoly::scalar::{rational, to_rbig};
use sgpoly::spectrum::{Branch, Decimation, Level1Spectrum, branch_limit, level1_eigenvalues};
use sgpoly::{Float, LaplacianParams, MonomialTable, Scalar};
use sgpoly_cli::config::{Grid, default_verify_rs};
use sgpoly_cli::report::{nearest, point_report, scan_roots, special_root};
use sgpoly_cli::verify::{VerifyReport, mesh_checks, oracle_warnings, table_checks};

struct Outcome {
    passed: bool,
    detail: String,
}

fn run(n: usize, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if let Some(l) = limit.filter(|&l| elapsed > l) {
        out.passed = false;
        out.detail.push_str(&format!("; over the {}s budget", l.as_secs()));
    }
    let status = if out.passed { "PASS" } else { "FAIL" };
    let mut stdout = std::io::stdout();
    writeln!(stdout, "{status} criterion {n} {title}: {} [{:.1}s]", out.detail, elapsed.as_secs_f64()).unwrap();
    out.passed
}

fn failures(report: &VerifyReport) -> Vec<String> {
    report.checks.iter().filter(|c| !c.passed).map(|c| format!("r={} {}", c.r, c.name)).collect()
}

fn summarize(report: &VerifyReport) -> Outcome {
    let failed = failures(report);
    let detail = if failed.is_empty() {
        format!("{} checks hold", report.checks.len())
    } else {
        format!("{} of {} checks fail: {}", failed.len(), report.checks.len(), failed.join(", "))
    };
    Outcome { passed: failed.is_empty(), detail }
}

fn identity_suite() -> Outcome {
    let mut report = VerifyReport::default();
    for r in default_verify_rs() {
        let t = MonomialTable::build(LaplacianParams::derive(to_rbig(&r)).unwrap(), 20).unwrap();
        table_checks(&t, &mut report);
    }
    summarize(&report)
}

fn poly(r: &BigRational, c: &[i64]) -> BigRational {
    c.iter().rev().fold(rational(0, 1), |acc, &x| acc * r + rational(x, 1))
}

fn closed_forms(r: &BigRational) -> [BigRational; 3] {
    let d = poly(r, &[225, 1170, 2372, 2272, 999, 162]);
    let alpha2 = r.clone() * poly(r, &[77, 305, 420, 233, 45])
        / (rational(9, 1) * poly(r, &[225, 1620, 4712, 7016, 5543, 2160, 324]));
    let beta1 = -(r.clone() * poly(r, &[291, 947, 1066, 495, 81]) / (rational(9, 1) * &d));
    let gamma1 = r.clone() * poly(r, &[62, 155, 116, 27]) / (rational(3, 1) * d);
    [alpha2, beta1, gamma1]
}

fn closed_form_regression() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20);
    let mut bad = Vec::new();
    for _ in 0..50 {
        let r = BigRational::new(BigInt::from(rng.random_range(1..=5000)), BigInt::from(rng.random_range(1..=500)));
        let t = MonomialTable::build(LaplacianParams::derive(r.clone()).unwrap(), 2).unwrap();
        let [a2, b1, g1] = closed_forms(&r);
        if t.alpha(2) != &a2 || t.beta(1) != &b1 || t.gamma(1) != &g1 {
            bad.push(r.to_string());
        }
    }
    let detail =
        if bad.is_empty() { "50 random r agree exactly".into() } else { format!("disagree at r = {}", bad.join(", ")) };
    Outcome { passed: bad.is_empty(), detail }
}

fn mesh_suite() -> Outcome {
    let mut report = VerifyReport::default();
    for r in default_verify_rs() {
        let t = MonomialTable::build(LaplacianParams::derive(to_rbig(&r)).unwrap(), 10).unwrap();
        mesh_checks(&t, 10, 2, &mut report).unwrap();
    }
    summarize(&report)
}

fn spectrum_suite() -> Outcome {
    let grid = Grid { r_min: 0.05, r_max: 20.0, points: 100, log: true };
    let mut worst_eig = 0.0f64;
    let mut worst_slope = 0.0f64;
    let mut max_iter = 0;
    let mut problems = Vec::new();
    for r in grid.values() {
        let p = LaplacianParams::derive(Float::from_f64(r, 256)).unwrap();
        match Level1Spectrum::closed_form(r).match_computed(&level1_eigenvalues(&p)) {
            Some(dev) => worst_eig = worst_eig.max(dev),
            None => problems.push(format!("multiplicities at r={r}")),
        }
        let d = Decimation::new(p.clone());
        let h = Float::from_f64(1e-20, 256);
        let inv_l = p.l.one_like() / &p.l;
        match d.down(&h) {
            Ok(x) => worst_slope = worst_slope.max(((h / x - &inv_l) / &inv_l).abs().to_f64()),
            Err(e) => problems.push(format!("slope at r={r}: {e}")),
        }
        for b in Branch::ALL {
            match branch_limit(&d, b) {
                Ok(t) if t.converged => max_iter = max_iter.max(t.iterations()),
                Ok(_) => problems.push(format!("{} at r={r} did not converge", b.name())),
                Err(e) => problems.push(format!("{} at r={r}: {e}", b.name())),
            }
        }
    }
    let passed = problems.is_empty() && worst_eig < 1e-12 && worst_slope < 1e-10 && max_iter <= 60;
    let mut detail = format!(
        "100 points: eigenvalue rel. dev. {worst_eig:.2e}, slope rel. dev. {worst_slope:.2e}, max iterations {max_iter}"
    );
    if !problems.is_empty() {
        detail.push_str(&format!("; {}", problems.join(", ")));
    }
    Outcome { passed, detail }
}

fn conjecture_diagnostics() -> Outcome {
    let like = Float::from_i64(0, 256);
    let mut passed = true;
    let mut parts = Vec::new();
    for r in [0.5, 2.0, 5.0] {
        let rep = point_report(&like, r, 50, 256).unwrap();
        let last = rep.last();
        let da = rep.deviation(&last.alpha).unwrap_or(f64::INFINITY);
        let db = rep.deviation(&last.beta).unwrap_or(f64::INFINITY);
        passed &= da < 0.1 && db < 0.1;
        parts.push(format!("r={r}: alpha dev {da:.3e}, beta dev {db:.3e}"));
    }
    let rep = point_report(&like, 1.0, 50, 256).unwrap();
    let expected = -1.0 / rep.target.lambda2.to_f64();
    let beta = rep.last().beta.as_ref().map_or(f64::NAN, Scalar::to_f64);
    let dev = ((beta - expected) / expected).abs();
    passed &= dev < 1e-2;
    parts.push(format!("r=1: beta ratio {beta:.6e} vs -1/lambda2 {expected:.6e} (rel. {dev:.2e})"));
    Outcome { passed, detail: parts.join("; ") }
}

fn root_localization() -> Outcome {
    let grid = Grid { r_min: 0.1, r_max: 2.0, points: 40, log: true };
    let like = Float::from_i64(0, 256);
    let roots = scan_roots(&like, 1, 40, &grid.values(), 1e-6).unwrap();
    let near = nearest(&roots, 0.28).map(|b| b.mid());
    let one = nearest(&roots, 1.0).map(|b| b.mid());
    let d1 = near.map_or(f64::INFINITY, |x| (x - special_root()).abs());
    let d2 = one.map_or(f64::INFINITY, |x| (x - 1.0).abs());
    let fmt = |x: Option<f64>| x.map_or("none".to_string(), |x| format!("{x:.7}"));
    Outcome {
        passed: d1 < 0.01 && d2 < 0.02,
        detail: format!(
            "{} roots; nearest 0.28: {} (distance to (sqrt17-3)/4 {d1:.2e}); nearest 1: {} (distance {d2:.2e})",
            roots.len(),
            fmt(near),
            fmt(one)
        ),
    }
}

fn recurrence_oracle() -> Outcome {
    let t = MonomialTable::build(LaplacianParams::derive(to_rbig(&rational(1, 1))).unwrap(), 15).unwrap();
    let comparisons = oracle::compare(&t, 15).unwrap();
    let mut report = VerifyReport::default();
    oracle_warnings(&t, 15, &mut report).unwrap();
    let mut passed = true;
    let mut parts = Vec::new();
    for c in &comparisons {
        let name = c.family.name();
        if c.relation_holds() && c.first_mismatch.is_none() {
            parts.push(format!("{name} reproduced"));
        } else {
            // a disagreement is acceptable only if the report itemizes it
            let listed = report.warnings.iter().any(|w| w.contains(&format!("{name} coefficient")));
            passed &= listed;
            parts.push(format!("{name} differs ({} coefficients listed)", c.mismatched.len()));
        }
    }
    for w in &report.warnings {
        println!("  ledger: {w}");
    }
    Outcome { passed, detail: parts.join(", ") }
}

fn main() {
    let results = [
        run(1, "exact identity suite, j<=20", Some(Duration::from_secs(120)), identity_suite),
        run(2, "closed-form regression", None, closed_form_regression),
        run(3, "mesh identities, j<=10, level 2", Some(Duration::from_secs(60)), mesh_suite),
        run(4, "level-1 spectrum and decimation", Some(Duration::from_secs(60)), spectrum_suite),
        run(5, "conjecture diagnostics, jmax=50", Some(Duration::from_secs(300 * 4)), conjecture_diagnostics),
        run(6, "root localization of alpha_40", None, root_localization),
        run(7, "recurrence oracle at r=1, j<=15", None, recurrence_oracle),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
