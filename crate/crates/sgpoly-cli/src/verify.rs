//! The exact identity suite behind `sgpoly verify`. All exact work runs on
//! [`RBig`], whose gcd keeps the level-2 mesh checks tractable.

use num_rational::BigRational;
use rayon::prelude::*;
use sgpoly::mesh::{Geometry, tilde_laplacian};
use sgpoly::oracle::{self, Family};
use sgpoly::spectrum::Decimation;
use sgpoly::scalar::{rational, to_rbig};
use sgpoly::{CoeffVector, Float, JetCalculus, LaplacianParams, MonomialTable, RBig, Scalar, harmonic_extension};

use crate::error::Result;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub r: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, r: &RBig, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), r: r.render(), passed, detail: detail.into() });
    }

    pub fn find(&self, name: &str) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} r={} {}", c.r, c.name));
            if !c.detail.is_empty() {
                out.push_str(&format!(" ({})", c.detail));
            }
            out.push('\n');
        }
        for w in &self.warnings {
            out.push_str(&format!("WARN {w}\n"));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} checks, {} failed, {} warnings\n", self.checks.len(), failed, self.warnings.len()));
        out
    }

    pub fn merge(mut self, other: VerifyReport) -> Self {
        self.checks.extend(other.checks);
        self.warnings.extend(other.warnings);
        self
    }
}

fn q(p: i64, d: i64) -> RBig {
    to_rbig(&rational(p, d))
}

fn first_failure(range: impl IntoIterator<Item = usize>, ok: impl Fn(usize) -> bool) -> Option<usize> {
    range.into_iter().find(|&j| !ok(j))
}

fn detail(fail: Option<usize>) -> String {
    fail.map(|j| format!("first failure at j={j}")).unwrap_or_default()
}

/// Table identities at one r for j ≤ jmax.
pub fn table_checks(t: &MonomialTable<RBig>, report: &mut VerifyReport) {
    let r = t.params.r.clone();
    let jmax = t.jmax();
    let init = t.alpha(0) == &q(1, 1) && t.beta(0) == &q(-1, 2) && t.gamma(0) == &q(1, 2);
    report.push(&r, "initial values a0=1 b0=-1/2 g0=1/2", init, "");
    if jmax >= 1 {
        report.push(&r, "a1=1/6", t.alpha(1) == &q(1, 6), t.alpha(1).render());
    }
    // boundary data (P(q0), P(q1), P(q2)) of the three degree-0 monomials
    let boundary = [[q(1, 1), q(1, 1), q(1, 1)], [q(0, 1), q(-1, 2), q(-1, 2)], [q(0, 1), q(1, 2), q(-1, 2)]];
    let row0 = boundary.into_iter().enumerate().all(|(i, b)| t.v1_values(0, i + 1) == harmonic_extension(&t.params, b));
    report.push(&r, "row 0 is the harmonic extension of the initial data", row0, "");
    let skew = first_failure(0..=jmax, |j| t.row(3, j).aux[1].is_zero() && t.row(3, j).aux[5].is_zero());
    report.push(&r, "skew auxiliaries b,f vanish", skew.is_none(), detail(skew));
    let n2 = first_failure(1..=jmax, |j| t.normal(2, j) == &-t.alpha(j).clone());
    report.push(&r, "n_{j,2} = -a_j", n2.is_none(), detail(n2));
    let t3 = first_failure(1..=jmax, |j| t.tangential(3, j).is_zero());
    report.push(&r, "t_{j,3} = 0", t3.is_none(), detail(t3));
    let conv = first_failure(0..jmax, |j| {
        let s = (0..=j).fold(q(0, 1), |acc, i| acc + t.tangential(1, j + 1 - i).clone() * t.gamma(i));
        t.alpha(j + 1) == &(q(2, 1) * s)
    });
    report.push(&r, "a_{j+1} = 2 sum t_{j+1-i,1} g_i", conv.is_none(), detail(conv));
    if r == q(1, 1) {
        let g3 = first_failure(0..jmax, |j| t.gamma(j) == &(q(3, 1) * t.alpha(j + 1)));
        report.push(&r, "g_j(1) = 3 a_{j+1}(1)", g3.is_none(), detail(g3));
    }
}

/// Harmonic extensions of the three boundary deltas are discretely harmonic.
pub fn harmonic_checks(p: &LaplacianParams<RBig>, report: &mut VerifyReport) -> Result<()> {
    let g = Geometry::level1();
    let mut ok = true;
    for s in 0..3 {
        let mut b = [q(0, 1), q(0, 1), q(0, 1)];
        b[s] = q(1, 1);
        let mesh = harmonic_extension(p, b).into_mesh(p.clone());
        for v in (0..g.vertices.len()).filter(|&v| !g.vertices[v].is_boundary()) {
            ok &= tilde_laplacian(&mesh, v)?.is_zero();
        }
    }
    report.push(&p.r, "harmonic extension has zero graph Laplacian on V1", ok, "");
    Ok(())
}

/// Refinement identities for every monomial P_{j,k}, j ≤ jmax, on V_level.
pub fn mesh_checks(t: &MonomialTable<RBig>, jmax: usize, level: usize, report: &mut VerifyReport) -> Result<()> {
    let r = t.params.r.clone();
    let calc = JetCalculus::new(t);
    let one = q(1, 1);
    let cases: Vec<(usize, usize)> = (0..=jmax).flat_map(|j| (1..=3).map(move |k| (j, k))).collect();
    // [laplacian identity, matching, rotation sum (k=3), three-point, tangential sum, reflection]
    let results: Vec<sgpoly::Result<[bool; 6]>> = cases
        .par_iter()
        .map(|&(j, k)| {
            let m = calc.refine(&CoeffVector::monomial(j, k, &one), level)?;
            Ok([
                m.laplacian_identity_defect(&calc)?.is_zero(),
                m.matching_defect(&calc)?.is_zero(),
                k != 3 || m.rotation_sum_defect().is_zero(),
                m.three_point_defect().is_zero(),
                m.tangential_sum_defect(&calc)?.is_zero(),
                m.reflection_defect(if k == 3 { -1 } else { 1 }).is_zero(),
            ])
        })
        .collect();
    let mut fails: [Option<(usize, usize)>; 6] = [None; 6];
    let mut junction_ok = true;
    for (res, &(j, k)) in results.into_iter().zip(&cases) {
        match res {
            Ok(flags) => {
                for (f, ok) in fails.iter_mut().zip(flags) {
                    if !ok && f.is_none() {
                        *f = Some((j, k));
                    }
                }
            }
            Err(sgpoly::Error::Junction(_)) => junction_ok = false,
            Err(e) => return Err(e.into()),
        }
    }
    let names = [
        "refined Laplacian equals weighted sum of alpha_i L^{mi} Laplacian powers",
        "normal derivatives match across junctions",
        "P_{j,3}(x) + P_{j,3}(rho x) + P_{j,3}(rho^-1 x) = 0",
        "P(x)+P(rho x)+P(rho^-1 x) = P(R0 x)+P(R1 x)+P(R2 x)",
        "tangential derivatives sum to zero on every cell",
        "reflection parity of P_{j,k}",
    ];
    let ctx = format!("j<={jmax}, level {level}");
    report.push(&r, "junction values from adjacent cells agree", junction_ok, ctx.clone());
    for (name, f) in names.iter().zip(fails) {
        let d = f.map_or(ctx.clone(), |(j, k)| format!("{ctx}; first failure P_{{{j},{k}}}"));
        report.push(&r, name, f.is_none(), d);
    }
    Ok(())
}

/// Slope of the decimation map at 0 against 1/L, in 256-bit floats.
pub fn slope_check(r: &BigRational, report: &mut VerifyReport) -> Result<()> {
    let shown = to_rbig(r);
    let p = LaplacianParams::derive(Float::from_rational(r, 256))?;
    let d = Decimation::new(p.clone());
    let h = Float::from_f64(1e-20, 256);
    let inv_l = p.l.one_like() / &p.l;
    let slope = h.clone() / d.down(&h)?;
    let rel = ((slope - &inv_l) / &inv_l).abs().to_f64();
    report.push(&shown, "decimation slope at 0 equals 1/L", rel < 1e-10, format!("rel. error {rel:.3e}"));
    Ok(())
}

/// Tabulated recurrences versus solver output; disagreements are warnings.
pub fn oracle_warnings(t: &MonomialTable<RBig>, jmax: usize, report: &mut VerifyReport) -> Result<()> {
    let r = t.params.r.render();
    for c in oracle::compare(t, jmax)? {
        let name = c.family.name();
        if c.relation_holds() && c.first_mismatch.is_none() {
            continue;
        }
        let labels = c.family.term_labels();
        let mut parts = Vec::new();
        if let Some(j) = c.residuals.iter().position(|x| !x.is_zero()) {
            parts.push(format!("printed relation fails on solver output from j={j}"));
        }
        if let Some(j) = c.first_mismatch {
            parts.push(format!("oracle sequence differs from solver from j={j}"));
        }
        report.warnings.push(format!("r={r} {name} recurrence: {}", parts.join("; ")));
        match &c.fitted {
            Some(f) => {
                for &i in &c.mismatched {
                    report.warnings.push(format!(
                        "r={r} {name} coefficient {} ({}): printed {}, fitted {}",
                        i,
                        labels[i],
                        c.printed[i].render(),
                        f[i].render()
                    ));
                }
            }
            None if c.family == Family::Alpha || !c.relation_holds() => report
                .warnings
                .push(format!("r={r} {name} coefficients: term series do not determine a unique fit")),
            None => {}
        }
    }
    Ok(())
}

/// The whole suite at one r.
pub fn verify_r(r: &BigRational, jmax: usize, mesh_jmax: usize, level: usize) -> Result<VerifyReport> {
    let p = LaplacianParams::derive(to_rbig(r))?;
    let t = MonomialTable::build(p.clone(), jmax)?;
    let mut report = VerifyReport::default();
    table_checks(&t, &mut report);
    harmonic_checks(&p, &mut report)?;
    let mesh_table = MonomialTable::build(p.clone(), mesh_jmax.min(jmax))?;
    mesh_checks(&mesh_table, mesh_jmax.min(jmax), level, &mut report)?;
    slope_check(r, &mut report)?;
    oracle_warnings(&t, jmax.min(15), &mut report)?;
    Ok(report)
}

pub fn verify_all(rs: &[BigRational], jmax: usize, mesh_jmax: usize, level: usize) -> Result<VerifyReport> {
    let reports: Vec<VerifyReport> =
        rs.par_iter().map(|r| verify_r(r, jmax, mesh_jmax, level)).collect::<Result<_>>()?;
    Ok(reports.into_iter().fold(VerifyReport::default(), VerifyReport::merge))
}
