//! Neumann spectrum of Δ_r by spectral decimation.
//!
//! The level-1 eigenproblem for even (Neumann) eigenfunctions is the graph
//! Laplacian on V₁ where each boundary vertex sees its two neighbours twice
//! (the reflected copy). Its eigenvalues seed six branches; each is pulled
//! down through the decimation map `λ_m = R(λ_{m+1})` by always taking the
//! smallest positive preimage, and `L^{-m} λ_m` converges to the continuum
//! eigenvalue.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::laplacian::LaplacianParams;
use crate::mesh::Geometry;
use crate::scalar::{Float, Scalar};

/// `-L Δ^(1)` on the reflected V₁ configuration, rows and columns in
/// [`Geometry::level1`] vertex order.
pub fn level1_matrix<S: Scalar>(params: &LaplacianParams<S>) -> Vec<Vec<S>> {
    let g = Geometry::level1();
    let r = &params.r;
    let n = g.vertices.len();
    let zero = r.zero_like();
    let mut m = vec![vec![zero.clone(); n]; n];
    for (v, vert) in g.vertices.iter().enumerate() {
        let (factor, diag, nbrs) = match g.junction_stencil(v, r) {
            Some(st) => {
                let f = if st.equal { r.ratio(3, 2) } else { r.int(3) / (r.one_like() + r) };
                (f, st.diag, st.neighbours)
            }
            None => {
                // boundary: the mirror image doubles both edges of the corner cell
                let (c, s) = vert.incident[0];
                let nbrs = (0..3u8)
                    .filter(|&t| t != s)
                    .map(|t| (g.corners[c][t as usize], r.int(2)))
                    .collect();
                (r.ratio(3, 2), r.int(4), nbrs)
            }
        };
        m[v][v] = factor.clone() * diag;
        for (u, w) in nbrs {
            m[v][u] = m[v][u].clone() - factor.clone() * w;
        }
    }
    m
}

/// Vertex weights `μ` with `μ_i M_ij = μ_j M_ji`, normalised to 1 at the
/// first vertex, so that `diag(√μ) M diag(√μ)^{-1}` is symmetric.
pub fn symmetrizing_weights(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut mu = vec![f64::NAN; n];
    mu[0] = 1.0;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if i != j && m[i][j] != 0.0 && mu[j].is_nan() {
                mu[j] = mu[i] * m[i][j] / m[j][i];
                stack.push(j);
            }
        }
    }
    mu
}

/// Eigenvalues of [`level1_matrix`], ascending.
pub fn level1_eigenvalues<S: Scalar>(params: &LaplacianParams<S>) -> Vec<f64> {
    let m: Vec<Vec<f64>> =
        level1_matrix(params).iter().map(|row| row.iter().map(Scalar::to_f64).collect()).collect();
    let mu = symmetrizing_weights(&m);
    let n = m.len();
    let sym = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            m[i][i]
        } else {
            // average the two sides to absorb rounding in μ
            0.5 * (m[i][j] * (mu[i] / mu[j]).sqrt() + m[j][i] * (mu[j] / mu[i]).sqrt())
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// The six nonzero level-1 eigenvalue branches, in the order of their
/// values for small r.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// `(15r+15 - 3√(9r²+18r+25)) / (4(r+1))`
    SqrtMinus,
    /// `3(2r+1)/(r+1)`; its limit is λ₂.
    Sym,
    /// `9/2`; its limit is λ₃.
    NineHalves,
    /// `3(2r+3)/(r+1)`
    Skew,
    /// `(15r+15 + 3√(9r²+18r+25)) / (4(r+1))`
    SqrtPlus,
    Nine,
}

impl Branch {
    pub const ALL: [Branch; 6] =
        [Branch::SqrtMinus, Branch::Sym, Branch::NineHalves, Branch::Skew, Branch::SqrtPlus, Branch::Nine];

    pub fn multiplicity(self) -> usize {
        match self {
            Branch::Sym | Branch::Skew => 1,
            Branch::SqrtMinus | Branch::SqrtPlus | Branch::NineHalves => 2,
            Branch::Nine => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::SqrtMinus => "sqrt_minus",
            Branch::Sym => "sym",
            Branch::NineHalves => "nine_halves",
            Branch::Skew => "skew",
            Branch::SqrtPlus => "sqrt_plus",
            Branch::Nine => "nine",
        }
    }

    /// Level-1 eigenvalue at `r`.
    pub fn seed(self, r: &Float) -> Float {
        let one = r.one_like();
        let rp1 = r.clone() + &one;
        let root = || (r.int(9) * r * r + r.int(18) * r + r.int(25)).sqrt() * r.int(3);
        match self {
            Branch::SqrtMinus => (r.int(15) * &rp1 - root()) / (r.int(4) * &rp1),
            Branch::SqrtPlus => (r.int(15) * &rp1 + root()) / (r.int(4) * &rp1),
            Branch::Sym => r.int(3) * (r.int(2) * r + &one) / rp1,
            Branch::Skew => r.int(3) * (r.int(2) * r + r.int(3)) / rp1,
            Branch::NineHalves => r.ratio(9, 2),
            Branch::Nine => r.int(9),
        }
    }

    pub fn seed_f64(self, r: f64) -> f64 {
        let root = 3.0 * (9.0 * r * r + 18.0 * r + 25.0).sqrt();
        match self {
            Branch::SqrtMinus => (15.0 * r + 15.0 - root) / (4.0 * (r + 1.0)),
            Branch::SqrtPlus => (15.0 * r + 15.0 + root) / (4.0 * (r + 1.0)),
            Branch::Sym => 3.0 * (2.0 * r + 1.0) / (r + 1.0),
            Branch::Skew => 3.0 * (2.0 * r + 3.0) / (r + 1.0),
            Branch::NineHalves => 4.5,
            Branch::Nine => 9.0,
        }
    }
}

/// The square-root pair with radicand `9r² + 18r + 15`, as it is sometimes
/// quoted; kept only so tests can show it is not part of the spectrum.
pub fn quoted_sqrt_pair(r: f64) -> (f64, f64) {
    let root = 3.0 * (9.0 * r * r + 18.0 * r + 15.0).sqrt();
    ((15.0 * r + 15.0 - root) / (4.0 * (r + 1.0)), (15.0 * r + 15.0 + root) / (4.0 * (r + 1.0)))
}

/// Closed-form level-1 spectrum: `(value, multiplicity)` with the zero
/// eigenvalue first, then the branches in [`Branch::ALL`] order.
#[derive(Clone, Debug)]
pub struct Level1Spectrum {
    pub r: f64,
    pub values: Vec<(f64, usize)>,
}

impl Level1Spectrum {
    pub fn closed_form(r: f64) -> Self {
        let mut values = vec![(0.0, 1)];
        values.extend(Branch::ALL.iter().map(|b| (b.seed_f64(r), b.multiplicity())));
        Level1Spectrum { r, values }
    }

    /// Closed-form values expanded by multiplicity, ascending.
    pub fn sorted(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.values.iter().flat_map(|&(v, m)| std::iter::repeat_n(v, m)).collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Largest relative deviation between `eigenvalues` and the closed form,
    /// after matching each computed value to its nearest closed-form value;
    /// `None` when the per-value counts differ from the multiplicities.
    pub fn match_computed(&self, eigenvalues: &[f64]) -> Option<f64> {
        let mut counts = vec![0usize; self.values.len()];
        let mut worst = 0.0f64;
        for &e in eigenvalues {
            let (idx, dev) = self
                .values
                .iter()
                .enumerate()
                .map(|(i, &(v, _))| (i, (e - v).abs() / v.abs().max(1.0)))
                .min_by(|a, b| a.1.total_cmp(&b.1))?;
            counts[idx] += 1;
            worst = worst.max(dev);
        }
        let ok = counts.iter().zip(&self.values).all(|(&c, &(_, m))| c == m);
        ok.then_some(worst)
    }
}

fn horner(p: &[Float], x: &Float) -> Float {
    p.iter().rev().fold(x.zero_like(), |acc, c| acc * x + c)
}

fn derivative(p: &[Float]) -> Vec<Float> {
    p.iter().enumerate().skip(1).map(|(i, c)| c.clone() * c.int(i as i64)).collect()
}

fn poly_mul(a: &[Float], b: &[Float]) -> Vec<Float> {
    let mut out = vec![a[0].zero_like(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y;
        }
    }
    out
}

/// Bisection on a bracket with a sign change, to `2^-60` relative width.
fn bisect(p: &[Float], mut a: Float, mut b: Float) -> Float {
    let fa_neg = horner(p, &a).signum_i32() < 0;
    let tol = a.pow2_like(-60);
    for _ in 0..400 {
        let mid = (a.clone() + &b) * a.ratio(1, 2);
        let fm = horner(p, &mid);
        if fm.is_zero() {
            return mid;
        }
        if (fm.signum_i32() < 0) == fa_neg {
            a = mid;
        } else {
            b = mid;
        }
        let scale = a.abs().max_of(b.abs());
        if b.clone() - &a <= tol.clone() * scale {
            break;
        }
    }
    (a + b) * tol.ratio(1, 2)
}

/// All real roots of `p` in `[a, b]`, ascending, isolated between the roots
/// of `p'`.
pub fn real_roots(p: &[Float], a: &Float, b: &Float) -> Vec<Float> {
    let mut p = p.to_vec();
    while p.len() > 1 && p.last().is_some_and(Scalar::is_zero) {
        p.pop();
    }
    match p.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let x = -(p[0].clone() / &p[1]);
            return if &x >= a && &x <= b { vec![x] } else { Vec::new() };
        }
        _ => {}
    }
    let mut pts = vec![a.clone()];
    pts.extend(real_roots(&derivative(&p), a, b));
    pts.push(b.clone());
    let mut out: Vec<Float> = Vec::new();
    for w in pts.windows(2) {
        let (fu, fv) = (horner(&p, &w[0]), horner(&p, &w[1]));
        let root = if fu.is_zero() {
            Some(w[0].clone())
        } else if fu.signum_i32() * fv.signum_i32() < 0 {
            Some(bisect(&p, w[0].clone(), w[1].clone()))
        } else {
            None
        };
        if let Some(x) = root
            && out.last() != Some(&x)
        {
            out.push(x);
        }
    }
    if horner(&p, b).is_zero() && out.last() != Some(b) {
        out.push(b.clone());
    }
    out
}

/// The decimation map at a fixed r, `λ_m = R(λ_{m+1}) = -N(x) / (27 r d(x))`.
#[derive(Clone, Debug)]
pub struct Decimation {
    pub params: LaplacianParams<Float>,
    /// `N(x) = 2x((r+1)x - 6r - 3) C(x)`, low degree first.
    numerator: Vec<Float>,
    /// `d(x) = (r+1)x - 3r - 6`
    denominator: Vec<Float>,
    /// Zero of `d`, where R has its pole.
    pub pole: Float,
}

impl Decimation {
    pub fn new(params: LaplacianParams<Float>) -> Self {
        let r = params.r.clone();
        let q = |a: i64, b: i64| r.ratio(a, b);
        let rp1 = r.clone() + r.one_like();
        let c = vec![
            -(q(243, 4) * &r * &r + q(351, 2) * &r + q(405, 4)),
            q(243, 4) * &r * &r + q(279, 2) * &r + q(279, 4),
            -(r.int(15) * &rp1 * &rp1),
            rp1.clone() * &rp1,
        ];
        let lin = vec![-(r.int(6) * &r + r.int(3)), rp1.clone()];
        let numerator = poly_mul(&poly_mul(&[r.zero_like(), r.int(2)], &lin), &c);
        let denominator = vec![-(r.int(3) * &r + r.int(6)), rp1.clone()];
        let pole = (r.int(3) * &r + r.int(6)) / rp1;
        Decimation { params, numerator, denominator, pole }
    }

    pub fn numerator_at(&self, x: &Float) -> Float {
        horner(&self.numerator, x)
    }

    /// `R(x)`, the level-m eigenvalue produced by level-(m+1) eigenvalue x.
    pub fn forward(&self, x: &Float) -> Float {
        let r = &self.params.r;
        -(self.numerator_at(x) / (r.int(27) * r * horner(&self.denominator, x)))
    }

    /// Smallest positive root of `N(x) + 27 r λ_m d(x) = 0`, off the pole.
    pub fn down(&self, lm: &Float) -> Result<Float> {
        if lm.is_zero() {
            return Ok(lm.zero_like());
        }
        let r = &self.params.r;
        let k = r.int(27) * r * lm;
        let mut q = self.numerator.clone();
        for (i, d) in self.denominator.iter().enumerate() {
            q[i] = q[i].clone() + k.clone() * d;
        }
        let lead = q.last().expect("degree 5").abs();
        let bound = q[..q.len() - 1].iter().fold(lm.one_like(), |acc, c| acc.max_of(c.abs() / &lead)) + lm.one_like();
        let zero = lm.zero_like();
        let near_pole = self.pole.clone() * self.pole.rel_eps(self.pole.precision() / 2);
        let root = real_roots(&q, &zero, &bound)
            .into_iter()
            .find(|x| x > &zero && (x.clone() - &self.pole).abs() > near_pole)
            .ok_or_else(|| Error::RootNotFound { lambda: lm.render(), r: r.render() })?;
        Ok(newton_polish(&q, root))
    }

    /// Pulls `seed` down until `L^{-m} λ_m` settles to relative change `tol`.
    pub fn neumann_eigenvalue(&self, seed: &Float, tol: f64, max_level: usize) -> Result<DecimationTrajectory> {
        let l = &self.params.l;
        let mut lambdas = vec![seed.clone()];
        let mut renormalized = vec![seed.clone() / l];
        if seed.is_zero() {
            return Ok(DecimationTrajectory { limit: seed.clone(), lambdas, renormalized, converged: true });
        }
        let tol = Float::from_f64(tol, seed.precision());
        let mut lpow = l.clone();
        while lambdas.len() < max_level {
            let next = self.down(lambdas.last().expect("nonempty"))?;
            lpow = lpow * l;
            let cur = next.clone() / &lpow;
            let prev = renormalized.last().expect("nonempty").clone();
            lambdas.push(next);
            renormalized.push(cur.clone());
            if (cur.clone() - &prev).abs() < tol.clone() * cur.abs() {
                return Ok(DecimationTrajectory { limit: cur, lambdas, renormalized, converged: true });
            }
        }
        Err(Error::NonConvergence {
            seed: seed.render(),
            r: self.params.r.render(),
            iterations: lambdas.len(),
            trajectory: renormalized.iter().map(Scalar::to_f64).collect(),
        })
    }
}

fn newton_polish(p: &[Float], mut x: Float) -> Float {
    let dp = derivative(p);
    let eps = x.rel_eps(8);
    for _ in 0..8 {
        let d = horner(&dp, &x);
        if d.is_zero() {
            break;
        }
        let step = horner(p, &x) / d;
        let next = x.clone() - &step;
        // bisection already has 60 correct bits; a large step means a bad derivative
        if step.abs() > x.abs() * x.pow2_like(-50) {
            break;
        }
        x = next;
        if step.abs() <= eps.clone() * x.abs() {
            break;
        }
    }
    x
}

/// `λ_1, λ_2, ...` for one branch; `lambdas[m-1]` is the level-m eigenvalue.
#[derive(Clone, Debug)]
pub struct DecimationTrajectory {
    pub lambdas: Vec<Float>,
    /// `L^{-m} λ_m`
    pub renormalized: Vec<Float>,
    pub limit: Float,
    pub converged: bool,
}

impl DecimationTrajectory {
    /// Number of levels m used.
    pub fn iterations(&self) -> usize {
        self.lambdas.len()
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const MAX_LEVEL: usize = 200;

/// Continuum Neumann eigenvalue of one branch at r.
pub fn branch_limit(dec: &Decimation, branch: Branch) -> Result<DecimationTrajectory> {
    dec.neumann_eigenvalue(&branch.seed(&dec.params.r), DEFAULT_TOLERANCE, MAX_LEVEL)
}

/// λ₂, λ₃ and the conjectured ratio limit `-1/(2λ₃ - λ₂)`.
#[derive(Clone, Debug)]
pub struct TargetRatio {
    pub lambda2: Float,
    pub lambda3: Float,
    pub target: Float,
}

pub fn target_ratio(params: &LaplacianParams<Float>) -> Result<TargetRatio> {
    let dec = Decimation::new(params.clone());
    let lambda2 = branch_limit(&dec, Branch::Sym)?.limit;
    let lambda3 = branch_limit(&dec, Branch::NineHalves)?.limit;
    let target = -(lambda2.one_like() / (lambda3.int(2) * &lambda3 - &lambda2));
    Ok(TargetRatio { lambda2, lambda3, target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn fparams(p: i64, q: i64) -> LaplacianParams<Float> {
        LaplacianParams::derive(Float::from_rational(&rational(p, q), 256)).unwrap()
    }

    #[test]
    fn constants_are_in_the_kernel() {
        let p = LaplacianParams::derive(rational(3, 7)).unwrap();
        for row in level1_matrix(&p) {
            assert!(row.iter().fold(rational(0, 1), |a, b| a + b).is_zero());
        }
    }

    #[test]
    fn spectrum_at_one() {
        let p = LaplacianParams::derive(rational(1, 1)).unwrap();
        let ev = level1_eigenvalues(&p);
        let expect = Level1Spectrum::closed_form(1.0).sorted();
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert!((expect[1] - (30.0 - 3.0 * 52f64.sqrt()) / 8.0).abs() < 1e-14);
    }

    #[test]
    fn decimation_zero_is_fixed() {
        let d = Decimation::new(fparams(2, 3));
        assert!(d.down(&d.pole.zero_like()).unwrap().is_zero());
    }

    #[test]
    fn down_inverts_forward() {
        let d = Decimation::new(fparams(1, 2));
        for seed in Branch::ALL.map(|b| b.seed(&d.params.r)) {
            let x = d.down(&seed).unwrap();
            let back = d.forward(&x);
            assert!(((back - &seed) / &seed).abs().to_f64() < 1e-60);
        }
    }

    #[test]
    fn standard_gasket_limits() {
        let d = Decimation::new(fparams(1, 1));
        let t = branch_limit(&d, Branch::SqrtMinus).unwrap();
        assert!((t.limit.to_f64() - 27.1144254).abs() < 1e-6);
        let t = target_ratio(&d.params).unwrap();
        assert!((t.target.to_f64() + 0.00737614745862).abs() < 1e-13);
    }
}
