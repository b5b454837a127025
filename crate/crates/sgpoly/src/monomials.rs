//! Boundary and V₁ values of the monomials P_{j,k}, and their normal and
//! tangential derivatives at q1.
//!
//! Each degree is obtained from a small affine system: the discrete Laplacian
//! Δ̃^(1) of P_{j,k} at an interior vertex x of V₁ equals
//! `w(x) Σ_{i≥1} L^i α_i P_{j-i,k}(x)` (w = 4 or 2+2r by resistance case).
//! Symmetry under the reflection fixing q0 leaves seven unknowns: the value at
//! q1 and six auxiliary values a..f (five for k = 3, where b = f = 0).

use crate::error::{Error, Result};
use crate::laplacian::{LaplacianParams, V1Values};
use crate::linalg::{self, SolveError};
use crate::mesh::{Geometry, Point};
use crate::scalar::Scalar;

/// Auxiliary vertex representatives (quarter units), in storage order a..f.
pub const AUX_POINTS: [(u64, u64); 6] = [(2, 0), (1, 1), (3, 0), (2, 1), (3, 1), (2, 2)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Site {
    Q0,
    Q1,
    /// F_00 q1 = (1/4, 0)
    Scaled,
    Aux(usize),
}

/// Site of a V₁ point and whether it is the mirror image (under x ↔ y) of
/// the stored representative.
fn site_of(p: Point) -> (Site, bool) {
    let (x, y, mirrored) = if p.y > p.x { (p.y, p.x, true) } else { (p.x, p.y, false) };
    let site = match (x, y) {
        (0, 0) => Site::Q0,
        (4, 0) => Site::Q1,
        (1, 0) => Site::Scaled,
        other => Site::Aux(AUX_POINTS.iter().position(|&q| q == other).expect("V1 point")),
    };
    (site, mirrored)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonomialRow<S> {
    pub j: usize,
    pub k: usize,
    /// α_j, β_j or γ_j: the value at q1.
    pub value: S,
    /// a..f
    pub aux: [S; 6],
}

#[derive(Clone, Debug)]
pub struct MonomialTable<S> {
    pub params: LaplacianParams<S>,
    rows: [Vec<MonomialRow<S>>; 3],
    normal: [Vec<S>; 3],
    tangential: [Vec<S>; 3],
}

impl<S: Scalar> MonomialTable<S> {
    /// Table holding only the degree-0 data.
    pub fn new(params: LaplacianParams<S>) -> Self {
        let rows = [0, 1, 2].map(|k| vec![initial_row(&params, k + 1)]);
        let mut t =
            MonomialTable { params, rows, normal: Default::default(), tangential: Default::default() };
        t.push_derivatives(0);
        t
    }

    pub fn build(params: LaplacianParams<S>, jmax: usize) -> Result<Self> {
        let mut t = Self::new(params);
        t.extend(jmax)?;
        Ok(t)
    }

    /// Highest degree with complete rows and derivatives.
    pub fn jmax(&self) -> usize {
        self.normal[0].len() - 1
    }

    pub fn extend(&mut self, jmax: usize) -> Result<()> {
        for j in self.jmax() + 1..=jmax {
            for k in 1..=3 {
                if self.rows[k - 1].len() == j {
                    let row = self.compute_row(k, j)?;
                    self.rows[k - 1].push(row);
                }
            }
            self.push_derivatives(j);
        }
        Ok(())
    }

    /// Extends only the α rows (all that sweeps over r need).
    pub fn extend_alpha(&mut self, jmax: usize) -> Result<()> {
        for j in self.rows[0].len()..=jmax {
            let row = self.compute_row(1, j)?;
            self.rows[0].push(row);
        }
        Ok(())
    }

    pub fn compute_alpha_row(&self, j: usize) -> Result<MonomialRow<S>> {
        self.compute_row(1, j)
    }

    pub fn compute_beta_row(&self, j: usize) -> Result<MonomialRow<S>> {
        self.compute_row(2, j)
    }

    pub fn compute_gamma_row(&self, j: usize) -> Result<MonomialRow<S>> {
        self.compute_row(3, j)
    }

    pub fn row(&self, k: usize, j: usize) -> &MonomialRow<S> {
        &self.rows[k - 1][j]
    }

    pub fn rows(&self, k: usize) -> &[MonomialRow<S>] {
        &self.rows[k - 1]
    }

    pub fn value(&self, k: usize, j: usize) -> &S {
        &self.rows[k - 1][j].value
    }

    pub fn alpha(&self, j: usize) -> &S {
        self.value(1, j)
    }

    pub fn beta(&self, j: usize) -> &S {
        self.value(2, j)
    }

    pub fn gamma(&self, j: usize) -> &S {
        self.value(3, j)
    }

    pub fn values(&self, k: usize) -> Vec<S> {
        self.rows[k - 1].iter().map(|r| r.value.clone()).collect()
    }

    /// ∂_n P_{j,k}(q1)
    pub fn normal(&self, k: usize, j: usize) -> &S {
        &self.normal[k - 1][j]
    }

    /// ∂_T P_{j,k}(q1)
    pub fn tangential(&self, k: usize, j: usize) -> &S {
        &self.tangential[k - 1][j]
    }

    fn lp(&self, j: usize) -> S {
        self.params.l.powi(j as u32)
    }

    /// Harmonic scaling of the k-th family under composition with F_00.
    pub fn family_scale(&self, k: usize) -> S {
        match k {
            1 => self.params.r.one_like(),
            2 => self.params.lam_sym.clone(),
            _ => self.params.lam_skew.clone(),
        }
    }

    fn sigma(k: usize) -> i64 {
        if k == 3 { -1 } else { 1 }
    }

    fn site_value(&self, k: usize, j: usize, site: Site, mirrored: bool) -> S {
        let row = &self.rows[k - 1][j];
        let zero = self.params.r.zero_like();
        let v = match site {
            Site::Q0 => {
                if j == 0 && k == 1 { zero.one_like() } else { zero }
            }
            Site::Q1 => row.value.clone(),
            Site::Scaled => self.family_scale(k) * self.lp(j) * &row.value,
            Site::Aux(i) => row.aux[i].clone(),
        };
        if mirrored && k == 3 { -v } else { v }
    }

    /// P_{j,k} on all fifteen vertices of V₁.
    pub fn v1_values(&self, j: usize, k: usize) -> V1Values<S> {
        let g = Geometry::level1();
        let values = g
            .vertices
            .iter()
            .map(|v| {
                let (site, mirrored) = site_of(v.point);
                self.site_value(k, j, site, mirrored)
            })
            .collect();
        V1Values { values }
    }

    /// Solves the degree-j system of family k (rows below j must exist).
    fn compute_row(&self, k: usize, j: usize) -> Result<MonomialRow<S>> {
        if j == 0 {
            return Ok(initial_row(&self.params, k));
        }
        if self.rows[k - 1].len() < j || self.rows[0].len() < j + usize::from(k != 1) {
            return Err(Error::Depth { have: self.rows[k - 1].len().saturating_sub(1), need: j });
        }
        let g = Geometry::level1();
        let p = &self.params;
        let zero = p.r.zero_like();
        let lj = self.lp(j);
        let scale_k = self.family_scale(k);
        let sigma = zero.int(Self::sigma(k));
        // unknowns: [value, a, b, c, d, e, f]
        let form = |site: Site, mirrored: bool| -> Vec<S> {
            let mut f = vec![zero.clone(); 7];
            match site {
                Site::Q0 => {}
                Site::Q1 => f[0] = zero.one_like(),
                Site::Scaled => f[0] = scale_k.clone() * &lj,
                Site::Aux(i) => f[i + 1] = zero.one_like(),
            }
            if mirrored {
                for x in f.iter_mut() {
                    *x = x.clone() * &sigma;
                }
            }
            f
        };
        let mut a: Vec<Vec<S>> = Vec::new();
        let mut b: Vec<S> = Vec::new();
        let mut eq_points = vec![(1u64, 0u64)];
        eq_points.extend(AUX_POINTS);
        for (x, y) in eq_points {
            if k == 3 && x == y {
                // b and f lie on the mirror line: both sides of the equation vanish
                continue;
            }
            let v = g.vertex_at(Point { x, y }).unwrap();
            let st = g.junction_stencil(v, &p.r).expect("interior vertex");
            let (site, mirrored) = site_of(g.vertices[v].point);
            let mut row = form(site, mirrored);
            for c in row.iter_mut() {
                *c = -(c.clone() * &st.diag);
            }
            for (n, w) in &st.neighbours {
                let (ns, nm) = site_of(g.vertices[*n].point);
                for (c, f) in row.iter_mut().zip(form(ns, nm)) {
                    *c = c.clone() + w.clone() * f;
                }
            }
            let mut rhs = zero.clone();
            for i in 1..=j {
                if k == 1 && i == j {
                    // α_j is an unknown; P_{0,1} ≡ 1
                    row[0] = row[0].clone() - st.diag.clone() * &lj;
                    continue;
                }
                rhs = rhs
                    + self.lp(i) * self.alpha(i) * self.site_value(k, j - i, site, mirrored);
            }
            a.push(row);
            b.push(st.diag.clone() * rhs);
        }
        let mut cols: Vec<usize> = if k == 3 { vec![0, 1, 3, 4, 5] } else { (0..7).collect() };
        let mut fixed = None;
        if k == 1 && j == 1 {
            // the j = 1 system does not determine α_1; it is 1/6 for every r
            let a1 = zero.ratio(1, 6);
            for (row, rhs) in a.iter().zip(b.iter_mut()) {
                *rhs = rhs.clone() - row[0].clone() * &a1;
            }
            cols.remove(0);
            fixed = Some(a1);
        }
        let reduced: Vec<Vec<S>> = a.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
        let r_str = p.r.render();
        let sol = linalg::solve(&reduced, &b).map_err(|e| match e {
            SolveError::Singular { .. } => Error::Degenerate { j, k, r: r_str.clone() },
            SolveError::TinyPivot { .. } => Error::Precision { j, k, r: r_str.clone() },
        })?;
        let scale = b.iter().fold(zero.one_like() * &lj, |m, x| m.max_of(x.abs()));
        for res in &sol.residuals {
            if !res.negligible(&scale) {
                return Err(Error::Inconsistent { j, k, r: r_str, residual: res.render() });
            }
        }
        let mut full = vec![zero.clone(); 7];
        if let Some(a1) = fixed {
            full[0] = a1;
        }
        for (&c, x) in cols.iter().zip(sol.x) {
            full[c] = x;
        }
        let value = full[0].clone();
        let aux: [S; 6] = std::array::from_fn(|i| full[i + 1].clone());
        Ok(MonomialRow { j, k, value, aux })
    }

    fn push_derivatives(&mut self, j: usize) {
        let zero = self.params.r.zero_like();
        let two = zero.int(2);
        let delta = if j == 0 { zero.one_like() } else { zero.clone() };
        let al = |i: usize| self.rows[0][i].value.clone();
        let be = |i: usize| self.rows[1][i].value.clone();
        let ga = |i: usize| self.rows[2][i].value.clone();
        let conv = |f: &dyn Fn(usize) -> S, h: &dyn Fn(usize) -> S, upto: usize| {
            (0..=upto).fold(zero.clone(), |acc, i| acc + f(i) * h(j - i))
        };
        let hist = |v: &Vec<S>, h: &dyn Fn(usize) -> S| {
            (0..j).fold(zero.clone(), |acc, i| acc + v[i].clone() * h(j - i))
        };
        let n1 = two.clone() * conv(&al, &al, j) + two.clone() * hist(&self.normal[0], &be) - al(j) - &delta;
        let n2 = two.clone() * conv(&al, &be, j) + two.clone() * hist(&self.normal[1], &be) - be(j);
        // the value term pairs α with γ: evaluate the q1 jet, not the q2 one
        let n3 = ga(j) + two.clone() * conv(&ga, &al, j) + two.clone() * hist(&self.normal[2], &be);
        let t1 = al(j) - &delta - two.clone() * hist(&self.tangential[0], &ga);
        let t2 = be(j) - two.clone() * hist(&self.tangential[1], &ga);
        let t3 = -ga(j) - two.clone() * hist(&self.tangential[2], &ga);
        for (k, (n, t)) in [(n1, t1), (n2, t2), (n3, t3)].into_iter().enumerate() {
            self.normal[k].push(n);
            self.tangential[k].push(t);
        }
    }
}

/// Degree-0 data: the harmonic monomials P_{0,1} ≡ 1, P_{0,2}, P_{0,3}.
pub fn initial_row<S: Scalar>(p: &LaplacianParams<S>, k: usize) -> MonomialRow<S> {
    let r = &p.r;
    let d = p.denom();
    let q = |a: i64, b: i64, c: i64, den: i64| {
        (r.int(a) * r * r + r.int(b) * r + r.int(c)) / (d.clone() * r.int(den))
    };
    let (value, aux) = match k {
        1 => (r.one_like(), std::array::from_fn(|_| r.one_like())),
        2 => (
            r.ratio(-1, 2),
            [
                -q(3, 8, 4, 1),
                -q(3, 7, 2, 1),
                -q(6, 19, 15, 2),
                -q(6, 19, 13, 2),
                -q(6, 21, 15, 2),
                -q(3, 10, 7, 1),
            ],
        ),
        _ => (
            r.ratio(1, 2),
            [q(0, 2, 3, 1), r.zero_like(), q(0, 9, 15, 2), q(0, 5, 9, 2), q(0, 7, 15, 2), r.zero_like()],
        ),
    };
    MonomialRow { j: 0, k, value, aux }
}

/// α_0..α_jmax without the β, γ families.
pub fn alpha_sequence<S: Scalar>(params: LaplacianParams<S>, jmax: usize) -> Result<Vec<S>> {
    let mut t = MonomialTable::new(params);
    t.extend_alpha(jmax)?;
    Ok(t.values(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplacian::harmonic_extension;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn table(p: i64, q: i64, j: usize) -> MonomialTable<BigRational> {
        MonomialTable::build(LaplacianParams::derive(rational(p, q)).unwrap(), j).unwrap()
    }

    #[test]
    fn values_at_r_one() {
        let t = table(1, 1, 3);
        let a: Vec<_> = (0..=3).map(|j| t.alpha(j).clone()).collect();
        assert_eq!(a, vec![rational(1, 1), rational(1, 6), rational(1, 180), rational(1, 16200)]);
        assert_eq!(t.beta(1), &rational(-2, 45));
        assert_eq!(t.beta(2), &rational(-49, 48600));
        assert_eq!(t.gamma(1), &rational(1, 60));
        assert_eq!(t.gamma(2), &rational(1, 5400));
    }

    #[test]
    fn row_zero_is_harmonic_extension() {
        for (p, q) in [(1, 1), (2, 1), (1, 10), (7, 3)] {
            let t = table(p, q, 0);
            let r = rational(p, q);
            let z = || rational(0, 1);
            let boundaries = [
                [rational(1, 1), rational(1, 1), rational(1, 1)],
                [z(), rational(-1, 2), rational(-1, 2)],
                [z(), rational(1, 2), rational(-1, 2)],
            ];
            let params = LaplacianParams::derive(r).unwrap();
            for (k, bd) in boundaries.into_iter().enumerate() {
                assert_eq!(t.v1_values(0, k + 1), harmonic_extension(&params, bd), "k={}", k + 1);
            }
        }
    }

    #[test]
    fn base_derivatives() {
        let t = table(3, 2, 0);
        assert_eq!(t.normal(1, 0), &rational(0, 1));
        assert_eq!(t.normal(2, 0), &rational(-1, 2));
        assert_eq!(t.normal(3, 0), &rational(3, 2));
        assert_eq!(t.tangential(1, 0), &rational(0, 1));
        assert_eq!(t.tangential(3, 0), &rational(-1, 2));
    }

    #[test]
    fn t11_at_one() {
        assert_eq!(table(1, 1, 1).tangential(1, 1), &rational(1, 6));
    }
}
