//! Constants of the Laplacian Δ_r and harmonic extension to V₁.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Geometry, Point, Symmetry, VertexMesh};
use crate::scalar::Scalar;

/// Every constant of Δ_r derived from the single free parameter r.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianParams<S> {
    pub r: S,
    /// Resistance factor of the outer cells `F_ii`.
    pub r0: S,
    /// Resistance factor of the inner cells `F_ij`, `i != j`.
    pub r1: S,
    pub mu0: S,
    pub mu1: S,
    /// Laplacian renormalisation factor, the same for all nine cells.
    pub l: S,
    pub lam_sym: S,
    pub lam_skew: S,
}

impl<S: Scalar> LaplacianParams<S> {
    pub fn derive(r: S) -> Result<Self> {
        if r <= r.zero_like() {
            return Err(Error::Domain(format!("r must be positive, got {}", r.render())));
        }
        let d = denominator(&r);
        let two_r_plus_one = r.int(2) * &r + r.int(1);
        let r0 = r.int(6) * &r * (r.clone() + r.int(2)) / d.clone();
        let r1 = r.int(6) * (r.clone() + r.int(2)) / d.clone();
        let mu0 = r.one_like() / (r.int(3) * two_r_plus_one.clone());
        let mu1 = r.clone() / (r.int(3) * two_r_plus_one);
        let l = r0.clone() * &mu0;
        let lam_skew = r.int(2) * &r / d;
        Ok(LaplacianParams { lam_sym: r0.clone(), r, r0, r1, mu0, mu1, l, lam_skew })
    }

    /// `9r² + 26r + 15`, the common denominator of most constants.
    pub fn denom(&self) -> S {
        denominator(&self.r)
    }

    /// Diagonal weight `2 + 2r` of the mixed-resistance stencil.
    pub fn mixed_weight(&self) -> S {
        self.r.int(2) + self.r.int(2) * &self.r
    }

    pub fn l_powers(&self, n: usize) -> Vec<S> {
        let mut out = vec![self.r.one_like()];
        for i in 1..=n {
            let next = out[i - 1].clone() * &self.l;
            out.push(next);
        }
        out
    }
}

fn denominator<S: Scalar>(r: &S) -> S {
    r.int(9) * r * r + r.int(26) * r + r.int(15)
}

/// Values of a function on the fifteen vertices of V₁, indexed in
/// [`Geometry::level1`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct V1Values<S> {
    pub values: Vec<S>,
}

impl<S: Scalar> V1Values<S> {
    /// Value at the point `(x, y)/4` of the reference triangle.
    pub fn at(&self, x: u64, y: u64) -> &S {
        let g = Geometry::level1();
        &self.values[g.vertex_at(Point { x, y }).expect("point of V1")]
    }

    pub fn into_mesh(self, params: LaplacianParams<S>) -> VertexMesh<S> {
        VertexMesh {
            geometry: Arc::new(Geometry::new(1)),
            values: self.values.into_iter().map(Some).collect(),
            params,
        }
    }

    /// `v ↦ u(σ v)`, i.e. the composition `u ∘ σ`.
    pub fn compose(&self, sym: Symmetry) -> Self {
        let g = Geometry::level1();
        V1Values { values: (0..self.values.len()).map(|v| self.values[g.apply(sym, v)].clone()).collect() }
    }
}

/// The seven interior values `u1..u7` of the harmonic function with boundary
/// data (1, 0, 0), each placed at its representative with `y <= x` (in
/// quarter units); mirrored points carry the same value.
fn basic_extension<S: Scalar>(p: &LaplacianParams<S>) -> Vec<((u64, u64), S)> {
    let r = &p.r;
    let d = p.denom();
    let q = |a: i64, b: i64, c: i64| (r.int(a) * r * r + r.int(b) * r + r.int(c)) / d.clone();
    vec![
        ((1, 0), q(3, 14, 15)),
        ((2, 0), q(3, 10, 7)),
        ((1, 1), q(3, 12, 11)),
        ((3, 0), q(3, 7, 0)),
        ((2, 1), q(3, 7, 2)),
        ((3, 1), q(3, 5, 0)),
        ((2, 2), q(3, 6, 1)),
    ]
}

/// Harmonic extension of boundary data `(h0, h1, h2)` at `(q0, q1, q2)` to V₁.
pub fn harmonic_extension<S: Scalar>(p: &LaplacianParams<S>, boundary: [S; 3]) -> V1Values<S> {
    let g = Geometry::level1();
    let zero = p.r.zero_like();
    let mut u0 = vec![zero.clone(); g.vertices.len()];
    u0[g.boundary_vertex(0)] = p.r.one_like();
    for ((x, y), val) in basic_extension(p) {
        u0[g.vertex_at(Point { x, y }).unwrap()] = val.clone();
        u0[g.vertex_at(Point { x: y, y: x }).unwrap()] = val;
    }
    let u0 = V1Values { values: u0 };
    // the function equal to 1 at q_s is u0 ∘ ρ^{-s}
    let u1 = u0.compose(Symmetry::RhoInv);
    let u2 = u0.compose(Symmetry::Rho);
    let [h0, h1, h2] = boundary;
    let values = (0..g.vertices.len())
        .map(|v| {
            h0.clone() * &u0.values[v] + h1.clone() * &u1.values[v] + h2.clone() * &u2.values[v]
        })
        .collect();
    V1Values { values }
}

/// Level-1 graph energy with conductances `1/r0` on outer cells, `1/r1` on inner ones.
pub fn energy_level1<S: Scalar>(p: &LaplacianParams<S>, u: &V1Values<S>) -> S {
    let g = Geometry::level1();
    let mut e = p.r.zero_like();
    for (c, w) in g.cells.iter().enumerate() {
        let res = if crate::mesh::is_outer(w[0]) { &p.r0 } else { &p.r1 };
        let k = g.corners[c];
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            let diff = u.values[k[a]].clone() - &u.values[k[b]];
            e = e + diff.clone() * diff / res.clone();
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> BigRational {
        rational(p, d)
    }

    #[test]
    fn params_at_one_and_two() {
        let p = LaplacianParams::derive(q(1, 1)).unwrap();
        assert_eq!(p.r0, q(9, 25));
        assert_eq!(p.r1, q(9, 25));
        assert_eq!(p.mu0, q(1, 9));
        assert_eq!(p.l, q(1, 25));
        assert_eq!(p.lam_skew, q(1, 25));
        let p2 = LaplacianParams::derive(q(2, 1)).unwrap();
        assert_eq!(p2.r0, q(48, 103));
        assert_eq!(p2.r1, q(24, 103));
        assert_eq!(p2.mu0, q(1, 15));
        assert_eq!(p2.mu1, q(2, 15));
    }

    #[test]
    fn nonpositive_r_rejected() {
        assert!(LaplacianParams::derive(q(0, 1)).is_err());
        assert!(LaplacianParams::derive(q(-1, 3)).is_err());
    }

    #[test]
    fn extension_at_one() {
        let p = LaplacianParams::derive(q(1, 1)).unwrap();
        let one = q(1, 1);
        let zero = q(0, 1);
        let h = harmonic_extension(&p, [one, zero.clone(), zero]);
        assert_eq!(h.at(2, 2), &q(1, 5)); // u7
        assert_eq!(h.at(3, 0), &q(1, 5)); // u4
        assert_eq!(h.at(3, 1), &q(4, 25)); // u6
        assert_eq!(h.at(0, 4), &q(0, 1));
    }
}
