//! Polynomials in the monomial basis: jets, symmetry transfer maps, cell
//! subdivision and evaluation on V_m.
//!
//! A polynomial of degree n is stored as its jet at q0, i.e. the coefficients
//! `c_{i,k}` of `P = Σ c_{i,k} P_{i,k}`, `i = 0..=n`. Restricting to a cell,
//! `P ∘ F_w`, is again a polynomial. Since `Δ(P∘F_ij) = L (ΔP)∘F_ij` and
//! `ΔP_{j,k} = P_{j-1,k}`, block i of the jet of `P_{j,k} ∘ F_ij` is `L^i`
//! times block 0 of the jet of `P_{j-i,k} ∘ F_ij`, so one table of block-0
//! jets per letter determines every restriction.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::laplacian::V1Values;
use crate::mesh::{Geometry, Symmetry, VertexMesh, outer_count, tilde_laplacian};
use crate::monomials::MonomialTable;
use crate::scalar::Scalar;

/// Jet of a polynomial: `blocks[i] = [Δ^i P(q0), ∂_n Δ^i P(q0), ∂_T Δ^i P(q0)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffVector<S> {
    pub blocks: Vec<[S; 3]>,
}

impl<S: Scalar> CoeffVector<S> {
    pub fn zero(degree: usize, like: &S) -> Self {
        CoeffVector { blocks: vec![std::array::from_fn(|_| like.zero_like()); degree + 1] }
    }

    /// P_{j,k}
    pub fn monomial(j: usize, k: usize, like: &S) -> Self {
        let mut c = Self::zero(j, like);
        c.blocks[j][k - 1] = like.one_like();
        c
    }

    pub fn degree(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Jet of `Δ^i P`.
    pub fn laplacian_power(&self, i: usize) -> Self {
        let blocks = if i > self.degree() {
            vec![std::array::from_fn(|_| self.blocks[0][0].zero_like())]
        } else {
            self.blocks[i..].to_vec()
        };
        CoeffVector { blocks }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rotation {
    /// `P ∘ ρ`, ρ taking q0 to q1.
    Rho,
    /// `P ∘ ρ⁻¹`, ρ⁻¹ taking q0 to q2.
    RhoInv,
}

/// The restriction `P ∘ F_w` of a polynomial to a cell, with the local
/// vertex `orientation` playing the role of q0.
#[derive(Clone, Debug)]
pub struct CellPolynomial<S> {
    pub word: Vec<u8>,
    pub orientation: u8,
    pub coeffs: CoeffVector<S>,
}

/// Transfer maps backed by a monomial table.
pub struct JetCalculus<'t, S> {
    pub table: &'t MonomialTable<S>,
    /// `v1[j][k-1]` = P_{j,k} on V₁
    v1: Vec<[V1Values<S>; 3]>,
    /// `lpow[i]` = L^i
    lpow: Vec<S>,
    /// `child_blocks[letter][j][k-1]` = block 0 of the jet of `P_{j,k} ∘ F_letter`
    child_blocks: Vec<Vec<[[S; 3]; 3]>>,
}

/// Jet at q0 of the harmonic function with boundary values `h`.
fn harmonic_jet<S: Scalar>(h: [S; 3]) -> [S; 3] {
    let n = h[0].clone() * h[0].int(2) - &h[1] - &h[2];
    let t = h[1].clone() - &h[2];
    [h[0].clone(), n, t]
}

impl<'t, S: Scalar> JetCalculus<'t, S> {
    pub fn new(table: &'t MonomialTable<S>) -> Self {
        let v1 = (0..=table.jmax()).map(|j| [1, 2, 3].map(|k| table.v1_values(j, k))).collect();
        let l = &table.params.l;
        let mut lpow = vec![l.one_like()];
        for i in 1..=table.jmax() {
            lpow.push(lpow[i - 1].clone() * l);
        }
        let mut calc = JetCalculus { table, v1, lpow, child_blocks: Vec::new() };
        calc.child_blocks = (0..9).map(|letter| calc.child_table(letter)).collect();
        calc
    }

    fn child_table(&self, letter: u8) -> Vec<[[S; 3]; 3]> {
        let corners = Geometry::level1().corners[letter as usize];
        let zero = self.table.params.r.zero_like();
        let mut out: Vec<[[S; 3]; 3]> = Vec::with_capacity(self.lpow.len());
        for j in 0..self.lpow.len() {
            let row = std::array::from_fn(|k| {
                let mut blocks = vec![[zero.clone(), zero.clone(), zero.clone()]];
                blocks.extend((1..=j).map(|i| out[j - i][k].clone().map(|x| x * &self.lpow[i])));
                // what remains after the known higher blocks is harmonic
                let known = CoeffVector { blocks };
                harmonic_jet(std::array::from_fn(|s| {
                    self.v1[j][k].values[corners[s]].clone() - self.boundary_value(&known, s as u8)
                }))
            });
            out.push(row);
        }
        out
    }

    fn check_depth(&self, c: &CoeffVector<S>) -> Result<()> {
        if c.degree() > self.table.jmax() {
            return Err(Error::Depth { have: self.table.jmax(), need: c.degree() });
        }
        Ok(())
    }

    fn sigma(k: usize) -> bool {
        k == 2
    }

    /// Value of P at the boundary point q_s.
    pub fn boundary_value(&self, c: &CoeffVector<S>, s: u8) -> S {
        let zero = c.blocks[0][0].zero_like();
        if s == 0 {
            return c.blocks[0][0].clone();
        }
        let mut acc = zero;
        for (i, b) in c.blocks.iter().enumerate() {
            for (k, coef) in b.iter().enumerate() {
                let v = coef.clone() * self.table.value(k + 1, i);
                acc = if s == 2 && Self::sigma(k) { acc - v } else { acc + v };
            }
        }
        acc
    }

    fn v1_value(&self, c: &CoeffVector<S>, v: usize) -> S {
        let mut acc = c.blocks[0][0].zero_like();
        for (i, b) in c.blocks.iter().enumerate() {
            for k in 0..3 {
                if !b[k].is_zero() {
                    acc = acc + b[k].clone() * &self.v1[i][k].values[v];
                }
            }
        }
        acc
    }

    pub fn values_on_v1(&self, c: &CoeffVector<S>) -> Result<V1Values<S>> {
        self.check_depth(c)?;
        let n = Geometry::level1().vertices.len();
        Ok(V1Values { values: (0..n).map(|v| self.v1_value(c, v)).collect() })
    }

    /// Jet of `P ∘ F_00`.
    pub fn scale(&self, c: &CoeffVector<S>) -> CoeffVector<S> {
        let t = self.table;
        let mut lp = t.params.r.one_like();
        let mut out = c.clone();
        for b in out.blocks.iter_mut() {
            for (k, x) in b.iter_mut().enumerate() {
                *x = x.clone() * &lp * t.family_scale(k + 1);
            }
            lp = lp * &t.params.l;
        }
        out
    }

    /// Jet of `P ∘ ρ` (the jet of P at q1) or `P ∘ ρ⁻¹` (the jet at q2).
    pub fn rotate(&self, c: &CoeffVector<S>, rot: Rotation) -> Result<CoeffVector<S>> {
        self.check_depth(c)?;
        let t = self.table;
        let n = c.blocks.len();
        let zero = c.blocks[0][0].zero_like();
        let blocks = (0..n)
            .map(|i| {
                let mut blk = [zero.clone(), zero.clone(), zero.clone()];
                for l in i..n {
                    for k in 1..=3 {
                        let cc = &c.blocks[l][k - 1];
                        if cc.is_zero() {
                            continue;
                        }
                        let d = l - i;
                        let terms = [t.value(k, d), t.normal(k, d), t.tangential(k, d)];
                        for (comp, (b, x)) in blk.iter_mut().zip(terms).enumerate() {
                            // reflection across the axis through q0 exchanges q1 and q2
                            let flip = rot == Rotation::RhoInv && ((k == 3) != (comp == 2));
                            let p = cc.clone() * x;
                            *b = if flip { b.clone() - p } else { b.clone() + p };
                        }
                    }
                }
                blk
            })
            .collect();
        Ok(CoeffVector { blocks })
    }

    /// Jet of P at its local vertex `s`, i.e. of `P ∘ ρ^s`.
    pub fn jet_at(&self, c: &CoeffVector<S>, s: u8) -> Result<CoeffVector<S>> {
        match s {
            0 => Ok(c.clone()),
            1 => self.rotate(c, Rotation::Rho),
            _ => self.rotate(c, Rotation::RhoInv),
        }
    }

    /// Jet of `P ∘ F_ij` for the letter `3i + j`.
    pub fn child(&self, c: &CoeffVector<S>, letter: u8) -> Result<CoeffVector<S>> {
        self.check_depth(c)?;
        let tab = &self.child_blocks[letter as usize];
        let n = c.blocks.len();
        let zero = c.blocks[0][0].zero_like();
        let blocks = (0..n)
            .map(|i| {
                let mut blk = [zero.clone(), zero.clone(), zero.clone()];
                for d in i..n {
                    for (k, cc) in c.blocks[d].iter().enumerate() {
                        if cc.is_zero() {
                            continue;
                        }
                        for (b, t) in blk.iter_mut().zip(&tab[d - i][k]) {
                            *b = b.clone() + cc.clone() * t;
                        }
                    }
                }
                if i > 0 {
                    blk = blk.map(|x| x * &self.lpow[i]);
                }
                blk
            })
            .collect();
        Ok(CoeffVector { blocks })
    }

    /// Jet of `P ∘ F_w`.
    pub fn compose_word(&self, c: &CoeffVector<S>, word: &[u8]) -> Result<CoeffVector<S>> {
        word.iter().try_fold(c.clone(), |acc, &l| self.child(&acc, l))
    }

    /// Values of P on V_m together with the jet on every level-m cell.
    pub fn refine(&self, c: &CoeffVector<S>, m: usize) -> Result<Refinement<S>> {
        self.check_depth(c)?;
        let mut cells = vec![(Vec::new(), c.clone())];
        for _ in 0..m {
            let mut next = Vec::with_capacity(cells.len() * 9);
            for (w, cc) in &cells {
                for letter in 0..9u8 {
                    let mut w2 = w.clone();
                    w2.push(letter);
                    next.push((w2, self.child(cc, letter)?));
                }
            }
            cells = next;
        }
        let geometry = Arc::new(Geometry::new(m));
        let mut mesh = VertexMesh::empty(geometry.clone(), self.table.params.clone());
        for (ci, (_, cc)) in cells.iter().enumerate() {
            for s in 0..3u8 {
                mesh.set_checked(geometry.corners[ci][s as usize], self.boundary_value(cc, s))?;
            }
        }
        let cells = cells
            .into_iter()
            .map(|(word, coeffs)| CellPolynomial { word, orientation: 0, coeffs })
            .collect();
        Ok(Refinement { mesh, cells, corner_jets: OnceLock::new() })
    }

    /// The same cell polynomial with local vertex `orientation` as base point.
    pub fn reorient(&self, cell: &CellPolynomial<S>, orientation: u8) -> Result<CellPolynomial<S>> {
        let steps = (3 + orientation - cell.orientation) % 3;
        Ok(CellPolynomial { word: cell.word.clone(), orientation, coeffs: self.jet_at(&cell.coeffs, steps)? })
    }
}

/// A polynomial evaluated on V_m with its cell jets.
#[derive(Clone, Debug)]
pub struct Refinement<S> {
    pub mesh: VertexMesh<S>,
    pub cells: Vec<CellPolynomial<S>>,
    corner_jets: OnceLock<Vec<[CoeffVector<S>; 3]>>,
}

impl<S: Scalar> Refinement<S> {
    fn value(&self, v: usize) -> S {
        self.mesh.values[v].clone().expect("complete mesh")
    }

    fn geometry(&self) -> &Geometry {
        &self.mesh.geometry
    }

    /// Jets of every cell polynomial at its three local vertices, computed once.
    fn corner_jets(&self, calc: &JetCalculus<S>) -> Result<&[[CoeffVector<S>; 3]]> {
        if let Some(j) = self.corner_jets.get() {
            return Ok(j);
        }
        let jets = self
            .cells
            .iter()
            .map(|cell| {
                let c = &cell.coeffs;
                Ok([c.clone(), calc.rotate(c, Rotation::Rho)?, calc.rotate(c, Rotation::RhoInv)?])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.corner_jets.get_or_init(|| jets))
    }

    /// Largest |Δ̃^(m) P(x) - w(x) Σ_{i≥1} α_i L^{mi} Δ^i P(x)| over interior x.
    pub fn laplacian_identity_defect(&self, calc: &JetCalculus<S>) -> Result<S> {
        let g = self.geometry();
        let p = &self.mesh.params;
        let jets = self.corner_jets(calc)?;
        let mut worst = p.r.zero_like();
        for (v, vert) in g.vertices.iter().enumerate() {
            let Some(st) = g.junction_stencil(v, &p.r) else { continue };
            let (c, s) = vert.incident[0];
            let jet = &jets[c][s as usize];
            let mut rhs = p.r.zero_like();
            for i in 1..=jet.degree() {
                // Δ^i (P∘F_w) = L^{mi} (Δ^i P)∘F_w
                rhs = rhs + calc.table.alpha(i).clone() * &jet.blocks[i][0];
            }
            let defect = (tilde_laplacian(&self.mesh, v)? - st.diag * rhs).abs();
            worst = worst.max_of(defect);
        }
        Ok(worst)
    }

    /// Largest |w ∂_n^{w} Δ^i P + ∂_n^{w'} Δ^i P| over junctions and degrees,
    /// from the unnormalised cell jets; w = r on the cell with fewer outer
    /// letters when the two cells differ, 1 otherwise.
    pub fn matching_defect(&self, calc: &JetCalculus<S>) -> Result<S> {
        let g = self.geometry();
        let r = &self.mesh.params.r;
        let jets = self.corner_jets(calc)?;
        let mut worst = r.zero_like();
        for vert in &g.vertices {
            if vert.incident.len() != 2 {
                continue;
            }
            let (c1, s1) = vert.incident[0];
            let (c2, s2) = vert.incident[1];
            let (o1, o2) = (outer_count(&self.cells[c1].word), outer_count(&self.cells[c2].word));
            let j1 = &jets[c1][s1 as usize];
            let j2 = &jets[c2][s2 as usize];
            let (w1, w2) = match o1.cmp(&o2) {
                std::cmp::Ordering::Equal => (r.one_like(), r.one_like()),
                std::cmp::Ordering::Less => (r.clone(), r.one_like()),
                std::cmp::Ordering::Greater => (r.one_like(), r.clone()),
            };
            for (b1, b2) in j1.blocks.iter().zip(&j2.blocks) {
                let d = (w1.clone() * &b1[1] + w2.clone() * &b2[1]).abs();
                worst = worst.max_of(d);
            }
        }
        Ok(worst)
    }

    /// Largest |Σ_s ∂_T Δ^i P at the three corners| over cells and degrees.
    pub fn tangential_sum_defect(&self, calc: &JetCalculus<S>) -> Result<S> {
        let mut worst = self.mesh.params.r.zero_like();
        for jets in self.corner_jets(calc)? {
            for i in 0..jets[0].blocks.len() {
                let s = jets[0].blocks[i][2].clone() + &jets[1].blocks[i][2] + &jets[2].blocks[i][2];
                worst = worst.max_of(s.abs());
            }
        }
        Ok(worst)
    }

    /// Largest |P(x) + P(ρx) + P(ρ⁻¹x) - P(R0 x) - P(R1 x) - P(R2 x)| over V_m.
    pub fn three_point_defect(&self) -> S {
        let g = self.geometry();
        let mut worst = self.mesh.params.r.zero_like();
        for v in 0..g.vertices.len() {
            let f = |s: Symmetry| self.value(g.apply(s, v));
            let lhs = f(Symmetry::Identity) + f(Symmetry::Rho) + f(Symmetry::RhoInv);
            let rhs = f(Symmetry::R0) + f(Symmetry::R1) + f(Symmetry::R2);
            worst = worst.max_of((lhs - rhs).abs());
        }
        worst
    }

    /// Largest |P(x) + P(ρx) + P(ρ⁻¹x)|; zero for the skew monomials.
    pub fn rotation_sum_defect(&self) -> S {
        let g = self.geometry();
        let mut worst = self.mesh.params.r.zero_like();
        for v in 0..g.vertices.len() {
            let s = self.value(v) + self.value(g.apply(Symmetry::Rho, v)) + self.value(g.apply(Symmetry::RhoInv, v));
            worst = worst.max_of(s.abs());
        }
        worst
    }

    /// Largest |P(R0 x) - sign·P(x)|.
    pub fn reflection_defect(&self, sign: i64) -> S {
        let g = self.geometry();
        let mut worst = self.mesh.params.r.zero_like();
        for v in 0..g.vertices.len() {
            let d = self.value(g.apply(Symmetry::R0, v)) - self.value(v) * self.mesh.params.r.int(sign);
            worst = worst.max_of(d.abs());
        }
        worst
    }
}
