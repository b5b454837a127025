//! Cell words, vertex addressing and value meshes on V_m.
//!
//! A cell of level m is a word of m letters over the nine composed maps
//! `F_ij = F_i ∘ F_j`; a letter is stored as `3*i + j`. Points are kept in
//! exact integer coordinates on the reference triangle q0=(0,0), q1=(1,0),
//! q2=(0,1) scaled by 4^m. A vertex shared by two cells is addressed by the
//! lexicographically smallest `(word, corner)` pair.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::laplacian::LaplacianParams;
use crate::scalar::Scalar;

pub const LETTERS: [u8; 9] = [0, 1, 2, 3, 4, 5, 6, 7, 8];

/// `(i, j)` digits of a letter.
pub fn digits(letter: u8) -> (u8, u8) {
    (letter / 3, letter % 3)
}

/// Outer cells `F_ii` are the ones touching V₀.
pub fn is_outer(letter: u8) -> bool {
    let (i, j) = digits(letter);
    i == j
}

pub fn outer_count(word: &[u8]) -> usize {
    word.iter().filter(|&&l| is_outer(l)).count()
}

pub fn word_string(word: &[u8]) -> String {
    word.iter()
        .map(|&l| {
            let (i, j) = digits(l);
            format!("{i}{j}")
        })
        .collect()
}

/// Point of the reference triangle at denominator `4^level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: u64,
    pub y: u64,
}

/// Image of corner `q_s` under `F_w`, at denominator `4^|w|`.
pub fn corner_point(word: &[u8], s: u8) -> Point {
    // F_d x = (x + q_d)/2: with x = N/2^k the numerator becomes N + q_d 2^k
    let (mut x, mut y) = match s {
        0 => (0u64, 0u64),
        1 => (1, 0),
        _ => (0, 1),
    };
    let mut scale = 1u64;
    // F_w = F_{w1} ∘ ... ∘ F_{wm}: apply the innermost map first
    for &l in word.iter().rev() {
        let (i, j) = digits(l);
        for d in [j, i] {
            match d {
                1 => x += scale,
                2 => y += scale,
                _ => {}
            }
            scale *= 2;
        }
    }
    Point { x, y }
}

/// Planar embedding used for plots: q0 on top, q1 bottom-left, q2 bottom-right.
pub fn planar(p: Point, level: usize) -> (f64, f64) {
    let d = (1u64 << (2 * level)) as f64;
    let (u, v) = (p.x as f64 / d, p.y as f64 / d);
    let h = 3f64.sqrt() / 2.0;
    // q0 + u (q1 - q0) + v (q2 - q0)
    (0.5 - 0.5 * u + 0.5 * v, h - h * (u + v))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexAddr {
    pub word: Vec<u8>,
    pub corner: u8,
}

impl fmt::Display for VertexAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", word_string(&self.word), self.corner)
    }
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub addr: VertexAddr,
    pub point: Point,
    /// `(cell index, corner)` for every cell containing the vertex (1 or 2).
    pub incident: Vec<(usize, u8)>,
}

impl Vertex {
    pub fn is_boundary(&self) -> bool {
        self.incident.len() == 1
    }
}

/// Combinatorics of the level-m cell decomposition.
#[derive(Debug)]
pub struct Geometry {
    pub level: usize,
    /// All words of length `level`, lexicographic.
    pub cells: Vec<Vec<u8>>,
    /// Vertices sorted by canonical address.
    pub vertices: Vec<Vertex>,
    /// Vertex index of each corner of each cell.
    pub corners: Vec<[usize; 3]>,
    by_point: HashMap<Point, usize>,
}

impl Geometry {
    pub fn new(level: usize) -> Self {
        let mut cells: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..level {
            cells = cells
                .into_iter()
                .flat_map(|w| {
                    LETTERS.iter().map(move |&l| {
                        let mut w2 = w.clone();
                        w2.push(l);
                        w2
                    })
                })
                .collect();
        }
        let mut incidence: HashMap<Point, Vec<(usize, u8)>> = HashMap::new();
        for (c, w) in cells.iter().enumerate() {
            for s in 0..3u8 {
                incidence.entry(corner_point(w, s)).or_default().push((c, s));
            }
        }
        let mut vertices: Vec<Vertex> = incidence
            .into_iter()
            .map(|(point, mut incident)| {
                incident.sort();
                let (c, s) = incident[0];
                Vertex { addr: VertexAddr { word: cells[c].clone(), corner: s }, point, incident }
            })
            .collect();
        vertices.sort_by(|a, b| a.addr.cmp(&b.addr));
        let by_point: HashMap<Point, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.point, i)).collect();
        let corners = cells
            .iter()
            .map(|w| [0u8, 1, 2].map(|s| by_point[&corner_point(w, s)]))
            .collect();
        Geometry { level, cells, vertices, corners, by_point }
    }

    /// Shared level-1 geometry.
    pub fn level1() -> &'static Geometry {
        static G: OnceLock<Geometry> = OnceLock::new();
        G.get_or_init(|| Geometry::new(1))
    }

    pub fn denominator(&self) -> u64 {
        1 << (2 * self.level)
    }

    pub fn vertex_at(&self, p: Point) -> Option<usize> {
        self.by_point.get(&p).copied()
    }

    pub fn index_of(&self, addr: &VertexAddr) -> Option<usize> {
        self.vertex_at(corner_point(&addr.word, addr.corner))
    }

    /// Index of V₀ corner `q_s`.
    pub fn boundary_vertex(&self, s: u8) -> usize {
        let d = self.denominator();
        let p = match s {
            0 => Point { x: 0, y: 0 },
            1 => Point { x: d, y: 0 },
            _ => Point { x: 0, y: d },
        };
        self.by_point[&p]
    }

    /// Image of a vertex under one of the six symmetries of the triangle.
    pub fn apply(&self, sym: Symmetry, v: usize) -> usize {
        let d = self.denominator();
        let Point { x, y } = self.vertices[v].point;
        let z = d - x - y;
        let p = match sym {
            Symmetry::Identity => Point { x, y },
            Symmetry::Rho => Point { x: z, y: x },
            Symmetry::RhoInv => Point { x: y, y: z },
            Symmetry::R0 => Point { x: y, y: x },
            Symmetry::R1 => Point { x, y: z },
            Symmetry::R2 => Point { x: z, y },
        };
        self.by_point[&p]
    }

    /// Neighbours of a non-boundary vertex with the conductance-case weights
    /// of the renormalised graph Laplacian, and the diagonal weight.
    ///
    /// When the two incident cells have the same number of outer letters every
    /// edge has weight 1; otherwise the edges inside the cell with fewer outer
    /// letters (the lower-resistance one) carry weight r.
    pub fn junction_stencil<S: Scalar>(&self, v: usize, r: &S) -> Option<JunctionStencil<S>> {
        let vert = &self.vertices[v];
        if vert.incident.len() != 2 {
            return None;
        }
        let (c1, s1) = vert.incident[0];
        let (c2, s2) = vert.incident[1];
        let o1 = outer_count(&self.cells[c1]);
        let o2 = outer_count(&self.cells[c2]);
        let one = r.one_like();
        let (w1, w2, equal) = if o1 == o2 {
            (one.clone(), one.clone(), true)
        } else if o1 < o2 {
            (r.clone(), one.clone(), false)
        } else {
            (one.clone(), r.clone(), false)
        };
        let mut neighbours = Vec::with_capacity(4);
        for (c, s, w) in [(c1, s1, w1), (c2, s2, w2)] {
            for t in 0..3u8 {
                if t != s {
                    neighbours.push((self.corners[c][t as usize], w.clone()));
                }
            }
        }
        let diag = if equal { one.int(4) } else { one.int(2) + r.int(2) * r };
        Some(JunctionStencil { neighbours, diag, equal })
    }
}

#[derive(Clone, Debug)]
pub struct JunctionStencil<S> {
    pub neighbours: Vec<(usize, S)>,
    pub diag: S,
    pub equal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Identity,
    /// Rotation taking q0 → q1 → q2 → q0.
    Rho,
    RhoInv,
    /// Reflection fixing q0.
    R0,
    /// Reflection fixing q1.
    R1,
    /// Reflection fixing q2.
    R2,
}

/// Values of a function on every vertex of V_m.
#[derive(Clone, Debug)]
pub struct VertexMesh<S> {
    pub geometry: Arc<Geometry>,
    pub values: Vec<Option<S>>,
    pub params: LaplacianParams<S>,
}

impl<S: Scalar> VertexMesh<S> {
    pub fn empty(geometry: Arc<Geometry>, params: LaplacianParams<S>) -> Self {
        let n = geometry.vertices.len();
        VertexMesh { geometry, values: vec![None; n], params }
    }

    pub fn level(&self) -> usize {
        self.geometry.level
    }

    pub fn value(&self, v: usize) -> Result<&S> {
        self.values[v]
            .as_ref()
            .ok_or_else(|| Error::MissingValue(self.geometry.vertices[v].addr.to_string()))
    }

    pub fn value_at(&self, addr: &VertexAddr) -> Result<&S> {
        let v = self
            .geometry
            .index_of(addr)
            .ok_or_else(|| Error::Domain(format!("{addr} is not a vertex of V_{}", self.level())))?;
        self.value(v)
    }

    /// Stores `value` at `v`, or checks it against an existing entry.
    pub fn set_checked(&mut self, v: usize, value: S) -> Result<()> {
        match &self.values[v] {
            Some(old) if !agree(old, &value) => {
                Err(Error::Junction(self.geometry.vertices[v].addr.to_string()))
            }
            Some(_) => Ok(()),
            None => {
                self.values[v] = Some(value);
                Ok(())
            }
        }
    }
}

/// Equality for exact values, relative agreement to `2^-(p-10)` for floats.
pub fn agree<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        return a == b;
    }
    let diff = (a.clone() - b).abs();
    let scale = a.abs().max_of(b.abs());
    diff <= scale * a.rel_eps(10)
}

/// Δ̃ at a non-boundary vertex: weighted neighbour sum minus diag·u(x).
pub fn tilde_laplacian<S: Scalar>(mesh: &VertexMesh<S>, v: usize) -> Result<S> {
    let g = &mesh.geometry;
    let st = g.junction_stencil(v, &mesh.params.r).ok_or_else(|| {
        Error::Domain(format!("{} is a boundary vertex", g.vertices[v].addr))
    })?;
    let mut acc = -(st.diag.clone() * mesh.value(v)?);
    for (n, w) in &st.neighbours {
        acc = acc + w.clone() * mesh.value(*n)?;
    }
    Ok(acc)
}

/// Renormalisation turning Δ̃^(m) into the graph Laplacian Δ^(m) at `v`.
pub fn laplacian_factor<S: Scalar>(mesh: &VertexMesh<S>, v: usize) -> Result<S> {
    let g = &mesh.geometry;
    let p = &mesh.params;
    let st = g.junction_stencil(v, &p.r).ok_or_else(|| {
        Error::Domain(format!("{} is a boundary vertex", g.vertices[v].addr))
    })?;
    let base = if st.equal { p.r.ratio(3, 2) } else { p.r.int(3) / (p.r.clone() + p.r.int(1)) };
    let lm = p.l.powi(g.level as u32);
    Ok(base / lm)
}

pub fn graph_laplacian<S: Scalar>(mesh: &VertexMesh<S>, v: usize) -> Result<S> {
    Ok(laplacian_factor(mesh, v)? * tilde_laplacian(mesh, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_counts() {
        assert_eq!(Geometry::new(0).vertices.len(), 3);
        assert_eq!(Geometry::new(1).vertices.len(), 15);
        assert_eq!(Geometry::new(2).vertices.len(), 123);
    }

    #[test]
    fn corner_points_match_maps() {
        // F_00 q1 = (1/4, 0), F_10 q1 = (3/4, 0), F_12 q2 = (1/2, 1/2)
        assert_eq!(corner_point(&[0], 1), Point { x: 1, y: 0 });
        assert_eq!(corner_point(&[3], 1), Point { x: 3, y: 0 });
        assert_eq!(corner_point(&[5], 2), Point { x: 2, y: 2 });
        assert_eq!(corner_point(&[5, 0], 0), Point { x: 8, y: 4 });
    }

    #[test]
    fn canonical_address_is_smallest() {
        let g = Geometry::level1();
        // F_10 q1 = F_11 q0
        let v = g.vertex_at(Point { x: 3, y: 0 }).unwrap();
        assert_eq!(g.vertices[v].addr, VertexAddr { word: vec![3], corner: 1 });
        assert_eq!(g.index_of(&VertexAddr { word: vec![4], corner: 0 }), Some(v));
    }

    #[test]
    fn symmetries_permute() {
        let g = Geometry::new(2);
        for v in 0..g.vertices.len() {
            let w = g.apply(Symmetry::Rho, v);
            assert_eq!(g.apply(Symmetry::RhoInv, w), v);
            assert_eq!(g.apply(Symmetry::R0, g.apply(Symmetry::R0, v)), v);
        }
        assert_eq!(g.apply(Symmetry::Rho, g.boundary_vertex(0)), g.boundary_vertex(1));
    }
}
