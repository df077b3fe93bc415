//! Triangulation data model: vertices, simplices, edge adjacency and the
//! topological midpoint table.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::bisection::{decompose_generation, BisectionRule};
use crate::linalg::{self, Matrix};
use crate::Scalar;

/// Inline storage for the vertex list of a simplex (n + 1 ids).
pub type VertexList = SmallVec<[VertexId; 8]>;

/// Dense vertex index. Identity is topological: a bisection vertex is keyed by
/// the edge it splits, never by its coordinates.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Append-only simplex index. Bisected simplices are tombstoned, not reused.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexId(pub u32);

impl SimplexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SimplexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

/// Unordered vertex pair, stored with the smaller id first.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeKey(VertexId, VertexId);

impl EdgeKey {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            EdgeKey(a, b)
        } else {
            EdgeKey(b, a)
        }
    }

    pub fn lo(self) -> VertexId {
        self.0
    }

    pub fn hi(self) -> VertexId {
        self.1
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.0, self.1)
    }
}

/// Per-vertex bookkeeping of the generalized coloring.
///
/// `gen = N * (level - 1) + vtype` holds exactly, with `vtype` in `1..=N`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexAttr {
    pub color: Option<u32>,
    pub gen: i64,
    pub level: i64,
    pub vtype: u32,
}

/// One n-simplex, live or tombstoned.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    pub(crate) verts: VertexList,
    pub(crate) tag: u8,
    pub(crate) parent: Option<SimplexId>,
    pub(crate) children: Option<[SimplexId; 2]>,
    pub(crate) gen_count: u32,
    pub(crate) ancestor: u32,
    pub(crate) live: bool,
}

impl Simplex {
    /// Vertex ids in representation order (Maubach order for tagged meshes,
    /// decreasing generation for the generation rule).
    pub fn vertices(&self) -> &[VertexId] {
        &self.verts
    }

    /// Maubach tag, or 0 when the mesh is not tagged.
    pub fn tag(&self) -> u8 {
        self.tag
    }

    pub fn parent(&self) -> Option<SimplexId> {
        self.parent
    }

    pub fn children(&self) -> Option<[SimplexId; 2]> {
        self.children
    }

    /// Number of bisections separating this simplex from its initial ancestor.
    pub fn gen_count(&self) -> u32 {
        self.gen_count
    }

    /// Index of the initial cell this simplex descends from.
    pub fn ancestor(&self) -> u32 {
        self.ancestor
    }

    pub fn is_live(&self) -> bool {
        self.live
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.verts.contains(&v)
    }

    pub fn contains_edge(&self, e: EdgeKey) -> bool {
        self.contains_vertex(e.lo()) && self.contains_vertex(e.hi())
    }

    /// All n(n+1)/2 edges.
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        let k = self.verts.len();
        (0..k)
            .flat_map(move |i| (i + 1..k).map(move |j| EdgeKey::new(self.verts[i], self.verts[j])))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("vertex {vertex} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        vertex: usize,
        got: usize,
        expected: usize,
    },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteCoordinate { vertex: usize },
    #[error("cell {cell} has {got} vertices, expected {expected}")]
    WrongCellSize {
        cell: usize,
        got: usize,
        expected: usize,
    },
    #[error("cell {cell} references vertex {index} but only {count} vertices exist")]
    IndexOutOfRange {
        cell: usize,
        index: usize,
        count: usize,
    },
    #[error("cell {cell} repeats vertex {index}")]
    DuplicateVertexInCell { cell: usize, index: usize },
    #[error("cell {cell} has the same vertex set as cell {other}")]
    DuplicateCell { cell: usize, other: usize },
    #[error("cell {cell} is degenerate (relative volume {relative_volume:e})")]
    DegenerateCell { cell: usize, relative_volume: f64 },
    #[error("edge {0} is not an edge of any live simplex")]
    UnknownEdge(EdgeKey),
    #[error("simplex {0} does not exist")]
    UnknownSimplex(SimplexId),
}

/// Conforming simplicial mesh with ambient dimension equal to simplex dimension.
#[derive(Clone, Debug)]
pub struct Triangulation<T> {
    dim: usize,
    coords: Vec<T>,
    colors: Vec<Option<u32>>,
    gens: Vec<Option<i64>>,
    simplices: Vec<Simplex>,
    live_count: usize,
    edge_index: HashMap<EdgeKey, SmallVec<[SimplexId; 8]>>,
    midpoint_index: HashMap<EdgeKey, VertexId>,
    n_colors: Option<u32>,
    rule: Option<BisectionRule>,
}

impl<T: Scalar> Triangulation<T> {
    /// Builds a triangulation from points and cells given as index tuples.
    ///
    /// Rejects out-of-range indices, repeated indices inside a cell, repeated
    /// cells and cells whose volume is below `DEGENERACY_TOL * diam^n`.
    pub fn new(dim: usize, points: &[Vec<T>], cells: &[Vec<usize>]) -> Result<Self, MeshError> {
        if dim == 0 {
            return Err(MeshError::ZeroDimension);
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(MeshError::DimensionMismatch {
                    vertex: i,
                    got: p.len(),
                    expected: dim,
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(MeshError::NonFiniteCoordinate { vertex: i });
            }
            coords.extend_from_slice(p);
        }
        let mut tria = Self {
            dim,
            coords,
            colors: vec![None; points.len()],
            gens: vec![None; points.len()],
            simplices: Vec::with_capacity(cells.len()),
            live_count: 0,
            edge_index: HashMap::new(),
            midpoint_index: HashMap::new(),
            n_colors: None,
            rule: None,
        };
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() != dim + 1 {
                return Err(MeshError::WrongCellSize {
                    cell: c,
                    got: cell.len(),
                    expected: dim + 1,
                });
            }
            for &i in cell {
                if i >= points.len() {
                    return Err(MeshError::IndexOutOfRange {
                        cell: c,
                        index: i,
                        count: points.len(),
                    });
                }
            }
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(MeshError::DuplicateVertexInCell {
                    cell: c,
                    index: w[0],
                });
            }
            if let Some(&other) = seen.get(&sorted) {
                return Err(MeshError::DuplicateCell { cell: c, other });
            }
            seen.insert(sorted, c);
            let verts: VertexList = cell.iter().map(|&i| VertexId(i as u32)).collect();
            let rel = tria.relative_volume(&verts);
            if rel.to_f64().unwrap_or(0.0) < T::DEGENERACY_TOL {
                return Err(MeshError::DegenerateCell {
                    cell: c,
                    relative_volume: rel.to_f64().unwrap_or(0.0),
                });
            }
            tria.push_simplex(Simplex {
                verts,
                tag: 0,
                parent: None,
                children: None,
                gen_count: 0,
                ancestor: c as u32,
                live: true,
            });
        }
        Ok(tria)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    /// Number of live simplices, `#T`.
    pub fn num_live(&self) -> usize {
        self.live_count
    }

    /// Number of simplices ever created, including tombstoned parents.
    pub fn num_simplices_total(&self) -> usize {
        self.simplices.len()
    }

    pub fn coords(&self, v: VertexId) -> &[T] {
        let i = v.index() * self.dim;
        &self.coords[i..i + self.dim]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.num_vertices() as u32).map(VertexId)
    }

    pub fn simplex(&self, id: SimplexId) -> &Simplex {
        &self.simplices[id.index()]
    }

    pub fn get_simplex(&self, id: SimplexId) -> Option<&Simplex> {
        self.simplices.get(id.index())
    }

    pub fn is_live(&self, id: SimplexId) -> bool {
        self.simplices.get(id.index()).is_some_and(|s| s.live)
    }

    /// Live simplex ids in ascending order.
    pub fn live_ids(&self) -> impl Iterator<Item = SimplexId> + '_ {
        self.simplices
            .iter()
            .enumerate()
            .filter(|(_, s)| s.live)
            .map(|(i, _)| SimplexId(i as u32))
    }

    /// Every simplex ever created, in creation order.
    pub fn all_ids(&self) -> impl Iterator<Item = SimplexId> {
        (0..self.simplices.len() as u32).map(SimplexId)
    }

    /// Vertex coordinates of a simplex in its stored order.
    pub fn simplex_coords(&self, id: SimplexId) -> Vec<Vec<T>> {
        self.simplex(id)
            .verts
            .iter()
            .map(|&v| self.coords(v).to_vec())
            .collect()
    }

    /// `omega(e)`: the live simplices containing both endpoints of `e`, ascending.
    pub fn edge_patch(&self, e: EdgeKey) -> Result<&[SimplexId], MeshError> {
        self.edge_index
            .get(&e)
            .map(|p| p.as_slice())
            .ok_or(MeshError::UnknownEdge(e))
    }

    /// All edges of live simplices, sorted.
    pub fn edges(&self) -> Vec<EdgeKey> {
        let mut e: Vec<EdgeKey> = self.edge_index.keys().copied().collect();
        e.sort_unstable();
        e
    }

    /// Midpoint vertex already created for `e`, if any.
    pub fn midpoint_of(&self, e: EdgeKey) -> Option<VertexId> {
        self.midpoint_index.get(&e).copied()
    }

    /// The full midpoint table, sorted by edge.
    pub fn midpoints(&self) -> Vec<(EdgeKey, VertexId)> {
        let mut m: Vec<_> = self.midpoint_index.iter().map(|(&e, &v)| (e, v)).collect();
        m.sort_unstable();
        m
    }

    pub fn color(&self, v: VertexId) -> Option<u32> {
        self.colors[v.index()]
    }

    pub fn gen(&self, v: VertexId) -> Option<i64> {
        self.gens[v.index()]
    }

    /// Largest color `N`, once a coloring has been installed.
    pub fn n_colors(&self) -> Option<u32> {
        self.n_colors
    }

    pub fn rule(&self) -> Option<BisectionRule> {
        self.rule
    }

    /// Generation bookkeeping of a vertex; `None` before initialization.
    pub fn vertex_attr(&self, v: VertexId) -> Option<VertexAttr> {
        let n = self.n_colors?;
        let gen = self.gens[v.index()]?;
        let (level, vtype) = decompose_generation(gen, n);
        Some(VertexAttr {
            color: self.colors[v.index()],
            gen,
            level,
            vtype,
        })
    }

    /// `level(T)`: the largest vertex level of the simplex.
    pub fn simplex_level(&self, id: SimplexId) -> Option<i64> {
        let s = self.simplex(id);
        let mut best: Option<i64> = None;
        for &v in &s.verts {
            let lvl = self.vertex_attr(v)?.level;
            best = Some(best.map_or(lvl, |b| b.max(lvl)));
        }
        best
    }

    /// Number of edges incident to each vertex.
    pub fn valencies(&self) -> Vec<usize> {
        let mut val = vec![0usize; self.num_vertices()];
        for e in self.edge_index.keys() {
            val[e.lo().index()] += 1;
            val[e.hi().index()] += 1;
        }
        val
    }

    /// Edge-neighbour lists, each sorted ascending.
    pub fn vertex_neighbors(&self) -> Vec<Vec<VertexId>> {
        let mut nb = vec![Vec::new(); self.num_vertices()];
        for e in self.edge_index.keys() {
            nb[e.lo().index()].push(e.hi());
            nb[e.hi().index()].push(e.lo());
        }
        for l in &mut nb {
            l.sort_unstable();
        }
        nb
    }

    /// Unsigned n-volume of a simplex.
    pub fn volume(&self, id: SimplexId) -> T {
        self.volume_of(&self.simplex(id).verts)
    }

    pub(crate) fn volume_of(&self, verts: &[VertexId]) -> T {
        let n = self.dim;
        let p0 = self.coords(verts[0]);
        let mut m = Matrix::zeros(n);
        for (i, &v) in verts[1..].iter().enumerate() {
            let p = self.coords(v);
            for j in 0..n {
                m[(i, j)] = p[j] - p0[j];
            }
        }
        let fact: T = (1..=n).fold(T::one(), |acc, k| acc * T::from_usize_lossy(k));
        m.det().abs() / fact
    }

    pub fn diameter(&self, id: SimplexId) -> T {
        self.diameter_of(&self.simplex(id).verts)
    }

    fn diameter_of(&self, verts: &[VertexId]) -> T {
        let mut d = T::zero();
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                d = d.max(linalg::dist(self.coords(verts[i]), self.coords(verts[j])));
            }
        }
        d
    }

    fn relative_volume(&self, verts: &[VertexId]) -> T {
        let d = self.diameter_of(verts);
        if d == T::zero() {
            return T::zero();
        }
        self.volume_of(verts) / d.powi(self.dim as i32)
    }

    /// Sum of live simplex volumes.
    pub fn total_volume(&self) -> T {
        self.live_ids().map(|id| self.volume(id)).sum()
    }

    /// Rebuilds the edge index from scratch and compares it with the
    /// incrementally maintained one.
    pub fn edge_index_consistent(&self) -> bool {
        let mut rebuilt: HashMap<EdgeKey, Vec<SimplexId>> = HashMap::new();
        for id in self.live_ids() {
            for e in self.simplex(id).edges() {
                rebuilt.entry(e).or_default().push(id);
            }
        }
        if rebuilt.len() != self.edge_index.len() {
            return false;
        }
        rebuilt.iter().all(|(e, ids)| {
            self.edge_index
                .get(e)
                .is_some_and(|p| p.as_slice() == ids.as_slice())
        })
    }

    /// Sorted vertex sets of all live simplices; handy for comparing meshes.
    pub fn live_vertex_sets(&self) -> HashSet<Vec<VertexId>> {
        self.live_ids()
            .map(|id| {
                let mut v = self.simplex(id).verts.to_vec();
                v.sort_unstable();
                v
            })
            .collect()
    }

    // ---- crate-internal mutation ------------------------------------------------

    pub(crate) fn set_colors(&mut self, colors: Vec<Option<u32>>, n_colors: Option<u32>) {
        debug_assert_eq!(colors.len(), self.num_vertices());
        self.colors = colors;
        self.n_colors = n_colors;
    }

    pub(crate) fn set_gens(&mut self, gens: Vec<Option<i64>>) {
        debug_assert_eq!(gens.len(), self.num_vertices());
        self.gens = gens;
    }

    pub(crate) fn set_rule(&mut self, rule: Option<BisectionRule>) {
        self.rule = rule;
    }

    /// Overwrites the stored order and tag of a live simplex without touching
    /// its vertex set.
    pub(crate) fn reorder_simplex(&mut self, id: SimplexId, verts: VertexList, tag: u8) {
        let s = &mut self.simplices[id.index()];
        debug_assert_eq!(
            {
                let mut a = s.verts.to_vec();
                a.sort_unstable();
                a
            },
            {
                let mut b = verts.to_vec();
                b.sort_unstable();
                b
            }
        );
        s.verts = verts;
        s.tag = tag;
    }

    pub(crate) fn set_ancestor(&mut self, id: SimplexId, ancestor: u32) {
        self.simplices[id.index()].ancestor = ancestor;
    }

    /// Returns the bisection vertex of `e`, creating it at the exact midpoint
    /// with generation `gen` if it does not exist yet. The flag reports creation.
    pub(crate) fn midpoint_vertex(&mut self, e: EdgeKey, gen: Option<i64>) -> (VertexId, bool) {
        if let Some(&v) = self.midpoint_index.get(&e) {
            return (v, false);
        }
        let id = VertexId(self.num_vertices() as u32);
        let half = T::lit(0.5);
        for j in 0..self.dim {
            let a = self.coords[e.lo().index() * self.dim + j];
            let b = self.coords[e.hi().index() * self.dim + j];
            self.coords.push((a + b) * half);
        }
        self.colors.push(None);
        self.gens.push(gen);
        self.midpoint_index.insert(e, id);
        (id, true)
    }

    /// Tombstones `parent` and appends its two children.
    pub(crate) fn split(
        &mut self,
        parent: SimplexId,
        children: [(VertexList, u8); 2],
    ) -> [SimplexId; 2] {
        let p = &self.simplices[parent.index()];
        debug_assert!(p.live, "splitting a dead simplex");
        let gen_count = p.gen_count + 1;
        let ancestor = p.ancestor;
        let old = p.verts.clone();
        self.unindex(parent, &old);
        self.simplices[parent.index()].live = false;
        self.live_count -= 1;
        let [(v1, t1), (v2, t2)] = children;
        let mk = |verts, tag| Simplex {
            verts,
            tag,
            parent: Some(parent),
            children: None,
            gen_count,
            ancestor,
            live: true,
        };
        let c1 = self.push_simplex(mk(v1, t1));
        let c2 = self.push_simplex(mk(v2, t2));
        self.simplices[parent.index()].children = Some([c1, c2]);
        [c1, c2]
    }

    fn push_simplex(&mut self, s: Simplex) -> SimplexId {
        let id = SimplexId(self.simplices.len() as u32);
        for e in s.edges() {
            self.edge_index.entry(e).or_default().push(id);
        }
        self.simplices.push(s);
        self.live_count += 1;
        id
    }

    fn unindex(&mut self, id: SimplexId, verts: &[VertexId]) {
        let k = verts.len();
        for i in 0..k {
            for j in i + 1..k {
                let e = EdgeKey::new(verts[i], verts[j]);
                if let Some(list) = self.edge_index.get_mut(&e) {
                    list.retain(|s| *s != id);
                    if list.is_empty() {
                        self.edge_index.remove(&e);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn square_has_five_edges_and_shared_diagonal() {
        let t: crate::Mesh = fixtures::square();
        assert_eq!(t.edges().len(), 5);
        let diag = EdgeKey::new(VertexId(0), VertexId(2));
        assert_eq!(t.edge_patch(diag).unwrap(), &[SimplexId(0), SimplexId(1)]);
        let boundary = EdgeKey::new(VertexId(0), VertexId(1));
        assert_eq!(t.edge_patch(boundary).unwrap().len(), 1);
    }

    #[test]
    fn unknown_edge_is_reported() {
        let t: crate::Mesh = fixtures::square();
        let e = EdgeKey::new(VertexId(1), VertexId(3));
        assert_eq!(t.edge_patch(e), Err(MeshError::UnknownEdge(e)));
    }

    #[test]
    fn kuhn_cube_main_diagonal_patch_is_all_six() {
        let t: crate::Mesh = fixtures::kuhn_cube(3);
        assert_eq!(t.num_live(), 6);
        // vertex index is the bit pattern of the corner
        let diag = EdgeKey::new(VertexId(0), VertexId(7));
        assert_eq!(t.edge_patch(diag).unwrap().len(), 6);
        // brute-force: cells containing both corners
        let count = t
            .live_ids()
            .filter(|&id| {
                t.simplex(id).contains_vertex(VertexId(0))
                    && t.simplex(id).contains_vertex(VertexId(7))
            })
            .count();
        assert_eq!(count, 6);
    }

    #[test]
    fn build_errors() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![2.0, 0.0],
        ];
        assert!(matches!(
            Triangulation::new(2, &pts, &[vec![0, 0, 1]]),
            Err(MeshError::DuplicateVertexInCell { cell: 0, index: 0 })
        ));
        assert!(matches!(
            Triangulation::new(2, &pts, &[vec![0, 1, 7]]),
            Err(MeshError::IndexOutOfRange {
                cell: 0,
                index: 7,
                ..
            })
        ));
        assert!(matches!(
            Triangulation::new(2, &pts, &[vec![0, 1, 3]]),
            Err(MeshError::DegenerateCell { cell: 0, .. })
        ));
        assert!(matches!(
            Triangulation::new(2, &pts, &[vec![0, 1, 2], vec![2, 1, 0]]),
            Err(MeshError::DuplicateCell { cell: 1, other: 0 })
        ));
        assert!(matches!(
            Triangulation::new(2, &pts, &[vec![0, 1]]),
            Err(MeshError::WrongCellSize { .. })
        ));
        assert!(matches!(
            Triangulation::<f64>::new(2, &[vec![0.0]], &[]),
            Err(MeshError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn midpoints_are_deduplicated() {
        let mut t: crate::Mesh = fixtures::square();
        let e = EdgeKey::new(VertexId(0), VertexId(2));
        let (m1, created) = t.midpoint_vertex(e, None);
        assert!(created);
        let (m2, created) = t.midpoint_vertex(e, None);
        assert!(!created);
        assert_eq!(m1, m2);
        assert_eq!(t.coords(m1), &[0.5, 0.5]);
    }

    #[test]
    fn f32_meshes_work_too() {
        let t: Triangulation<f32> = fixtures::kuhn_cube(2);
        assert_eq!(t.num_live(), 2);
        assert!((t.total_volume() - 1.0).abs() < 1e-6);
    }
}
