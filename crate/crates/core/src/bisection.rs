//! Single-simplex bisection rules.
//!
//! Two equivalent rules are provided. The tagged rule keeps every simplex as
//! an ordered vertex array with a tag `gamma` and always splits the edge
//! `[v_0, v_gamma]`. The generation rule sorts the vertices by decreasing
//! generation and picks the bisection edge from their levels. Initial
//! simplices are tagged so that both rules produce the same simplices.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::coloring::{apply_coloring, ColorMap, ColoringError};
use crate::mesh::{EdgeKey, SimplexId, Triangulation, VertexId, VertexList};
use crate::Scalar;

/// Which representation drives bisection of a mesh.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BisectionRule {
    /// Ordered vertices plus tag.
    Maubach,
    /// Vertices sorted by decreasing generation.
    Generation,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BisectionError {
    #[error("vertices {0} and {1} have the same generation {2}")]
    NonDistinctGenerations(VertexId, VertexId, i64),
    #[error("edge {0} has endpoints of equal generation")]
    EqualGenerations(EdgeKey),
    #[error("vertex {0} has no generation")]
    MissingGeneration(VertexId),
    #[error("mesh has no coloring/bisection rule installed")]
    NotInitialized,
    #[error("tag {tag} is outside 1..={n}")]
    BadTag { tag: u8, n: usize },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// Splits `gen = N * (level - 1) + vtype` with `vtype` in `1..=N`.
pub fn decompose_generation(gen: i64, n_colors: u32) -> (i64, u32) {
    assert!(n_colors >= 1, "N must be positive");
    let n = n_colors as i64;
    let level = (gen - 1).div_euclid(n) + 1;
    let vtype = (gen - 1).rem_euclid(n) + 1;
    (level, vtype as u32)
}

/// Initial generation of a vertex of color `c`: `-c`.
pub fn initial_generation(color: u32) -> i64 {
    -(color as i64)
}

/// A simplex in Maubach's representation `[v_0, ..., v_n]_gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TaggedSimplex {
    pub verts: VertexList,
    pub tag: u8,
}

impl TaggedSimplex {
    pub fn new(verts: impl IntoIterator<Item = VertexId>, tag: u8) -> Result<Self, BisectionError> {
        let verts: VertexList = verts.into_iter().collect();
        let n = verts.len().saturating_sub(1);
        if tag == 0 || tag as usize > n {
            return Err(BisectionError::BadTag { tag, n });
        }
        Ok(Self { verts, tag })
    }

    pub fn dim(&self) -> usize {
        self.verts.len() - 1
    }

    /// `[v_0, v_gamma]`.
    pub fn bisection_edge(&self) -> EdgeKey {
        EdgeKey::new(self.verts[0], self.verts[self.tag as usize])
    }

    /// Bisects at `mid`, the midpoint vertex of the bisection edge.
    pub fn bisect(&self, mid: VertexId) -> (TaggedSimplex, TaggedSimplex) {
        let n = self.dim();
        let g = self.tag as usize;
        let new_tag = if g >= 2 { self.tag - 1 } else { n as u8 };
        let tail = &self.verts[g + 1..];
        let mut first: VertexList = SmallVec::with_capacity(n + 1);
        first.extend_from_slice(&self.verts[..g]);
        first.push(mid);
        first.extend_from_slice(tail);
        let mut second: VertexList = SmallVec::with_capacity(n + 1);
        second.extend_from_slice(&self.verts[1..=g]);
        second.push(mid);
        second.extend_from_slice(tail);
        (
            TaggedSimplex {
                verts: first,
                tag: new_tag,
            },
            TaggedSimplex {
                verts: second,
                tag: new_tag,
            },
        )
    }
}

/// Free-function form of [`TaggedSimplex::bisect`].
pub fn bisect_tagged(t: &TaggedSimplex, mid: VertexId) -> (TaggedSimplex, TaggedSimplex) {
    t.bisect(mid)
}

/// Vertices sorted by strictly decreasing generation, `<v_0, ..., v_m>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSortedSimplex {
    verts: VertexList,
    gens: SmallVec<[i64; 8]>,
}

impl GenSortedSimplex {
    /// Sorts `(vertex, generation)` pairs; ties are rejected.
    pub fn new(pairs: impl IntoIterator<Item = (VertexId, i64)>) -> Result<Self, BisectionError> {
        let mut p: SmallVec<[(VertexId, i64); 8]> = pairs.into_iter().collect();
        p.sort_by_key(|a| std::cmp::Reverse(a.1));
        if let Some(w) = p.windows(2).find(|w| w[0].1 == w[1].1) {
            return Err(BisectionError::NonDistinctGenerations(
                w[0].0, w[1].0, w[0].1,
            ));
        }
        Ok(Self {
            verts: p.iter().map(|x| x.0).collect(),
            gens: p.iter().map(|x| x.1).collect(),
        })
    }

    /// Reads generations from the mesh.
    pub fn from_mesh<T: Scalar>(
        tria: &Triangulation<T>,
        verts: &[VertexId],
    ) -> Result<Self, BisectionError> {
        let pairs = verts
            .iter()
            .map(|&v| {
                tria.gen(v)
                    .map(|g| (v, g))
                    .ok_or(BisectionError::MissingGeneration(v))
            })
            .collect::<Result<SmallVec<[_; 8]>, _>>()?;
        Self::new(pairs)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.verts
    }

    pub fn gens(&self) -> &[i64] {
        &self.gens
    }

    /// Levels, which are non-increasing and span at most one.
    pub fn levels(&self, n_colors: u32) -> SmallVec<[i64; 8]> {
        self.gens
            .iter()
            .map(|&g| decompose_generation(g, n_colors).0)
            .collect()
    }

    /// Children after splitting with `result`, the new vertex being `mid`.
    pub fn children(&self, result: &BisectionResult, mid: VertexId) -> [GenSortedSimplex; 2] {
        let [a, b] = result.positions;
        let make = |drop: usize| {
            let mut verts: VertexList = SmallVec::with_capacity(self.verts.len());
            let mut gens: SmallVec<[i64; 8]> = SmallVec::with_capacity(self.verts.len());
            verts.push(mid);
            gens.push(result.new_vertex_gen);
            for (i, (&v, &g)) in self.verts.iter().zip(&self.gens).enumerate() {
                if i != drop {
                    verts.push(v);
                    gens.push(g);
                }
            }
            GenSortedSimplex { verts, gens }
        };
        [make(b), make(a)]
    }
}

/// Outcome of the generation rule on one simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisectionResult {
    pub edge: EdgeKey,
    /// Positions of the edge endpoints in the sorted vertex array, younger first.
    pub positions: [usize; 2],
    pub new_vertex_gen: i64,
}

/// Generation rule: if the two oldest vertices differ in level, split them;
/// otherwise split the oldest vertex against the youngest vertex of its level.
pub fn bisect_generalized(s: &GenSortedSimplex, n_colors: u32) -> BisectionResult {
    let m = s.verts.len() - 1;
    assert!(m >= 1, "cannot bisect a vertex");
    let n = n_colors as i64;
    let levels = s.levels(n_colors);
    if levels[m] != levels[m - 1] {
        BisectionResult {
            edge: EdgeKey::new(s.verts[m - 1], s.verts[m]),
            positions: [m - 1, m],
            new_vertex_gen: s.gens[m - 1] + n,
        }
    } else {
        let j = (0..=m).find(|&k| levels[k] == levels[m]).unwrap();
        let (_, vtype) = decompose_generation(s.gens[j], n_colors);
        BisectionResult {
            edge: EdgeKey::new(s.verts[j], s.verts[m]),
            positions: [j, m],
            new_vertex_gen: s.gens[m] + 2 * n + 1 - vtype as i64,
        }
    }
}

/// Generation of the bisection vertex an edge would receive (`gen#` of the edge).
pub fn edge_gensharp(gen_a: i64, gen_b: i64, n_colors: u32) -> Option<i64> {
    if gen_a == gen_b {
        return None;
    }
    let (young, old) = if gen_a > gen_b {
        (gen_a, gen_b)
    } else {
        (gen_b, gen_a)
    };
    let (ly, ty) = decompose_generation(young, n_colors);
    let (lo, _) = decompose_generation(old, n_colors);
    let n = n_colors as i64;
    Some(if ly != lo {
        young + n
    } else {
        old + 2 * n + 1 - ty as i64
    })
}

/// [`edge_gensharp`] for an edge of `tria`.
pub fn mesh_edge_gensharp<T: Scalar>(
    tria: &Triangulation<T>,
    e: EdgeKey,
) -> Result<i64, BisectionError> {
    let n = tria.n_colors().ok_or(BisectionError::NotInitialized)?;
    let ga = tria
        .gen(e.lo())
        .ok_or(BisectionError::MissingGeneration(e.lo()))?;
    let gb = tria
        .gen(e.hi())
        .ok_or(BisectionError::MissingGeneration(e.hi()))?;
    edge_gensharp(ga, gb, n).ok_or(BisectionError::EqualGenerations(e))
}

/// Stores the coloring and sets `gen(v) = -c(v)` on every vertex.
pub fn init_vertex_attrs<T: Scalar>(
    tria: &mut Triangulation<T>,
    cm: &ColorMap,
) -> Result<(), BisectionError> {
    apply_coloring(tria, cm)?;
    let gens = cm
        .colors()
        .iter()
        .map(|&c| Some(initial_generation(c)))
        .collect();
    tria.set_gens(gens);
    Ok(())
}

/// Tagged form of every live cell: vertices sorted by ascending color, the
/// color-`N` vertex (if present) rotated to the front, tag `n`.
pub fn init_tagged<T: Scalar>(
    tria: &Triangulation<T>,
    cm: &ColorMap,
) -> Result<Vec<TaggedSimplex>, BisectionError> {
    if let Some(e) = crate::coloring::verify_coloring(tria, cm)? {
        return Err(ColoringError::InvalidColoring(e).into());
    }
    let n = tria.dim();
    let top = cm.max_color();
    Ok(tria
        .live_ids()
        .map(|id| {
            let mut verts: VertexList = tria.simplex(id).vertices().iter().copied().collect();
            verts.sort_by_key(|&v| cm.color(v));
            if cm.color(verts[n]) == top {
                verts.rotate_right(1);
            }
            TaggedSimplex {
                verts,
                tag: n as u8,
            }
        })
        .collect())
}

/// Colors, initializes generations and installs `rule` on every live cell.
pub fn initialize<T: Scalar>(
    tria: &mut Triangulation<T>,
    cm: &ColorMap,
    rule: BisectionRule,
) -> Result<(), BisectionError> {
    init_vertex_attrs(tria, cm)?;
    let ids: Vec<SimplexId> = tria.live_ids().collect();
    match rule {
        BisectionRule::Maubach => {
            let tagged = init_tagged(tria, cm)?;
            for (id, t) in ids.into_iter().zip(tagged) {
                tria.reorder_simplex(id, t.verts, t.tag);
            }
        }
        BisectionRule::Generation => {
            for id in ids {
                let s = GenSortedSimplex::from_mesh(tria, tria.simplex(id).vertices())?;
                tria.reorder_simplex(id, s.verts, 0);
            }
        }
    }
    tria.set_rule(Some(rule));
    Ok(())
}

/// Generation-sorted view of a simplex of the mesh.
pub fn gen_sorted<T: Scalar>(
    tria: &Triangulation<T>,
    id: SimplexId,
) -> Result<GenSortedSimplex, BisectionError> {
    GenSortedSimplex::from_mesh(tria, tria.simplex(id).vertices())
}

/// Bisection edge of a live simplex under the mesh's rule.
pub fn bisection_edge<T: Scalar>(
    tria: &Triangulation<T>,
    id: SimplexId,
) -> Result<EdgeKey, BisectionError> {
    let s = tria.simplex(id);
    match tria.rule().ok_or(BisectionError::NotInitialized)? {
        BisectionRule::Maubach => Ok(EdgeKey::new(s.verts[0], s.verts[s.tag as usize])),
        BisectionRule::Generation => {
            let n = tria.n_colors().ok_or(BisectionError::NotInitialized)?;
            Ok(bisect_generalized(&gen_sorted(tria, id)?, n).edge)
        }
    }
}

/// Generation the bisection vertex of `id` gets (`gen#(T)`).
pub fn simplex_gensharp<T: Scalar>(
    tria: &Triangulation<T>,
    id: SimplexId,
) -> Result<i64, BisectionError> {
    let n = tria.n_colors().ok_or(BisectionError::NotInitialized)?;
    Ok(bisect_generalized(&gen_sorted(tria, id)?, n).new_vertex_gen)
}

/// Children vertex arrays (and tags) of `id` when split at `mid`. The child
/// that keeps the lower-numbered endpoint of the bisection edge comes first,
/// so both rules number new simplices identically.
pub(crate) fn children_of<T: Scalar>(
    tria: &Triangulation<T>,
    id: SimplexId,
    mid: VertexId,
) -> Result<[(VertexList, u8); 2], BisectionError> {
    let s = tria.simplex(id);
    let [a, b] = match tria.rule().ok_or(BisectionError::NotInitialized)? {
        BisectionRule::Maubach => {
            let t = TaggedSimplex {
                verts: s.verts.clone(),
                tag: s.tag,
            };
            let (a, b) = t.bisect(mid);
            [(a.verts, a.tag), (b.verts, b.tag)]
        }
        BisectionRule::Generation => {
            let n = tria.n_colors().ok_or(BisectionError::NotInitialized)?;
            let sorted = gen_sorted(tria, id)?;
            let res = bisect_generalized(&sorted, n);
            let [a, b] = sorted.children(&res, mid);
            [(a.verts, 0), (b.verts, 0)]
        }
    };
    let dropped_by_a = s.verts.iter().find(|v| !a.0.contains(v));
    let dropped_by_b = s.verts.iter().find(|v| !b.0.contains(v));
    Ok(if dropped_by_a < dropped_by_b {
        [b, a]
    } else {
        [a, b]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::ColorMap;
    use crate::fixtures;
    use crate::Mesh;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_generation(1, 3), (1, 1));
        assert_eq!(decompose_generation(-2, 3), (0, 1));
        assert_eq!(decompose_generation(-3, 3), (-1, 3));
        assert_eq!(decompose_generation(0, 3), (0, 3));
        assert_eq!(decompose_generation(-1, 2), (0, 1));
        // color N gives level -1 and type N
        for n in 1..6u32 {
            assert_eq!(decompose_generation(initial_generation(n), n), (-1, n));
        }
    }

    #[test]
    fn tagged_bisection_examples() {
        let (a, b, c, d, m) = (v(0), v(1), v(2), v(3), v(9));
        let t = TaggedSimplex::new([a, b, c], 2).unwrap();
        assert_eq!(t.bisection_edge(), EdgeKey::new(a, c));
        let (t1, t2) = bisect_tagged(&t, m);
        assert_eq!((t1.verts.as_slice(), t1.tag), (&[a, b, m][..], 1));
        assert_eq!((t2.verts.as_slice(), t2.tag), (&[b, c, m][..], 1));

        let t = TaggedSimplex::new([a, b, c], 1).unwrap();
        assert_eq!(t.bisection_edge(), EdgeKey::new(a, b));
        let (t1, t2) = t.bisect(m);
        assert_eq!((t1.verts.as_slice(), t1.tag), (&[a, m, c][..], 2));
        assert_eq!((t2.verts.as_slice(), t2.tag), (&[b, m, c][..], 2));

        let t = TaggedSimplex::new([a, b, c, d], 3).unwrap();
        let (t1, t2) = t.bisect(m);
        assert_eq!((t1.verts.as_slice(), t1.tag), (&[a, b, c, m][..], 2));
        assert_eq!((t2.verts.as_slice(), t2.tag), (&[b, c, d, m][..], 2));
    }

    #[test]
    fn bad_tags_rejected() {
        assert!(TaggedSimplex::new([v(0), v(1), v(2)], 0).is_err());
        assert!(TaggedSimplex::new([v(0), v(1), v(2)], 3).is_err());
    }

    #[test]
    fn generalized_examples() {
        // N=3, colors (0,1,3): levels differ at the tail
        let s = GenSortedSimplex::new([(v(0), 0), (v(1), -1), (v(2), -3)]).unwrap();
        assert_eq!(s.levels(3).as_slice(), &[0, 0, -1]);
        let r = bisect_generalized(&s, 3);
        assert_eq!(r.edge, EdgeKey::new(v(1), v(2)));
        assert_eq!(r.new_vertex_gen, 2);
        assert_eq!(decompose_generation(2, 3).0, 1);

        // N=3, colors (0,1,2): all level 0
        let s = GenSortedSimplex::new([(v(0), 0), (v(1), -1), (v(2), -2)]).unwrap();
        let r = bisect_generalized(&s, 3);
        assert_eq!(r.edge, EdgeKey::new(v(0), v(2)));
        assert_eq!(r.new_vertex_gen, 2);

        // N=2: color 2 is the top color, so v2 drops to level -1
        assert_eq!(s.levels(2).as_slice(), &[0, 0, -1]);
        let r = bisect_generalized(&s, 2);
        assert_eq!(r.edge, EdgeKey::new(v(1), v(2)));
        assert_eq!(r.new_vertex_gen, 1);
        assert_eq!(decompose_generation(1, 2).0, 1);
    }

    #[test]
    fn generalized_children_replace_endpoints() {
        let s = GenSortedSimplex::new([(v(0), 0), (v(1), -1), (v(2), -2)]).unwrap();
        let r = bisect_generalized(&s, 2);
        let [c1, c2] = s.children(&r, v(7));
        assert_eq!(c1.vertices(), &[v(7), v(0), v(1)]);
        assert_eq!(c2.vertices(), &[v(7), v(0), v(2)]);
        assert_eq!(c1.gens(), &[1, 0, -1]);
        assert_eq!(c2.gens(), &[1, 0, -2]);
    }

    #[test]
    fn ties_are_rejected() {
        assert!(matches!(
            GenSortedSimplex::new([(v(0), 1), (v(1), 1)]),
            Err(BisectionError::NonDistinctGenerations(..))
        ));
        assert_eq!(edge_gensharp(4, 4, 2), None);
    }

    #[test]
    fn edge_gensharp_examples() {
        // gen -2 is level -1 when N = 2
        assert_eq!(edge_gensharp(0, -2, 2), Some(2));
        assert_eq!(edge_gensharp(-2, 0, 2), Some(2));
        assert_eq!(edge_gensharp(-1, -2, 2), Some(1));
        assert_eq!(edge_gensharp(0, -1, 2), Some(2));
        assert_eq!(edge_gensharp(-1, -3, 3), Some(2));
    }

    #[test]
    fn vertex_attrs_from_colors() {
        let mut t: Mesh = fixtures::square();
        let cm = ColorMap::new(vec![0, 1, 2, 1]);
        init_vertex_attrs(&mut t, &cm).unwrap();
        let a = t.vertex_attr(v(0)).unwrap();
        assert_eq!((a.gen, a.level, a.vtype), (0, 0, 2));
        let c = t.vertex_attr(v(2)).unwrap();
        assert_eq!((c.gen, c.level, c.vtype), (-2, -1, 2));
        let b = t.vertex_attr(v(1)).unwrap();
        assert_eq!((b.gen, b.level, b.vtype), (-1, 0, 1));
    }

    #[test]
    fn init_tagged_examples() {
        // one triangle, colors (0, 1, 3) with N = 3 forced by a user map
        let t: Mesh = fixtures::single_kuhn_simplex(2);
        let cm = ColorMap::new(vec![0, 1, 3]);
        let tagged = init_tagged(&t, &cm).unwrap();
        assert_eq!(tagged[0].verts.as_slice(), &[v(2), v(0), v(1)]);
        assert_eq!(tagged[0].tag, 2);
        assert_eq!(tagged[0].bisection_edge(), EdgeKey::new(v(2), v(1)));

        // colors (0, 1, 2) with N = 3: no rotation
        let cm = ColorMap::with_max_color(vec![0, 1, 2], 3).unwrap();
        let tagged = init_tagged(&t, &cm).unwrap();
        assert_eq!(tagged[0].verts.as_slice(), &[v(0), v(1), v(2)]);
        assert_eq!(tagged[0].bisection_edge(), EdgeKey::new(v(0), v(2)));

        // N = n: always rotated, the classical colored order
        let cm = ColorMap::new(vec![2, 0, 1]);
        let tagged = init_tagged(&t, &cm).unwrap();
        assert_eq!(tagged[0].verts.as_slice(), &[v(0), v(1), v(2)]);
    }

    #[test]
    fn init_rejects_bad_coloring() {
        let mut t: Mesh = fixtures::square();
        let cm = ColorMap::new(vec![0, 1, 2, 0]);
        assert!(matches!(
            initialize(&mut t, &cm, BisectionRule::Maubach),
            Err(BisectionError::Coloring(ColoringError::InvalidColoring(_)))
        ));
    }

    #[test]
    fn both_rules_agree_on_initial_bisection_edges() {
        for mesh in [
            fixtures::square::<f64>(),
            fixtures::pentagon_fan(),
            fixtures::kuhn_cube(3),
            fixtures::strip(),
        ] {
            let cm = crate::coloring::greedy_color(&mesh, crate::ColorOrder::Id);
            let mut a = mesh.clone();
            let mut b = mesh.clone();
            initialize(&mut a, &cm, BisectionRule::Maubach).unwrap();
            initialize(&mut b, &cm, BisectionRule::Generation).unwrap();
            for id in a.live_ids() {
                assert_eq!(
                    bisection_edge(&a, id).unwrap(),
                    bisection_edge(&b, id).unwrap()
                );
            }
        }
    }
}
