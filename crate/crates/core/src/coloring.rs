//! Generalized vertex colorings of an initial triangulation.
//!
//! A coloring `c: V -> {0, ..., N}` is admissible when the endpoints of every
//! edge get different colors, which is the same as all vertices of every cell
//! being distinct. `N >= n` always holds since each cell is an (n+1)-clique.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{EdgeKey, Triangulation, VertexId};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("vertex {0} has no color")]
    UncoloredVertex(VertexId),
    #[error("color map has {got} entries but the mesh has {expected} vertices")]
    SizeMismatch { got: usize, expected: usize },
    #[error("edge {0} joins two vertices of the same color")]
    InvalidColoring(EdgeKey),
}

/// Vertex iteration order of the greedy coloring.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorOrder {
    /// Ascending vertex id.
    #[default]
    Id,
    /// Largest valency first, ties by ascending id.
    Valency,
}

/// Color per vertex together with the largest color `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorMap {
    colors: Vec<u32>,
    max_color: u32,
}

impl ColorMap {
    /// Wraps user-supplied colors (for instance a hand-made coloring).
    pub fn new(colors: Vec<u32>) -> Self {
        let max_color = colors.iter().copied().max().unwrap_or(0);
        Self { colors, max_color }
    }

    /// Like [`ColorMap::new`] but with an explicit `N`, which may exceed the
    /// largest color used. Returns `None` if `max_color` is too small.
    pub fn with_max_color(colors: Vec<u32>, max_color: u32) -> Option<Self> {
        colors
            .iter()
            .all(|&c| c <= max_color)
            .then_some(Self { colors, max_color })
    }

    /// Reads colors off a mesh; fails on the first uncolored vertex.
    pub fn from_mesh<T: Scalar>(tria: &Triangulation<T>) -> Result<Self, ColoringError> {
        let colors = tria
            .vertex_ids()
            .map(|v| tria.color(v).ok_or(ColoringError::UncoloredVertex(v)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(colors))
    }

    pub fn color(&self, v: VertexId) -> u32 {
        self.colors[v.index()]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// `N`, the largest color used.
    pub fn max_color(&self) -> u32 {
        self.max_color
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

/// Greedy coloring: each vertex in turn gets the smallest color not used by an
/// already colored edge neighbour.
pub fn greedy_color<T: Scalar>(tria: &Triangulation<T>, order: ColorOrder) -> ColorMap {
    let nv = tria.num_vertices();
    let neighbors = tria.vertex_neighbors();
    let mut sequence: Vec<VertexId> = tria.vertex_ids().collect();
    if order == ColorOrder::Valency {
        sequence.sort_by_key(|v| (std::cmp::Reverse(neighbors[v.index()].len()), *v));
    }
    let mut colors: Vec<Option<u32>> = vec![None; nv];
    let mut taken: Vec<bool> = Vec::new();
    for v in sequence {
        let nb = &neighbors[v.index()];
        taken.clear();
        taken.resize(nb.len() + 1, false);
        for w in nb {
            if let Some(c) = colors[w.index()] {
                if (c as usize) < taken.len() {
                    taken[c as usize] = true;
                }
            }
        }
        let c = taken.iter().position(|t| !t).unwrap_or(nb.len()) as u32;
        colors[v.index()] = Some(c);
    }
    ColorMap::new(colors.into_iter().map(|c| c.unwrap_or(0)).collect())
}

/// Checks that every edge has distinctly colored endpoints. Returns the first
/// offending edge in sorted edge order.
pub fn verify_coloring<T: Scalar>(
    tria: &Triangulation<T>,
    cm: &ColorMap,
) -> Result<Option<EdgeKey>, ColoringError> {
    if cm.len() != tria.num_vertices() {
        return Err(ColoringError::SizeMismatch {
            got: cm.len(),
            expected: tria.num_vertices(),
        });
    }
    Ok(tria
        .edges()
        .into_iter()
        .find(|e| cm.color(e.lo()) == cm.color(e.hi())))
}

/// Like [`verify_coloring`] for the colors stored on the mesh itself.
pub fn verify_mesh_coloring<T: Scalar>(
    tria: &Triangulation<T>,
) -> Result<Option<EdgeKey>, ColoringError> {
    let cm = ColorMap::from_mesh(tria)?;
    verify_coloring(tria, &cm)
}

/// Largest number of edges meeting at one vertex.
pub fn max_valency<T: Scalar>(tria: &Triangulation<T>) -> usize {
    tria.valencies().into_iter().max().unwrap_or(0)
}

/// Stores a verified coloring on the mesh.
pub fn apply_coloring<T: Scalar>(
    tria: &mut Triangulation<T>,
    cm: &ColorMap,
) -> Result<(), ColoringError> {
    if let Some(e) = verify_coloring(tria, cm)? {
        return Err(ColoringError::InvalidColoring(e));
    }
    tria.set_colors(
        cm.colors().iter().map(|&c| Some(c)).collect(),
        Some(cm.max_color()),
    );
    Ok(())
}
