//! Conforming bisection refinement of simplicial meshes in any dimension.
//!
//! An initial triangulation is given a vertex coloring with colors
//! `0..=N` (`N >= n`), each vertex gets a generation derived from its color,
//! and simplices are then refined by newest-vertex (Maubach) bisection with a
//! recursive conforming closure. The [`analysis`] module measures the shape
//! and closure quantities the method is known to keep bounded.
//!
//! ```
//! use colorbisect::{fixtures, greedy_color, initialize, refine, BisectionRule, ColorOrder, Mesh, RefineOptions};
//!
//! let mut mesh: Mesh = fixtures::square();
//! let colors = greedy_color(&mesh, ColorOrder::Id);
//! initialize(&mut mesh, &colors, BisectionRule::Maubach).unwrap();
//! let first = mesh.live_ids().next().unwrap();
//! refine(&mut mesh, first, &RefineOptions::default()).unwrap();
//! assert_eq!(mesh.num_live(), 3);
//! assert!(colorbisect::check_conformity(&mesh).ok);
//! ```
//!
//! Geometry is generic over the [`Scalar`] type; [`Mesh`] and [`Mesh32`] are
//! the `f64` and `f32` instantiations.

pub mod analysis;
pub mod bisection;
pub mod coloring;
pub mod conformity;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod refine;
pub mod rng;
mod scalar;

pub use bisection::{
    bisect_generalized, bisect_tagged, decompose_generation, edge_gensharp, init_tagged,
    init_vertex_attrs, initialize, BisectionError, BisectionResult, BisectionRule,
    GenSortedSimplex, TaggedSimplex,
};
pub use coloring::{
    greedy_color, max_valency, verify_coloring, ColorMap, ColorOrder, ColoringError,
};
pub use conformity::{check_conformity, ConformityReport, Violation};
pub use io::{IoError, MeshFile};
pub use mesh::{EdgeKey, MeshError, Simplex, SimplexId, Triangulation, VertexAttr, VertexId};
pub use refine::{
    point_mark, refine, refine_set, uniform_refine, MarkHistory, RefineError, RefineLog,
    RefineOptions,
};
pub use rng::Lcg;
pub use scalar::Scalar;

/// Double precision mesh.
pub type Mesh = Triangulation<f64>;
/// Single precision mesh.
pub type Mesh32 = Triangulation<f32>;

/// Any error the library can report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Bisection(#[from] BisectionError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
}
