//! Shape and closure measurements.
//!
//! Simplices are passed as coordinate lists (`n + 1` points in `R^n`).
//! Following the usual conventions for shape regularity, `r` and `R` are
//! *diameters*: of the largest inscribed ball and of the smallest enclosing
//! ball.

mod ball;
mod distance;
mod geometry;
mod similarity;
mod stats;
mod transformation;

pub use ball::{enclosing_ball, enclosing_ball_diameter, Ball};
pub use distance::{simplex_distance, simplex_distance_at_most};
pub use geometry::{
    descendants, heights, inradius_diameter, kuhn_simplex, min_height, shape_constant,
    shape_regularity, shape_report, similarity_class_bound, simplex_diameter, simplex_volume,
    ShapeReport,
};
pub use similarity::{similarity_classes, similarity_key, SimilarityKey};
pub use stats::{
    analysis_report, bdv_ratio, gamma_ratio, level_diameter_constants,
    level_diameter_constants_history, quasi_uniformity, AnalysisReport,
};
pub use transformation::{transformation_check, Chain, TransformationReport};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("simplex is degenerate")]
    Degenerate,
    #[error("expected {expected} points of dimension {dim}, got {got}")]
    BadSimplex {
        expected: usize,
        dim: usize,
        got: usize,
    },
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("matrix is singular or too ill-conditioned")]
    SingularMatrix,
    #[error("mark history is empty")]
    EmptyHistory,
    #[error("mesh has no generations")]
    NotInitialized,
}
