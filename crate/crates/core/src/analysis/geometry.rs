use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::{enclosing_ball_diameter, similarity_key, AnalysisError, SimilarityKey};
use crate::bisection::TaggedSimplex;
use crate::linalg::{self, Matrix};
use crate::mesh::VertexId;
use crate::Scalar;

pub(crate) fn check_simplex<T: Scalar>(s: &[Vec<T>]) -> Result<usize, AnalysisError> {
    let n = s.len().saturating_sub(1);
    if n == 0 || s.iter().any(|p| p.len() != n) {
        return Err(AnalysisError::BadSimplex {
            expected: n + 1,
            dim: n,
            got: s.len(),
        });
    }
    Ok(n)
}

fn factorial<T: Scalar>(k: usize) -> T {
    (1..=k).fold(T::one(), |a, i| a * T::from_usize_lossy(i))
}

/// n-volume of a simplex.
pub fn simplex_volume<T: Scalar>(s: &[Vec<T>]) -> Result<T, AnalysisError> {
    let n = check_simplex(s)?;
    let mut m = Matrix::zeros(n);
    for k in 0..n {
        for i in 0..n {
            m[(k, i)] = s[k + 1][i] - s[0][i];
        }
    }
    Ok(m.det().abs() / factorial(n))
}

/// Length of the longest edge.
pub fn simplex_diameter<T: Scalar>(s: &[Vec<T>]) -> T {
    let mut d = T::zero();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            d = d.max(linalg::dist(&s[i], &s[j]));
        }
    }
    d
}

/// Heights `h_f = n |T| / |f|`, indexed by the vertex opposite to `f`.
pub fn heights<T: Scalar>(s: &[Vec<T>]) -> Result<Vec<T>, AnalysisError> {
    let n = check_simplex(s)?;
    let vol = simplex_volume(s)?;
    let rel = vol / simplex_diameter(s).powi(n as i32);
    // NaN counts as degenerate
    let rel = rel.to_f64().unwrap_or(0.0);
    if rel.is_nan() || rel < T::DEGENERACY_TOL {
        return Err(AnalysisError::Degenerate);
    }
    let fact = factorial::<T>(n - 1);
    Ok((0..=n)
        .map(|skip| {
            let face: Vec<&Vec<T>> = s
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, p)| p)
                .collect();
            let edges: Vec<Vec<T>> = face[1..].iter().map(|p| linalg::sub(p, face[0])).collect();
            let area = linalg::gram_det(&edges).max(T::zero()).sqrt() / fact;
            T::from_usize_lossy(n) * vol / area
        })
        .collect())
}

/// `r`: diameter of the inscribed ball, from `1/r = 1/2 sum_f 1/h_f`.
pub fn inradius_diameter<T: Scalar>(s: &[Vec<T>]) -> Result<T, AnalysisError> {
    let h = heights(s)?;
    let inv: T = h.iter().map(|&x| T::one() / x).sum();
    Ok(T::lit(2.0) / inv)
}

/// `w`: the smallest height.
pub fn min_height<T: Scalar>(s: &[Vec<T>]) -> Result<T, AnalysisError> {
    Ok(heights(s)?.into_iter().fold(T::infinity(), T::min))
}

/// `gamma = R / r`.
pub fn shape_regularity<T: Scalar>(s: &[Vec<T>]) -> Result<T, AnalysisError> {
    Ok(enclosing_ball_diameter(s)? / inradius_diameter(s)?)
}

/// `2n(n + sqrt 2 - 1)`: factor by which bisection can worsen `gamma`.
pub fn shape_constant(n: usize) -> f64 {
    let n = n as f64;
    2.0 * n * (n + std::f64::consts::SQRT_2 - 1.0)
}

/// `n! n 2^(n-2)`: bound on similarity classes among descendants of one simplex.
pub fn similarity_class_bound(n: usize) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    fact * n as f64 * 2f64.powi(n as i32 - 2)
}

/// Kuhn simplex `[0, e_pi(1), e_pi(1) + e_pi(2), ...]`; `pi` is a
/// permutation of `0..n`.
pub fn kuhn_simplex<T: Scalar>(n: usize, pi: &[usize]) -> Result<Vec<Vec<T>>, AnalysisError> {
    let mut seen = vec![false; n];
    if pi.len() != n
        || pi
            .iter()
            .any(|&k| k >= n || std::mem::replace(&mut seen[k], true))
    {
        return Err(AnalysisError::InvalidPermutation(n));
    }
    let mut cur = vec![T::zero(); n];
    let mut out = vec![cur.clone()];
    for &k in pi {
        cur[k] = T::one();
        out.push(cur.clone());
    }
    Ok(out)
}

/// Per-simplex shape data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub w: f64,
    pub heights: Vec<f64>,
    pub gamma: f64,
    pub diam: f64,
    pub volume: f64,
    pub similarity_key: SimilarityKey,
}

pub fn shape_report<T: Scalar>(s: &[Vec<T>]) -> Result<ShapeReport, AnalysisError> {
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let h = heights(s)?;
    let r = inradius_diameter(s)?;
    let big_r = enclosing_ball_diameter(s)?;
    Ok(ShapeReport {
        r: f(r),
        big_r: f(big_r),
        w: f(h.iter().copied().fold(T::infinity(), T::min)),
        heights: h.iter().map(|&x| f(x)).collect(),
        gamma: f(big_r / r),
        diam: f(simplex_diameter(s)),
        volume: f(simplex_volume(s)?),
        similarity_key: similarity_key(s),
    })
}

/// All descendants of one tagged simplex up to `generations` bisections,
/// generation by generation (the input itself first). `s` is given in tagged
/// order with tag `n`.
pub fn descendants<T: Scalar>(
    s: &[Vec<T>],
    generations: usize,
) -> Result<Vec<Vec<Vec<T>>>, AnalysisError> {
    let n = check_simplex(s)?;
    let mut pts: Vec<Vec<T>> = s.to_vec();
    let ids: SmallVec<[VertexId; 8]> = (0..=n as u32).map(VertexId).collect();
    let mut level = vec![TaggedSimplex::new(ids, n as u8).expect("tag n is valid")];
    let mut out = vec![s.to_vec()];
    let half = T::lit(0.5);
    for _ in 0..generations {
        let mut next = Vec::with_capacity(2 * level.len());
        for t in &level {
            let e = t.bisection_edge();
            let mid: Vec<T> = pts[e.lo().index()]
                .iter()
                .zip(&pts[e.hi().index()])
                .map(|(&a, &b)| (a + b) * half)
                .collect();
            pts.push(mid);
            let (a, b) = t.bisect(VertexId(pts.len() as u32 - 1));
            next.push(a);
            next.push(b);
        }
        out.extend(next.iter().map(|t| {
            t.verts
                .iter()
                .map(|v| pts[v.index()].clone())
                .collect::<Vec<_>>()
        }));
        level = next;
    }
    Ok(out)
}
