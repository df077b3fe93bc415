use super::AnalysisError;
use crate::linalg::{self, Matrix};
use crate::Scalar;

/// Closed ball given by centre and radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball<T> {
    pub center: Vec<T>,
    pub radius: T,
}

impl<T: Scalar> Ball<T> {
    fn contains(&self, p: &[T]) -> bool {
        let slack = T::lit(1e-12) * (self.radius + T::one());
        linalg::dist(&self.center, p) <= self.radius + slack
    }
}

/// Smallest ball through all of `support` with centre in their affine hull.
fn circumball<T: Scalar>(support: &[&[T]]) -> Option<Ball<T>> {
    let &p0 = support.first()?;
    let k = support.len() - 1;
    if k == 0 {
        return Some(Ball {
            center: p0.to_vec(),
            radius: T::zero(),
        });
    }
    let diffs: Vec<Vec<T>> = support[1..].iter().map(|p| linalg::sub(p, p0)).collect();
    let mut g = Matrix::zeros(k);
    let mut rhs = vec![T::zero(); k];
    let half = T::lit(0.5);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = linalg::dot(&diffs[i], &diffs[j]);
        }
        rhs[i] = half * g[(i, i)];
    }
    let alpha = g.solve(&rhs)?;
    let mut center = p0.to_vec();
    for (a, d) in alpha.iter().zip(&diffs) {
        for (c, x) in center.iter_mut().zip(d) {
            *c = *c + *a * *x;
        }
    }
    let radius = linalg::dist(&center, p0);
    Some(Ball { center, radius })
}

/// Welzl's recursion with move-to-front over `pts[..end]`.
fn mtf<T: Scalar>(
    pts: &mut Vec<Vec<T>>,
    end: usize,
    support: &mut Vec<Vec<T>>,
    dim: usize,
) -> Option<Ball<T>> {
    let refs: Vec<&[T]> = support.iter().map(|p| p.as_slice()).collect();
    let mut ball = circumball(&refs);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        if ball.as_ref().is_some_and(|b| b.contains(&pts[i])) {
            continue;
        }
        support.push(pts[i].clone());
        ball = mtf(pts, i, support, dim);
        support.pop();
        ball.as_ref()?;
        let p = pts.remove(i);
        pts.insert(0, p);
    }
    ball
}

/// Minimum enclosing ball of a point set.
pub fn enclosing_ball<T: Scalar>(points: &[Vec<T>]) -> Result<Ball<T>, AnalysisError> {
    if points.is_empty() {
        return Err(AnalysisError::Degenerate);
    }
    let dim = points[0].len();
    let mut pts = points.to_vec();
    let n = pts.len();
    mtf(&mut pts, n, &mut Vec::new(), dim).ok_or(AnalysisError::Degenerate)
}

/// `R`: diameter of the smallest ball containing the simplex.
pub fn enclosing_ball_diameter<T: Scalar>(simplex: &[Vec<T>]) -> Result<T, AnalysisError> {
    super::geometry::check_simplex(simplex)?;
    Ok(T::lit(2.0) * enclosing_ball(simplex)?.radius)
}
