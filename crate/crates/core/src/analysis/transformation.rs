use serde::{Deserialize, Serialize};

use super::{
    enclosing_ball_diameter, inradius_diameter, min_height, shape_regularity, simplex_diameter,
    AnalysisError,
};
use crate::linalg::Matrix;
use crate::Scalar;

/// `lower <= middle <= upper`, evaluated numerically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
}

impl Chain {
    /// Smallest relative gap of the two inequalities; negative means violated.
    pub fn slack(&self) -> f64 {
        let rel = |a: f64, b: f64| (b - a) / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        rel(self.lower, self.middle).min(rel(self.middle, self.upper))
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack() >= -tol
    }
}

/// How an affine map `x -> Ax + b` changes `r`, `R`, `w` and `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformationReport {
    /// `r(T) <= |A^-1| r(F(T)) <= diam(T)`.
    pub inradius: Chain,
    /// `w(T) <= R(F(T)) / |A| <= R(T)`.
    pub enclosing: Chain,
    /// `w(T)/diam(T) <= gamma(F(T)) / (|A| |A^-1|) <= gamma(T)`.
    pub gamma: Chain,
    pub norm_a: f64,
    pub norm_a_inv: f64,
}

impl TransformationReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.inradius.holds(tol) && self.enclosing.holds(tol) && self.gamma.holds(tol)
    }
}

/// Applies `x -> Ax + b` to `simplex` and evaluates the three chains.
/// Spectral norms come from the eigenvalues of `A^T A`.
pub fn transformation_check<T: Scalar>(
    a: &Matrix<T>,
    b: &[T],
    simplex: &[Vec<T>],
) -> Result<TransformationReport, AnalysisError> {
    let norm_a = a.spectral_norm();
    let smin = a.min_singular_value();
    if smin <= T::zero() || norm_a / smin > T::lit(1e8) {
        return Err(AnalysisError::SingularMatrix);
    }
    let norm_inv = T::one() / smin;
    let image: Vec<Vec<T>> = simplex
        .iter()
        .map(|p| {
            a.mul_vec(p)
                .into_iter()
                .zip(b)
                .map(|(x, &y)| x + y)
                .collect()
        })
        .collect();
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let (r, big_r, w, diam, gamma) = (
        inradius_diameter(simplex)?,
        enclosing_ball_diameter(simplex)?,
        min_height(simplex)?,
        simplex_diameter(simplex),
        shape_regularity(simplex)?,
    );
    let (r_img, big_r_img, gamma_img) = (
        inradius_diameter(&image)?,
        enclosing_ball_diameter(&image)?,
        shape_regularity(&image)?,
    );
    Ok(TransformationReport {
        inradius: Chain {
            lower: f(r),
            middle: f(norm_inv * r_img),
            upper: f(diam),
        },
        enclosing: Chain {
            lower: f(w),
            middle: f(big_r_img / norm_a),
            upper: f(big_r),
        },
        gamma: Chain {
            lower: f(w / diam),
            middle: f(gamma_img / (norm_a * norm_inv)),
            upper: f(gamma),
        },
        norm_a: f(norm_a),
        norm_a_inv: f(norm_inv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::kuhn_simplex;
    use approx::assert_relative_eq;

    #[test]
    fn identity_keeps_everything() {
        let s = kuhn_simplex::<f64>(2, &[0, 1]).unwrap();
        let rep = transformation_check(&Matrix::identity(2), &[0.0, 0.0], &s).unwrap();
        assert!(rep.holds(1e-12));
        assert_relative_eq!(
            rep.inradius.middle,
            inradius_diameter(&s).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            rep.enclosing.middle,
            enclosing_ball_diameter(&s).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            rep.gamma.middle,
            shape_regularity(&s).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn scaling_by_two() {
        let s = kuhn_simplex::<f64>(2, &[0, 1]).unwrap();
        let a = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let rep = transformation_check(&a, &[1.0, -3.0], &s).unwrap();
        assert!(rep.holds(1e-12));
        assert_relative_eq!(rep.norm_a, 2.0, max_relative = 1e-12);
        // r(F(T)) = 2 r(T): the left inequality of the first chain is tight
        assert_relative_eq!(
            rep.inradius.middle,
            rep.inradius.lower,
            max_relative = 1e-12
        );
    }

    #[test]
    fn singular_rejected() {
        let s = kuhn_simplex::<f64>(2, &[0, 1]).unwrap();
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(
            transformation_check(&a, &[0.0, 0.0], &s),
            Err(AnalysisError::SingularMatrix)
        );
    }
}
