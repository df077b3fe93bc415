use crate::linalg::{self, Matrix};
use crate::Scalar;

fn subsets(k: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << k).map(move |mask| (0..k).filter(|&i| mask & (1 << i) != 0).collect())
}

/// Closest distance between the affine hulls of two faces, if the closest
/// points lie in both (closed) faces.
fn face_pair<T: Scalar>(f: &[&[T]], g: &[&[T]]) -> Option<T> {
    let eps = T::lit(1e-12);
    let c = linalg::sub(f[0], g[0]);
    let mut cols: Vec<Vec<T>> = f[1..].iter().map(|p| linalg::sub(p, f[0])).collect();
    cols.extend(g[1..].iter().map(|p| linalg::sub(g[0], p)));
    let k = cols.len();
    let (alpha, beta) = if k == 0 {
        (Vec::new(), Vec::new())
    } else {
        let mut mtm = Matrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                mtm[(i, j)] = linalg::dot(&cols[i], &cols[j]);
            }
        }
        let rhs: Vec<T> = cols.iter().map(|col| -linalg::dot(col, &c)).collect();
        let z = mtm.solve(&rhs)?;
        let (a, b) = z.split_at(f.len() - 1);
        (a.to_vec(), b.to_vec())
    };
    let inside =
        |w: &[T]| w.iter().all(|&x| x >= -eps) && w.iter().copied().sum::<T>() <= T::one() + eps;
    if !inside(&alpha) || !inside(&beta) {
        return None;
    }
    let mut diff = c;
    for (col, &z) in cols.iter().zip(alpha.iter().chain(&beta)) {
        for (d, &x) in diff.iter_mut().zip(col) {
            *d = *d + z * x;
        }
    }
    Some(linalg::norm(&diff))
}

/// Euclidean distance between two closed simplices (0 if they intersect).
pub fn simplex_distance<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> T {
    let dim = a[0].len();
    let mut best = T::infinity();
    for fa in subsets(a.len()) {
        for gb in subsets(b.len()) {
            if fa.len() + gb.len() - 2 > dim {
                continue;
            }
            let f: Vec<&[T]> = fa.iter().map(|&i| a[i].as_slice()).collect();
            let g: Vec<&[T]> = gb.iter().map(|&i| b[i].as_slice()).collect();
            if let Some(d) = face_pair(&f, &g) {
                best = best.min(d);
            }
        }
    }
    best
}

/// `simplex_distance(a, b) <= bound`, trying the cheap vertex-pair upper
/// bound before the exact computation.
pub fn simplex_distance_at_most<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>], bound: T) -> bool {
    let vertex_min = a
        .iter()
        .flat_map(|p| b.iter().map(move |q| linalg::dist(p, q)))
        .fold(T::infinity(), T::min);
    vertex_min <= bound || simplex_distance(a, b) <= bound
}
