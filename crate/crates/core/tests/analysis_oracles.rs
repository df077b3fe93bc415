//! Analysis routines checked against independent computations.

use colorbisect::analysis::{
    enclosing_ball, enclosing_ball_diameter, inradius_diameter, shape_regularity, similarity_key,
    simplex_distance, transformation_check,
};
use colorbisect::linalg::Matrix;
use colorbisect::{fixtures, Lcg};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use proptest::prelude::*;

fn random_simplex(seed: u64, n: usize) -> Vec<Vec<f64>> {
    fixtures::random_simplex_coords(&mut Lcg::new(seed), n)
}

/// Barycentric coordinate functions `lambda_i(x) = g_i . x + c_i`.
fn barycentric_rows(s: &[Vec<f64>]) -> Vec<(Vec<f64>, f64)> {
    let n = s.len() - 1;
    // columns p_i - p_0, i = 1..n
    let m = Matrix::from_rows(
        &(0..n)
            .map(|r| (1..=n).map(|i| s[i][r] - s[0][r]).collect())
            .collect::<Vec<_>>(),
    );
    let inv = m.inverse().expect("non-degenerate");
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..n {
        let g: Vec<f64> = (0..n).map(|k| inv[(i, k)]).collect();
        let c = -g.iter().zip(&s[0]).map(|(a, b)| a * b).sum::<f64>();
        rows.push((g, c));
    }
    // lambda_0 = 1 - sum of the others
    let g0: Vec<f64> = (0..n)
        .map(|k| -rows.iter().map(|(g, _)| g[k]).sum::<f64>())
        .collect();
    let c0 = 1.0 - rows.iter().map(|(_, c)| c).sum::<f64>();
    rows.insert(0, (g0, c0));
    rows
}

/// Largest inscribed ball diameter as a Chebyshev-centre LP.
fn chebyshev_diameter(s: &[Vec<f64>]) -> f64 {
    let n = s.len() - 1;
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<_> = (0..n)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let rho = lp.add_var(1.0, (0.0, f64::INFINITY));
    for (g, c) in barycentric_rows(s) {
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        // g.x + c >= rho |g|
        let mut expr: Vec<_> = xs.iter().zip(&g).map(|(&v, &a)| (v, a)).collect();
        expr.push((rho, -norm));
        lp.add_constraint(&expr[..], ComparisonOp::Ge, -c);
    }
    2.0 * lp.solve().expect("feasible").objective()
}

/// Smallest enclosing ball radius by trying the circumball of every subset.
fn brute_force_radius(pts: &[Vec<f64>]) -> f64 {
    let k = pts.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..1 << k {
        let sub: Vec<&Vec<f64>> = (0..k)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| &pts[i])
            .collect();
        let Some(c) = circumcenter(&sub) else {
            continue;
        };
        let r = sub.iter().map(|p| dist(p, &c)).fold(0.0, f64::max);
        if pts.iter().all(|p| dist(p, &c) <= r * (1.0 + 1e-9) + 1e-12) {
            best = best.min(r);
        }
    }
    best
}

/// Centre of the ball through `pts` lying in their affine hull.
fn circumcenter(pts: &[&Vec<f64>]) -> Option<Vec<f64>> {
    let k = pts.len() - 1;
    let p0 = pts[0];
    if k == 0 {
        return Some(p0.clone());
    }
    let d: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gram = Matrix::from_rows(
        &d.iter()
            .map(|a| d.iter().map(|b| dot(a, b)).collect())
            .collect::<Vec<_>>(),
    );
    let rhs: Vec<f64> = d.iter().map(|a| 0.5 * dot(a, a)).collect();
    let coef = gram.solve(&rhs)?;
    let mut c = p0.clone();
    for (a, &w) in d.iter().zip(&coef) {
        for (ci, ai) in c.iter_mut().zip(a) {
            *ci += w * ai;
        }
    }
    Some(c)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Max-norm distance between two simplices, solved as an LP over the
/// barycentric weights of both.
fn linf_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let n = a[0].len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let wa: Vec<_> = a.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let wb: Vec<_> = b.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let t = lp.add_var(1.0, (0.0, f64::INFINITY));
    lp.add_constraint(
        &wa.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>()[..],
        ComparisonOp::Eq,
        1.0,
    );
    lp.add_constraint(
        &wb.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>()[..],
        ComparisonOp::Eq,
        1.0,
    );
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut expr: Vec<_> = wa.iter().zip(a).map(|(&v, p)| (v, sign * p[k])).collect();
            expr.extend(wb.iter().zip(b).map(|(&v, p)| (v, -sign * p[k])));
            expr.push((t, -1.0));
            lp.add_constraint(&expr[..], ComparisonOp::Le, 0.0);
        }
    }
    lp.solve().expect("feasible").objective()
}

fn random_rotation(rng: &mut Lcg, n: usize) -> Vec<Vec<f64>> {
    // Gram-Schmidt on a random matrix
    let mut q: Vec<Vec<f64>> = Vec::new();
    while q.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        for u in &q {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= d * ui;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            q.push(v.iter().map(|x| x / norm).collect());
        }
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inradius_matches_chebyshev_lp(seed in any::<u64>(), n in 2usize..=4) {
        let s = random_simplex(seed, n);
        let r = inradius_diameter(&s).unwrap();
        let lp = chebyshev_diameter(&s);
        prop_assert!((r - lp).abs() <= 1e-7 * lp, "heights formula {r}, lp {lp}");
    }

    #[test]
    fn enclosing_ball_matches_brute_force(seed in any::<u64>(), n in 2usize..=4) {
        let s = random_simplex(seed, n);
        let ball = enclosing_ball(&s).unwrap();
        let oracle = brute_force_radius(&s);
        prop_assert!((ball.radius - oracle).abs() <= 1e-9 * oracle, "welzl {}, oracle {oracle}", ball.radius);
        for p in &s {
            prop_assert!(dist(p, &ball.center) <= ball.radius * (1.0 + 1e-9));
        }
        prop_assert!((enclosing_ball_diameter(&s).unwrap() - 2.0 * oracle).abs() <= 2e-9 * oracle);
    }

    #[test]
    fn enclosing_ball_of_point_clouds(seed in any::<u64>(), n in 2usize..=3, k in 1usize..9) {
        let mut rng = Lcg::new(seed);
        let pts: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.range(-2.0, 2.0)).collect()).collect();
        let ball = enclosing_ball(&pts).unwrap();
        let oracle = brute_force_radius(&pts);
        prop_assert!((ball.radius - oracle).abs() <= 1e-9 * oracle.max(1e-12));
    }

    #[test]
    fn distance_is_bracketed_by_max_norm(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = Lcg::new(seed);
        let a = fixtures::random_simplex_coords(&mut rng, n);
        let shift: Vec<f64> = (0..n).map(|_| rng.range(-3.0, 3.0)).collect();
        let b: Vec<Vec<f64>> = fixtures::random_simplex_coords(&mut rng, n)
            .into_iter()
            .map(|p| p.iter().zip(&shift).map(|(x, s)| x + s).collect())
            .collect();
        let d = simplex_distance(&a, &b);
        let dinf = linf_distance(&a, &b);
        prop_assert!(d >= dinf - 1e-9, "{d} < {dinf}");
        prop_assert!(d <= (n as f64).sqrt() * dinf + 1e-9, "{d} > sqrt(n) {dinf}");
        // never above any sampled pair
        for _ in 0..20 {
            let pa = sample(&mut rng, &a);
            let pb = sample(&mut rng, &b);
            prop_assert!(d <= dist(&pa, &pb) + 1e-12);
        }
    }

    #[test]
    fn shape_measures_are_similarity_invariant(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = Lcg::new(seed);
        let s = fixtures::random_simplex_coords(&mut rng, n);
        let q = random_rotation(&mut rng, n);
        let scale = rng.range(0.1, 10.0);
        let mut moved: Vec<Vec<f64>> = s
            .iter()
            .map(|p| q.iter().map(|row| scale * row.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() + 1.5).collect())
            .collect();
        rng.shuffle(&mut moved);
        prop_assert_eq!(similarity_key(&s), similarity_key(&moved));
        let (g0, g1) = (shape_regularity(&s).unwrap(), shape_regularity(&moved).unwrap());
        prop_assert!((g0 - g1).abs() <= 1e-9 * g0);
    }

    #[test]
    fn transformation_chains_hold(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = Lcg::new(seed);
        let s = fixtures::random_simplex_coords(&mut rng, n);
        let a = Matrix::from_rows(&(0..n).map(|_| (0..n).map(|_| rng.range(-2.0, 2.0)).collect()).collect::<Vec<_>>());
        let b: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        match transformation_check(&a, &b, &s) {
            Ok(rep) => prop_assert!(rep.holds(1e-9), "{rep:?}"),
            Err(_) => prop_assert!(a.min_singular_value() * 1e8 < a.spectral_norm()),
        }
    }
}

fn sample(rng: &mut Lcg, s: &[Vec<f64>]) -> Vec<f64> {
    let w: Vec<f64> = s.iter().map(|_| rng.unit() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let mut p = vec![0.0; s[0].len()];
    for (wi, q) in w.iter().zip(s) {
        for (pk, qk) in p.iter_mut().zip(q) {
            *pk += wi / total * qk;
        }
    }
    p
}

#[test]
fn rotation_by_multiple_of_scale_is_exact_on_chains() {
    let s = random_simplex(11, 3);
    let a = Matrix::from_rows(&[
        vec![0.0, -3.0, 0.0],
        vec![3.0, 0.0, 0.0],
        vec![0.0, 0.0, 3.0],
    ]);
    let rep = transformation_check(&a, &[0.0; 3], &s).unwrap();
    // a similarity: |A| = 3, |A^-1| = 1/3, so every middle term is unchanged
    assert!((rep.inradius.middle - rep.inradius.lower).abs() <= 1e-12 * rep.inradius.lower);
    assert!((rep.enclosing.middle - rep.enclosing.upper).abs() <= 1e-12 * rep.enclosing.upper);
    assert!((rep.gamma.middle - rep.gamma.upper).abs() <= 1e-12 * rep.gamma.upper);
}
