use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{shape_regularity, similarity_classes, AnalysisError};
use crate::mesh::{SimplexId, Triangulation};
use crate::refine::MarkHistory;
use crate::Scalar;

fn level_scaled_diameters<T: Scalar>(
    tria: &Triangulation<T>,
    ids: impl Iterator<Item = SimplexId>,
) -> Option<(f64, f64)> {
    let mut d = f64::INFINITY;
    let mut big_d = 0.0f64;
    let mut any = false;
    for id in ids {
        let level = tria.simplex_level(id)?;
        let v = tria.diameter(id).to_f64()? * 2f64.powi(level as i32);
        d = d.min(v);
        big_d = big_d.max(v);
        any = true;
    }
    any.then_some((d, big_d))
}

/// `(d, D)`: extreme values of `diam(T) 2^level(T)` over live simplices.
/// `None` if the mesh has no generations.
pub fn level_diameter_constants<T: Scalar>(tria: &Triangulation<T>) -> Option<(f64, f64)> {
    level_scaled_diameters(tria, tria.live_ids())
}

/// Same as [`level_diameter_constants`] over every simplex ever created.
pub fn level_diameter_constants_history<T: Scalar>(tria: &Triangulation<T>) -> Option<(f64, f64)> {
    level_scaled_diameters(tria, tria.all_ids())
}

/// Largest volume ratio between two live cells.
pub fn quasi_uniformity<T: Scalar>(tria: &Triangulation<T>) -> f64 {
    let vols: Vec<f64> = tria
        .live_ids()
        .map(|id| tria.volume(id).to_f64().unwrap_or(f64::NAN))
        .collect();
    let max = vols.iter().copied().fold(0.0, f64::max);
    let min = vols.iter().copied().fold(f64::INFINITY, f64::min);
    if vols.is_empty() {
        1.0
    } else {
        max / min
    }
}

/// Lower bound on the closure constant: cells created per marked cell.
pub fn bdv_ratio(hist: &MarkHistory) -> Result<f64, AnalysisError> {
    let marked = hist.total_marked();
    if marked == 0 {
        return Err(AnalysisError::EmptyHistory);
    }
    Ok((hist.final_count() as f64 - hist.initial_count as f64) / marked as f64)
}

/// `max_T gamma(T) / gamma(T_0)` with `T_0` the initial ancestor of `T`.
/// `initial` must be the mesh the ancestors refer to.
pub fn gamma_ratio<T: Scalar>(
    tria: &Triangulation<T>,
    initial: &Triangulation<T>,
) -> Result<f64, AnalysisError> {
    let mut base: HashMap<u32, f64> = HashMap::new();
    for id in initial.live_ids() {
        let g = shape_regularity(&initial.simplex_coords(id))?;
        base.insert(id.0, g.to_f64().unwrap_or(f64::NAN));
    }
    let mut worst = 0.0f64;
    for id in tria.live_ids() {
        let g = shape_regularity(&tria.simplex_coords(id))?
            .to_f64()
            .unwrap_or(f64::NAN);
        let g0 = base
            .get(&tria.simplex(id).ancestor())
            .copied()
            .ok_or(AnalysisError::NotInitialized)?;
        worst = worst.max(g / g0);
    }
    Ok(worst)
}

fn gamma_max<T: Scalar>(tria: &Triangulation<T>) -> Result<f64, AnalysisError> {
    tria.live_ids().try_fold(0.0f64, |m, id| {
        Ok(m.max(
            shape_regularity(&tria.simplex_coords(id))?
                .to_f64()
                .unwrap_or(f64::NAN),
        ))
    })
}

/// Summary statistics; fields that cannot be computed from the inputs are `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct AnalysisReport {
    pub gamma_max_initial: Option<f64>,
    pub gamma_max_current: Option<f64>,
    pub gamma_ratio: Option<f64>,
    pub similarity_classes: Option<usize>,
    pub d: Option<f64>,
    pub D: Option<f64>,
    pub D_over_d: Option<f64>,
    pub C_qu: Option<f64>,
    pub C_BDV_lb: Option<f64>,
    pub N: Option<u32>,
}

/// Collects everything available: `initial` enables the initial-mesh fields,
/// `history` the closure ratio. `similarity_classes` is the largest count
/// over initial ancestors.
pub fn analysis_report<T: Scalar>(
    tria: &Triangulation<T>,
    initial: Option<&Triangulation<T>>,
    history: Option<&MarkHistory>,
) -> Result<AnalysisReport, AnalysisError> {
    let dd = level_diameter_constants(tria);
    Ok(AnalysisReport {
        gamma_max_initial: initial.map(gamma_max).transpose()?,
        gamma_max_current: Some(gamma_max(tria)?),
        gamma_ratio: initial.map(|i| gamma_ratio(tria, i)).transpose()?,
        similarity_classes: similarity_classes(tria).values().copied().max(),
        d: dd.map(|x| x.0),
        D: dd.map(|x| x.1),
        D_over_d: dd.map(|(d, big_d)| big_d / d),
        C_qu: initial.map(quasi_uniformity),
        C_BDV_lb: history.and_then(|h| bdv_ratio(h).ok()),
        N: tria.n_colors(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisection::initialize;
    use crate::coloring::{greedy_color, ColorOrder};
    use crate::{fixtures, refine, Mesh, RefineOptions};
    use approx::assert_relative_eq;

    fn kuhn_triangle() -> Mesh {
        let mut t: Mesh = fixtures::single_kuhn_simplex(2);
        let cm = crate::ColorMap::new(vec![2, 0, 1]);
        initialize(&mut t, &cm, crate::BisectionRule::Maubach).unwrap();
        t
    }

    #[test]
    fn level_zero_kuhn_triangle() {
        let t = kuhn_triangle();
        let (d, big_d) = level_diameter_constants(&t).unwrap();
        assert_relative_eq!(d, 2f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(big_d, 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn one_bisection() {
        let mut t = kuhn_triangle();
        refine(&mut t, SimplexId(0), &RefineOptions::default()).unwrap();
        for id in t.live_ids() {
            assert_eq!(t.simplex_level(id), Some(1));
            assert_relative_eq!(t.diameter(id), 1.0, max_relative = 1e-12);
        }
        let (_, big_d) = level_diameter_constants(&t).unwrap();
        assert_relative_eq!(big_d, 2.0, max_relative = 1e-12);
        let (_, hist_d) = level_diameter_constants_history(&t).unwrap();
        assert_relative_eq!(hist_d, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn uninitialized_has_no_constants() {
        assert_eq!(level_diameter_constants(&fixtures::square::<f64>()), None);
    }

    #[test]
    fn quasi_uniformity_values() {
        assert_relative_eq!(
            quasi_uniformity(&fixtures::kuhn_cube::<f64>(3)),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            quasi_uniformity(&fixtures::square::<f64>()),
            1.0,
            max_relative = 1e-12
        );
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 2.0],
            vec![4.0, 0.0],
            vec![0.0, 8.0],
        ];
        let t: Mesh = Triangulation::new(2, &pts, &[vec![0, 1, 2], vec![0, 3, 4]]).unwrap();
        assert_relative_eq!(quasi_uniformity(&t), 16.0, max_relative = 1e-12);
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 2.0],
            vec![3.0, 3.0],
            vec![5.0, 3.0],
            vec![3.0, 7.0],
        ];
        let t: Mesh = Triangulation::new(2, &pts, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert_relative_eq!(quasi_uniformity(&t), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn bdv_uniform_marking_is_one() {
        let mut t: Mesh = fixtures::square();
        let cm = greedy_color(&t, ColorOrder::Id);
        initialize(&mut t, &cm, crate::BisectionRule::Maubach).unwrap();
        let mut hist = MarkHistory::new(t.num_live());
        assert_eq!(bdv_ratio(&hist), Err(AnalysisError::EmptyHistory));
        for _ in 0..4 {
            let before = t.num_live();
            let marks: Vec<SimplexId> = t.live_ids().collect();
            for &m in &marks {
                crate::refine::bisect_simplex(&mut t, m).unwrap();
            }
            hist.push(marks.len(), before, t.num_live());
        }
        assert_eq!(bdv_ratio(&hist).unwrap(), 1.0);
    }

    #[test]
    fn report_fields() {
        let t0: Mesh = fixtures::square();
        let mut t = t0.clone();
        let colors = [[0, 0], [1, 0], [1, 1], [0, 1]]
            .iter()
            .map(|x| fixtures::kuhn_lattice_color(x))
            .collect();
        initialize(
            &mut t,
            &crate::ColorMap::new(colors),
            crate::BisectionRule::Maubach,
        )
        .unwrap();
        crate::uniform_refine(&mut t, 1).unwrap();
        let rep = analysis_report(&t, Some(&t0), None).unwrap();
        assert_eq!(rep.N, Some(2));
        assert_eq!(rep.C_BDV_lb, None);
        assert_relative_eq!(rep.gamma_ratio.unwrap(), 1.0, max_relative = 1e-12);
        assert_eq!(rep.similarity_classes, Some(1));

        // the greedy coloring bisects a boundary edge first and loses similarity
        let mut g = t0.clone();
        let cm = greedy_color(&g, ColorOrder::Id);
        initialize(&mut g, &cm, crate::BisectionRule::Maubach).unwrap();
        crate::uniform_refine(&mut g, 1).unwrap();
        let ratio = gamma_ratio(&g, &t0).unwrap();
        assert!(ratio > 1.0 && ratio <= crate::analysis::shape_constant(2));
        let json = serde_json::to_value(&rep).unwrap();
        for key in [
            "gamma_max_initial",
            "D_over_d",
            "C_qu",
            "C_BDV_lb",
            "N",
            "D",
            "d",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
