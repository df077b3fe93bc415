//! Helpers shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use colorbisect::bisection::{bisection_edge, simplex_gensharp};
use colorbisect::refine::RefineLog;
use colorbisect::{
    edge_gensharp, greedy_color, initialize, BisectionRule, ColorMap, ColorOrder, Lcg, Mesh,
    SimplexId,
};

/// Greedy colors in vertex order, then `initialize` with `rule`.
pub fn initialized(mut mesh: Mesh, rule: BisectionRule) -> Mesh {
    let cm = greedy_color(&mesh, ColorOrder::Id);
    initialize(&mut mesh, &cm, rule).expect("greedy coloring initializes");
    mesh
}

pub fn initialized_with(mut mesh: Mesh, cm: &ColorMap, rule: BisectionRule) -> Mesh {
    initialize(&mut mesh, cm, rule).expect("coloring initializes");
    mesh
}

/// A live simplex chosen uniformly with `rng`.
pub fn random_live(mesh: &Mesh, rng: &mut Lcg) -> SimplexId {
    let live: Vec<SimplexId> = mesh.live_ids().collect();
    live[rng.below(live.len())]
}

/// The bisection edge of `id` must be the unique minimizer of the edge
/// generation over all edges of the simplex.
pub fn oldest_edge_violation(mesh: &Mesh, id: SimplexId) -> Option<String> {
    let n = mesh.n_colors()?;
    let bse = bisection_edge(mesh, id).ok()?;
    let mut best: Option<(i64, usize)> = None;
    let mut at_bse = None;
    for e in mesh.simplex(id).edges() {
        let g = edge_gensharp(mesh.gen(e.lo())?, mesh.gen(e.hi())?, n)?;
        if e == bse {
            at_bse = Some(g);
        }
        best = match best {
            Some((b, c)) if g == b => Some((b, c + 1)),
            Some((b, c)) if g > b => Some((b, c)),
            _ => Some((g, 1)),
        };
    }
    match (best, at_bse) {
        (Some((b, 1)), Some(g)) if g == b => None,
        _ => Some(format!(
            "simplex {id}: bisection edge {bse:?} has gen# {at_bse:?}, minimum {best:?}"
        )),
    }
}

/// Every patch member of every recorded bisection must assign the same
/// generation to the new vertex.
pub fn well_posed_violations(mesh: &Mesh, log: &RefineLog) -> Vec<String> {
    let mut out = Vec::new();
    for ev in &log.events {
        let got = mesh.gen(ev.vertex);
        for &p in &ev.patch {
            let want = simplex_gensharp(mesh, p).ok();
            if want != got {
                out.push(format!(
                    "vertex {} gen {got:?} but simplex {p} gives {want:?}",
                    ev.vertex
                ));
            }
        }
    }
    out
}

/// Largest `diam(T) 2^level(T)` over every simplex created so far.
pub fn history_d(mesh: &Mesh) -> f64 {
    colorbisect::analysis::level_diameter_constants_history(mesh).map_or(0.0, |x| x.1)
}

/// Sorted vertex coordinates of a simplex, as bit patterns.
pub fn cell_key(mesh: &Mesh, id: SimplexId) -> Vec<Vec<u64>> {
    let mut c: Vec<Vec<u64>> = mesh
        .simplex(id)
        .vertices()
        .iter()
        .map(|&v| mesh.coords(v).iter().map(|x| x.to_bits()).collect())
        .collect();
    c.sort();
    c
}

/// The live simplex of `other` with the same vertex coordinates as `id` in `mesh`.
pub fn same_cell(mesh: &Mesh, id: SimplexId, other: &Mesh) -> Option<SimplexId> {
    let key = cell_key(mesh, id);
    other.live_ids().find(|&o| cell_key(other, o) == key)
}
