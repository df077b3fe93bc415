//! Conforming closure: bisect a marked simplex and, recursively, every
//! neighbour needed to keep the mesh free of hanging nodes.
//!
//! The recursion is run as an explicit stack. The top simplex `T` looks at the
//! patch of its bisection edge `e`. If some member has a different bisection
//! edge, the member with the smallest id is pushed and handled first;
//! otherwise the whole patch is bisected at the shared midpoint. The stack is
//! therefore always a refinement chain: the bisection edge of each entry is an
//! edge of the next one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bisection::{self, BisectionError, BisectionRule};
use crate::mesh::{EdgeKey, SimplexId, Triangulation, VertexId};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RefineError {
    #[error("simplex {0} is not live")]
    NotLive(SimplexId),
    #[error("simplex {0} does not exist")]
    UnknownSimplex(SimplexId),
    #[error("closure did not terminate after {bisections} bisections (chain length {depth})")]
    NonTermination { bisections: u64, depth: usize },
    #[error("point has {got} coordinates, mesh dimension is {expected}")]
    PointDimension { got: usize, expected: usize },
    #[error("point lies outside every live simplex")]
    PointOutside,
    #[error(transparent)]
    Bisection(#[from] BisectionError),
}

#[derive(Clone, Debug)]
pub struct RefineOptions {
    /// Keep one [`BisectionEvent`] per bisected edge.
    pub record_events: bool,
    /// Upper bound on bisections per call before giving up.
    pub budget: u64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            record_events: false,
            budget: 1 << 40,
        }
    }
}

impl RefineOptions {
    pub fn recording() -> Self {
        Self {
            record_events: true,
            ..Self::default()
        }
    }
}

/// One edge bisection performed by the closure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisectionEvent {
    pub edge: EdgeKey,
    pub vertex: VertexId,
    /// Bisected simplices, ascending.
    pub patch: Vec<SimplexId>,
    /// Children, two per patch member in patch order.
    pub children: Vec<SimplexId>,
    /// Pending stack when the patch was bisected, starting at the marked simplex.
    pub chain: Vec<SimplexId>,
}

/// What a refinement call did.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineLog {
    pub marked: Vec<SimplexId>,
    pub events: Vec<BisectionEvent>,
    pub created_simplices: Vec<SimplexId>,
    pub created_vertices: Vec<VertexId>,
    /// Longest stack seen, minus one.
    pub max_depth: usize,
    pub bisections: u64,
}

impl RefineLog {
    fn absorb(&mut self, other: RefineLog) {
        self.marked.extend(other.marked);
        self.events.extend(other.events);
        self.created_simplices.extend(other.created_simplices);
        self.created_vertices.extend(other.created_vertices);
        self.max_depth = self.max_depth.max(other.max_depth);
        self.bisections += other.bisections;
    }
}

/// One adaptive iteration: how many simplices were marked and the mesh size
/// before and after.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub marked: usize,
    pub size_before: usize,
    pub size_after: usize,
}

/// Marking history of an adaptive run, used for closure statistics.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkHistory {
    pub initial_count: usize,
    pub entries: Vec<HistoryEntry>,
}

impl MarkHistory {
    pub fn new(initial_count: usize) -> Self {
        Self {
            initial_count,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, marked: usize, size_before: usize, size_after: usize) {
        self.entries.push(HistoryEntry {
            marked,
            size_before,
            size_after,
        });
    }

    pub fn total_marked(&self) -> usize {
        self.entries.iter().map(|e| e.marked).sum()
    }

    pub fn final_count(&self) -> usize {
        self.entries
            .last()
            .map_or(self.initial_count, |e| e.size_after)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn ensure_initialized<T: Scalar>(tria: &Triangulation<T>) -> Result<BisectionRule, RefineError> {
    match (tria.rule(), tria.n_colors()) {
        (Some(rule), Some(_)) => Ok(rule),
        _ => Err(BisectionError::NotInitialized.into()),
    }
}

fn ensure_live<T: Scalar>(tria: &Triangulation<T>, id: SimplexId) -> Result<(), RefineError> {
    match tria.get_simplex(id) {
        None => Err(RefineError::UnknownSimplex(id)),
        Some(s) if !s.is_live() => Err(RefineError::NotLive(id)),
        Some(_) => Ok(()),
    }
}

/// Generation the bisection vertex of `id` receives under the mesh's rule.
fn new_vertex_gen<T: Scalar>(
    tria: &Triangulation<T>,
    id: SimplexId,
    e: EdgeKey,
) -> Result<i64, BisectionError> {
    match tria.rule().ok_or(BisectionError::NotInitialized)? {
        BisectionRule::Maubach => bisection::mesh_edge_gensharp(tria, e),
        BisectionRule::Generation => bisection::simplex_gensharp(tria, id),
    }
}

/// Bisects every simplex in `patch` at the midpoint of `e`.
fn bisect_patch<T: Scalar>(
    tria: &mut Triangulation<T>,
    e: EdgeKey,
    gen: i64,
    patch: &[SimplexId],
    log: &mut RefineLog,
) -> Result<(VertexId, Vec<SimplexId>), RefineError> {
    let (mid, created) = tria.midpoint_vertex(e, Some(gen));
    if created {
        log.created_vertices.push(mid);
    }
    let mut children = Vec::with_capacity(2 * patch.len());
    for &id in patch {
        let kids = bisection::children_of(tria, id, mid)?;
        let [a, b] = tria.split(id, kids);
        children.push(a);
        children.push(b);
    }
    log.created_simplices.extend_from_slice(&children);
    log.bisections += patch.len() as u64;
    Ok((mid, children))
}

/// Bisects `marked` and closes the mesh; the result is the coarsest
/// conforming refinement in which `marked` is bisected.
pub fn refine<T: Scalar>(
    tria: &mut Triangulation<T>,
    marked: SimplexId,
    opts: &RefineOptions,
) -> Result<RefineLog, RefineError> {
    ensure_initialized(tria)?;
    ensure_live(tria, marked)?;
    let mut log = RefineLog {
        marked: vec![marked],
        ..RefineLog::default()
    };
    let mut stack = vec![marked];
    while let Some(&top) = stack.last() {
        if !tria.is_live(top) {
            stack.pop();
            continue;
        }
        let e = bisection::bisection_edge(tria, top)?;
        let mut patch: Vec<SimplexId> = tria
            .edge_patch(e)
            .expect("bisection edge is indexed")
            .to_vec();
        patch.sort_unstable();
        let mut pending = None;
        for &s in &patch {
            if bisection::bisection_edge(tria, s)? != e {
                pending = Some(s);
                break;
            }
        }
        match pending {
            Some(s) => {
                stack.push(s);
                if stack.len() > tria.num_live() + 1 {
                    return Err(RefineError::NonTermination {
                        bisections: log.bisections,
                        depth: stack.len(),
                    });
                }
                log.max_depth = log.max_depth.max(stack.len() - 1);
            }
            None => {
                let gen = new_vertex_gen(tria, top, e)?;
                let (vertex, children) = bisect_patch(tria, e, gen, &patch, &mut log)?;
                if opts.record_events {
                    log.events.push(BisectionEvent {
                        edge: e,
                        vertex,
                        patch,
                        children,
                        chain: stack.clone(),
                    });
                }
                stack.pop();
                if log.bisections > opts.budget {
                    return Err(RefineError::NonTermination {
                        bisections: log.bisections,
                        depth: stack.len(),
                    });
                }
            }
        }
    }
    debug_assert!(
        level_increase_ok(tria, &log),
        "created simplex more than one level above the marked one"
    );
    log::debug!(
        "refine {marked}: {} bisections, {} new vertices, depth {}",
        log.bisections,
        log.created_vertices.len(),
        log.max_depth
    );
    Ok(log)
}

fn level_increase_ok<T: Scalar>(tria: &Triangulation<T>, log: &RefineLog) -> bool {
    let Some(lm) = log.marked.first().and_then(|&m| tria.simplex_level(m)) else {
        return true;
    };
    log.created_simplices
        .iter()
        .all(|&t| tria.simplex_level(t).is_some_and(|l| l <= lm + 1))
}

/// Refines every marked simplex in turn. Marks that were already bisected by
/// an earlier closure are skipped; the result does not depend on the order.
pub fn refine_set<T: Scalar>(
    tria: &mut Triangulation<T>,
    marked: &[SimplexId],
    opts: &RefineOptions,
) -> Result<RefineLog, RefineError> {
    ensure_initialized(tria)?;
    for &m in marked {
        ensure_live(tria, m)?;
    }
    let mut log = RefineLog::default();
    for &m in marked {
        if tria.is_live(m) {
            log.absorb(refine(tria, m, opts)?);
        }
    }
    Ok(log)
}

/// Bisects one simplex without closure. Returns the bisection vertex and the
/// children.
pub fn bisect_simplex<T: Scalar>(
    tria: &mut Triangulation<T>,
    id: SimplexId,
) -> Result<(VertexId, [SimplexId; 2]), RefineError> {
    ensure_initialized(tria)?;
    ensure_live(tria, id)?;
    let e = bisection::bisection_edge(tria, id)?;
    let gen = new_vertex_gen(tria, id, e)?;
    let (mid, _) = tria.midpoint_vertex(e, Some(gen));
    let kids = bisection::children_of(tria, id, mid)?;
    Ok((mid, tria.split(id, kids)))
}

/// `rounds` uniform full refinements: `rounds * n` sweeps, each bisecting
/// every live simplex once. The mesh is conforming after every full round
/// and grows by `2^n` per round.
pub fn uniform_refine<T: Scalar>(
    tria: &mut Triangulation<T>,
    rounds: usize,
) -> Result<(), RefineError> {
    ensure_initialized(tria)?;
    for _ in 0..rounds * tria.dim() {
        let ids: Vec<SimplexId> = tria.live_ids().collect();
        for id in ids {
            bisect_simplex(tria, id)?;
        }
    }
    Ok(())
}

/// Live simplices whose closure contains `p`, ascending.
pub fn point_mark<T: Scalar>(
    tria: &Triangulation<T>,
    p: &[T],
) -> Result<Vec<SimplexId>, RefineError> {
    let n = tria.dim();
    if p.len() != n {
        return Err(RefineError::PointDimension {
            got: p.len(),
            expected: n,
        });
    }
    let tol = T::lit(T::BARY_TOL);
    let hits: Vec<SimplexId> = tria
        .live_ids()
        .filter(|&id| {
            crate::conformity::barycentric(tria, tria.simplex(id).vertices(), p)
                .is_some_and(|b| b.iter().all(|&x| x >= -tol))
        })
        .collect();
    if hits.is_empty() {
        Err(RefineError::PointOutside)
    } else {
        Ok(hits)
    }
}
