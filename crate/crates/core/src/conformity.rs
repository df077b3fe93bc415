//! Conformity checker.
//!
//! A mesh is conforming when any two simplices meet in a common subsimplex or
//! not at all. Three kinds of defect are reported:
//!
//! * a facet shared by more than two simplices,
//! * a hanging vertex: a mesh vertex inside a closed simplex it is not a vertex of,
//! * mismatched facets: two facets with one owner on each side, lying in the
//!   same hyperplane and overlapping in their relative interiors without being
//!   the same facet.
//!
//! Candidate pairs come from a bounding-box tree, so the cost is close to
//! `O(m log m)` in the mesh size even for strongly graded meshes. Hanging
//! vertices are looked for only on unmatched facets, which finds all of them
//! unless simplices overlap inside a closed vertex star.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::mesh::{SimplexId, Triangulation, VertexId};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    OverSharedFacet {
        facet: Vec<VertexId>,
        simplices: Vec<SimplexId>,
    },
    HangingVertex {
        vertex: VertexId,
        simplex: SimplexId,
    },
    FacetMismatch {
        first: SimplexId,
        second: SimplexId,
        first_facet: Vec<VertexId>,
        second_facet: Vec<VertexId>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformityReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Barycentric coordinates of `p` with respect to the simplex `verts`, or
/// `None` if the simplex is degenerate.
pub fn barycentric<T: Scalar>(
    tria: &Triangulation<T>,
    verts: &[VertexId],
    p: &[T],
) -> Option<Vec<T>> {
    let n = tria.dim();
    let v0 = tria.coords(verts[0]);
    let mut m = Matrix::zeros(n);
    for (k, &v) in verts[1..].iter().enumerate() {
        let c = tria.coords(v);
        for i in 0..n {
            m[(i, k)] = c[i] - v0[i];
        }
    }
    let rhs: Vec<T> = (0..n).map(|i| p[i] - v0[i]).collect();
    let x = m.solve(&rhs)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one() - x.iter().copied().sum::<T>());
    out.extend(x);
    Some(out)
}

/// Static bounding-volume hierarchy over axis-aligned boxes. Boxes are sorted
/// along a Morton curve through their centres and the sorted run is halved
/// recursively, so nearby boxes share leaves even in strongly graded meshes.
///
/// Input boxes are flat: box `k` is `lo = b[2nk..2nk+n]`, `hi = b[2nk+n..2nk+2n]`.
struct BoxTree {
    dim: usize,
    /// Original index of the box in each sorted slot.
    items: Vec<usize>,
    /// Boxes in sorted order.
    sorted: Vec<f64>,
    /// Slot of each original box.
    slot: Vec<usize>,
    bounds: Vec<f64>,
    nodes: Vec<NodeKind>,
}

#[derive(Clone, Copy)]
enum NodeKind {
    /// Range of sorted slots.
    Leaf(usize, usize),
    Inner(usize, usize),
}

const LEAF_SIZE: usize = 8;

#[inline]
fn overlap(alo: &[f64], ahi: &[f64], blo: &[f64], bhi: &[f64]) -> bool {
    let d = alo.len();
    let (ahi, blo, bhi) = (&ahi[..d], &blo[..d], &bhi[..d]);
    for i in 0..d {
        if alo[i] > bhi[i] || blo[i] > ahi[i] {
            return false;
        }
    }
    true
}

/// Interleaves the bits of quantized coordinates, most significant first.
fn morton(q: &[u64], bits: u32) -> u64 {
    let mut code = 0u64;
    for b in (0..bits).rev() {
        for &x in q {
            code = (code << 1) | ((x >> b) & 1);
        }
    }
    code
}

impl BoxTree {
    fn new(dim: usize, boxes: &[f64]) -> Self {
        let w = 2 * dim;
        let count = if dim == 0 { 0 } else { boxes.len() / w };
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for k in 0..count {
            for i in 0..dim {
                let c = boxes[w * k + i] + boxes[w * k + dim + i];
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        let bits = (63 / dim.max(1)).min(21) as u32;
        let cells = ((1u64 << bits) - 1) as f64;
        let mut q = vec![0u64; dim];
        let mut keys: Vec<(u64, usize)> = (0..count)
            .map(|k| {
                for i in 0..dim {
                    let c = boxes[w * k + i] + boxes[w * k + dim + i];
                    let span = hi[i] - lo[i];
                    q[i] = if span > 0.0 {
                        ((c - lo[i]) / span * cells) as u64
                    } else {
                        0
                    };
                }
                (morton(&q, bits), k)
            })
            .collect();
        keys.sort_unstable_by_key(|e| e.0);
        let items: Vec<usize> = keys.iter().map(|&(_, k)| k).collect();
        let mut sorted = Vec::with_capacity(boxes.len());
        for &k in &items {
            sorted.extend_from_slice(&boxes[w * k..w * (k + 1)]);
        }
        let mut slot = vec![0; count];
        for (pos, &k) in items.iter().enumerate() {
            slot[k] = pos;
        }
        let mut t = Self {
            dim,
            items,
            sorted,
            slot,
            bounds: Vec::new(),
            nodes: Vec::new(),
        };
        if count > 0 {
            t.build(0, count);
        }
        t
    }

    /// Box in sorted slot `pos`.
    #[inline]
    fn at(&self, pos: usize) -> (&[f64], &[f64]) {
        let d = self.dim;
        let b = &self.sorted[2 * d * pos..2 * d * (pos + 1)];
        (&b[..d], &b[d..])
    }

    /// Box with original index `k`.
    fn get(&self, k: usize) -> (&[f64], &[f64]) {
        self.at(self.slot[k])
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let d = self.dim;
        let id = self.nodes.len();
        self.nodes.push(NodeKind::Leaf(start, end));
        let at = self.bounds.len();
        self.bounds.extend((0..2 * d).map(|i| {
            if i < d {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        }));
        if end - start <= LEAF_SIZE {
            for pos in start..end {
                let b = &self.sorted[2 * d * pos..2 * d * (pos + 1)];
                for i in 0..d {
                    self.bounds[at + i] = self.bounds[at + i].min(b[i]);
                    self.bounds[at + d + i] = self.bounds[at + d + i].max(b[d + i]);
                }
            }
        } else {
            let mid = start + (end - start) / 2;
            let left = self.build(start, mid);
            let right = self.build(mid, end);
            self.nodes[id] = NodeKind::Inner(left, right);
            for i in 0..d {
                let (l, r) = (2 * d * left, 2 * d * right);
                self.bounds[at + i] = self.bounds[l + i].min(self.bounds[r + i]);
                self.bounds[at + d + i] = self.bounds[l + d + i].max(self.bounds[r + d + i]);
            }
        }
        id
    }

    /// Calls `f(position, index)` for every box overlapping `[lo, hi]`, where
    /// `position` is the box's slot in `items`. No particular order.
    fn for_each(
        &self,
        lo: &[f64],
        hi: &[f64],
        stack: &mut Vec<usize>,
        mut f: impl FnMut(usize, usize),
    ) {
        if self.nodes.is_empty() {
            return;
        }
        let d = self.dim;
        stack.clear();
        stack.push(0);
        while let Some(i) = stack.pop() {
            if !overlap(
                &self.bounds[2 * d * i..2 * d * i + d],
                &self.bounds[2 * d * i + d..2 * d * (i + 1)],
                lo,
                hi,
            ) {
                continue;
            }
            match self.nodes[i] {
                NodeKind::Leaf(a, b) => {
                    for pos in a..b {
                        let (bl, bh) = self.at(pos);
                        if overlap(bl, bh, lo, hi) {
                            f(pos, self.items[pos]);
                        }
                    }
                }
                NodeKind::Inner(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
    }

    /// Indices of boxes overlapping `[lo, hi]`, ascending.
    fn query(&self, lo: &[f64], hi: &[f64], stack: &mut Vec<usize>) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each(lo, hi, stack, |_, k| out.push(k));
        out.sort_unstable();
        out
    }
}

/// Appends the padded bounding box of `points` to a flat box list.
fn push_bbox<'a>(
    out: &mut Vec<f64>,
    dim: usize,
    points: impl Iterator<Item = &'a [f64]> + Clone,
    pad: f64,
) {
    for i in 0..dim {
        out.push(points.clone().map(|p| p[i]).fold(f64::INFINITY, f64::min) - pad);
    }
    for i in 0..dim {
        out.push(
            points
                .clone()
                .map(|p| p[i])
                .fold(f64::NEG_INFINITY, f64::max)
                + pad,
        );
    }
}

/// Orthonormal basis of the affine hull of `pts` (k points give k-1 vectors).
fn orthonormal_basis(pts: &[&[f64]]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in &pts[1..] {
        let mut v: Vec<f64> = p.iter().zip(pts[0]).map(|(a, b)| a - b).collect();
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 0.0 {
            basis.push(v.into_iter().map(|x| x / nrm).collect());
        }
    }
    basis
}

/// Largest `t` such that a common point of both facets has every barycentric
/// weight at least `t`, after projecting onto the hyperplane basis. Positive
/// means the relative interiors overlap.
fn interior_overlap(f: &[&[f64]], g: &[&[f64]], origin: &[f64], basis: &[Vec<f64>]) -> f64 {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let proj = |p: &&[f64]| -> Vec<f64> {
        basis
            .iter()
            .map(|b| {
                b.iter()
                    .zip(*p)
                    .zip(origin)
                    .map(|((bi, pi), oi)| bi * (pi - oi))
                    .sum()
            })
            .collect()
    };
    let fp: Vec<Vec<f64>> = f.iter().map(proj).collect();
    let gp: Vec<Vec<f64>> = g.iter().map(proj).collect();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let t = lp.add_var(1.0, (-1.0, 1.0));
    let lam: Vec<_> = fp.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let mu: Vec<_> = gp.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    lp.add_constraint(
        lam.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(),
        ComparisonOp::Eq,
        1.0,
    );
    lp.add_constraint(
        mu.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(),
        ComparisonOp::Eq,
        1.0,
    );
    for &v in lam.iter().chain(&mu) {
        lp.add_constraint([(v, 1.0), (t, -1.0)], ComparisonOp::Ge, 0.0);
    }
    for d in 0..basis.len() {
        let mut row: Vec<(minilp::Variable, f64)> = Vec::new();
        row.extend(lam.iter().zip(&fp).map(|(&v, p)| (v, p[d])));
        row.extend(mu.iter().zip(&gp).map(|(&v, p)| (v, -p[d])));
        lp.add_constraint(row, ComparisonOp::Eq, 0.0);
    }
    lp.solve().map_or(-1.0, |s| s.objective())
}

struct Facet {
    owner: SimplexId,
    verts: Vec<VertexId>,
    opposite: VertexId,
}

fn facet_hash(verts: &[VertexId], skip: usize) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for (i, v) in verts.iter().enumerate() {
        if i != skip {
            h = (h ^ v.index() as u64)
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .rotate_left(29);
        }
    }
    h
}

/// Inverts the row-major `n x n` matrix `a` into `inv` by Gauss-Jordan
/// elimination with partial pivoting. `a` is destroyed. False if singular.
fn invert_into(a: &mut [f64], inv: &mut [f64], n: usize) -> bool {
    // closed forms for the common dimensions
    if n == 2 {
        let det = a[0] * a[3] - a[1] * a[2];
        if det == 0.0 {
            return false;
        }
        inv.copy_from_slice(&[a[3] / det, -a[1] / det, -a[2] / det, a[0] / det]);
        return true;
    }
    if n == 3 {
        let c = [
            a[4] * a[8] - a[5] * a[7],
            a[5] * a[6] - a[3] * a[8],
            a[3] * a[7] - a[4] * a[6],
        ];
        let det = a[0] * c[0] + a[1] * c[1] + a[2] * c[2];
        if det == 0.0 {
            return false;
        }
        let r = 1.0 / det;
        inv.copy_from_slice(&[
            c[0] * r,
            (a[2] * a[7] - a[1] * a[8]) * r,
            (a[1] * a[5] - a[2] * a[4]) * r,
            c[1] * r,
            (a[0] * a[8] - a[2] * a[6]) * r,
            (a[2] * a[3] - a[0] * a[5]) * r,
            c[2] * r,
            (a[1] * a[6] - a[0] * a[7]) * r,
            (a[0] * a[4] - a[1] * a[3]) * r,
        ]);
        return true;
    }
    inv.fill(0.0);
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
            .unwrap_or(col);
        if a[piv * n + col] == 0.0 {
            return false;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
                inv.swap(piv * n + j, col * n + j);
            }
        }
        let d = a[col * n + col];
        for j in 0..n {
            a[col * n + j] /= d;
            inv[col * n + j] /= d;
        }
        for r in 0..n {
            let f = a[r * n + col];
            if r != col && f != 0.0 {
                for j in 0..n {
                    a[r * n + j] -= f * a[col * n + j];
                    inv[r * n + j] -= f * inv[col * n + j];
                }
            }
        }
    }
    true
}

/// Checks that every pair of live simplices meets in a shared subsimplex.
pub fn check_conformity<T: Scalar>(tria: &Triangulation<T>) -> ConformityReport {
    let n = tria.dim();
    let xs: Vec<f64> = tria
        .vertex_ids()
        .flat_map(|v| {
            tria.coords(v)
                .iter()
                .map(|x| x.to_f64().unwrap_or(f64::NAN))
        })
        .collect();
    let pt = |v: VertexId| &xs[v.index() * n..(v.index() + 1) * n];
    let live: Vec<SimplexId> = tria.live_ids().collect();
    let mut violations = Vec::new();

    // facet multiplicities: group facets by vertex set
    let w = n + 1;
    let corners_live: Vec<VertexId> = live
        .iter()
        .flat_map(|&id| tria.simplex(id).vertices().iter().copied())
        .collect();
    let mut sorted_verts = corners_live.clone();
    for chunk in sorted_verts.chunks_mut(w) {
        chunk.sort_unstable();
    }
    let facet_of = |k: usize, skip: usize| {
        sorted_verts[k * w..(k + 1) * w]
            .iter()
            .enumerate()
            .filter(move |&(i, _)| i != skip)
            .map(|(_, &v)| v)
    };
    // bucket facets by hash with a counting sort; each bucket is tiny
    let m = live.len() * w;
    let hashes: Vec<u64> = (0..m)
        .map(|f| facet_hash(&sorted_verts[f - f % w..f - f % w + w], f % w))
        .collect();
    let mask = m.next_power_of_two() as u64 - 1;
    let mut start = vec![0usize; mask as usize + 2];
    for &h in &hashes {
        start[(h & mask) as usize + 1] += 1;
    }
    for b in 1..start.len() {
        start[b] += start[b - 1];
    }
    let mut fill = start.clone();
    let mut order = vec![0usize; m];
    for (f, &h) in hashes.iter().enumerate() {
        let b = (h & mask) as usize;
        order[fill[b]] = f;
        fill[b] += 1;
    }
    let mut single: Vec<Facet> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for b in 0..=mask as usize {
        let bucket = &mut order[start[b]..start[b + 1]];
        if bucket.len() == 1 {
            let (k, j) = (bucket[0] / w, bucket[0] % w);
            single.push(Facet {
                owner: live[k],
                verts: facet_of(k, j).collect(),
                opposite: sorted_verts[k * w + j],
            });
            continue;
        }
        if bucket.len() == 2
            && facet_of(bucket[0] / w, bucket[0] % w).eq(facet_of(bucket[1] / w, bucket[1] % w))
        {
            continue;
        }
        classes.clear();
        for &f in bucket.iter() {
            let (k, j) = (f / w, f % w);
            match classes
                .iter_mut()
                .find(|c| facet_of(c[0] / w, c[0] % w).eq(facet_of(k, j)))
            {
                Some(c) => c.push(f),
                None => classes.push(vec![f]),
            }
        }
        for c in &classes {
            let (k, j) = (c[0] / w, c[0] % w);
            if c.len() == 1 {
                single.push(Facet {
                    owner: live[k],
                    verts: facet_of(k, j).collect(),
                    opposite: sorted_verts[k * w + j],
                });
            } else if c.len() > 2 {
                let mut simplices: Vec<SimplexId> = c.iter().map(|&f| live[f / w]).collect();
                simplices.sort_unstable();
                violations.push(Violation::OverSharedFacet {
                    facet: facet_of(k, j).collect(),
                    simplices,
                });
            }
        }
    }
    violations.sort_by(|a, b| match (a, b) {
        (
            Violation::OverSharedFacet { facet: f, .. },
            Violation::OverSharedFacet { facet: g, .. },
        ) => f.cmp(g),
        _ => std::cmp::Ordering::Equal,
    });

    // hanging vertices
    let diam = |verts: &[VertexId]| -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                d = d.max(crate::linalg::dist(pt(verts[i]), pt(verts[j])));
            }
        }
        d
    };
    let bary_tol = T::BARY_TOL.max(1e-12);
    let mut boxes = Vec::with_capacity(live.len() * 2 * n);
    let mut width = 0.0;
    for verts in corners_live.chunks(w) {
        let at = boxes.len();
        boxes.extend_from_slice(pt(verts[0]));
        boxes.extend_from_slice(pt(verts[0]));
        for &v in &verts[1..] {
            for (i, &x) in pt(v).iter().enumerate() {
                boxes[at + i] = boxes[at + i].min(x);
                boxes[at + n + i] = boxes[at + n + i].max(x);
            }
        }
        width += (0..n)
            .map(|i| boxes[at + n + i] - boxes[at + i])
            .fold(0.0, f64::max);
    }
    // tolerance pad relative to the mean box width
    let pad = if live.is_empty() {
        0.0
    } else {
        1e-9 * width / live.len() as f64
    };
    for b in boxes.chunks_mut(2 * n) {
        b[..n].iter_mut().for_each(|x| *x -= pad);
        b[n..].iter_mut().for_each(|x| *x += pad);
    }
    let tree = BoxTree::new(n, &boxes);
    // per-simplex data in tree order; affine inverse maps are filled on first
    // use, `state` is 0 unknown, 1 ok, 2 degenerate
    let corners: Vec<VertexId> = tree
        .items
        .iter()
        .flat_map(|&k| corners_live[k * w..(k + 1) * w].iter().copied())
        .collect();
    let base: Vec<f64> = (0..live.len())
        .flat_map(|k| pt(corners[k * (n + 1)]).iter().copied())
        .collect();
    let mut state = vec![0u8; live.len()];
    let mut inverses = vec![0.0; live.len() * n * n];
    // Only vertices on unmatched facets can hang: a facet through `v` as a
    // vertex pairs only with another simplex having `v` as a vertex, so the
    // star of `v` cannot border a simplex passing through `v` across matched
    // facets. Visit them in tree order for locality.
    let mut seen = vec![true; tria.num_vertices()];
    for f in &single {
        for &v in &f.verts {
            seen[v.index()] = false;
        }
    }
    let mut order = Vec::new();
    for &v in &corners {
        if !std::mem::replace(&mut seen[v.index()], true) {
            order.push(v);
        }
    }
    let mut stack = Vec::new();
    let mut rel = vec![0.0; n];
    let mut scratch = vec![0.0; n * n];
    let mut hanging = Vec::new();
    for v in order {
        let p = pt(v);
        tree.for_each(p, p, &mut stack, |k, orig| {
            let verts = &corners[k * (n + 1)..(k + 1) * (n + 1)];
            if verts.contains(&v) {
                return;
            }
            if state[k] == 0 {
                let p0 = pt(verts[0]);
                for c in 0..n {
                    let q = pt(verts[c + 1]);
                    for i in 0..n {
                        scratch[i * n + c] = q[i] - p0[i];
                    }
                }
                let ok = invert_into(&mut scratch, &mut inverses[k * n * n..(k + 1) * n * n], n);
                state[k] = if ok { 1 } else { 2 };
            }
            if state[k] != 1 {
                return;
            }
            let p0 = &base[k * n..(k + 1) * n];
            for i in 0..n {
                rel[i] = p[i] - p0[i];
            }
            let inv = &inverses[k * n * n..(k + 1) * n * n];
            let mut l0 = 1.0;
            for i in 0..n {
                let li: f64 = (0..n).map(|j| inv[i * n + j] * rel[j]).sum();
                if li < -bary_tol {
                    return;
                }
                l0 -= li;
            }
            if l0 >= -bary_tol {
                hanging.push((v, live[orig]));
            }
        });
    }
    hanging.sort_unstable();
    violations.extend(
        hanging
            .into_iter()
            .map(|(vertex, simplex)| Violation::HangingVertex { vertex, simplex }),
    );

    // mismatched facets
    single.sort_by(|a, b| a.verts.cmp(&b.verts));
    let fcoords: Vec<Vec<&[f64]>> = single
        .iter()
        .map(|f| f.verts.iter().map(|&v| pt(v)).collect())
        .collect();
    let mut fboxes = Vec::with_capacity(single.len() * 2 * n);
    for c in &fcoords {
        push_bbox(&mut fboxes, n, c.iter().copied(), pad);
    }
    let ftree = BoxTree::new(n, &fboxes);
    let plane_tol = T::PLANE_TOL;
    for (i, f) in single.iter().enumerate() {
        let basis = orthonormal_basis(&fcoords[i]);
        if basis.len() + 1 != n {
            continue;
        }
        let origin = fcoords[i][0];
        // unit normal pointing towards the owner's opposite vertex
        let own_opp = pt(f.opposite);
        let mut normal: Vec<f64> = own_opp.iter().zip(origin).map(|(a, b)| a - b).collect();
        for b in &basis {
            let d: f64 = normal.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in normal.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let len = crate::linalg::norm(&normal);
        if len == 0.0 {
            continue;
        }
        normal.iter_mut().for_each(|x| *x /= len);
        let signed = |p: &[f64]| -> f64 {
            p.iter()
                .zip(origin)
                .zip(&normal)
                .map(|((a, b), c)| (a - b) * c)
                .sum()
        };
        let scale = diam(&f.verts);
        for j in {
            let (lo, hi) = ftree.get(i);
            ftree.query(lo, hi, &mut stack)
        } {
            if j <= i || single[j].owner == f.owner {
                continue;
            }
            if single[j]
                .verts
                .iter()
                .any(|&v| signed(pt(v)).abs() > plane_tol * scale)
            {
                continue;
            }
            if signed(own_opp) * signed(pt(single[j].opposite)) >= 0.0 {
                continue;
            }
            if interior_overlap(&fcoords[i], &fcoords[j], origin, &basis) > 1e-9 {
                violations.push(Violation::FacetMismatch {
                    first: f.owner,
                    second: single[j].owner,
                    first_facet: f.verts.clone(),
                    second_facet: single[j].verts.clone(),
                });
            }
        }
    }
    ConformityReport {
        ok: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, Mesh};

    #[test]
    fn shared_edge_is_fine() {
        assert!(check_conformity(&fixtures::square::<f64>()).ok);
        assert!(check_conformity(&fixtures::single_kuhn_simplex::<f64>(3)).ok);
        assert!(check_conformity(&fixtures::fichera::<f64>()).ok);
        assert!(check_conformity(&fixtures::kuhn_cube::<f64>(4)).ok);
        assert!(check_conformity(&fixtures::kuhn_cube::<f32>(3)).ok);
    }

    #[test]
    fn hanging_node_is_reported() {
        let t: Mesh = fixtures::hanging();
        let r = check_conformity(&t);
        assert!(!r.ok);
        assert!(r.violations.contains(&Violation::HangingVertex {
            vertex: VertexId(4),
            simplex: SimplexId(0)
        }));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::FacetMismatch { .. })));
    }

    #[test]
    fn crossing_facets_without_hanging_vertices() {
        // two tetrahedra whose shared plane z = 0 holds two triangles forming
        // a star: no vertex of one lies in the other
        let pts = vec![
            vec![0.0, 1.0, 0.0],
            vec![-0.866, -0.5, 0.0],
            vec![0.866, -0.5, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.866, 0.5, 0.0],
            vec![-0.866, 0.5, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0],
        ];
        let t: Mesh = Triangulation::new(3, &pts, &[vec![0, 1, 2, 6], vec![3, 4, 5, 7]]).unwrap();
        let r = check_conformity(&t);
        assert!(!r.ok);
        assert!(r
            .violations
            .iter()
            .all(|v| matches!(v, Violation::FacetMismatch { .. })));
    }

    #[test]
    fn over_shared_facet() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 1.0],
            vec![0.5, -1.0],
            vec![0.5, 2.0],
        ];
        let t: Mesh =
            Triangulation::new(2, &pts, &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]]).unwrap();
        let r = check_conformity(&t);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::OverSharedFacet { .. })));
    }

    #[test]
    fn barycentric_of_vertex() {
        let t: Mesh = fixtures::square();
        let b = barycentric(&t, t.simplex(SimplexId(0)).vertices(), &[1.0, 0.0]).unwrap();
        assert_eq!(b, vec![0.0, 1.0, 0.0]);
    }
}
