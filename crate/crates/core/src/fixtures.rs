//! Bundled example meshes and random mesh generators.
//!
//! The same meshes ship as JSON under `crates/core/fixtures/`; a test checks
//! that the files match these builders.

use crate::coloring::ColorMap;
use crate::mesh::Triangulation;
use crate::rng::Lcg;
use crate::Scalar;

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "kuhn2d",
    "kuhn3d",
    "kuhn4d",
    "pentagon_fan",
    "fichera",
    "strip",
    "hanging",
];

fn build<T: Scalar>(dim: usize, pts: &[Vec<f64>], cells: &[Vec<usize>]) -> Triangulation<T> {
    let pts: Vec<Vec<T>> = pts
        .iter()
        .map(|p| p.iter().map(|&x| T::lit(x)).collect())
        .collect();
    Triangulation::new(dim, &pts, cells).expect("fixture is valid")
}

/// Every permutation of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Unit square split along the diagonal from (0,0) to (1,1).
pub fn square<T: Scalar>() -> Triangulation<T> {
    let pts = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
    ];
    build(2, &pts, &[vec![0, 1, 2], vec![0, 2, 3]])
}

/// Unit n-cube split into its n! Kuhn simplices. Vertex `i` is the corner
/// whose coordinate `k` is bit `k` of `i`.
pub fn kuhn_cube<T: Scalar>(n: usize) -> Triangulation<T> {
    let pts: Vec<Vec<f64>> = (0..1usize << n)
        .map(|i| (0..n).map(|k| ((i >> k) & 1) as f64).collect())
        .collect();
    let cells: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .map(|p| {
            let mut cell = vec![0usize];
            let mut cur = 0usize;
            for k in p {
                cur |= 1 << k;
                cell.push(cur);
            }
            cell
        })
        .collect();
    build(n, &pts, &cells)
}

/// The Kuhn simplex `[0, e_1, e_1 + e_2, ...]` on its own.
pub fn single_kuhn_simplex<T: Scalar>(n: usize) -> Triangulation<T> {
    let pts: Vec<Vec<f64>> = (0..=n)
        .map(|k| (0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect())
        .collect();
    build(n, &pts, &[(0..=n).collect()])
}

/// A single simplex with the given vertex coordinates.
pub fn single_simplex<T: Scalar>(
    pts: &[Vec<T>],
) -> Result<Triangulation<T>, crate::mesh::MeshError> {
    let n = pts.len().saturating_sub(1);
    Triangulation::new(n, pts, &[(0..=n).collect()])
}

/// Hub at the origin surrounded by five triangles; not 3-colorable.
pub fn pentagon_fan<T: Scalar>() -> Triangulation<T> {
    let mut pts = vec![vec![0.0, 0.0]];
    for k in 0..5 {
        let a = std::f64::consts::TAU * k as f64 / 5.0;
        pts.push(vec![a.cos(), a.sin()]);
    }
    let cells: Vec<Vec<usize>> = (0..5).map(|k| vec![0, 1 + k, 1 + (k + 1) % 5]).collect();
    build(2, &pts, &cells)
}

/// Kuhn triangulations of the unit cubes of `[-1, 1]^n` at the given
/// lower-corner offsets; vertices are numbered in order of first use.
fn kuhn_cubes_at(n: usize, offsets: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<usize>>) {
    let mut index: std::collections::HashMap<Vec<i64>, usize> = std::collections::HashMap::new();
    let mut pts: Vec<Vec<i64>> = Vec::new();
    let mut cells = Vec::new();
    let perms = permutations(n);
    for o in offsets {
        for p in &perms {
            let mut cur = o.clone();
            let mut cell = Vec::with_capacity(n + 1);
            let mut add = |x: &Vec<i64>| {
                *index.entry(x.clone()).or_insert_with(|| {
                    pts.push(x.clone());
                    pts.len() - 1
                })
            };
            cell.push(add(&cur));
            for &k in p {
                cur[k] += 1;
                cell.push(add(&cur));
            }
            cells.push(cell);
        }
    }
    (pts, cells)
}

fn fichera_lattice() -> (Vec<Vec<i64>>, Vec<Vec<usize>>) {
    let mut offsets = Vec::new();
    for z in [-1, 0] {
        for y in [-1, 0] {
            for x in [-1, 0] {
                if !(x == 0 && y == 0 && z == 0) {
                    offsets.push(vec![x, y, z]);
                }
            }
        }
    }
    kuhn_cubes_at(3, &offsets)
}

/// Fichera corner `[-1,1]^3 \ (0,1]^3`: seven Kuhn cubes, 42 tetrahedra.
pub fn fichera<T: Scalar>() -> Triangulation<T> {
    let (pts, cells) = fichera_lattice();
    let pts: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| p.iter().map(|&x| x as f64).collect())
        .collect();
    build(3, &pts, &cells)
}

/// Coloring of a lattice vertex `x` that reproduces the Kuhn tagging:
/// `(x_1 + ... + x_n + n) mod (n + 1)`, so the cube origin gets color `n`.
pub fn kuhn_lattice_color(x: &[i64]) -> u32 {
    let n = x.len() as i64;
    (x.iter().sum::<i64>() + n).rem_euclid(n + 1) as u32
}

/// Hand-made coloring of [`fichera`] consistent with the Kuhn cube coloring.
pub fn fichera_manual_coloring() -> ColorMap {
    let (pts, _) = fichera_lattice();
    ColorMap::new(pts.iter().map(|p| kuhn_lattice_color(p)).collect())
}

/// Same coloring for [`kuhn_cube`].
pub fn kuhn_manual_coloring(n: usize) -> ColorMap {
    ColorMap::new(
        (0..1i64 << n)
            .map(|i| kuhn_lattice_color(&(0..n).map(|k| (i >> k) & 1).collect::<Vec<_>>()))
            .collect(),
    )
}

/// Ten sliver-ish triangles in a row with irregular spacing.
pub fn strip<T: Scalar>() -> Triangulation<T> {
    let bottom = [0.0, 1.1, 2.6, 4.5, 6.8, 9.5];
    let top = [0.5, 1.8, 3.5, 5.6, 8.1, 11.0];
    let mut pts: Vec<Vec<f64>> = bottom.iter().map(|&x| vec![x, 0.0]).collect();
    pts.extend(top.iter().map(|&x| vec![x, 0.866]));
    let t = |i: usize| 6 + i;
    let mut cells = Vec::new();
    for i in 0..5 {
        cells.push(vec![i, i + 1, t(i)]);
        cells.push(vec![i + 1, t(i + 1), t(i)]);
    }
    build(2, &pts, &cells)
}

/// Triangle `[a, b, c]` facing `[a, m, d]` and `[m, b, d]` with `m` the
/// midpoint of `ab`: a hanging node.
pub fn hanging<T: Scalar>() -> Triangulation<T> {
    let pts = vec![
        vec![0.0, 0.0],
        vec![2.0, 0.0],
        vec![1.0, 1.0],
        vec![1.0, -1.0],
        vec![1.0, 0.0],
    ];
    build(2, &pts, &[vec![0, 1, 2], vec![0, 4, 3], vec![4, 1, 3]])
}

/// Looks a bundled mesh up by name.
pub fn by_name<T: Scalar>(name: &str) -> Option<Triangulation<T>> {
    Some(match name {
        "kuhn2d" | "square" => square(),
        "kuhn3d" => kuhn_cube(3),
        "kuhn4d" => kuhn_cube(4),
        "pentagon_fan" => pentagon_fan(),
        "fichera" => fichera(),
        "strip" => strip(),
        "hanging" => hanging(),
        _ => return None,
    })
}

/// Drops vertices not used by any cell and relabels the rest randomly.
fn compact_and_shuffle(
    pts: Vec<Vec<f64>>,
    mut cells: Vec<Vec<usize>>,
    rng: &mut Lcg,
) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let mut used = vec![false; pts.len()];
    for c in &cells {
        for &i in c {
            used[i] = true;
        }
    }
    let kept: Vec<usize> = (0..pts.len()).filter(|&i| used[i]).collect();
    let mut labels: Vec<usize> = (0..kept.len()).collect();
    rng.shuffle(&mut labels);
    let mut map = vec![usize::MAX; pts.len()];
    let mut out = vec![Vec::new(); kept.len()];
    for (k, &old) in kept.iter().enumerate() {
        map[old] = labels[k];
        out[labels[k]] = pts[old].clone();
    }
    for c in &mut cells {
        for i in c.iter_mut() {
            *i = map[*i];
        }
    }
    rng.shuffle(&mut cells);
    (out, cells)
}

/// Random conforming 2D mesh: a jittered `nx x ny` grid, each quad split
/// along a random diagonal, with some quads removed (at least one kept).
pub fn random_mesh_2d<T: Scalar>(rng: &mut Lcg, nx: usize, ny: usize) -> Triangulation<T> {
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut pts = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            pts.push(vec![
                i as f64 + rng.range(-0.2, 0.2),
                j as f64 + rng.range(-0.2, 0.2),
            ]);
        }
    }
    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if nx * ny > 1 && rng.below(5) == 0 && !(i == 0 && j == 0) {
                continue;
            }
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if rng.below(2) == 0 {
                cells.push(vec![a, b, c]);
                cells.push(vec![a, c, d]);
            } else {
                cells.push(vec![a, b, d]);
                cells.push(vec![b, c, d]);
            }
        }
    }
    let (pts, cells) = compact_and_shuffle(pts, cells, rng);
    build(2, &pts, &cells)
}

/// Random conforming 3D mesh: a jittered grid of Kuhn-split cubes with
/// some cubes removed (at least one kept).
pub fn random_mesh_3d<T: Scalar>(
    rng: &mut Lcg,
    nx: usize,
    ny: usize,
    nz: usize,
) -> Triangulation<T> {
    let mut offsets = Vec::new();
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                if offsets.is_empty() || rng.below(5) != 0 {
                    offsets.push(vec![x, y, z]);
                }
            }
        }
    }
    let (lattice, cells) = kuhn_cubes_at(3, &offsets);
    let pts: Vec<Vec<f64>> = lattice
        .iter()
        .map(|p| {
            p.iter()
                .map(|&x| x as f64 + rng.range(-0.15, 0.15))
                .collect()
        })
        .collect();
    let (pts, cells) = compact_and_shuffle(pts, cells, rng);
    build(3, &pts, &cells)
}

/// Random non-degenerate simplex with vertices in `[-1, 1]^n`.
pub fn random_simplex_coords(rng: &mut Lcg, n: usize) -> Vec<Vec<f64>> {
    loop {
        let pts: Vec<Vec<f64>> = (0..=n)
            .map(|_| (0..n).map(|_| rng.range(-1.0, 1.0)).collect())
            .collect();
        if let Ok(t) = single_simplex::<f64>(&pts) {
            let id = crate::mesh::SimplexId(0);
            if t.volume(id) / t.diameter(id).powi(n as i32) > 1e-3 {
                return pts;
            }
        }
    }
}
