//! Mesh JSON and legacy VTK output.
//!
//! The JSON document is an object with keys in sorted order:
//!
//! ```json
//! {"ancestors":[0,0,1],"cells":[[0,1,2]],"colors":[0,1,2,null],"dim":2,
//!  "gens":[0,-1,-2,1],"tags":[2],"vertices":[[0,0],[1,0]]}
//! ```
//!
//! Only `dim`, `vertices` and `cells` are required. `colors` holds `null` for
//! vertices created by refinement; `tags` (one per cell) marks the cell order
//! as a tagged simplex; `gens` stores vertex generations; `ancestors` maps each
//! cell to the index of the initial cell it descends from. Floats are written
//! with 17 significant digits in `%g` style, so writing a loaded file
//! reproduces it byte for byte.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bisection::BisectionRule;
use crate::mesh::{MeshError, SimplexId, Triangulation, VertexList};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("field {field} has {got} entries, expected {expected}")]
    Length {
        field: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("{0}")]
    Invalid(String),
}

/// On-disk mesh document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancestors: Option<Vec<u32>>,
    pub cells: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<Option<u32>>>,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<Vec<Option<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<Vec<u8>>,
    pub vertices: Vec<Vec<f64>>,
}

impl MeshFile {
    /// Snapshot of the live cells of `tria`, in simplex id order.
    pub fn from_mesh<T: Scalar>(tria: &Triangulation<T>) -> Self {
        let vertices = tria
            .vertex_ids()
            .map(|v| {
                tria.coords(v)
                    .iter()
                    .map(|x| x.to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        let live: Vec<SimplexId> = tria.live_ids().collect();
        let cells = live
            .iter()
            .map(|&id| {
                tria.simplex(id)
                    .vertices()
                    .iter()
                    .map(|v| v.index())
                    .collect()
            })
            .collect();
        let colors: Vec<Option<u32>> = tria.vertex_ids().map(|v| tria.color(v)).collect();
        let gens: Vec<Option<i64>> = tria.vertex_ids().map(|v| tria.gen(v)).collect();
        let ancestors: Vec<u32> = live.iter().map(|&id| tria.simplex(id).ancestor()).collect();
        let trivial_ancestors = ancestors.iter().enumerate().all(|(i, &a)| a as usize == i);
        Self {
            ancestors: (!trivial_ancestors).then_some(ancestors),
            cells,
            colors: colors.iter().any(Option::is_some).then_some(colors),
            dim: tria.dim(),
            gens: gens.iter().any(Option::is_some).then_some(gens),
            tags: (tria.rule() == Some(BisectionRule::Maubach))
                .then(|| live.iter().map(|&id| tria.simplex(id).tag()).collect()),
            vertices,
        }
    }

    /// Builds the mesh, restoring colors, generations, tags and ancestors.
    pub fn to_mesh<T: Scalar>(&self) -> Result<Triangulation<T>, IoError> {
        let nv = self.vertices.len();
        let nc = self.cells.len();
        let check = |field, got, expected| {
            if got == expected {
                Ok(())
            } else {
                Err(IoError::Length {
                    field,
                    got,
                    expected,
                })
            }
        };
        if let Some(c) = &self.colors {
            check("colors", c.len(), nv)?;
        }
        if let Some(g) = &self.gens {
            check("gens", g.len(), nv)?;
            if self.colors.is_none() {
                return Err(IoError::Invalid("gens require colors".into()));
            }
        }
        if let Some(t) = &self.tags {
            check("tags", t.len(), nc)?;
            if self.gens.is_none() {
                return Err(IoError::Invalid("tags require gens".into()));
            }
            if let Some(&bad) = t.iter().find(|&&g| g == 0 || g as usize > self.dim) {
                return Err(IoError::Invalid(format!(
                    "tag {bad} outside 1..={}",
                    self.dim
                )));
            }
        }
        if let Some(a) = &self.ancestors {
            check("ancestors", a.len(), nc)?;
        }
        let pts: Vec<Vec<T>> = self
            .vertices
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&x| T::from_f64(x).unwrap_or_else(T::nan))
                    .collect()
            })
            .collect();
        let mut tria = Triangulation::new(self.dim, &pts, &self.cells)?;
        if let Some(colors) = &self.colors {
            let n = colors.iter().flatten().copied().max();
            tria.set_colors(colors.clone(), n);
        }
        if let Some(gens) = &self.gens {
            tria.set_gens(gens.clone());
            let ids: Vec<SimplexId> = tria.live_ids().collect();
            if let Some(tags) = &self.tags {
                for (id, &tag) in ids.iter().zip(tags) {
                    let verts: VertexList = tria.simplex(*id).vertices().iter().copied().collect();
                    tria.reorder_simplex(*id, verts, tag);
                }
                tria.set_rule(Some(BisectionRule::Maubach));
            } else {
                for &id in &ids {
                    crate::bisection::gen_sorted(&tria, id)
                        .map_err(|e| IoError::Invalid(e.to_string()))?;
                }
                tria.set_rule(Some(BisectionRule::Generation));
            }
        }
        if let Some(anc) = &self.ancestors {
            for (k, &a) in anc.iter().enumerate() {
                tria.set_ancestor(SimplexId(k as u32), a);
            }
        }
        Ok(tria)
    }

    pub fn from_json(s: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Canonical JSON text, newline terminated.
    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }
}

/// Serializes any value with `%.17g` floats and no whitespace.
pub fn to_canonical_json<S: Serialize>(value: &S) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17Formatter);
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("json is utf-8")
}

/// Compact JSON with floats printed like C's `%.17g`.
struct G17Formatter;

impl serde_json::ser::Formatter for G17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        writer.write_all(format_g17(value as f64).as_bytes())
    }
}

/// `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    let sign = if neg { "-" } else { "" };
    let strip = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if !(-4..17).contains(&exp) {
        let m = strip(format!("{}.{}", &digits[..1], &digits[1..]));
        format!(
            "{sign}{m}e{}{:02}",
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else if exp >= 0 {
        let e = exp as usize;
        let s = format!("{}.{}", &digits[..=e], &digits[e + 1..]);
        format!("{sign}{}", strip(s))
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}{}", strip(format!("0.{zeros}{digits}")))
    }
}

pub fn read_mesh<T: Scalar>(path: &Path) -> Result<Triangulation<T>, IoError> {
    MeshFile::from_json(&std::fs::read_to_string(path)?)?.to_mesh()
}

pub fn write_mesh<T: Scalar>(tria: &Triangulation<T>, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, MeshFile::from_mesh(tria).to_json())?;
    Ok(())
}

/// Live cells as sorted coordinate tuples (bit patterns), independent of
/// vertex and simplex numbering.
pub fn canonical_cells<T: Scalar>(tria: &Triangulation<T>) -> BTreeSet<Vec<Vec<u64>>> {
    tria.live_ids()
        .map(|id| {
            let mut c: Vec<Vec<u64>> = tria
                .simplex(id)
                .vertices()
                .iter()
                .map(|&v| {
                    tria.coords(v)
                        .iter()
                        .map(|x| x.to_f64().unwrap_or(f64::NAN).to_bits())
                        .collect()
                })
                .collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Coordinates of the vertices used by live cells, as bit patterns.
pub fn canonical_vertices<T: Scalar>(tria: &Triangulation<T>) -> BTreeSet<Vec<u64>> {
    canonical_cells(tria).into_iter().flatten().collect()
}

/// Legacy ASCII VTK unstructured grid. Triangles and tetrahedra are written as
/// cell types 5 and 10, segments as 3. For `n > 3` only the edge skeleton
/// (projected to the first three coordinates) is written.
pub fn write_vtk<T: Scalar, W: Write>(tria: &Triangulation<T>, mut w: W) -> io::Result<()> {
    let n = tria.dim();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "colorbisect mesh, dim {n}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", tria.num_vertices())?;
    for v in tria.vertex_ids() {
        let c = tria.coords(v);
        let xyz: Vec<String> = (0..3)
            .map(|i| {
                c.get(i).map_or("0".to_string(), |x| {
                    format_g17(x.to_f64().unwrap_or(f64::NAN))
                })
            })
            .collect();
        writeln!(w, "{}", xyz.join(" "))?;
    }
    let (cells, ctype): (Vec<Vec<usize>>, u8) = match n {
        1..=3 => (
            tria.live_ids()
                .map(|id| {
                    tria.simplex(id)
                        .vertices()
                        .iter()
                        .map(|v| v.index())
                        .collect()
                })
                .collect(),
            [3, 5, 10][n - 1],
        ),
        _ => {
            log::warn!("dimension {n} has no VTK cell type; writing the edge skeleton only");
            (
                tria.edges()
                    .into_iter()
                    .map(|e| vec![e.lo().index(), e.hi().index()])
                    .collect(),
                3,
            )
        }
    };
    let size: usize = cells.iter().map(|c| c.len() + 1).sum();
    writeln!(w, "CELLS {} {}", cells.len(), size)?;
    for c in &cells {
        let ids: Vec<String> = c.iter().map(|i| i.to_string()).collect();
        writeln!(w, "{} {}", c.len(), ids.join(" "))?;
    }
    writeln!(w, "CELL_TYPES {}", cells.len())?;
    for _ in &cells {
        writeln!(w, "{ctype}")?;
    }
    if n <= 3 && tria.n_colors().is_some() {
        writeln!(w, "CELL_DATA {}", cells.len())?;
        writeln!(w, "SCALARS level int 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for id in tria.live_ids() {
            writeln!(w, "{}", tria.simplex_level(id).unwrap_or(0))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisection::initialize;
    use crate::coloring::{greedy_color, ColorOrder};
    use crate::{fixtures, refine, Mesh, RefineOptions};

    #[test]
    fn g17_matches_printf() {
        // reference strings from C printf("%.17g")
        let cases = [
            (0.5, "0.5"),
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (0.866, "0.86599999999999999"),
            (0.0001, "0.0001"),
            (0.0, "0"),
            (2.0f64.sqrt(), "1.4142135623730951"),
            (1.0 / 3.0, "0.33333333333333331"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g17(x), s, "{x}");
        }
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let mut t: Mesh = fixtures::strip();
        let cm = greedy_color(&t, ColorOrder::Id);
        initialize(&mut t, &cm, BisectionRule::Maubach).unwrap();
        for k in 0..5 {
            let id = t.live_ids().nth(k).unwrap();
            refine(&mut t, id, &RefineOptions::default()).unwrap();
        }
        let s1 = MeshFile::from_mesh(&t).to_json();
        let back: Mesh = MeshFile::from_json(&s1).unwrap().to_mesh().unwrap();
        let s2 = MeshFile::from_mesh(&back).to_json();
        assert_eq!(s1, s2);
        assert_eq!(back.rule(), Some(BisectionRule::Maubach));
        assert_eq!(back.n_colors(), t.n_colors());
        assert!(s1.starts_with("{\"ancestors\":"));
    }

    #[test]
    fn plain_mesh_has_only_required_keys() {
        let t: Mesh = fixtures::square();
        let s = MeshFile::from_mesh(&t).to_json();
        assert_eq!(
            s,
            "{\"cells\":[[0,1,2],[0,2,3]],\"dim\":2,\"vertices\":[[0,0],[1,0],[1,1],[0,1]]}\n"
        );
    }

    #[test]
    fn inconsistent_documents_are_rejected() {
        let bad = r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1]],"cells":[[0,1,2]],"colors":[0,1]}"#;
        assert!(matches!(
            MeshFile::from_json(bad).unwrap().to_mesh::<f64>(),
            Err(IoError::Length { .. })
        ));
        let bad = r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1]],"cells":[[0,1,2]],"tags":[2]}"#;
        assert!(matches!(
            MeshFile::from_json(bad).unwrap().to_mesh::<f64>(),
            Err(IoError::Length { .. } | IoError::Invalid(_))
        ));
        assert!(matches!(
            MeshFile::from_json("{\"dim\":2,"),
            Err(IoError::Json(_))
        ));
    }

    #[test]
    fn vtk_output() {
        let t: Mesh = fixtures::kuhn_cube(3);
        let mut buf = Vec::new();
        write_vtk(&t, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("CELLS 6 30"));
        assert!(s.contains("CELL_TYPES 6\n10\n"));
        let t: Mesh = fixtures::kuhn_cube(4);
        let mut buf = Vec::new();
        write_vtk(&t, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains(&format!("CELLS {} ", t.edges().len())));
    }
}
