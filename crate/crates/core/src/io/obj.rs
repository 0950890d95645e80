use nalgebra::Point3;

use super::{content, parse_f64, ParseError, RawMesh};
use crate::mesh::TriMesh;

/// Parses the `v` and `f` directives of OBJ text without validating the
/// faces. Other directives are ignored; `/vt/vn` suffixes on face indices
/// are dropped.
pub fn parse_obj_raw(text: &str) -> Result<RawMesh, ParseError> {
    let mut raw = RawMesh::default();
    // Positive indices, range-checked after the last vertex.
    let mut pending: Vec<(usize, i64)> = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let line = i + 1;
        let mut tokens = content(l).split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<&str> = tokens.collect();
                if !(3..=4).contains(&coords.len()) {
                    return Err(ParseError::syntax(
                        line,
                        format!("vertex needs 3 or 4 numbers, found {}", coords.len()),
                    ));
                }
                let c = coords
                    .iter()
                    .map(|t| parse_f64(t, line))
                    .collect::<Result<Vec<_>, _>>()?;
                raw.vertices.push(Point3::new(c[0], c[1], c[2]));
                raw.vertex_lines.push(line);
            }
            Some("f") => {
                let refs: Vec<&str> = tokens.collect();
                if refs.len() != 3 {
                    return Err(ParseError::NonTriangleFace {
                        line,
                        arity: refs.len(),
                    });
                }
                let mut face = [0; 3];
                for (slot, r) in face.iter_mut().zip(&refs) {
                    let head = r.split('/').next().unwrap_or("");
                    let index: i64 = head.parse().map_err(|_| {
                        ParseError::syntax(line, format!("`{r}` is not a vertex reference"))
                    })?;
                    let n = raw.vertices.len();
                    *slot = match index {
                        0 => return Err(ParseError::syntax(line, "vertex indices start at 1")),
                        i if i < 0 => {
                            let resolved = n as i64 + i;
                            if resolved < 0 {
                                return Err(ParseError::IndexOutOfRange {
                                    line,
                                    index: i,
                                    n_vertices: n,
                                });
                            }
                            resolved as usize
                        }
                        i => {
                            pending.push((line, i));
                            (i - 1) as usize
                        }
                    };
                }
                raw.faces.push(face);
                raw.face_lines.push(line);
            }
            _ => {}
        }
    }
    let n = raw.vertices.len();
    if let Some(&(line, index)) = pending.iter().find(|(_, i)| *i as usize > n) {
        return Err(ParseError::IndexOutOfRange {
            line,
            index,
            n_vertices: n,
        });
    }
    Ok(raw)
}

pub fn parse_obj(text: &str) -> Result<TriMesh, ParseError> {
    parse_obj_raw(text)?.build()
}
