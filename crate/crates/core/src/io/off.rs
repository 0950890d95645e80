use std::fmt::Write;

use nalgebra::Point3;

use super::{content, format_float, parse_f64, ParseError, RawMesh};
use crate::mesh::TriMesh;

fn parse_count(token: &str, line: usize) -> Result<usize, ParseError> {
    token
        .parse()
        .map_err(|_| ParseError::syntax(line, format!("`{token}` is not a count")))
}

/// Parses OFF text without validating the faces.
pub fn parse_off_raw(text: &str) -> Result<RawMesh, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, content(l)))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, "OFF")) => {}
        Some((line, other)) => {
            return Err(ParseError::syntax(
                line,
                format!("expected `OFF` header, found `{other}`"),
            ))
        }
        None => return Err(ParseError::syntax(1, "missing `OFF` header")),
    }

    let Some((counts_line, counts)) = lines.next() else {
        return Err(ParseError::syntax(
            text.lines().count().max(1),
            "missing counts line",
        ));
    };
    let tokens: Vec<&str> = counts.split_whitespace().collect();
    if !(2..=3).contains(&tokens.len()) {
        return Err(ParseError::syntax(
            counts_line,
            "counts line must hold vertex, face and optional edge counts",
        ));
    }
    let n_vertices = parse_count(tokens[0], counts_line)?;
    let n_faces = parse_count(tokens[1], counts_line)?;
    if let Some(edges) = tokens.get(2) {
        parse_count(edges, counts_line)?;
    }
    let short = |what: &str, got: usize, want: usize| ParseError::CountMismatch {
        line: counts_line,
        message: format!("header declares {want} {what}, file has {got}"),
    };

    let mut raw = RawMesh::default();
    for k in 0..n_vertices {
        let (line, l) = lines
            .next()
            .ok_or_else(|| short("vertices", k, n_vertices))?;
        let tokens: Vec<&str> = l.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(ParseError::syntax(
                line,
                format!("vertex line needs 3 coordinates, found {}", tokens.len()),
            ));
        }
        raw.vertices.push(Point3::new(
            parse_f64(tokens[0], line)?,
            parse_f64(tokens[1], line)?,
            parse_f64(tokens[2], line)?,
        ));
        raw.vertex_lines.push(line);
    }
    for k in 0..n_faces {
        let (line, l) = lines.next().ok_or_else(|| short("faces", k, n_faces))?;
        let tokens: Vec<&str> = l.split_whitespace().collect();
        let arity = parse_count(tokens[0], line)?;
        if arity != 3 {
            return Err(ParseError::NonTriangleFace { line, arity });
        }
        if tokens.len() != 4 {
            return Err(ParseError::syntax(
                line,
                format!("face line needs 3 indices, found {}", tokens.len() - 1),
            ));
        }
        let mut face = [0; 3];
        for (slot, token) in face.iter_mut().zip(&tokens[1..]) {
            *slot = token.parse().map_err(|_| {
                ParseError::syntax(line, format!("`{token}` is not a vertex index"))
            })?;
        }
        raw.faces.push(face);
        raw.face_lines.push(line);
    }
    if let Some((line, _)) = lines.next() {
        return Err(ParseError::CountMismatch {
            line,
            message: format!("data beyond the {n_vertices} vertices and {n_faces} faces declared"),
        });
    }
    Ok(raw)
}

pub fn parse_off(text: &str) -> Result<TriMesh, ParseError> {
    parse_off_raw(text)?.build()
}

/// OFF text with coordinates printed to 17 significant digits.
pub fn write_off(mesh: &TriMesh) -> String {
    let mut out = format!("OFF\n{} {} 0\n", mesh.n_vertices(), mesh.n_faces());
    for p in mesh.vertices() {
        let _ = writeln!(
            out,
            "{} {} {}",
            format_float(p.x),
            format_float(p.y),
            format_float(p.z)
        );
    }
    for [a, b, c] in mesh.faces() {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    out
}
