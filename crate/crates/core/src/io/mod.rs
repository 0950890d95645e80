//! Mesh file parsing (OFF and a subset of OBJ) and CSV output.
//!
//! Parsers first produce a [`RawMesh`] that records the source line of
//! every vertex and face; mesh validation errors carry those lines.

mod csv;
mod obj;
mod off;

pub use csv::{format_float, write_bench_csv, write_curvature_csv, Manifest};
pub use obj::{parse_obj, parse_obj_raw};
pub use off::{parse_off, parse_off_raw, write_off};

use std::fmt;
use std::path::Path;

use nalgebra::Point3;
use thiserror::Error;

use crate::mesh::{self, MeshError, TriMesh};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: face has {arity} vertices, only triangles are supported")]
    NonTriangleFace { line: usize, arity: usize },
    #[error("line {line}: {message}")]
    CountMismatch { line: usize, message: String },
    #[error("line {line}: vertex index {index} is out of range for {n_vertices} vertices")]
    IndexOutOfRange {
        line: usize,
        index: i64,
        n_vertices: usize,
    },
    #[error("line {line}: {source}")]
    Mesh { line: usize, source: MeshError },
}

impl ParseError {
    /// 1-based line the error refers to.
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::NonTriangleFace { line, .. }
            | ParseError::CountMismatch { line, .. }
            | ParseError::IndexOutOfRange { line, .. }
            | ParseError::Mesh { line, .. } => *line,
        }
    }

    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }
}

/// Parsed but unvalidated mesh data with source line numbers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawMesh {
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<[usize; 3]>,
    pub vertex_lines: Vec<usize>,
    pub face_lines: Vec<usize>,
}

impl RawMesh {
    /// Source line of the element a mesh error refers to.
    pub fn line_of(&self, err: &MeshError) -> usize {
        match *err {
            MeshError::IndexOutOfRange { face, .. }
            | MeshError::DuplicateVertexInFace { face, .. }
            | MeshError::DegenerateFace { face, .. } => self.face_lines[face],
            MeshError::NonFiniteVertex { vertex } => self.vertex_lines[vertex],
        }
    }

    pub fn to_parse_error(&self, err: MeshError) -> ParseError {
        let line = self.line_of(&err);
        match err {
            MeshError::IndexOutOfRange {
                index, n_vertices, ..
            } => ParseError::IndexOutOfRange {
                line,
                index: index as i64,
                n_vertices,
            },
            source => ParseError::Mesh { line, source },
        }
    }

    /// Every validation problem, each with its source line.
    pub fn problems(&self) -> Vec<ParseError> {
        mesh::validate(&self.vertices, &self.faces)
            .into_iter()
            .map(|e| self.to_parse_error(e))
            .collect()
    }

    pub fn build(self) -> Result<TriMesh, ParseError> {
        match TriMesh::new(self.vertices.clone(), self.faces.clone()) {
            Ok(mesh) => Ok(mesh),
            Err(e) => Err(self.to_parse_error(e)),
        }
    }
}

/// Strips a `#` comment and surrounding whitespace.
pub(crate) fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub(crate) fn parse_f64(token: &str, line: usize) -> Result<f64, ParseError> {
    token
        .parse()
        .map_err(|_| ParseError::syntax(line, format!("`{token}` is not a number")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    /// Format from the file extension, case-insensitive.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            _ => None,
        }
    }

    pub fn parse_raw(self, text: &str) -> Result<RawMesh, ParseError> {
        match self {
            MeshFormat::Off => parse_off_raw(text),
            MeshFormat::Obj => parse_obj_raw(text),
        }
    }

    pub fn parse(self, text: &str) -> Result<TriMesh, ParseError> {
        self.parse_raw(text)?.build()
    }
}

impl fmt::Display for MeshFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeshFormat::Off => "off",
            MeshFormat::Obj => "obj",
        })
    }
}
