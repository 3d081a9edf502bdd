//! Reader and writer for the `.node` / `.ele` formats of Shewchuk's Triangle.
//!
//! `.node`: header `<#vertices> <dim=2> <#attrs> <#bmarkers>`, then
//! `<index> <x> <y> [attrs...] [marker]` per vertex.
//! `.ele`: header `<#triangles> <nodes-per-triangle> <#attrs>`, then
//! `<index> <i1> <i2> <i3> ...` per triangle.
//!
//! The index base (0 or 1) is taken from the first vertex index of the
//! `.node` file and applies to the vertex references in the `.ele` file.
//! `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use super::{Mesh, Point2};
use crate::error::{Error, Result};

/// Numbered, comment-stripped, non-empty lines.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn field<T: std::str::FromStr>(fields: &[&str], k: usize, line: usize, what: &str) -> Result<T> {
    let raw = fields
        .get(k)
        .ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{raw}`")))
}

pub fn parse_mesh(node_text: &str, ele_text: &str) -> Result<Mesh> {
    let (vertices, markers, base) = parse_node(node_text)?;
    let triangles = parse_ele(ele_text, base, vertices.len())?;
    Mesh::new(vertices, triangles, markers)
}

type NodeData = (Vec<Point2>, Option<Vec<i32>>, i64);

fn parse_node(text: &str) -> Result<NodeData> {
    let mut rows = records(text);
    let (hl, header) = rows
        .next()
        .ok_or_else(|| Error::parse(0, "empty .node file"))?;
    let count: usize = field(&header, 0, hl, "vertex count")?;
    let dim: usize = field(&header, 1, hl, "dimension")?;
    let n_attrs: usize = field(&header, 2, hl, "attribute count")?;
    let n_markers: usize = field(&header, 3, hl, "boundary marker count")?;
    if dim != 2 {
        return Err(Error::parse(hl, format!("dimension must be 2, got {dim}")));
    }
    if n_markers > 1 {
        return Err(Error::parse(hl, "at most one boundary marker per vertex"));
    }

    let mut vertices = Vec::with_capacity(count);
    let mut markers = Vec::with_capacity(if n_markers == 1 { count } else { 0 });
    let mut base = 0i64;
    for k in 0..count {
        let (line, f) = rows.next().ok_or_else(|| {
            Error::parse(hl, format!("expected {count} vertices, found {k}"))
        })?;
        let index: i64 = field(&f, 0, line, "vertex index")?;
        if k == 0 {
            if index != 0 && index != 1 {
                return Err(Error::parse(line, "first vertex index must be 0 or 1"));
            }
            base = index;
        } else if index != base + k as i64 {
            return Err(Error::parse(
                line,
                format!("vertex index {index} out of sequence"),
            ));
        }
        let expected = 3 + n_attrs + n_markers;
        if f.len() != expected {
            return Err(Error::parse(
                line,
                format!("expected {expected} fields, found {}", f.len()),
            ));
        }
        let x: f64 = field(&f, 1, line, "x coordinate")?;
        let y: f64 = field(&f, 2, line, "y coordinate")?;
        vertices.push(Point2::new(x, y));
        if n_markers == 1 {
            markers.push(field(&f, 3 + n_attrs, line, "boundary marker")?);
        }
    }
    if let Some((line, _)) = rows.next() {
        return Err(Error::parse(line, "trailing data after the last vertex"));
    }
    Ok((vertices, (n_markers == 1).then_some(markers), base))
}

fn parse_ele(text: &str, base: i64, n_vertices: usize) -> Result<Vec<[usize; 3]>> {
    let mut rows = records(text);
    let (hl, header) = rows
        .next()
        .ok_or_else(|| Error::parse(0, "empty .ele file"))?;
    let count: usize = field(&header, 0, hl, "triangle count")?;
    let per: usize = field(&header, 1, hl, "nodes per triangle")?;
    let n_attrs: usize = field(&header, 2, hl, "attribute count")?;
    if per != 3 && per != 6 {
        return Err(Error::parse(hl, format!("nodes per triangle must be 3 or 6, got {per}")));
    }

    let mut triangles = Vec::with_capacity(count);
    for k in 0..count {
        let (line, f) = rows.next().ok_or_else(|| {
            Error::parse(hl, format!("expected {count} triangles, found {k}"))
        })?;
        if f.len() != 1 + per + n_attrs {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", 1 + per + n_attrs, f.len()),
            ));
        }
        let _index: i64 = field(&f, 0, line, "triangle index")?;
        let mut tri = [0usize; 3];
        for (c, slot) in tri.iter_mut().enumerate() {
            let v: i64 = field(&f, 1 + c, line, "vertex reference")?;
            let local = v - base;
            if local < 0 || local >= n_vertices as i64 {
                return Err(Error::Index {
                    triangle: k,
                    vertex: v,
                    count: n_vertices,
                });
            }
            *slot = local as usize;
        }
        triangles.push(tri);
    }
    if let Some((line, _)) = rows.next() {
        return Err(Error::parse(line, "trailing data after the last triangle"));
    }
    Ok(triangles)
}

/// Returns the `.node` and `.ele` texts, numbered from 1.
pub fn serialize_mesh(mesh: &Mesh) -> (String, String) {
    let markers = mesh.markers();
    let mut node = String::new();
    let _ = writeln!(
        node,
        "{} 2 0 {}",
        mesh.vertices().len(),
        usize::from(markers.is_some())
    );
    for (i, p) in mesh.vertices().iter().enumerate() {
        let _ = write!(node, "{} {} {}", i + 1, p.x, p.y);
        if let Some(m) = markers {
            let _ = write!(node, " {}", m[i]);
        }
        node.push('\n');
    }
    let mut ele = String::new();
    let _ = writeln!(ele, "{} 3 0", mesh.triangles().len());
    for (i, t) in mesh.triangles().iter().enumerate() {
        let _ = writeln!(ele, "{} {} {} {}", i + 1, t[0] + 1, t[1] + 1, t[2] + 1);
    }
    (node, ele)
}

/// Reads `<stem>.node` and `<stem>.ele`; a trailing `.node`/`.ele` on `stem` is ignored.
pub fn read_mesh(stem: impl AsRef<Path>) -> Result<Mesh> {
    let stem = stem.as_ref();
    let stem = match stem.extension().and_then(|e| e.to_str()) {
        Some("node" | "ele") => stem.with_extension(""),
        _ => stem.to_path_buf(),
    };
    let node_path = stem.with_extension("node");
    let ele_path = stem.with_extension("ele");
    let node = std::fs::read_to_string(&node_path).map_err(|e| Error::io(&node_path, e))?;
    let ele = std::fs::read_to_string(&ele_path).map_err(|e| Error::io(&ele_path, e))?;
    parse_mesh(&node, &ele)
}

pub fn write_mesh(mesh: &Mesh, stem: impl AsRef<Path>) -> Result<()> {
    let stem = stem.as_ref();
    let (node, ele) = serialize_mesh(mesh);
    let node_path = stem.with_extension("node");
    let ele_path = stem.with_extension("ele");
    std::fs::write(&node_path, node).map_err(|e| Error::io(&node_path, e))?;
    std::fs::write(&ele_path, ele).map_err(|e| Error::io(&ele_path, e))?;
    Ok(())
}
