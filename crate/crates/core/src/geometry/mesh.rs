use std::collections::{HashMap, HashSet};

use super::{Barycentric, Point2, Triangle, INSIDE_TOL};
use crate::error::{Error, Result};

/// Meshes at or above this size get a uniform-grid bucket index for [`Mesh::locate`].
pub const GRID_INDEX_THRESHOLD: usize = 10_000;

/// An indexed triangle mesh with 0-based, counterclockwise triangles.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    markers: Option<Vec<i32>>,
    elements: Vec<Triangle>,
    grid: Option<GridIndex>,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.triangles == other.triangles
            && self.markers == other.markers
    }
}

impl Mesh {
    /// Validates indices, repairs orientation and rejects degenerate or repeated triangles.
    pub fn new(
        vertices: Vec<Point2>,
        triangles: Vec<[usize; 3]>,
        markers: Option<Vec<i32>>,
    ) -> Result<Self> {
        if let Some(m) = &markers {
            if m.len() != vertices.len() {
                return Err(Error::Config(format!(
                    "{} boundary markers for {} vertices",
                    m.len(),
                    vertices.len()
                )));
            }
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::domain(format!("vertex {i} is not finite")));
        }

        let mut seen = HashSet::with_capacity(triangles.len());
        let mut oriented = Vec::with_capacity(triangles.len());
        let mut elements = Vec::with_capacity(triangles.len());
        for (ti, tri) in triangles.into_iter().enumerate() {
            for &v in &tri {
                if v >= vertices.len() {
                    return Err(Error::Index {
                        triangle: ti,
                        vertex: v as i64,
                        count: vertices.len(),
                    });
                }
            }
            let (element, swapped) =
                Triangle::normalized(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]])
                    .map_err(|e| Error::AtTriangle {
                        index: ti,
                        source: Box::new(e),
                    })?;
            let tri = if swapped {
                [tri[0], tri[2], tri[1]]
            } else {
                tri
            };
            let mut key = tri;
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(Error::DuplicateTriangle(ti));
            }
            oriented.push(tri);
            elements.push(element);
        }

        let grid = (elements.len() >= GRID_INDEX_THRESHOLD).then(|| GridIndex::build(&elements));
        Ok(Self {
            vertices,
            triangles: oriented,
            markers,
            elements,
            grid,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn markers(&self) -> Option<&[i32]> {
        self.markers.as_deref()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn triangle(&self, i: usize) -> &Triangle {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[Triangle] {
        &self.elements
    }

    pub fn total_area(&self) -> f64 {
        crate::util::neumaier_sum(self.elements.iter().map(Triangle::area))
    }

    /// Longest edge over the mesh.
    pub fn h_max(&self) -> f64 {
        self.elements
            .iter()
            .map(Triangle::longest_edge)
            .fold(0.0, f64::max)
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        bbox(self.vertices.iter().copied())
    }

    /// For every triangle, the neighbor across each local edge (edge `j` is opposite vertex `j`).
    pub fn edge_neighbors(&self) -> Vec<[Option<usize>; 3]> {
        let mut owners: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (ti, tri) in self.triangles.iter().enumerate() {
            for j in 0..3 {
                let (a, b) = (tri[(j + 1) % 3], tri[(j + 2) % 3]);
                owners.entry((a.min(b), a.max(b))).or_default().push((ti, j));
            }
        }
        let mut out = vec![[None; 3]; self.triangles.len()];
        for sharing in owners.values() {
            if let [(t0, j0), (t1, j1)] = sharing[..] {
                out[t0][j0] = Some(t1);
                out[t1][j1] = Some(t0);
            }
        }
        out
    }

    /// Finds the lowest-index triangle containing `p`.
    pub fn locate(&self, p: Point2) -> Result<(usize, Barycentric)> {
        let outside = || Error::PointOutsideMesh { x: p.x, y: p.y };
        let (lo, hi) = self.bounding_box();
        let slack = INSIDE_TOL * (hi - lo).norm();
        if !(p.x >= lo.x - slack && p.x <= hi.x + slack && p.y >= lo.y - slack && p.y <= hi.y + slack)
        {
            return Err(outside());
        }
        let hit = |i: usize| {
            let b = self.elements[i].barycentric(p);
            b.is_inside(INSIDE_TOL).then_some((i, b))
        };
        match &self.grid {
            Some(grid) => grid.candidates(p).iter().find_map(|&i| hit(i)),
            None => (0..self.elements.len()).find_map(hit),
        }
        .ok_or_else(outside)
    }
}

fn bbox(points: impl Iterator<Item = Point2>) -> (Point2, Point2) {
    points.fold(
        (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    )
}

/// Uniform grid of buckets; each bucket lists, in ascending order, the
/// triangles whose (slightly inflated) bounding box overlaps it.
#[derive(Debug, Clone)]
struct GridIndex {
    origin: Point2,
    cell: Point2,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl GridIndex {
    fn build(elements: &[Triangle]) -> Self {
        let (lo, hi) = bbox(elements.iter().flat_map(|t| t.vertices().iter().copied()));
        let side = (elements.len() as f64).sqrt().ceil().max(1.0) as usize;
        let (nx, ny) = (side, side);
        let cell = Point2::new(
            ((hi.x - lo.x) / nx as f64).max(f64::MIN_POSITIVE),
            ((hi.y - lo.y) / ny as f64).max(f64::MIN_POSITIVE),
        );
        let mut grid = Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        let slack = INSIDE_TOL * (hi - lo).norm();
        for (i, t) in elements.iter().enumerate() {
            let (tlo, thi) = bbox(t.vertices().iter().copied());
            let (i0, j0) = grid.cell_of(Point2::new(tlo.x - slack, tlo.y - slack));
            let (i1, j1) = grid.cell_of(Point2::new(thi.x + slack, thi.y + slack));
            for cj in j0..=j1 {
                for ci in i0..=i1 {
                    grid.buckets[cj * nx + ci].push(i);
                }
            }
        }
        grid
    }

    fn cell_of(&self, p: Point2) -> (usize, usize) {
        let clamp = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        (
            clamp((p.x - self.origin.x) / self.cell.x, self.nx),
            clamp((p.y - self.origin.y) / self.cell.y, self.ny),
        )
    }

    fn candidates(&self, p: Point2) -> &[usize] {
        let (i, j) = self.cell_of(p);
        &self.buckets[j * self.nx + i]
    }
}

/// Uniform `n x n` grid on the unit square, each cell split along its SW-NE diagonal.
pub fn structured_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::domain("structured mesh needs n >= 1"));
    }
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    let mut markers = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point2::new(i as f64 / n as f64, j as f64 / n as f64));
            markers.push(i32::from(i == 0 || j == 0 || i == n || j == n));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (sw, se, nw, ne) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            triangles.push([sw, se, ne]);
            triangles.push([sw, ne, nw]);
        }
    }
    Mesh::new(vertices, triangles, Some(markers))
}
