//! Planar points, triangles and barycentric coordinates.
//!
//! Vertex, edge and midpoint indices are 0-based throughout the crate and
//! wrap around modulo 3: edge `j` is the edge opposite vertex `j`, running
//! from vertex `j + 1` to vertex `j + 2`, and midpoint `j` is its midpoint.

mod io;
mod mesh;

pub use io::{parse_mesh, read_mesh, serialize_mesh, write_mesh};
pub use mesh::{structured_mesh, Mesh};

use std::ops::{Add, Index, Mul, Sub};

use crate::error::{Error, Result};

/// Relative tolerance used when deciding whether a point lies inside a triangle.
pub const INSIDE_TOL: f64 = 1e-12;

/// Triangles with `|signed area| <= DEGENERACY_FACTOR * diag^2` are rejected,
/// where `diag` is the diagonal of the vertex bounding box.
pub const DEGENERACY_FACTOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// `t * self + (1 - t) * other`
    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(
            t * self.x + (1.0 - t) * other.x,
            t * self.y + (1.0 - t) * other.y,
        )
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, rhs: Point2) -> Point2 {
        Point2::new(self * rhs.x, self * rhs.y)
    }
}

/// Barycentric coordinates `(λ₀, λ₁, λ₂)` of a point with respect to a triangle.
///
/// Indexing wraps around, so `b[3] == b[0]` and `b[4] == b[1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barycentric(pub [f64; 3]);

impl Barycentric {
    pub const CENTROID: Barycentric = Barycentric([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);

    pub const fn new(l0: f64, l1: f64, l2: f64) -> Self {
        Self([l0, l1, l2])
    }

    /// The `i`-th vertex of the triangle.
    pub fn vertex(i: usize) -> Self {
        let mut l = [0.0; 3];
        l[i % 3] = 1.0;
        Self(l)
    }

    /// Midpoint of the edge opposite vertex `j`.
    pub fn midpoint(j: usize) -> Self {
        let mut l = [0.5; 3];
        l[j % 3] = 0.0;
        Self(l)
    }

    /// `t * self + (1 - t) * other`, which is again a barycentric point.
    pub fn lerp(self, other: Barycentric, t: f64) -> Barycentric {
        let [a, b, c] = self.0;
        let [d, e, f] = other.0;
        Barycentric([
            t * a + (1.0 - t) * d,
            t * b + (1.0 - t) * e,
            t * c + (1.0 - t) * f,
        ])
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_inside(&self, tol: f64) -> bool {
        self.0.iter().all(|&l| l >= -tol)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Index<usize> for Barycentric {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i % 3]
    }
}

/// Edge midpoints and barycenter of a triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialPoints {
    pub midpoints: [Point2; 3],
    pub barycenter: Point2,
}

impl SpecialPoints {
    /// Midpoint `j` with wraparound.
    pub fn midpoint(&self, j: usize) -> Point2 {
        self.midpoints[j % 3]
    }
}

/// A nondegenerate, counterclockwise triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    vertices: [Point2; 3],
    area: f64,
}

fn signed_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

fn degeneracy_threshold(pts: &[Point2; 3]) -> f64 {
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let diag2 = (xmax - xmin).powi(2) + (ymax - ymin).powi(2);
    DEGENERACY_FACTOR * diag2
}

impl Triangle {
    /// Builds a triangle, swapping the last two vertices if they are given clockwise.
    pub fn new(v0: Point2, v1: Point2, v2: Point2) -> Result<Self> {
        Self::normalized(v0, v1, v2).map(|(t, _)| t)
    }

    /// Like [`Triangle::new`], also reporting whether `v1` and `v2` were swapped.
    pub fn normalized(v0: Point2, v1: Point2, v2: Point2) -> Result<(Self, bool)> {
        if !(v0.is_finite() && v1.is_finite() && v2.is_finite()) {
            return Err(Error::domain("triangle vertex is not finite"));
        }
        let area = signed_area(v0, v1, v2);
        if area.abs() <= degeneracy_threshold(&[v0, v1, v2]) {
            return Err(Error::DegenerateTriangle { area });
        }
        if area > 0.0 {
            Ok((
                Self {
                    vertices: [v0, v1, v2],
                    area,
                },
                false,
            ))
        } else {
            Ok((
                Self {
                    vertices: [v0, v2, v1],
                    area: -area,
                },
                true,
            ))
        }
    }

    /// The reference triangle `(0,0), (1,0), (0,1)`.
    pub fn reference() -> Self {
        Self {
            vertices: [
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(0.0, 1.0),
            ],
            area: 0.5,
        }
    }

    pub fn vertices(&self) -> &[Point2; 3] {
        &self.vertices
    }

    /// Vertex `j` with wraparound.
    pub fn vertex(&self, j: usize) -> Point2 {
        self.vertices[j % 3]
    }

    /// Positive area.
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Barycentric coordinates of `p` via signed-area ratios.
    pub fn barycentric(&self, p: Point2) -> Barycentric {
        let [a, b, c] = self.vertices;
        let det = (b - a).cross(c - a);
        let l1 = (p - a).cross(c - a) / det;
        let l2 = (b - a).cross(p - a) / det;
        Barycentric([1.0 - l1 - l2, l1, l2])
    }

    /// The Cartesian point with barycentric coordinates `b`.
    pub fn point_at(&self, b: &Barycentric) -> Point2 {
        let [a, v1, v2] = self.vertices;
        Point2::new(
            b.0[0] * a.x + b.0[1] * v1.x + b.0[2] * v2.x,
            b.0[0] * a.y + b.0[1] * v1.y + b.0[2] * v2.y,
        )
    }

    /// Midpoint of the edge opposite vertex `j`.
    pub fn midpoint(&self, j: usize) -> Point2 {
        self.vertex(j + 1).midpoint(self.vertex(j + 2))
    }

    pub fn barycenter(&self) -> Point2 {
        let [a, b, c] = self.vertices;
        Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    pub fn special_points(&self) -> SpecialPoints {
        SpecialPoints {
            midpoints: [self.midpoint(0), self.midpoint(1), self.midpoint(2)],
            barycenter: self.barycenter(),
        }
    }

    /// Length of the edge opposite vertex `j`.
    pub fn edge_length(&self, j: usize) -> f64 {
        self.vertex(j + 1).distance(self.vertex(j + 2))
    }

    pub fn longest_edge(&self) -> f64 {
        (0..3).map(|j| self.edge_length(j)).fold(0.0, f64::max)
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.barycentric(p).is_inside(INSIDE_TOL)
    }
}
