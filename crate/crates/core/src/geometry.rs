//! Polygonal discretization of annular boundaries and point classification.
//!
//! The boundary of the annular region `R` consists of two circles. Each is
//! approximated by `n` chords; the unknowns live on the chords, collocated at
//! chord midpoints. All classification (interior / boundary / exterior) is
//! performed against the chord polygons, not the exact circles, so that the
//! discrete Gauss identities hold exactly.
//!
//! Normal convention: for a chord traversed start -> end the normal is
//! `(dy, -dx) / l`. The outer loop is traversed counter-clockwise and the
//! inner loop clockwise, which makes every normal point away from `R` (the
//! outward normal of the region).

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// A point (or free vector) in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self x other`.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Rotation by `angle` radians about the origin.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

/// One straight boundary segment with precomputed collocation data.
///
/// `midpoint` is the collocation point, `normal` the unit normal `(dy, -dx)/l`
/// of the chord as constructed (callers choose traversal so it points away
/// from the region).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryElement {
    start: Point2,
    end: Point2,
    midpoint: Point2,
    length: f64,
    normal: Point2,
}

impl BoundaryElement {
    pub fn new(start: Point2, end: Point2) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::NonFinite(format!(
                "element endpoints ({:?}, {:?})",
                start, end
            )));
        }
        let chord = end - start;
        let length = chord.norm();
        if length <= 0.0 {
            return Err(Error::InvalidMesh(format!(
                "zero-length element at ({}, {})",
                start.x, start.y
            )));
        }
        Ok(BoundaryElement {
            start,
            end,
            midpoint: ((start + end) * 0.5),
            length,
            normal: Point2::new(chord.y / length, -chord.x / length),
        })
    }

    pub fn start(&self) -> Point2 {
        self.start
    }

    pub fn end(&self) -> Point2 {
        self.end
    }

    pub fn midpoint(&self) -> Point2 {
        self.midpoint
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn normal(&self) -> Point2 {
        self.normal
    }

    /// Same chord traversed the other way; the normal flips sign.
    pub fn reversed(&self) -> BoundaryElement {
        BoundaryElement {
            start: self.end,
            end: self.start,
            midpoint: self.midpoint,
            length: self.length,
            normal: (self.normal * -1.0),
        }
    }

    /// Same chord and traversal with the normal negated.
    pub fn flipped_normal(&self) -> BoundaryElement {
        BoundaryElement {
            normal: (self.normal * -1.0),
            ..*self
        }
    }

    /// Distance from `p` to the segment.
    pub fn distance_to_point(&self, p: Point2) -> f64 {
        let chord = self.end - self.start;
        let w = p - self.start;
        let t = (w.dot(chord) / chord.dot(chord)).clamp(0.0, 1.0);
        p.distance(self.start + (chord * t))
    }
}

/// Traversal direction for circle discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Ccw,
    Cw,
}

/// Approximate a circle by `n` chords.
///
/// Vertices sit at angles `start_angle + 2*pi*k/n`. Each chord has length
/// `2 r sin(pi/n)`. CCW traversal yields normals pointing radially outward;
/// CW produces the same chords reversed element by element, so element `k`
/// of a CW loop is the reverse of element `k` of the CCW loop and its normal
/// points radially inward.
pub fn discretize_circle(
    center: Point2,
    radius: f64,
    n: usize,
    orientation: Orientation,
    start_angle: f64,
) -> Result<Vec<BoundaryElement>> {
    if n < 3 {
        return Err(Error::InvalidMesh(format!(
            "circle needs at least 3 elements, got {n}"
        )));
    }
    if radius <= 0.0 || radius.is_nan() {
        return Err(Error::InvalidMesh(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if !center.is_finite() || !start_angle.is_finite() {
        return Err(Error::NonFinite("circle center or start angle".into()));
    }
    let vertex = |k: usize| {
        let angle = start_angle + 2.0 * PI * (k as f64) / (n as f64);
        Point2::new(
            center.x + radius * angle.cos(),
            center.y + radius * angle.sin(),
        )
    };
    // Reusing vertex values (index arithmetic, never angle 2*pi) closes the
    // loop exactly.
    let vertices: Vec<Point2> = match orientation {
        Orientation::Ccw => (0..n).map(vertex).collect(),
        Orientation::Cw => (0..n).map(|j| vertex((n + 1 - j) % n)).collect(),
    };
    (0..n)
        .map(|k| BoundaryElement::new(vertices[k], vertices[(k + 1) % n]))
        .collect()
}

/// Discretized annular boundary: outer loop first, then inner loop.
#[derive(Debug, Clone)]
pub struct AnnulusMesh {
    elements: Vec<BoundaryElement>,
    n_outer: usize,
    n_inner: usize,
    outer_center: Point2,
    inner_center: Point2,
    outer_radius: f64,
    inner_radius: f64,
}

impl AnnulusMesh {
    /// All elements, outer loop elements first.
    pub fn elements(&self) -> &[BoundaryElement] {
        &self.elements
    }

    pub fn outer(&self) -> &[BoundaryElement] {
        &self.elements[..self.n_outer]
    }

    pub fn inner(&self) -> &[BoundaryElement] {
        &self.elements[self.n_outer..]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn n_outer(&self) -> usize {
        self.n_outer
    }

    pub fn n_inner(&self) -> usize {
        self.n_inner
    }

    pub fn outer_center(&self) -> Point2 {
        self.outer_center
    }

    pub fn inner_center(&self) -> Point2 {
        self.inner_center
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Default tolerance for deciding that a point sits on the boundary:
    /// strictly smaller than any realistic element length yet forgiving of
    /// rounded coordinates.
    pub fn default_boundary_tol(&self) -> f64 {
        1e-9 * self.outer_radius
    }

    pub fn classify(&self, p: Point2, boundary_tol: f64) -> PointClass {
        classify_point(self, p, boundary_tol)
    }

    /// Longest element length over both loops.
    pub fn max_element_length(&self) -> f64 {
        self.elements.iter().map(|e| e.length()).fold(0.0, f64::max)
    }
}

/// Build the annular mesh: outer loop CCW, inner loop CW, so that all normals
/// point away from the region between them. Element ordering is outer
/// elements `0..n_outer` then inner elements.
pub fn build_annulus(
    outer_center: Point2,
    outer_radius: f64,
    inner_center: Point2,
    inner_radius: f64,
    n_outer: usize,
    n_inner: usize,
) -> Result<AnnulusMesh> {
    let positive = |r: f64| r > 0.0 && r.is_finite();
    if !positive(outer_radius) || !positive(inner_radius) {
        return Err(Error::Geometry(format!(
            "radii must be positive (outer {outer_radius}, inner {inner_radius})"
        )));
    }
    let center_gap = outer_center.distance(inner_center);
    // Strict containment; NaN centers fall through to the finiteness check
    // inside discretize_circle.
    if center_gap + inner_radius >= outer_radius {
        return Err(Error::Geometry(format!(
            "inner circle (r = {inner_radius}) not strictly inside outer circle (r = {outer_radius}, center distance {center_gap})"
        )));
    }
    let outer = discretize_circle(outer_center, outer_radius, n_outer, Orientation::Ccw, 0.0)?;
    let inner = discretize_circle(inner_center, inner_radius, n_inner, Orientation::Cw, 0.0)?;
    let mut elements = outer;
    elements.extend(inner);
    Ok(AnnulusMesh {
        elements,
        n_outer,
        n_inner,
        outer_center,
        inner_center,
        outer_radius,
        inner_radius,
    })
}

/// Classification of a field point relative to the annular region, together
/// with the edge factor of the boundary integral identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    /// Outside the region (includes the hole inside the inner circle).
    Exterior,
    /// Within tolerance of some boundary segment.
    OnBoundary,
    /// Strictly inside the polygonal annulus.
    Interior,
}

impl PointClass {
    /// Edge factor: 0 exterior, 1/2 on the smooth boundary, 1 interior.
    pub fn edge_factor(self) -> f64 {
        match self {
            PointClass::Exterior => 0.0,
            PointClass::OnBoundary => 0.5,
            PointClass::Interior => 1.0,
        }
    }
}

/// Classify `p` against the chord polygons of the mesh.
///
/// A point counts as `OnBoundary` when its distance to any segment is at most
/// `boundary_tol`. Interior means inside the outer polygon and outside the
/// inner polygon; points in the hole are exterior.
pub fn classify_point(mesh: &AnnulusMesh, p: Point2, boundary_tol: f64) -> PointClass {
    debug_assert!(boundary_tol >= 0.0);
    if !p.is_finite() {
        return PointClass::Exterior;
    }
    for elem in mesh.elements() {
        if elem.distance_to_point(p) <= boundary_tol {
            return PointClass::OnBoundary;
        }
    }
    let in_outer = point_in_loop(mesh.outer(), p);
    let in_inner = point_in_loop(mesh.inner(), p);
    if in_outer && !in_inner {
        PointClass::Interior
    } else {
        PointClass::Exterior
    }
}

/// Even-odd ray cast against the closed loop formed by the elements' chords.
fn point_in_loop(elements: &[BoundaryElement], p: Point2) -> bool {
    let mut inside = false;
    for elem in elements {
        let (a, b) = (elem.start(), elem.end());
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}
