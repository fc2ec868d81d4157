//! Potential evaluation at interior points and over rectangular grids.

use crate::error::{Error, Result};
use crate::geometry::{Point2, PointClass};
use crate::kernel;
use crate::system::BoundarySolution;

/// One evaluated (or skipped) field point. `value` is present only for
/// interior points; boundary and exterior grid nodes carry none. Interior
/// points closer to the boundary than one element length are evaluated as-is
/// but flagged, since constant-element accuracy degrades there.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub point: Point2,
    pub value: Option<f64>,
    pub class: PointClass,
    pub near_boundary: bool,
}

/// Rectangular evaluation grid, `nx` by `ny` nodes spanning the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::GridConfig("non-finite grid bounds".into()));
        }
        if self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::GridConfig(format!(
                "degenerate bounds [{}, {}] x [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::GridConfig(format!(
                "need at least 2 nodes per axis, got {} x {}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    pub fn node(&self, ix: usize, iy: usize) -> Point2 {
        let fx = ix as f64 / (self.nx - 1) as f64;
        let fy = iy as f64 / (self.ny - 1) as f64;
        Point2::new(
            self.x_min + fx * (self.x_max - self.x_min),
            self.y_min + fy * (self.y_max - self.y_min),
        )
    }
}

/// Row-major field samples over a grid (`iy * nx + ix`).
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub spec: GridSpec,
    pub samples: Vec<FieldSample>,
}

impl FieldGrid {
    pub fn sample(&self, ix: usize, iy: usize) -> &FieldSample {
        &self.samples[iy * self.spec.nx + ix]
    }
}

/// Potential at an interior point: the boundary-data sum
/// `sum_k (u_k * double_layer_k - q_k * single_layer_k)` in fixed element
/// order. The point must classify as interior.
pub fn interior_potential(solution: &BoundarySolution, p: Point2) -> Result<f64> {
    let mesh = solution.mesh();
    let class = mesh.classify(p, mesh.default_boundary_tol());
    if class != PointClass::Interior {
        return Err(Error::NotInterior {
            x: p.x,
            y: p.y,
            class,
        });
    }
    let mut total = 0.0;
    for ((element, &u), &q) in mesh
        .elements()
        .iter()
        .zip(solution.potentials())
        .zip(solution.fluxes())
    {
        let vals = kernel::evaluate(element, p)?;
        total += u * vals.double_layer - q * vals.single_layer;
    }
    Ok(total)
}

/// Stored collocation potential of one element. Provided for symmetry with
/// interior evaluation; the edge factor 1/2 is already folded into the solve.
pub fn boundary_potential(solution: &BoundarySolution, element_index: usize) -> Result<f64> {
    solution
        .potentials()
        .get(element_index)
        .copied()
        .ok_or(Error::IndexOutOfRange {
            index: element_index,
            len: solution.potentials().len(),
        })
}

/// Evaluate the potential at every interior node of the grid. Exterior and
/// boundary nodes carry absent values. Output ordering is row-major and
/// independent of evaluation order.
pub fn field_map(solution: &BoundarySolution, spec: &GridSpec) -> Result<FieldGrid> {
    spec.validate()?;
    let mesh = solution.mesh();
    let tol = mesh.default_boundary_tol();
    let mut samples = Vec::with_capacity(spec.nx * spec.ny);
    for iy in 0..spec.ny {
        for ix in 0..spec.nx {
            let p = spec.node(ix, iy);
            let class = mesh.classify(p, tol);
            let value = match class {
                PointClass::Interior => Some(interior_potential(solution, p)?),
                _ => None,
            };
            let near_boundary = class == PointClass::Interior
                && mesh
                    .elements()
                    .iter()
                    .any(|e| e.distance_to_point(p) < e.length());
            samples.push(FieldSample {
                point: p,
                value,
                class,
                near_boundary,
            });
        }
    }
    Ok(FieldGrid {
        spec: *spec,
        samples,
    })
}
