//! Independent verification machinery: adaptive quadrature for the element
//! integrals and analytic harmonic reference solutions.
//!
//! The quadrature routines deliberately avoid the closed forms in [`crate::kernel`].
//! They evaluate the integrands pointwise from raw geometry (squared distance
//! computed directly, normal offset re-evaluated at every node) and integrate
//! with adaptive 15-point Gauss-Kronrod panels. The interval is pre-split at
//! the parameter of closest approach so that near-singular and on-element
//! field points put the spike at a panel endpoint, where bisection resolves
//! the integrable singularity.

use crate::error::{Error, Result};
use crate::field;
use crate::geometry::{AnnulusMesh, BoundaryElement, Point2, PointClass};
use crate::system;
use std::f64::consts::PI;

const MAX_EVALS: usize = 120_000;

// 15-point Kronrod extension of 7-point Gauss on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

struct Panel {
    value: f64,
    err: f64,
    resabs: f64,
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Panel {
        value: kronrod * half,
        err: ((kronrod - gauss) * half).abs(),
        resabs: resabs * half.abs(),
    }
}

/// Heap entry ordered by error estimate (worst first); ties broken by
/// interval position so the ordering is fully specified and runs are
/// reproducible.
struct Entry {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
    resabs: f64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .total_cmp(&other.err)
            .then(self.a.total_cmp(&other.a))
            .then(self.b.total_cmp(&other.b))
    }
}

/// Globally adaptive integration over [0, 1]: keep bisecting the panel with
/// the worst error estimate until the summed estimate drops below `rel_tol`
/// relative to the running integral of |f|. Returns a convergence error when
/// the budget runs out or no splittable panel remains above the tolerance.
fn integrate<F: Fn(f64) -> f64>(f: F, split_at: Option<f64>, rel_tol: f64) -> Result<f64> {
    let initial: Vec<(f64, f64)> = match split_at {
        Some(t) if t > 0.0 && t < 1.0 => vec![(0.0, t), (t, 1.0)],
        _ => vec![(0.0, 1.0)],
    };
    let mut heap = std::collections::BinaryHeap::new();
    let mut frozen: Vec<Entry> = Vec::new();
    let mut total_err = 0.0;
    let mut total_resabs = 0.0;
    let mut evals = 0usize;
    for &(a, b) in &initial {
        let p = gauss_kronrod_15(&f, a, b);
        evals += 15;
        total_err += p.err;
        total_resabs += p.resabs;
        heap.push(Entry {
            err: p.err,
            a,
            b,
            value: p.value,
            resabs: p.resabs,
        });
    }
    while total_err > rel_tol * total_resabs.max(f64::MIN_POSITIVE) && evals < MAX_EVALS {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // Below the width floor, node positions round onto the panel
        // endpoints and an endpoint singularity would be sampled exactly.
        let min_width = 1e-12 * worst.a.abs().max(worst.b.abs()).max(1.0);
        if !(mid > worst.a && mid < worst.b) || worst.b - worst.a <= min_width {
            // Cannot be improved; keep its contribution and move on.
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod_15(&f, worst.a, mid);
        let right = gauss_kronrod_15(&f, mid, worst.b);
        evals += 30;
        total_err += left.err + right.err - worst.err;
        total_resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(Entry {
            err: left.err,
            a: worst.a,
            b: mid,
            value: left.value,
            resabs: left.resabs,
        });
        heap.push(Entry {
            err: right.err,
            a: mid,
            b: worst.b,
            value: right.value,
            resabs: right.resabs,
        });
    }
    // Re-sum from the final panel set in interval order: the incremental
    // running totals carry rounding drift from thousands of updates.
    let mut panels: Vec<Entry> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    let resabs: f64 = panels.iter().map(|p| p.resabs).sum();
    if err > rel_tol * resabs.max(f64::MIN_POSITIVE) {
        return Err(Error::QuadratureConvergence { achieved: err });
    }
    Ok(value)
}

fn check_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 0.0 && rel_tol <= 1e-2 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "quadrature rel_tol must lie in (0, 1e-2], got {rel_tol}"
        )))
    }
}

/// Parameter of the point on the (extended) element line closest to `field`,
/// clamped to [0, 1]. Used only to place the panel split.
fn closest_parameter(elem: &BoundaryElement, field: Point2) -> f64 {
    let chord = elem.end() - elem.start();
    ((field - elem.start()).dot(chord) / chord.dot(chord)).clamp(0.0, 1.0)
}

/// Quadrature of the single-layer integrand `(l / 4pi) ln S(t)` over [0, 1].
pub fn single_layer_quadrature(elem: &BoundaryElement, field: Point2, rel_tol: f64) -> Result<f64> {
    check_tol(rel_tol)?;
    if !field.is_finite() {
        return Err(Error::NonFinite("quadrature field point".into()));
    }
    let (start, end, l) = (elem.start(), elem.end(), elem.length());
    let chord = end - start;
    let integrand = move |t: f64| {
        let p = start + (chord * t);
        let dx = p.x - field.x;
        let dy = p.y - field.y;
        l / (4.0 * PI) * (dx * dx + dy * dy).ln()
    };
    integrate(integrand, Some(closest_parameter(elem, field)), rel_tol)
}

/// Quadrature of the double-layer integrand `(l / 2pi) n.(p(t) - f) / S(t)`.
///
/// Returns 0 without integrating when the constant numerator vanishes, i.e.
/// the field point lies on the element's supporting line.
pub fn double_layer_quadrature(elem: &BoundaryElement, field: Point2, rel_tol: f64) -> Result<f64> {
    check_tol(rel_tol)?;
    if !field.is_finite() {
        return Err(Error::NonFinite("quadrature field point".into()));
    }
    let (start, end, l, n) = (elem.start(), elem.end(), elem.length(), elem.normal());
    let w = start - field;
    if n.dot(w).abs() <= 1e-13 * (l + w.norm()) {
        return Ok(0.0);
    }
    let chord = end - start;
    let integrand = move |t: f64| {
        let p = start + (chord * t);
        let off = p - field;
        l / (2.0 * PI) * n.dot(off) / off.dot(off)
    };
    integrate(integrand, Some(closest_parameter(elem, field)), rel_tol)
}

/// Analytic solutions of the Laplace equation used as end-to-end references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarmonicReference {
    Constant(f64),
    LinearX,
    LinearY,
    /// `ln |p - center|`; the logarithmic singularity must lie outside the
    /// solution region.
    LogR {
        center: Point2,
    },
    /// `x^2 - y^2`, the degree-2 harmonic polynomial.
    HarmonicPoly2,
}

impl HarmonicReference {
    pub fn value(&self, p: Point2) -> f64 {
        match *self {
            HarmonicReference::Constant(c) => c,
            HarmonicReference::LinearX => p.x,
            HarmonicReference::LinearY => p.y,
            HarmonicReference::LogR { center } => p.distance(center).ln(),
            HarmonicReference::HarmonicPoly2 => p.x * p.x - p.y * p.y,
        }
    }

    /// Directional derivative `n . grad u` at `p`.
    pub fn flux(&self, p: Point2, normal: Point2) -> f64 {
        match *self {
            HarmonicReference::Constant(_) => 0.0,
            HarmonicReference::LinearX => normal.x,
            HarmonicReference::LinearY => normal.y,
            HarmonicReference::LogR { center } => {
                let r = p - center;
                normal.dot(r) / r.dot(r)
            }
            HarmonicReference::HarmonicPoly2 => 2.0 * (normal.x * p.x - normal.y * p.y),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            HarmonicReference::Constant(c) => format!("constant({c})"),
            HarmonicReference::LinearX => "linear_x".into(),
            HarmonicReference::LinearY => "linear_y".into(),
            HarmonicReference::LogR { center } => format!("log_r({}, {})", center.x, center.y),
            HarmonicReference::HarmonicPoly2 => "poly2".into(),
        }
    }
}

/// Absolute and scale-guarded relative error statistics over a sample set.
#[derive(Debug, Clone, Copy, Default)]
pub struct ErrorStats {
    pub max_abs: f64,
    pub avg_abs: f64,
    pub max_rel: f64,
    pub avg_rel: f64,
}

impl ErrorStats {
    fn from_pairs(pairs: &[(f64, f64)]) -> ErrorStats {
        if pairs.is_empty() {
            return ErrorStats::default();
        }
        let scale = pairs.iter().map(|&(r, _)| r.abs()).fold(0.0, f64::max);
        let mut stats = ErrorStats::default();
        for &(reference, computed) in pairs {
            let abs = (computed - reference).abs();
            let rel = if scale == 0.0 {
                abs
            } else {
                abs / reference.abs().max(1e-12 * scale)
            };
            stats.max_abs = stats.max_abs.max(abs);
            stats.avg_abs += abs;
            stats.max_rel = stats.max_rel.max(rel);
            stats.avg_rel += rel;
        }
        stats.avg_abs /= pairs.len() as f64;
        stats.avg_rel /= pairs.len() as f64;
        stats
    }
}

/// Flux and interior-sample errors of a full pipeline run against an
/// analytic reference.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceCheck {
    pub flux: ErrorStats,
    pub interior: ErrorStats,
    pub interior_samples: usize,
}

/// Impose Dirichlet data from `reference` at the collocation midpoints, solve
/// for the Neumann data, and compare both the recovered flux and interior
/// potentials against the analytic values.
pub fn reference_solve_check(
    reference: &HarmonicReference,
    mesh: &AnnulusMesh,
) -> Result<ReferenceCheck> {
    if let HarmonicReference::LogR { center } = reference {
        if mesh.classify(*center, mesh.default_boundary_tol()) != PointClass::Exterior {
            return Err(Error::Precondition(format!(
                "log_r center ({}, {}) must lie outside the solution region",
                center.x, center.y
            )));
        }
    }
    let dirichlet: Vec<f64> = mesh
        .elements()
        .iter()
        .map(|e| reference.value(e.midpoint()))
        .collect();
    let mats = system::assemble(mesh)?;
    let solution = system::solve_dirichlet_to_neumann(mesh, &mats, &dirichlet)?;

    let flux_pairs: Vec<(f64, f64)> = mesh
        .elements()
        .iter()
        .zip(solution.fluxes())
        .map(|(e, &q)| (reference.flux(e.midpoint(), e.normal()), q))
        .collect();

    let mut interior_pairs = Vec::new();
    let safe = 0.5 * mesh.max_element_length();
    for &frac in &[0.35, 0.5, 0.65, 0.8] {
        let r = mesh.inner_radius() + frac * (mesh.outer_radius() - mesh.inner_radius());
        for k in 0..16 {
            let angle = 2.0 * PI * (k as f64) / 16.0;
            let p = mesh.outer_center() + Point2::new(r * angle.cos(), r * angle.sin());
            let far_enough = mesh
                .elements()
                .iter()
                .all(|e| e.distance_to_point(p) > safe);
            if far_enough && mesh.classify(p, mesh.default_boundary_tol()) == PointClass::Interior {
                interior_pairs.push((reference.value(p), field::interior_potential(&solution, p)?));
            }
        }
    }
    Ok(ReferenceCheck {
        flux: ErrorStats::from_pairs(&flux_pairs),
        interior: ErrorStats::from_pairs(&interior_pairs),
        interior_samples: interior_pairs.len(),
    })
}
