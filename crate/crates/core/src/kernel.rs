//! Closed-form element integrals of the 2D Laplace fundamental solution.
//!
//! With the fundamental solution `G(p; f) = ln(|p - f|^2) / 4pi`, each
//! straight element `C_K` contributes two integrals at a field point `f`:
//!
//! ```text
//! single_layer = integral over C_K of G ds
//!              = (l / 4pi) * integral_0^1 ln(S(t)) dt
//! double_layer = integral over C_K of dG/dn ds
//! ```
//!
//! where `S(t) = a t^2 + b t + e` is the squared distance from the field
//! point to the parametrized element `p(t) = start + t (end - start)`. Both
//! integrals have elementary antiderivatives. When the field point lies on
//! the element's supporting line the discriminant `4ae - b^2` vanishes, the
//! arctangent form degenerates, and a logarithmic branch applies; the
//! double layer is identically zero there because its numerator is the
//! constant normal offset of the field point from the line.
//!
//! The discriminant equals `(2 l d)^2` with `d` the signed perpendicular
//! distance from the field point to the line. Evaluating it that way instead
//! of as the literal difference `4ae - b^2` avoids catastrophic cancellation
//! for field points very close to the element, which the near-singular
//! accuracy requirements depend on.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryElement, Point2};
use std::f64::consts::PI;

/// Relative threshold deciding that the field point lies on the element's
/// supporting line: singular when `disc <= threshold * (4ae + b^2)`. With the
/// cancellation-free discriminant this resolves perpendicular offsets down to
/// about 1e-12 of the geometry scale while leaving genuinely near-singular
/// points (offsets of 1e-6 of an element length and more) on the regular
/// branch.
pub const SINGULAR_REL_THRESHOLD: f64 = 1e-24;

/// Coefficients of the squared-distance quadratic `S(t) = a t^2 + b t + e`
/// along an element, for a given field point.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticCoeffs {
    /// Squared element length.
    pub a: f64,
    /// `2 [(x_start - xi) dx + (y_start - eta) dy]`.
    pub b: f64,
    /// Squared distance from the field point to the element start.
    pub e: f64,
    /// `4ae - b^2`, evaluated as `(2 l d)^2` with `d` the perpendicular
    /// offset of the field point from the supporting line.
    pub disc: f64,
}

/// Which analytic branch produced a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelCase {
    Regular,
    SelfSingular,
}

/// Both element integrals at one field point.
#[derive(Debug, Clone, Copy)]
pub struct ElementIntegrals {
    pub single_layer: f64,
    pub double_layer: f64,
    pub case_used: KernelCase,
}

pub fn quadratic_coeffs(elem: &BoundaryElement, field: Point2) -> QuadraticCoeffs {
    let chord = elem.end() - elem.start();
    let w = elem.start() - field;
    let a = chord.dot(chord);
    let b = 2.0 * w.dot(chord);
    let e = w.dot(w);
    let d = elem.normal().dot(w);
    let q = 2.0 * elem.length() * d;
    QuadraticCoeffs {
        a,
        b,
        e,
        disc: q * q,
    }
}

fn is_on_line(c: &QuadraticCoeffs) -> bool {
    c.disc <= SINGULAR_REL_THRESHOLD * (4.0 * c.a * c.e + c.b * c.b)
}

fn check_field(field: Point2) -> Result<()> {
    if field.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!(
            "field point ({}, {})",
            field.x, field.y
        )))
    }
}

/// `x ln|x|`, continuously extended by 0 at x = 0.
fn x_ln_abs(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.abs().ln()
    }
}

/// Single-layer integral `(l / 4pi) * integral_0^1 ln(S(t)) dt`.
///
/// Regular branch (field point off the supporting line):
///
/// ```text
/// integral_0^1 ln S dt = (1 + b/2a) ln(a+b+e) - (b/2a) ln e - 2
///                      + (q/a) [atan((2a+b)/q) - atan(b/q)],   q = sqrt(disc)
/// ```
///
/// On the line `S(t) = a (t - t0)^2` and the integral reduces to the
/// logarithmic form below; at the element's own midpoint it becomes
/// `(l/2pi) (ln(l/2) - 1)`. Field points at an element endpoint hit the
/// integrable `ln` divergence and still return the finite principal value.
pub fn single_layer(elem: &BoundaryElement, field: Point2) -> Result<f64> {
    check_field(field)?;
    let c = quadratic_coeffs(elem, field);
    let l = elem.length();
    if is_on_line(&c) {
        let t0 = -c.b / (2.0 * c.a);
        return Ok(l / (2.0 * PI) * (l.ln() + x_ln_abs(1.0 - t0) + x_ln_abs(t0) - 1.0));
    }
    let q = c.disc.sqrt();
    let half_ratio = c.b / (2.0 * c.a);
    let value = (1.0 + half_ratio) * (c.a + c.b + c.e).ln() - half_ratio * c.e.ln() - 2.0
        + (q / c.a) * (((2.0 * c.a + c.b) / q).atan() - (c.b / q).atan());
    Ok(l / (4.0 * PI) * value)
}

/// Double-layer integral `integral over C_K of dG/dn ds`.
///
/// The numerator `n . (p(t) - f)` is constant along the element (the normal
/// is perpendicular to the chord), so
///
/// ```text
/// double_layer = (l d / pi q) [atan((2a+b)/q) - atan(b/q)]
/// ```
///
/// and it vanishes identically when the field point lies on the supporting
/// line (`d = 0`), which covers the self term at the element's own midpoint.
pub fn double_layer(elem: &BoundaryElement, field: Point2) -> Result<f64> {
    check_field(field)?;
    let c = quadratic_coeffs(elem, field);
    if is_on_line(&c) {
        return Ok(0.0);
    }
    let d = elem.normal().dot(elem.start() - field);
    let q = c.disc.sqrt();
    let bracket = ((2.0 * c.a + c.b) / q).atan() - (c.b / q).atan();
    Ok(elem.length() * d / (PI * q) * bracket)
}

/// Both integrals sharing one coefficient computation; used by assembly.
pub fn evaluate(elem: &BoundaryElement, field: Point2) -> Result<ElementIntegrals> {
    check_field(field)?;
    let c = quadratic_coeffs(elem, field);
    let l = elem.length();
    if is_on_line(&c) {
        let t0 = -c.b / (2.0 * c.a);
        return Ok(ElementIntegrals {
            single_layer: l / (2.0 * PI) * (l.ln() + x_ln_abs(1.0 - t0) + x_ln_abs(t0) - 1.0),
            double_layer: 0.0,
            case_used: KernelCase::SelfSingular,
        });
    }
    let q = c.disc.sqrt();
    let bracket = ((2.0 * c.a + c.b) / q).atan() - (c.b / q).atan();
    let half_ratio = c.b / (2.0 * c.a);
    let single = l / (4.0 * PI)
        * ((1.0 + half_ratio) * (c.a + c.b + c.e).ln() - half_ratio * c.e.ln() - 2.0
            + (q / c.a) * bracket);
    let d = elem.normal().dot(elem.start() - field);
    Ok(ElementIntegrals {
        single_layer: single,
        double_layer: l * d / (PI * q) * bracket,
        case_used: KernelCase::Regular,
    })
}
