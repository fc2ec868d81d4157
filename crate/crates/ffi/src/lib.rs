//! C ABI for the boundary element solver: opaque handles, status codes, and
//! a thread-local last-error message.
//!
//! Conventions:
//! - Every fallible call returns [`AbStatus`]; `AB_OK` is zero.
//! - Handles created by `ab_*_build`/`ab_solve_*` must be released with the
//!   matching `ab_*_free`; freeing null is a no-op.
//! - On any non-OK status, `ab_last_error_message` returns a description of
//!   the failure on the calling thread.

use annulus_bem::coupling;
use annulus_bem::error::Error;
use annulus_bem::field;
use annulus_bem::geometry::{build_annulus, AnnulusMesh, Point2, PointClass};
use annulus_bem::system::{self, BoundarySolution};
use std::cell::RefCell;
use std::ffi::{c_char, c_int};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbStatus {
    AbOk = 0,
    AbNullPointer = 1,
    AbInvalidArgument = 2,
    AbGeometryError = 3,
    AbDataError = 4,
    AbNumericalError = 5,
    AbNotInterior = 6,
}

/// Opaque discretized annular boundary.
pub struct AbMesh {
    inner: AnnulusMesh,
}

/// Opaque boundary solution (potentials and fluxes on every element).
pub struct AbSolution {
    inner: BoundarySolution,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message.into());
}

fn status_of(err: &Error) -> AbStatus {
    match err {
        Error::InvalidMesh(_) | Error::Geometry(_) => AbStatus::AbGeometryError,
        Error::Format(_)
        | Error::Alignment { .. }
        | Error::Data(_)
        | Error::Parse { .. }
        | Error::Version { .. } => AbStatus::AbDataError,
        Error::NotInterior { .. } => AbStatus::AbNotInterior,
        Error::NonFinite(_) | Error::Singular { .. } | Error::QuadratureConvergence { .. } => {
            AbStatus::AbNumericalError
        }
        _ => AbStatus::AbInvalidArgument,
    }
}

fn fail(err: Error) -> AbStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null_arg(what: &str) -> AbStatus {
    set_error(format!("null pointer: {what}"));
    AbStatus::AbNullPointer
}

/// Version string of the underlying solver; static storage, do not free.
#[no_mangle]
pub extern "C" fn ab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes excluding
/// the terminator. `buf` may be null to query the length.
///
/// # Safety
/// `buf`, when non-null, must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ab_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buf.is_null() && len > 0 {
            let copy = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, copy);
            *buf.add(copy) = 0;
        }
        bytes.len()
    })
}

/// Build an annular mesh: outer loop counter-clockwise, inner clockwise,
/// element ordering outer-first. On success `*out` owns the mesh.
///
/// # Safety
/// `out` must be a valid pointer to an `AbMesh*` slot.
#[no_mangle]
pub unsafe extern "C" fn ab_mesh_build(
    outer_center_x: f64,
    outer_center_y: f64,
    outer_radius: f64,
    inner_center_x: f64,
    inner_center_y: f64,
    inner_radius: f64,
    n_outer: usize,
    n_inner: usize,
    out: *mut *mut AbMesh,
) -> AbStatus {
    if out.is_null() {
        return null_arg("out");
    }
    match build_annulus(
        Point2::new(outer_center_x, outer_center_y),
        outer_radius,
        Point2::new(inner_center_x, inner_center_y),
        inner_radius,
        n_outer,
        n_inner,
    ) {
        Ok(mesh) => {
            *out = Box::into_raw(Box::new(AbMesh { inner: mesh }));
            AbStatus::AbOk
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `mesh` must be null or a pointer returned by [`ab_mesh_build`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ab_mesh_free(mesh: *mut AbMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Total element count (outer + inner), 0 for null.
///
/// # Safety
/// `mesh` must be null or a live mesh handle.
#[no_mangle]
pub unsafe extern "C" fn ab_mesh_element_count(mesh: *const AbMesh) -> usize {
    if mesh.is_null() {
        return 0;
    }
    (*mesh).inner.len()
}

/// Write the collocation midpoints as interleaved `x0,y0,x1,y1,...`;
/// `len` must be exactly `2 * element_count`.
///
/// # Safety
/// `mesh` must be a live mesh handle and `xy` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn ab_mesh_midpoints(
    mesh: *const AbMesh,
    xy: *mut f64,
    len: usize,
) -> AbStatus {
    if mesh.is_null() {
        return null_arg("mesh");
    }
    if xy.is_null() {
        return null_arg("xy");
    }
    let elements = (*mesh).inner.elements();
    if len != 2 * elements.len() {
        set_error(format!(
            "need buffer of {} doubles, got {len}",
            2 * elements.len()
        ));
        return AbStatus::AbInvalidArgument;
    }
    for (k, e) in elements.iter().enumerate() {
        *xy.add(2 * k) = e.midpoint().x;
        *xy.add(2 * k + 1) = e.midpoint().y;
    }
    AbStatus::AbOk
}

/// Solve for the Neumann data given Dirichlet potentials on every element
/// (element order, `len` equal to the element count). On success `*out`
/// owns the solution.
///
/// # Safety
/// `mesh` must be a live mesh handle, `potentials` must point to `len`
/// readable doubles, and `out` must be a valid `AbSolution*` slot.
#[no_mangle]
pub unsafe extern "C" fn ab_solve_dirichlet(
    mesh: *const AbMesh,
    potentials: *const f64,
    len: usize,
    out: *mut *mut AbSolution,
) -> AbStatus {
    if mesh.is_null() {
        return null_arg("mesh");
    }
    if potentials.is_null() {
        return null_arg("potentials");
    }
    if out.is_null() {
        return null_arg("out");
    }
    let mesh = &(*mesh).inner;
    if len != mesh.len() {
        set_error(format!("need {} potentials, got {len}", mesh.len()));
        return AbStatus::AbInvalidArgument;
    }
    let data = std::slice::from_raw_parts(potentials, len);
    let result = system::assemble(mesh)
        .and_then(|mats| system::solve_dirichlet_to_neumann(mesh, &mats, data));
    match result {
        Ok(solution) => {
            *out = Box::into_raw(Box::new(AbSolution { inner: solution }));
            AbStatus::AbOk
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `solution` must be null or a pointer returned by a solve call that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ab_solution_free(solution: *mut AbSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Element count of the solution, 0 for null.
///
/// # Safety
/// `solution` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn ab_solution_size(solution: *const AbSolution) -> usize {
    if solution.is_null() {
        return 0;
    }
    (*solution).inner.potentials().len()
}

unsafe fn copy_vector(values: &[f64], out: *mut f64, len: usize) -> AbStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if len != values.len() {
        set_error(format!(
            "need buffer of {} doubles, got {len}",
            values.len()
        ));
        return AbStatus::AbInvalidArgument;
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, len);
    AbStatus::AbOk
}

/// Copy the per-element potentials; `len` must equal the solution size.
///
/// # Safety
/// `solution` must be a live handle; `out` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn ab_solution_potentials(
    solution: *const AbSolution,
    out: *mut f64,
    len: usize,
) -> AbStatus {
    if solution.is_null() {
        return null_arg("solution");
    }
    copy_vector((*solution).inner.potentials(), out, len)
}

/// Copy the per-element outward normal derivatives; `len` must equal the
/// solution size.
///
/// # Safety
/// `solution` must be a live handle; `out` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn ab_solution_fluxes(
    solution: *const AbSolution,
    out: *mut f64,
    len: usize,
) -> AbStatus {
    if solution.is_null() {
        return null_arg("solution");
    }
    copy_vector((*solution).inner.fluxes(), out, len)
}

/// Infinity-norm residual of the collocation solve; NaN for null.
///
/// # Safety
/// `solution` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn ab_solution_residual_norm(solution: *const AbSolution) -> f64 {
    if solution.is_null() {
        return f64::NAN;
    }
    (*solution).inner.residual_norm()
}

/// 1-norm condition estimate of the solve; NaN for null.
///
/// # Safety
/// `solution` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn ab_solution_condition_estimate(solution: *const AbSolution) -> f64 {
    if solution.is_null() {
        return f64::NAN;
    }
    (*solution).inner.condition_estimate()
}

/// Classify a point against the mesh: 0 exterior, 1 on the boundary,
/// 2 interior. Uses the mesh's default boundary tolerance.
///
/// # Safety
/// `mesh` must be a live mesh handle; `out_class` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ab_classify_point(
    mesh: *const AbMesh,
    x: f64,
    y: f64,
    out_class: *mut c_int,
) -> AbStatus {
    if mesh.is_null() {
        return null_arg("mesh");
    }
    if out_class.is_null() {
        return null_arg("out_class");
    }
    let mesh = &(*mesh).inner;
    let class = mesh.classify(Point2::new(x, y), mesh.default_boundary_tol());
    *out_class = match class {
        PointClass::Exterior => 0,
        PointClass::OnBoundary => 1,
        PointClass::Interior => 2,
    };
    AbStatus::AbOk
}

/// Evaluate the solved potential at an interior point.
///
/// # Safety
/// `solution` must be a live solution handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ab_eval_interior(
    solution: *const AbSolution,
    x: f64,
    y: f64,
    out_value: *mut f64,
) -> AbStatus {
    if solution.is_null() {
        return null_arg("solution");
    }
    if out_value.is_null() {
        return null_arg("out_value");
    }
    match field::interior_potential(&(*solution).inner, Point2::new(x, y)) {
        Ok(value) => {
            *out_value = value;
            AbStatus::AbOk
        }
        Err(e) => fail(e),
    }
}

/// Serialize the solution to the versioned text format. Same buffer protocol
/// as [`ab_last_error_message`]: returns the full length, copies up to
/// `len - 1` bytes plus a NUL.
///
/// # Safety
/// `solution` must be a live handle; `buf`, when non-null, must point to
/// `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ab_solution_serialize(
    solution: *const AbSolution,
    buf: *mut c_char,
    len: usize,
) -> usize {
    if solution.is_null() {
        return 0;
    }
    let text = coupling::write_solution(&(*solution).inner);
    let bytes = text.as_bytes();
    if !buf.is_null() && len > 0 {
        let copy = bytes.len().min(len - 1);
        std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, copy);
        *buf.add(copy) = 0;
    }
    bytes.len()
}
