//! Constant-element boundary element method (BEM) for the 2D Laplace equation
//! on annular domains.
//!
//! The solver ingests potential values on the two circular boundaries of an
//! annulus (typically exported from an external finite element run), recovers
//! the complementary normal-derivative data by collocation, and evaluates the
//! potential anywhere in the annular region. The intended application is
//! magnetic vector potential propagation through the air gap of a levitation
//! device, where the conducting plate sits between two fictitious circles and
//! only the boundary data changes as the plate moves.
//!
//! Pipeline:
//!
//! ```text
//! boundary CSV ──> [coupling] ──> Dirichlet data
//!                                     │
//! [geometry] annulus mesh ──> [system] assemble + solve ──> boundary solution
//!                                     │
//!                              [field] evaluate at interior points / grids
//! ```
//!
//! Every closed-form element integral in [`kernel`] is cross-checked against
//! the adaptive quadrature in [`oracle`]; the `oracle-check` CLI subcommand
//! runs that comparison on demand.

pub mod cli;
pub mod config;
pub mod coupling;
pub mod error;
pub mod field;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod scenario;
pub mod svg;
pub mod system;

pub use error::{Error, Result};
pub use geometry::{
    build_annulus, classify_point, discretize_circle, AnnulusMesh, BoundaryElement, Orientation,
    Point2, PointClass,
};
pub use system::{
    assemble, assemble_elements, solve_dirichlet_to_neumann, solve_mixed, BoundaryCondition,
    BoundaryConditionSet, BoundarySolution, InfluenceMatrices,
};

/// Version string reported in run manifests and over the C ABI.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
