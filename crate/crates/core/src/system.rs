//! Influence matrix assembly and the boundary collocation solve.
//!
//! Collocating the boundary integral identity at the element midpoints (edge
//! factor 1/2 on the smooth chord interiors) gives, for Dirichlet data
//! `u` and unknown Neumann data `q`,
//!
//! ```text
//! F1 q = (F2 - I/2) u
//! ```
//!
//! where `F1[m][k]` / `F2[m][k]` are the single/double layer integrals of
//! element `k` evaluated at the midpoint of element `m`. The diagonal of `F2`
//! is exactly zero (the self integral vanishes) and each row of `F2` sums to
//! 1/2, the discrete statement that constants are harmonic. The mixed solver
//! rearranges the same identity so the unknown per element is whichever datum
//! was not prescribed.

use crate::error::{Error, Result};
use crate::geometry::{AnnulusMesh, BoundaryElement};
use crate::kernel;
use crate::linalg::DenseMatrix;

/// Condition estimate above which a solve gets an ill-conditioning warning.
pub const CONDITION_WARN_THRESHOLD: f64 = 1e12;

/// Net-flux tolerance (relative to the flux magnitude scale) for the
/// pure-Neumann compatibility warning.
const NEUMANN_COMPATIBILITY_REL_TOL: f64 = 1e-6;

/// Dense tables of element integrals at all collocation midpoints.
#[derive(Debug, Clone)]
pub struct InfluenceMatrices {
    single_layer: DenseMatrix,
    double_layer: DenseMatrix,
    n: usize,
}

impl InfluenceMatrices {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `F1[m][k]`: single-layer integral of element `k` at midpoint `m`.
    pub fn single_layer(&self) -> &DenseMatrix {
        &self.single_layer
    }

    /// `F2[m][k]`: double-layer integral of element `k` at midpoint `m`.
    pub fn double_layer(&self) -> &DenseMatrix {
        &self.double_layer
    }

    /// Assemble directly from matrices; shapes must agree. Intended for
    /// tests and for callers with custom assembly loops.
    pub fn from_parts(single_layer: DenseMatrix, double_layer: DenseMatrix) -> Result<Self> {
        let n = single_layer.rows();
        if single_layer.cols() != n || double_layer.rows() != n || double_layer.cols() != n {
            return Err(Error::Precondition(
                "influence matrices must be square and congruent".into(),
            ));
        }
        Ok(InfluenceMatrices {
            single_layer,
            double_layer,
            n,
        })
    }
}

/// Assemble both influence matrices for a closed-loop element list.
pub fn assemble_elements(elements: &[BoundaryElement]) -> Result<InfluenceMatrices> {
    let n = elements.len();
    let mut single = DenseMatrix::zeros(n, n);
    let mut double = DenseMatrix::zeros(n, n);
    for (m, target) in elements.iter().enumerate() {
        let collocation = target.midpoint();
        for (k, source) in elements.iter().enumerate() {
            let vals = kernel::evaluate(source, collocation)?;
            single.set(m, k, vals.single_layer);
            double.set(m, k, vals.double_layer);
        }
    }
    Ok(InfluenceMatrices {
        single_layer: single,
        double_layer: double,
        n,
    })
}

pub fn assemble(mesh: &AnnulusMesh) -> Result<InfluenceMatrices> {
    assemble_elements(mesh.elements())
}

/// Per-element prescribed boundary datum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// Prescribed potential.
    Dirichlet(f64),
    /// Prescribed outward normal derivative.
    Neumann(f64),
}

impl BoundaryCondition {
    pub fn value(&self) -> f64 {
        match *self {
            BoundaryCondition::Dirichlet(v) | BoundaryCondition::Neumann(v) => v,
        }
    }
}

/// Exactly one condition per element, in element order.
#[derive(Debug, Clone)]
pub struct BoundaryConditionSet {
    conditions: Vec<BoundaryCondition>,
}

impl BoundaryConditionSet {
    pub fn from_vec(conditions: Vec<BoundaryCondition>) -> Result<Self> {
        for (k, c) in conditions.iter().enumerate() {
            if !c.value().is_finite() {
                return Err(Error::NonFinite(format!(
                    "boundary condition on element {k}"
                )));
            }
        }
        Ok(BoundaryConditionSet { conditions })
    }

    /// Build from sparse `(element_index, condition)` entries. Every element
    /// must receive exactly one condition; a duplicate index means an element
    /// was given two conditions and the input is rejected.
    pub fn from_entries(n: usize, entries: &[(usize, BoundaryCondition)]) -> Result<Self> {
        let mut slots: Vec<Option<BoundaryCondition>> = vec![None; n];
        for &(index, condition) in entries {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, len: n });
            }
            if slots[index].is_some() {
                return Err(Error::Precondition(format!(
                    "element {index} given more than one boundary condition"
                )));
            }
            slots[index] = Some(condition);
        }
        let conditions: Result<Vec<BoundaryCondition>> = slots
            .into_iter()
            .enumerate()
            .map(|(k, slot)| {
                slot.ok_or_else(|| {
                    Error::Precondition(format!("element {k} has no boundary condition"))
                })
            })
            .collect();
        BoundaryConditionSet::from_vec(conditions?)
    }

    pub fn all_dirichlet(values: &[f64]) -> Result<Self> {
        BoundaryConditionSet::from_vec(
            values
                .iter()
                .map(|&v| BoundaryCondition::Dirichlet(v))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn conditions(&self) -> &[BoundaryCondition] {
        &self.conditions
    }
}

/// Non-fatal observations attached to a solve.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveWarning {
    IllConditioned {
        condition_estimate: f64,
    },
    /// Pure-Neumann input whose prescribed flux does not integrate to zero;
    /// the potential is then only determined up to a constant.
    NeumannCompatibility {
        net_flux: f64,
    },
}

impl std::fmt::Display for SolveWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveWarning::IllConditioned { condition_estimate } => {
                write!(
                    f,
                    "ill-conditioned system (estimate {condition_estimate:.3e})"
                )
            }
            SolveWarning::NeumannCompatibility { net_flux } => {
                write!(f, "pure-Neumann data with nonzero net flux {net_flux:.3e}")
            }
        }
    }
}

/// Complete boundary data after a solve: potentials and fluxes on every
/// element, plus solve diagnostics.
#[derive(Debug, Clone)]
pub struct BoundarySolution {
    mesh: AnnulusMesh,
    potentials: Vec<f64>,
    fluxes: Vec<f64>,
    residual_norm: f64,
    condition_estimate: f64,
    warnings: Vec<SolveWarning>,
}

impl BoundarySolution {
    pub(crate) fn from_parts(
        mesh: AnnulusMesh,
        potentials: Vec<f64>,
        fluxes: Vec<f64>,
        residual_norm: f64,
        condition_estimate: f64,
        warnings: Vec<SolveWarning>,
    ) -> Self {
        BoundarySolution {
            mesh,
            potentials,
            fluxes,
            residual_norm,
            condition_estimate,
            warnings,
        }
    }

    pub fn mesh(&self) -> &AnnulusMesh {
        &self.mesh
    }

    /// Potential (Dirichlet datum) per element.
    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    /// Outward normal derivative (Neumann datum) per element.
    pub fn fluxes(&self) -> &[f64] {
        &self.fluxes
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn warnings(&self) -> &[SolveWarning] {
        &self.warnings
    }

    /// Boundary flux integrated over the whole boundary. Zero for data
    /// consistent with a harmonic potential.
    pub fn net_flux(&self) -> f64 {
        self.mesh
            .elements()
            .iter()
            .zip(&self.fluxes)
            .map(|(e, &q)| e.length() * q)
            .sum()
    }
}

/// Recover the Neumann data from prescribed Dirichlet data on every element.
pub fn solve_dirichlet_to_neumann(
    mesh: &AnnulusMesh,
    mats: &InfluenceMatrices,
    potentials: &[f64],
) -> Result<BoundarySolution> {
    let n = mats.n();
    if potentials.len() != n {
        return Err(Error::Precondition(format!(
            "expected {n} Dirichlet values, got {}",
            potentials.len()
        )));
    }
    if mesh.len() != n {
        return Err(Error::Precondition(format!(
            "mesh has {} elements but matrices are {n}x{n}",
            mesh.len()
        )));
    }
    if let Some(bad) = potentials.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "Dirichlet value on element {bad}"
        )));
    }

    let mut rhs = mats.double_layer.mul_vec(potentials);
    for (r, &u) in rhs.iter_mut().zip(potentials) {
        *r -= 0.5 * u;
    }
    let lu = mats.single_layer.lu()?;
    let condition_estimate = mats.single_layer.norm_one() * lu.inverse_norm_one_estimate();
    let fluxes = lu.solve(&rhs);

    let reproduced = mats.single_layer.mul_vec(&fluxes);
    let residual_norm = reproduced
        .iter()
        .zip(&rhs)
        .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));

    let mut warnings = Vec::new();
    if condition_estimate > CONDITION_WARN_THRESHOLD {
        warnings.push(SolveWarning::IllConditioned { condition_estimate });
    }
    Ok(BoundarySolution::from_parts(
        mesh.clone(),
        potentials.to_vec(),
        fluxes,
        residual_norm,
        condition_estimate,
        warnings,
    ))
}

/// Solve with an arbitrary mix of Dirichlet and Neumann elements. Each
/// element's unknown is the complementary datum; the assembled system keeps
/// the all-Dirichlet case identical to [`solve_dirichlet_to_neumann`].
pub fn solve_mixed(
    mesh: &AnnulusMesh,
    mats: &InfluenceMatrices,
    bc: &BoundaryConditionSet,
) -> Result<BoundarySolution> {
    let n = mats.n();
    if bc.len() != n {
        return Err(Error::Precondition(format!(
            "expected {n} boundary conditions, got {}",
            bc.len()
        )));
    }
    if mesh.len() != n {
        return Err(Error::Precondition(format!(
            "mesh has {} elements but matrices are {n}x{n}",
            mesh.len()
        )));
    }

    let conditions = bc.conditions();
    let mut lhs = DenseMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for (m, rhs_m) in rhs.iter_mut().enumerate() {
        for (k, condition) in conditions.iter().enumerate() {
            let delta = if m == k { 0.5 } else { 0.0 };
            match *condition {
                BoundaryCondition::Dirichlet(u) => {
                    lhs.set(m, k, mats.single_layer.get(m, k));
                    *rhs_m += u * (mats.double_layer.get(m, k) - delta);
                }
                BoundaryCondition::Neumann(q) => {
                    lhs.set(m, k, delta - mats.double_layer.get(m, k));
                    *rhs_m -= q * mats.single_layer.get(m, k);
                }
            }
        }
    }

    let lu = lhs.lu()?;
    let condition_estimate = lhs.norm_one() * lu.inverse_norm_one_estimate();
    let unknowns = lu.solve(&rhs);

    let reproduced = lhs.mul_vec(&unknowns);
    let residual_norm = reproduced
        .iter()
        .zip(&rhs)
        .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));

    let mut potentials = vec![0.0; n];
    let mut fluxes = vec![0.0; n];
    for k in 0..n {
        match conditions[k] {
            BoundaryCondition::Dirichlet(u) => {
                potentials[k] = u;
                fluxes[k] = unknowns[k];
            }
            BoundaryCondition::Neumann(q) => {
                potentials[k] = unknowns[k];
                fluxes[k] = q;
            }
        }
    }

    let mut warnings = Vec::new();
    if condition_estimate > CONDITION_WARN_THRESHOLD {
        warnings.push(SolveWarning::IllConditioned { condition_estimate });
    }
    let all_neumann = conditions
        .iter()
        .all(|c| matches!(c, BoundaryCondition::Neumann(_)));
    if all_neumann {
        let net_flux: f64 = mesh
            .elements()
            .iter()
            .zip(&fluxes)
            .map(|(e, &q)| e.length() * q)
            .sum();
        let scale: f64 = mesh
            .elements()
            .iter()
            .zip(&fluxes)
            .map(|(e, &q)| e.length() * q.abs())
            .sum();
        if net_flux.abs() > NEUMANN_COMPATIBILITY_REL_TOL * scale.max(f64::MIN_POSITIVE) {
            warnings.push(SolveWarning::NeumannCompatibility { net_flux });
        }
    }

    Ok(BoundarySolution::from_parts(
        mesh.clone(),
        potentials,
        fluxes,
        residual_norm,
        condition_estimate,
        warnings,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_annulus, BoundaryElement, Point2};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit_annulus(n_half: usize) -> AnnulusMesh {
        build_annulus(
            Point2::new(0.0, 0.0),
            2.0,
            Point2::new(0.0, 0.0),
            1.0,
            n_half,
            n_half,
        )
        .unwrap()
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn benchmark_mesh_dimensions_and_f2_structure() {
        let mesh = build_annulus(
            Point2::new(0.0, 0.0),
            0.100,
            Point2::new(0.0, 0.0),
            0.015,
            40,
            40,
        )
        .unwrap();
        let mats = assemble(&mesh).unwrap();
        assert_eq!(mats.n(), 80);
        for m in 0..80 {
            assert_eq!(mats.double_layer().get(m, m), 0.0);
            let row_sum: f64 = (0..80).map(|k| mats.double_layer().get(m, k)).sum();
            assert_relative_eq!(row_sum, 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn unit_square_has_congruent_diagonal() {
        // Four unit-length elements around a square, outward normals.
        let v = [
            Point2::new(-0.5, -0.5),
            Point2::new(0.5, -0.5),
            Point2::new(0.5, 0.5),
            Point2::new(-0.5, 0.5),
        ];
        let elements: Vec<BoundaryElement> = (0..4)
            .map(|k| BoundaryElement::new(v[k], v[(k + 1) % 4]).unwrap())
            .collect();
        let mats = assemble_elements(&elements).unwrap();
        let expected = (0.5_f64.ln() - 1.0) / (2.0 * PI);
        for k in 0..4 {
            assert_relative_eq!(
                mats.single_layer().get(k, k),
                expected,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn constant_potential_has_zero_flux() {
        let mesh = unit_annulus(20);
        let mats = assemble(&mesh).unwrap();
        let c = 4.2;
        let sol = solve_dirichlet_to_neumann(&mesh, &mats, &vec![c; mesh.len()]).unwrap();
        for &q in sol.fluxes() {
            assert!(q.abs() <= 1e-9 * c.abs(), "flux {q} not ~0");
        }
    }

    #[test]
    fn log_radius_reference_flux() {
        let mesh = unit_annulus(40);
        let mats = assemble(&mesh).unwrap();
        let potentials: Vec<f64> = mesh
            .elements()
            .iter()
            .map(|e| e.midpoint().norm().ln())
            .collect();
        let sol = solve_dirichlet_to_neumann(&mesh, &mats, &potentials).unwrap();
        for (e, &q) in mesh.elements().iter().zip(sol.fluxes()) {
            let m = e.midpoint();
            let exact = e.normal().dot(m) / m.dot(m);
            assert!(
                ((q - exact) / exact).abs() < 0.02,
                "flux {q} vs {exact} at r={}",
                m.norm()
            );
        }
        // Outer fluxes near +1/2, inner near -1.
        assert_relative_eq!(sol.fluxes()[0], 0.5, max_relative = 0.02);
        assert_relative_eq!(sol.fluxes()[40], -1.0, max_relative = 0.02);
    }

    #[test]
    fn linear_reference_flux_abs_error() {
        let mut previous = f64::INFINITY;
        for &n_half in &[20usize, 40] {
            let mesh = unit_annulus(n_half);
            let mats = assemble(&mesh).unwrap();
            let potentials: Vec<f64> = mesh.elements().iter().map(|e| e.midpoint().x).collect();
            let sol = solve_dirichlet_to_neumann(&mesh, &mats, &potentials).unwrap();
            let max_err = mesh
                .elements()
                .iter()
                .zip(sol.fluxes())
                .map(|(e, &q)| (q - e.normal().x).abs())
                .fold(0.0, f64::max);
            assert!(max_err <= 0.05, "N={} err={max_err}", 2 * n_half);
            assert!(
                max_err < previous / 1.5,
                "error should drop with refinement"
            );
            previous = max_err;
        }
    }

    #[test]
    fn solve_records_residual_and_condition() {
        let mesh = unit_annulus(20);
        let mats = assemble(&mesh).unwrap();
        let potentials: Vec<f64> = mesh.elements().iter().map(|e| e.midpoint().x).collect();
        let sol = solve_dirichlet_to_neumann(&mesh, &mats, &potentials).unwrap();
        assert!(sol.residual_norm() <= 1e-9 * max_abs(sol.potentials()).max(1.0));
        assert!(sol.condition_estimate() > 1.0);
        assert!(sol.condition_estimate() < 1e8);
        assert!(sol.warnings().is_empty());
    }

    #[test]
    fn all_dirichlet_mixed_matches_direct_solver() {
        let mesh = unit_annulus(20);
        let mats = assemble(&mesh).unwrap();
        let potentials: Vec<f64> = mesh
            .elements()
            .iter()
            .map(|e| e.midpoint().norm().ln())
            .collect();
        let direct = solve_dirichlet_to_neumann(&mesh, &mats, &potentials).unwrap();
        let bc = BoundaryConditionSet::all_dirichlet(&potentials).unwrap();
        let mixed = solve_mixed(&mesh, &mats, &bc).unwrap();
        for (a, b) in direct.fluxes().iter().zip(mixed.fluxes()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn mixed_dirichlet_outer_neumann_inner() {
        let mesh = unit_annulus(40);
        let mats = assemble(&mesh).unwrap();
        let mut conditions = Vec::new();
        for (k, e) in mesh.elements().iter().enumerate() {
            if k < mesh.n_outer() {
                conditions.push(BoundaryCondition::Dirichlet(e.midpoint().norm().ln()));
            } else {
                conditions.push(BoundaryCondition::Neumann(-1.0));
            }
        }
        let bc = BoundaryConditionSet::from_vec(conditions).unwrap();
        let sol = solve_mixed(&mesh, &mats, &bc).unwrap();
        // Recovered inner potentials should be ln(1) = 0, outer fluxes 1/2.
        for &u in &sol.potentials()[mesh.n_outer()..] {
            assert!(u.abs() <= 2e-2, "inner potential {u}");
        }
        for &q in &sol.fluxes()[..mesh.n_outer()] {
            assert!(((q - 0.5) / 0.5).abs() <= 0.02, "outer flux {q}");
        }
    }

    #[test]
    fn duplicate_condition_rejected() {
        let entries = [
            (0, BoundaryCondition::Dirichlet(1.0)),
            (0, BoundaryCondition::Neumann(0.0)),
            (1, BoundaryCondition::Dirichlet(1.0)),
        ];
        assert!(BoundaryConditionSet::from_entries(2, &entries).is_err());
        let incomplete = [(0, BoundaryCondition::Dirichlet(1.0))];
        assert!(BoundaryConditionSet::from_entries(2, &incomplete).is_err());
    }

    #[test]
    fn pure_neumann_warns_on_incompatible_data() {
        let mesh = unit_annulus(10);
        let mats = assemble(&mesh).unwrap();
        // Uniform positive flux cannot integrate to zero over the boundary.
        let bc = BoundaryConditionSet::from_vec(vec![BoundaryCondition::Neumann(1.0); mesh.len()])
            .unwrap();
        match solve_mixed(&mesh, &mats, &bc) {
            Ok(sol) => {
                assert!(sol
                    .warnings()
                    .iter()
                    .any(|w| matches!(w, SolveWarning::NeumannCompatibility { .. })));
            }
            // The rank-deficient system may also surface as an exactly
            // singular factorization.
            Err(Error::Singular { .. }) => {}
            Err(other) => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn collocation_identity_residual() {
        // Substituting the solution back into the half-identity leaves a
        // per-row residual at solver precision.
        let mesh = unit_annulus(20);
        let mats = assemble(&mesh).unwrap();
        let potentials: Vec<f64> = mesh
            .elements()
            .iter()
            .map(|e| {
                let m = e.midpoint();
                m.x * m.x - m.y * m.y
            })
            .collect();
        let sol = solve_dirichlet_to_neumann(&mesh, &mats, &potentials).unwrap();
        let n = mesh.len();
        let scale = max_abs(sol.potentials());
        for m in 0..n {
            let mut lhs = 0.5 * sol.potentials()[m];
            for k in 0..n {
                lhs -= sol.potentials()[k] * mats.double_layer().get(m, k)
                    - sol.fluxes()[k] * mats.single_layer().get(m, k);
            }
            assert!(lhs.abs() <= 1e-9 * scale, "row {m} residual {lhs}");
        }
    }
}
