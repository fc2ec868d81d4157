//! Implementations behind the command-line subcommands.
//!
//! Each command is a pure function of its configuration, input files and
//! seed: identical invocations write byte-identical outputs. Output files go
//! through a temp-file + rename so partially written artifacts never appear
//! under their final name. A `run-manifest.toml` recording the invocation is
//! written alongside every output set; it carries the wall-clock duration and
//! is the one file excluded from reproducibility comparisons.

use crate::config::FileConfig;
use crate::coupling::{self, ReferenceTable, DEFAULT_POSITION_TOL};
use crate::error::{Error, Result};
use crate::field::{self, GridSpec};
use crate::geometry::{Point2, PointClass};
use crate::kernel;
use crate::oracle;
use crate::scenario;
use crate::svg;
use crate::system;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Record of one invocation, written alongside its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    pub config_path: Option<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub duration_seconds: f64,
}

impl RunManifest {
    fn new(subcommand: &str) -> (Self, Instant) {
        (
            RunManifest {
                subcommand: subcommand.into(),
                tool_version: crate::VERSION.into(),
                config_path: None,
                inputs: Vec::new(),
                outputs: Vec::new(),
                seed: None,
                duration_seconds: 0.0,
            },
            Instant::now(),
        )
    }

    fn finish(mut self, started: Instant, out_dir: &Path) -> Result<()> {
        self.duration_seconds = started.elapsed().as_secs_f64();
        let text = toml::to_string(&self).map_err(|e| Error::Config(e.to_string()))?;
        write_atomic(&out_dir.join("run-manifest.toml"), text.as_bytes())
    }
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))
}

fn record(path: &Path) -> String {
    path.display().to_string()
}

/// `mesh`: write the discretization as CSV (1-based element indices).
pub fn cmd_mesh(config_path: &Path, out_dir: &Path) -> Result<PathBuf> {
    let (manifest, started) = RunManifest::new("mesh");
    let mut manifest = manifest;
    manifest.config_path = Some(record(config_path));
    let (config, _) = FileConfig::load(config_path)?;
    let mesh = config.geometry().build()?;
    let mut out = String::from("index,x_start,y_start,x_end,y_end,x_mid,y_mid,length,nx,ny\n");
    for (k, e) in mesh.elements().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            k + 1,
            e.start().x,
            e.start().y,
            e.end().x,
            e.end().y,
            e.midpoint().x,
            e.midpoint().y,
            e.length(),
            e.normal().x,
            e.normal().y
        );
    }
    let path = out_dir.join("mesh.csv");
    write_atomic(&path, out.as_bytes())?;
    manifest.outputs.push(record(&path));
    manifest.finish(started, out_dir)?;
    Ok(path)
}

/// Console summary of a solve.
#[derive(Debug, Clone)]
pub struct SolveSummary {
    pub solution_path: PathBuf,
    pub elements: usize,
    pub residual_norm: f64,
    pub condition_estimate: f64,
    pub warnings: Vec<String>,
}

/// `solve`: ingest boundary CSV, recover the Neumann data, persist the
/// solution file.
pub fn cmd_solve(config_path: &Path, fem_path: &Path, out_dir: &Path) -> Result<SolveSummary> {
    let (manifest, started) = RunManifest::new("solve");
    let mut manifest = manifest;
    manifest.config_path = Some(record(config_path));
    manifest.inputs.push(record(fem_path));
    let (config, _) = FileConfig::load(config_path)?;
    let mesh = config.geometry().build()?;
    let fem = coupling::parse_fem_csv(&read_file(fem_path)?, &mesh, DEFAULT_POSITION_TOL)?;
    let mats = system::assemble(&mesh)?;
    let solution = system::solve_dirichlet_to_neumann(&mesh, &mats, &fem.dirichlet_values())?;
    let path = out_dir.join("solution.txt");
    write_atomic(&path, coupling::write_solution(&solution).as_bytes())?;
    manifest.outputs.push(record(&path));
    manifest.finish(started, out_dir)?;
    Ok(SolveSummary {
        solution_path: path,
        elements: mesh.len(),
        residual_norm: solution.residual_norm(),
        condition_estimate: solution.condition_estimate(),
        warnings: solution.warnings().iter().map(|w| w.to_string()).collect(),
    })
}

/// What `eval` should evaluate.
#[derive(Debug, Clone)]
pub enum EvalTarget {
    Grid(GridSpec),
    PointsCsv(PathBuf),
}

/// Parse `x0,x1,y0,y1,nx,ny`.
pub fn parse_grid_spec(text: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 6 {
        return Err(Error::GridConfig(format!(
            "grid spec needs 6 comma-separated values, got {}",
            parts.len()
        )));
    }
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::GridConfig(format!("bad grid number `{s}`")))
    };
    let count = |s: &str| -> Result<usize> {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::GridConfig(format!("bad grid count `{s}`")))
    };
    let spec = GridSpec {
        x_min: num(parts[0])?,
        x_max: num(parts[1])?,
        y_min: num(parts[2])?,
        y_max: num(parts[3])?,
        nx: count(parts[4])?,
        ny: count(parts[5])?,
    };
    spec.validate()?;
    Ok(spec)
}

fn class_name(class: PointClass) -> &'static str {
    match class {
        PointClass::Interior => "interior",
        PointClass::OnBoundary => "boundary",
        PointClass::Exterior => "exterior",
    }
}

#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub field_csv: PathBuf,
    pub svg_path: Option<PathBuf>,
    /// Human-readable notes for points that were skipped (not interior).
    pub warnings: Vec<String>,
}

/// `eval`: evaluate a stored solution over a grid or a points CSV. Points
/// outside the region are flagged in the output and reported as warnings,
/// not errors.
pub fn cmd_eval(
    solution_path: &Path,
    target: &EvalTarget,
    out_dir: &Path,
    want_svg: bool,
) -> Result<EvalOutcome> {
    let (manifest, started) = RunManifest::new("eval");
    let mut manifest = manifest;
    manifest.inputs.push(record(solution_path));
    let solution = coupling::read_solution(&read_file(solution_path)?)?;
    let mut warnings = Vec::new();
    let mut csv = String::from("x,y,value,classification,near_boundary\n");
    let mut svg_text = None;

    match target {
        EvalTarget::Grid(spec) => {
            let grid = field::field_map(&solution, spec)?;
            for s in &grid.samples {
                let value = s.value.map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    s.point.x,
                    s.point.y,
                    value,
                    class_name(s.class),
                    s.near_boundary
                );
            }
            if want_svg {
                svg_text = Some(svg::heatmap(&grid));
            }
        }
        EvalTarget::PointsCsv(points_path) => {
            manifest.inputs.push(record(points_path));
            let mesh = solution.mesh();
            let tol = mesh.default_boundary_tol();
            for (line_no, line) in read_file(points_path)?.lines().enumerate() {
                let line = line.trim_end_matches('\r');
                if line.trim().is_empty() || (line_no == 0 && line.starts_with("x")) {
                    continue;
                }
                let parts: Vec<&str> = line.split(',').collect();
                if parts.len() < 2 {
                    return Err(Error::Format(format!(
                        "points line {}: expected `x,y`",
                        line_no + 1
                    )));
                }
                let parse = |s: &str| -> Result<f64> {
                    s.trim().parse::<f64>().map_err(|_| {
                        Error::Format(format!("points line {}: bad number `{s}`", line_no + 1))
                    })
                };
                let p = Point2::new(parse(parts[0])?, parse(parts[1])?);
                let class = mesh.classify(p, tol);
                let (value, near) = match class {
                    PointClass::Interior => {
                        let near = mesh
                            .elements()
                            .iter()
                            .any(|e| e.distance_to_point(p) < e.length());
                        (field::interior_potential(&solution, p)?.to_string(), near)
                    }
                    _ => {
                        warnings.push(format!(
                            "point ({}, {}) is {}, skipped",
                            p.x,
                            p.y,
                            class_name(class)
                        ));
                        (String::new(), false)
                    }
                };
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    p.x,
                    p.y,
                    value,
                    class_name(class),
                    near
                );
            }
        }
    }

    let field_csv = out_dir.join("field.csv");
    write_atomic(&field_csv, csv.as_bytes())?;
    manifest.outputs.push(record(&field_csv));
    let svg_path = match svg_text {
        Some(text) => {
            let path = out_dir.join("field.svg");
            write_atomic(&path, text.as_bytes())?;
            manifest.outputs.push(record(&path));
            Some(path)
        }
        None => None,
    };
    manifest.finish(started, out_dir)?;
    Ok(EvalOutcome {
        field_csv,
        svg_path,
        warnings,
    })
}

/// `report`: render the measured/calculated error table. With `computed`,
/// the calculated column is replaced by values from that file (one number
/// per line, header optional).
pub fn cmd_report(
    fixture_path: &Path,
    computed_path: Option<&Path>,
    out_dir: &Path,
) -> Result<(PathBuf, String, f64)> {
    let (manifest, started) = RunManifest::new("report");
    let mut manifest = manifest;
    manifest.inputs.push(record(fixture_path));
    let label = fixture_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "reference".into());
    let mut table = ReferenceTable::parse_csv(&read_file(fixture_path)?, label)?;
    if let Some(path) = computed_path {
        manifest.inputs.push(record(path));
        let mut values = Vec::new();
        for (line_no, line) in read_file(path)?.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (line_no == 0 && line.chars().any(|c| c.is_alphabetic())) {
                continue;
            }
            values.push(line.parse::<f64>().map_err(|_| {
                Error::Format(format!(
                    "computed line {}: bad number `{line}`",
                    line_no + 1
                ))
            })?);
        }
        table = table.with_calculated(&values)?;
    }
    let report = coupling::relative_error_report(&table);
    let text = coupling::render_report(&table, &report);
    let path = out_dir.join("report.txt");
    write_atomic(&path, text.as_bytes())?;
    manifest.outputs.push(record(&path));
    manifest.finish(started, out_dir)?;
    Ok((path, text, report.average))
}

/// `converge`: refinement study from the `[converge]` config section.
pub fn cmd_converge(
    config_path: &Path,
    out_dir: &Path,
    want_svg: bool,
) -> Result<scenario::ConvergenceRecord> {
    let (manifest, started) = RunManifest::new("converge");
    let mut manifest = manifest;
    manifest.config_path = Some(record(config_path));
    let (config, _) = FileConfig::load(config_path)?;
    let record_ = scenario::convergence_study(
        &config.geometry(),
        &config.reference()?,
        &config.converge.n_values,
    )?;
    let mut csv = String::from("n_total,max_rel_error,avg_rel_error\n");
    for row in &record_.rows {
        let _ = writeln!(csv, "{},{},{}", row.n_total, row.max_error, row.avg_error);
    }
    let path = out_dir.join("convergence.csv");
    write_atomic(&path, csv.as_bytes())?;
    manifest.outputs.push(record(&path));
    if want_svg {
        let points: Vec<(f64, f64)> = record_
            .rows
            .iter()
            .map(|r| (r.n_total as f64, r.avg_error))
            .collect();
        let svg_path = out_dir.join("convergence.svg");
        write_atomic(
            &svg_path,
            svg::line_plot(&points, "elements", "avg rel error").as_bytes(),
        )?;
        manifest.outputs.push(record(&svg_path));
    }
    manifest.finish(started, out_dir)?;
    Ok(record_)
}

/// Tolerances of the closed-form / quadrature comparison: well-separated
/// cases must agree to 1e-10 (guarded relative), near-singular cases to 1e-6.
pub const ORACLE_REGULAR_TOL: f64 = 1e-10;
pub const ORACLE_NEAR_SINGULAR_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct OracleCheckOutcome {
    pub csv_path: PathBuf,
    pub cases: usize,
    pub failures: usize,
    pub worst_guarded_diff: f64,
}

/// `oracle-check`: randomized closed-form vs quadrature comparison. One in
/// every ten cases is near-singular (field point one millionth of an element
/// length off the element). Returns a nonzero failure count when any case
/// exceeds its tolerance; the full comparison lands in a CSV.
pub fn cmd_oracle_check(seed: u64, count: usize, out_dir: &Path) -> Result<OracleCheckOutcome> {
    if count == 0 {
        return Err(Error::Precondition("case count must be positive".into()));
    }
    let (manifest, started) = RunManifest::new("oracle-check");
    let mut manifest = manifest;
    manifest.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("case,kind,closed_form,quadrature,abs_diff\n");
    let mut failures = 0usize;
    let mut worst = 0.0_f64;

    for case in 0..count {
        let near_singular = case % 10 == 9;
        let (elem, field) = random_case(&mut rng, near_singular);
        let tol = if near_singular {
            ORACLE_NEAR_SINGULAR_TOL
        } else {
            ORACLE_REGULAR_TOL
        };
        let quad_tol = (tol * 1e-2).max(1e-13);
        let kind = if near_singular {
            "near_singular"
        } else {
            "regular"
        };
        let pairs = [
            (
                "single_layer",
                kernel::single_layer(&elem, field)?,
                oracle::single_layer_quadrature(&elem, field, quad_tol)?,
            ),
            (
                "double_layer",
                kernel::double_layer(&elem, field)?,
                oracle::double_layer_quadrature(&elem, field, quad_tol)?,
            ),
        ];
        for (layer, closed, quad) in pairs {
            let diff = (closed - quad).abs();
            let guarded = diff / closed.abs().max(1.0);
            worst = worst.max(guarded);
            if guarded > tol {
                failures += 1;
            }
            let _ = writeln!(csv, "{case},{kind}:{layer},{closed},{quad},{diff}");
        }
    }

    let csv_path = out_dir.join("oracle_check.csv");
    write_atomic(&csv_path, csv.as_bytes())?;
    manifest.outputs.push(record(&csv_path));
    manifest.finish(started, out_dir)?;
    Ok(OracleCheckOutcome {
        csv_path,
        cases: count,
        failures,
        worst_guarded_diff: worst,
    })
}

/// Random element plus field point. Regular cases keep the field point at
/// least 0.01 element lengths away from the segment; near-singular cases
/// place it 1e-6 element lengths off a point in the segment interior.
pub fn random_case(
    rng: &mut ChaCha8Rng,
    near_singular: bool,
) -> (crate::geometry::BoundaryElement, Point2) {
    loop {
        let start = Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let length: f64 = rng.random_range(0.1..2.0);
        let end = start + Point2::new(length * angle.cos(), length * angle.sin());
        let Ok(elem) = crate::geometry::BoundaryElement::new(start, end) else {
            continue;
        };
        if near_singular {
            let t: f64 = rng.random_range(0.05..0.95);
            let side = if rng.random_range(0.0..1.0) < 0.5 {
                1.0
            } else {
                -1.0
            };
            let on_elem = start + ((end - start) * t);
            let field = on_elem + (elem.normal() * side * 1e-6 * length);
            return (elem, field);
        }
        let field = Point2::new(rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5));
        if elem.distance_to_point(field) >= 0.01 * length {
            return (elem, field);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parsing() {
        let spec = parse_grid_spec("-1.0,1.0,-2.0,2.0,11,21").unwrap();
        assert_eq!(spec.nx, 11);
        assert_eq!(spec.ny, 21);
        assert!(parse_grid_spec("1,2,3,4,5").is_err());
        assert!(parse_grid_spec("2,1,0,1,5,5").is_err());
        assert!(parse_grid_spec("a,1,0,1,5,5").is_err());
    }

    #[test]
    fn oracle_check_small_run_passes() {
        let dir = tempfile::tempdir().unwrap();
        let outcome = cmd_oracle_check(7, 50, dir.path()).unwrap();
        assert_eq!(outcome.failures, 0, "worst {}", outcome.worst_guarded_diff);
        assert!(outcome.csv_path.exists());
        assert!(dir.path().join("run-manifest.toml").exists());
        let text = std::fs::read_to_string(&outcome.csv_path).unwrap();
        // Header + 2 rows per case.
        assert_eq!(text.lines().count(), 1 + 2 * 50);
    }

    #[test]
    fn oracle_check_rejects_zero_count() {
        let dir = tempfile::tempdir().unwrap();
        assert!(cmd_oracle_check(7, 0, dir.path()).is_err());
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert!(!path.with_extension("txt.tmp").exists());
    }
}
