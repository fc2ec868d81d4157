//! File-based hand-off with the external field solver and report generation.
//!
//! Boundary potentials computed elsewhere arrive as CSV with header
//! `index,x,y,a`: 1-based element index, collocation midpoint coordinates and
//! the potential value. Rows are validated against the mesh (every index
//! exactly once, midpoints matching within a position tolerance).
//!
//! Solutions persist in a versioned line-oriented text format with
//! shortest-round-trip decimal floats, so write/read round-trips are
//! bit-exact.

use crate::error::{Error, Result};
use crate::geometry::{build_annulus, AnnulusMesh, Point2};
use crate::system::BoundarySolution;
use std::fmt::Write as _;

/// Default tolerance for matching imported midpoints: far below element
/// lengths of practical meshes yet tolerant of exported-coordinate rounding.
pub const DEFAULT_POSITION_TOL: f64 = 1e-6;

/// First line of the solution file format.
pub const SOLUTION_FORMAT_VERSION: u32 = 1;

/// One imported boundary row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemEntry {
    /// 1-based element index.
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub potential: f64,
}

/// Validated, index-sorted boundary potentials from an external FEM run.
#[derive(Debug, Clone)]
pub struct FemBoundaryData {
    entries: Vec<FemEntry>,
    source_label: String,
}

impl FemBoundaryData {
    pub fn entries(&self) -> &[FemEntry] {
        &self.entries
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Projection onto a Dirichlet data vector in element order.
    pub fn dirichlet_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.potential).collect()
    }

    /// Serialize back to the interchange CSV; `parse_fem_csv` of the output
    /// reproduces the data exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,x,y,a\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{}", e.index, e.x, e.y, e.potential);
        }
        out
    }
}

/// Parse and validate `index,x,y,a` CSV against a mesh.
///
/// Errors name the offending row: missing or duplicate indices are format
/// errors, a midpoint further than `position_tol` from the mesh midpoint is
/// an alignment error reporting the worst offender, and non-finite values
/// are data errors.
pub fn parse_fem_csv(text: &str, mesh: &AnnulusMesh, position_tol: f64) -> Result<FemBoundaryData> {
    let n = mesh.len();
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty boundary data file".into()))?;
    if header.trim() != "index,x,y,a" {
        return Err(Error::Format(format!(
            "expected header `index,x,y,a`, found `{}`",
            header.trim()
        )));
    }
    let mut slots: Vec<Option<FemEntry>> = vec![None; n];
    for (line_no, line) in lines.enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Format(format!(
                "line {}: expected 4 fields, found {}",
                line_no + 2,
                fields.len()
            )));
        }
        let index: usize = fields[0].trim().parse().map_err(|_| {
            Error::Format(format!("line {}: bad index `{}`", line_no + 2, fields[0]))
        })?;
        if index == 0 || index > n {
            return Err(Error::Format(format!("index {index} outside 1..={n}")));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("line {}: bad {what} `{s}`", line_no + 2)))
        };
        let entry = FemEntry {
            index,
            x: parse_f(fields[1], "x")?,
            y: parse_f(fields[2], "y")?,
            potential: parse_f(fields[3], "a")?,
        };
        if !entry.potential.is_finite() || !entry.x.is_finite() || !entry.y.is_finite() {
            return Err(Error::Data(format!("non-finite value at index {index}")));
        }
        if slots[index - 1].is_some() {
            return Err(Error::Format(format!("duplicate index {index}")));
        }
        slots[index - 1] = Some(entry);
    }
    let mut entries = Vec::with_capacity(n);
    for (k, slot) in slots.into_iter().enumerate() {
        entries.push(slot.ok_or_else(|| Error::Format(format!("missing index {}", k + 1)))?);
    }
    // Alignment: report the worst offender, not the first.
    let mut worst: Option<(usize, f64)> = None;
    for (entry, element) in entries.iter().zip(mesh.elements()) {
        let d = Point2::new(entry.x, entry.y).distance(element.midpoint());
        if d > position_tol && worst.is_none_or(|(_, wd)| d > wd) {
            worst = Some((entry.index, d));
        }
    }
    if let Some((index, distance)) = worst {
        return Err(Error::Alignment {
            index,
            distance,
            tol: position_tol,
        });
    }
    Ok(FemBoundaryData {
        entries,
        source_label: "csv".into(),
    })
}

/// Rows of (measured, calculated) reference values, e.g. transcribed
/// benchmark tables. Measured values must be nonzero so relative errors are
/// defined.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    rows: Vec<(f64, f64)>,
    label: String,
}

impl ReferenceTable {
    pub fn new(rows: Vec<(f64, f64)>, label: impl Into<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Data("reference table has no rows".into()));
        }
        for (k, &(measured, calculated)) in rows.iter().enumerate() {
            if measured == 0.0 {
                return Err(Error::Data(format!(
                    "row {}: measured value is zero, relative error undefined",
                    k + 1
                )));
            }
            if !measured.is_finite() || !calculated.is_finite() {
                return Err(Error::Data(format!("row {}: non-finite value", k + 1)));
            }
        }
        Ok(ReferenceTable {
            rows,
            label: label.into(),
        })
    }

    /// Parse `measured,calculated` CSV (header optional).
    pub fn parse_csv(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut rows = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if line_no == 0 && line.chars().any(|c| c.is_alphabetic()) {
                continue; // header
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 2 {
                return Err(Error::Format(format!(
                    "line {}: expected `measured,calculated`",
                    line_no + 1
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("line {}: bad number `{s}`", line_no + 1)))
            };
            rows.push((parse(fields[0])?, parse(fields[1])?));
        }
        ReferenceTable::new(rows, label)
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Replace the calculated column, keeping the measured one.
    pub fn with_calculated(&self, calculated: &[f64]) -> Result<ReferenceTable> {
        if calculated.len() != self.rows.len() {
            return Err(Error::Data(format!(
                "got {} calculated values for {} reference rows",
                calculated.len(),
                self.rows.len()
            )));
        }
        ReferenceTable::new(
            self.rows
                .iter()
                .zip(calculated)
                .map(|(&(m, _), &c)| (m, c))
                .collect(),
            self.label.clone(),
        )
    }
}

/// Per-row relative errors in percent and their arithmetic mean.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub row_errors: Vec<f64>,
    pub average: f64,
}

/// Row error `|measured - calculated| / |measured| * 100`; the average is
/// taken over the unrounded row errors. Rounding to two decimals happens
/// only at display time.
pub fn relative_error_report(table: &ReferenceTable) -> ErrorReport {
    let row_errors: Vec<f64> = table
        .rows()
        .iter()
        .map(|&(measured, calculated)| (measured - calculated).abs() / measured.abs() * 100.0)
        .collect();
    let average = row_errors.iter().sum::<f64>() / row_errors.len() as f64;
    ErrorReport {
        row_errors,
        average,
    }
}

/// Plain-text table in the benchmark layout: measured, calculated, per-row
/// error and the overall average in the first row.
pub fn render_report(table: &ReferenceTable, report: &ErrorReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", table.label());
    let _ = writeln!(
        out,
        "{:>14} {:>16} {:>9} {:>14}",
        "Measured (T m)", "Calculated (T m)", "Error", "Average error"
    );
    for (k, (&(measured, calculated), &err)) in
        table.rows().iter().zip(&report.row_errors).enumerate()
    {
        let avg = if k == 0 {
            format!("{:.2}%", report.average)
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{:>14} {:>16} {:>8.2}% {:>14}",
            format!("{measured}"),
            format!("{calculated}"),
            err,
            avg
        );
    }
    out
}

/// Serialize a solution (mesh parameters, boundary vectors, diagnostics) to
/// the versioned text format. Floats use shortest-round-trip decimals, so
/// reading the output reproduces every vector bit-exactly.
pub fn write_solution(solution: &BoundarySolution) -> String {
    let mesh = solution.mesh();
    let mut out = String::new();
    let _ = writeln!(out, "bem-annulus-solution v{SOLUTION_FORMAT_VERSION}");
    let _ = writeln!(
        out,
        "outer_center {} {}",
        mesh.outer_center().x,
        mesh.outer_center().y
    );
    let _ = writeln!(out, "outer_radius {}", mesh.outer_radius());
    let _ = writeln!(
        out,
        "inner_center {} {}",
        mesh.inner_center().x,
        mesh.inner_center().y
    );
    let _ = writeln!(out, "inner_radius {}", mesh.inner_radius());
    let _ = writeln!(out, "n_outer {}", mesh.n_outer());
    let _ = writeln!(out, "n_inner {}", mesh.n_inner());
    let _ = writeln!(out, "residual_norm {}", solution.residual_norm());
    let _ = writeln!(out, "condition_estimate {}", solution.condition_estimate());
    let _ = writeln!(out, "potentials {}", solution.potentials().len());
    for v in solution.potentials() {
        let _ = writeln!(out, "{v}");
    }
    let _ = writeln!(out, "fluxes {}", solution.fluxes().len());
    for v in solution.fluxes() {
        let _ = writeln!(out, "{v}");
    }
    let _ = writeln!(out, "end");
    out
}

/// Line cursor that tracks the byte offset of truncation/parse errors.
struct Cursor<'a> {
    rest: &'a str,
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            rest: text,
            offset: 0,
        }
    }

    fn next_line(&mut self, expected: &str) -> Result<&'a str> {
        if self.rest.is_empty() {
            return Err(Error::Parse {
                offset: self.offset,
                message: format!("file truncated, expected {expected}"),
            });
        }
        let (line, consumed) = match self.rest.find('\n') {
            Some(pos) => (&self.rest[..pos], pos + 1),
            None => (self.rest, self.rest.len()),
        };
        self.offset += consumed;
        self.rest = &self.rest[consumed..];
        Ok(line.trim_end_matches('\r'))
    }

    fn parse_error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.offset,
            message: message.into(),
        }
    }
}

/// Read a solution file produced by [`write_solution`]. The mesh is rebuilt
/// from its recorded parameters; files written by a newer major format
/// version are rejected.
pub fn read_solution(text: &str) -> Result<BoundarySolution> {
    let mut cur = Cursor::new(text);
    let header = cur.next_line("format header")?;
    let version_str = header
        .strip_prefix("bem-annulus-solution v")
        .ok_or_else(|| cur.parse_error(format!("unrecognized header `{header}`")))?;
    let found: u32 = version_str
        .parse()
        .map_err(|_| cur.parse_error(format!("bad version `{version_str}`")))?;
    if found != SOLUTION_FORMAT_VERSION {
        return Err(Error::Version {
            found,
            supported: SOLUTION_FORMAT_VERSION,
        });
    }

    fn fields<'a>(
        cur: &Cursor<'_>,
        line: &'a str,
        key: &str,
        count: usize,
    ) -> Result<Vec<&'a str>> {
        let mut it = line.split_whitespace();
        let head = it.next().unwrap_or("");
        if head != key {
            return Err(cur.parse_error(format!("expected `{key}`, found `{head}`")));
        }
        let rest: Vec<&str> = it.collect();
        if rest.len() != count {
            return Err(cur.parse_error(format!(
                "`{key}` takes {count} value(s), found {}",
                rest.len()
            )));
        }
        Ok(rest)
    }
    fn num(cur: &Cursor<'_>, s: &str) -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| cur.parse_error(format!("bad number `{s}`")))
    }

    let line = cur.next_line("outer_center")?;
    let oc = fields(&cur, line, "outer_center", 2)?;
    let outer_center = Point2::new(num(&cur, oc[0])?, num(&cur, oc[1])?);
    let line = cur.next_line("outer_radius")?;
    let outer_radius = num(&cur, fields(&cur, line, "outer_radius", 1)?[0])?;
    let line = cur.next_line("inner_center")?;
    let ic = fields(&cur, line, "inner_center", 2)?;
    let inner_center = Point2::new(num(&cur, ic[0])?, num(&cur, ic[1])?);
    let line = cur.next_line("inner_radius")?;
    let inner_radius = num(&cur, fields(&cur, line, "inner_radius", 1)?[0])?;
    let line = cur.next_line("n_outer")?;
    let n_outer: usize = fields(&cur, line, "n_outer", 1)?[0]
        .parse()
        .map_err(|_| cur.parse_error("bad n_outer"))?;
    let line = cur.next_line("n_inner")?;
    let n_inner: usize = fields(&cur, line, "n_inner", 1)?[0]
        .parse()
        .map_err(|_| cur.parse_error("bad n_inner"))?;
    let line = cur.next_line("residual_norm")?;
    let residual_norm = num(&cur, fields(&cur, line, "residual_norm", 1)?[0])?;
    let line = cur.next_line("condition_estimate")?;
    let condition_estimate = num(&cur, fields(&cur, line, "condition_estimate", 1)?[0])?;

    let mut read_vector = |key: &str| -> Result<Vec<f64>> {
        let line = cur.next_line(key)?;
        let count: usize = fields(&cur, line, key, 1)?[0]
            .parse()
            .map_err(|_| cur.parse_error(format!("bad {key} count")))?;
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let line = cur.next_line("vector entry")?;
            values.push(num(&cur, line.trim())?);
        }
        Ok(values)
    };
    let potentials = read_vector("potentials")?;
    let fluxes = read_vector("fluxes")?;
    let line = cur.next_line("end marker")?;
    if line.trim() != "end" {
        return Err(cur.parse_error(format!("expected `end`, found `{line}`")));
    }

    let mesh = build_annulus(
        outer_center,
        outer_radius,
        inner_center,
        inner_radius,
        n_outer,
        n_inner,
    )?;
    if potentials.len() != mesh.len() || fluxes.len() != mesh.len() {
        return Err(Error::Data(format!(
            "vector lengths {} / {} do not match mesh size {}",
            potentials.len(),
            fluxes.len(),
            mesh.len()
        )));
    }
    Ok(BoundarySolution::from_parts(
        mesh,
        potentials,
        fluxes,
        residual_norm,
        condition_estimate,
        Vec::new(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_annulus;
    use crate::system::{assemble, solve_dirichlet_to_neumann};

    fn benchmark_mesh() -> AnnulusMesh {
        build_annulus(
            Point2::new(0.0, 0.0),
            0.100,
            Point2::new(0.0, 0.0),
            0.015,
            40,
            40,
        )
        .unwrap()
    }

    fn well_formed_csv(mesh: &AnnulusMesh) -> String {
        let mut s = String::from("index,x,y,a\n");
        for (k, e) in mesh.elements().iter().enumerate() {
            let m = e.midpoint();
            let _ = writeln!(s, "{},{},{},{}", k + 1, m.x, m.y, k as f64 / 10.0);
        }
        s
    }

    #[test]
    fn accepts_well_formed_rows() {
        let mesh = benchmark_mesh();
        let data = parse_fem_csv(&well_formed_csv(&mesh), &mesh, DEFAULT_POSITION_TOL).unwrap();
        assert_eq!(data.len(), 80);
        let values = data.dirichlet_values();
        assert_eq!(values.len(), 80);
        assert_eq!(values[3], 0.3);
    }

    #[test]
    fn missing_row_names_index() {
        let mesh = benchmark_mesh();
        let csv: String = well_formed_csv(&mesh)
            .lines()
            .filter(|l| !l.starts_with("17,"))
            .map(|l| format!("{l}\n"))
            .collect();
        match parse_fem_csv(&csv, &mesh, DEFAULT_POSITION_TOL) {
            Err(Error::Format(msg)) => assert!(msg.contains("17"), "message: {msg}"),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_row_names_index() {
        let mesh = benchmark_mesh();
        let mut csv = well_formed_csv(&mesh);
        let dup = csv.lines().nth(5).unwrap().to_string();
        csv.push_str(&dup);
        csv.push('\n');
        match parse_fem_csv(&csv, &mesh, DEFAULT_POSITION_TOL) {
            Err(Error::Format(msg)) => assert!(msg.contains("duplicate"), "message: {msg}"),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn displaced_midpoint_reports_element_and_distance() {
        let mesh = benchmark_mesh();
        let tol = DEFAULT_POSITION_TOL;
        let mut lines: Vec<String> = well_formed_csv(&mesh).lines().map(String::from).collect();
        // Displace row 12 by 5 tolerances.
        let e = &mesh.elements()[11];
        lines[12] = format!("12,{},{},0.5", e.midpoint().x + 5.0 * tol, e.midpoint().y);
        let csv = lines.join("\n");
        match parse_fem_csv(&csv, &mesh, tol) {
            Err(Error::Alignment {
                index, distance, ..
            }) => {
                assert_eq!(index, 12);
                assert!((distance - 5.0 * tol).abs() < tol);
            }
            other => panic!("expected alignment error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_value_is_data_error() {
        let mesh = benchmark_mesh();
        let mut lines: Vec<String> = well_formed_csv(&mesh).lines().map(String::from).collect();
        lines[3] = lines[3]
            .rsplit_once(',')
            .map(|(a, _)| format!("{a},NaN"))
            .unwrap();
        match parse_fem_csv(&lines.join("\n"), &mesh, DEFAULT_POSITION_TOL) {
            Err(Error::Data(_)) => {}
            other => panic!("expected data error, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_is_identity() {
        let mesh = benchmark_mesh();
        let data = parse_fem_csv(&well_formed_csv(&mesh), &mesh, DEFAULT_POSITION_TOL).unwrap();
        let again = parse_fem_csv(&data.to_csv(), &mesh, DEFAULT_POSITION_TOL).unwrap();
        assert_eq!(data.entries(), again.entries());
    }

    #[test]
    fn crlf_accepted() {
        let mesh = benchmark_mesh();
        let csv = well_formed_csv(&mesh).replace('\n', "\r\n");
        assert!(parse_fem_csv(&csv, &mesh, DEFAULT_POSITION_TOL).is_ok());
    }

    #[test]
    fn solution_round_trip_bitwise() {
        let mesh = build_annulus(
            Point2::new(0.0, 0.0),
            2.0,
            Point2::new(0.1, -0.05),
            0.7,
            12,
            9,
        )
        .unwrap();
        let mats = assemble(&mesh).unwrap();
        let potentials: Vec<f64> = mesh
            .elements()
            .iter()
            .map(|e| (e.midpoint().x * 3.1).sin())
            .collect();
        let sol = solve_dirichlet_to_neumann(&mesh, &mats, &potentials).unwrap();
        let text = write_solution(&sol);
        let back = read_solution(&text).unwrap();
        assert_eq!(sol.potentials(), back.potentials());
        assert_eq!(sol.fluxes(), back.fluxes());
        assert_eq!(sol.residual_norm(), back.residual_norm());
        assert_eq!(sol.mesh().len(), back.mesh().len());
        // Rebuilt mesh reproduces the collocation points bit for bit.
        for (a, b) in sol.mesh().elements().iter().zip(back.mesh().elements()) {
            assert_eq!(a.midpoint(), b.midpoint());
        }
    }

    #[test]
    fn truncated_solution_reports_byte_offset() {
        let mesh =
            build_annulus(Point2::new(0.0, 0.0), 2.0, Point2::new(0.0, 0.0), 1.0, 8, 8).unwrap();
        let mats = assemble(&mesh).unwrap();
        let sol = solve_dirichlet_to_neumann(&mesh, &mats, &vec![1.0; mesh.len()]).unwrap();
        let text = write_solution(&sol);
        let cut = text.len() / 2;
        match read_solution(&text[..cut]) {
            Err(Error::Parse { offset, .. }) => assert!(offset <= cut),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn newer_version_rejected() {
        let text = "bem-annulus-solution v2\n";
        match read_solution(text) {
            Err(Error::Version { found, supported }) => {
                assert_eq!(found, 2);
                assert_eq!(supported, 1);
            }
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn table_row_errors_match_hand_arithmetic() {
        let table = ReferenceTable::new(vec![(-0.0065, -0.0066)], "row check").unwrap();
        let report = relative_error_report(&table);
        // |(-0.0065) - (-0.0066)| / 0.0065 * 100
        assert!((report.row_errors[0] - 1.5384615384615385).abs() < 1e-12);
    }

    #[test]
    fn zero_measured_rejected() {
        assert!(ReferenceTable::new(vec![(0.0, 1.0)], "bad").is_err());
        assert!(ReferenceTable::parse_csv("measured,calculated\n0,1\n", "bad").is_err());
    }

    #[test]
    fn report_renders_two_decimal_columns() {
        let table = ReferenceTable::new(
            vec![(-0.0065, -0.0066), (-0.0025, -0.0028)],
            "INITIAL POSITION",
        )
        .unwrap();
        let report = relative_error_report(&table);
        let text = render_report(&table, &report);
        assert!(text.contains("1.54%"));
        assert!(text.contains("12.00%"));
        assert!(text.contains("INITIAL POSITION"));
    }
}
