//! TOML run configuration.
//!
//! Every section and key is optional; omitted values fall back to the
//! benchmark defaults (see [`crate::scenario::ScenarioConfig::default`]).
//!
//! ```toml
//! [geometry]
//! outer_center = [0.0, 0.0]
//! inner_center = [0.0, 0.0]
//! outer_radius = 0.100
//! inner_radius = 0.015
//! n_outer = 40
//! n_inner = 40
//!
//! [coil]
//! peak_current = 200.0   # A
//! frequency = 50.0       # Hz
//!
//! [material]
//! conductivity = 3.7e7   # S/m, metadata only
//!
//! [plate]
//! pose = "initial"       # "initial" | "disturbed" | "explicit"
//! dx = 0.0               # pose = "explicit" only, meters
//! dy = 0.0
//! angle_deg = 0.0
//! centroid = [0.0, 0.018]
//! half_width = 0.020
//! half_height = 0.0005
//! # sample_points = [[0.0, -0.0005], ...]   # plate-local override
//!
//! [report]
//! fixture = "fixtures/table1.csv"   # relative to this file
//!
//! [converge]
//! n_values = [20, 40, 80, 160]      # total element counts, even, >= 8
//! reference = "log_r"    # "constant" | "linear_x" | "linear_y" | "log_r" | "poly2"
//! constant_value = 1.0
//! log_center = [0.0, 0.0]
//! ```

use crate::coupling::ReferenceTable;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::oracle::HarmonicReference;
use crate::scenario::{
    plate_pose, AnnulusGeometry, CoilParams, PlateOutline, PlatePose, PoseKind, ScenarioConfig,
};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub coil: CoilSection,
    #[serde(default)]
    pub material: MaterialSection,
    #[serde(default)]
    pub plate: PlateSection,
    #[serde(default)]
    pub report: ReportSection,
    #[serde(default)]
    pub converge: ConvergeSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub outer_center: [f64; 2],
    pub inner_center: [f64; 2],
    pub outer_radius: f64,
    pub inner_radius: f64,
    pub n_outer: usize,
    pub n_inner: usize,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            outer_center: [0.0, 0.0],
            inner_center: [0.0, 0.0],
            outer_radius: 0.100,
            inner_radius: 0.015,
            n_outer: 40,
            n_inner: 40,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoilSection {
    pub peak_current: f64,
    pub frequency: f64,
}

impl Default for CoilSection {
    fn default() -> Self {
        CoilSection {
            peak_current: 200.0,
            frequency: 50.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialSection {
    pub conductivity: f64,
}

impl Default for MaterialSection {
    fn default() -> Self {
        MaterialSection {
            conductivity: 3.7e7,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlateSection {
    pub pose: String,
    pub dx: f64,
    pub dy: f64,
    pub angle_deg: f64,
    pub centroid: [f64; 2],
    pub half_width: f64,
    pub half_height: f64,
    pub sample_points: Option<Vec<[f64; 2]>>,
}

impl Default for PlateSection {
    fn default() -> Self {
        PlateSection {
            pose: "initial".into(),
            dx: 0.0,
            dy: 0.0,
            angle_deg: 0.0,
            centroid: [0.0, 0.018],
            half_width: 0.020,
            half_height: 0.0005,
            sample_points: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    pub fixture: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeSection {
    pub n_values: Vec<usize>,
    pub reference: String,
    pub constant_value: f64,
    pub log_center: [f64; 2],
}

impl Default for ConvergeSection {
    fn default() -> Self {
        ConvergeSection {
            n_values: vec![20, 40, 80, 160],
            reference: "log_r".into(),
            constant_value: 1.0,
            log_center: [0.0, 0.0],
        }
    }
}

fn point(xy: [f64; 2]) -> Point2 {
    Point2::new(xy[0], xy[1])
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<FileConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Load from a file; relative fixture paths resolve against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<(FileConfig, Option<PathBuf>)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config = FileConfig::parse(&text)?;
        let fixture = config.report.fixture.as_ref().map(|f| {
            if f.is_absolute() {
                f.clone()
            } else {
                path.parent().unwrap_or(Path::new(".")).join(f)
            }
        });
        Ok((config, fixture))
    }

    pub fn geometry(&self) -> AnnulusGeometry {
        AnnulusGeometry {
            outer_center: point(self.geometry.outer_center),
            inner_center: point(self.geometry.inner_center),
            outer_radius: self.geometry.outer_radius,
            inner_radius: self.geometry.inner_radius,
            n_outer: self.geometry.n_outer,
            n_inner: self.geometry.n_inner,
        }
    }

    pub fn pose(&self) -> Result<PlatePose> {
        match self.plate.pose.as_str() {
            "initial" => Ok(plate_pose(PoseKind::Initial)),
            "disturbed" => Ok(plate_pose(PoseKind::Disturbed)),
            "explicit" => Ok(PlatePose {
                dx: self.plate.dx,
                dy: self.plate.dy,
                angle_deg: self.plate.angle_deg,
            }),
            other => Err(Error::Config(format!(
                "plate pose must be initial, disturbed or explicit, got `{other}`"
            ))),
        }
    }

    pub fn reference(&self) -> Result<HarmonicReference> {
        match self.converge.reference.as_str() {
            "constant" => Ok(HarmonicReference::Constant(self.converge.constant_value)),
            "linear_x" => Ok(HarmonicReference::LinearX),
            "linear_y" => Ok(HarmonicReference::LinearY),
            "log_r" => Ok(HarmonicReference::LogR {
                center: point(self.converge.log_center),
            }),
            "poly2" => Ok(HarmonicReference::HarmonicPoly2),
            other => Err(Error::Config(format!(
                "unknown analytic reference `{other}`"
            ))),
        }
    }

    /// Complete scenario, loading the fixture table when configured.
    pub fn scenario(&self, fixture_path: Option<&Path>) -> Result<ScenarioConfig> {
        let fixture = match fixture_path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Config(format!("cannot read fixture {}: {e}", path.display()))
                })?;
                let label = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "fixture".into());
                Some(ReferenceTable::parse_csv(&text, label)?)
            }
            None => None,
        };
        Ok(ScenarioConfig {
            geometry: self.geometry(),
            coil: CoilParams {
                peak_current: self.coil.peak_current,
                frequency: self.coil.frequency,
            },
            conductivity: self.material.conductivity,
            plate: PlateOutline {
                centroid: point(self.plate.centroid),
                half_width: self.plate.half_width,
                half_height: self.plate.half_height,
                sample_points: self
                    .plate
                    .sample_points
                    .as_ref()
                    .map(|pts| pts.iter().map(|&p| point(p)).collect()),
            },
            pose: self.pose()?,
            fixture,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_benchmark_defaults() {
        let config = FileConfig::parse("").unwrap();
        let scenario = config.scenario(None).unwrap();
        assert_eq!(scenario, ScenarioConfig::default());
        let geometry = config.geometry();
        assert_eq!(geometry.n_outer, 40);
        assert_eq!(geometry.outer_radius, 0.100);
    }

    #[test]
    fn explicit_pose_and_reference() {
        let text = r#"
[plate]
pose = "explicit"
dx = 0.001
dy = -0.002
angle_deg = 5.0

[converge]
n_values = [8, 16]
reference = "poly2"
"#;
        let config = FileConfig::parse(text).unwrap();
        let pose = config.pose().unwrap();
        assert_eq!(pose.dx, 0.001);
        assert_eq!(pose.angle_deg, 5.0);
        assert_eq!(
            config.reference().unwrap(),
            HarmonicReference::HarmonicPoly2
        );
        assert_eq!(config.converge.n_values, vec![8, 16]);
    }

    #[test]
    fn bad_pose_and_unknown_keys_rejected() {
        let bad_pose = FileConfig::parse("[plate]\npose = \"sideways\"\n").unwrap();
        assert!(bad_pose.pose().is_err());
        assert!(FileConfig::parse("[plate]\nwobble = 3\n").is_err());
        assert!(FileConfig::parse("[converge]\nreference = \"exp\"\n")
            .unwrap()
            .reference()
            .is_err());
    }
}
