//! TOML scenario files.
//!
//! Parsing is strict: unknown keys, a missing or unsupported
//! `schema_version`, and parameters that do not belong to the chosen
//! trajectory family or noise distribution are all rejected. The schema is
//! documented in the repository README.

use std::fmt;
use std::path::{Path, PathBuf};

use geoslam_core::simulator::{
    ChannelNoise, LandmarkBox, NoiseDistribution, NoiseSpec, TrajectoryFamily, TrajectorySpec,
};
use geoslam_core::liegroup::exp_so3;
use geoslam_core::{
    AttitudeMode, ConfigIssues, Error as CoreError, Gains, InitialEstimate, LandmarkLayout, Pose, Scenario,
    Vector3,
};
use serde::Deserialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario file: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(ConfigIssues),
}

impl From<CoreError> for LoadError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::ConfigInvalid(issues) => LoadError::Invalid(issues),
            other => {
                let mut issues = ConfigIssues::default();
                issues.push("scenario", other.to_string());
                LoadError::Invalid(issues)
            }
        }
    }
}

/// A parsed scenario together with the hash of the bytes it came from.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub path: PathBuf,
    /// Lowercase hex SHA-256 of the file contents.
    pub sha256: String,
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario, LoadError> {
    let bytes = std::fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| LoadError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
    })?;
    let scenario = parse_scenario(&text)?;
    Ok(LoadedScenario {
        scenario,
        path: path.to_path_buf(),
        sha256: hex(&Sha256::digest(&bytes)),
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses and fully validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, LoadError> {
    let file: ScenarioFile = toml::from_str(text)?;
    let scenario = file.into_scenario()?;
    scenario.validate()?;
    Ok(scenario)
}

type Vec3 = [f64; 3];

fn v3(a: Vec3) -> Vector3 {
    Vector3::new(a[0], a[1], a[2])
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    name: String,
    duration: f64,
    dt: f64,
    seed: u64,
    #[serde(default)]
    attitude_mode: ModeFile,
    trajectory: TrajectoryFile,
    landmarks: LandmarksFile,
    #[serde(default)]
    gains: GainsFile,
    #[serde(default)]
    noise: NoiseFile,
    #[serde(default)]
    initial_estimate: InitialEstimateFile,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModeFile {
    #[default]
    True,
    Reconstructed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FamilyFile {
    Static,
    Circle,
    Helix,
    SinusoidalTumble,
}

impl fmt::Display for FamilyFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyFile::Static => "static",
            FamilyFile::Circle => "circle",
            FamilyFile::Helix => "helix",
            FamilyFile::SinusoidalTumble => "sinusoidal_tumble",
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryFile {
    family: FamilyFile,
    radius: Option<f64>,
    rate: Option<f64>,
    vertical_rate: Option<f64>,
    roll_amplitude: Option<f64>,
    pitch_amplitude: Option<f64>,
    #[serde(default)]
    initial_pose: PoseFile,
}

/// Rigid transform given as an axis-angle rotation (rad) and a position (m).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseFile {
    #[serde(default)]
    attitude: Vec3,
    #[serde(default)]
    position: Vec3,
}

impl PoseFile {
    fn to_pose(&self) -> Pose {
        Pose::new(exp_so3(&v3(self.attitude)), v3(self.position))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LandmarksFile {
    positions: Option<Vec<Vec3>>,
    count: Option<usize>,
    box_min: Option<Vec3>,
    box_max: Option<Vec3>,
    seed: Option<u64>,
    anchor_first_at_origin: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GainsFile {
    k1: f64,
    k2: f64,
    k3: f64,
}

impl Default for GainsFile {
    fn default() -> Self {
        let g = Gains::default();
        Self {
            k1: g.k1,
            k2: g.k2,
            k3: g.k3,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseFile {
    #[serde(default)]
    omega: ChannelFile,
    #[serde(default)]
    velocity: ChannelFile,
    #[serde(default)]
    landmark: ChannelFile,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum DistributionFile {
    #[default]
    None,
    Gaussian,
    StudentT,
    Uniform,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    #[serde(default)]
    distribution: DistributionFile,
    #[serde(default)]
    scale: f64,
    dof: Option<f64>,
    #[serde(default)]
    bias: Vec3,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialEstimateFile {
    attitude_offset: Option<Vec3>,
    position_offset: Option<Vec3>,
    landmark_offset: Option<f64>,
    pose: Option<PoseFile>,
    landmarks: Option<Vec<Vec3>>,
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<Scenario, LoadError> {
        let mut issues = ConfigIssues::default();
        if self.schema_version != SCHEMA_VERSION {
            issues.push(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            );
        }
        let family = self.trajectory.family(&mut issues);
        let landmarks = self.landmarks.layout(&mut issues);
        let noise = NoiseSpec {
            omega: self.noise.omega.channel("noise.omega", &mut issues),
            velocity: self.noise.velocity.channel("noise.velocity", &mut issues),
            landmark: self.noise.landmark.channel("noise.landmark", &mut issues),
        };
        let initial_estimate = self.initial_estimate.estimate(&mut issues);
        if !issues.is_empty() {
            return Err(LoadError::Invalid(issues));
        }
        Ok(Scenario {
            name: self.name,
            trajectory: TrajectorySpec {
                family,
                initial_pose: self.trajectory.initial_pose.to_pose(),
            },
            landmarks,
            gains: Gains {
                k1: self.gains.k1,
                k2: self.gains.k2,
                k3: self.gains.k3,
            },
            noise,
            attitude_mode: match self.attitude_mode {
                ModeFile::True => AttitudeMode::TrueAttitude,
                ModeFile::Reconstructed => AttitudeMode::Reconstructed,
            },
            duration: self.duration,
            dt: self.dt,
            initial_estimate,
            seed: self.seed,
        })
    }
}

impl TrajectoryFile {
    fn family(&self, issues: &mut ConfigIssues) -> TrajectoryFamily {
        let params = [
            ("radius", self.radius),
            ("rate", self.rate),
            ("vertical_rate", self.vertical_rate),
            ("roll_amplitude", self.roll_amplitude),
            ("pitch_amplitude", self.pitch_amplitude),
        ];
        let wanted: &[&str] = match self.family {
            FamilyFile::Static => &[],
            FamilyFile::Circle => &["radius", "rate"],
            FamilyFile::Helix => &["radius", "rate", "vertical_rate"],
            FamilyFile::SinusoidalTumble => &["radius", "rate", "vertical_rate", "roll_amplitude", "pitch_amplitude"],
        };
        for (name, value) in params {
            let field = format!("trajectory.{name}");
            match (wanted.contains(&name), value) {
                (true, None) => issues.push(field, format!("required by family {}", self.family)),
                (false, Some(_)) => issues.push(field, format!("not used by family {}", self.family)),
                _ => {}
            }
        }
        let get = |v: Option<f64>| v.unwrap_or(f64::NAN);
        match self.family {
            FamilyFile::Static => TrajectoryFamily::Static,
            FamilyFile::Circle => TrajectoryFamily::Circle {
                radius: get(self.radius),
                rate: get(self.rate),
            },
            FamilyFile::Helix => TrajectoryFamily::Helix {
                radius: get(self.radius),
                rate: get(self.rate),
                vertical_rate: get(self.vertical_rate),
            },
            FamilyFile::SinusoidalTumble => TrajectoryFamily::SinusoidalTumble {
                radius: get(self.radius),
                rate: get(self.rate),
                vertical_rate: get(self.vertical_rate),
                roll_amplitude: get(self.roll_amplitude),
                pitch_amplitude: get(self.pitch_amplitude),
            },
        }
    }
}

impl LandmarksFile {
    fn layout(&self, issues: &mut ConfigIssues) -> LandmarkLayout {
        if let Some(points) = &self.positions {
            for (name, set) in [
                ("count", self.count.is_some()),
                ("box_min", self.box_min.is_some()),
                ("box_max", self.box_max.is_some()),
                ("seed", self.seed.is_some()),
                ("anchor_first_at_origin", self.anchor_first_at_origin.is_some()),
            ] {
                if set {
                    issues.push(format!("landmarks.{name}"), "cannot be combined with landmarks.positions");
                }
            }
            return LandmarkLayout::Explicit(points.iter().copied().map(v3).collect());
        }
        for (name, set) in [
            ("count", self.count.is_some()),
            ("box_min", self.box_min.is_some()),
            ("box_max", self.box_max.is_some()),
            ("seed", self.seed.is_some()),
        ] {
            if !set {
                issues.push(format!("landmarks.{name}"), "required unless landmarks.positions is given");
            }
        }
        LandmarkLayout::Random {
            count: self.count.unwrap_or(0),
            region: LandmarkBox {
                min: v3(self.box_min.unwrap_or_default()),
                max: v3(self.box_max.unwrap_or_default()),
            },
            seed: self.seed.unwrap_or(0),
            anchor_first_at_origin: self.anchor_first_at_origin.unwrap_or(false),
        }
    }
}

impl ChannelFile {
    fn channel(&self, prefix: &str, issues: &mut ConfigIssues) -> ChannelNoise {
        let distribution = match self.distribution {
            DistributionFile::None => NoiseDistribution::None,
            DistributionFile::Gaussian => NoiseDistribution::Gaussian,
            DistributionFile::Uniform => NoiseDistribution::UniformBounded,
            DistributionFile::StudentT => match self.dof {
                Some(dof) => NoiseDistribution::StudentT { dof },
                None => {
                    issues.push(format!("{prefix}.dof"), "required by distribution student_t");
                    NoiseDistribution::StudentT { dof: f64::NAN }
                }
            },
        };
        if self.dof.is_some() && self.distribution != DistributionFile::StudentT {
            issues.push(format!("{prefix}.dof"), "only used by distribution student_t");
        }
        if self.distribution == DistributionFile::None && self.scale != 0.0 {
            issues.push(format!("{prefix}.scale"), "set a distribution to use a nonzero scale");
        }
        ChannelNoise {
            distribution,
            scale: self.scale,
            bias: v3(self.bias),
        }
    }
}

impl InitialEstimateFile {
    fn estimate(&self, issues: &mut ConfigIssues) -> InitialEstimate {
        let explicit = self.pose.is_some() || self.landmarks.is_some();
        let offsets = self.attitude_offset.is_some() || self.position_offset.is_some() || self.landmark_offset.is_some();
        if explicit && offsets {
            issues.push(
                "initial_estimate",
                "give either offsets (attitude_offset, position_offset, landmark_offset) or an explicit pose and landmarks",
            );
        }
        if explicit {
            let (Some(pose), Some(landmarks)) = (&self.pose, &self.landmarks) else {
                issues.push("initial_estimate", "an explicit estimate needs both pose and landmarks");
                return InitialEstimate::default();
            };
            return InitialEstimate::Explicit {
                pose: pose.to_pose(),
                landmarks: landmarks.iter().copied().map(v3).collect(),
            };
        }
        InitialEstimate::Offset {
            attitude: v3(self.attitude_offset.unwrap_or_default()),
            position: v3(self.position_offset.unwrap_or_default()),
            landmark_offset: self.landmark_offset.unwrap_or(0.0),
        }
    }
}
