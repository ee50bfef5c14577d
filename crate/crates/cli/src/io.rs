//! JSON interchange formats for configurations, trajectories, gap
//! labelings and persistence diagrams.

use serde::{Deserialize, Serialize};

use formetric::ambient::Point;
use formetric::{AmbientSpace, Configuration, GapLabeling, PersistenceDiagram};

use crate::error::CliError;
use crate::monitor::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceSpec {
    Sphere2,
    Torus { m: usize },
    Circle,
}

impl From<AmbientSpace> for SpaceSpec {
    fn from(s: AmbientSpace) -> Self {
        match s {
            AmbientSpace::Sphere2 => SpaceSpec::Sphere2,
            AmbientSpace::Torus { m } => SpaceSpec::Torus { m },
            AmbientSpace::Circle => SpaceSpec::Circle,
        }
    }
}

impl SpaceSpec {
    fn to_space(self) -> Result<AmbientSpace, CliError> {
        let space = match self {
            SpaceSpec::Sphere2 => AmbientSpace::Sphere2,
            SpaceSpec::Torus { m } => AmbientSpace::Torus { m },
            SpaceSpec::Circle => AmbientSpace::Circle,
        };
        space
            .validate()
            .map_err(|e| CliError::Input(format!("space: {e}")))?;
        Ok(space)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationFile {
    pub space: SpaceSpec,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub t: f64,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub space: SpaceSpec,
    pub frames: Vec<FrameFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapLabelingFile {
    pub intervals: Vec<[f64; 2]>,
    pub rho: f64,
    pub gamma: f64,
}

/// A death value: a number, or the string `"inf"` for essential classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Death {
    Finite(f64),
    Sentinel(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    pub degree: usize,
    pub points: Vec<(f64, Death)>,
}

fn from_json<'de, T: Deserialize<'de>>(bytes: &'de [u8], what: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Input(format!(
            "{what}: at `{path}` (line {}, column {}): {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

fn points_from_rows(space: &AmbientSpace, rows: &[Vec<f64>], field: &str) -> Result<Vec<Point<f64>>, CliError> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            Point::from_coordinates(space, row).map_err(|e| CliError::Input(format!("{field}[{i}]: {e}")))
        })
        .collect()
}

fn rows_from_points(c: &Configuration) -> Vec<Vec<f64>> {
    c.points().iter().map(Point::coordinates).collect()
}

pub fn configuration_from_file(file: &ConfigurationFile) -> Result<Configuration, CliError> {
    let space = file.space.to_space()?;
    let points = points_from_rows(&space, &file.points, "points")?;
    Configuration::new(space, points).map_err(|e| CliError::Input(e.to_string()))
}

pub fn configuration_to_file(c: &Configuration) -> ConfigurationFile {
    ConfigurationFile {
        space: (*c.space()).into(),
        points: rows_from_points(c),
    }
}

pub fn parse_configuration(bytes: &[u8]) -> Result<Configuration, CliError> {
    configuration_from_file(&from_json(bytes, "configuration")?)
}

pub fn serialize_configuration(c: &Configuration) -> String {
    serde_json::to_string(&configuration_to_file(c)).expect("plain data serializes")
}

pub fn parse_trajectory(bytes: &[u8]) -> Result<Trajectory, CliError> {
    let file: TrajectoryFile = from_json(bytes, "trajectory")?;
    let space = file.space.to_space()?;
    let frames = file
        .frames
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let pts = points_from_rows(&space, &f.points, &format!("frames[{k}].points"))?;
            let c = Configuration::new(space, pts).map_err(|e| CliError::Input(format!("frames[{k}]: {e}")))?;
            Ok((f.t, c))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Trajectory::new(frames).map_err(|e| CliError::Input(e.to_string()))
}

pub fn trajectory_to_file(t: &Trajectory) -> TrajectoryFile {
    TrajectoryFile {
        space: (*t.space()).into(),
        frames: t
            .frames()
            .iter()
            .map(|(t, c)| FrameFile {
                t: *t,
                points: rows_from_points(c),
            })
            .collect(),
    }
}

pub fn parse_gap_labeling(bytes: &[u8]) -> Result<GapLabeling, CliError> {
    let file: GapLabelingFile = from_json(bytes, "gap labeling")?;
    GapLabeling::new(
        file.intervals.iter().map(|[lo, hi]| (*lo, *hi)).collect(),
        file.rho,
        file.gamma,
    )
    .map_err(|e| CliError::Input(format!("gap labeling: {e}")))
}

pub fn gap_labeling_to_file(l: &GapLabeling) -> GapLabelingFile {
    GapLabelingFile {
        intervals: l.intervals().iter().map(|(a, b)| [*a, *b]).collect(),
        rho: l.rho(),
        gamma: l.gamma(),
    }
}

pub fn diagram_from_file(file: &DiagramFile) -> Result<PersistenceDiagram, CliError> {
    let points = file
        .points
        .iter()
        .enumerate()
        .map(|(i, (b, d))| match d {
            Death::Finite(v) => Ok((*b, *v)),
            Death::Sentinel(s) if s == "inf" => Ok((*b, f64::INFINITY)),
            Death::Sentinel(s) => Err(CliError::Input(format!(
                "diagram: points[{i}]: death must be a number or \"inf\", got {s:?}"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    PersistenceDiagram::new(file.degree, points).map_err(|e| CliError::Input(format!("diagram: {e}")))
}

pub fn diagram_to_file(d: &PersistenceDiagram) -> DiagramFile {
    DiagramFile {
        degree: d.degree(),
        points: d
            .points()
            .iter()
            .map(|(b, death)| {
                let death = if death.is_infinite() {
                    Death::Sentinel("inf".into())
                } else {
                    Death::Finite(*death)
                };
                (*b, death)
            })
            .collect(),
    }
}

pub fn parse_diagram(bytes: &[u8]) -> Result<PersistenceDiagram, CliError> {
    diagram_from_file(&from_json(bytes, "diagram")?)
}

pub fn serialize_diagram(d: &PersistenceDiagram) -> String {
    serde_json::to_string(&diagram_to_file(d)).expect("plain data serializes")
}

/// True if the document is an object with a `space` key, i.e. a
/// configuration or trajectory rather than a diagram.
pub fn looks_like_configuration(bytes: &[u8]) -> bool {
    serde_json::from_slice::<serde_json::Value>(bytes)
        .ok()
        .and_then(|v| v.as_object().map(|o| o.contains_key("space")))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configuration_examples() {
        let c = parse_configuration(br#"{"space":{"kind":"circle"},"points":[[0.0],[1.0]]}"#).unwrap();
        assert_eq!(c.n(), 2);
        let s = parse_configuration(br#"{"space":{"kind":"sphere2"},"points":[[0.6,0.8,0.0]]}"#).unwrap();
        assert_eq!(s.point(0).as_sphere().unwrap(), &[0.6, 0.8, 0.0]);
        let err = parse_configuration(br#"{"space":{"kind":"sphere2"},"points":[[1,1,1]]}"#).unwrap_err();
        assert!(err.to_string().contains("points[0]"), "{err}");
        let t = parse_configuration(br#"{"space":{"kind":"torus","m":2},"points":[[0.0,1.0]]}"#).unwrap();
        assert_eq!(t.space(), &AmbientSpace::Torus { m: 2 });
    }

    #[test]
    fn parse_errors_carry_paths() {
        let err = parse_configuration(br#"{"space":{"kind":"torus"},"points":[]}"#).unwrap_err();
        assert!(err.to_string().contains("space"), "{err}");
        let err = parse_configuration(b"{\"space\":{\"kind\":\"circle\"},\n\"points\":[[0.0],[\"x\"]]}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("points[1]") && msg.contains("line 2"), "{msg}");
        let err = parse_configuration(br#"{"space":{"kind":"circle"},"points":[[0.0, 1.0]]}"#).unwrap_err();
        assert!(err.to_string().contains("points[0]"));
        assert!(parse_configuration(b"not json").is_err());
    }

    #[test]
    fn diagrams_use_the_inf_sentinel() {
        let d = parse_diagram(br#"{"degree":0,"points":[[0.0,"inf"],[0.0,0.5]]}"#).unwrap();
        assert_eq!(d.essential_births().count(), 1);
        let s = serialize_diagram(&d);
        assert!(s.contains("\"inf\""));
        assert_eq!(parse_diagram(s.as_bytes()).unwrap(), d);
        assert!(parse_diagram(br#"{"degree":0,"points":[[0.0,"infinity"]]}"#).is_err());
        assert!(parse_diagram(br#"{"degree":0,"points":[[0.5,0.1]]}"#).is_err());
    }

    #[test]
    fn labeling_parse() {
        let l = parse_gap_labeling(br#"{"intervals":[[0.3,0.5],[0.7,0.9]],"rho":0.3,"gamma":0.1}"#).unwrap();
        assert_eq!(l.intervals().len(), 2);
        assert!(parse_gap_labeling(br#"{"intervals":[[0.3,0.6],[0.5,0.9]],"rho":0.3,"gamma":0.1}"#).is_err());
    }
}
