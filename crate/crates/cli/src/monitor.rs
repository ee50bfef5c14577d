//! Diagram Lipschitz monitoring along a sampled formation path.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use formetric::diagram::STABILITY_SLACK;
use formetric::{
    bottleneck_distance, formation_distance, signature, AmbientSpace, Configuration, PersistenceDiagram,
    SolverOptions,
};

use crate::error::CliError;

/// Time-stamped frames sharing one space and agent count, with strictly
/// increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    frames: Vec<(f64, Configuration)>,
}

impl Trajectory {
    pub fn new(frames: Vec<(f64, Configuration)>) -> Result<Self, CliError> {
        let Some((_, first)) = frames.first() else {
            return Err(CliError::Input("trajectory has no frames".into()));
        };
        let (space, n) = (*first.space(), first.n());
        for (k, (t, c)) in frames.iter().enumerate() {
            if !t.is_finite() {
                return Err(CliError::Input(format!("frames[{k}]: time must be finite")));
            }
            if c.space() != &space || c.n() != n {
                return Err(CliError::Input(format!(
                    "frames[{k}]: every frame must have {n} points in {}",
                    space.name()
                )));
            }
            if k > 0 && !(*t > frames[k - 1].0) {
                return Err(CliError::Input(format!("frames[{k}]: times must be strictly increasing")));
            }
        }
        Ok(Trajectory { frames })
    }

    pub fn space(&self) -> &AmbientSpace {
        self.frames[0].1.space()
    }

    pub fn frames(&self) -> &[(f64, Configuration)] {
        &self.frames
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeStep {
    pub degree: usize,
    pub diagram_distance: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorStep {
    pub from: usize,
    pub dt: f64,
    pub distance_upper_bound: f64,
    pub exact: bool,
    pub method: &'static str,
    pub degrees: Vec<DegreeStep>,
    /// False when some diagram distance exceeds the distance bound, which
    /// can only be a software fault.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorReport {
    pub steps: Vec<MonitorStep>,
    /// Largest `d_B / dt` over steps and degrees.
    pub max_rate: f64,
    /// Largest `distance / dt`, an upper estimate of the path speed.
    pub max_speed: f64,
    pub lipschitz_consistent: bool,
}

impl MonitorReport {
    pub fn to_csv(&self) -> String {
        let degrees: Vec<usize> = self
            .steps
            .first()
            .map(|s| s.degrees.iter().map(|d| d.degree).collect())
            .unwrap_or_default();
        let mut out = String::from("step,dt,distance_upper_bound,exact");
        for k in &degrees {
            out.push_str(&format!(",d_b{k},rate{k}"));
        }
        out.push_str(",consistent\n");
        for s in &self.steps {
            out.push_str(&format!("{},{},{},{}", s.from, s.dt, s.distance_upper_bound, s.exact));
            for d in &s.degrees {
                out.push_str(&format!(",{},{}", d.diagram_distance, d.rate));
            }
            out.push_str(&format!(",{}\n", s.consistent));
        }
        out
    }
}

/// Certified distance and per-degree diagram distance for every pair of
/// consecutive frames. Pairs run in parallel; output follows frame order.
pub fn monitor(
    trajectory: &Trajectory,
    degrees: &BTreeSet<usize>,
    opts: &SolverOptions,
) -> Result<MonitorReport, CliError> {
    let frames = trajectory.frames();
    if frames.len() < 2 {
        return Err(CliError::Input("monitoring needs at least two frames".into()));
    }
    let signatures: Vec<BTreeMap<usize, PersistenceDiagram>> = frames
        .par_iter()
        .map(|(_, c)| signature(c, degrees))
        .collect::<Result<_, _>>()?;
    let steps: Vec<MonitorStep> = (0..frames.len() - 1)
        .into_par_iter()
        .map(|k| {
            let (t0, x) = &frames[k];
            let (t1, y) = &frames[k + 1];
            let dt = t1 - t0;
            let a = formation_distance(x, y, opts)?;
            let mut per_degree = Vec::new();
            for (deg, dx) in &signatures[k] {
                let d = bottleneck_distance(dx, &signatures[k + 1][deg])?;
                per_degree.push(DegreeStep {
                    degree: *deg,
                    diagram_distance: d,
                    rate: d / dt,
                });
            }
            let consistent = per_degree
                .iter()
                .all(|d| d.diagram_distance <= a.upper_bound + STABILITY_SLACK);
            Ok(MonitorStep {
                from: k,
                dt,
                distance_upper_bound: a.upper_bound,
                exact: a.exact,
                method: a.method.name(),
                degrees: per_degree,
                consistent,
            })
        })
        .collect::<Result<_, formetric::Error>>()?;
    let max_rate = steps
        .iter()
        .flat_map(|s| s.degrees.iter().map(|d| d.rate))
        .fold(0.0, f64::max);
    let max_speed = steps.iter().map(|s| s.distance_upper_bound / s.dt).fold(0.0, f64::max);
    let lipschitz_consistent = steps.iter().all(|s| s.consistent);
    Ok(MonitorReport {
        steps,
        max_rate,
        max_speed,
        lipschitz_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use formetric::{CutLocus, Permutation, QuotientGeodesic};

    fn degrees() -> BTreeSet<usize> {
        [0, 1].into()
    }

    #[test]
    fn constant_path_has_zero_rates() {
        let c = Configuration::circle(&[0.0, 1.0, 2.5]).unwrap();
        let t = Trajectory::new(vec![(0.0, c.clone()), (0.5, c.clone()), (1.0, c)]).unwrap();
        let r = monitor(&t, &degrees(), &SolverOptions::default()).unwrap();
        assert_eq!(r.max_rate, 0.0);
        assert!(r.lipschitz_consistent);
    }

    #[test]
    fn geodesic_rates_stay_below_speed() {
        let x = Configuration::circle(&[0.0, 0.4, 2.0, 4.0]).unwrap();
        let y = Configuration::circle(&[1.0, 3.1, 3.3, 5.5]).unwrap();
        let geo = QuotientGeodesic::new(&x, &y, &SolverOptions::default()).unwrap();
        let frames = (0..=10)
            .map(|k| {
                let s = k as f64 / 10.0;
                (s, geo.point(s, CutLocus::Resolve).unwrap())
            })
            .collect();
        let r = monitor(&Trajectory::new(frames).unwrap(), &degrees(), &SolverOptions::default()).unwrap();
        assert!(r.max_rate <= geo.length() + 1e-9, "{} > {}", r.max_rate, geo.length());
        assert_eq!(r.steps.len(), 10);
    }

    #[test]
    fn relabeled_frame_keeps_rates() {
        let a = Configuration::circle(&[0.0, 1.0, 2.0]).unwrap();
        let b = Configuration::circle(&[0.1, 1.3, 2.4]).unwrap();
        let c = Configuration::circle(&[0.3, 1.2, 3.0]).unwrap();
        let sigma = Permutation::new(vec![2, 0, 1]).unwrap();
        let plain = Trajectory::new(vec![(0.0, a.clone()), (1.0, b.clone()), (2.0, c.clone())]).unwrap();
        let moved = Trajectory::new(vec![(0.0, a), (1.0, b.relabeled(&sigma).unwrap()), (2.0, c)]).unwrap();
        let opts = SolverOptions::default();
        let r1 = monitor(&plain, &degrees(), &opts).unwrap();
        let r2 = monitor(&moved, &degrees(), &opts).unwrap();
        assert_eq!(r1.max_rate, r2.max_rate);
        for (s1, s2) in r1.steps.iter().zip(&r2.steps) {
            assert!((s1.distance_upper_bound - s2.distance_upper_bound).abs() < 1e-12);
            assert_eq!(s1.degrees, s2.degrees);
        }
    }

    #[test]
    fn rejects_bad_trajectories() {
        let a = Configuration::circle(&[0.0, 1.0]).unwrap();
        let b = Configuration::circle(&[0.0]).unwrap();
        assert!(Trajectory::new(vec![(0.0, a.clone()), (0.0, a.clone())]).is_err());
        assert!(Trajectory::new(vec![(0.0, a.clone()), (1.0, b)]).is_err());
        assert!(Trajectory::new(vec![]).is_err());
        let single = Trajectory::new(vec![(0.0, a)]).unwrap();
        assert!(monitor(&single, &degrees(), &SolverOptions::default()).is_err());
    }
}
