//! Bottleneck distance between persistence diagrams and the stability check
//! comparing it with the formation distance.

use std::collections::{BTreeMap, BTreeSet};

use crate::alignment::{formation_distance, gh_correspondence_distortion, AlignmentResult, SolverOptions};
use crate::assignment::{bottleneck_value, CostMatrix};
use crate::error::{invalid, Result};
use crate::formation::Configuration;
use crate::rips::{signature, PersistenceDiagram};
use crate::scalar::{cmp, Scalar};

/// Slack used when comparing diagram distances with distance bounds.
pub const STABILITY_SLACK: f64 = 1e-9;

/// Bottleneck distance with the sup-norm ground metric and diagonal cost
/// `(death - birth) / 2`. Essential classes are matched among themselves by
/// birth; different essential counts give `+inf`.
pub fn bottleneck_distance<S: Scalar>(
    a: &PersistenceDiagram<S>,
    b: &PersistenceDiagram<S>,
) -> Result<S> {
    if a.degree() != b.degree() {
        return invalid(format!(
            "cannot compare diagrams of degrees {} and {}",
            a.degree(),
            b.degree()
        ));
    }
    let mut ea: Vec<S> = a.essential_births().collect();
    let mut eb: Vec<S> = b.essential_births().collect();
    if ea.len() != eb.len() {
        return Ok(S::infinity());
    }
    // sorted order is an optimal bottleneck matching on the line
    ea.sort_by(cmp);
    eb.sort_by(cmp);
    let essential = ea
        .iter()
        .zip(&eb)
        .map(|(p, q)| (*p - *q).abs())
        .fold(S::zero(), S::max);

    let fa: Vec<(S, S)> = a.finite_points().collect();
    let fb: Vec<(S, S)> = b.finite_points().collect();
    let (na, nb) = (fa.len(), fb.len());
    let half = S::lit(0.5);
    // rows: points of `a`, then diagonal slots for `b`
    // cols: points of `b`, then diagonal slots for `a`
    let c = CostMatrix::from_fn_unchecked(na + nb, |i, j| match (i < na, j < nb) {
        (true, true) => (fa[i].0 - fb[j].0).abs().max((fa[i].1 - fb[j].1).abs()),
        (true, false) => (fa[i].1 - fa[i].0) * half,
        (false, true) => (fb[j].1 - fb[j].0) * half,
        (false, false) => S::zero(),
    });
    Ok(bottleneck_value(&c).max(essential))
}

/// Per-degree outcome of a stability check.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStability<S> {
    pub degree: usize,
    pub diagram_distance: S,
    pub pass: bool,
}

/// Both sides of the stability inequality, plus the Gromov-Hausdorff chain
/// `d_B <= dis(R) / 2 <= C(g, sigma)` for the correspondence given by the
/// graph of the returned relabeling.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport<S> {
    pub alignment: AlignmentResult<S>,
    pub degrees: Vec<DegreeStability<S>>,
    pub half_distortion: S,
    pub gh_chain_pass: bool,
    pub pass: bool,
    /// True when every diagram distance is below the distance bound by more
    /// than the slack. Only evidence of strictness unless the bound is exact.
    pub strict: bool,
}

pub fn stability_check<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    degrees: &BTreeSet<usize>,
    opts: &SolverOptions<S>,
) -> Result<StabilityReport<S>> {
    let alignment = formation_distance(x, y, opts)?;
    let sx = signature(x, degrees)?;
    let sy = signature(y, degrees)?;
    stability_from_parts(x, y, alignment, &sx, &sy)
}

/// Stability report from precomputed signatures and alignment.
pub fn stability_from_parts<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    alignment: AlignmentResult<S>,
    sx: &BTreeMap<usize, PersistenceDiagram<S>>,
    sy: &BTreeMap<usize, PersistenceDiagram<S>>,
) -> Result<StabilityReport<S>> {
    let slack = S::lit(STABILITY_SLACK);
    let half_distortion = gh_correspondence_distortion(x, y, &alignment.sigma)? / S::two();
    let mut out = Vec::new();
    let mut max_db = S::zero();
    for (k, dx) in sx {
        let dy = sy
            .get(k)
            .ok_or_else(|| crate::Error::InvalidInput(format!("missing degree {k}")))?;
        let d = bottleneck_distance(dx, dy)?;
        max_db = max_db.max(d);
        out.push(DegreeStability {
            degree: *k,
            diagram_distance: d,
            pass: d <= alignment.upper_bound + slack,
        });
    }
    let gh_chain_pass =
        max_db <= half_distortion + slack && half_distortion <= alignment.upper_bound + slack;
    let pass = out.iter().all(|d| d.pass);
    let strict = max_db + slack < alignment.upper_bound;
    Ok(StabilityReport {
        alignment,
        degrees: out,
        half_distortion,
        gh_chain_pass,
        pass,
        strict,
    })
}
