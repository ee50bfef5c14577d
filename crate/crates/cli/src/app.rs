//! Command-line surface.

use std::collections::BTreeSet;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use formetric::counterexamples::{reflection_fixture, sphere_reflection_pair, sphere_two_point_pair, torus_mst_pair};
use formetric::phase::InverseOutcome;
use formetric::{
    bottleneck_distance, formation_distance, inverse_bound_check, signature, AlignmentResult, Configuration,
    CutLocus, GroupElement, QuotientGeodesic, SolverOptions,
};

use crate::error::CliError;
use crate::io::{
    configuration_to_file, diagram_to_file, looks_like_configuration, parse_configuration, parse_diagram,
    parse_gap_labeling, parse_trajectory, trajectory_to_file,
};
use crate::monitor::{monitor, Trajectory};
use crate::verify::verify_all;

#[derive(Debug, Parser)]
#[command(name = "formetric", version, about = "Symmetry- and relabeling-invariant formation distances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Homology degrees, comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,1")]
    pub degrees: Vec<usize>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 64)]
    pub restarts: usize,

    #[arg(long, global = true, default_value_t = 20)]
    pub refine_iters: usize,

    #[arg(long, global = true, default_value_t = 1e-3)]
    pub grid_resolution: f64,

    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tolerance: f64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Counterexample {
    /// Collinear quadruple and square on the torus with equal H0 diagrams.
    TorusMst,
    /// Random generic sphere configuration and its mirror image.
    SphereReflection,
    /// The frozen five-point mirror pair.
    ReflectionFixture,
    /// Two-point sphere shapes.
    SphereTwoPoint,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified formation distance between two configurations, or the
    /// distance matrix of several.
    Dist {
        #[arg(short, long = "input", required = true)]
        input: Vec<String>,
    },
    /// Rips persistence diagrams of a configuration.
    Persist {
        #[arg(short, long = "input", required = true)]
        input: String,
    },
    /// Bottleneck distance between two diagrams, or between the signatures
    /// of two configurations.
    Bottleneck {
        #[arg(short, long = "input", required = true, num_args = 1)]
        input: Vec<String>,
    },
    /// Point on the quotient geodesic between two configurations.
    Geodesic {
        #[arg(short, long = "input", required = true)]
        input: Vec<String>,
        /// Path parameter in [0, 1].
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Emit a trajectory with this many equal steps instead of one point.
        #[arg(long)]
        steps: Option<usize>,
        /// Break cut-locus ties deterministically instead of failing.
        #[arg(long)]
        resolve_cut: bool,
    },
    /// Diagram Lipschitz monitoring along a trajectory.
    Monitor {
        #[arg(short, long = "input", required = true)]
        input: String,
    },
    /// Two-sided inverse bound for labeled phase formations.
    InvertCheck {
        #[arg(short, long = "input", required = true)]
        input: Vec<String>,
        /// Gap labeling file.
        #[arg(long)]
        labeling: String,
    },
    /// Emit a counterexample pair.
    Counterexample {
        #[arg(value_enum)]
        name: Counterexample,
        /// Side length for torus-mst.
        #[arg(long, default_value_t = 0.2)]
        a: f64,
        /// Size for sphere-reflection.
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        delta_x: f64,
        #[arg(long, default_value_t = 0.4)]
        delta_y: f64,
        /// Emit only one member of the pair, as a plain configuration.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Run the verification suite.
    Verify {
        /// Multiplier on every claim's trial count; 1 is the full scale.
        #[arg(long, default_value_t = 0.1)]
        budget: f64,
        /// Double one diagram death in the named claim's fixture.
        #[arg(long)]
        tamper: Option<String>,
    },
}

/// Text to print and whether every asserted check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, success: true }
    }
}

impl GlobalArgs {
    pub fn solver_options(&self) -> Result<SolverOptions, CliError> {
        let opts = SolverOptions {
            restarts: self.restarts,
            refine_iters: self.refine_iters,
            seed: self.seed,
            grid_resolution: self.grid_resolution,
            tolerance: self.tolerance,
        };
        opts.validate()?;
        Ok(opts)
    }

    fn degree_set(&self) -> Result<BTreeSet<usize>, CliError> {
        let set: BTreeSet<usize> = self.degrees.iter().copied().collect();
        if set.is_empty() {
            return Err(CliError::Input("--degrees must list at least one degree".into()));
        }
        Ok(set)
    }

    fn json_only(&self, what: &str) -> Result<(), CliError> {
        match self.output {
            OutputFormat::Json => Ok(()),
            OutputFormat::Csv => Err(CliError::Input(format!(
                "CSV output is only available for distance matrices and monitor tables, not {what}"
            ))),
        }
    }
}

/// Reads every input, with `-` meaning stdin (at most once).
fn read_inputs(paths: &[String], stdin: &mut dyn Read) -> Result<Vec<Vec<u8>>, CliError> {
    if paths.iter().filter(|p| *p == "-").count() > 1 {
        return Err(CliError::Input("stdin can be used for at most one input".into()));
    }
    paths
        .iter()
        .map(|p| {
            if p == "-" {
                let mut buf = Vec::new();
                stdin.read_to_end(&mut buf)?;
                Ok(buf)
            } else {
                std::fs::read(p).map_err(|e| CliError::Input(format!("{p}: {e}")))
            }
        })
        .collect()
}

fn exactly<const N: usize>(inputs: Vec<Vec<u8>>, what: &str) -> Result<[Vec<u8>; N], CliError> {
    let got = inputs.len();
    inputs
        .try_into()
        .map_err(|_| CliError::Input(format!("{what} takes {N} inputs, got {got}")))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn group_json(g: &GroupElement) -> Value {
    match g {
        GroupElement::Rotation(q) => json!({ "rotation": [q.w, q.x, q.y, q.z] }),
        GroupElement::Translation(t) => json!({ "translation": t }),
    }
}

fn alignment_json(a: &AlignmentResult) -> Value {
    json!({
        "distance_upper_bound": a.upper_bound,
        "exact": a.exact,
        "method": a.method.name(),
        "g": group_json(&a.g),
        "sigma": a.sigma.images(),
        "evaluations": a.evaluations,
    })
}

fn matrix_csv(m: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Dist { input } => {
            let opts = g.solver_options()?;
            let configs = read_inputs(input, stdin)?
                .iter()
                .map(|b| parse_configuration(b))
                .collect::<Result<Vec<_>, _>>()?;
            if configs.len() < 2 {
                return Err(CliError::Input("dist needs at least two inputs".into()));
            }
            let k = configs.len();
            if k == 2 && g.output == OutputFormat::Json {
                let a = formation_distance(&configs[0], &configs[1], &opts)?;
                return Ok(Outcome::ok(pretty(&alignment_json(&a))));
            }
            let mut matrix = vec![vec![0.0; k]; k];
            let mut exact = true;
            for i in 0..k {
                for j in (i + 1)..k {
                    let a = formation_distance(&configs[i], &configs[j], &opts)?;
                    exact &= a.exact;
                    matrix[i][j] = a.upper_bound;
                    matrix[j][i] = a.upper_bound;
                }
            }
            Ok(Outcome::ok(match g.output {
                OutputFormat::Json => pretty(&json!({ "matrix": matrix, "exact": exact })),
                OutputFormat::Csv => matrix_csv(&matrix),
            }))
        }
        Command::Persist { input } => {
            g.json_only("diagrams")?;
            let [bytes] = exactly::<1>(read_inputs(std::slice::from_ref(input), stdin)?, "persist")?;
            let x = parse_configuration(&bytes)?;
            let sig = signature(&x, &g.degree_set()?)?;
            let diagrams: Vec<_> = sig.values().map(diagram_to_file).collect();
            Ok(Outcome::ok(pretty(&json!({ "diagrams": diagrams }))))
        }
        Command::Bottleneck { input } => {
            g.json_only("bottleneck distances")?;
            let [a, b] = exactly::<2>(read_inputs(input, stdin)?, "bottleneck")?;
            if looks_like_configuration(&a) || looks_like_configuration(&b) {
                let (x, y) = (parse_configuration(&a)?, parse_configuration(&b)?);
                let degrees = g.degree_set()?;
                let (sx, sy) = (signature(&x, &degrees)?, signature(&y, &degrees)?);
                let rows: Vec<Value> = degrees
                    .iter()
                    .map(|k| Ok(json!({ "degree": k, "distance": bottleneck_distance(&sx[k], &sy[k])? })))
                    .collect::<Result<_, formetric::Error>>()?;
                Ok(Outcome::ok(pretty(&json!({ "distances": rows }))))
            } else {
                let (da, db) = (parse_diagram(&a)?, parse_diagram(&b)?);
                let d = bottleneck_distance(&da, &db)?;
                Ok(Outcome::ok(pretty(&json!({ "degree": da.degree(), "distance": d }))))
            }
        }
        Command::Geodesic {
            input,
            t,
            steps,
            resolve_cut,
        } => {
            g.json_only("geodesics")?;
            let opts = g.solver_options()?;
            let [a, b] = exactly::<2>(read_inputs(input, stdin)?, "geodesic")?;
            let (x, y) = (parse_configuration(&a)?, parse_configuration(&b)?);
            let cut = if *resolve_cut { CutLocus::Resolve } else { CutLocus::Reject };
            let geo = QuotientGeodesic::new(&x, &y, &opts)?;
            match steps {
                None => Ok(Outcome::ok(pretty(&configuration_to_file(&geo.point(*t, cut)?)))),
                Some(0) => Err(CliError::Input("--steps must be positive".into())),
                Some(k) => {
                    let frames = (0..=*k)
                        .map(|i| {
                            let s = i as f64 / *k as f64;
                            geo.point(s, cut).map(|c| (s, c))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Outcome::ok(pretty(&trajectory_to_file(&Trajectory::new(frames)?))))
                }
            }
        }
        Command::Monitor { input } => {
            let [bytes] = exactly::<1>(read_inputs(std::slice::from_ref(input), stdin)?, "monitor")?;
            let trajectory = parse_trajectory(&bytes)?;
            let r = monitor(&trajectory, &g.degree_set()?, &g.solver_options()?)?;
            let text = match g.output {
                OutputFormat::Json => pretty(&r),
                OutputFormat::Csv => r.to_csv(),
            };
            Ok(Outcome {
                text,
                success: r.lipschitz_consistent,
            })
        }
        Command::InvertCheck { input, labeling } => {
            g.json_only("inverse checks")?;
            let [a, b] = exactly::<2>(read_inputs(input, stdin)?, "invert-check")?;
            let (x, y) = (parse_configuration(&a)?, parse_configuration(&b)?);
            let lab = std::fs::read(labeling).map_err(|e| CliError::Input(format!("{labeling}: {e}")))?;
            let r = inverse_bound_check(&x, &y, &parse_gap_labeling(&lab)?)?;
            let outcome = match &r.outcome {
                InverseOutcome::HypothesisFails { reason } => json!({ "status": "hypothesis-fails", "reason": reason }),
                InverseOutcome::Checked {
                    distance,
                    bound,
                    max_gap_change,
                    lower_pass,
                    upper_pass,
                    gap_control_pass,
                } => json!({
                    "status": "checked",
                    "distance": distance,
                    "bound": bound,
                    "max_gap_change": max_gap_change,
                    "lower_pass": lower_pass,
                    "upper_pass": upper_pass,
                    "gap_control_pass": gap_control_pass,
                }),
            };
            let text = pretty(&json!({
                "epsilon": r.epsilon,
                "gate": r.gate,
                "outcome": outcome,
                "pass": r.pass(),
            }));
            Ok(Outcome {
                text,
                success: r.pass(),
            })
        }
        Command::Counterexample {
            name,
            a,
            n,
            delta_x,
            delta_y,
            index,
        } => {
            g.json_only("configurations")?;
            let (x, y): (Configuration, Configuration) = match name {
                Counterexample::TorusMst => torus_mst_pair(*a)?,
                Counterexample::SphereReflection => sphere_reflection_pair(*n, g.seed)?,
                Counterexample::ReflectionFixture => reflection_fixture(),
                Counterexample::SphereTwoPoint => sphere_two_point_pair(*delta_x, *delta_y)?,
            };
            let text = match index {
                None => pretty(&json!({
                    "name": name.to_possible_value().expect("named variant").get_name(),
                    "configurations": [configuration_to_file(&x), configuration_to_file(&y)],
                })),
                Some(0) => pretty(&configuration_to_file(&x)),
                Some(1) => pretty(&configuration_to_file(&y)),
                Some(i) => return Err(CliError::Input(format!("--index must be 0 or 1, got {i}"))),
            };
            Ok(Outcome::ok(text))
        }
        Command::Verify { budget, tamper } => {
            g.json_only("verification reports")?;
            let r = verify_all(g.seed, *budget, &g.solver_options()?, tamper.as_deref())?;
            Ok(Outcome {
                text: pretty(&r),
                success: r.pass,
            })
        }
    }
}
