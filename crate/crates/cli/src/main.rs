//! `steiner4`: compare construction trees with full Steiner trees.

mod format;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use steiner4_core::oracle::{run_alternating, NetworkProblem, OracleOptions, OracleResult};
use steiner4_core::tetra::canonicalize;
use steiner4_core::verify::{self, VerifyConfig};
use steiner4_core::{batch, gap, Error, IsoscelesTrapezium, Point3, SymmetricTetrahedron, TwoNodeTree};

use crate::format::{csv_row, sig};

#[derive(Parser)]
#[command(
    name = "steiner4",
    version,
    about = "Construction trees versus full Steiner trees for symmetric tetrahedra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report both trees for one configuration.
    Compute(ComputeArgs),
    /// Tabulate the gap over a range of diagonal angles as CSV.
    Sweep(SweepArgs),
    /// Run the self-check suite; exits 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Isosceles trapezium `a12,a34,d`.
    #[arg(long, value_name = "A12,A34,D", value_parser = parse_list::<3>, allow_hyphen_values = true)]
    trap: Option<[f64; 3]>,
    /// Tetrahedron in the canonical frame `x1,y1,z1,x4`.
    #[arg(long, value_name = "X1,Y1,Z1,X4", value_parser = parse_list::<4>, allow_hyphen_values = true)]
    tetra: Option<[f64; 4]>,
    /// Tetrahedron given by its four vertices in any position,
    /// `x,y,z` repeated four times.
    #[arg(long, value_name = "X,Y,Z,...", value_parser = parse_list::<12>, allow_hyphen_values = true)]
    vertices: Option<[f64; 12]>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    a12: f64,
    #[arg(long)]
    a34: f64,
    /// Degrees.
    #[arg(long, allow_hyphen_values = true)]
    theta_min: f64,
    /// Degrees.
    #[arg(long, allow_hyphen_values = true)]
    theta_max: f64,
    #[arg(long)]
    steps: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = VerifyConfig::default().cases)]
    cases: usize,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    /// Relative tolerance for the oracle comparisons.
    #[arg(long, default_value_t = VerifyConfig::default().oracle_tolerance)]
    tol: f64,
    /// Scale the construction weight by 1.01 to check that the suite fails.
    #[arg(long, hide = true)]
    inject_weight_fault: bool,
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<_, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::NotBoundarySymmetric { .. }) {
            3
        } else {
            2
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => compute(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Verify(args) => Ok(run_verify(&args)),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[derive(Serialize)]
struct TreeReport {
    node_top: [f64; 3],
    node_bottom: [f64; 3],
    weight: f64,
    length: f64,
}

impl From<&TwoNodeTree> for TreeReport {
    fn from(t: &TwoNodeTree) -> Self {
        TreeReport {
            node_top: point(&t.node_top),
            node_bottom: point(&t.node_bottom),
            weight: sig(t.weight),
            length: sig(t.total),
        }
    }
}

#[derive(Serialize)]
struct OracleReport {
    value: f64,
    closed_form: f64,
    relative_error: f64,
    gradient_residual: f64,
    converged: bool,
}

impl OracleReport {
    fn new(r: &OracleResult, closed_form: f64) -> Self {
        OracleReport {
            value: sig(r.value),
            closed_form: sig(closed_form),
            relative_error: sig((r.value - closed_form).abs() / closed_form),
            gradient_residual: sig(r.gradient_residual),
            converged: r.converged,
        }
    }
}

#[derive(Serialize)]
struct TetraOracleReport {
    value: f64,
    relative_error: f64,
    max_axis_distance: f64,
    converged: bool,
}

#[derive(Serialize)]
struct ComputeReport {
    input: &'static str,
    a12: f64,
    a34: f64,
    d: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_deg: Option<f64>,
    satisfies_standing_assumption: bool,
    theta_deg: f64,
    w: f64,
    construction_tree: TreeReport,
    steiner_tree: TreeReport,
    l_construction: f64,
    l_steiner: f64,
    gap: f64,
    classification: &'static str,
    oracle_construction: OracleReport,
    oracle_steiner: OracleReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_tetrahedron: Option<TetraOracleReport>,
}

fn point(p: &Point3) -> [f64; 3] {
    [sig(p.x), sig(p.y), sig(p.z)]
}

fn oracle(terminals: [Point3; 4], weight: f64) -> Result<OracleResult, Failure> {
    let prob = NetworkProblem::unit(terminals, weight)?;
    Ok(run_alternating(&prob, false, &OracleOptions::default())?)
}

fn compute(args: &ComputeArgs) -> Result<ExitCode, Failure> {
    let input = &args.input;
    let (kind, trap, tetra) = if let Some([a12, a34, d]) = input.trap {
        ("trapezium", IsoscelesTrapezium::new(a12, a34, d)?, None)
    } else if let Some([x1, y1, z1, x4]) = input.tetra {
        let t = SymmetricTetrahedron::new(x1, y1, z1, x4)?;
        ("tetrahedron", t.reduce_to_trapezium()?, Some((t, t.vertices())))
    } else if let Some(v) = input.vertices {
        let pts: [Point3; 4] = std::array::from_fn(|i| Point3::new(v[3 * i], v[3 * i + 1], v[3 * i + 2]));
        let canon = canonicalize(&pts)?;
        let terminals = canon.labels.map(|i| pts[i]);
        (
            "tetrahedron",
            canon.tetra.reduce_to_trapezium()?,
            Some((canon.tetra, terminals)),
        )
    } else {
        unreachable!("clap requires one input form")
    };

    let theta = trap.diagonal_angle();
    if theta > std::f64::consts::FRAC_PI_2 {
        return Err(invalid(format!(
            "diagonal angle {}° exceeds 90°; the construction tree needs d ≥ (a12 + a34)/2",
            sig(theta.to_degrees())
        )));
    }
    let construction = trap.construction_tree()?;
    let steiner = trap.steiner_tree()?;
    let cmp = gap(&trap)?;

    let oc = oracle(trap.terminals(), construction.weight)?;
    let os = oracle(trap.terminals(), 1.0)?;
    let oracle_tetrahedron = match tetra {
        Some((_, terminals)) => {
            let r = oracle(terminals, construction.weight)?;
            let axis = steiner4_core::Axis::through(
                terminals[0].midpoint(&terminals[1]),
                terminals[2].midpoint(&terminals[3]),
            )?;
            Some(TetraOracleReport {
                value: sig(r.value),
                relative_error: sig((r.value - cmp.l_construction).abs() / cmp.l_construction),
                max_axis_distance: sig(axis.distance_to(&r.node_top).max(axis.distance_to(&r.node_bottom))),
                converged: r.converged,
            })
        }
        None => None,
    };

    let report = ComputeReport {
        input: kind,
        a12: sig(trap.a12()),
        a34: sig(trap.a34()),
        d: sig(trap.d()),
        phi_deg: tetra.map(|(t, _)| sig(t.twist_angle().to_degrees())),
        satisfies_standing_assumption: trap.d() > trap.a12().max(trap.a34()),
        theta_deg: sig(theta.to_degrees()),
        w: sig(construction.weight),
        construction_tree: (&construction).into(),
        steiner_tree: (&steiner).into(),
        l_construction: sig(cmp.l_construction),
        l_steiner: sig(cmp.l_steiner),
        gap: sig(cmp.gap),
        classification: cmp.classification.as_str(),
        oracle_construction: OracleReport::new(&oc, cmp.l_construction),
        oracle_steiner: OracleReport::new(&os, cmp.l_steiner),
        oracle_tetrahedron,
    };

    match args.format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&report).map_err(|e| invalid(e.to_string()))?;
            println!("{text}");
        }
        Format::Csv => {
            println!("input,a12,a34,d,phi_deg,theta_deg,w,l_construction,l_steiner,gap,classification");
            println!(
                "{}",
                csv_row(&[
                    report.input.to_string(),
                    format::text(report.a12),
                    format::text(report.a34),
                    format::text(report.d),
                    report.phi_deg.map_or_else(String::new, format::text),
                    format::text(report.theta_deg),
                    format::text(report.w),
                    format::text(report.l_construction),
                    format::text(report.l_steiner),
                    format::text(report.gap),
                    report.classification.to_string(),
                ])
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: &SweepArgs) -> Result<ExitCode, Failure> {
    let SweepArgs {
        a12,
        a34,
        theta_min,
        theta_max,
        steps,
    } = *args;
    if !(a12 > 0.0 && a12.is_finite() && a34 > 0.0 && a34.is_finite()) {
        return Err(invalid("--a12 and --a34 must be positive and finite"));
    }
    if !(theta_min > 0.0 && theta_min < theta_max && theta_max <= 90.0) {
        return Err(invalid("need 0 < --theta-min < --theta-max <= 90 (degrees)"));
    }
    if steps < 2 {
        return Err(invalid("--steps must be at least 2"));
    }

    let angles: Vec<f64> = (0..steps)
        .map(|i| {
            if i == steps - 1 {
                theta_max
            } else {
                theta_min + (theta_max - theta_min) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    let rows = batch::map(&angles, |&deg| -> Result<String, Error> {
        let trap = IsoscelesTrapezium::from_theta(a12, a34, deg.to_radians())?;
        let c = trap.construction_tree()?;
        let r = gap(&trap)?;
        Ok(csv_row(&[
            format::text(deg),
            format::text(trap.d()),
            format::text(c.weight),
            format::text(r.l_construction),
            format::text(r.l_steiner),
            format::text(r.gap),
            r.classification.as_str().to_string(),
        ]))
    });

    let mut out = String::from("theta_deg,d,w,l_construction,l_steiner,gap,classification\n");
    for row in rows {
        out.push_str(&row?);
        out.push('\n');
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: &VerifyArgs) -> ExitCode {
    let cfg = VerifyConfig {
        cases: args.cases,
        seed: args.seed,
        oracle_tolerance: args.tol,
        weight_fault: if args.inject_weight_fault { 1.01 } else { 1.0 },
    };
    let checks = verify::run(&cfg);
    for c in &checks {
        println!(
            "{} {} worst={} tol={}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            format::text(c.worst),
            format::text(c.tolerance)
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {} failed", checks.len(), failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
