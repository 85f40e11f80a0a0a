//! Subcommands and exit codes: 0 success, 1 invalid input, 2 computation failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use tlab_core::develop::QuarterPlaneCase;
use tlab_core::develop::{develop_chain, SignSequence};
use tlab_core::geodesic::{
    boundary_run, cluster_excess_experiment, shoot, shoot_auto, ClusterConfig, TemplatePoint, DEFAULT_BRANCH_CAP,
};
use tlab_core::graph::{special_ray_data, AdmissibleGraphSpec};
use tlab_core::recovery::{recover, SyntheticOracle};
use tlab_core::torus::{apply_shift_map, build_torus_template, divergence_experiment, TorusComplexConfig};
use tlab_core::{
    exact_tits_angle, triviality, PlanarPoint, SelfSimilarData, TemplateData, ToleranceConfig, TrivialityVerdict,
};

use crate::formats::{self, TemplateFile};
use crate::svg;

pub const SEED_VAR: &str = "TEMPLATE_LAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "template-lab", version, about = "Geodesics and boundaries of walls-and-strips templates")]
pub struct Cli {
    /// Seed for any sampled choice; TEMPLATE_LAB_SEED overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List violated template invariants.
    Validate {
        template: PathBuf,
        /// Walls used when expanding self-similar data.
        #[arg(long, default_value_t = 40)]
        walls: usize,
    },
    /// Develop a template with explicit rotation signs.
    Develop {
        template: PathBuf,
        /// Comma-separated +/-, one per interior wall; all + when absent.
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 40)]
        walls: usize,
    },
    /// Shoot a ray from a basepoint on wall 0.
    Shoot {
        template: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        dir: f64,
        #[arg(long, default_value_t = 10)]
        walls: usize,
        /// `auto` searches the signs; otherwise comma-separated +/-.
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        signs: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        basepoint: String,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Bracket the boundary interval by branch and bound.
    Boundary {
        template: PathBuf,
        #[arg(long, default_value_t = 50)]
        depth: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        basepoint: String,
        #[arg(long, default_value_t = DEFAULT_BRANCH_CAP)]
        cap: usize,
    },
    /// Triviality verdict and exact Tits angle of self-similar data.
    Selfsim {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        l0: f64,
        #[arg(long, allow_hyphen_values = true)]
        eps0: f64,
        #[arg(long)]
        l1: f64,
        #[arg(long, allow_hyphen_values = true)]
        eps1: f64,
    },
    /// Recover β and the ratios from a synthetic oracle file.
    Recover {
        #[arg(long)]
        oracle: PathBuf,
        /// Angle tolerance for telling β = π/2.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 2_000_000)]
        budget: usize,
    },
    /// Template of a special ray of a graph edge.
    SpecialRays {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        edge: usize,
        #[arg(long, allow_hyphen_values = true)]
        pqrs: String,
        #[arg(long, default_value_t = 12)]
        walls: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Divergence of the shifted ray in the four-torus complex.
    TorusDemo {
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, default_value_t = 5)]
        kmin: u32,
        #[arg(long, default_value_t = 10)]
        kmax: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Excess of paths avoiding a ball around a wall origin.
    ClusterExp {
        template: PathBuf,
        /// Wall range n0..n1.
        #[arg(long, default_value = "3..20")]
        range: String,
        /// r' as a multiple of the cluster radius.
        #[arg(long, default_value_t = 8.0)]
        rprime_mult: f64,
        /// Wall whose origin is the center; the middle of the range by default.
        #[arg(long)]
        center: Option<usize>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 40)]
        walls: usize,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Compute(_) => 2,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

/// Parse argv and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let seed = match std::env::var(SEED_VAR) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(s) => s,
            Err(_) => {
                let _ = writeln!(err, "error: {SEED_VAR} must be an unsigned integer, got {v:?}");
                return 1;
            }
        },
        Err(_) => cli.seed,
    };
    match execute(&cli.command, seed, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| compute(format!("{}: {e}", path.display())))
}

fn load_template(path: &Path, walls: usize) -> Result<TemplateData, CliError> {
    TemplateFile::parse(&read(path)?).and_then(|f| f.into_template(walls)).map_err(invalid)
}

fn checked_template(path: &Path, walls: usize) -> Result<TemplateData, CliError> {
    let t = load_template(path, walls)?;
    let v = t.validate(&ToleranceConfig::default());
    if let Some(first) = v.first() {
        return Err(invalid(format!("invalid template: {first}")));
    }
    Ok(t)
}

fn parse_signs(s: &str) -> Result<SignSequence, CliError> {
    let signs = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| match p.trim() {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(invalid(format!("bad sign {other:?}"))),
        })
        .collect::<Result<Vec<i8>, _>>()?;
    Ok(SignSequence::new(signs))
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| invalid(format!("bad number {p:?}")))).collect()
}

fn parse_point(s: &str) -> Result<PlanarPoint, CliError> {
    match parse_list(s)?.as_slice() {
        [x, y] if x.is_finite() && y.is_finite() => Ok(PlanarPoint::new(*x, *y)),
        _ => Err(invalid(format!("expected x,y, got {s:?}"))),
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = s.split_once("..").ok_or_else(|| invalid(format!("expected n0..n1, got {s:?}")))?;
    let n = |v: &str| v.trim().parse::<usize>().map_err(|_| invalid(format!("bad wall index {v:?}")));
    let (a, b) = (n(a)?, n(b)?);
    if a >= b {
        return Err(invalid("range must have n0 < n1"));
    }
    Ok((a, b))
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    walls: usize,
    violations: Vec<String>,
}

#[derive(Serialize)]
struct DevelopReport {
    origins: Vec<PlanarPoint>,
    quarters: Vec<Option<QuarterPlaneCase>>,
}

#[derive(Serialize)]
struct SelfsimReport {
    trivial: bool,
    case: Option<QuarterPlaneCase>,
    margin: f64,
    tits_angle: f64,
}

#[derive(Serialize)]
struct SpecialRayReport {
    beta: f64,
    l_hat: Vec<f64>,
    eps_hat: Vec<f64>,
    /// Verdict for (β; l̂₃, ε̂₃, l̂₄, ε̂₄).
    verdict: Option<TrivialityVerdict>,
}

#[derive(Serialize)]
struct ClusterSummary {
    n_span: usize,
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "R_prime")]
    r_prime: f64,
    min_excess: f64,
    min_normalized_excess: f64,
    max_closest_approach: f64,
}

fn emit(out: &mut dyn Write, v: &impl Serialize) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(compute)?;
    writeln!(out, "{s}").map_err(compute)
}

fn execute(cmd: &Command, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    let tol = ToleranceConfig::default();
    match cmd {
        Command::Validate { template, walls } => {
            let t = load_template(template, *walls)?;
            let v = t.validate(&tol);
            let list: Vec<String> = v.iter().map(ToString::to_string).collect();
            emit(out, &ValidateReport { valid: list.is_empty(), walls: t.n_walls(), violations: list.clone() })?;
            if !v.is_empty() {
                return Err(invalid(format!("{} violation(s): {}", v.len(), list.join("; "))));
            }
        }
        Command::Develop { template, signs, svg: svg_path, walls } => {
            let t = checked_template(template, *walls)?;
            let signs = match signs {
                Some(s) => parse_signs(s)?,
                None => SignSequence::all_positive(t.n_interior()),
            };
            if signs.len() != t.n_interior() {
                return Err(invalid(format!(
                    "{} interior walls need as many signs, got {}",
                    t.n_interior(),
                    signs.len()
                )));
            }
            let chain = develop_chain(&t, &signs).map_err(compute)?;
            let quarters: Vec<_> = chain.walls.iter().map(|w| w.quarter).collect();
            emit(out, &DevelopReport { origins: chain.origins(), quarters })?;
            if let Some(p) = svg_path {
                write_file(p, &svg::development_svg(&chain, None))?;
            }
        }
        Command::Shoot { template, dir, walls, signs, basepoint, svg: svg_path } => {
            let t = checked_template(template, walls + 1)?;
            let bp = parse_point(basepoint)?;
            let trace = if signs == "auto" {
                shoot_auto(&t, bp, *dir, *walls, &tol)
            } else {
                shoot(&t, bp, *dir, &parse_signs(signs)?, *walls, &tol)
            }
            .map_err(compute)?;
            emit(out, &trace)?;
            if let Some(p) = svg_path {
                let mut signs = trace.signs.signs.clone();
                signs.resize(t.n_interior(), 1);
                let chain = develop_chain(&t, &SignSequence::new(signs)).map_err(compute)?;
                write_file(p, &svg::development_svg(&chain, Some(&trace)))?;
            }
        }
        Command::Boundary { template, depth, csv, basepoint, cap } => {
            let t = checked_template(template, depth + 2)?;
            let bp = parse_point(basepoint)?;
            let run = boundary_run(&t, bp, *depth, &tol, *cap).map_err(compute)?;
            match csv {
                Some(p) => {
                    let mut buf = Vec::new();
                    formats::write_boundary_csv(&mut buf, &run.profile).map_err(compute)?;
                    write_file(p, &String::from_utf8_lossy(&buf))?;
                    emit(out, &run.last())?;
                }
                None => formats::write_boundary_csv(&mut *out, &run.profile).map_err(compute)?,
            }
        }
        Command::Selfsim { beta, l0, eps0, l1, eps1 } => {
            let s = SelfSimilarData::new(*beta, *l0, *eps0, *l1, *eps1);
            s.check().map_err(invalid)?;
            let v = triviality(&s);
            let angle = exact_tits_angle(&s).map_err(compute)?;
            emit(out, &SelfsimReport { trivial: v.trivial, case: v.case, margin: v.margin, tits_angle: angle })?;
        }
        Command::Recover { oracle, tol: eps, budget } => {
            let o: SyntheticOracle = serde_json::from_str(&read(oracle)?).map_err(invalid)?;
            o.check().map_err(invalid)?;
            if !(*eps > 0.0) {
                return Err(invalid("--tol must be positive"));
            }
            let tol = ToleranceConfig { eps_angle: *eps, ..tol };
            let r = recover(&o, &tol, *budget).map_err(compute)?;
            emit(out, &r)?;
        }
        Command::SpecialRays { graph, edge, pqrs, walls, out: out_path } => {
            let spec: AdmissibleGraphSpec = serde_json::from_str(&read(graph)?).map_err(invalid)?;
            spec.validate().map_err(invalid)?;
            let v = parse_list(pqrs)?;
            let pqrs: [f64; 4] = v.try_into().map_err(|_| invalid("--pqrs needs four numbers"))?;
            let d = special_ray_data(&spec, *edge, pqrs, *walls).map_err(invalid)?;
            let verdict = d.self_similar().map(|s| triviality(&s));
            emit(out, &SpecialRayReport { beta: d.beta, l_hat: d.l_hat.clone(), eps_hat: d.eps_hat.clone(), verdict })?;
            if let Some(p) = out_path {
                write_file(p, &formats::template_json(&d.template))?;
            }
        }
        Command::TorusDemo { r, kmin, kmax, csv, svg: svg_path } => {
            if !r.is_finite() {
                return Err(invalid("--r must be finite"));
            }
            let cfg = TorusComplexConfig { r: *r, horizon: 0, itinerary_seed: seed };
            let rep = divergence_experiment(&cfg, *kmin, *kmax).map_err(|e| match e {
                tlab_core::TorusError::BadHorizon | tlab_core::TorusError::BadDirection => invalid(e),
                _ => compute(e),
            })?;
            match csv {
                Some(p) => {
                    let mut buf = Vec::new();
                    formats::write_divergence_csv(&mut buf, &rep.rows).map_err(compute)?;
                    write_file(p, &String::from_utf8_lossy(&buf))?;
                    emit(out, &rep)?;
                }
                None => formats::write_divergence_csv(&mut *out, &rep.rows).map_err(compute)?,
            }
            if let Some(p) = svg_path {
                let horizon = 1usize << kmax;
                let tt = build_torus_template(&TorusComplexConfig { horizon, ..cfg }).map_err(compute)?;
                let trace = tt.trace(horizon).map_err(compute)?;
                write_file(p, &svg::torus_svg(&apply_shift_map(&trace, *r), tt.theta))?;
            }
        }
        Command::ClusterExp { template, range, rprime_mult, center, samples, csv, walls } => {
            let (n0, n1) = parse_range(range)?;
            let t = checked_template(template, (*walls).max(n1 + 2))?;
            if n1 >= t.n_walls() {
                return Err(invalid(format!("range end {n1} beyond the last wall {}", t.n_walls() - 1)));
            }
            if !(*rprime_mult > 0.0) {
                return Err(invalid("--rprime-mult must be positive"));
            }
            let c = center.unwrap_or((n0 + n1) / 2);
            if c >= t.n_walls() {
                return Err(invalid(format!("center wall {c} out of range")));
            }
            let radius = cluster_radius(&t, c, n0, n1);
            let cfg = ClusterConfig {
                center: TemplatePoint::origin(c),
                radius,
                r_prime: rprime_mult * radius,
                n0,
                n1,
                samples: *samples,
                multiplier: *rprime_mult,
                mesh_step: None,
                seed,
            };
            let rep = cluster_excess_experiment(&t, &cfg, &tol).map_err(compute)?;
            let summary = ClusterSummary {
                n_span: rep.n_span,
                radius,
                r_prime: rep.r_prime,
                min_excess: rep.min_excess,
                min_normalized_excess: rep.min_normalized_excess,
                max_closest_approach: rep.max_closest_approach,
            };
            match csv {
                Some(p) => {
                    let mut buf = Vec::new();
                    formats::write_cluster_csv(&mut buf, &rep).map_err(compute)?;
                    write_file(p, &String::from_utf8_lossy(&buf))?;
                    emit(out, &summary)?;
                }
                None => formats::write_cluster_csv(&mut *out, &rep).map_err(compute)?,
            }
        }
    }
    Ok(())
}

/// Upper bound on the distance from the center origin to the origins of walls
/// n0..=n1, by hops along strips; every wall in the range meets the ball.
pub fn cluster_radius(t: &TemplateData, center: usize, n0: usize, n1: usize) -> f64 {
    let hop = |i: usize| t.strips[i].width.hypot(t.strips[i].eps);
    let (lo, hi) = (n0.min(center), n1.max(center));
    let left: f64 = (lo..center).map(hop).sum();
    let right: f64 = (center..hi).map(hop).sum();
    left.max(right).max(1e-9)
}
