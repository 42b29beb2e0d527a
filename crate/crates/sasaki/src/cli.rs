//! Argument parsing and command dispatch.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use sasaki_core::closed_forms::{ellipse_perimeter, index_sum_bound};
use sasaki_core::fields::AngleField;
use sasaki_core::functional::{
    area, axisymmetric_area, k_conjectured_closed_form, lower_bound_with, BoundReading,
    BOUND_SLACK,
};
use sasaki_core::optimizer::{
    first_integral_residual, minimize_profile, Direction, MinimizeOptions,
};
use sasaki_core::quadrature::QuadratureScheme;
use sasaki_core::sphere::{make_annulus, AnnulusSpec, Region};

use crate::error::{CliError, ExitCode};
use crate::grid_io;
use crate::report::{
    bound_note, sig, to_json, AnnulusRow, AreaJson, BoundJson, IndexRow, OptimizeJson,
};
use crate::verify::{self, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "sasaki", version, about = "Sasaki-metric area of unit vector fields on spherical annuli")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// K and the lower bound for an annulus.
    Bound(BoundArgs),
    /// Area of a field, with its gap to the applicable bound.
    Area(AreaArgs),
    /// Discrete minimization of the reduced area.
    Optimize(OptimizeArgs),
    /// Run every property check.
    Verify(VerifyArgs),
    /// Tabulate bounds over several annuli or index classes.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldChoice {
    Minimizer,
    Constant,
    Linear,
    Vk,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleChoice {
    GaussLegendre,
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReadingChoice {
    Corrected,
    Literal,
}

impl From<ReadingChoice> for BoundReading {
    fn from(r: ReadingChoice) -> Self {
        match r {
            ReadingChoice::Corrected => BoundReading::Corrected,
            ReadingChoice::Literal => BoundReading::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionChoice {
    Steepest,
    Cg,
}

#[derive(Debug, Clone, Args)]
pub struct AngleArgs {
    /// Read angle inputs in degrees (output stays in radians).
    #[arg(long, global = true)]
    pub degrees: bool,
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    #[arg(long, value_enum)]
    pub rule: Option<RuleChoice>,
    /// Gauss-Legendre order.
    #[arg(long)]
    pub order: Option<usize>,
    /// Gauss-Legendre panel count.
    #[arg(long)]
    pub panels: Option<usize>,
    /// Adaptive Simpson tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Integrate in alpha directly instead of the endpoint variable.
    #[arg(long)]
    pub no_substitution: bool,
}

impl QuadArgs {
    pub fn scheme(&self) -> Result<QuadratureScheme, CliError> {
        let base = QuadratureScheme::default();
        let rule = self.rule.unwrap_or(if self.tol.is_some() {
            RuleChoice::Simpson
        } else {
            RuleChoice::GaussLegendre
        });
        let q = match rule {
            RuleChoice::GaussLegendre => {
                if self.tol.is_some() {
                    return Err(CliError::BadInput("--tol applies to the simpson rule".into()));
                }
                let (order, panels) = match base.rule {
                    sasaki_core::quadrature::Rule::GaussLegendre { order, panels } => (order, panels),
                    _ => unreachable!("default rule is Gauss-Legendre"),
                };
                QuadratureScheme::gauss_legendre(self.order.unwrap_or(order), self.panels.unwrap_or(panels))
            }
            RuleChoice::Simpson => {
                if self.order.is_some() || self.panels.is_some() {
                    return Err(CliError::BadInput(
                        "--order/--panels apply to the gauss-legendre rule".into(),
                    ));
                }
                match self.tol {
                    Some(t) => QuadratureScheme::adaptive_simpson(t),
                    None => QuadratureScheme::oracle(),
                }
            }
        }
        .with_substitution(!self.no_substitution);
        q.validate().map_err(|e| CliError::BadInput(e.to_string()))?;
        Ok(q)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha0: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub output: Output,
    #[command(flatten)]
    pub angle: AngleArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long, value_enum, default_value = "corrected", hide = true)]
    pub bound_reading: ReadingChoice,
}

#[derive(Debug, Clone, Args)]
pub struct AreaArgs {
    /// Annulus half-width; not used for `--field vk`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha0: Option<f64>,
    #[arg(long, value_enum, default_value = "minimizer")]
    pub field: FieldChoice,
    /// Index class for `--field vk`.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Grid CSV for `--field grid`.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Angle for `--field constant` (default pi/2).
    #[arg(long, allow_hyphen_values = true)]
    pub value: Option<f64>,
    /// Refuse fields that break the annulus boundary hypotheses.
    #[arg(long)]
    pub require_bc: bool,
    /// Test fixture: raise the bound by this much before the violation check.
    #[arg(long, default_value_t = 0.0, hide = true, allow_hyphen_values = true)]
    pub inject_bound_offset: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub output: Output,
    #[command(flatten)]
    pub angle: AngleArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha0: f64,
    /// Segment count.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 2_000_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub grad_tol: f64,
    #[arg(long, value_enum, default_value = "steepest")]
    pub direction: DirectionChoice,
    /// Write the optimized profile as grid CSV.
    #[arg(long)]
    pub export: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub output: Output,
    #[command(flatten)]
    pub angle: AngleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "corrected", hide = true)]
    pub bound_reading: ReadingChoice,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated annulus half-widths.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "k", required_unless_present = "k")]
    pub alpha0: Option<String>,
    /// Comma-separated index classes.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub output: Output,
    #[command(flatten)]
    pub angle: AngleArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

/// Text for stdout plus the exit code; errors go to stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: ExitCode,
}

fn ok(stdout: String) -> Result<Outcome, CliError> {
    Ok(Outcome { stdout, code: ExitCode::Ok })
}

fn radians(x: f64, angle: &AngleArgs) -> f64 {
    if angle.degrees {
        x.to_radians()
    } else {
        x
    }
}

fn annulus(x: f64, angle: &AngleArgs) -> Result<AnnulusSpec, CliError> {
    let a0 = radians(x, angle);
    make_annulus(a0).map_err(|_| CliError::BadInput("alpha0 must lie in (0, pi/2)".into()))
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Bound(a) => cmd_bound(&a),
        Command::Area(a) => cmd_area(&a),
        Command::Optimize(a) => cmd_optimize(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    }
}

pub fn bound_record(a: AnnulusSpec, q: &QuadratureScheme, reading: BoundReading) -> Result<BoundJson, CliError> {
    let lb = lower_bound_with(a, q, reading)?;
    let check = lower_bound_with(a, &q.companion(), reading)?;
    Ok(BoundJson {
        alpha0: a.alpha0(),
        k: lb.k_constant,
        bound: lb.bound,
        quad_error: (lb.bound - check.bound).abs(),
        closed_form_conjecture_gap: lb.k_constant - k_conjectured_closed_form(a),
        notes: bound_note(reading),
    })
}

pub fn cmd_bound(args: &BoundArgs) -> Result<Outcome, CliError> {
    let a = annulus(args.alpha0, &args.angle)?;
    let q = args.quad.scheme()?;
    let rec = bound_record(a, &q, args.bound_reading.into())?;
    ok(match args.output {
        Output::Json => to_json(&rec),
        Output::Csv => format!("{}\n{}\n", BoundJson::CSV_HEADER, rec.csv_row()),
    })
}

pub fn cmd_area(args: &AreaArgs) -> Result<Outcome, CliError> {
    let q = args.quad.scheme()?;
    let need_annulus = || -> Result<AnnulusSpec, CliError> {
        let x = args
            .alpha0
            .ok_or_else(|| CliError::BadInput("--alpha0 is required for this field".into()))?;
        annulus(x, &args.angle)
    };
    if args.field != FieldChoice::Vk && args.k.is_some() {
        return Err(CliError::BadInput("--k applies to --field vk".into()));
    }
    if args.field != FieldChoice::Grid && args.grid.is_some() {
        return Err(CliError::BadInput("--grid applies to --field grid".into()));
    }
    let (field, label) = match args.field {
        FieldChoice::Minimizer => (AngleField::minimizer(need_annulus()?), "minimizer".to_string()),
        FieldChoice::Linear => (AngleField::linear(need_annulus()?), "linear".to_string()),
        FieldChoice::Constant => {
            let v = args.value.map(|x| radians(x, &args.angle)).unwrap_or(FRAC_PI_2);
            if !v.is_finite() {
                return Err(CliError::BadInput("--value must be finite".into()));
            }
            (AngleField::constant(v, Region::Annulus(need_annulus()?)), format!("constant({v})"))
        }
        FieldChoice::Vk => {
            let k = args.k.ok_or_else(|| CliError::BadInput("--field vk needs --k".into()))?;
            (AngleField::vk(k), format!("vk({k})"))
        }
        FieldChoice::Grid => {
            let path = args
                .grid
                .as_ref()
                .ok_or_else(|| CliError::BadInput("--field grid needs --grid PATH".into()))?;
            let a = need_annulus()?;
            (grid_io::load_grid_field(path, a)?, format!("grid({})", path.display()))
        }
    };
    let region = field.region();
    let mut report = area(&field, region, &q)?;
    if args.inject_bound_offset != 0.0 {
        if let (Some(b), Some(g)) = (report.lower_bound.as_mut(), report.gap.as_mut()) {
            *b += args.inject_bound_offset;
            *g -= args.inject_bound_offset;
            let tolerance = report.estimated_quadrature_error + BOUND_SLACK;
            if report.hypotheses_hold && *g < -tolerance {
                return Err(CliError::BoundViolation { area: report.area, bound: *b, tolerance });
            }
        }
    }
    if args.require_bc {
        match &report.boundary {
            Some(b) if b.all_hold() => {}
            Some(b) => {
                return Err(CliError::BadInput(format!(
                    "field breaks the boundary conditions (max violation {})",
                    sig(b.max_violation)
                )))
            }
            None => {
                return Err(CliError::BadInput(
                    "boundary conditions are defined on annuli only".into(),
                ))
            }
        }
    }
    let region_label = match region {
        Region::Annulus(a) => format!("annulus({})", a.alpha0()),
        Region::PuncturedSphere => "punctured-sphere".to_string(),
    };
    let rec = AreaJson::new(label, region_label, &report, bound_note(BoundReading::Corrected));
    ok(match args.output {
        Output::Json => to_json(&rec),
        Output::Csv => format!("{}\n{}\n", AreaJson::CSV_HEADER, rec.csv_row()),
    })
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<Outcome, CliError> {
    let a = annulus(args.alpha0, &args.angle)?;
    if args.n < sasaki_core::optimizer::MIN_SEGMENTS {
        return Err(CliError::BadInput("--n must be at least 8".into()));
    }
    if !(args.grad_tol > 0.0) {
        return Err(CliError::BadInput("--grad-tol must be positive".into()));
    }
    let (direction, name) = match args.direction {
        DirectionChoice::Steepest => (Direction::SteepestDescent, "steepest"),
        DirectionChoice::Cg => (Direction::ConjugateGradient, "cg"),
    };
    let opts = MinimizeOptions {
        max_iters: args.max_iters,
        grad_tol: args.grad_tol,
        direction,
        ..MinimizeOptions::default()
    };
    let r = minimize_profile(a, args.n, &opts)?;
    if let Some(path) = &args.export {
        grid_io::export_profile(path, &r.profile)?;
    }
    let bound = lower_bound_with(a, &QuadratureScheme::default(), BoundReading::Corrected)?.bound;
    let rec = OptimizeJson {
        alpha0: a.alpha0(),
        segments: args.n,
        direction: name,
        iterations: r.iterations,
        converged: r.converged,
        gradient_norm: r.gradient_norm,
        final_area: r.final_area,
        profile_area: r.profile_area,
        bound,
        max_deviation_from_closed_form: r.max_deviation_from_closed_form,
        first_integral_residual: first_integral_residual(&r.profile).residual,
        exported_to: args.export.as_ref().map(|p| p.display().to_string()),
    };
    ok(match args.output {
        Output::Json => to_json(&rec),
        Output::Csv => format!("{}\n{}\n", OptimizeJson::CSV_HEADER, rec.csv_row()),
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let cfg = VerifyConfig { seed: args.seed, bound_reading: args.bound_reading.into() };
    let results = verify::run(&cfg);
    let mut out = format!("seed {}\n", args.seed);
    out.push_str(&verify::render_table(&results));
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    let code = if failed.is_empty() { ExitCode::Ok } else { ExitCode::VerifyFailed };
    Ok(Outcome { stdout: out, code })
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CliError> {
    let items: Vec<&str> = raw.split(',').map(str::trim).collect();
    if raw.trim().is_empty() || items.iter().any(|s| s.is_empty()) {
        return Err(CliError::BadInput(format!("{what} list is empty or malformed")));
    }
    items
        .iter()
        .map(|s| s.parse().map_err(|_| CliError::BadInput(format!("bad {what} value `{s}`"))))
        .collect()
}

pub fn annulus_row(a: AnnulusSpec, q: &QuadratureScheme) -> Result<AnnulusRow, CliError> {
    let lb = lower_bound_with(a, q, BoundReading::Corrected)?;
    let value = axisymmetric_area(&AngleField::minimizer(a), a, q)?;
    Ok(AnnulusRow {
        alpha0: a.alpha0(),
        k: lb.k_constant,
        bound: lb.bound,
        minimizer_area: value,
        gap: value - lb.bound,
    })
}

pub fn index_row(k: i64, q: &QuadratureScheme) -> Result<IndexRow, CliError> {
    let bcgn = match k {
        0 | 2 => None,
        _ => Some(PI * ellipse_perimeter(k)?),
    };
    let r = area(&AngleField::vk(k), Region::PuncturedSphere, q)?;
    Ok(IndexRow { k, bcj: index_sum_bound(k), bcgn, vk_area: r.area })
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let q = args.quad.scheme()?;
    match (&args.alpha0, &args.k) {
        (Some(raw), None) => {
            let annuli = parse_list::<f64>(raw, "alpha0")?
                .into_iter()
                .map(|x| annulus(x, &args.angle))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = annuli
                .par_iter()
                .map(|&a| annulus_row(a, &q))
                .collect::<Result<Vec<_>, _>>()?;
            ok(match args.output {
                Output::Csv => csv_table(AnnulusRow::CSV_HEADER, rows.iter().map(|r| r.csv_row())),
                Output::Json => to_json(&rows),
            })
        }
        (None, Some(raw)) => {
            let ks = parse_list::<i64>(raw, "k")?;
            let rows = ks.par_iter().map(|&k| index_row(k, &q)).collect::<Result<Vec<_>, _>>()?;
            ok(match args.output {
                Output::Csv => csv_table(IndexRow::CSV_HEADER, rows.iter().map(|r| r.csv_row())),
                Output::Json => to_json(&rows),
            })
        }
        _ => Err(CliError::BadInput("give exactly one of --alpha0 or --k".into())),
    }
}

fn csv_table(header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}
