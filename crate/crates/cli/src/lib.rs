//! Command-line front end: operators on forms, identity checks, coordinate
//! evaluation and the slicing ramps.
//!
//! Exit status: 0 on success or a verified check, 1 when a check fails,
//! 2 on usage or internal errors.

use std::fmt::Write as _;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use rumin_core::dsl::{self, render_form, Format};
use rumin_core::identities::report::{to_json, to_latex, to_text};
use rumin_core::identities::{check, IdentityId, VerificationReport};
use rumin_core::numeric::{
    bind_and_eval, finite_diff_check, lipschitz_estimate, polynomial_of, random_identity_check,
    Bindings, CoordinateModel, RandomCheckOptions, RandomCheckReport, SlicingProfile,
};
use rumin_core::{ConventionProfile, Form, HeisenbergContext};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rumin",
    version,
    about = "Exterior calculus on the Heisenberg group"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Dimension parameter of H^n. `verify` runs every supported n when omitted.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Sign of dθ = s Σ dx_j∧dy_j: `-` (default) or `+`.
    #[arg(long, global = true, default_value = "-", allow_hyphen_values = true)]
    pub convention: ConventionProfile,
    /// Output format: text, structured or latex.
    #[arg(long, global = true, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Part {
    /// The θ-free monomials.
    Horizontal,
    /// The monomials containing θ.
    Vertical,
    /// `β` in `ω = ω' + β∧θ`.
    Beta,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exterior derivative.
    D {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Wedge product of two forms.
    Wedge {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
    },
    /// `β ↦ dθ∧β` on horizontal (n-1)-forms.
    #[command(name = "L")]
    L {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Inverse of L on horizontal (n+1)-forms.
    #[command(name = "Linv")]
    Linv {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// `α ↦ L⁻¹(-(dα)|h)` on n-forms.
    #[command(name = "scriptL")]
    ScriptL {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Horizontal part, vertical part, or the θ-coefficient.
    Project {
        #[arg(long, value_enum)]
        part: Part,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Whether ω∧θ = 0 and ω∧dθ = 0.
    #[command(name = "inJ")]
    InJ {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Whether ω = α∧θ + β∧dθ for some α, β.
    #[command(name = "inI")]
    InI {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Canonical representative modulo the ideal generated by θ and dθ.
    #[command(name = "reduceI")]
    ReduceI {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Run identity checks by key (e.g. lemma-3.14) or `all`.
    Verify {
        #[arg(required = true)]
        targets: Vec<String>,
        /// Also run this many random coordinate trials per check.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corrupt the right-hand side in the random trials.
        #[arg(long, requires = "trials")]
        mutate: bool,
    },
    /// Evaluate a scalar exactly under the coordinate model.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// `name=POLY`, POLY an expression in x1.., y1.., t.
        #[arg(long = "bind")]
        bind: Vec<String>,
        /// Comma-separated rational coordinates x1..xn, y1..yn, t.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Also compare against central differences with this step.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Sample the piecewise-linear and the smooth slicing ramps.
    Ramp {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        eps: f64,
        /// Points at which to print the ramps.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Vec<f64>,
        #[arg(long, default_value_t = 10_001)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(message: String) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: message,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome::ok(text)
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Verify {
            targets,
            trials,
            seed,
            mutate,
        } => return verify(&cli.global, targets, *trials, *seed, *mutate),
        Command::Eval {
            expr,
            bind,
            at,
            step,
        } => eval(&cli.global, expr, bind, at, *step),
        Command::Ramp {
            t,
            h,
            eps,
            at,
            samples,
            seed,
        } => ramp(&cli.global, *t, *h, *eps, at, *samples, *seed),
        other => operator(&cli.global, other),
    };
    match result {
        Ok(out) => Outcome::ok(out),
        Err(message) => Outcome::usage(format!("error: {message}\n")),
    }
}

fn context(global: &GlobalOpts) -> Result<HeisenbergContext, String> {
    let n = global.n.unwrap_or(1);
    if n == 0 {
        return Err("--n must be at least 1".into());
    }
    HeisenbergContext::new(n, global.convention).map_err(|e| e.to_string())
}

fn parse(src: &str, ctx: &HeisenbergContext) -> Result<Form, String> {
    dsl::parse(src, ctx).map_err(|e| {
        format!(
            "{e}\n  {src}\n  {}^",
            " ".repeat(e.column.saturating_sub(1))
        )
    })
}

/// The structured envelope shared by every verb.
fn envelope(
    verb: &str,
    global: &GlobalOpts,
    n: usize,
    status: &str,
    result: Value,
    start: Instant,
) -> Value {
    json!({
        "verb": verb,
        "n": n,
        "convention": global.convention.to_string(),
        "status": status,
        "result": result,
        "line_audit": [],
        "seed": null,
        "wall_time": start.elapsed().as_secs_f64(),
    })
}

fn emit_form(verb: &str, global: &GlobalOpts, f: &Form, start: Instant) -> String {
    match global.format {
        Format::Structured => {
            let doc = envelope(verb, global, f.n(), "ok", dsl::form_json(f), start);
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        format => format!("{}\n", render_form(f, format)),
    }
}

fn emit_bool(verb: &str, global: &GlobalOpts, n: usize, value: bool, start: Instant) -> String {
    match global.format {
        Format::Structured => {
            let doc = envelope(verb, global, n, "ok", json!(value), start);
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        Format::Latex => format!("\\text{{{value}}}\n"),
        Format::Text => format!("{value}\n"),
    }
}

fn operator(global: &GlobalOpts, command: &Command) -> Result<String, String> {
    let start = Instant::now();
    let ctx = context(global)?;
    let err = |e: rumin_core::CalculusError| e.to_string();
    let (verb, value) = match command {
        Command::D { expr } => ("d", ctx.d(&parse(expr, &ctx)?).map_err(err)?),
        Command::Wedge { left, right } => ("wedge", wedge(&ctx, left, right)?),
        Command::L { expr } => ("L", ctx.lefschetz(&parse(expr, &ctx)?).map_err(err)?),
        Command::Linv { expr } => (
            "Linv",
            ctx.lefschetz_inverse(&parse(expr, &ctx)?).map_err(err)?,
        ),
        Command::ScriptL { expr } => ("scriptL", ctx.script_l(&parse(expr, &ctx)?).map_err(err)?),
        Command::Project { part, expr } => {
            let f = parse(expr, &ctx)?;
            let value = match part {
                Part::Horizontal => f.horizontal_part(),
                Part::Vertical => f.vertical_part(),
                Part::Beta => {
                    if f.degree() == 0 {
                        return Err("a 0-form has no θ-coefficient".into());
                    }
                    f.decompose_theta().1
                }
            };
            ("project", value)
        }
        Command::InJ { expr } => {
            return Ok(emit_bool(
                "inJ",
                global,
                ctx.n(),
                ctx.in_j(&parse(expr, &ctx)?),
                start,
            ))
        }
        Command::InI { expr } => {
            return Ok(emit_bool(
                "inI",
                global,
                ctx.n(),
                ctx.in_i(&parse(expr, &ctx)?),
                start,
            ))
        }
        Command::ReduceI { expr } => (
            "reduceI",
            ctx.reduce_mod_i(&parse(expr, &ctx)?).map_err(err)?,
        ),
        Command::Verify { .. } | Command::Eval { .. } | Command::Ramp { .. } => {
            unreachable!("dispatched earlier")
        }
    };
    Ok(emit_form(verb, global, &value, start))
}

fn wedge(ctx: &HeisenbergContext, left: &str, right: &str) -> Result<Form, String> {
    Ok(parse(left, ctx)?.wedge(&parse(right, ctx)?))
}

/// One unit of `verify` work.
struct Job {
    id: IdentityId,
    n: usize,
}

struct JobResult {
    report: VerificationReport,
    random: Option<RandomCheckReport>,
}

impl JobResult {
    fn passed(&self) -> bool {
        let random_ok = self
            .random
            .as_ref()
            .is_none_or(|r| r.violations == 0 && r.cross_check_mismatches == 0);
        self.report.passed() && (self.report.exploratory || random_ok)
    }

    fn json(&self, seed: Option<u64>) -> Value {
        let mut doc = to_json(&self.report, seed);
        if let Some(r) = &self.random {
            doc["random_check"] = json!({
                "trials": r.trials,
                "seed": r.seed,
                "corrupted": r.corrupted,
                "violations": r.violations,
                "cross_check_mismatches": r.cross_check_mismatches,
                "wall_time": r.wall_time.as_secs_f64(),
            });
        }
        doc
    }
}

fn jobs(global: &GlobalOpts, targets: &[String]) -> Result<Vec<Job>, String> {
    let mut ids = Vec::new();
    for t in targets {
        if t.eq_ignore_ascii_case("all") {
            ids.extend(IdentityId::ALL);
        } else {
            ids.push(t.parse::<IdentityId>().map_err(|e| e.to_string())?);
        }
    }
    ids.sort();
    ids.dedup();
    let mut out = Vec::new();
    let all = targets.iter().any(|t| t.eq_ignore_ascii_case("all"));
    for id in ids {
        let range = id.dimensions();
        match global.n {
            Some(n) if range.contains(&n) => out.push(Job { id, n }),
            // `all` skips identities that do not exist in the requested dimension.
            Some(_) if all => {}
            Some(n) => {
                return Err(format!(
                    "{id} supports n in {}..={}, got n = {n}",
                    range.start(),
                    range.end()
                ));
            }
            None => out.extend(range.map(|n| Job { id, n })),
        }
    }
    if out.is_empty() {
        return Err("no identity supports the requested dimension".into());
    }
    Ok(out)
}

fn run_job(job: &Job, trials: Option<usize>, seed: u64, mutate: bool) -> Result<JobResult, String> {
    let report = check(job.id, job.n).map_err(|e| e.to_string())?;
    let random = match trials {
        Some(trials) if !job.id.is_exploratory() => {
            let mut options = RandomCheckOptions::new(trials, seed);
            options.corrupt = mutate;
            Some(random_identity_check(job.id, job.n, options).map_err(|e| e.to_string())?)
        }
        _ => None,
    };
    Ok(JobResult { report, random })
}

fn verify(
    global: &GlobalOpts,
    targets: &[String],
    trials: Option<usize>,
    seed: u64,
    mutate: bool,
) -> Outcome {
    let jobs = match jobs(global, targets) {
        Ok(jobs) => jobs,
        Err(message) => return Outcome::usage(format!("error: {message}\n")),
    };
    // Order is preserved by the indexed parallel collect.
    let results: Result<Vec<JobResult>, String> = jobs
        .par_iter()
        .map(|j| run_job(j, trials, seed, mutate))
        .collect();
    let results = match results {
        Ok(r) => r,
        Err(message) => return Outcome::usage(format!("error: {message}\n")),
    };
    let passed = results.iter().all(JobResult::passed);
    let seed_field = trials.map(|_| seed);
    let stdout = match global.format {
        Format::Structured => {
            let doc = if let [single] = results.as_slice() {
                single.json(seed_field)
            } else {
                json!({
                    "verb": "verify",
                    "status": if passed { "verified" } else { "failed" },
                    "seed": seed_field,
                    "reports": results.iter().map(|r| r.json(seed_field)).collect::<Vec<_>>(),
                })
            };
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        Format::Latex => results
            .iter()
            .map(|r| to_latex(&r.report))
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Text => {
            let mut out = String::new();
            for r in &results {
                out.push_str(&to_text(&r.report));
                if let Some(rc) = &r.random {
                    let _ = writeln!(
                        out,
                        "random check: {} of {} trials violated (seed {}{}), {} cross-check mismatches",
                        rc.violations,
                        rc.trials,
                        rc.seed,
                        if rc.corrupted { ", corrupted rhs" } else { "" },
                        rc.cross_check_mismatches
                    );
                }
                out.push('\n');
            }
            let verified = results.iter().filter(|r| r.passed()).count();
            let _ = writeln!(out, "{verified}/{} checks passed", results.len());
            out
        }
    };
    Outcome {
        code: if passed { EXIT_OK } else { EXIT_FAILED },
        stdout,
        stderr: String::new(),
    }
}

fn parse_point(at: &str, vars: usize) -> Result<Vec<BigRational>, String> {
    let point: Vec<BigRational> = at
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<BigRational>()
                .map_err(|e| format!("bad coordinate `{s}`: {e}"))
        })
        .collect::<Result<_, _>>()?;
    if point.len() != vars {
        return Err(format!(
            "expected {vars} coordinates (x1..xn, y1..yn, t), got {}",
            point.len()
        ));
    }
    Ok(point)
}

fn eval(
    global: &GlobalOpts,
    expr: &str,
    bind: &[String],
    at: &str,
    step: Option<f64>,
) -> Result<String, String> {
    let start = Instant::now();
    let ctx = context(global)?;
    if ctx.n() > 4 {
        return Err("the coordinate model supports n <= 4".into());
    }
    let model = CoordinateModel::new(ctx.n(), global.convention);
    let e = dsl::parse_scalar(expr, ctx.algebra()).map_err(|e| e.to_string())?;
    let mut bindings = Bindings::new();
    for b in bind {
        let (name, poly) = b
            .split_once('=')
            .ok_or_else(|| format!("binding `{b}` is not name=POLY"))?;
        let poly =
            dsl::parse_scalar(poly, ctx.algebra()).map_err(|e| format!("binding `{name}`: {e}"))?;
        let poly = polynomial_of(&poly, &bindings, &model)
            .map_err(|e| format!("binding `{name}`: {e}"))?;
        bindings.insert(name.trim().to_string(), poly);
    }
    let point = parse_point(at, model.vars())?;
    let value = bind_and_eval(&e, &bindings, &model, &point).map_err(|e| e.to_string())?;
    let deviation = match step {
        Some(step) => {
            let p: Vec<f64> = point
                .iter()
                .map(|q| q.to_f64().unwrap_or(f64::NAN))
                .collect();
            Some(finite_diff_check(&e, &bindings, &model, &p, step).map_err(|e| e.to_string())?)
        }
        None => None,
    };
    Ok(match global.format {
        Format::Structured => {
            let mut doc = envelope(
                "eval",
                global,
                ctx.n(),
                "ok",
                json!(value.to_string()),
                start,
            );
            doc["finite_difference_deviation"] = json!(deviation);
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        Format::Latex => {
            if value.is_integer() {
                format!("{value}\n")
            } else {
                format!("\\frac{{{}}}{{{}}}\n", value.numer(), value.denom())
            }
        }
        Format::Text => match deviation {
            Some(dev) => format!("{value}\nfinite-difference deviation: {dev:.3e}\n"),
            None => format!("{value}\n"),
        },
    })
}

fn ramp(
    global: &GlobalOpts,
    t: f64,
    h: f64,
    eps: f64,
    at: &[f64],
    samples: usize,
    seed: u64,
) -> Result<String, String> {
    let start = Instant::now();
    let profile = SlicingProfile::new(t, h, eps).map_err(|e| e.to_string())?;
    if samples < 2 {
        return Err("--samples must be at least 2".into());
    }
    let interval = (t - h, t + 2.0 * h);
    let lip_gamma = lipschitz_estimate(|s| profile.gamma(s), interval, samples, seed);
    let lip_ramp = lipschitz_estimate(|s| profile.ramp(s), interval, samples, seed);
    let rows: Vec<(f64, f64, f64, f64)> = at
        .iter()
        .map(|&s| {
            (
                s,
                profile.gamma(s),
                profile.ramp(s),
                profile.ramp_derivative(s),
            )
        })
        .collect();
    Ok(match global.format {
        Format::Structured => {
            let result = json!({
                "t": t, "h": h, "eps": eps,
                "samples": rows.iter().map(|r| json!({"s": r.0, "gamma": r.1, "ramp": r.2, "ramp_derivative": r.3})).collect::<Vec<_>>(),
                "lipschitz": {
                    "gamma": lip_gamma,
                    "gamma_bound": 1.0 / h,
                    "ramp": lip_ramp,
                    "ramp_slope": profile.inner_slope(),
                },
            });
            let mut doc = envelope("ramp", global, global.n.unwrap_or(1), "ok", result, start);
            doc["seed"] = json!(seed);
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        _ => {
            let mut out = String::new();
            for (s, g, r, dr) in &rows {
                let _ = writeln!(out, "s = {s}: gamma = {g}, ramp = {r}, ramp' = {dr}");
            }
            let _ = writeln!(
                out,
                "lipschitz(gamma) ~ {lip_gamma:.6} (bound 1/h = {:.6})",
                1.0 / h
            );
            let _ = writeln!(
                out,
                "lipschitz(ramp) ~ {lip_ramp:.6} (slope 1/(h-2eps) = {:.6})",
                profile.inner_slope()
            );
            out
        }
    })
}
