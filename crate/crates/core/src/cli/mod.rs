//! The `blaschke-lab` command line: one subcommand per diagnostic, CSV plus a
//! JSON manifest for every run.

mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

pub use config::{Manifest, RunConfig, SCHEMA_VERSION};

use crate::diagnostics::{
    carleson_check, condition_d_search, hoffman_split, hoffman_verify, majorant_check, minimal_shadow_c0,
    section6_report, DualConstraint, DualSearchOptions, HoffmanGrid, Section6Options, TailModel, Verdict,
    CARLESON_THRESHOLD, DEFAULT_J_FAR,
};
use crate::dyadic::square_of;
use crate::error::{LabError, Result};
use crate::harmonic::{balayage, balayage_dual_norm, balayage_luxemburg_norm, shadow_weight, DEFAULT_BASE_PANELS};
use crate::orlicz::{luxemburg_norm, modular, ShapeSpec};
use crate::sequences::{blaschke_sum, separation_constant};
use crate::spec::{parse_measure, parse_range, GeneratorSpec, WeightSpec};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "BLASCHKE_LAB_OUT";

#[derive(Parser, Debug)]
#[command(name = "blaschke-lab", version, about = "Blaschke densities, Orlicz norms and interpolation diagnostics")]
struct Cli {
    /// JSON run config (or a previous run manifest).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit 1 when a verdict is undecided.
    #[arg(long, global = true)]
    strict: bool,
    /// Output directory (default: $BLASCHKE_LAB_OUT, else the current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GenArg {
    /// radial:q,N | section6:eps,n_max | pairs:eta:<gen> | points:re,im;...
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the points of a generated sequence.
    Generate(GenArg),
    /// φ_Λ at every point of the truncation.
    PhiLambda(GenArg),
    /// inf |B_λ(λ)| with tail bracket and verdict.
    Carleson {
        #[command(flatten)]
        gen: GenArg,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Luxemburg norm and modular of a step weight.
    OrliczNorm {
        #[arg(long)]
        shape: Option<String>,
        /// zero | constant:c | indicator:a[,v] | arcs:start,len,v;... | shadow:c0,c (needs --gen)
        #[arg(long)]
        weight: Option<String>,
        #[command(flatten)]
        gen: GenArg,
    },
    /// Tabulate the conjugate function.
    Conjugate {
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        s_min: Option<f64>,
        #[arg(long)]
        s_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Poisson balayage of a discrete measure and its dual norm.
    Balayage {
        /// re,im,mass;re,im,mass;...
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        base_panels: Option<usize>,
    },
    /// Compare P[w] with φ_Λ; without --weight uses the minimal shadow weight.
    MajorantCheck {
        #[command(flatten)]
        gen: GenArg,
        #[arg(long)]
        weight: Option<String>,
        /// Shadow half-width factor for the default weight.
        #[arg(long)]
        shadow_c: Option<f64>,
    },
    /// Coordinate ascent for the constant in the dual-norm condition.
    ConditionD {
        #[command(flatten)]
        gen: GenArg,
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        candidates: Option<usize>,
        #[arg(long)]
        base_panels: Option<usize>,
        /// Use the sup norm (the φ(t) = t degenerate).
        #[arg(long)]
        nevanlinna: bool,
    },
    /// Layered two-part split and fitted factorization constants.
    Hoffman {
        #[command(flatten)]
        gen: GenArg,
        #[arg(long)]
        grid_m: Option<usize>,
    },
    /// The lattice example: converged φ, point-evaluation table, weight verdicts.
    Section6Report {
        #[arg(long)]
        epsilon: Option<f64>,
        /// e.g. 8..14
        #[arg(long = "n")]
        n_range: Option<String>,
        #[arg(long)]
        j_offset: Option<u32>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::PhiLambda(_) => "phi-lambda",
            Command::Carleson { .. } => "carleson",
            Command::OrliczNorm { .. } => "orlicz-norm",
            Command::Conjugate { .. } => "conjugate",
            Command::Balayage { .. } => "balayage",
            Command::MajorantCheck { .. } => "majorant-check",
            Command::ConditionD { .. } => "condition-d",
            Command::Hoffman { .. } => "hoffman",
            Command::Section6Report { .. } => "section6-report",
        }
    }

    /// The flags given on the command line, as a config overlay.
    fn overlay(&self) -> RunConfig {
        let mut c = RunConfig::new();
        match self {
            Command::Generate(g) | Command::PhiLambda(g) => c.gen = g.gen.clone(),
            Command::Carleson { gen, threshold } => {
                c.gen = gen.gen.clone();
                c.threshold = *threshold;
            }
            Command::OrliczNorm { shape, weight, gen } => {
                c.shape = shape.clone();
                c.weight = weight.clone();
                c.gen = gen.gen.clone();
            }
            Command::Conjugate { shape, s_min, s_max, samples } => {
                c.shape = shape.clone();
                c.s_min = *s_min;
                c.s_max = *s_max;
                c.samples = *samples;
            }
            Command::Balayage { measure, shape, base_panels } => {
                c.measure = measure.clone();
                c.shape = shape.clone();
                c.base_panels = *base_panels;
            }
            Command::MajorantCheck { gen, weight, shadow_c } => {
                c.gen = gen.gen.clone();
                c.weight = weight.clone();
                c.shadow_c = *shadow_c;
            }
            Command::ConditionD { gen, shape, budget, candidates, base_panels, nevanlinna } => {
                c.gen = gen.gen.clone();
                c.shape = shape.clone();
                c.budget = *budget;
                c.candidates = *candidates;
                c.base_panels = *base_panels;
                c.nevanlinna = nevanlinna.then_some(true);
            }
            Command::Hoffman { gen, grid_m } => {
                c.gen = gen.gen.clone();
                c.grid_m = *grid_m;
            }
            Command::Section6Report { epsilon, n_range, j_offset } => {
                c.epsilon = *epsilon;
                c.n_range = n_range.clone();
                c.j_offset = *j_offset;
            }
        }
        c
    }
}

/// Result of one subcommand before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// `(file name, contents)`.
    pub files: Vec<(String, String)>,
    pub summary: serde_json::Value,
    pub verdict: Option<Verdict>,
    /// One line for stdout.
    pub message: String,
}

/// Serializes rows with a header taken from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| LabError::Io { path: "<csv>".into(), reason: e.to_string() })?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Io { path: "<csv>".into(), reason: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn need<'a>(v: &'a Option<String>, what: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| LabError::Config(format!("missing --{what}")))
}

fn verdict_word(v: Verdict, yes: &str, no: &str) -> String {
    match v {
        Verdict::Yes => yes.to_string(),
        Verdict::No => no.to_string(),
        Verdict::Undecided => "undecided".to_string(),
    }
}

#[derive(Serialize)]
struct PointRow {
    index: usize,
    n: Option<u32>,
    k: Option<i64>,
    re: f64,
    im: f64,
    gap: f64,
    theta_rad: f64,
}

#[derive(Serialize)]
struct ConjRow {
    s: f64,
    conj_value: f64,
    conj_deriv: f64,
}

#[derive(Serialize)]
struct SampleRow {
    theta_rad: f64,
    mass: f64,
    balayage: f64,
}

#[derive(Serialize)]
struct SplitRow {
    index: usize,
    part: u8,
    layer: u32,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct NormRow<'a> {
    shape: &'a str,
    weight: &'a str,
    luxemburg_norm: f64,
    modular: f64,
}

/// Runs a subcommand from a complete config. Pure apart from the global thread pool.
pub fn execute(command: &str, cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let gen = || -> Result<_> { need(&cfg.gen, "gen")?.parse::<GeneratorSpec>()?.build() };
    let shape_spec = |default: &str| -> Result<ShapeSpec> { cfg.shape.as_deref().unwrap_or(default).parse() };
    let csv_name = format!("{command}.csv");
    match command {
        "generate" => {
            let seq = gen()?;
            let rows: Vec<PointRow> = seq
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| PointRow {
                    index: i,
                    n: seq.stage_of[i],
                    k: seq.k_of[i],
                    re: p.re(),
                    im: p.im(),
                    gap: p.gap(),
                    theta_rad: p.theta(),
                })
                .collect();
            let sep = separation_constant(&seq.points);
            Ok(Outcome {
                files: vec![(csv_name, to_csv(&rows)?)],
                summary: json!({ "points": seq.len(), "separation": sep, "blaschke_sum": blaschke_sum(&seq.points) }),
                verdict: None,
                message: format!("{} points, separation {sep}", seq.len()),
            })
        }
        "phi-lambda" | "carleson" => {
            let seq = gen()?;
            let r = carleson_check(&seq, TailModel::of(&seq), cfg.threshold.unwrap_or(CARLESON_THRESHOLD))?;
            let word = verdict_word(r.report.verdict, "carleson", "not-carleson-at-truncation");
            let summary = json!({
                "inf_b": r.report.inf_b,
                "m_sup": r.report.m_sup,
                "argmax": r.argmax,
                "m_lower": r.m_lower,
                "m_upper": r.m_upper,
                "inf_lower": r.inf_lower,
                "inf_upper": r.inf_upper,
                "inf_completed": r.inf_completed,
                "separation": r.report.separation,
                "threshold": r.threshold,
                "verdict": word,
            });
            let verdict = (command == "carleson").then_some(r.report.verdict);
            let message = if command == "carleson" {
                format!("{word}: inf|B_λ(λ)| in [{}, {}]", r.inf_lower, r.inf_upper)
            } else {
                format!("M = {} over {} points", r.report.m_sup, seq.len())
            };
            Ok(Outcome { files: vec![(csv_name, to_csv(&r.report.rows)?)], summary, verdict, message })
        }
        "orlicz-norm" => {
            let spec = shape_spec("psi:1")?;
            let shape = spec.build()?;
            let wtext = need(&cfg.weight, "weight")?;
            let wspec: WeightSpec = wtext.parse()?;
            let seq = match &cfg.gen {
                Some(_) => Some(gen()?),
                None => None,
            };
            let w = wspec.build(seq.as_ref())?.to_samples();
            let norm = luxemburg_norm(&shape, &w)?;
            let j = modular(&shape, &w);
            let spec_text = spec.to_string();
            let row = NormRow { shape: &spec_text, weight: wtext, luxemburg_norm: norm, modular: j };
            Ok(Outcome {
                files: vec![(csv_name, to_csv(&[row])?)],
                summary: json!({ "luxemburg_norm": norm, "modular": j }),
                verdict: None,
                message: format!("‖w‖ = {norm}"),
            })
        }
        "conjugate" => {
            let shape = shape_spec("psi:1")?.build()?;
            let conj = shape.conjugate()?;
            let (a, b) = (cfg.s_min.unwrap_or(1e-3), cfg.s_max.unwrap_or(1e3).min(shape.sup_derivative()));
            let m = cfg.samples.unwrap_or(200);
            let rows: Vec<ConjRow> = (0..m)
                .map(|i| {
                    let s = a * (b / a).powf(i as f64 / (m - 1) as f64);
                    ConjRow { s, conj_value: conj.value(s), conj_deriv: conj.deriv(s) }
                })
                .collect();
            Ok(Outcome {
                files: vec![(csv_name, to_csv(&rows)?)],
                summary: json!({ "table_error": conj.table_error(), "s_min": a, "s_max": b }),
                verdict: None,
                message: format!("{m} samples, table error {}", conj.table_error()),
            })
        }
        "balayage" => {
            let mu = parse_measure(need(&cfg.measure, "measure")?)?;
            let shape = shape_spec("psi:1")?.build()?;
            let conj = shape.conjugate()?;
            let base = cfg.base_panels.unwrap_or(DEFAULT_BASE_PANELS);
            let dual = balayage_dual_norm(&mu, &shape, &conj, base)?;
            let lux = balayage_luxemburg_norm(&mu, &conj, base)?;
            let (grid, samples) = balayage(&mu, base);
            let rows: Vec<SampleRow> = grid
                .nodes
                .iter()
                .zip(&samples.masses)
                .zip(&samples.values)
                .map(|((&t, &m), &v)| SampleRow { theta_rad: t, mass: m, balayage: v })
                .collect();
            Ok(Outcome {
                files: vec![(csv_name, to_csv(&rows)?)],
                summary: json!({
                    "dual_norm": dual.value,
                    "dual_norm_refined": dual.refined,
                    "relative_change": dual.relative_change,
                    "amemiya_k": dual.k,
                    "luxemburg_norm": lux,
                    "nodes": dual.nodes,
                }),
                verdict: None,
                message: format!("dual norm {} (refinement change {:.1e})", dual.value, dual.relative_change),
            })
        }
        "majorant-check" => {
            let seq = gen()?;
            let tail = TailModel::of(&seq);
            let (w, c0) = match &cfg.weight {
                Some(t) => (t.parse::<WeightSpec>()?.build(Some(&seq))?, None),
                None => {
                    let c = cfg.shadow_c.unwrap_or(std::f64::consts::PI);
                    // a hair above the minimum so rounding in P[w] cannot flip the verdict
                    let c0 = minimal_shadow_c0(&seq, c, tail)? * (1.0 + 1e-9);
                    (shadow_weight(&seq, c0, c)?, Some(c0))
                }
            };
            let r = majorant_check(&seq, &w, tail)?;
            let word = verdict_word(r.verdict, "majorized", "not-majorized");
            Ok(Outcome {
                files: vec![(csv_name, to_csv(&r.rows)?)],
                summary: json!({ "verdict": word, "minimal_c0": c0, "m_sup": r.m_sup, "separation": r.separation }),
                verdict: Some(r.verdict),
                message: word,
            })
        }
        "condition-d" => {
            let seq = gen()?;
            let constraint = if cfg.nevanlinna.unwrap_or(false) {
                DualConstraint::Sup
            } else {
                DualConstraint::orlicz(shape_spec("psi:1")?.build()?)?
            };
            let d = DualSearchOptions::default();
            let opts = DualSearchOptions {
                budget: cfg.budget.unwrap_or(d.budget),
                candidates: cfg.candidates.unwrap_or(d.candidates),
                base_panels: cfg.base_panels.unwrap_or(d.base_panels),
                golden_iters: cfg.golden_iters.unwrap_or(d.golden_iters),
            };
            let st = condition_d_search(&seq, constraint, &opts)?;
            Ok(Outcome {
                files: vec![(csv_name, to_csv(&st.trace)?)],
                summary: json!({
                    "ratio": st.ratio,
                    "objective": st.objective,
                    "constraint": st.constraint,
                    "support": st.support,
                    "coefficients": st.coefficients,
                    "single_best": st.single_best,
                    "single_best_index": st.single_best_index,
                }),
                verdict: None,
                message: format!("best ratio {} on {} atoms", st.ratio, st.support.len()),
            })
        }
        "hoffman" => {
            let seq = gen()?;
            let delta = separation_constant(&seq.points);
            let parts = hoffman_split(&seq, delta)?;
            let grid = HoffmanGrid { m: cfg.grid_m.unwrap_or(HoffmanGrid::default().m), ..HoffmanGrid::default() };
            let fit = hoffman_verify(&seq, &parts, delta, &grid)?;
            let mut rows = Vec::with_capacity(seq.len());
            let (mut i1, mut i2) = (0, 0);
            for (i, p) in seq.points.iter().enumerate() {
                let part = if i1 < parts.0.len() && parts.0.points[i1].same_as(p) {
                    i1 += 1;
                    1
                } else {
                    i2 += 1;
                    2
                };
                rows.push(SplitRow { index: i, part, layer: square_of(p).n, re: p.re(), im: p.im() });
            }
            debug_assert_eq!(i1 + i2, seq.len());
            let verdict = if fit.fitted && fit.holds { Verdict::Yes } else { Verdict::Undecided };
            Ok(Outcome {
                files: vec![(csv_name, to_csv(&rows)?)],
                summary: serde_json::to_value(&fit).expect("plain struct"),
                verdict: Some(verdict),
                message: format!("b = {}, a = {}, c = {}, eta = {}", fit.b, fit.a, fit.c, fit.eta),
            })
        }
        "section6-report" => {
            let eps = cfg.epsilon.unwrap_or(1.0);
            let ns = parse_range(cfg.n_range.as_deref().unwrap_or("8..14"))?;
            let opts =
                Section6Options { j_offset: cfg.j_offset.unwrap_or(16), j_far: cfg.j_far.unwrap_or(DEFAULT_J_FAR) };
            let r = section6_report(eps, &ns, &opts)?;
            let half = verdict_word(r.weight_half.verdict, "member", "not-member");
            let full = verdict_word(r.weight_full.verdict, "member", "not-member");
            let verdict = if r.weight_half.verdict == Verdict::Undecided || r.weight_full.verdict == Verdict::Undecided
            {
                Verdict::Undecided
            } else {
                Verdict::Yes
            };
            Ok(Outcome {
                files: vec![(csv_name, to_csv(&r.rows)?)],
                summary: json!({
                    "epsilon": eps,
                    "options": r.options,
                    "weight_half": r.weight_half,
                    "weight_full": r.weight_full,
                    "separation": r.separation,
                    "c_touch": r.c_touch,
                }),
                verdict: Some(verdict),
                message: format!("{} rows; shadow weight: δ=ε/2 {half}, δ=ε {full}", r.rows.len()),
            })
        }
        other => Err(LabError::Config(format!("unknown command `{other}`"))),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| LabError::Io { path: path.display().to_string(), reason: e.to_string() })
}

fn fail(code: i32, kind: &str, message: &str) -> i32 {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    code
}

/// Parses `argv`, runs the subcommand, writes its files and manifest, returns the exit code:
/// 0 success, 1 undecided under `--strict`, 2 config or input error, 3 runtime failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                print!("{e}");
                return 0;
            }
            return fail(2, "usage", &e.to_string());
        }
    };
    let command = cli.command.name();
    let mut cfg = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => return fail(2, "config", &e.to_string()),
        },
        None => RunConfig::new(),
    };
    cfg.overlay(cli.command.overlay());
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    if let Err(e) = cfg.validate() {
        return fail(2, "config", &e.to_string());
    }
    let out =
        cli.out.clone().or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return fail(3, "threads", &e.to_string()),
    };
    let outcome = match pool.install(|| execute(command, &cfg)) {
        Ok(o) => o,
        Err(e) => {
            let code = match e {
                LabError::NoConvergence { .. } | LabError::Io { .. } => 3,
                _ => 2,
            };
            return fail(code, "run", &e.to_string());
        }
    };
    if let Err(e) = std::fs::create_dir_all(&out) {
        return fail(3, "io", &format!("{}: {e}", out.display()));
    }
    for (name, body) in &outcome.files {
        if let Err(e) = write_file(&out, name, body) {
            return fail(3, "io", &e.to_string());
        }
    }
    let manifest = Manifest {
        manifest_version: 1,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        config: cfg,
        outputs: outcome.files.iter().map(|(n, _)| n.clone()).collect(),
        summary: outcome.summary.clone(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    if let Err(e) = write_file(&out, &format!("{command}.manifest.json"), &(text + "\n")) {
        return fail(3, "io", &e.to_string());
    }
    println!("{}", outcome.message);
    if cli.strict && outcome.verdict == Some(Verdict::Undecided) {
        return 1;
    }
    0
}
