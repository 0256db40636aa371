//! Command-line surface tying the analyzer, the trajectory construction and
//! the catalog together. One command per process; reports are written
//! atomically (temp file + rename) and are byte-stable given the same inputs
//! once the timestamp is suppressed.

use anyhow::{anyhow, bail, Context, Result};
use cetaev_core::analysis::{
    analyze, build_w_region, check_strict_cetaev, find_tangent_directions, verify_sandwich,
    AnalysisParams, HypothesisReport, PotentialField, SandwichReport, SphereSample,
};
use cetaev_core::corpus::{self, catalog};
use cetaev_core::dynamics::{
    find_asymptotic_trajectory, trajectory_to_csv, ConvergenceReport, HamiltonianSystem,
    KrasovskiiRegion, SeedSchedule, StepControl, TrajectoryVerdict,
};
use cetaev_core::report::{to_json_pretty, unix_timestamp, Verdict};
use cetaev_core::spec_format::parse_potential_spec;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "cetaev",
    version,
    about = "Jet-based instability analysis of Hamiltonian equilibria: hypothesis certification, strict Cetaev checks, and asymptotic trajectory construction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Built-in catalog entry name (see `cetaev catalog`)
    #[arg(long, conflicts_with = "input")]
    corpus: Option<String>,
    /// Path to a potential-spec document
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct TuningArgs {
    /// Jet order (defaults to the catalog suggestion or the polynomial degree)
    #[arg(long)]
    s: Option<u32>,
    /// Analysis radius (defaults to the catalog suggestion or 0.5)
    #[arg(long)]
    eps: Option<f64>,
    /// Sphere sample size
    #[arg(long)]
    samples: Option<usize>,
    /// Zero band for sign decisions
    #[arg(long = "zero-tol")]
    zero_tol: Option<f64>,
    /// Certification margin (applies to both the tangent-direction and the
    /// radial-derivative margins)
    #[arg(long)]
    margin: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory to write report files into (default: stdout only)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the machine-readable report to stdout
    #[arg(long)]
    json: bool,
    /// Suppress the timestamp field for byte-reproducible reports
    #[arg(long = "no-timestamp")]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the hypothesis battery and the region sandwich on one potential
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Construct a trajectory asymptotic to the equilibrium (CSV + report)
    Trajectory {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Deepest seed exponent K (seeds at eps·2^-k for k = 2..=K)
        #[arg(long)]
        seeds: Option<u32>,
        /// Run the construction even when the strict Cetaev check does not certify
        #[arg(long)]
        force: bool,
    },
    /// Exact verification of the published worked-example computations
    #[command(name = "verify-paper")]
    VerifyPaper {
        /// Run a single item (a..g)
        #[arg(long)]
        item: Option<char>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the built-in catalog entries
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

fn main() {
    if let Ok(threads) = std::env::var("CETAEV_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze { input, tuning, output } => cmd_analyze(input, tuning, output),
        Command::Trajectory { input, tuning, output, seeds, force } => {
            cmd_trajectory(input, tuning, output, seeds, force)
        }
        Command::VerifyPaper { item, output } => cmd_verify_paper(item, output),
        Command::Catalog { json } => cmd_catalog(json),
    }
}

/// A loaded potential with the parameters the commands need.
struct Loaded {
    name: String,
    field: PotentialField,
    kinetic: Option<Vec<Vec<f64>>>,
    eps: f64,
}

fn load(input: &InputArgs, tuning: &TuningArgs) -> Result<Loaded> {
    let loaded = match (&input.corpus, &input.input) {
        (Some(name), None) => {
            let entry = corpus::entry(name).ok_or_else(|| {
                anyhow!(
                    "unknown corpus entry '{name}' (available: {})",
                    catalog().iter().map(|e| e.name).collect::<Vec<_>>().join(", ")
                )
            })?;
            let mut field = entry.field().map_err(|e| anyhow!("{e}"))?;
            if let Some(s) = tuning.s {
                validate_order(s)?;
                field = field.with_jet_order(s).map_err(|e| anyhow!("{e}"))?;
            }
            Loaded {
                name: entry.name.to_string(),
                eps: tuning.eps.unwrap_or(entry.suggested_eps),
                field,
                kinetic: None,
            }
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let spec = parse_potential_spec(&text)
                .map_err(|e| anyhow!("{}: {e}", path.display()))?;
            // reject a non-SPD kinetic block right away
            if let Some(b) = &spec.kinetic {
                let probe = PotentialField::from_polynomial(spec.polynomial.clone())
                    .map_err(|e| anyhow!("{}: {e}", path.display()))?;
                HamiltonianSystem::new(probe, b.clone())
                    .map_err(|e| anyhow!("{}: kinetic matrix rejected: {e}", path.display()))?;
            }
            let s = match tuning.s {
                Some(s) => {
                    validate_order(s)?;
                    s
                }
                None => spec.polynomial.degree().max(2),
            };
            let field = PotentialField::from_polynomial(spec.polynomial)
                .map_err(|e| anyhow!("{}: {e}", path.display()))?
                .with_jet_order(s)
                .map_err(|e| anyhow!("{}: {e}", path.display()))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "potential".to_string());
            Loaded { name, field, kinetic: spec.kinetic, eps: tuning.eps.unwrap_or(0.5) }
        }
        (None, None) => bail!("exactly one input source required: --corpus NAME or --input PATH"),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    if loaded.eps <= 0.0 {
        bail!("--eps must be positive");
    }
    Ok(loaded)
}

fn validate_order(s: u32) -> Result<()> {
    if s < 2 {
        bail!("--s must be at least 2");
    }
    Ok(())
}

fn params_from(tuning: &TuningArgs) -> Result<AnalysisParams> {
    let mut params = AnalysisParams::default();
    if let Some(n) = tuning.samples {
        if n < 16 {
            bail!("--samples must be at least 16");
        }
        params.samples_dim2 = n;
        params.samples_highdim = n;
    }
    if let Some(z) = tuning.zero_tol {
        if z <= 0.0 {
            bail!("--zero-tol must be positive");
        }
        params.zero_tol = z;
    }
    if let Some(m) = tuning.margin {
        if m <= 0.0 {
            bail!("--margin must be positive");
        }
        params.neg_margin = m;
        params.eta = m;
    }
    Ok(params)
}

/// Atomic write: temp file in the target directory, then rename.
fn write_atomic(dir: &Path, file: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let final_path = dir.join(file);
    let tmp_path = dir.join(format!(".{file}.tmp"));
    std::fs::write(&tmp_path, contents)
        .with_context(|| format!("writing {}", tmp_path.display()))?;
    std::fs::rename(&tmp_path, &final_path)
        .with_context(|| format!("renaming into {}", final_path.display()))?;
    Ok(final_path)
}

#[derive(Serialize)]
struct WRegionDocument {
    q_polynomial: String,
    sandwich: SandwichReport,
}

#[derive(Serialize)]
struct AnalyzeDocument {
    name: String,
    #[serde(flatten)]
    report: HypothesisReport,
    w_region: Option<WRegionDocument>,
}

fn cmd_analyze(input: InputArgs, tuning: TuningArgs, output: OutputArgs) -> Result<i32> {
    let loaded = load(&input, &tuning)?;
    let params = params_from(&tuning)?;
    let sample = SphereSample::standard(loaded.field.dim(), &params);
    let mut report = analyze(&loaded.field, loaded.eps, &sample, &params)
        .map_err(|e| anyhow!("analysis failed: {e}"))?;
    if !output.no_timestamp {
        report.timestamp = Some(unix_timestamp());
    }

    let w_region = match (loaded.field.jets(), loaded.field.jet_order()) {
        (Some(jets), Some(s)) => {
            let q = build_w_region(jets, s);
            let sandwich = verify_sandwich(&loaded.field, &q, &sample, loaded.eps, &params);
            Some(WRegionDocument { q_polynomial: q.to_string(), sandwich })
        }
        _ => None,
    };
    let doc = AnalyzeDocument { name: loaded.name.clone(), report, w_region };
    let json = to_json_pretty(&doc);

    if output.json {
        print!("{json}");
    } else {
        println!("potential   : {}", doc.report.potential);
        println!("jet order   : {:?}   eps: {}", doc.report.jet_order, doc.report.eps);
        println!("h1          : {}", doc.report.h1.verdict);
        println!("h2          : {}", doc.report.h2.verdict);
        println!("h3          : {}", doc.report.h3.verdict);
        println!("strictCetaev: {}", doc.report.strict_cetaev.verdict);
        println!("tangent dirs: {}", doc.report.tangent_directions.count);
        if let Some(w) = &doc.w_region {
            match w.sandwich.eps1 {
                Some(e1) => println!("sandwich    : holds from radius {e1}"),
                None => println!("sandwich    : no radius in the schedule works"),
            }
        }
        for outcome in [&doc.report.h1, &doc.report.h3, &doc.report.strict_cetaev] {
            if outcome.verdict == Verdict::Refuted {
                if let Some(w) = outcome.witnesses.first() {
                    println!(
                        "  witness {} = {:.3e} at {:?} (r = {})",
                        w.quantity, w.value, w.point, w.radius
                    );
                }
            }
        }
    }
    if let Some(dir) = &output.out {
        let path = write_atomic(dir, &format!("{}-analysis.json", loaded.name), &json)?;
        eprintln!("report written to {}", path.display());
    }
    Ok(0)
}

#[derive(Serialize)]
struct TrajectoryDocument {
    name: String,
    #[serde(flatten)]
    report: ConvergenceReport,
}

fn cmd_trajectory(
    input: InputArgs,
    tuning: TuningArgs,
    output: OutputArgs,
    seeds: Option<u32>,
    force: bool,
) -> Result<i32> {
    let loaded = load(&input, &tuning)?;
    let params = params_from(&tuning)?;
    let dim = loaded.field.dim();
    let sample = SphereSample::standard(dim, &params);

    // precondition: the strict Cetaev condition must certify, unless forced
    let strict = check_strict_cetaev(&loaded.field, loaded.eps, &sample, &params);
    if strict.outcome.verdict != Verdict::Certified && !force {
        eprintln!(
            "refusing to shoot: the strict Cetaev check returned {} for '{}' at eps = {} \
             (an asymptotic trajectory is only guaranteed for a certified component; \
             rerun with --force to try anyway)",
            strict.outcome.verdict, loaded.name, loaded.eps
        );
        for note in &strict.outcome.notes {
            eprintln!("  note: {note}");
        }
        return Ok(2);
    }

    // direction: best certified tangent direction when jets exist, otherwise
    // the sample direction with the most negative potential
    let direction: Vec<f64> = match (loaded.field.jets(), loaded.field.jet_order()) {
        (Some(jets), Some(s)) => {
            let set = find_tangent_directions(jets, s, &sample, &params);
            match set.best() {
                Some(best) => best.direction.clone(),
                None => bail!("no tangent direction available to place seeds on"),
            }
        }
        _ => {
            let r = loaded.eps / 4.0;
            let best = (0..sample.len())
                .min_by(|&a, &b| {
                    let va = loaded.field.value(&sample.point(a, r));
                    let vb = loaded.field.value(&sample.point(b, r));
                    va.partial_cmp(&vb).unwrap()
                })
                .expect("sample nonempty");
            sample.direction(best).to_vec()
        }
    };

    let sys = match loaded.kinetic.clone() {
        Some(b) => HamiltonianSystem::new(loaded.field.clone(), b).map_err(|e| anyhow!("{e}"))?,
        None => HamiltonianSystem::unit_mass(loaded.field.clone()),
    };
    let region = KrasovskiiRegion::new(loaded.eps);
    let k_max = seeds.unwrap_or(SeedSchedule::default().k_max);
    if k_max < 3 {
        bail!("--seeds must be at least 3");
    }
    let schedule = SeedSchedule { k_max, ..SeedSchedule::default() };
    let result =
        find_asymptotic_trajectory(&sys, &region, &direction, &schedule, &StepControl::default())
            .map_err(|e| anyhow!("trajectory construction failed: {e}"))?;

    let mut report = result.convergence_report(&region, &schedule, &direction);
    if !output.no_timestamp {
        report.timestamp = Some(unix_timestamp());
    }
    let doc = TrajectoryDocument { name: loaded.name.clone(), report };
    let json = to_json_pretty(&doc);
    let csv = trajectory_to_csv(&result.backward, dim);

    if output.json {
        print!("{json}");
    } else {
        println!("verdict     : {:?}", result.verdict);
        println!(
            "exits       : k = {}..{} with T_exit {:.4} .. {:.4}",
            schedule.k_min,
            schedule.k_max,
            result.exits.first().map(|e| e.t_exit).unwrap_or(0.0),
            result.exits.last().map(|e| e.t_exit).unwrap_or(0.0),
        );
        println!("cauchy      : {:.3e}", result.cauchy_max);
        println!("final norm  : {:.3e}", result.final_norm);
        if let Some(slope) = result.loglog_slope {
            println!("decay slope : {slope:.4}");
        }
        for note in &result.notes {
            println!("note        : {note}");
        }
    }
    if let Some(dir) = &output.out {
        let jpath = write_atomic(dir, &format!("{}-convergence.json", loaded.name), &json)?;
        let cpath = write_atomic(dir, &format!("{}-trajectory.csv", loaded.name), &csv)?;
        eprintln!("reports written to {} and {}", jpath.display(), cpath.display());
    }
    let _found = result.verdict == TrajectoryVerdict::Found; // verdicts are data, not errors
    Ok(0)
}

fn cmd_verify_paper(item: Option<char>, output: OutputArgs) -> Result<i32> {
    let mut report = match item {
        Some(id) => {
            let single = corpus::verify_item(id)
                .ok_or_else(|| anyhow!("unknown item '{id}' (valid: a..g)"))?;
            corpus::PaperVerification {
                all_pass: single.pass,
                items: vec![single],
                timestamp: None,
            }
        }
        None => corpus::verify_paper_example(),
    };
    if !output.no_timestamp {
        report.timestamp = Some(unix_timestamp());
    }
    let json = to_json_pretty(&report);
    if output.json {
        print!("{json}");
    } else {
        for item in &report.items {
            println!(
                "item {} [{}{}]: {}",
                item.id,
                if item.pass { "pass" } else { "FAIL" },
                if item.exact { ", exact" } else { ", sampled" },
                item.title
            );
            println!("    {}", item.computed);
            if let Some(printed) = &item.printed_variant {
                println!("    note: {printed}");
            }
        }
    }
    if let Some(dir) = &output.out {
        let path = write_atomic(dir, "verify-paper.json", &json)?;
        eprintln!("report written to {}", path.display());
    }
    Ok(if report.all_pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct CatalogRow {
    name: &'static str,
    dim: usize,
    suggested_s: Option<u32>,
    suggested_eps: f64,
    expected: corpus::ExpectedVerdicts,
    summary: &'static str,
    provenance: &'static str,
}

fn cmd_catalog(json: bool) -> Result<i32> {
    let rows: Vec<CatalogRow> = catalog()
        .into_iter()
        .map(|e| CatalogRow {
            name: e.name,
            dim: e.dim,
            suggested_s: e.suggested_s,
            suggested_eps: e.suggested_eps,
            expected: e.expected,
            summary: e.summary,
            provenance: e.provenance,
        })
        .collect();
    if json {
        print!("{}", to_json_pretty(&rows));
    } else {
        for row in &rows {
            println!(
                "{:22} dim {}  s {:>2}  eps {:.4}",
                row.name,
                row.dim,
                row.suggested_s.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
                row.suggested_eps
            );
            println!("    {}", row.summary);
        }
    }
    Ok(0)
}
