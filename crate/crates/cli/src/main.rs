//! Command line front end. Data goes to stdout, summaries and diagnostics
//! to stderr, so piping stdout always yields machine-readable output.
//!
//! Exit codes: 0 success, 1 a verification or validation check failed,
//! 2 usage or input error, 3 a capacity cap was exceeded.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use listcomb::algebra::{free_disambiguation, minimal_disambiguation, power, product};
use listcomb::compression::{
    agnostic_scheme, boost_compress, random_realizable_sample, random_sample,
    scheme_from_descriptor, validate_scheme, BoostParams, ValidationMode, Violation,
};
use listcomb::covers::{greedy_cover, min_cover, CoverResult};
use listcomb::dims::{ds_dimension, graph_dimension, littlestone_dimension, natarajan_dimension};
use listcomb::format::{
    parse_class, parse_distribution, parse_sample, parse_scheme_descriptor, render_class,
    render_sample, render_scheme_descriptor, SchemeDescriptor,
};
use listcomb::learning::{
    erm, fixed_marginal_curve, learning_curve, learning_curve_exact, uniform_convergence_rate,
    CurvePoint,
};
use listcomb::util::derive_seed;
use listcomb::verify::{
    all_passed, render_csv, render_text, run_all, run_coding, run_direct_sum, run_disambiguation,
    run_graph_vs_ds, run_product_dims, run_ssp,
};
use listcomb::{Caps, ConceptClass, Error, ListConcept, Result};

#[derive(Parser)]
#[command(
    name = "listcomb",
    version,
    about = "Exact combinatorics of list concept classes"
)]
struct Cli {
    /// Master seed; overrides LISTCOMB_SEED and the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// JSON config file with seed, caps, boosting knobs, and output dir.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for written outputs; overrides the config file.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker pool size; defaults to the number of logical cores.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a dimension of a class and print it as one integer.
    Dim {
        #[arg(value_enum)]
        kind: DimKind,
        class: PathBuf,
        /// Rank parameter for the ds dimension; defaults to the class list size.
        #[arg(long)]
        k: Option<usize>,
        /// Cap on the witness size searched for; unbounded when absent.
        #[arg(long, value_name = "N")]
        max_size: Option<usize>,
    },
    /// Find a list cover and print it in the class file format.
    Cover {
        class: PathBuf,
        /// List size of the covering hypotheses.
        #[arg(long)]
        k: usize,
        /// Exact minimum cover via set-cover search (the default).
        #[arg(long, conflicts_with = "greedy")]
        exact: bool,
        /// Greedy cover; larger but fast.
        #[arg(long)]
        greedy: bool,
        /// Restrict the class to its first N domain points before covering.
        #[arg(long, value_name = "N")]
        restrict: Option<usize>,
    },
    /// Form the product of two classes and print it in the class file format.
    Product {
        a: PathBuf,
        b: PathBuf,
        /// Raise the product to this power by repeated multiplication.
        #[arg(long, value_name = "R")]
        power: Option<usize>,
    },
    /// Replace undefined points and print the rewritten class.
    Disambiguate {
        #[arg(value_enum)]
        mode: DisambiguateMode,
        class: PathBuf,
    },
    /// Sample compression built by boosting a weak learner.
    Compress {
        #[command(subcommand)]
        cmd: CompressCmd,
    },
    /// Monte Carlo learning curves as CSV.
    Curve {
        #[command(subcommand)]
        cmd: CurveCmd,
    },
    /// Re-check counting inequalities on random instances; CSV to stdout.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        /// Random instances per check family.
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DimKind {
    VcGraph,
    Ds,
    Natarajan,
    Littlestone,
}

#[derive(Clone, Copy, ValueEnum)]
enum DisambiguateMode {
    Free,
    Minimal,
}

#[derive(Subcommand)]
enum CompressCmd {
    /// Boost a weak learner into a scheme and compress one sample.
    Boost {
        class: PathBuf,
        sample: PathBuf,
        /// Weak learner error budget; must stay below 1/(2(k+1)).
        #[arg(long)]
        epsilon: f64,
        /// Base learner sample size per round.
        #[arg(long, default_value_t = 1, value_name = "D")]
        block: usize,
    },
    /// Re-check a written scheme against fresh seeded samples.
    Validate {
        scheme_dir: PathBuf,
        class: PathBuf,
        #[arg(long, value_enum)]
        mode: ValidateMode,
        /// Number of generated test samples.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Largest generated sample length.
        #[arg(long, default_value_t = 8, value_name = "N")]
        length: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ValidateMode {
    Realizable,
    Agnostic,
}

#[derive(Subcommand)]
enum CurveCmd {
    /// Expected loss of the in-class learner under a given distribution.
    Learn {
        class: PathBuf,
        distribution: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Enumerate all samples instead of sampling; trials column is 0.
        #[arg(long)]
        exact: bool,
    },
    /// Worst in-class gap between empirical and true loss.
    Uc {
        class: PathBuf,
        distribution: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Worst-case curve over labelings sharing the marginal of the given
    /// distribution.
    FixedMarginal {
        class: PathBuf,
        distribution: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyTarget {
    Ssp,
    Coding,
    GraphDs,
    ProductDims,
    DirectSum,
    Disambiguation,
    All,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    caps: CapsConfig,
    boost: BoostConfig,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct CapsConfig {
    product_cells: Option<usize>,
    selection_concepts: Option<usize>,
    exact_cover_concepts: Option<usize>,
    exact_curve_samples: Option<u128>,
    scheme_sequences: Option<u128>,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct BoostConfig {
    retry_budget: Option<usize>,
    lp_threshold: Option<usize>,
    mw_tolerance: Option<f64>,
    mw_iterations: Option<usize>,
    pool_cap: Option<usize>,
}

/// Everything resolved from flags, environment, and config file.
struct Settings {
    seed: u64,
    caps: Caps,
    boost: BoostConfig,
    out_dir: PathBuf,
}

fn resolve_settings(cli: &Cli) -> Result<Settings> {
    let cfg: ConfigFile = match &cli.config {
        Some(path) => serde_json::from_str(&read_file(path)?)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?,
        None => ConfigFile::default(),
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => match env::var("LISTCOMB_SEED") {
            Ok(v) => v
                .parse()
                .map_err(|_| Error::Format("LISTCOMB_SEED must be an unsigned integer".into()))?,
            Err(_) => cfg.seed.unwrap_or(0),
        },
    };
    let mut caps = Caps::default();
    if let Some(v) = cfg.caps.product_cells {
        caps.product_cells = v;
    }
    if let Some(v) = cfg.caps.selection_concepts {
        caps.selection_concepts = v;
    }
    if let Some(v) = cfg.caps.exact_cover_concepts {
        caps.exact_cover_concepts = v;
    }
    if let Some(v) = cfg.caps.exact_curve_samples {
        caps.exact_curve_samples = v;
    }
    if let Some(v) = cfg.caps.scheme_sequences {
        caps.scheme_sequences = v;
    }
    let out_dir = cli
        .out
        .clone()
        .or(cfg.output_dir)
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Settings {
        seed,
        caps,
        boost: cfg.boost,
        out_dir,
    })
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn load_class(path: &Path) -> Result<ConceptClass> {
    parse_class(&read_file(path)?).map_err(|e| prefix_path(path, e))
}

fn prefix_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } => 3,
        Error::BoostFailure(_) | Error::InvalidScheme(_) | Error::InvalidCover(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // A second build attempt in one process is harmless; ignore it.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let settings = resolve_settings(&cli)?;
    match cli.cmd {
        Cmd::Dim {
            kind,
            class,
            k,
            max_size,
        } => cmd_dim(kind, &class, k, max_size),
        Cmd::Cover {
            class,
            k,
            exact,
            greedy,
            restrict,
        } => cmd_cover(&settings, &class, k, exact, greedy, restrict),
        Cmd::Product { a, b, power } => cmd_product(&settings, &a, &b, power),
        Cmd::Disambiguate { mode, class } => cmd_disambiguate(mode, &class),
        Cmd::Compress { cmd } => match cmd {
            CompressCmd::Boost {
                class,
                sample,
                epsilon,
                block,
            } => cmd_boost(&settings, &class, &sample, epsilon, block),
            CompressCmd::Validate {
                scheme_dir,
                class,
                mode,
                samples,
                length,
            } => cmd_validate(&settings, &scheme_dir, &class, mode, samples, length),
        },
        Cmd::Curve { cmd } => cmd_curve(&settings, cmd),
        Cmd::Verify { target, trials } => cmd_verify(&settings, target, trials),
    }
}

fn cmd_dim(kind: DimKind, class: &Path, k: Option<usize>, max_size: Option<usize>) -> Result<u8> {
    let c = load_class(class)?;
    let d = match kind {
        DimKind::VcGraph => graph_dimension(&c, max_size)?.0,
        DimKind::Ds => ds_dimension(&c, k.unwrap_or_else(|| c.k()), max_size)?.0,
        DimKind::Natarajan => natarajan_dimension(&c, max_size)?.0,
        DimKind::Littlestone => littlestone_dimension(&c)?,
    };
    if k.is_some() && !matches!(kind, DimKind::Ds) {
        eprintln!("note: --k only affects the ds dimension");
    }
    println!("{d}");
    Ok(0)
}

fn cmd_cover(
    settings: &Settings,
    class: &Path,
    k: usize,
    _exact: bool,
    greedy: bool,
    restrict: Option<usize>,
) -> Result<u8> {
    let mut c = load_class(class)?;
    if let Some(n) = restrict {
        let subset: Vec<usize> = (0..n).collect();
        c = c.restrict(&subset)?;
    }
    let result = if greedy {
        greedy_cover(&c, k)?
    } else {
        min_cover(&c, k, &settings.caps)?
    };
    let rendered = render_class(&cover_as_class(&c, k, &result)?);
    println!("{rendered}");
    let assignment: Vec<String> = result.assignment.iter().map(|j| j.to_string()).collect();
    eprintln!(
        "cover size {} ({}), assignment [{}]",
        result.hypotheses.len(),
        if result.optimal { "minimum" } else { "greedy" },
        assignment.join(" ")
    );
    Ok(0)
}

/// Covers reuse the class file format: each hypothesis becomes one total
/// concept with the cover's list size.
fn cover_as_class(base: &ConceptClass, k: usize, result: &CoverResult) -> Result<ConceptClass> {
    let concepts = result
        .hypotheses
        .iter()
        .map(|h| ListConcept::new(None, h.lists().iter().cloned().map(Some).collect()))
        .collect();
    ConceptClass::new(
        Some("cover".into()),
        base.domain().clone(),
        base.labels().clone(),
        k,
        concepts,
    )
}

fn cmd_product(settings: &Settings, a: &Path, b: &Path, r: Option<usize>) -> Result<u8> {
    let left = load_class(a)?;
    let right = load_class(b)?;
    let mut result = product(&left, &right, &settings.caps)?.into_class();
    if let Some(r) = r {
        result = power(&result, r, &settings.caps)?;
    }
    println!("{}", render_class(&result));
    eprintln!(
        "product: {} points, {} labels, {} concepts",
        result.domain().len(),
        result.labels().len(),
        result.len()
    );
    Ok(0)
}

fn cmd_disambiguate(mode: DisambiguateMode, class: &Path) -> Result<u8> {
    let c = load_class(class)?;
    let rewritten = match mode {
        DisambiguateMode::Free => free_disambiguation(&c)?,
        DisambiguateMode::Minimal => {
            let (d, star) = minimal_disambiguation(&c)?;
            match star {
                Some(s) => eprintln!("added filler label index {s}"),
                None => eprintln!("class was already total"),
            }
            d
        }
    };
    println!("{}", render_class(&rewritten));
    Ok(0)
}

fn boost_params(settings: &Settings, k: usize, epsilon: f64) -> BoostParams {
    let mut p = BoostParams::for_k(k);
    p.epsilon = epsilon;
    if let Some(v) = settings.boost.retry_budget {
        p.retry_budget = v;
    }
    if let Some(v) = settings.boost.lp_threshold {
        p.lp_threshold = v;
    }
    if let Some(v) = settings.boost.mw_tolerance {
        p.mw_tolerance = v;
    }
    if let Some(v) = settings.boost.mw_iterations {
        p.mw_iterations = v;
    }
    if let Some(v) = settings.boost.pool_cap {
        p.pool_cap = v;
    }
    p
}

fn cmd_boost(
    settings: &Settings,
    class: &Path,
    sample: &Path,
    epsilon: f64,
    block: usize,
) -> Result<u8> {
    let c = load_class(class)?;
    let s = parse_sample(&read_file(sample)?, &c).map_err(|e| prefix_path(sample, e))?;
    let learner = erm(&c)?;
    let params = boost_params(settings, c.k(), epsilon);
    let (compressed, scheme) = boost_compress(&learner, &c, &s, block, &params, settings.seed)?;
    let descriptor = SchemeDescriptor {
        k: c.k(),
        block,
        epsilon,
        seed: settings.seed,
        learner: "erm".into(),
    };
    fs::create_dir_all(&settings.out_dir)
        .map_err(|e| Error::Format(format!("{}: {e}", settings.out_dir.display())))?;
    let scheme_path = settings.out_dir.join("scheme.json");
    let sample_path = settings.out_dir.join("compressed.json");
    write_file(&scheme_path, &render_scheme_descriptor(&descriptor))?;
    write_file(&sample_path, &render_sample(&compressed, &c))?;
    println!("{}", render_sample(&compressed, &c));
    eprintln!(
        "compressed {} pairs to {} (budget {}), wrote {} and {}",
        s.len(),
        compressed.len(),
        scheme.profile().max_len(s.len()),
        scheme_path.display(),
        sample_path.display()
    );
    Ok(0)
}

fn cmd_validate(
    settings: &Settings,
    scheme_dir: &Path,
    class: &Path,
    mode: ValidateMode,
    samples: usize,
    length: usize,
) -> Result<u8> {
    let c = load_class(class)?;
    let desc_path = scheme_dir.join("scheme.json");
    let descriptor =
        parse_scheme_descriptor(&read_file(&desc_path)?).map_err(|e| prefix_path(&desc_path, e))?;
    let mut scheme = scheme_from_descriptor(&descriptor, &c)?;
    let mode = match mode {
        ValidateMode::Realizable => ValidationMode::Realizable,
        ValidateMode::Agnostic => {
            // Descriptors rebuild realizable schemes; checking one against
            // arbitrary data means checking its best-subsample lifting.
            scheme = agnostic_scheme(&scheme, &c);
            ValidationMode::Agnostic
        }
    };
    let mut batch = Vec::with_capacity(samples + 1);
    let compressed_path = scheme_dir.join("compressed.json");
    if compressed_path.exists() {
        batch.push(
            parse_sample(&read_file(&compressed_path)?, &c)
                .map_err(|e| prefix_path(&compressed_path, e))?,
        );
    }
    for t in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(settings.seed, &[7, t as u64]));
        let len = rng.gen_range(1..=length.max(1));
        // Alternate realizable draws with unconstrained ones so both the
        // zero-loss path and the skip or gap path get exercised.
        let s = if t % 2 == 0 {
            random_realizable_sample(&c, len, &mut rng)?
        } else {
            random_sample(c.domain().len(), c.labels().len(), len, &mut rng)
        };
        batch.push(s);
    }
    let report = validate_scheme(&scheme, &c, mode, &batch)?;
    println!(
        "checked={} skipped={} violations={}",
        report.checked,
        report.skipped,
        report.violations.len()
    );
    for v in &report.violations {
        println!("{}", violation_line(v));
    }
    if report.is_valid() {
        eprintln!("scheme is valid under the {} mode", mode_name(mode));
        Ok(0)
    } else {
        eprintln!("scheme failed validation");
        Ok(1)
    }
}

fn mode_name(mode: ValidationMode) -> &'static str {
    match mode {
        ValidationMode::Realizable => "realizable",
        ValidationMode::Agnostic => "agnostic",
    }
}

fn violation_line(v: &Violation) -> String {
    match v {
        Violation::CompressFailed { index, message } => {
            format!("sample {index}: compression failed: {message}")
        }
        Violation::ReconstructFailed { index, message } => {
            format!("sample {index}: reconstruction failed: {message}")
        }
        Violation::ForeignPair { index } => {
            format!("sample {index}: compressed output used a pair outside the sample")
        }
        Violation::TooLong { index, len, max } => {
            format!("sample {index}: compressed length {len} exceeds budget {max}")
        }
        Violation::RealizableLoss { index, loss } => {
            format!("sample {index}: loss {loss} on realizable data")
        }
        Violation::AgnosticGap { index, loss, best } => {
            format!("sample {index}: loss {loss} above best in-class loss {best}")
        }
    }
}

fn cmd_curve(settings: &Settings, cmd: CurveCmd) -> Result<u8> {
    let seed = settings.seed;
    let points = match cmd {
        CurveCmd::Learn {
            class,
            distribution,
            sizes,
            trials,
            exact,
        } => {
            let c = load_class(&class)?;
            let dist = parse_distribution(&read_file(&distribution)?, &c)
                .map_err(|e| prefix_path(&distribution, e))?;
            let rule = erm(&c)?;
            if exact {
                sizes
                    .iter()
                    .map(|&n| learning_curve_exact(&rule, &dist, n, &settings.caps))
                    .collect::<Result<Vec<_>>>()?
            } else {
                learning_curve(&rule, &dist, &sizes, trials, seed)?
            }
        }
        CurveCmd::Uc {
            class,
            distribution,
            sizes,
            trials,
        } => {
            let c = load_class(&class)?;
            let dist = parse_distribution(&read_file(&distribution)?, &c)
                .map_err(|e| prefix_path(&distribution, e))?;
            let mut pts = Vec::with_capacity(sizes.len());
            for &n in &sizes {
                let (estimate, stderr) = uniform_convergence_rate(&c, &dist, n, trials, seed)?;
                pts.push(CurvePoint {
                    n,
                    estimate,
                    stderr,
                    trials,
                });
            }
            pts
        }
        CurveCmd::FixedMarginal {
            class,
            distribution,
            sizes,
            trials,
        } => {
            let c = load_class(&class)?;
            let dist = parse_distribution(&read_file(&distribution)?, &c)
                .map_err(|e| prefix_path(&distribution, e))?;
            fixed_marginal_curve(&c, &dist.marginal(), &sizes, trials, seed)?
        }
    };
    println!("n,estimate,stderr,trials,seed");
    for p in &points {
        println!("{},{},{},{},{}", p.n, p.estimate, p.stderr, p.trials, seed);
    }
    eprintln!("{} curve points", points.len());
    Ok(0)
}

fn cmd_verify(settings: &Settings, target: VerifyTarget, trials: usize) -> Result<u8> {
    let seed = settings.seed;
    let reports = match target {
        VerifyTarget::Ssp => run_ssp(trials, seed)?,
        VerifyTarget::Coding => run_coding(trials, seed)?,
        VerifyTarget::GraphDs => run_graph_vs_ds(trials, seed)?,
        VerifyTarget::ProductDims => run_product_dims(trials, seed)?,
        VerifyTarget::DirectSum => run_direct_sum(trials, seed)?,
        VerifyTarget::Disambiguation => run_disambiguation(trials, seed)?,
        VerifyTarget::All => run_all(trials, seed)?,
    };
    print!("{}", render_csv(&reports));
    eprint!("{}", render_text(&reports));
    Ok(if all_passed(&reports) { 0 } else { 1 })
}
