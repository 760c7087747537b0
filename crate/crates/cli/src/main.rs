use clap::{Args, Parser, Subcommand, ValueEnum};
use pfold::experiment::{emit, run, summary, ExperimentConfig, Format, Mode};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Exhaustive experiments on cyclic p-fold covers of the projective line over finite fields.
///
/// Settings come from built-in defaults, then an optional TOML config file, then flags.
#[derive(Parser)]
#[command(name = "pfold", version)]
struct Cli {
    #[command(subcommand)]
    mode: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact counting identities, each checked against enumeration.
    VerifyExact(Opts),
    /// Enumerated family counts against asymptotic main terms.
    VerifyAsymptotic(Opts),
    /// Exact trace distributions of whole families against the i.i.d. model.
    Distribution(Opts),
    /// Mixed trace moments against the model and the complex Gaussian.
    Moments(Opts),
    /// Truncations of the Euler constants K and L.
    Constants(Opts),
    /// Zeta functions of sampled curves.
    ZetaCheck(Opts),
    /// Exact law of a sum of model variables.
    RvModel(Opts),
    /// Residue-tuple census behind the model probabilities.
    Heuristic(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Opts {
    /// TOML file with any of the keys of the experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field characteristic [default: 7].
    #[arg(long = "char")]
    characteristic: Option<u32>,
    /// Extension degree of the field over its prime field [default: 1].
    #[arg(long)]
    ext: Option<u32>,
    /// Cover degree p [default: 3].
    #[arg(long)]
    p: Option<u32>,
    /// Degree vector such as 4,1; repeat for a ladder.
    #[arg(long = "d", value_parser = parse_list)]
    degrees: Vec<Vec<usize>>,
    /// Genus; repeat for a ladder [default: 1, 2, 3 where used].
    #[arg(long)]
    genus: Vec<u32>,
    /// Moment order pair such as 2,1; repeatable [default: all j, k <= 3].
    #[arg(long, value_parser = parse_pair)]
    jk: Vec<(u32, u32)>,
    /// Largest irreducible degree kept in Euler products [default: 10].
    #[arg(long)]
    trunc: Option<u32>,
    /// Number of model variables for rv-model [default: q + 1].
    #[arg(long)]
    n: Option<u32>,
    /// Also tabulate affine character sums (distribution mode).
    #[arg(long)]
    affine: bool,
    /// Curves sampled per family (zeta-check) [default: 20].
    #[arg(long)]
    samples: Option<u32>,
    /// Sampling seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it [default: 1].
    #[arg(long)]
    workers: Option<usize>,
    /// Cap on candidate tuples per enumeration [default: 100000000].
    #[arg(long)]
    budget: Option<u64>,
    /// Directory for machine-readable output; without it only a summary is printed.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format [default: json].
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"))).collect()
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let v: Vec<&str> = s.split(',').collect();
    match v.as_slice() {
        [a, b] => Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?)),
        _ => Err(format!("expected j,k, got {s:?}")),
    }
}

fn build_config(mode: Mode, o: Opts) -> Result<ExperimentConfig, String> {
    let mut c = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            toml::from_str::<ExperimentConfig>(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    c.mode = mode;
    if let Some(v) = o.characteristic {
        c.characteristic = v;
    }
    if let Some(v) = o.ext {
        c.ext_degree = v;
    }
    if let Some(v) = o.p {
        c.p = v;
    }
    if !o.degrees.is_empty() {
        c.components = o.degrees;
    }
    if !o.genus.is_empty() {
        c.genus = o.genus;
    }
    if !o.jk.is_empty() {
        c.moments = o.jk;
    }
    if let Some(v) = o.trunc {
        c.trunc = v;
    }
    if o.n.is_some() {
        c.n = o.n;
    }
    c.affine |= o.affine;
    if let Some(v) = o.samples {
        c.samples = v;
    }
    if let Some(v) = o.seed {
        c.seed = v;
    }
    if let Some(v) = o.workers {
        c.workers = v;
    }
    if let Some(v) = o.budget {
        c.budget = v;
    }
    if o.out.is_some() {
        c.out = o.out;
    }
    if let Some(f) = o.format {
        c.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, opts) = match cli.mode {
        Command::VerifyExact(o) => (Mode::VerifyExact, o),
        Command::VerifyAsymptotic(o) => (Mode::VerifyAsymptotic, o),
        Command::Distribution(o) => (Mode::Distribution, o),
        Command::Moments(o) => (Mode::Moments, o),
        Command::Constants(o) => (Mode::Constants, o),
        Command::ZetaCheck(o) => (Mode::ZetaCheck, o),
        Command::RvModel(o) => (Mode::RvModel, o),
        Command::Heuristic(o) => (Mode::Heuristic, o),
    };
    let config = match build_config(mode, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let report = match run(&config) {
        Ok(r) => r,
        Err(e @ pfold::Error::Config(_)) | Err(e @ pfold::Error::FieldTooLarge { .. }) | Err(e @ pfold::Error::NotPrime(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    print!("{}", summary(&report));
    if let Some(dir) = &config.out {
        match emit(&report, config.format, dir) {
            Ok(files) => {
                for f in files {
                    eprintln!("wrote {}", f.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    eprintln!("elapsed {:.2?}", start.elapsed());
    if report.failures() > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
