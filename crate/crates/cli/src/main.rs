//! `bifrac`: decompose, apply, constants, norms, verify, sweep.
//!
//! Settings come from an optional JSON config (`--config`); any flag given
//! on the command line replaces the corresponding config field. Exit status
//! is 0 on success, 1 when verification failures are present and 2 on
//! configuration or input errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use bifrac::{CorpusKind, TheoremTag};
use clap::{Args, Parser, Subcommand};

use config::{invalid, CliResult, CubeConfig, Format, ProfileRef, ProfileSpec, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "bifrac",
    version,
    about = "Bilinear fractional integrals on Morrey spaces with multiple weights"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus seed (default 7).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Dimension of generated grids.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Generated grids cover `[-L, L)^n`.
    #[arg(long = "half-width", global = true)]
    half_width: Option<f64>,
    /// Cells per axis of generated grids (a power of two).
    #[arg(long, global = true)]
    cells: Option<usize>,
    /// Cap on the cube family size in two dimensions.
    #[arg(long = "cube-cap", global = true)]
    cube_cap: Option<usize>,
    /// Main output file (stdout when absent).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// JSON summary file.
    #[arg(long, global = true)]
    summary: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    g: Option<PathBuf>,
    #[arg(long)]
    w1: Option<PathBuf>,
    #[arg(long)]
    w2: Option<PathBuf>,
    #[arg(long)]
    v: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExponentArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    q0: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long)]
    r2: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Stopping-time base `a` (default `2^{2n+1}`).
    #[arg(long)]
    base: Option<f64>,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    /// Profile file: `{"tag": ..., "example": k}` or `{"tag": ..., "exponents": {...}}`.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Use a built-in example profile for this tag.
    #[arg(long, value_parser = parse_tag)]
    tag: Option<TheoremTag>,
    #[arg(long, requires = "tag")]
    example: Option<usize>,
    /// Comma-separated corpus kinds.
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    corpus: Option<Vec<CorpusKind>>,
    /// Calibration items per kind.
    #[arg(long)]
    calibration: Option<usize>,
    /// Held-out items per kind.
    #[arg(long)]
    evaluation: Option<usize>,
    #[arg(long)]
    margin: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stopping-time sparse family of (f, g) inside a dyadic root cube.
    Decompose {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        exponents: ExponentArgs,
        /// Root cube as `x[,y]:side`.
        #[arg(long)]
        root: Option<String>,
    },
    /// Apply an operator to grid files.
    Apply {
        /// bi-frac, frac-int, multi-frac-int, maximal, frac-maximal,
        /// p-maximal, multi-maximal, weighted-bilinear-maximal or sparse-bound.
        #[arg(long)]
        operator: Option<String>,
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        exponents: ExponentArgs,
        #[arg(long)]
        root: Option<String>,
    },
    /// Weight constants of grid-file weights.
    Constants {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        exponents: ExponentArgs,
        /// Comma-separated: ap, apq, multiple-apq, iida, two-weight,
        /// two-weight-r0, reverse-holder.
        #[arg(long, value_delimiter = ',')]
        which: Option<Vec<String>>,
    },
    /// Morrey norms of grid files.
    Norms {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        exponents: ExponentArgs,
    },
    /// Calibrated ratio check of one profile's inequality on generated corpora.
    Verify {
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Verify over a grid of α and power-weight exponents β.
    Sweep {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        beta: Option<Vec<f64>>,
    },
}

fn parse_tag(s: &str) -> Result<TheoremTag, String> {
    s.parse().map_err(|e: bifrac::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<CorpusKind, String> {
    s.parse().map_err(|e: bifrac::Error| e.to_string())
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

impl InputArgs {
    fn apply(self, cfg: &mut RunConfig) {
        // flag paths are relative to the working directory, not the config
        let cwd = |p: Option<PathBuf>| p.map(|p| std::path::absolute(&p).unwrap_or(p));
        set(&mut cfg.inputs.f, cwd(self.f));
        set(&mut cfg.inputs.g, cwd(self.g));
        set(&mut cfg.inputs.w1, cwd(self.w1));
        set(&mut cfg.inputs.w2, cwd(self.w2));
        set(&mut cfg.inputs.v, cwd(self.v));
    }
}

impl ExponentArgs {
    fn apply(self, cfg: &mut RunConfig) {
        let e = &mut cfg.exponents;
        set(&mut e.alpha, self.alpha);
        set(&mut e.r, self.r);
        set(&mut e.p, self.p);
        set(&mut e.q, self.q);
        set(&mut e.p0, self.p0);
        set(&mut e.p1, self.p1);
        set(&mut e.p2, self.p2);
        set(&mut e.q0, self.q0);
        set(&mut e.r0, self.r0);
        set(&mut e.r1, self.r1);
        set(&mut e.r2, self.r2);
        set(&mut e.epsilon, self.epsilon);
        set(&mut e.base, self.base);
    }
}

impl ProfileArgs {
    fn apply(self, cfg: &mut RunConfig) -> CliResult<()> {
        if self.profile.is_some() && self.tag.is_some() {
            return Err(invalid("give either --profile or --tag, not both"));
        }
        if let Some(p) = self.profile {
            cfg.profile = Some(ProfileRef::File(std::path::absolute(&p).unwrap_or(p)));
        }
        if let Some(tag) = self.tag {
            cfg.profile = Some(ProfileRef::Inline(ProfileSpec {
                tag,
                example: self.example,
                exponents: None,
            }));
        }
        set(&mut cfg.corpus, self.corpus);
        set(&mut cfg.calibration, self.calibration);
        set(&mut cfg.evaluation, self.evaluation);
        set(&mut cfg.margin, self.margin);
        Ok(())
    }
}

fn root_flag(cfg: &mut RunConfig, root: Option<String>) -> CliResult<()> {
    if let Some(r) = root {
        cfg.root = Some(CubeConfig::parse(&r)?);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
enum Action {
    Decompose,
    Apply,
    Constants,
    Norms,
    Verify,
    Sweep,
}

fn build(cli: Cli) -> CliResult<(Action, RunConfig)> {
    let c = cli.common;
    let mut cfg = RunConfig::load(c.config.as_deref())?;
    set(&mut cfg.seed, c.seed);
    set(&mut cfg.grid.n, c.n);
    set(&mut cfg.grid.half_width, c.half_width);
    set(&mut cfg.grid.cells, c.cells);
    set(&mut cfg.cube_cap, c.cube_cap);
    let cwd = |p: Option<PathBuf>| p.map(|p| std::path::absolute(&p).unwrap_or(p));
    set(&mut cfg.output, cwd(c.output));
    set(&mut cfg.summary, cwd(c.summary));
    set(&mut cfg.format, c.format);
    let action = match cli.command {
        Command::Decompose {
            inputs,
            exponents,
            root,
        } => {
            inputs.apply(&mut cfg);
            exponents.apply(&mut cfg);
            root_flag(&mut cfg, root)?;
            Action::Decompose
        }
        Command::Apply {
            operator,
            inputs,
            exponents,
            root,
        } => {
            set(&mut cfg.operator, operator);
            inputs.apply(&mut cfg);
            exponents.apply(&mut cfg);
            root_flag(&mut cfg, root)?;
            Action::Apply
        }
        Command::Constants {
            inputs,
            exponents,
            which,
        } => {
            inputs.apply(&mut cfg);
            exponents.apply(&mut cfg);
            set(&mut cfg.constants, which);
            Action::Constants
        }
        Command::Norms { inputs, exponents } => {
            inputs.apply(&mut cfg);
            exponents.apply(&mut cfg);
            Action::Norms
        }
        Command::Verify { profile } => {
            profile.apply(&mut cfg)?;
            Action::Verify
        }
        Command::Sweep {
            profile,
            alpha,
            beta,
        } => {
            profile.apply(&mut cfg)?;
            if let Some(a) = alpha {
                cfg.sweep.alpha = a;
            }
            if let Some(b) = beta {
                cfg.sweep.beta = b;
            }
            Action::Sweep
        }
    };
    Ok((action, cfg))
}

fn run(action: Action, cfg: &RunConfig) -> CliResult<bool> {
    commands::validate(cfg)?;
    match action {
        Action::Decompose => commands::decompose(cfg),
        Action::Apply => commands::apply(cfg),
        Action::Constants => commands::constants(cfg),
        Action::Norms => commands::norms(cfg),
        Action::Verify => commands::verify(cfg),
        Action::Sweep => commands::sweep(cfg),
    }
}

fn threads() -> CliResult<()> {
    let Ok(v) = std::env::var("BIFRAC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| invalid(format!("BIFRAC_THREADS = {v:?} is not a count")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| invalid(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = threads()
        .and_then(|_| build(cli))
        .and_then(|(action, cfg)| run(action, &cfg));
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(2)
        }
    }
}
