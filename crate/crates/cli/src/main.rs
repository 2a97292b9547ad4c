//! `compop`: diagnostics, constructions and acceptance checks from the shell.
//!
//! Exit status: 0 when the run completed, 1 on errors (bad input, failed
//! checks), 2 on an inconclusive verdict under `--strict`.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compop_core::verify::Suite;

use config::{CommandKind, Format, RunConfig};
use report::Outcome;

#[derive(Parser, Debug)]
#[command(name = "compop", version, about = "Composition operators on Dirichlet-type spaces: diagnostics and constructions")]
struct Cli {
    /// Run a JSON `RunConfig` instead of a subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Report file; without it the document goes to stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Exit with status 2 when the verdict is inconclusive.
    #[arg(long, global = true)]
    strict: bool,
    /// Seed for randomized check points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Ratio constant C for two-sided checks, [1/C, C].
    #[arg(long = "C", global = true, value_name = "C")]
    ratio_constant: Option<f64>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SuiteArg {
    Identities,
    Asymptotics,
    Capacity,
    Constructions,
    All,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    /// Boundary grid size M (power of two).
    #[arg(long)]
    m: Option<usize>,
    /// Taylor order N (power of two).
    #[arg(long)]
    n: Option<usize>,
    /// Atom budget of the capacity solver.
    #[arg(long)]
    atoms: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// D(φⁿ) and ‖φⁿ‖²_{H²} for n = 1..n_max.
    Norms {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Test-function sweep Q(λ) (and Carleson boxes on D).
    Diag {
        #[arg(long)]
        symbol: String,
        /// `p=..,alpha=..,beta=..` or `D`.
        #[arg(long)]
        space: Option<String>,
        /// 1-|λ| = 2^-1 .. 2^-octaves.
        #[arg(long)]
        octaves: Option<usize>,
        #[arg(long)]
        rays: Option<usize>,
    },
    /// Hilbert-Schmidt norm of C_φ by independent routes.
    Hs {
        #[arg(long)]
        symbol: String,
        /// `D`, `H2` or `alpha=a`.
        #[arg(long)]
        space: Option<String>,
        #[command(flatten)]
        grids: GridArgs,
    },
    /// Capacity of a set, or the capacity integral of a symbol's level sets.
    Capacity {
        #[arg(long, conflicts_with = "symbol")]
        set: Option<String>,
        #[arg(long)]
        symbol: Option<String>,
        /// Capacity order α in [0, 1).
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// 1-s = 2^-1 .. 2^-levels for the integral.
        #[arg(long)]
        levels: Option<usize>,
        #[command(flatten)]
        grids: GridArgs,
    },
    /// Peak symbol whose contact set is a finite point set.
    ConstructPeak {
        #[arg(long)]
        set: String,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Outer symbol with boundary modulus e^{-w(d(ζ,E))}.
    ConstructOuter {
        #[arg(long)]
        set: String,
        /// `const:c`, `power:a[,c]`, `loginv:b[,c]` or JSON.
        #[arg(long)]
        weight: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Refuse weights without Dini evidence.
        #[arg(long)]
        require_disc_algebra: bool,
        /// Also compare the Dirichlet estimate and the HS criterion.
        #[arg(long)]
        checks: bool,
    },
    /// HS symbol with a divergent h-weighted capacity integral.
    ConstructRec {
        #[arg(long)]
        set: String,
        /// `log`, `loglog`, `power:p`, `const:c` or JSON.
        #[arg(long, default_value = "log")]
        growth: String,
        /// Dyadic levels of the Douglas route.
        #[arg(long)]
        levels: Option<usize>,
        #[command(flatten)]
        grids: GridArgs,
    },
    /// Acceptance checks with a pass/fail line per criterion.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<SuiteArg>,
        /// Explicit criterion ids, overriding --suite.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

fn grids(cfg: &mut RunConfig, g: GridArgs) {
    cfg.grids.m = g.m;
    cfg.grids.n = g.n;
    cfg.grids.atoms = g.atoms;
}

fn build(cmd: Cmd) -> Result<RunConfig, String> {
    use config::{parse_growth, parse_set, parse_space, parse_symbol, parse_weight};
    let cfg = match cmd {
        Cmd::Norms { symbol, n_max } => {
            let mut c = RunConfig::new(CommandKind::Norms);
            c.symbol = Some(parse_symbol(&symbol)?);
            c.grids.n_max = n_max;
            c
        }
        Cmd::Diag { symbol, space, octaves, rays } => {
            let mut c = RunConfig::new(CommandKind::Diag);
            c.symbol = Some(parse_symbol(&symbol)?);
            c.space = space.as_deref().map(parse_space).transpose()?;
            c.grids.lambda_octaves = octaves;
            c.grids.rays = rays;
            c
        }
        Cmd::Hs { symbol, space, grids: g } => {
            let mut c = RunConfig::new(CommandKind::Hs);
            c.symbol = Some(parse_symbol(&symbol)?);
            c.space = space.as_deref().map(parse_space).transpose()?;
            grids(&mut c, g);
            c
        }
        Cmd::Capacity { set, symbol, alpha, levels, grids: g } => {
            let mut c = RunConfig::new(CommandKind::Capacity);
            c.set = set.as_deref().map(parse_set).transpose()?;
            c.symbol = symbol.as_deref().map(parse_symbol).transpose()?;
            c.alpha = alpha;
            c.grids.s_levels = levels;
            grids(&mut c, g);
            c
        }
        Cmd::ConstructPeak { set, m } => {
            let mut c = RunConfig::new(CommandKind::ConstructPeak);
            c.set = Some(parse_set(&set)?);
            c.grids.m = m;
            c
        }
        Cmd::ConstructOuter { set, weight, m, gamma, require_disc_algebra, checks } => {
            let mut c = RunConfig::new(CommandKind::ConstructOuter);
            c.set = Some(parse_set(&set)?);
            c.weight = Some(parse_weight(&weight)?);
            c.grids.m = m;
            c.gamma = gamma;
            c.require_disc_algebra = require_disc_algebra;
            c.checks = checks;
            c
        }
        Cmd::ConstructRec { set, growth, levels, grids: g } => {
            let mut c = RunConfig::new(CommandKind::ConstructRec);
            c.set = Some(parse_set(&set)?);
            c.growth = Some(parse_growth(&growth)?);
            c.grids.t_levels = levels;
            grids(&mut c, g);
            c
        }
        Cmd::Verify { suite, criteria } => {
            let mut c = RunConfig::new(CommandKind::Verify);
            c.suite = suite.map(|s| match s {
                SuiteArg::Identities => Suite::Identities,
                SuiteArg::Asymptotics => Suite::Asymptotics,
                SuiteArg::Capacity => Suite::Capacity,
                SuiteArg::Constructions => Suite::Constructions,
                SuiteArg::All => Suite::All,
            });
            c.criteria = criteria;
            c
        }
    };
    Ok(cfg)
}

fn configure(cli: Cli) -> Result<RunConfig, String> {
    let mut cfg = match (cli.config, cli.command) {
        (Some(_), Some(_)) => return Err("--config and a subcommand are mutually exclusive".into()),
        (Some(path), None) => config::load_config(&path)?,
        (None, Some(cmd)) => build(cmd)?,
        (None, None) => return Err("a subcommand or --config is required (see --help)".into()),
    };
    if let Some(p) = cli.out {
        cfg.output.path = Some(p);
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    cfg.strict |= cli.strict;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(c) = cli.ratio_constant {
        cfg.ratio_constant = c;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match configure(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(1);
        }
    };
    let rep = match commands::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    // keep stdout clean when the document itself goes there
    let to_stdout = cfg.output.path.is_none();
    for l in &rep.lines {
        if to_stdout {
            eprintln!("{l}");
        } else {
            println!("{l}");
        }
    }
    match report::emit(&rep, &cfg) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match rep.outcome {
        Outcome::Completed => ExitCode::SUCCESS,
        Outcome::Inconclusive if cfg.strict => ExitCode::from(2),
        Outcome::Inconclusive => ExitCode::SUCCESS,
        Outcome::Failed => ExitCode::from(1),
    }
}
