use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skewharmonic::verify::{self, Config, Suite};

#[derive(Parser)]
#[command(name = "skewharmonic", version, about = "Run the numerical checks and write reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite and print its JSON report.
    Verify {
        suite: SuiteArg,
        #[command(flatten)]
        opts: Opts,
    },
    /// Informational fits that never affect the exit status.
    Explore {
        #[arg(value_enum)]
        what: ExploreArg,
        #[command(flatten)]
        opts: Opts,
    },
    /// Write data for plots.
    Emit {
        #[arg(value_enum)]
        what: EmitArg,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Skew,
    Lie,
    Nil,
    Orbit,
    Zeta,
    Rep,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Skew => Suite::Skew,
            SuiteArg::Lie => Suite::Lie,
            SuiteArg::Nil => Suite::Nil,
            SuiteArg::Orbit => Suite::Orbit,
            SuiteArg::Zeta => Suite::Zeta,
            SuiteArg::Rep => Suite::Rep,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExploreArg {
    Nu,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    PlotData,
}

#[derive(Args)]
struct Opts {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    grid_l: Option<f64>,
    #[arg(long)]
    mc_samples: Option<usize>,
    /// `NAME=VALUE` for a tolerance, repeatable.
    #[arg(long, value_name = "KEY=VAL")]
    tol_override: Vec<String>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl Opts {
    fn config(&self) -> Result<Config, String> {
        let mut cfg = Config::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            cfg.apply_text(&text).map_err(|e| e.to_string())?;
        }
        cfg.p = self.p.or(cfg.p);
        cfg.q = self.q.or(cfg.q);
        cfg.s = self.s.or(cfg.s);
        cfg.trials = self.trials.unwrap_or(cfg.trials);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.grid_n = self.grid_n.unwrap_or(cfg.grid_n);
        cfg.grid_l = self.grid_l.unwrap_or(cfg.grid_l);
        cfg.mc_samples = self.mc_samples.unwrap_or(cfg.mc_samples);
        for t in &self.tol_override {
            cfg.override_tolerance(t).map_err(|e| e.to_string())?;
        }
        Ok(cfg)
    }

    fn emit_json(&self, json: &str) -> Result<(), String> {
        match &self.out {
            Some(path) => fs::write(path, json).map_err(|e| format!("{}: {e}", path.display())),
            None => {
                println!("{json}");
                Ok(())
            }
        }
    }

    fn csv_file(&self) -> Result<Option<fs::File>, String> {
        self.csv
            .as_ref()
            .map(|p| fs::File::create(p).map_err(|e| format!("{}: {e}", p.display())))
            .transpose()
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Verify { suite, opts } => {
            let cfg = opts.config()?;
            let report = verify::run(suite.into(), &cfg).map_err(|e| e.to_string())?;
            opts.emit_json(&report.to_json())?;
            if let Some(f) = opts.csv_file()? {
                report.write_csv(f).map_err(|e| e.to_string())?;
            }
            for c in report.failures() {
                eprintln!("FAIL {} [{}]: residual {:e} > tolerance {:e}", c.name, c.param, c.residual, c.tolerance);
            }
            Ok(report.pass)
        }
        Command::Explore { what: ExploreArg::Nu, opts } => {
            let cfg = opts.config()?;
            match verify::explore_nu(&cfg) {
                Ok(r) => opts.emit_json(&serde_json::to_string_pretty(&r).map_err(|e| e.to_string())?)?,
                Err(e) => eprintln!("explore nu: {e}"),
            }
            Ok(true)
        }
        Command::Emit { what: EmitArg::PlotData, opts } => {
            let cfg = opts.config()?;
            let points = verify::plot_data(&cfg).map_err(|e| e.to_string())?;
            match (opts.csv_file()?, &opts.out) {
                (Some(f), _) => verify::write_plot_csv(&points, f),
                (None, Some(path)) => {
                    let f = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
                    verify::write_plot_csv(&points, f)
                }
                (None, None) => verify::write_plot_csv(&points, std::io::stdout()),
            }
            .map_err(|e| e.to_string())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
