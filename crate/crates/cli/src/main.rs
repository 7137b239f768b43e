//! `hh`: Hermite–Hadamard gaps on simplices from the command line.
//!
//! Exit codes: 0 when every verdict passes, 1 on input errors, 2 when an
//! inequality fails beyond tolerance, 3 when a search finds no witness.

mod inputs;
mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hermite_simplex::corpus::{run_corpus, CorpusConfig};
use hermite_simplex::report::{BoundsDocument, FejerDocument, IntegralDocument};
use hermite_simplex::{
    compute_lr, demonstrate_no_uniform_fejer_constant, fejer_lr, integrate, make_sharpness_witness, Backend, Error,
    QuadratureConfig, Refinement,
};

use inputs::{Dims, FunctionArg, SimplexArg};
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "hh", version, about = "Hermite–Hadamard bounds on simplices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Gaps L and R of a function and the check 0 <= L <= nR.
    Bounds {
        #[command(flatten)]
        input: FunctionInput,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted gaps Lg and Rg against a nonnegative symmetric weight.
    Fejer {
        #[command(flatten)]
        input: FunctionInput,
        /// Weight shorthand, JSON document or JSON file.
        #[arg(long = "weight-fn", value_name = "SPEC", value_parser = inputs::parse_function,
              required_unless_present = "weight_expr", conflicts_with = "weight_expr")]
        weight_fn: Option<FunctionArg>,
        /// Weight as an expression in x1, x2, ...
        #[arg(long = "weight-expr", value_name = "EXPR", allow_hyphen_values = true, value_parser = inputs::parse_expression)]
        weight_expr: Option<FunctionArg>,
        #[command(flatten)]
        common: Common,
    },
    /// The integral of a function with the chosen backend.
    Integrate {
        #[command(flatten)]
        input: FunctionInput,
        #[command(flatten)]
        common: Common,
    },
    /// The unit pyramid, for which L = nR.
    Witness {
        #[arg(long, value_name = "PATH|unit:N|interval:A,B", value_parser = inputs::parse_simplex)]
        simplex: SimplexArg,
        #[command(flatten)]
        common: Common,
    },
    /// Checks 0 <= L <= nR on a seeded corpus of random convex quadratics.
    Verify {
        /// Dimensions, as `1..5`, `2,3` or `4`.
        #[arg(long, default_value = "1..3", value_parser = inputs::parse_dims)]
        dims: Dims,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Add one equality-case row per dimension.
        #[arg(long)]
        include_witnesses: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Finds a clamped weight with Lg > N Rg.
    DemoFejer {
        #[arg(long, value_name = "PATH|unit:N|interval:A,B", value_parser = inputs::parse_simplex)]
        simplex: SimplexArg,
        #[arg(long = "N", value_name = "N")]
        constant: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct FunctionInput {
    /// Simplex JSON file, or `unit:N`, or `interval:A,B`.
    #[arg(long, value_name = "PATH|unit:N|interval:A,B", value_parser = inputs::parse_simplex)]
    simplex: SimplexArg,
    /// `pyramid:A,F`, `indicator`, `const:C`, `clamped:A`, a JSON document or a JSON file.
    #[arg(long = "fn", value_name = "SPEC", value_parser = inputs::parse_function,
          required_unless_present = "expr", conflicts_with = "expr")]
    function: Option<FunctionArg>,
    /// Expression in the Cartesian coordinates x1, x2, ...
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true, value_parser = inputs::parse_expression)]
    expr: Option<FunctionArg>,
}

impl FunctionInput {
    fn function(&self) -> &FunctionArg {
        self.function.as_ref().or(self.expr.as_ref()).expect("clap requires --fn or --expr")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Auto,
    Exact,
    Bracket,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RefinementArg {
    LongestEdge,
    Barycentric,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, env = "HH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long)]
    max_cells: Option<usize>,
    #[arg(long, value_enum)]
    refinement: Option<RefinementArg>,
    /// Output format; `verify` defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Common {
    fn quadrature(&self) -> QuadratureConfig {
        let mut cfg = QuadratureConfig::default().with_seed(self.seed);
        cfg.backend = match self.backend {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Exact => Backend::Exact,
            BackendArg::Bracket => Backend::Bracket,
            BackendArg::Mc => Backend::MonteCarlo,
        };
        if let Some(n) = self.samples {
            cfg.mc_samples = n;
        }
        if let Some(t) = self.abs_tol {
            cfg.abs_tol = t;
        }
        if let Some(t) = self.rel_tol {
            cfg.rel_tol = t;
        }
        if let Some(d) = self.max_depth {
            cfg.max_depth = d;
        }
        if let Some(c) = self.max_cells {
            cfg.max_cells = c;
        }
        if let Some(r) = self.refinement {
            cfg.refinement = match r {
                RefinementArg::LongestEdge => Refinement::LongestEdge,
                RefinementArg::Barycentric => Refinement::Barycentric,
            };
        }
        cfg
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.output {
            Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Input(e.to_string()))
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verdict(String),
    #[error("{0}")]
    Search(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Verdict(_) => 2,
            Failure::Search(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SearchExhausted { .. } => Failure::Search(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn verdict(pass: bool, what: &str) -> Result<(), Failure> {
    if pass {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("{what} violated beyond tolerance")))
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Bounds { input, common } => {
            let cfg = common.quadrature();
            let s = &input.simplex.0;
            let f = input.function().resolve(s).map_err(Failure::Input)?;
            let report = compute_lr(s, &f, &cfg)?;
            let pass = report.passes();
            let doc = BoundsDocument::new(s, &f, &cfg, report);
            common.emit(&output::bounds(&doc, common.format.unwrap_or(Format::Json))?)?;
            verdict(pass, "0 <= L <= nR")
        }
        Command::Witness { simplex, common } => {
            let cfg = QuadratureConfig { backend: Backend::Exact, ..common.quadrature() };
            let (f, report) = make_sharpness_witness(&simplex.0);
            let pass = report.passes();
            let doc = BoundsDocument::new(&simplex.0, &f, &cfg, report);
            common.emit(&output::bounds(&doc, common.format.unwrap_or(Format::Json))?)?;
            verdict(pass, "0 <= L <= nR")
        }
        Command::Fejer { input, weight_fn, weight_expr, common } => {
            let cfg = common.quadrature();
            let s = &input.simplex.0;
            let f = input.function().resolve(s).map_err(Failure::Input)?;
            let weight = weight_fn.or(weight_expr).expect("clap requires a weight");
            let g = weight.resolve(s).map_err(Failure::Input)?;
            let report = fejer_lr(s, &f, &g, &cfg)?;
            if let Some(warning) = &report.symmetry_warning {
                eprintln!("warning: {warning}");
            }
            let pass = report.passes();
            let doc = FejerDocument::new(s, &f, &g, &cfg, report);
            common.emit(&output::fejer(&doc, common.format.unwrap_or(Format::Json))?)?;
            verdict(pass, "the weighted bounds")
        }
        Command::DemoFejer { simplex, constant, common } => {
            let cfg = common.quadrature();
            let s = &simplex.0;
            let (a, report) = demonstrate_no_uniform_fejer_constant(s, constant, &cfg)?;
            let (f, g) = hermite_simplex::make_fejer_counterexample(s, a)?;
            let pass = report.passes();
            let mut doc = FejerDocument::new(s, &f, &g, &cfg, report);
            doc.a = Some(a);
            doc.constant = Some(constant);
            common.emit(&output::fejer(&doc, common.format.unwrap_or(Format::Json))?)?;
            verdict(pass, "the weighted bounds")
        }
        Command::Integrate { input, common } => {
            let cfg = common.quadrature();
            let s = &input.simplex.0;
            let f = input.function().resolve(s).map_err(Failure::Input)?;
            let result = integrate(s, &f, &cfg)?;
            let doc = IntegralDocument::new(s, &f, &cfg, result);
            common.emit(&output::integral(&doc, common.format.unwrap_or(Format::Json))?)
        }
        Command::Verify { dims, count, include_witnesses, common } => {
            let cfg = common.quadrature();
            let corpus = CorpusConfig { include_witnesses, ..CorpusConfig::new(dims.0, count, common.seed) };
            let rows = run_corpus(&corpus, &cfg)?;
            common.emit(&output::corpus(&rows, common.format.unwrap_or(Format::Csv))?)?;
            let failing: Vec<String> = rows
                .iter()
                .filter(|r| !r.verdict.is_pass())
                .map(|r| format!("dim {} instance {}", r.dim, r.instance))
                .collect();
            if failing.is_empty() {
                Ok(())
            } else {
                for f in &failing {
                    eprintln!("fail: {f}");
                }
                Err(Failure::Verdict(format!("{} of {} instances failed", failing.len(), rows.len())))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hh: {e}");
            ExitCode::from(e.code())
        }
    }
}
