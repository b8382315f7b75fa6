//! Command-line front end.
//!
//! Every subcommand builds a [`Scenario`] and runs it, so the machine report
//! has the same shape whether the computation came from flags or a file.

mod check;
mod report;
mod scenario;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub use check::{battery_search, block_embed, chain_scenario, check_suite, random_zoo_channel};
pub use report::{
    fixed12, machine_report, render_table, run, strip_timing, InvariantResult, Record, RunReport, Units, TIMING_FIELD,
};
pub use scenario::{
    matrix_from_spec, matrix_to_spec, parse_scenario, serialize_scenario, ChannelSpec, CodingFamilySpec, CodingSpec,
    Computation, DecodingFamilySpec, DecodingSpec, DistributionSetSpec, Resolved, Scenario, ScenarioError,
    StateSetSpec, StateSpec,
};

use crate::search::SearchParams;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Nats,
    Bits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TolProfile {
    Default,
    Strict,
}

impl TolProfile {
    pub fn tolerances(self) -> Tolerances {
        match self {
            Self::Default => Tolerances::default(),
            Self::Strict => Tolerances::strict(),
        }
    }
}

/// Quantum mutual entropy and channel capacities.
#[derive(Debug, Parser)]
#[command(name = "qentropy", version)]
pub struct Cli {
    /// Seed for every randomized search (overrides a scenario's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "nats")]
    pub units: UnitsArg,
    #[arg(long = "tol-profile", global = true, value_enum, default_value = "default")]
    pub tol_profile: TolProfile,
    /// Write the JSON-lines machine report to this path.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Random restarts per search.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Von Neumann entropy S(ρ).
    Entropy {
        #[arg(long)]
        state: String,
    },
    /// Relative entropy S(ρ, σ).
    Relent {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        sigma: String,
    },
    /// Mutual entropy I(ρ; Λ*).
    Mutual {
        #[arg(long)]
        state: String,
        #[arg(long)]
        channel: String,
        /// Also compare the decomposition and compound-state forms.
        #[arg(long)]
        check_forms: bool,
    },
    /// Pseudo-mutual entropy.
    Pseudo {
        #[arg(long)]
        state: String,
        #[arg(long)]
        channel: String,
    },
    /// Capacity C^{S0} over a state set (`full`, `diag` or `@file`).
    Capacity {
        #[arg(long)]
        channel: String,
        #[arg(long, default_value = "full")]
        set: String,
        /// Also compute the pseudo-capacity.
        #[arg(long)]
        pseudo: bool,
    },
    /// Coding → channel → decoding: mutual information at `--lambda`, or
    /// the capacity over all input distributions without it.
    Cqc {
        #[arg(long)]
        coding: String,
        #[arg(long)]
        channel: String,
        #[arg(long)]
        decoding: String,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Holevo bound S(Γ*σ) − Σ λ_k S(Γ*σ_k).
    Holevo {
        #[arg(long)]
        coding: String,
        #[arg(long)]
        channel: String,
        #[arg(long)]
        lambda: String,
    },
    /// Invariant battery over dimensions and seeds.
    Check {
        #[arg(long, default_value = "2,3")]
        dims: String,
        /// Comma list or inclusive range `a-b`.
        #[arg(long, default_value = "1-10")]
        seeds: String,
    },
    /// Run a scenario file.
    Run { file: PathBuf },
}

/// Error raised while turning flags into a scenario.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("bad {what} `{text}`: {reason}")]
    Spec {
        what: &'static str,
        text: String,
        reason: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

fn spec_err(what: &'static str, text: &str, reason: impl Into<String>) -> CliError {
    CliError::Spec {
        what,
        text: text.into(),
        reason: reason.into(),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn from_file<T: serde::de::DeserializeOwned>(what: &'static str, text: &str) -> Result<T, CliError> {
    let bytes = read_file(Path::new(&text[1..]))?;
    serde_json::from_slice(&bytes).map_err(|e| spec_err(what, text, e.to_string()))
}

fn parse_num<T: std::str::FromStr>(what: &'static str, text: &str, s: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| spec_err(what, text, format!("`{s}` is not a number")))
}

fn parse_list(what: &'static str, text: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|x| parse_num(what, text, x)).collect()
}

/// `mixed:D`, `pure:D:K`, `diag:a,b,..`, `random:D:R[:SEED]`,
/// `spectrum:a,b,..[:SEED]` or `@file.json`.
pub fn parse_state_arg(text: &str) -> Result<StateSpec, CliError> {
    const W: &str = "state";
    if text.starts_with('@') {
        return from_file(W, text);
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["mixed", d] => Ok(StateSpec::MaximallyMixed(parse_num(W, text, d)?)),
        ["pure", d, k] => Ok(StateSpec::Basis {
            dim: parse_num(W, text, d)?,
            index: parse_num(W, text, k)?,
        }),
        ["diag", p] => Ok(StateSpec::Diagonal(parse_list(W, text, p)?)),
        ["random", d, r] => Ok(StateSpec::Random {
            dim: parse_num(W, text, d)?,
            rank: parse_num(W, text, r)?,
            seed: 0,
        }),
        ["random", d, r, s] => Ok(StateSpec::Random {
            dim: parse_num(W, text, d)?,
            rank: parse_num(W, text, r)?,
            seed: parse_num(W, text, s)?,
        }),
        ["spectrum", p] => Ok(StateSpec::Spectrum {
            eigenvalues: parse_list(W, text, p)?,
            seed: 0,
        }),
        ["spectrum", p, s] => Ok(StateSpec::Spectrum {
            eigenvalues: parse_list(W, text, p)?,
            seed: parse_num(W, text, s)?,
        }),
        _ => Err(spec_err(W, text, "expected mixed:D, pure:D:K, diag:.., random:D:R[:SEED], spectrum:..[:SEED] or @file")),
    }
}

/// `NAME[:P][:D]` from the channel zoo, or `@file.json`.
pub fn parse_channel_arg(text: &str) -> Result<ChannelSpec, CliError> {
    const W: &str = "channel";
    if text.starts_with('@') {
        return from_file(W, text);
    }
    let mut parts = text.split(':');
    let name = parts.next().unwrap_or_default().to_string();
    let params = parts.map(|p| parse_num(W, text, p)).collect::<Result<_, _>>()?;
    Ok(ChannelSpec::Zoo { name, params })
}

/// `basis:D` or `@file.json`.
pub fn parse_coding_arg(text: &str) -> Result<CodingSpec, CliError> {
    const W: &str = "coding";
    if text.starts_with('@') {
        return from_file(W, text);
    }
    match text.split_once(':') {
        Some(("basis", d)) => Ok(CodingSpec::Basis(parse_num(W, text, d)?)),
        _ => Err(spec_err(W, text, "expected basis:D or @file")),
    }
}

/// `basis:D`, `trivial:D` or `@file.json`.
pub fn parse_decoding_arg(text: &str) -> Result<DecodingSpec, CliError> {
    const W: &str = "decoding";
    if text.starts_with('@') {
        return from_file(W, text);
    }
    match text.split_once(':') {
        Some(("basis", d)) => Ok(DecodingSpec::Basis(parse_num(W, text, d)?)),
        Some(("trivial", d)) => Ok(DecodingSpec::Trivial(parse_num(W, text, d)?)),
        _ => Err(spec_err(W, text, "expected basis:D, trivial:D or @file")),
    }
}

fn parse_lambda(text: &str, n: usize) -> Result<Vec<f64>, CliError> {
    if text == "uniform" {
        return Ok(vec![1.0 / n as f64; n]);
    }
    parse_list("lambda", text, text)
}

/// Comma list of integers or inclusive range `a-b`.
pub fn parse_int_list(text: &str) -> Result<Vec<u64>, CliError> {
    const W: &str = "integer list";
    if let Some((a, b)) = text.split_once('-') {
        let (a, b): (u64, u64) = (parse_num(W, text, a)?, parse_num(W, text, b)?);
        if a > b {
            return Err(spec_err(W, text, "empty range"));
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|x| parse_num(W, text, x)).collect()
}

fn empty_scenario(id: &str) -> Scenario {
    Scenario {
        id: id.into(),
        seed: 0,
        channel: None,
        state: None,
        reference: None,
        states: None,
        lambda: None,
        inputs: None,
        coding: None,
        decoding: None,
        coding_family: None,
        decoding_family: None,
        search: SearchParams::default(),
        computations: vec![],
    }
}

fn channel_dim(spec: &ChannelSpec) -> Result<usize, CliError> {
    spec.build()
        .map(|c| c.dim_in())
        .map_err(|e| CliError::Scenario(ScenarioError::Validation {
            field: "channel".into(),
            source: e,
        }))
}

/// Builds the scenario a subcommand stands for. `check` has none.
pub fn scenario_for(cli: &Cli) -> Result<Option<Scenario>, CliError> {
    use Computation as C;
    let mut s = match &cli.command {
        Command::Entropy { state } => {
            let mut s = empty_scenario("entropy");
            s.state = Some(parse_state_arg(state)?);
            s.computations = vec![C::Entropy];
            s
        }
        Command::Relent { rho, sigma } => {
            let mut s = empty_scenario("relent");
            s.state = Some(parse_state_arg(rho)?);
            s.reference = Some(parse_state_arg(sigma)?);
            s.computations = vec![C::RelativeEntropy];
            s
        }
        Command::Mutual {
            state,
            channel,
            check_forms,
        } => {
            let mut s = empty_scenario("mutual");
            s.state = Some(parse_state_arg(state)?);
            s.channel = Some(parse_channel_arg(channel)?);
            s.computations = vec![C::MutualEntropy];
            if *check_forms {
                s.computations.push(C::FormCheck);
            }
            s
        }
        Command::Pseudo { state, channel } => {
            let mut s = empty_scenario("pseudo");
            s.state = Some(parse_state_arg(state)?);
            s.channel = Some(parse_channel_arg(channel)?);
            s.computations = vec![C::MutualEntropy, C::PseudoMutualEntropy];
            s
        }
        Command::Capacity { channel, set, pseudo } => {
            let mut s = empty_scenario("capacity");
            let ch = parse_channel_arg(channel)?;
            let d = channel_dim(&ch)?;
            s.states = Some(match set.as_str() {
                "full" => StateSetSpec::FullSpace(d),
                "diag" => StateSetSpec::DiagonalSimplex(d),
                f if f.starts_with('@') => from_file("state set", f)?,
                other => return Err(spec_err("state set", other, "expected full, diag or @file")),
            });
            s.channel = Some(ch);
            s.computations = vec![C::QuantumCapacity];
            if *pseudo {
                s.computations.push(C::PseudoCapacity);
            }
            s
        }
        Command::Cqc {
            coding,
            channel,
            decoding,
            lambda,
        } => {
            let mut s = empty_scenario("cqc");
            let code = parse_coding_arg(coding)?;
            let n = code
                .build()
                .map_err(|e| CliError::Scenario(ScenarioError::Validation {
                    field: "coding".into(),
                    source: e,
                }))?
                .n_symbols();
            s.coding = Some(code);
            s.channel = Some(parse_channel_arg(channel)?);
            s.decoding = Some(parse_decoding_arg(decoding)?);
            match lambda {
                Some(l) => {
                    s.lambda = Some(parse_lambda(l, n)?);
                    s.computations = vec![C::CqcMutual, C::HolevoBound, C::TracePipeline];
                }
                None => {
                    s.inputs = Some(DistributionSetSpec::FullSimplex(n));
                    s.computations = vec![C::CqcCapacity];
                }
            }
            s
        }
        Command::Holevo {
            coding,
            channel,
            lambda,
        } => {
            let mut s = empty_scenario("holevo");
            let code = parse_coding_arg(coding)?;
            let n = code
                .build()
                .map_err(|e| CliError::Scenario(ScenarioError::Validation {
                    field: "coding".into(),
                    source: e,
                }))?
                .n_symbols();
            s.coding = Some(code);
            s.channel = Some(parse_channel_arg(channel)?);
            s.lambda = Some(parse_lambda(lambda, n)?);
            s.computations = vec![C::HolevoBound];
            s
        }
        Command::Run { file } => parse_scenario(&read_file(file)?)?,
        Command::Check { .. } => return Ok(None),
    };
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    if let Some(r) = cli.restarts {
        s.search.restarts = r;
    }
    if cli.tol_profile == TolProfile::Strict || !matches!(cli.command, Command::Run { .. }) {
        s.search = s.search.with_tolerances(&cli.tol_profile.tolerances());
    }
    s.resolve()?;
    Ok(Some(s))
}

/// Runs a parsed command line, printing the table to stdout.
pub fn execute(cli: &Cli) -> Result<RunReport, CliError> {
    let report = match &cli.command {
        Command::Check { dims, seeds } => {
            let dims: Vec<usize> = parse_int_list(dims)?.into_iter().map(|d| d as usize).collect();
            check_suite(&dims, &parse_int_list(seeds)?)
        }
        _ => run(&scenario_for(cli)?.expect("non-check command"))?,
    };
    let units = match cli.units {
        UnitsArg::Nats => Units::Nats,
        UnitsArg::Bits => Units::Bits,
    };
    print!("{}", render_table(&report, units));
    if let Some(path) = &cli.report {
        std::fs::write(path, machine_report(&report)).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(report)
}

/// Entry point shared by the binary: exit code 0 iff no errors and no
/// invariant failures.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(r) if r.success() => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
