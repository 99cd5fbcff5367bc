//! Command-line front-end for `effrank`.
//!
//! Every subcommand reads one dataset (CSV, or JSON when the file ends in
//! `.json`) and writes a report to standard output. Reports are
//! deterministic: identical input and flags give byte-identical output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use effrank_core::ranking::DEFAULT_TOLERANCE;
use effrank_core::{
    bootstrap_efficiencies, dominance_graph, efficiency_scores, pareto_frontier, parse_dataset,
    parse_dataset_json, rank_report, summarize, BootstrapConfig, BootstrapDistribution,
    BoxplotStats, Dataset, DominanceGraph, EfficiencyError, EfficiencyResult, FrontierForm,
    LinearProgram, MeasurementError, Point, RankRecord, RankingError, SetupSummary,
    StochasticError,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "effrank",
    version,
    about = "Rank setups by stochastic multi-dimensional relative efficiency"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Deterministic efficiency θ of every setup at its metric means.
    Efficiency(CommonArgs),
    /// Pareto frontier membership at the metric means.
    Frontier(CommonArgs),
    /// Bootstrap efficiency distributions (boxplot statistics).
    Bootstrap(CommonArgs),
    /// Full ranking with stochastic-dominance relations.
    Rank(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Dataset file (`.csv`, or `.json` for the JSON mirror)
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormArg::Convex)]
    pub form: FormArg,
    /// Bootstrap replicates B
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Absolute tolerance of the stochastic-dominance test
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Include every bootstrap sample in the report
    #[arg(long)]
    pub raw_samples: bool,
    /// Report θ in [0, 1] instead of percent
    #[arg(long)]
    pub no_percent: bool,
    /// Dump the failing LP instance on solver errors
    #[arg(long)]
    pub debug_lp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Convex,
    Affine,
}

impl From<FormArg> for FrontierForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Convex => FrontierForm::Convex,
            FormArg::Affine => FrontierForm::Affine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Efficiency,
    Frontier,
    Bootstrap,
    Rank,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub command: Command,
    pub form: FrontierForm,
    pub replicates: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub output_format: OutputFormat,
    pub scale_percent: bool,
    pub raw_samples: bool,
    pub debug_lp: bool,
}

impl RunConfig {
    pub fn new(command: Command, input_path: impl Into<PathBuf>) -> Self {
        Self {
            input_path: input_path.into(),
            command,
            form: FrontierForm::Convex,
            replicates: 1000,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            output_format: OutputFormat::Csv,
            scale_percent: true,
            raw_samples: false,
            debug_lp: false,
        }
    }
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let (command, args) = match cli.command {
            CliCommand::Efficiency(a) => (Command::Efficiency, a),
            CliCommand::Frontier(a) => (Command::Frontier, a),
            CliCommand::Bootstrap(a) => (Command::Bootstrap, a),
            CliCommand::Rank(a) => (Command::Rank, a),
        };
        Self {
            input_path: args.input,
            command,
            form: args.form.into(),
            replicates: args.replicates,
            seed: args.seed,
            tolerance: args.tolerance,
            output_format: args.format,
            scale_percent: !args.no_percent,
            raw_samples: args.raw_samples,
            debug_lp: args.debug_lp,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Dataset(#[from] MeasurementError),
    #[error("{0}")]
    Usage(String),
    #[error("{message}")]
    Solver {
        message: String,
        instance: Option<Box<LinearProgram>>,
    },
    #[error("{0}")]
    Ranking(#[from] RankingError),
}

impl CliError {
    /// 2 for solver failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver { .. } => 2,
            _ => 1,
        }
    }

    pub fn instance(&self) -> Option<&LinearProgram> {
        match self {
            CliError::Solver { instance, .. } => instance.as_deref(),
            _ => None,
        }
    }
}

impl From<EfficiencyError> for CliError {
    fn from(e: EfficiencyError) -> Self {
        match e {
            EfficiencyError::SolverFailure { .. } => CliError::Solver {
                instance: e.instance().cloned().map(Box::new),
                message: e.to_string(),
            },
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<StochasticError> for CliError {
    fn from(e: StochasticError) -> Self {
        match e {
            StochasticError::SolverFailure { ref source, .. } => CliError::Solver {
                instance: source.instance().cloned().map(Box::new),
                message: e.to_string(),
            },
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub report: String,
    pub warnings: Vec<String>,
}

pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let is_json = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
    Ok(if is_json {
        parse_dataset_json(&text)?
    } else {
        parse_dataset(&text)?
    })
}

pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    if config.output_format == OutputFormat::Dot && config.command != Command::Rank {
        return Err(CliError::Usage(
            "--format dot is only available for `rank`".into(),
        ));
    }
    if !(config.tolerance >= 0.0 && config.tolerance.is_finite()) {
        return Err(CliError::Usage(
            "--tolerance must be a finite value >= 0".into(),
        ));
    }
    if config.replicates == 0 && matches!(config.command, Command::Bootstrap | Command::Rank) {
        return Err(CliError::Usage("--replicates must be >= 1".into()));
    }

    let dataset = load_dataset(&config.input_path)?;
    let mut warnings = Vec::new();
    if dataset.repeats() == 1 {
        warnings.push(
            "every setup has a single repeat; standard deviations are 0 and the bootstrap is deterministic"
                .to_string(),
        );
    }
    let summaries = summarize(&dataset);
    let report = Report::new(config, &summaries);
    let text = match config.command {
        Command::Efficiency => report.efficiency(&efficiency_scores(&summaries, config.form)?),
        Command::Frontier => report.frontier(&frontier(&summaries)?),
        Command::Bootstrap => report.bootstrap(&bootstrap(config, &summaries)?),
        Command::Rank => {
            let results = efficiency_scores(&summaries, config.form)?;
            let dists = bootstrap(config, &summaries)?;
            let graph = dominance_graph(&dists, config.tolerance)?;
            let records = rank_report(&results, &dists, &graph, &frontier(&summaries)?)?;
            match config.output_format {
                OutputFormat::Dot => render_dot(&graph),
                _ => report.rank(&records, &dists),
            }
        }
    };
    Ok(RunOutput {
        report: text,
        warnings,
    })
}

fn frontier(summaries: &[SetupSummary]) -> Result<Vec<String>, CliError> {
    let points: Vec<Point> = summaries.iter().map(SetupSummary::mean_point).collect();
    pareto_frontier(&points).map_err(|e| CliError::Usage(e.to_string()))
}

fn bootstrap(
    config: &RunConfig,
    summaries: &[SetupSummary],
) -> Result<Vec<BootstrapDistribution>, CliError> {
    let bootstrap_config = BootstrapConfig {
        replicates: config.replicates,
        seed: config.seed,
        form: config.form,
        ..Default::default()
    };
    Ok(bootstrap_efficiencies(summaries, &bootstrap_config)?)
}

fn quote_dot(id: &str) -> String {
    let mut out = String::with_capacity(id.len() + 2);
    out.push('"');
    for c in id.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// DOT digraph of the transitively reduced dominance relation, arrows from
/// winner to loser.
pub fn render_dot(graph: &DominanceGraph) -> String {
    let mut nodes = graph.nodes.clone();
    nodes.sort();
    let mut edges = graph.reduced_edges.clone();
    edges.sort();
    let mut out = String::from("digraph dominance {\n");
    for n in &nodes {
        let _ = writeln!(out, "  {};", quote_dot(n));
    }
    for (w, l) in &edges {
        let _ = writeln!(out, "  {} -> {};", quote_dot(w), quote_dot(l));
    }
    out.push_str("}\n");
    out
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Serialize)]
struct ConfigEcho {
    command: Command,
    input: String,
    form: FrontierForm,
    replicates: usize,
    seed: u64,
    tolerance: f64,
    scale_percent: bool,
}

#[derive(Serialize)]
struct JsonReport<T> {
    config: ConfigEcho,
    setups: Vec<T>,
}

#[derive(Serialize)]
struct EfficiencyRow {
    name: String,
    theta: f64,
    peers: Vec<PeerWeight>,
}

#[derive(Serialize)]
struct PeerWeight {
    name: String,
    weight: f64,
}

#[derive(Serialize)]
struct FrontierRow {
    name: String,
    frontier: bool,
}

#[derive(Serialize)]
struct BootstrapRow {
    name: String,
    stats: BoxplotStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct RankRow {
    name: String,
    theta: f64,
    frontier: bool,
    stats: BoxplotStats,
    dominates: Vec<String>,
    dominated_by: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<f64>>,
}

const STATS_HEADER: [&str; 7] = [
    "min",
    "whisker_low",
    "q1",
    "median",
    "q3",
    "whisker_high",
    "max",
];

struct Report<'a> {
    config: &'a RunConfig,
    setups: Vec<&'a str>,
}

impl<'a> Report<'a> {
    fn new(config: &'a RunConfig, summaries: &'a [SetupSummary]) -> Self {
        Self {
            config,
            setups: summaries.iter().map(|s| s.setup.as_str()).collect(),
        }
    }

    fn scale(&self, theta: f64) -> f64 {
        if self.config.scale_percent {
            theta * 100.0
        } else {
            theta
        }
    }

    fn scale_stats(&self, s: &BoxplotStats) -> BoxplotStats {
        BoxplotStats {
            min: self.scale(s.min),
            whisker_low: self.scale(s.whisker_low),
            q1: self.scale(s.q1),
            median: self.scale(s.median),
            q3: self.scale(s.q3),
            whisker_high: self.scale(s.whisker_high),
            max: self.scale(s.max),
        }
    }

    fn stats_fields(&self, s: &BoxplotStats) -> Vec<String> {
        let s = self.scale_stats(s);
        [
            s.min,
            s.whisker_low,
            s.q1,
            s.median,
            s.q3,
            s.whisker_high,
            s.max,
        ]
        .into_iter()
        .map(format_number)
        .collect()
    }

    fn samples(&self, d: &BootstrapDistribution) -> Option<Vec<f64>> {
        self.config
            .raw_samples
            .then(|| d.samples.iter().map(|&t| self.scale(t)).collect())
    }

    fn json<T: Serialize>(&self, setups: Vec<T>) -> String {
        let report = JsonReport {
            config: ConfigEcho {
                command: self.config.command,
                input: self.config.input_path.display().to_string(),
                form: self.config.form,
                replicates: self.config.replicates,
                seed: self.config.seed,
                tolerance: self.config.tolerance,
                scale_percent: self.config.scale_percent,
            },
            setups,
        };
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    }

    fn efficiency(&self, results: &[EfficiencyResult]) -> String {
        match self.config.output_format {
            OutputFormat::Json => self.json(
                results
                    .iter()
                    .map(|r| EfficiencyRow {
                        name: r.setup.clone(),
                        theta: self.scale(r.theta),
                        peers: r
                            .peer_weights
                            .iter()
                            .filter(|(_, w)| *w > 0.0)
                            .map(|(name, weight)| PeerWeight {
                                name: name.clone(),
                                weight: *weight,
                            })
                            .collect(),
                    })
                    .collect(),
            ),
            _ => csv_table(
                &["setup", "theta"],
                results
                    .iter()
                    .map(|r| vec![r.setup.clone(), format_number(self.scale(r.theta))]),
            ),
        }
    }

    fn frontier(&self, frontier: &[String]) -> String {
        let rows = self.setups.iter().map(|s| FrontierRow {
            name: s.to_string(),
            frontier: frontier.iter().any(|f| f == s),
        });
        match self.config.output_format {
            OutputFormat::Json => self.json(rows.collect()),
            _ => csv_table(
                &["setup", "frontier"],
                rows.map(|r| vec![r.name, r.frontier.to_string()]),
            ),
        }
    }

    fn bootstrap(&self, dists: &[BootstrapDistribution]) -> String {
        match self.config.output_format {
            OutputFormat::Json => self.json(
                dists
                    .iter()
                    .map(|d| BootstrapRow {
                        name: d.setup.clone(),
                        stats: self.scale_stats(&d.stats),
                        samples: self.samples(d),
                    })
                    .collect(),
            ),
            _ => {
                let mut header = vec!["setup"];
                header.extend(STATS_HEADER);
                let mut out = csv_table(
                    &header,
                    dists.iter().map(|d| {
                        let mut row = vec![d.setup.clone()];
                        row.extend(self.stats_fields(&d.stats));
                        row
                    }),
                );
                if self.config.raw_samples {
                    out.push('\n');
                    out.push_str(&self.samples_table(dists));
                }
                out
            }
        }
    }

    fn samples_table(&self, dists: &[BootstrapDistribution]) -> String {
        csv_table(
            &["setup", "replicate", "theta"],
            dists.iter().flat_map(|d| {
                d.samples.iter().enumerate().map(|(b, &t)| {
                    vec![
                        d.setup.clone(),
                        (b + 1).to_string(),
                        format_number(self.scale(t)),
                    ]
                })
            }),
        )
    }

    fn rank(&self, records: &[RankRecord], dists: &[BootstrapDistribution]) -> String {
        let dist_of = |name: &str| {
            dists
                .iter()
                .find(|d| d.setup == name)
                .expect("consistent setups")
        };
        match self.config.output_format {
            OutputFormat::Json => self.json(
                records
                    .iter()
                    .map(|r| RankRow {
                        name: r.setup.clone(),
                        theta: self.scale(r.theta),
                        frontier: r.frontier,
                        stats: self.scale_stats(&r.stats),
                        dominates: r.dominates.clone(),
                        dominated_by: r.dominated_by.clone(),
                        samples: self.samples(dist_of(&r.setup)),
                    })
                    .collect(),
            ),
            _ => {
                let mut header = vec!["rank", "setup", "theta", "frontier"];
                header.extend(STATS_HEADER);
                header.extend(["dominates", "dominated_by"]);
                let mut out = csv_table(
                    &header,
                    records.iter().enumerate().map(|(i, r)| {
                        let mut row = vec![
                            (i + 1).to_string(),
                            r.setup.clone(),
                            format_number(self.scale(r.theta)),
                            r.frontier.to_string(),
                        ];
                        row.extend(self.stats_fields(&r.stats));
                        row.push(r.dominates.join(";"));
                        row.push(r.dominated_by.join(";"));
                        row
                    }),
                );
                if self.config.raw_samples {
                    out.push('\n');
                    out.push_str(&self.samples_table(dists));
                }
                out
            }
        }
    }
}

fn csv_table(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
