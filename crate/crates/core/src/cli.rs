//! `balhon` command line.
//!
//! Exit status: 0 on success, 1 for usage and input-validation errors, 2 for
//! internal failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::aggregate::{summarize_regions, RegionRiskSummary};
use crate::error::{Error, Result};
use crate::hon::write_rules_csv;
use crate::inequality::{
    fold_signed, lorenz_points, read_region_metrics, LorenzCurve, RegionDatum, SortKey,
};
use crate::ingest::{load_dataset, write_dataset, write_json, Dataset, InputFiles, LoadOptions};
use crate::params::{RiskParams, IMO_BWM_SURVIVAL};
use crate::report::{self, Manifest, ManifestScenario};
use crate::scenario::{
    compare_scenarios, run_scenario, Normalization, ScenarioConfig, ScenarioResult,
};
use crate::synth::synth_dataset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "balhon",
    version,
    about = "Ballast-water invasion risk, compliance cost and inequality"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "BALHON_THREADS")]
    pub threads: Option<usize>,
    /// TOML file with defaults for any flag; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario (optionally against a second one) and write reports.
    Run(RunArgs),
    /// Write a seeded synthetic dataset and two scenario files.
    Synth(SynthArgs),
    /// Lorenz curve and Gini coefficient of a regional metric.
    Gini(GiniArgs),
    /// Load and check input files without running anything.
    Validate(InputArgs),
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputArgs {
    #[arg(long)]
    pub ports: Option<PathBuf>,
    #[arg(long)]
    pub voyages: Option<PathBuf>,
    #[arg(long)]
    pub regions: Option<PathBuf>,
    /// params.json with model defaults and ecoregion neighbours.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Fail on the first invalid row instead of skipping it.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Scenario JSON (the baseline when --compare is given).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Treated scenario JSON to compare against the baseline.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the grown rules to rules.csv.
    #[arg(long)]
    pub dump_rules: bool,
    /// Lorenz ordering: intensity or income.
    #[arg(long)]
    pub lorenz_sort: Option<String>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub ports: Option<usize>,
    #[arg(long)]
    pub voyages: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GiniArgs {
    /// CSV with a region_id column plus the metric and income columns.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub metric_col: Option<String>,
    #[arg(long)]
    pub income_col: Option<String>,
    /// Where to write the curve (default: lorenz.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// intensity or income.
    #[arg(long)]
    pub sort: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    threads: Option<usize>,
    verbose: bool,
    run: RunArgs,
    synth: SynthArgs,
    gini: GiniArgs,
    validate: InputArgs,
}

fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn merge_inputs(cli: InputArgs, file: InputArgs) -> InputArgs {
    InputArgs {
        ports: cli.ports.or(file.ports),
        voyages: cli.voyages.or(file.voyages),
        regions: cli.regions.or(file.regions),
        params: cli.params.or(file.params),
        strict: cli.strict || file.strict,
    }
}

fn merge(command: Command, file: ConfigFile) -> Command {
    match command {
        Command::Run(a) => {
            let f = file.run;
            Command::Run(RunArgs {
                input: merge_inputs(a.input, f.input),
                scenario: a.scenario.or(f.scenario),
                compare: a.compare.or(f.compare),
                out: a.out.or(f.out),
                dump_rules: a.dump_rules || f.dump_rules,
                lorenz_sort: a.lorenz_sort.or(f.lorenz_sort),
            })
        }
        Command::Synth(a) => {
            let f = file.synth;
            Command::Synth(SynthArgs {
                seed: a.seed.or(f.seed),
                ports: a.ports.or(f.ports),
                voyages: a.voyages.or(f.voyages),
                out: a.out.or(f.out),
            })
        }
        Command::Gini(a) => {
            let f = file.gini;
            Command::Gini(GiniArgs {
                data: a.data.or(f.data),
                metric_col: a.metric_col.or(f.metric_col),
                income_col: a.income_col.or(f.income_col),
                out: a.out.or(f.out),
                sort: a.sort.or(f.sort),
            })
        }
        Command::Validate(a) => Command::Validate(merge_inputs(a, file.validate)),
    }
}

/// Missing required flag.
#[derive(Debug)]
struct Usage(String);

enum Failure {
    Usage(Usage),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u)
    }
}

fn required<T>(value: Option<T>, flag: &str) -> std::result::Result<T, Usage> {
    value.ok_or_else(|| Usage(format!("missing required option --{flag}")))
}

fn load_inputs(args: InputArgs) -> std::result::Result<Dataset, Failure> {
    let ports = required(args.ports, "ports")?;
    let voyages = required(args.voyages, "voyages")?;
    let regions = required(args.regions, "regions")?;
    let files = InputFiles {
        ports: &ports,
        voyages: &voyages,
        regions: &regions,
        params: args.params.as_deref(),
    };
    Ok(load_dataset(
        files,
        LoadOptions {
            strict: args.strict,
        },
    )?)
}

/// Region metric for the Lorenz curve: the reduction when a treated scenario
/// is present, otherwise the baseline risk itself.
fn lorenz_data(dataset: &Dataset, rows: &[RegionRiskSummary], compared: bool) -> Vec<RegionDatum> {
    rows.iter()
        .filter_map(|r| {
            let region = dataset.region(&r.region_id)?;
            let metric = if compared {
                r.risk_no_policy - r.risk_policy
            } else {
                r.risk_no_policy
            };
            Some(RegionDatum::new(
                r.region_id.clone(),
                region.gdp_per_capita_usd,
                metric,
            ))
        })
        .collect()
}

fn curve_or_warn(data: &[RegionDatum], sort: SortKey) -> Result<Option<LorenzCurve>> {
    let (folded, signs) = fold_signed(data);
    if signs.negative > 0 {
        log::warn!(
            "{} regions have a negative metric; using magnitudes",
            signs.negative
        );
    }
    match lorenz_points(&folded, sort) {
        Ok(c) => Ok(Some(c)),
        Err(Error::DegenerateInput(why)) => {
            log::warn!("no Lorenz curve: {why}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn manifest_entry(r: &ScenarioResult) -> ManifestScenario {
    ManifestScenario {
        name: r.config.name.clone(),
        config_hash: r.provenance.config_hash.clone(),
        config: r.config.clone(),
        contexts_per_order: r.rules.contexts_per_order(),
    }
}

fn cmd_run(args: RunArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let scenario = required(args.scenario, "scenario")?;
    let out_dir = args.out.unwrap_or_else(|| PathBuf::from("out"));
    let sort: SortKey = args.lorenz_sort.as_deref().unwrap_or("intensity").parse()?;
    let dataset = load_inputs(args.input)?;

    let baseline_cfg = ScenarioConfig::load(&scenario, dataset.params())?;
    let treated_cfg = args
        .compare
        .as_deref()
        .map(|p| ScenarioConfig::load(p, dataset.params()))
        .transpose()?;
    if let Some(t) = &treated_cfg {
        if t.name == baseline_cfg.name {
            return Err(Error::Config(format!("both scenarios are named `{}`", t.name)).into());
        }
    }

    let baseline = run_scenario(&dataset, &baseline_cfg)?;
    let treated = treated_cfg
        .as_ref()
        .map(|c| run_scenario(&dataset, c))
        .transpose()?;

    let (rows, cost_source) = match &treated {
        Some(t) => (compare_scenarios(&baseline, t)?.regions, t),
        None => {
            let (rows, _) = summarize_regions(
                &baseline.port_risks,
                &baseline.port_risks,
                &baseline.regions,
            )?;
            (rows, &baseline)
        }
    };
    let curve = curve_or_warn(&lorenz_data(&dataset, &rows, treated.is_some()), sort)?;

    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let mut outputs = vec![
        report::REGION_RISK_FILE.to_string(),
        report::COST_MATRIX_FILE.to_string(),
        report::LORENZ_FILE.to_string(),
    ];
    report::write_region_risk_csv(
        &out_dir.join(report::REGION_RISK_FILE),
        &rows,
        treated.is_some(),
    )?;
    report::write_cost_matrix_csv(
        &out_dir.join(report::COST_MATRIX_FILE),
        &cost_source.cost_matrix,
    )?;
    report::write_lorenz_csv(&out_dir.join(report::LORENZ_FILE), curve.as_ref())?;
    if args.dump_rules {
        let names: Vec<&str> = dataset.ports().iter().map(|p| p.port_id.as_str()).collect();
        write_rules_csv(&out_dir.join(report::RULES_FILE), &baseline.rules, &names)?;
        outputs.push(report::RULES_FILE.to_string());
    }
    outputs.push(report::MANIFEST_FILE.to_string());

    let mut scenarios = vec![manifest_entry(&baseline)];
    scenarios.extend(treated.as_ref().map(manifest_entry));
    let manifest = Manifest {
        tool: "balhon".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: "run".into(),
        dataset_hash: baseline.provenance.dataset_hash.clone(),
        ports: dataset.ports().len(),
        voyages: dataset.voyages().len(),
        regions: dataset.regions().len(),
        rejected_rows: dataset.report().rejections.len(),
        scenarios,
        lorenz_metric: if treated.is_some() {
            "risk_reduction"
        } else {
            "risk_no_policy"
        }
        .into(),
        outputs: outputs.clone(),
    };
    report::write_manifest(&out_dir.join(report::MANIFEST_FILE), &manifest)?;

    for f in &outputs {
        writeln!(out, "{}", out_dir.join(f).display()).map_err(|e| Error::io("stdout", e))?;
    }
    Ok(())
}

fn scenario_file(name: &str, rho: f64) -> serde_json::Value {
    serde_json::json!({
        "name": name,
        "normalization": Normalization::Raw,
        "risk": RiskParams::with_alpha(1.0).with_rho(rho),
    })
}

fn cmd_synth(args: SynthArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let seed = required(args.seed, "seed")?;
    let ports = required(args.ports, "ports")?;
    let voyages = required(args.voyages, "voyages")?;
    let dir = required(args.out, "out")?;
    let dataset = synth_dataset(seed, ports, voyages)?;
    write_dataset(&dir, &dataset)?;
    write_json(
        &dir.join("no_policy.json"),
        &scenario_file("no_policy", 1.0),
    )?;
    write_json(
        &dir.join("imo_bwm.json"),
        &scenario_file("imo_bwm", IMO_BWM_SURVIVAL),
    )?;
    writeln!(out, "{}", dataset.content_hash()).map_err(|e| Error::io("stdout", e))?;
    Ok(())
}

fn cmd_gini(args: GiniArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let data = required(args.data, "data")?;
    let metric_col = required(args.metric_col, "metric-col")?;
    let income_col = required(args.income_col, "income-col")?;
    let sort: SortKey = args.sort.as_deref().unwrap_or("intensity").parse()?;
    let path = args
        .out
        .unwrap_or_else(|| PathBuf::from(report::LORENZ_FILE));

    let rows = read_region_metrics(&data, &metric_col, &income_col)?;
    let (folded, signs) = fold_signed(&rows);
    if signs.negative > 0 {
        log::warn!(
            "{} regions have a negative metric; using magnitudes",
            signs.negative
        );
    }
    let curve = lorenz_points(&folded, sort)?;
    report::write_lorenz_csv(&path, Some(&curve))?;
    writeln!(out, "{}", report::fixed(curve.gini)).map_err(|e| Error::io("stdout", e))?;
    Ok(())
}

fn cmd_validate(args: InputArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let dataset = load_inputs(args)?;
    let r = dataset.report();
    let io = |e| Error::io("stdout", e);
    writeln!(out, "regions {}", r.regions_kept).map_err(io)?;
    writeln!(out, "ports {}", r.ports_kept).map_err(io)?;
    writeln!(out, "voyages {}", r.voyages_kept).map_err(io)?;
    writeln!(out, "rejected {}", r.rejections.len()).map_err(io)?;
    for rej in &r.rejections {
        writeln!(out, "{} row {}: {}", rej.file, rej.row, rej.reason).map_err(io)?;
    }
    writeln!(out, "dataset {}", dataset.content_hash()).map_err(io)?;
    Ok(())
}

fn dispatch(command: Command, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match command {
        Command::Run(a) => cmd_run(a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Gini(a) => cmd_gini(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };

    let file = match cli.config.as_deref().map(load_config).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let verbose = cli.verbose || file.verbose;
    let level = if verbose { "info" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();

    let threads = cli.threads.or(file.threads);
    let command = merge(cli.command, file);
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return EXIT_INTERNAL;
        }
    };

    let mut buffer = Vec::new();
    let result = pool.install(|| dispatch(command, &mut buffer));
    let _ = out.write_all(&buffer);
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(Usage(msg))) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                EXIT_INVALID
            } else {
                EXIT_INTERNAL
            }
        }
    }
}
