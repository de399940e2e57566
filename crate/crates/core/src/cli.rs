//! Command-line front end. The binary is a thin wrapper around [`run`], which
//! writes to caller-supplied sinks so commands can be exercised in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bell::{
    chsh_coefficients, lhv_bound_bruteforce, maximize_bell, mermin_coefficients, Budget,
    Functional, MAX_LHV_PARTIES,
};
use crate::error::{Error, Result};
use crate::monogamy::{
    check_state, clique_cover, greedy_clique_cover, parse_scenario_spec, sample_check,
    AnticommutingPartition, Sharing,
};
use crate::pauli::PauliString;
use crate::qstate::{correlation_components, index_label, parse_axes, QuantumState};
use crate::scenarios::{parse_state_spec, psi_mono, tight_prediction};

const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    /// A certified bound was numerically exceeded.
    BoundViolation = 1,
    InputError = 2,
    CertificationFailure = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn of_error(e: &Error) -> Self {
        match e {
            Error::Certification(_) | Error::NotAnticommuting { .. } => {
                Status::CertificationFailure
            }
            _ => Status::InputError,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bellmono",
    version,
    about = "Quantum values and monogamy of multiqubit correlation Bell inequalities"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Seed for random states and optimizer restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Points per angle in the coarse settings grid.
    #[arg(long, global = true)]
    pub grid_resolution: Option<usize>,
    #[arg(long, global = true)]
    pub refinement_passes: Option<usize>,
    /// Random optimizer starts besides the canonical one.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Number of random states for sampling runs.
    #[arg(long, global = true, visible_alias = "sample")]
    pub samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Output format; defaults to a table on a terminal and JSON otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List correlation tensor components of a state.
    Tensor {
        state: String,
        #[arg(long, value_delimiter = ',')]
        sites: Option<Vec<usize>>,
        #[arg(long, default_value = "xyz")]
        axes: String,
    },
    /// Maximize a Bell functional over measurement settings.
    Bell {
        state: String,
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
        #[arg(long, default_value = "general")]
        functional: Functional,
    },
    /// Check a state (or random states) against a monogamy relation.
    Monogamy {
        scenario: String,
        state: Option<String>,
        #[arg(long, default_value = "general")]
        functional: Functional,
        /// Keep each party's settings (`settings`) or only its plane
        /// (`plane`) fixed across experiments.
        #[arg(long, default_value = "settings")]
        sharing: Sharing,
        /// Partition text file replacing the built-in construction.
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// Print and certify an anticommuting partition.
    Partition {
        #[arg(required_unless_present = "terms")]
        scenario: Option<String>,
        /// File of whitespace-separated Pauli labels to cover.
        #[arg(long, conflicts_with = "scenario")]
        terms: Option<PathBuf>,
        /// Use the greedy cover even for small term sets.
        #[arg(long)]
        greedy: bool,
    },
    /// Predicted and measured squared values of the star witness as CSV.
    Curve {
        #[arg(long = "M")]
        m: usize,
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// Exact local-realistic bound by strategy enumeration.
    Oracle {
        #[arg(required_unless_present = "coeffs")]
        inequality: Option<String>,
        /// JSON file `{"parties": N, "terms": [{"k": [1, 2], "c": 1.0}]}`.
        #[arg(long, conflicts_with = "inequality")]
        coeffs: Option<PathBuf>,
    },
    /// Export a named state as JSON.
    State {
        spec: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// Validated run parameters shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub grid_resolution: Option<usize>,
    pub refinement_passes: Option<usize>,
    pub restarts: Option<usize>,
    pub samples: Option<usize>,
    pub tolerance: f64,
    pub output_format: Option<Format>,
}

impl RunConfig {
    pub fn from_args(args: &ConfigArgs) -> Result<Self> {
        let config = Self {
            seed: args.seed,
            grid_resolution: args.grid_resolution,
            refinement_passes: args.refinement_passes,
            restarts: args.restarts,
            samples: args.samples,
            tolerance: args.tolerance,
            output_format: args.format,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-2) {
            return Err(Error::OutOfRange(format!(
                "tolerance {} outside (0, 1e-2]",
                self.tolerance
            )));
        }
        if self.grid_resolution.is_some_and(|g| g < 2) {
            return Err(Error::OutOfRange("grid resolution below 2".into()));
        }
        if self.refinement_passes == Some(0) {
            return Err(Error::OutOfRange("zero refinement passes".into()));
        }
        if self.samples == Some(0) {
            return Err(Error::OutOfRange("zero samples".into()));
        }
        Ok(())
    }

    /// `base` with any explicitly given search flags applied.
    pub fn budget(&self, base: Budget) -> Budget {
        Budget {
            grid_resolution: self.grid_resolution.unwrap_or(base.grid_resolution),
            refinement_passes: self.refinement_passes.unwrap_or(base.refinement_passes),
            restarts: self.restarts.unwrap_or(base.restarts),
            seed: self.seed,
            max_sweeps: base.max_sweeps,
        }
    }
}

/// Rounds to nine significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn format_float(x: f64) -> String {
    let r = round_sig(x);
    if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = json!(round_sig(n.as_f64().expect("f64 number")));
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

struct Output {
    json: Value,
    table: String,
    csv: Option<String>,
    status: Status,
}

impl Output {
    fn ok(json: Value, table: String) -> Self {
        Self {
            json,
            table,
            csv: None,
            status: Status::Success,
        }
    }

    fn render(mut self, format: Format, out: &mut dyn Write) -> Result<Status> {
        match format {
            Format::Json => {
                round_json(&mut self.json);
                writeln!(out, "{}", serde_json::to_string_pretty(&self.json)?)?;
            }
            Format::Table => out.write_all(self.table.as_bytes())?,
            Format::Csv => match self.csv {
                Some(csv) => out.write_all(csv.as_bytes())?,
                None => {
                    return Err(Error::Parse(
                        "CSV output is not available for this command".into(),
                    ))
                }
            },
        }
        Ok(self.status)
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, terminal: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return if e.use_stderr() {
                Status::InputError.code()
            } else {
                Status::Success.code()
            };
        }
    };
    match execute(&cli, out, terminal) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Status::of_error(&e).code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, terminal: bool) -> Result<Status> {
    let config = RunConfig::from_args(&cli.config)?;
    let default_format = if terminal {
        Format::Table
    } else {
        Format::Json
    };
    let format = config.output_format.unwrap_or(default_format);
    let output = match &cli.command {
        Command::Tensor { state, sites, axes } => {
            cmd_tensor(state, sites.as_deref(), axes, &config)?
        }
        Command::Bell {
            state,
            subset,
            functional,
        } => cmd_bell(state, subset.as_deref(), *functional, &config)?,
        Command::Monogamy {
            scenario,
            state,
            functional,
            sharing,
            partition,
        } => cmd_monogamy(
            scenario,
            state.as_deref(),
            *functional,
            *sharing,
            partition.as_deref(),
            &config,
        )?,
        Command::Partition {
            scenario,
            terms,
            greedy,
        } => cmd_partition(scenario.as_deref(), terms.as_deref(), *greedy)?,
        Command::Curve { m, points } => {
            let output = cmd_curve(*m, *points, &config)?;
            // CSV is the natural output here; JSON only on request.
            let format = match config.output_format {
                Some(Format::Json) => Format::Json,
                _ => Format::Csv,
            };
            return output.render(format, out);
        }
        Command::Oracle { inequality, coeffs } => {
            cmd_oracle(inequality.as_deref(), coeffs.as_deref())?
        }
        Command::State { spec, output } => cmd_state(spec, output.as_deref())?,
    };
    output.render(format, out)
}

fn all_sites(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn cmd_tensor(
    spec: &str,
    sites: Option<&[usize]>,
    axes: &str,
    config: &RunConfig,
) -> Result<Output> {
    let state = parse_state_spec(spec)?;
    let sites = sites.map_or_else(|| all_sites(state.n_qubits()), <[usize]>::to_vec);
    let axes_list = parse_axes(axes)?;
    let tensor = correlation_components(&state, &sites, &axes_list)?;
    let components: Vec<(String, f64)> = tensor
        .nonzero(config.tolerance)
        .map(|(k, v)| (index_label(k), v))
        .collect();

    let mut table = String::new();
    let mut csv = String::from("index,value\n");
    for (label, v) in &components {
        let _ = writeln!(table, "T_{label}  {}", format_float(*v));
        let _ = writeln!(csv, "{label},{}", format_float(*v));
    }
    let _ = writeln!(table, "{} nonzero components", components.len());
    let json = json!({
        "n_qubits": state.n_qubits(),
        "sites": sites,
        "axes": axes.to_ascii_lowercase(),
        "tolerance": config.tolerance,
        "components": components
            .iter()
            .map(|(label, v)| json!({ "index": label, "value": v }))
            .collect::<Vec<_>>(),
    });
    Ok(Output {
        csv: Some(csv),
        ..Output::ok(json, table)
    })
}

fn settings_table(table: &mut String, settings: &Value) {
    if let Some(rows) = settings.as_array() {
        for row in rows {
            let angles = |key: &str| {
                row[key]
                    .as_array()
                    .map(|a| {
                        a.iter()
                            .map(|x| format_float(x.as_f64().unwrap_or(f64::NAN)))
                            .collect::<Vec<_>>()
                            .join(", ")
                    })
                    .unwrap_or_default()
            };
            let _ = writeln!(
                table,
                "  party {}: a1 = ({}), a2 = ({})",
                row["party"],
                angles("first"),
                angles("second")
            );
        }
    }
}

fn cmd_bell(
    spec: &str,
    subset: Option<&[usize]>,
    functional: Functional,
    config: &RunConfig,
) -> Result<Output> {
    let state = parse_state_spec(spec)?;
    let subset = subset.map_or_else(|| all_sites(state.n_qubits()), <[usize]>::to_vec);
    let report = maximize_bell(
        &state,
        &subset,
        functional,
        &config.budget(Budget::default()),
    )?;
    let json = serde_json::to_value(&report)?;

    let mut table = String::new();
    let _ = writeln!(table, "functional       {}", report.functional);
    let _ = writeln!(table, "value            {}", format_float(report.value));
    let _ = writeln!(
        table,
        "classical bound  {}",
        format_float(report.classical_bound)
    );
    let _ = writeln!(table, "violated         {}", report.violated);
    let _ = writeln!(table, "settings (theta, phi):");
    settings_table(&mut table, &json["settings"]);
    Ok(Output::ok(json, table))
}

fn load_partition(path: &Path) -> Result<AnticommutingPartition> {
    AnticommutingPartition::parse_text(&std::fs::read_to_string(path)?)
}

fn cmd_monogamy(
    scenario_spec: &str,
    state_spec: Option<&str>,
    functional: Functional,
    sharing: Sharing,
    partition_file: Option<&Path>,
    config: &RunConfig,
) -> Result<Output> {
    let (scenario, built) = parse_scenario_spec(scenario_spec)?;
    let partition = match partition_file {
        Some(path) => load_partition(path)?,
        None => built,
    };
    partition.certify_for(&scenario)?;

    if let Some(spec) = state_spec {
        let state = parse_state_spec(spec)?;
        let report = check_state(
            &scenario,
            &state,
            &partition,
            functional,
            sharing,
            &config.budget(Budget::default()),
        )?;
        let exceeded = report.exceeds_bound(config.tolerance);
        let experiments: Vec<Value> = report
            .experiments
            .iter()
            .zip(&report.per_experiment_values)
            .map(|(name, v)| json!({ "parties": name, "value": v, "squared": v * v }))
            .collect();
        let mut table = String::new();
        let _ = writeln!(table, "scenario     {scenario_spec}");
        let _ = writeln!(table, "functional   {functional}");
        let _ = writeln!(table, "sharing      {sharing}");
        for (name, v) in report.experiments.iter().zip(&report.per_experiment_values) {
            let _ = writeln!(
                table,
                "  {name:<10} value {:<14} squared {}",
                format_float(*v),
                format_float(v * v)
            );
        }
        let _ = writeln!(table, "squared sum  {}", format_float(report.squared_sum));
        let _ = writeln!(table, "bound        {}", format_float(report.bound));
        let _ = writeln!(table, "saturated    {}", report.saturated);
        let _ = writeln!(table, "exceeded     {exceeded}");
        let json = json!({
            "scenario": scenario_spec,
            "functional": functional,
            "sharing": sharing,
            "partition_sets": partition.bound(),
            "experiments": experiments,
            "squared_sum": report.squared_sum,
            "bound": report.bound,
            "saturated": report.saturated,
            "exceeds_bound": exceeded,
        });
        return Ok(Output {
            status: if exceeded {
                Status::BoundViolation
            } else {
                Status::Success
            },
            ..Output::ok(json, table)
        });
    }

    let samples = config
        .samples
        .ok_or_else(|| Error::Parse("monogamy needs a state spec or --samples <N>".into()))?;
    let summary = sample_check(
        &scenario,
        &partition,
        functional,
        sharing,
        samples,
        config.seed,
        &config.budget(Budget::sampling()),
        config.tolerance,
    )?;
    let mut table = String::new();
    let _ = writeln!(table, "scenario          {scenario_spec}");
    let _ = writeln!(table, "functional        {functional}");
    let _ = writeln!(table, "sharing           {sharing}");
    let _ = writeln!(table, "samples           {}", summary.samples);
    let _ = writeln!(table, "bound             {}", format_float(summary.bound));
    let _ = writeln!(
        table,
        "max squared sum   {} (seed {})",
        format_float(summary.max_squared_sum),
        summary.max_squared_sum_seed
    );
    let _ = writeln!(
        table,
        "max partition sum {}",
        format_float(summary.max_partition_sum)
    );
    let _ = writeln!(table, "violations        {}", summary.violations);
    let mut json = serde_json::to_value(&summary)?;
    if let Value::Object(map) = &mut json {
        map.insert("scenario".into(), json!(scenario_spec));
        map.insert("functional".into(), json!(functional));
        map.insert("sharing".into(), json!(sharing));
        map.insert("seed".into(), json!(config.seed));
    }
    Ok(Output {
        status: if summary.violations > 0 {
            Status::BoundViolation
        } else {
            Status::Success
        },
        ..Output::ok(json, table)
    })
}

fn read_terms(path: &Path) -> Result<std::collections::BTreeSet<PauliString>> {
    let text = std::fs::read_to_string(path)?;
    let terms = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(str::parse)
        .collect::<Result<std::collections::BTreeSet<PauliString>>>()?;
    if terms.is_empty() {
        return Err(Error::Empty("term list"));
    }
    Ok(terms)
}

fn cmd_partition(
    scenario_spec: Option<&str>,
    terms: Option<&Path>,
    greedy: bool,
) -> Result<Output> {
    let (partition, method, required) = match (scenario_spec, terms) {
        (_, Some(path)) => {
            let terms = read_terms(path)?;
            let partition = if greedy {
                greedy_clique_cover(&terms)?
            } else {
                clique_cover(&terms)?
            };
            let method = if greedy || terms.len() > crate::monogamy::MAX_EXACT_COVER_TERMS {
                "greedy"
            } else {
                "exact"
            };
            (partition, method, terms)
        }
        (Some(spec), None) => {
            let (scenario, partition) = parse_scenario_spec(spec)?;
            let required = crate::monogamy::required_terms(&scenario);
            if greedy {
                (greedy_clique_cover(&required)?, "greedy", required)
            } else {
                (partition, "construction", required)
            }
        }
        (None, None) => return Err(Error::Parse("give a scenario or --terms <file>".into())),
    };
    partition.certify(&required)?;

    let mut table = partition.to_text();
    let _ = writeln!(table, "# sets: {}", partition.bound());
    let _ = writeln!(table, "# method: {method}");
    let _ = writeln!(table, "# certified: true");
    let sets: Vec<Vec<String>> = partition
        .sets()
        .iter()
        .map(|s| s.elements().iter().map(ToString::to_string).collect())
        .collect();
    let json = json!({
        "n_qubits": partition.n_qubits(),
        "method": method,
        "sets": sets,
        "set_count": partition.bound(),
        "bound": partition.bound(),
        "certified": true,
    });
    Ok(Output::ok(json, table))
}

fn cmd_curve(m: usize, points: usize, config: &RunConfig) -> Result<Output> {
    if m == 0 {
        return Err(Error::OutOfRange("curve needs M >= 1".into()));
    }
    if points < 2 {
        return Err(Error::OutOfRange("curve needs at least 2 points".into()));
    }
    let budget = config.budget(Budget::default());
    let ab: Vec<usize> = (0..=m).collect();
    let ac: Vec<usize> = std::iter::once(0).chain(m + 1..=2 * m).collect();
    let rows = (0..points)
        .into_par_iter()
        .map(|i| {
            let alpha = std::f64::consts::FRAC_PI_2 * i as f64 / (points - 1) as f64;
            let state = psi_mono(m, alpha)?;
            let (lab, lac) = tight_prediction(m, alpha);
            let mab = maximize_bell(&state, &ab, Functional::General, &budget)?.value;
            let mac = maximize_bell(&state, &ac, Functional::General, &budget)?.value;
            Ok([alpha, lab, mab * mab, lac, mac * mac])
        })
        .collect::<Result<Vec<_>>>()?;

    let header = "alpha,lab_predicted,lab_measured,lac_predicted,lac_measured";
    let mut csv = format!("{header}\n");
    for row in &rows {
        let line: Vec<String> = row.iter().map(|x| format_float(*x)).collect();
        let _ = writeln!(csv, "{}", line.join(","));
    }
    let json = Value::Array(
        rows.iter()
            .map(|r| {
                let mut map = Map::new();
                for (key, v) in header.split(',').zip(r) {
                    map.insert(key.into(), json!(v));
                }
                Value::Object(map)
            })
            .collect(),
    );
    Ok(Output {
        csv: Some(csv.clone()),
        ..Output::ok(json, csv)
    })
}

#[derive(Debug, Deserialize)]
struct CoeffFile {
    parties: Option<usize>,
    terms: Vec<CoeffTerm>,
}

#[derive(Debug, Deserialize)]
struct CoeffTerm {
    k: Vec<u8>,
    c: f64,
}

fn cmd_oracle(inequality: Option<&str>, coeffs: Option<&Path>) -> Result<Output> {
    let (name, parties, coefficients) = match (inequality, coeffs) {
        (_, Some(path)) => {
            let file: CoeffFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let first = file.terms.first().ok_or(Error::Empty("coefficient list"))?;
            let parties = file.parties.unwrap_or(first.k.len());
            let mut map = std::collections::BTreeMap::new();
            for t in file.terms {
                *map.entry(t.k).or_insert(0.0) += t.c;
            }
            (path.display().to_string(), parties, map)
        }
        (Some(name), None) => match name.to_ascii_lowercase().as_str() {
            "chsh" => ("chsh".to_string(), 2, chsh_coefficients()),
            "mermin" => ("mermin".to_string(), 3, mermin_coefficients()),
            other => return Err(Error::Parse(format!("unknown inequality {other:?}"))),
        },
        (None, None) => {
            return Err(Error::Parse(
                "give an inequality name or --coeffs <file>".into(),
            ))
        }
    };
    if parties > MAX_LHV_PARTIES {
        return Err(Error::OutOfRange(format!(
            "{parties} parties; enumeration supports at most {MAX_LHV_PARTIES}"
        )));
    }
    let bound = lhv_bound_bruteforce(&coefficients, parties)?;
    let norm = coefficients.values().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Parse("all coefficients are zero".into()));
    }
    let normalized = bound / norm;
    let strategies = 1u64 << (2 * parties);

    let mut table = String::new();
    let _ = writeln!(table, "inequality        {name}");
    let _ = writeln!(table, "parties           {parties}");
    let _ = writeln!(table, "strategies        {strategies}");
    let _ = writeln!(table, "classical bound   {}", format_float(bound));
    let _ = writeln!(table, "normalized bound  {}", format_float(normalized));
    let json = json!({
        "inequality": name,
        "parties": parties,
        "terms": coefficients.len(),
        "strategies": strategies,
        "classical_bound": bound,
        "normalized_bound": normalized,
    });
    Ok(Output::ok(json, table))
}

fn cmd_state(spec: &str, output: Option<&Path>) -> Result<Output> {
    let state = parse_state_spec(spec)?;
    let json = serde_json::to_value(state.to_file())?;
    let table = format!("{}\n", state.to_json()?);
    if let Some(path) = output {
        state.write_json(path)?;
        let note = format!("wrote {} qubits to {}\n", state.n_qubits(), path.display());
        return Ok(Output::ok(
            json!({ "written": path.display().to_string(), "n_qubits": state.n_qubits() }),
            note,
        ));
    }
    Ok(Output::ok(json, table))
}
