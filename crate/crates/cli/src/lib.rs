// SPDX-License-Identifier: Apache-2.0

//! Argument handling and report rendering for the `strongcomp` binary.
//!
//! Every command produces a [`Report`] with the fields `command`, `inputs`,
//! `results`, `residuals` and `verdict`. JSON output sorts keys and rounds
//! floats to 12 significant digits, so identical inputs give identical
//! bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use strongcomp::diagram::{self, Diagram};
use strongcomp::models::{enumerate_phase_group, load_model, ModelCatalogEntry};
use strongcomp::nonlocality::{
    correlation_class, ghz_state, mermin_report, setting_distribution_bruteforce, CorrelationClass, LhvOptions,
    DEFAULT_SEARCH_CAP,
};
use strongcomp::{Error, MerminScenario, PhaseAngles, SemiTensor, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RewriteTarget {
    NormalForm,
    Fused,
}

#[derive(Debug, Parser)]
#[command(name = "strongcomp", version, about = "Check strongly complementary observables and Mermin arguments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Numerical tolerance; boolean models are always checked exactly.
    #[arg(long, env = "STRONGCOMP_TOL", default_value_t = DEFAULT_TOL, global = true)]
    pub tol: f64,
    /// Threads for the hidden-variable search.
    #[arg(long, default_value_t = 1, global = true)]
    pub workers: usize,
    /// Seed for randomised checks.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Law, coherence, complementarity and bialgebra checks on a model's pair.
    CheckPair {
        #[arg(long)]
        model: String,
    },
    /// GHZ state of a model and the statistics of one phase setting.
    Ghz {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 3)]
        parties: usize,
        /// Phase angles in turns for every party, e.g. `0,1/4`. Repeat per
        /// party or give once for all.
        #[arg(long = "phase")]
        phases: Vec<String>,
    },
    /// Full Mermin report for a scenario file.
    Mermin {
        #[arg(long)]
        scenario: PathBuf,
        /// Defaults to the group model of the scenario.
        #[arg(long)]
        model: Option<String>,
    },
    /// Rewrite a diagram file.
    Rewrite {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long, value_enum)]
        to: RewriteTarget,
        /// Model in which the rewrite is checked by evaluation.
        #[arg(long)]
        model: Option<String>,
    },
    /// Phase group of a model's structure.
    Phasegroup {
        #[arg(long)]
        model: String,
    },
    /// List the available models.
    Catalog,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub residuals: BTreeMap<String, f64>,
    pub verdict: String,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        let v = json!({
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "residuals": self.residuals,
            "verdict": self.verdict,
        });
        let mut s = serde_json::to_string_pretty(&round_floats(v)).expect("values serialise");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}: {}", self.command, self.verdict);
        if let Value::Object(m) = &self.results {
            for (k, v) in m {
                let _ = writeln!(s, "  {k}: {}", text_value(v));
            }
        }
        if !self.residuals.is_empty() {
            let _ = writeln!(s, "  residuals:");
            for (k, r) in &self.residuals {
                let _ = writeln!(s, "    {k}: {}", sig12(*r));
            }
        }
        s
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), sig12),
        other => round_floats(other.clone()).to_string(),
    }
}

/// Rounds to 12 significant digits; scientific notation outside
/// `[1e-4, 1e12)`.
fn sig12(x: f64) -> String {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 || (1e-4..1e12).contains(&r.abs()) {
        r.to_string()
    } else {
        format!("{r:e}")
    }
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("checked");
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_floats(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

/// Result of one invocation: exit code and the text for each stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => Outcome {
            code: report.exit_code,
            stdout: match cli.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            },
            stderr: String::new(),
        },
        Err(e) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

pub fn execute(cli: &Cli) -> Result<Report, Error> {
    if !(cli.tol >= 0.0) {
        return Err(Error::Parse(format!("tolerance must be non-negative, got {}", cli.tol)));
    }
    match &cli.command {
        Command::CheckPair { model } => check_pair(model, cli.tol),
        Command::Ghz { model, parties, phases } => ghz(model, *parties, phases, cli.tol),
        Command::Mermin { scenario, model } => mermin(scenario, model.as_deref(), cli),
        Command::Rewrite { diagram, to, model } => rewrite(diagram, *to, model.as_deref(), cli.tol),
        Command::Phasegroup { model } => phasegroup(model, cli.tol),
        Command::Catalog => Ok(catalog()),
    }
}

fn tol_for(entry: &ModelCatalogEntry, tol: f64) -> f64 {
    if entry.semiring.is_boolean() {
        0.0
    } else {
        tol
    }
}

fn pair_of(entry: &ModelCatalogEntry) -> Result<&strongcomp::ObservablePair, Error> {
    entry
        .pair
        .as_ref()
        .ok_or_else(|| Error::UnknownModel(format!("{} provides no pair of observables", entry.name)))
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn check_pair(model: &str, tol: f64) -> Result<Report, Error> {
    let entry = load_model(model)?;
    let tol = tol_for(&entry, tol);
    let pair = pair_of(&entry)?;
    let sc = pair.check_strong_complementarity(tol)?;
    let mut residuals: BTreeMap<String, f64> = sc.equations.iter().map(|e| (e.name.clone(), e.residual)).collect();
    let mut results = Map::new();
    results.insert("coherent".into(), json!(sc.coherent));
    results.insert("complementary".into(), json!(sc.complementary));
    results.insert("strongly_complementary".into(), json!(sc.strongly_complementary));
    if sc.strongly_complementary {
        let k = pair.extract_subgroup_k(tol)?;
        let exponent = k.group.exponent() as usize;
        results.insert("subgroup_k".into(), json!(k.group.canonical().to_string()));
        results.insert("exponent".into(), json!(exponent));
        // Smallest number of parallel wires that disconnect.
        let mut order_hopf_k = None;
        for n in 1..=exponent.max(pair.dim()) {
            let check = pair.check_order_hopf(n, tol)?;
            if check.holds {
                residuals.insert("order hopf".into(), check.residual);
                order_hopf_k = Some(n);
                break;
            }
        }
        results.insert("order_hopf_k".into(), json!(order_hopf_k));
    }
    let verdict = if sc.strongly_complementary {
        "strongly complementary"
    } else if sc.complementary {
        "complementary, not strongly complementary"
    } else if sc.coherent {
        "coherent, not complementary"
    } else {
        "not coherent"
    };
    Ok(Report {
        command: "check-pair".into(),
        inputs: json!({"model": entry.name, "tol": tol}),
        results: Value::Object(results),
        residuals,
        verdict: verdict.into(),
        exit_code: if sc.strongly_complementary { EXIT_OK } else { EXIT_VERIFICATION },
    })
}

fn class_name(c: CorrelationClass) -> String {
    match c {
        CorrelationClass::Uncorrelated => "uncorrelated".into(),
        CorrelationClass::ParityCorrelated(i) => format!("parity-correlated({i})"),
        CorrelationClass::Other => "other".into(),
    }
}

fn ghz(model: &str, parties: usize, phases: &[String], tol: f64) -> Result<Report, Error> {
    let entry = load_model(model)?;
    let pair = pair_of(&entry)?;
    let g = pair
        .group()
        .cloned()
        .ok_or_else(|| Error::UnknownModel(format!("{} is not built from a group", entry.name)))?;
    if parties == 0 {
        return Err(Error::InvalidScenario("at least one party is needed".into()));
    }
    let angles: Vec<PhaseAngles> = match phases.len() {
        0 => vec![PhaseAngles::zero(g.order()); parties],
        1 => vec![parse_phase(&phases[0])?; parties],
        n if n == parties => phases.iter().map(|p| parse_phase(p)).collect::<Result<_, _>>()?,
        n => return Err(Error::InvalidScenario(format!("{n} phase vectors for {parties} parties"))),
    };
    let mut measurements = BTreeMap::new();
    let mut setting = Vec::new();
    for (k, a) in angles.iter().enumerate() {
        measurements.insert(format!("m{k}"), a.clone());
        setting.push(format!("m{k}"));
    }
    let scenario = MerminScenario { group: g.clone(), parties, measurements, control: setting.clone(), variations: vec![] };
    scenario.validate()?;
    let state = ghz_state(pair, parties)?;
    let dist = setting_distribution_bruteforce(pair, &scenario, &setting)?;
    let class = correlation_class(pair, &scenario.setting_angles(&setting)?, tol)?;
    let amplitudes: Vec<Value> = nonzero_entries(&state, tol);
    let support: Vec<Value> = dist.support().into_iter().map(|t| json!({"outcome": t, "p": dist.get(&t)})).collect();
    Ok(Report {
        command: "ghz".into(),
        inputs: json!({
            "model": entry.name,
            "parties": parties,
            "phases": angles.iter().map(|a| serde_json::to_value(a).expect("angles serialise")).collect::<Vec<_>>(),
        }),
        results: json!({"amplitudes": amplitudes, "support": support, "class": class_name(class)}),
        residuals: BTreeMap::new(),
        verdict: class_name(class),
        exit_code: EXIT_OK,
    })
}

fn parse_phase(s: &str) -> Result<PhaseAngles, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    PhaseAngles::parse(&parts)
}

fn nonzero_entries(t: &SemiTensor, tol: f64) -> Vec<Value> {
    let dims = t.out_dims().to_vec();
    t.data()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > tol)
        .map(|(i, z)| {
            let mut idx = vec![0; dims.len()];
            let mut rest = i;
            for k in (0..dims.len()).rev() {
                idx[k] = rest % dims[k];
                rest /= dims[k];
            }
            json!({"index": idx, "re": z.re, "im": z.im})
        })
        .collect()
}

fn mermin(path: &Path, model: Option<&str>, cli: &Cli) -> Result<Report, Error> {
    let scenario = MerminScenario::from_json(&read(path)?)?;
    let name = model.map_or_else(|| format!("fhilb:{}", scenario.group), str::to_string);
    let entry = load_model(&name)?;
    let pair = pair_of(&entry)?;
    let tol = tol_for(&entry, cli.tol);
    let options = LhvOptions { cap: DEFAULT_SEARCH_CAP, workers: cli.workers.max(1) };
    let r = mermin_report(pair, &scenario, options, tol)?;
    let c = &r.conditions;
    let mut residuals = BTreeMap::new();
    residuals.insert("party symmetry".into(), r.max_symmetry_residual);
    if let Some(x) = r.max_cross_check_residual {
        residuals.insert("closed form vs tensor".into(), x);
    }
    let settings: Vec<Value> = r
        .settings
        .iter()
        .map(|s| json!({"setting": s.setting.join(""), "class": class_name(s.class), "support_size": s.support.len()}))
        .collect();
    let lhv = if r.lhv.is_feasible() { "feasible" } else { "infeasible" };
    let witness = r.lhv.witness.as_ref().map(|w| {
        w.iter().map(|h| json!({"party": h.party, "measurement": h.measurement, "outcome": h.outcome})).collect::<Vec<_>>()
    });
    let results = json!({
        "conditions": if c.passes { "pass" } else { "fail" },
        "multiplicities_divisible": c.multiplicities_divisible,
        "settings_parity_correlated": c.settings_parity_correlated,
        "control_point": c.control_point,
        "variations_point": c.variations_point,
        "points_distinct": c.points_distinct,
        "exponent": c.exponent,
        "lhv": lhv,
        "states_examined": r.lhv.states_examined,
        "witness": witness,
        "parity_values": r.parity_values,
        "settings": settings,
        "consistent": r.consistent,
    });
    let verdict = match (c.passes, r.lhv.is_feasible()) {
        (true, false) => "nonlocal: conditions pass and no hidden state exists",
        (false, true) => "local: conditions fail and a hidden state exists",
        (true, true) => "inconsistent: conditions pass but a hidden state exists",
        (false, false) => "nonlocal without the conditions: no hidden state exists",
    };
    let within = residuals.values().all(|&x| x <= tol);
    Ok(Report {
        command: "mermin".into(),
        inputs: json!({"scenario": path.file_name().map(|f| f.to_string_lossy().into_owned()), "model": entry.name}),
        results,
        residuals,
        verdict: verdict.into(),
        exit_code: if r.consistent && within { EXIT_OK } else { EXIT_VERIFICATION },
    })
}

fn rewrite(path: &Path, to: RewriteTarget, model: Option<&str>, tol: f64) -> Result<Report, Error> {
    let d = diagram::from_json(&read(path)?)?;
    let out: Diagram = match to {
        RewriteTarget::Fused => diagram::fuse_spiders(&d)?,
        RewriteTarget::NormalForm => diagram::to_bialgebra_normal_form(&d)?,
    };
    let mut residuals = BTreeMap::new();
    let mut results = Map::new();
    results.insert("diagram".into(), serde_json::to_value(diagram::DiagramJson::from_diagram(&out))?);
    results.insert("nodes_before".into(), json!(d.node_count()));
    results.insert("nodes_after".into(), json!(out.node_count()));
    if matches!(to, RewriteTarget::NormalForm) {
        results.insert("three_layered".into(), json!(diagram::is_three_layered(&out)));
    }
    let mut exit_code = EXIT_OK;
    let mut verdict = "rewritten".to_string();
    let mut inputs = json!({"diagram": path.file_name().map(|f| f.to_string_lossy().into_owned()), "to": match to {
        RewriteTarget::Fused => "fused",
        RewriteTarget::NormalForm => "normal-form",
    }});
    if let Some(m) = model {
        let entry = load_model(m)?;
        let pair = pair_of(&entry)?;
        let tol = tol_for(&entry, tol);
        let a = diagram::evaluate(&d, pair)?;
        let b = diagram::evaluate(&out, pair)?;
        let p = SemiTensor::proportionality(&a, &b)?;
        residuals.insert("evaluation".into(), p.residual);
        let holds = p.holds(tol);
        results.insert("equal_up_to_scalar".into(), json!(holds));
        inputs["model"] = json!(entry.name);
        if holds {
            verdict = "rewritten; evaluation agrees up to scalar".into();
        } else {
            verdict = "rewritten; evaluation differs".into();
            exit_code = EXIT_VERIFICATION;
        }
    }
    Ok(Report { command: "rewrite".into(), inputs, results: Value::Object(results), residuals, verdict, exit_code })
}

fn phasegroup(model: &str, tol: f64) -> Result<Report, Error> {
    let entry = load_model(model)?;
    let tol = tol_for(&entry, tol);
    let (structure, candidates): (_, Option<Vec<SemiTensor>>) = if let Some(pair) = &entry.pair {
        // Scaled gray points inside the white structure.
        let c = pair.unit_scalar();
        let pts = pair.gray().classical_points()?.iter().map(|p| p.scale(c)).collect();
        (pair.white().clone(), Some(pts))
    } else {
        (entry.structures[0].clone(), entry.phase_candidates.clone())
    };
    let pg = enumerate_phase_group(&structure, candidates.as_deref(), tol)?;
    let name = pg.group.to_string();
    Ok(Report {
        command: "phasegroup".into(),
        inputs: json!({"model": entry.name}),
        results: json!({
            "group": name,
            "order": pg.elements.len(),
            "identity": pg.identity,
            "table": pg.table,
            "gates_unitary": pg.gates_unitary,
        }),
        residuals: BTreeMap::new(),
        verdict: name,
        exit_code: EXIT_OK,
    })
}

fn catalog() -> Report {
    let rows: Vec<Value> = strongcomp::models::catalog()
        .into_iter()
        .map(|c| json!({"name": c.name, "semiring": c.semiring, "description": c.description}))
        .collect();
    let names: Vec<String> = strongcomp::models::catalog().into_iter().map(|c| c.name).collect();
    Report {
        command: "catalog".into(),
        inputs: json!({}),
        results: json!({"models": rows}),
        residuals: BTreeMap::new(),
        verdict: names.join(", "),
        exit_code: EXIT_OK,
    }
}
