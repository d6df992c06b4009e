//! Command-line front end.
//!
//! Every subcommand takes its parameters from flags, from a TOML config file
//! (`--config`), or both, with flags taking precedence. A config file may be
//! a flat table of parameters or hold one table per subcommand.
//!
//! Results are written as CSV (a `#` comment line with the effective
//! parameters, a header row, then data) or as a JSON document
//! `{command, config, result}`. Exit codes: 0 success, 2 invalid parameters,
//! 3 numerical failure, 4 I/O failure; failures also print a JSON error
//! record on stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::crossing::{self, LzParams, ParabolicParams};
use crate::field_mapping::{self, LabFields};
use crate::interferometer::{self, InterferometerConfig, Sweep};
use crate::lift::{lift, TwoLevelPropagator};
use crate::linalg::Matrix;
use crate::oracle::{self, EndpointBasis, HamiltonianSpec, IntegrationWindow, OracleOptions};
use crate::report;
use crate::spinor_gp::{self, SmaState};
use crate::{Complex64, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "spinorlz", version, about = "Level-crossing interferometry in spinor condensates")]
pub struct Cli {
    /// TOML file with parameters; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Single Landau-Zener crossing: R, φ, Zener time, propagator.
    Lz(LzArgs),
    /// Parabolic double crossing in the independent-crossing approximation.
    Parabolic(ParabolicArgs),
    /// Lift an SU(2) propagator to 2F+1 levels.
    Lift(LiftArgs),
    /// Brute-force Schrödinger integration and comparison with the ICA.
    Oracle(OracleArgs),
    /// Spin-1 single-mode dynamics and the phase propagator between crossings.
    Gp(GpArgs),
    /// Three-arm interferometer propagator and output population.
    Interferometer(InterferometerArgs),
    /// Laboratory fields to dimensionless parameters.
    MapFields(MapFieldsArgs),
    /// Fringe scan of the |1⟩ → |−1⟩ population.
    Scan(ScanArgs),
    /// Reproduction report of the published numbers.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Lz(_) => "lz",
            Command::Parabolic(_) => "parabolic",
            Command::Lift(_) => "lift",
            Command::Oracle(_) => "oracle",
            Command::Gp(_) => "gp",
            Command::Interferometer(_) => "interferometer",
            Command::MapFields(_) => "map-fields",
            Command::Scan(_) => "scan",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct LzArgs {
    /// Adiabaticity parameter Λ = V²/(ħλ).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Sweep rate λ of the diabatic detuning.
    #[arg(long)]
    pub slope: Option<f64>,
    /// Coupling V.
    #[arg(long)]
    pub coupling: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ParabolicArgs {
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct LiftArgs {
    /// Number of levels 2F+1.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Lift the Landau-Zener propagator with this Λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Lift the double-crossing composite for (eps, mu).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub alpha_re: Option<f64>,
    #[arg(long)]
    pub alpha_im: Option<f64>,
    #[arg(long)]
    pub beta_re: Option<f64>,
    #[arg(long)]
    pub beta_im: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Parabolic,
    Lz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    Adiabatic,
    Diabatic,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub slope: Option<f64>,
    #[arg(long)]
    pub coupling: Option<f64>,
    /// Window half-width: multiples of τ_c (parabolic) or scaled time (lz).
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// Locate fringe minima along fixed εμ and compare with the ICA.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub minima: Option<bool>,
    #[arg(long)]
    pub eps_mu: Option<f64>,
    #[arg(long)]
    pub mu_from: Option<f64>,
    #[arg(long)]
    pub mu_to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GpArgs {
    /// Species name in the species table (rb87, na23).
    #[arg(long)]
    pub species: Option<String>,
    /// TOML species table replacing the bundled one.
    #[arg(long)]
    pub species_file: Option<PathBuf>,
    /// Density, cm⁻³ (defaults to the species n_max).
    #[arg(long)]
    pub density: Option<f64>,
    /// Duration, s.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Initial populations of m = +1, 0, −1.
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub pm1: Option<f64>,
    /// Initial phases of m = +1, 0, −1.
    #[arg(long)]
    pub phase1: Option<f64>,
    #[arg(long)]
    pub phase0: Option<f64>,
    #[arg(long)]
    pub phasem1: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct InterferometerArgs {
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Derive R, φ and σ from the parabolic model instead.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub theta1: Option<f64>,
    #[arg(long)]
    pub theta_m1: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(deny_unknown_fields)]
pub struct MapFieldsArgs {
    /// Transverse field, G.
    #[arg(long = "Bx")]
    #[serde(rename = "Bx")]
    pub b_x: Option<f64>,
    /// Bias at the midpoint, G.
    #[arg(long = "Bz0")]
    #[serde(rename = "Bz0")]
    pub b_z0: Option<f64>,
    /// Ramp rate at the crossings, G/s.
    #[arg(long = "Bdot")]
    #[serde(rename = "Bdot")]
    pub bdot: Option<f64>,
    #[arg(long = "gF")]
    #[serde(rename = "gF")]
    pub g_f: Option<f64>,
    /// Lab configuration file (B_x_gauss, B_z0_gauss, Bdot_gauss_per_s, g_F).
    #[arg(long = "lab-config")]
    #[serde(rename = "lab-config")]
    pub lab_config: Option<PathBuf>,
    /// Required t_c / t_z.
    #[arg(long)]
    pub margin: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScanArgs {
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub theta1: Option<f64>,
    #[arg(long)]
    pub theta_m1: Option<f64>,
    #[arg(long, value_enum)]
    pub sweep: Option<SweepArg>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepArg {
    Sigma,
    Chi,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ReportArgs {
    /// Skip the Schrödinger-integration checks.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub skip_oracle: Option<bool>,
}

/// Tabular part of a command result.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// Result of one command: a summary record and an optional table.
#[derive(Clone, Debug)]
pub struct Output {
    pub command: &'static str,
    pub config: Value,
    pub record: Value,
    pub table: Option<Table>,
}

impl Output {
    pub fn to_json(&self) -> Value {
        let mut result = self.record.clone();
        if let (Some(table), Value::Object(map)) = (&self.table, &mut result) {
            map.insert("table".into(), serde_json::to_value(table).unwrap_or(Value::Null));
        }
        json!({ "command": self.command, "config": self.config, "result": result })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# command=");
        out.push_str(self.command);
        for (k, v) in flatten(&self.config) {
            out.push(' ');
            out.push_str(&k);
            out.push('=');
            out.push_str(&cell(&v));
        }
        out.push('\n');
        let (columns, rows) = match &self.table {
            Some(t) => (t.columns.clone(), t.rows.clone()),
            None => {
                let flat = flatten(&self.record);
                (
                    flat.iter().map(|(k, _)| k.clone()).collect(),
                    vec![flat.into_iter().map(|(_, v)| v).collect()],
                )
            }
        };
        out.push_str(&columns.join(","));
        out.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).unwrap_or_default();
                s.push('\n');
                s
            }
        }
    }
}

/// Formats a CSV cell; floats use 17 significant digits.
fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => format!("{f:.16e}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(v: &Value) -> Vec<(String, Value)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, child, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), child, out);
                }
            }
            _ => out.push((prefix.to_string(), v.clone())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn f(x: f64) -> Value {
    json!(x)
}

/// Reads a TOML config file into a JSON object for `command`.
fn config_table(path: &Path, command: &str) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)?;
    let table: toml::Table = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let table = match table.get(command) {
        Some(toml::Value::Table(t)) => t.clone(),
        _ => table.into_iter().filter(|(_, v)| !v.is_table()).collect(),
    };
    match serde_json::to_value(table).map_err(|e| Error::Config(e.to_string()))? {
        Value::Object(map) => Ok(map),
        _ => Ok(Map::new()),
    }
}

/// Overlays flag values (non-null) onto the config-file values.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<Map<String, Value>>) -> Result<T> {
    let mut base = file.unwrap_or_default();
    if let Value::Object(over) = to_value(flags) {
        for (k, v) in over {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| Error::Config(e.to_string()))
}

fn require<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required parameter --{name}")))
}

fn drop_nulls(v: Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(map.into_iter().filter(|(_, v)| !v.is_null()).collect()),
        other => other,
    }
}

fn matrix_table(m: &Matrix) -> Table {
    let mut rows = Vec::new();
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let z = m[(i, j)];
            rows.push(vec![json!(i), json!(j), f(z.re), f(z.im), f(z.norm_sqr())]);
        }
    }
    Table {
        columns: ["row", "col", "re", "im", "abs2"].map(String::from).to_vec(),
        rows,
    }
}

fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn run_lz(a: &LzArgs) -> Result<(Value, Option<Table>)> {
    let (lambda, zener) = match a.lambda {
        Some(l) => (l, None),
        None => {
            let p = LzParams::with_hbar(
                require(a.slope, "slope")?,
                require(a.coupling, "coupling")?,
                a.hbar.unwrap_or(1.0),
            )?;
            (p.lambda(), Some(crossing::zener_time_lz(&p)))
        }
    };
    let u = crossing::lz_propagator(lambda)?;
    let mut record = json!({
        "Lambda": lambda,
        "R": crossing::lz_amplitude(lambda)?,
        "phi": crossing::lz_phase(lambda)?,
        "regime": crossing::Regime::from_lambda(lambda).as_str(),
        "alpha": complex(u.alpha),
        "beta": complex(u.beta),
        "P_transition": u.transition_probability(),
    });
    if let Some(z) = zener {
        record["zener_time"] = f(z.time);
    }
    Ok((record, Some(matrix_table(&u.matrix()))))
}

fn run_parabolic(a: &ParabolicArgs) -> Result<(Value, Option<Table>)> {
    let p = ParabolicParams::new(require(a.eps, "eps")?, require(a.mu, "mu")?)?;
    let d = crossing::crossing_diagnostics(&p);
    let u = crossing::composite_alpha_beta(&p)?;
    let record = json!({
        "Lambda": p.lambda(),
        "R": crossing::lz_amplitude(p.lambda())?,
        "phi": crossing::lz_phase(p.lambda())?,
        "sigma": crossing::dynamical_phase_sigma(&p)?,
        "tau_c": d.tau_c,
        "tau_z": d.tau_z,
        "ica_margin": d.ica_margin,
        "ica_ok": d.ica_ok(crossing::ICA_WARN_MARGIN),
        "regime": d.regime.as_str(),
        "alpha": complex(u.alpha),
        "beta": complex(u.beta),
        "P_1_to_2": crossing::transition_prob_2level(&p)?,
        "P_1_to_3": crossing::transition_prob_1_to_3(&p)?,
    });
    Ok((record, Some(matrix_table(&lift(&u, 3)?))))
}

fn run_lift(a: &LiftArgs) -> Result<(Value, Option<Table>)> {
    let levels = require(a.levels, "levels")?;
    let pair = if let Some(l) = a.lambda {
        crossing::lz_propagator(l)?
    } else if let (Some(eps), Some(mu)) = (a.eps, a.mu) {
        crossing::composite_alpha_beta(&ParabolicParams::new(eps, mu)?)?
    } else {
        TwoLevelPropagator::new(
            Complex64::new(require(a.alpha_re, "alpha-re")?, a.alpha_im.unwrap_or(0.0)),
            Complex64::new(require(a.beta_re, "beta-re")?, a.beta_im.unwrap_or(0.0)),
        )?
    };
    let m = lift(&pair, levels)?;
    let record = json!({
        "levels": levels,
        "alpha": complex(pair.alpha),
        "beta": complex(pair.beta),
        "unitarity_defect": m.unitarity_defect(),
    });
    Ok((record, Some(matrix_table(&m))))
}

fn run_oracle(a: &OracleArgs) -> Result<(Value, Option<Table>)> {
    let levels = a.levels.unwrap_or(2);
    let rel_tol = a.rel_tol.unwrap_or(oracle::DEFAULT_REL_TOL);
    let basis = match a.basis.unwrap_or(BasisArg::Adiabatic) {
        BasisArg::Adiabatic => EndpointBasis::Adiabatic,
        BasisArg::Diabatic => EndpointBasis::Diabatic,
    };
    let window_multiples = a.window.unwrap_or(oracle::DEFAULT_WINDOW_MULTIPLES);

    if a.minima.unwrap_or(false) {
        let settings = oracle::FringeScanSettings {
            eps_mu: require(a.eps_mu, "eps-mu")?,
            mu_min: require(a.mu_from, "mu-from")?,
            mu_max: require(a.mu_to, "mu-to")?,
            points: a.points.unwrap_or(31),
            levels,
            window_multiples: a.window.unwrap_or(4.0),
            rel_tol,
        };
        let minima = oracle::fringe_minima_scan(&settings)?;
        let worst = minima.iter().map(|m| m.period_fraction.abs()).fold(0.0, f64::max);
        let rows = minima
            .iter()
            .map(|m| vec![f(m.mu), f(m.sigma_oracle), f(m.sigma_ica), f(m.p_oracle), f(m.period_fraction)])
            .collect();
        let record = json!({ "minima": minima.len(), "max_abs_period_fraction": worst });
        let table = Table {
            columns: ["mu", "sigma_oracle", "sigma_ica", "P_oracle", "period_fraction"]
                .map(String::from)
                .to_vec(),
            rows,
        };
        return Ok((record, Some(table)));
    }

    let opts = OracleOptions {
        rel_tol,
        basis,
        ..OracleOptions::default()
    };
    match a.model.unwrap_or(ModelKind::Parabolic) {
        ModelKind::Parabolic => {
            let p = ParabolicParams::new(require(a.eps, "eps")?, require(a.mu, "mu")?)?;
            let spec = HamiltonianSpec::parabolic(p, levels)?;
            let window = IntegrationWindow::around_crossings(&p, window_multiples)?;
            let initial = crate::StateVector::basis(levels, 0)?;
            let r = oracle::integrate_with(&spec, &window, &initial, &opts)?;
            let p_ica = oracle::ica_end_to_end_probability(&p, levels)?;
            let p_oracle = r.populations[levels - 1];
            let diag = crossing::crossing_diagnostics(&p);
            let record = json!({
                "levels": levels,
                "sigma": crossing::dynamical_phase_sigma(&p)?,
                "P_oracle": p_oracle,
                "P_ica": p_ica,
                "abs_error": (p_oracle - p_ica).abs(),
                "ica_margin": diag.ica_margin,
                "ica_flagged": !diag.ica_ok(crossing::ICA_WARN_MARGIN),
                "norm_drift": r.norm_drift,
                "step_count": r.step_count,
                "window": to_value(&window),
            });
            Ok((record, Some(population_table(&r.populations))))
        }
        ModelKind::Lz => {
            let lz = LzParams::new(require(a.slope, "slope")?, require(a.coupling, "coupling")?)?;
            let spec = HamiltonianSpec::landau_zener(lz, levels)?;
            let window = IntegrationWindow::symmetric(a.window.unwrap_or(200.0))?;
            let r = oracle::integrate_with(&spec, &window, &crate::StateVector::basis(levels, 0)?, &opts)?;
            let lifted = lift(&crossing::lz_propagator(lz.lambda())?, levels)?;
            let max_error = (0..levels)
                .map(|k| (lifted[(k, 0)].norm_sqr() - r.populations[k]).abs())
                .fold(0.0, f64::max);
            let record = json!({
                "levels": levels,
                "Lambda": lz.lambda(),
                "max_abs_error": max_error,
                "norm_drift": r.norm_drift,
                "step_count": r.step_count,
                "window": to_value(&window),
            });
            Ok((record, Some(population_table(&r.populations))))
        }
    }
}

fn population_table(pops: &[f64]) -> Table {
    Table {
        columns: vec!["level".into(), "population".into()],
        rows: pops.iter().enumerate().map(|(k, &p)| vec![json!(k), f(p)]).collect(),
    }
}

fn run_gp(a: &GpArgs) -> Result<(Value, Option<Table>)> {
    let name = a.species.clone().unwrap_or_else(|| "rb87".into());
    let species = match &a.species_file {
        Some(path) => spinor_gp::parse_species_table(&std::fs::read_to_string(path)?)?
            .remove(&name.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidParameter(format!("species {name} not in {}", path.display())))?,
        None => spinor_gp::default_species(&name)?,
    };
    let density = a.density.unwrap_or(species.n_max);
    let third = 1.0 / 3.0;
    let state = SmaState::from_populations(
        [a.p1.unwrap_or(third), a.p0.unwrap_or(third), a.pm1.unwrap_or(third)],
        [a.phase1.unwrap_or(0.0), a.phase0.unwrap_or(0.4), a.phasem1.unwrap_or(0.0)],
        density,
    )?;
    let duration = a.duration.unwrap_or(24e-6);
    let traj = spinor_gp::integrate_sma(&state, &species, duration, a.rel_tol.unwrap_or(1e-12))?;
    let (ls, la) = spinor_gp::coupling_constants(&species)?;
    let gp = spinor_gp::extract_gp_propagator(&traj)?;
    let record = json!({
        "species": name,
        "lambda_s": ls,
        "lambda_a": la,
        "gamma": traj.gamma,
        "theta1": gp.phases.theta1,
        "theta_m1": gp.phases.theta_m1,
        "max_population_change": traj.max_population_change(),
        "max_norm_drift": traj.max_norm_drift,
        "max_magnetization_drift": traj.max_magnetization_drift,
        "rate_bound_holds": traj.max_rate_bound_excess <= 0.0,
        "steps": traj.states.len() - 1,
    });
    let rows = traj
        .states
        .iter()
        .map(|s| {
            let p = s.populations();
            vec![f(s.time), f(p[0]), f(p[1]), f(p[2])]
        })
        .collect();
    let table = Table {
        columns: ["time", "N1", "N0", "Nm1"].map(String::from).to_vec(),
        rows,
    };
    Ok((record, Some(table)))
}

fn interferometer_config(
    r: Option<f64>,
    phi: Option<f64>,
    sigma: Option<f64>,
    eps: Option<f64>,
    mu: Option<f64>,
    theta1: Option<f64>,
    theta_m1: Option<f64>,
) -> Result<InterferometerConfig> {
    let phases = spinor_gp::GpPhases {
        theta1: theta1.unwrap_or(0.0),
        theta_m1: theta_m1.unwrap_or(0.0),
    };
    if let (Some(eps), Some(mu)) = (eps, mu) {
        let base = InterferometerConfig::from_parabolic(&ParabolicParams::new(eps, mu)?, phases)?;
        return Ok(InterferometerConfig {
            r: r.unwrap_or(base.r),
            phi: phi.unwrap_or(base.phi),
            sigma: sigma.unwrap_or(base.sigma),
            ..base
        });
    }
    InterferometerConfig::new(
        require(r, "R")?,
        require(phi, "phi")?,
        sigma.unwrap_or(0.0),
        phases.theta1,
        phases.theta_m1,
    )
}

fn run_interferometer(a: &InterferometerArgs) -> Result<(Value, Option<Table>)> {
    let c = interferometer_config(a.r, a.phi, a.sigma, a.eps, a.mu, a.theta1, a.theta_m1)?;
    let (chi, psi) = interferometer::chi_psi(&c);
    let u = interferometer::total_propagator(&c)?;
    let record = json!({
        "R": c.r,
        "phi": c.phi,
        "sigma": c.sigma,
        "theta1": c.theta1,
        "theta_m1": c.theta_m1,
        "chi": chi,
        "psi": psi,
        "P_1_to_m1": interferometer::population_1_to_m1(&c)?,
        "P_1_to_m1_composed": u[(2, 0)].norm_sqr(),
        "prefactor": interferometer::visibility_prefactor(c.r),
    });
    Ok((record, Some(matrix_table(&u))))
}

fn run_map_fields(a: &MapFieldsArgs) -> Result<(Value, Option<Table>)> {
    let fields = match &a.lab_config {
        Some(path) => {
            let base = LabFields::from_toml(&std::fs::read_to_string(path)?)?;
            LabFields::new(
                a.b_x.unwrap_or(base.b_x),
                a.b_z0.unwrap_or(base.b_z0),
                a.bdot.unwrap_or(base.bdot),
                a.g_f.unwrap_or(base.g_f),
            )?
        }
        None => LabFields::new(
            require(a.b_x, "Bx")?,
            require(a.b_z0, "Bz0")?,
            require(a.bdot, "Bdot")?,
            a.g_f.unwrap_or(0.5),
        )?,
    };
    let m = field_mapping::map_fields(&fields)?;
    let check = field_mapping::validate_ica(&m, a.margin.unwrap_or(crossing::ICA_WARN_MARGIN))?;
    let mut record = to_value(&m);
    record["eps"] = f(m.epsilon);
    record["ica"] = to_value(&check);
    record["fields"] = to_value(&fields);
    Ok((record, None))
}

fn run_scan(a: &ScanArgs) -> Result<(Value, Option<Table>)> {
    let c = interferometer_config(a.r, a.phi, None, a.eps, a.mu, a.theta1, a.theta_m1)?;
    let sweep = match a.sweep.unwrap_or(SweepArg::Sigma) {
        SweepArg::Sigma => Sweep::Sigma,
        SweepArg::Chi => Sweep::Chi,
    };
    let grid = interferometer::linspace(
        a.from.unwrap_or(0.0),
        require(a.to, "to")?,
        a.points.unwrap_or(500),
    )?;
    let scan = interferometer::fringe_scan(&c, sweep, &grid)?;
    let rows = grid
        .iter()
        .zip(&scan.chi)
        .zip(&scan.populations)
        .map(|((&g, &chi), &p)| {
            let sigma = match sweep {
                Sweep::Sigma => g,
                Sweep::Chi => c.with_chi(g).sigma,
            };
            vec![f(sigma), f(chi), f(scan.psi), f(p)]
        })
        .collect();
    let record = json!({
        "sweep": sweep.as_str(),
        "R": c.r,
        "phi": c.phi,
        "psi": scan.psi,
        "visibility": scan.visibility,
        "min": scan.min(),
        "max": scan.max(),
        "minima": scan.minima.len(),
        "maxima": scan.maxima.len(),
    });
    let table = Table {
        columns: ["sigma", "chi", "psi", "P"].map(String::from).to_vec(),
        rows,
    };
    Ok((record, Some(table)))
}

fn run_report(a: &ReportArgs) -> Result<(Value, Option<Table>)> {
    let rep = report::reproduction_report(!a.skip_oracle.unwrap_or(false))?;
    let record = json!({ "all_pass": rep.all_pass(), "checks": rep.checks.len() });
    let rows = rep
        .checks
        .iter()
        .map(|c| {
            vec![
                json!(c.name),
                f(c.reference),
                f(c.computed),
                f(c.tolerance),
                json!(c.relation),
                json!(if c.pass { "pass" } else { "fail" }),
            ]
        })
        .collect();
    let table = Table {
        columns: ["check", "reference", "computed", "tolerance", "relation", "status"]
            .map(String::from)
            .to_vec(),
        rows,
    };
    Ok((record, Some(table)))
}

/// Executes a parsed command line and returns its output without writing it.
pub fn execute(cli: &Cli) -> Result<Output> {
    let command = cli.command.name();
    let file = match &cli.config {
        Some(path) => Some(config_table(path, command)?),
        None => None,
    };
    macro_rules! dispatch {
        ($args:expr, $runner:ident) => {{
            let args = merge($args, file)?;
            let (record, table) = $runner(&args)?;
            (drop_nulls(to_value(&args)), record, table)
        }};
    }
    let (config, record, table) = match &cli.command {
        Command::Lz(a) => dispatch!(a, run_lz),
        Command::Parabolic(a) => dispatch!(a, run_parabolic),
        Command::Lift(a) => dispatch!(a, run_lift),
        Command::Oracle(a) => dispatch!(a, run_oracle),
        Command::Gp(a) => dispatch!(a, run_gp),
        Command::Interferometer(a) => dispatch!(a, run_interferometer),
        Command::MapFields(a) => dispatch!(a, run_map_fields),
        Command::Scan(a) => dispatch!(a, run_scan),
        Command::Report(a) => dispatch!(a, run_report),
    };
    Ok(Output {
        command,
        config,
        record,
        table,
    })
}

/// Exit code for an error: 2 invalid input, 3 numerical failure, 4 I/O.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 4,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        4 => "io",
        3 => "numerical",
        _ => "invalid_parameters",
    }
}

/// Runs the command and writes its output; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = execute(cli).and_then(|out| {
        let text = out.render(cli.format);
        match &cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            let record = json!({ "error": error_kind(&e), "message": e.to_string(), "exit_code": code });
            eprintln!("{record}");
            code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
