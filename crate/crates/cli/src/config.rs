// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "model": { "name": "amplitude_damping", "gamma": 1.0 },
//!   "method": "oracle_exact",
//!   "t_final": 5.0,
//!   "dt": 0.05,
//!   "output_path": "damping.csv"
//! }
//! ```
//!
//! Model parameters sit next to `name`; every field has a default. `dt` may
//! be omitted only for `oracle_exact`, which then uses the model's default
//! step as its output grid.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use oqs_core::models::{self, ExcitonParams, ModelSpec};
use oqs_core::solvers::qite::steps_for;
use oqs_core::solvers::EomVariant;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config is not valid JSON: {0}")]
    Syntax(String),
    #[error("unknown model '{0}' (see list-models)")]
    UnknownModel(String),
    #[error("unknown method '{0}' (see list-methods)")]
    UnknownMethod(String),
    #[error("field '{path}': {message}")]
    Type { path: String, message: String },
    #[error("field '{field}' is required for method '{method}'")]
    Missing { field: &'static str, method: Method },
    #[error("field '{field}': {message}")]
    Invariant { field: &'static str, message: String },
    #[error("model parameter error: {0}")]
    ModelParameter(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    OracleExact,
    OracleRk4,
    DilationSzNagy,
    DilationStinespring,
    DilationSvd,
    Lcu,
    MonteCarlo,
    Purification,
    Qite,
    Variational,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::OracleExact,
        Method::OracleRk4,
        Method::DilationSzNagy,
        Method::DilationStinespring,
        Method::DilationSvd,
        Method::Lcu,
        Method::MonteCarlo,
        Method::Purification,
        Method::Qite,
        Method::Variational,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::OracleExact => "oracle_exact",
            Method::OracleRk4 => "oracle_rk4",
            Method::DilationSzNagy => "dilation_sznagy",
            Method::DilationStinespring => "dilation_stinespring",
            Method::DilationSvd => "dilation_svd",
            Method::Lcu => "lcu",
            Method::MonteCarlo => "monte_carlo",
            Method::Purification => "purification",
            Method::Qite => "qite",
            Method::Variational => "variational",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Method::OracleExact => "matrix exponential of the vectorized generator",
            Method::OracleRk4 => "classical RK4 on the master equation",
            Method::DilationSzNagy => "first-order Kraus step, one Sz.-Nagy dilation per Kraus operator",
            Method::DilationStinespring => "first-order Kraus step, one Stinespring unitary with a Kraus-index ancilla",
            Method::DilationSvd => "first-order Kraus step, SVD dilation per Kraus operator",
            Method::Lcu => "first-order Kraus step, each operator as a linear combination of four unitaries",
            Method::MonteCarlo => "sampled mixed-unitary unraveling of the exact step channel",
            Method::Purification => "pure system-bath state under the total Hamiltonian",
            Method::Qite => "imaginary-time fit of the vectorized generator with Pauli strings",
            Method::Variational => "hardware-efficient ansatz on the vectorized state",
        }
    }

    /// Whether the method advances in steps of `dt`.
    pub fn is_stepped(self) -> bool {
        !matches!(self, Method::OracleExact)
    }

    /// Whether results carry sampling error even with `shots = 0`.
    pub fn is_stochastic(self, shots: usize) -> bool {
        matches!(self, Method::MonteCarlo) && shots > 0
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownMethod(s.to_string()))
    }
}

/// Matrix given inline or as a CSV file (one row per line).
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MatrixInput {
    Inline(Vec<Vec<f64>>),
    File { file: PathBuf },
}

/// List given inline or as a CSV file (a single row or column).
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ListInput {
    Inline(Vec<f64>),
    File { file: PathBuf },
}

/// One rate for every site, or a list.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RateInput {
    Uniform(f64),
    PerSite(Vec<f64>),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct AmplitudeDampingConfig {
    pub gamma: f64,
    pub omega: f64,
}

impl Default for AmplitudeDampingConfig {
    fn default() -> Self {
        Self { gamma: 1.0, omega: 0.0 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DephasingConfig {
    pub gamma_phi: f64,
}

impl Default for DephasingConfig {
    fn default() -> Self {
        Self { gamma_phi: 0.5 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TfimConfig {
    pub n: usize,
    pub j_coupling: f64,
    pub h_field: f64,
    pub gamma: f64,
}

impl Default for TfimConfig {
    fn default() -> Self {
        Self {
            n: 2,
            j_coupling: 1.0,
            h_field: 0.7,
            gamma: 0.3,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExcitonConfig {
    pub n_sites: usize,
    pub site_energies: Option<ListInput>,
    pub couplings: Option<MatrixInput>,
    pub dephasing_rates: Option<RateInput>,
    pub sink_rate: Option<f64>,
    pub sink_site: Option<usize>,
    pub initial_site: usize,
}

impl Default for ExcitonConfig {
    fn default() -> Self {
        Self {
            n_sites: 3,
            site_energies: None,
            couplings: None,
            dephasing_rates: None,
            sink_rate: None,
            sink_site: None,
            initial_site: 0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RadicalPairConfig {
    pub b_field: f64,
    pub hyperfine: f64,
    pub k_s: f64,
    pub k_t: f64,
}

impl Default for RadicalPairConfig {
    fn default() -> Self {
        Self {
            b_field: 0.5,
            hyperfine: 1.0,
            k_s: 1.0,
            k_t: 1.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExchangeConfig {
    pub g: f64,
    pub omega_s: f64,
    pub omega_b: f64,
}

impl Default for ExchangeConfig {
    fn default() -> Self {
        Self {
            g: 0.5,
            omega_s: 1.0,
            omega_b: 1.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SpinBosonConfig {
    pub bias: f64,
    pub tunneling: f64,
    pub gamma_relax: f64,
    pub gamma_phi: f64,
}

impl Default for SpinBosonConfig {
    fn default() -> Self {
        Self {
            bias: 1.0,
            tunneling: 0.5,
            gamma_relax: 0.2,
            gamma_phi: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelConfig {
    AmplitudeDamping(AmplitudeDampingConfig),
    Dephasing(DephasingConfig),
    Tfim(TfimConfig),
    Exciton(ExcitonConfig),
    RadicalPair(RadicalPairConfig),
    Exchange(ExchangeConfig),
    SpinBoson(SpinBosonConfig),
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::AmplitudeDamping(_) => models::AMPLITUDE_DAMPING_NAME,
            ModelConfig::Dephasing(_) => models::DEPHASING_NAME,
            ModelConfig::Tfim(_) => models::TFIM_NAME,
            ModelConfig::Exciton(_) => models::EXCITON_NAME,
            ModelConfig::RadicalPair(_) => models::RADICAL_PAIR_NAME,
            ModelConfig::Exchange(_) => models::EXCHANGE_NAME,
            ModelConfig::SpinBoson(_) => models::SPIN_BOSON_NAME,
        }
    }

    /// Default configuration of a model by name.
    pub fn default_for(name: &str) -> Result<Self, ConfigError> {
        let empty = serde_json::Value::Object(Default::default());
        Self::from_params(name, empty)
    }

    fn from_params(name: &str, params: serde_json::Value) -> Result<Self, ConfigError> {
        Ok(match name {
            models::AMPLITUDE_DAMPING_NAME => ModelConfig::AmplitudeDamping(typed(params, "model")?),
            models::DEPHASING_NAME => ModelConfig::Dephasing(typed(params, "model")?),
            models::TFIM_NAME => ModelConfig::Tfim(typed(params, "model")?),
            models::EXCITON_NAME => ModelConfig::Exciton(typed(params, "model")?),
            models::RADICAL_PAIR_NAME => ModelConfig::RadicalPair(typed(params, "model")?),
            models::EXCHANGE_NAME => ModelConfig::Exchange(typed(params, "model")?),
            models::SPIN_BOSON_NAME => ModelConfig::SpinBoson(typed(params, "model")?),
            other => return Err(ConfigError::UnknownModel(other.to_string())),
        })
    }

    /// Builds the model; relative data-file paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<ModelSpec, ConfigError> {
        let param = |e: oqs_core::Error| ConfigError::ModelParameter(e.to_string());
        match self {
            ModelConfig::AmplitudeDamping(c) => models::amplitude_damping_model(c.gamma, c.omega).map_err(param),
            ModelConfig::Dephasing(c) => models::dephasing_model(c.gamma_phi).map_err(param),
            ModelConfig::Tfim(c) => {
                models::dissipative_tfim_model(c.n, c.j_coupling, c.h_field, c.gamma).map_err(param)
            }
            ModelConfig::Exciton(c) => models::exciton_transfer_model(&exciton_params(c, base)?).map_err(param),
            ModelConfig::RadicalPair(c) => models::radical_pair_model(c.b_field, c.hyperfine, c.k_s, c.k_t).map_err(param),
            ModelConfig::Exchange(c) => models::exchange_purification_model(c.g, c.omega_s, c.omega_b).map_err(param),
            ModelConfig::SpinBoson(c) => {
                models::spin_boson_model(c.bias, c.tunneling, c.gamma_relax, c.gamma_phi).map_err(param)
            }
        }
    }
}

fn exciton_params(c: &ExcitonConfig, base: &Path) -> Result<ExcitonParams, ConfigError> {
    if !(2..=models::MAX_EXCITON_SITES).contains(&c.n_sites) {
        return Err(ConfigError::ModelParameter(format!(
            "n_sites = {} must be in 2..={}",
            c.n_sites,
            models::MAX_EXCITON_SITES
        )));
    }
    let mut p = ExcitonParams::chain(c.n_sites);
    match &c.site_energies {
        None => {}
        Some(ListInput::Inline(v)) => p.site_energies = v.clone(),
        Some(ListInput::File { file }) => {
            let rows = read_matrix_csv(&base.join(file))?;
            p.site_energies = rows.into_iter().flatten().collect();
        }
    }
    match &c.couplings {
        None => {}
        Some(MatrixInput::Inline(m)) => p.couplings = m.clone(),
        Some(MatrixInput::File { file }) => p.couplings = read_matrix_csv(&base.join(file))?,
    }
    match &c.dephasing_rates {
        None => {}
        Some(RateInput::Uniform(g)) => p.dephasing_rates = vec![*g; c.n_sites],
        Some(RateInput::PerSite(v)) => p.dephasing_rates = v.clone(),
    }
    if let Some(k) = c.sink_rate {
        p.sink_rate = k;
    }
    if let Some(s) = c.sink_site {
        p.sink_site = s;
    }
    p.initial_site = c.initial_site;
    if p.site_energies.len() != c.n_sites {
        return Err(ConfigError::ModelParameter(format!(
            "{} site energies for n_sites = {}",
            p.site_energies.len(),
            c.n_sites
        )));
    }
    Ok(p)
}

/// Plain comma-separated reals, one row per line, no header.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                cell.parse::<f64>()
                    .map_err(|_| format!("row {}, column {}: '{cell}' is not a number", i + 1, j + 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no rows".into());
    }
    Ok(rows)
}

pub fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_matrix_csv(&text).map_err(|m| ConfigError::ModelParameter(format!("{}: {m}", path.display())))
}

fn typed<T: DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => prefix.to_string(),
            (false, _) => format!("{prefix}.{inner}"),
        };
        ConfigError::Type {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Mclachlan,
    Tdvp,
    DiracFrenkel,
}

impl From<SchemeName> for EomVariant {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::Mclachlan => EomVariant::McLachlan,
            SchemeName::Tdvp => EomVariant::Tdvp,
            SchemeName::DiracFrenkel => EomVariant::DiracFrenkel,
        }
    }
}

/// Method-specific knobs; all optional.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct MethodOptions {
    pub lcu_epsilon: f64,
    /// Largest Pauli weight in the QITE basis; `None` keeps all strings.
    pub qite_max_weight: Option<u32>,
    pub qite_lambda: f64,
    pub variational_layers: usize,
    pub variational_scheme: SchemeName,
    pub variational_regularization: f64,
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self {
            lcu_epsilon: oqs_core::dilation::DEFAULT_EPSILON,
            qite_max_weight: None,
            qite_lambda: oqs_core::solvers::qite::DEFAULT_LAMBDA,
            variational_layers: 3,
            variational_scheme: SchemeName::Mclachlan,
            variational_regularization: oqs_core::solvers::variational::DEFAULT_LAMBDA,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: serde_json::Value,
    method: String,
    t_final: Option<f64>,
    dt: Option<f64>,
    #[serde(default)]
    shots: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    observables: Vec<String>,
    output_path: Option<PathBuf>,
    #[serde(default)]
    options: MethodOptions,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub spec: ModelSpec,
    pub method: Method,
    pub t_final: f64,
    pub dt: f64,
    /// Measurement shots per grid point and observable; for `monte_carlo`
    /// the number of sampled trajectories. `0` means exact expectations.
    pub shots: usize,
    pub seed: u64,
    /// Selected observable names, in output order.
    pub observables: Vec<String>,
    pub output_path: Option<PathBuf>,
    pub options: MethodOptions,
}

impl ExperimentConfig {
    pub fn n_steps(&self) -> usize {
        if self.t_final == 0.0 {
            0
        } else {
            steps_for(self.t_final, self.dt).expect("validated at parse time")
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps()).map(|k| k as f64 * self.dt).collect()
    }

    /// Positions of the selected observables in the model's list.
    pub fn observable_indices(&self) -> Vec<usize> {
        self.observables
            .iter()
            .map(|n| {
                self.spec
                    .observables
                    .iter()
                    .position(|o| &o.name == n)
                    .expect("validated at parse time")
            })
            .collect()
    }
}

/// Largest vectorized register QITE accepts with the full Pauli basis, and
/// with a weight-truncated one.
pub const QITE_FULL_BASIS_QUBITS: usize = 4;
pub const QITE_MAX_QUBITS: usize = 8;
/// Variational runs are limited to this many vectorized-state qubits.
pub const VARIATIONAL_MAX_QUBITS: usize = 6;

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_in(text, Path::new("."))
}

/// Like [`parse_config`], resolving data files relative to `base`.
pub fn parse_config_in(text: &str, base: &Path) -> Result<ExperimentConfig, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let raw: RawConfig = typed(value, "")?;
    let method: Method = raw.method.parse()?;

    let serde_json::Value::Object(mut params) = raw.model else {
        return Err(ConfigError::Type {
            path: "model".into(),
            message: "expected an object with a \"name\" field".into(),
        });
    };
    let name = match params.remove("name") {
        Some(serde_json::Value::String(s)) => s,
        Some(_) => {
            return Err(ConfigError::Type {
                path: "model.name".into(),
                message: "expected a string".into(),
            })
        }
        None => {
            return Err(ConfigError::Type {
                path: "model.name".into(),
                message: "missing field".into(),
            })
        }
    };
    let model = ModelConfig::from_params(&name, serde_json::Value::Object(params))?;
    let spec = model.build(base)?;

    let t_final = raw.t_final.unwrap_or(spec.default_horizon);
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(ConfigError::Invariant {
            field: "t_final",
            message: format!("{t_final} must be finite and ≥ 0"),
        });
    }
    let dt = match raw.dt {
        Some(dt) => dt,
        None if !method.is_stepped() => spec.default_dt.min(if t_final > 0.0 { t_final } else { f64::INFINITY }),
        None => return Err(ConfigError::Missing { field: "dt", method }),
    };
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(ConfigError::Invariant {
            field: "dt",
            message: format!("{dt} must be finite and > 0"),
        });
    }
    if t_final > 0.0 {
        if dt > t_final {
            return Err(ConfigError::Invariant {
                field: "dt",
                message: format!("{dt} exceeds t_final = {t_final}"),
            });
        }
        steps_for(t_final, dt).map_err(|e| ConfigError::Invariant {
            field: "dt",
            message: e.to_string(),
        })?;
    }

    let observables = if raw.observables.is_empty() {
        spec.observables.iter().map(|o| o.name.clone()).collect()
    } else {
        for n in &raw.observables {
            if spec.observable(n).is_none() {
                return Err(ConfigError::Invariant {
                    field: "observables",
                    message: format!(
                        "model '{}' has no observable '{n}' (available: {})",
                        spec.name,
                        spec.observable_names().join(", ")
                    ),
                });
            }
        }
        raw.observables
    };

    let options = raw.options;
    check_method_fit(method, &spec, &options)?;
    if method == Method::Lcu && !(options.lcu_epsilon > 0.0 && options.lcu_epsilon <= 0.5) {
        return Err(ConfigError::Invariant {
            field: "options.lcu_epsilon",
            message: format!("{} must be in (0, 0.5]", options.lcu_epsilon),
        });
    }

    Ok(ExperimentConfig {
        model,
        spec,
        method,
        t_final,
        dt,
        shots: raw.shots,
        seed: raw.seed,
        observables,
        output_path: raw.output_path,
        options,
    })
}

fn check_method_fit(method: Method, spec: &ModelSpec, options: &MethodOptions) -> Result<(), ConfigError> {
    let register = oqs_core::solvers::qite::register_qubits(spec.dim());
    match method {
        Method::Purification if spec.purification.is_none() => Err(ConfigError::Invariant {
            field: "method",
            message: format!("model '{}' has no system-bath Hamiltonian for purification", spec.name),
        }),
        Method::Qite if register > QITE_MAX_QUBITS => Err(ConfigError::Invariant {
            field: "method",
            message: format!("qite on a {register}-qubit vectorized register exceeds the {QITE_MAX_QUBITS}-qubit cap"),
        }),
        Method::Qite if register > QITE_FULL_BASIS_QUBITS && options.qite_max_weight.is_none() => {
            Err(ConfigError::Invariant {
                field: "options.qite_max_weight",
                message: format!(
                    "a {register}-qubit vectorized register needs a truncated basis (full basis allowed up to {QITE_FULL_BASIS_QUBITS} qubits)"
                ),
            })
        }
        Method::Variational if register > VARIATIONAL_MAX_QUBITS => Err(ConfigError::Invariant {
            field: "method",
            message: format!("variational on a {register}-qubit register exceeds the {VARIATIONAL_MAX_QUBITS}-qubit cap"),
        }),
        Method::Variational if options.variational_layers == 0 => Err(ConfigError::Invariant {
            field: "options.variational_layers",
            message: "must be at least 1".into(),
        }),
        _ => Ok(()),
    }
}
