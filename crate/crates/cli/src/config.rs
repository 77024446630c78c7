//! Run configuration: one JSON document with a section per command.
//!
//! Every struct rejects unknown keys, so a typo fails loudly with the path of
//! the offending key instead of being ignored.

use std::sync::Arc;

use realclock_core::clock::ClockModel;
use realclock_core::evolution::FreeParticleClock;
use realclock_core::operator::{ComplexMatrix, DensityMatrix, HermitianOperator};
use realclock_core::quadrature::TimeGrid;
use realclock_core::zurek::SpinBath;
use realclock_core::Complex64 as C64;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::seed::component_rng;

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Root seed; every random component derives its own stream from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zurek: Option<ZurekConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condprob: Option<CondprobConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_limits: Option<ClockLimitsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// A Hermitian operator: a named preset or explicit entries.
#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// `diag(0, omega)`.
    Qubit {
        omega: f64,
    },
    Diag {
        values: Vec<f64>,
    },
    PauliX,
    PauliZ,
    Identity {
        dim: usize,
    },
    /// Row-major real and imaginary parts.
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// Normalized state vector.
    Pure {
        re: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<f64>>,
    },
    Density {
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
    /// Basis state `|index>`.
    Basis { dim: usize, index: usize },
    /// Equal superposition of all basis states.
    Uniform { dim: usize },
}

/// Clock used by the master equation.
#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClockSpec {
    Ideal,
    ConstantSigma {
        sigma: f64,
    },
    /// Polynomial coefficients (constant term first) of the width `b(T)` and
    /// the optional first-order coefficient `a(T)`.
    Expansion {
        spread: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drift: Option<Vec<f64>>,
    },
    FundamentalLimit {
        t_planck: f64,
        t_max: f64,
    },
    Gaussian {
        width: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub system: OperatorSpec,
    pub initial_state: StateSpec,
    pub clock: ClockSpec,
    pub t_final: f64,
    pub step: f64,
    /// Write every n-th trajectory sample (the final sample is always
    /// written).
    #[serde(default = "one")]
    pub sample_every: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathSpec {
    /// Couplings uniform in `[g_min, g_max]`, amplitudes uniform on the unit
    /// sphere; drawn from the `zurek.bath` seed stream.
    Random { atoms: usize, g_min: f64, g_max: f64 },
    /// `g_k = k g0`, all amplitudes `1/sqrt 2`.
    Commensurate { atoms: usize, g0: f64 },
    /// Amplitudes as `[re_alpha, im_alpha, re_beta, im_beta]`.
    Explicit {
        couplings: Vec<f64>,
        env: Vec<[f64; 4]>,
        system: [f64; 4],
    },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TimeAxis {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl TimeAxis {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        linspace(self.start, self.stop, self.n, "times")
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    Ideal,
    Realclock,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceSpec {
    pub mode: ModeSpec,
    pub horizon: f64,
    pub n_samples: usize,
    pub threshold: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ZurekConfig {
    pub bath: BathSpec,
    pub t_planck: f64,
    pub times: TimeAxis,
    /// Also assemble the full state vector and report the deviation.
    #[serde(default)]
    pub brute_force_check: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<RecurrenceSpec>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<TimeGrid, CliError> {
        Ok(TimeGrid::new(self.t_min, self.t_max, self.n_points)?)
    }
}

/// Clock used for conditional probabilities.
#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CondClockSpec {
    Gaussian {
        width: f64,
    },
    /// Free-particle wavepacket read through its position.
    FreeParticle {
        n: usize,
        spacing: f64,
        mass: f64,
        width: f64,
        momentum: f64,
        start: f64,
        t_halfwidth: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CondprobConfig {
    pub system: OperatorSpec,
    pub initial_state: StateSpec,
    pub observable: OperatorSpec,
    pub o_center: f64,
    pub o_halfwidth: f64,
    pub clock: CondClockSpec,
    pub readings: Vec<f64>,
    pub grid: GridSpec,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ClockLimitsConfig {
    pub omega: f64,
    pub duration: f64,
    pub t_planck: f64,
    /// Clock mass for the Salecker-Wigner error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum SweepCommand {
    Evolve,
    Zurek,
    Condprob,
    ClockLimits,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted path of a numeric config key, e.g. `evolve.system.omega`.
    pub key: String,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        linspace(self.min, self.max, self.n, "sweep.axis")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub command: SweepCommand,
    pub axis: SweepAxis,
}

fn one() -> usize {
    1
}

fn default_quad_tol() -> f64 {
    1e-8
}

/// `n` evenly spaced values; `n = 1` gives `[start]`.
fn linspace(start: f64, stop: f64, n: usize, name: &str) -> Result<Vec<f64>, CliError> {
    if n == 0 {
        return Err(CliError::Config(format!("{name}: need at least one value")));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Config(format!("{name}: bounds must be finite")));
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| start + (stop - start) * i as f64 / last).collect())
}

/// Parses a config document, naming the offending key on failure.
pub fn parse(value: Value) -> Result<RunConfig, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("invalid config at `{path}`: {}", e.inner()))
    })
}

/// Applies a `key.path=value` override. The value is read as JSON when it
/// parses, otherwise as a string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(root, key, value)
}

/// Sets the value at a dotted path, creating objects along the way. Numeric
/// segments index into arrays.
pub fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), CliError> {
    if key.is_empty() {
        return Err(CliError::Config("empty override key".into()));
    }
    let mut node = root;
    let segments: Vec<&str> = key.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        node = match node {
            Value::Array(items) => {
                let idx: usize = seg
                    .parse()
                    .map_err(|_| CliError::Config(format!("`{key}`: `{seg}` is not an array index")))?;
                items
                    .get_mut(idx)
                    .ok_or_else(|| CliError::Config(format!("`{key}`: index {idx} out of range")))?
            }
            Value::Object(map) => {
                if !last && !map.contains_key(*seg) {
                    map.insert(seg.to_string(), Value::Object(Default::default()));
                }
                map.entry(seg.to_string()).or_insert(Value::Null)
            }
            _ => return Err(CliError::Config(format!("`{key}`: `{seg}` is inside a scalar"))),
        };
        if last {
            *node = value;
            return Ok(());
        }
    }
    unreachable!()
}

/// JSON number for a sweep value; integral values become integers so they
/// also fit integer-typed keys.
pub fn number(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        Value::from(v as i64)
    } else {
        Value::from(v)
    }
}

fn complex_rows(re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>, name: &str) -> Result<ComplexMatrix, CliError> {
    let n = re.len();
    if n == 0 || re.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!(
            "{name}: `re` must be a non-empty square matrix"
        )));
    }
    if let Some(im) = im {
        if im.len() != n || im.iter().any(|r| r.len() != n) {
            return Err(CliError::Config(format!("{name}: `im` must match `re` in shape")));
        }
    }
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        C64::new(re[i][j], im.map_or(0.0, |m| m[i][j]))
    }))
}

impl OperatorSpec {
    pub fn build(&self) -> Result<HermitianOperator, CliError> {
        Ok(match self {
            OperatorSpec::Qubit { omega } => HermitianOperator::qubit(*omega),
            OperatorSpec::Diag { values } => {
                if values.is_empty() {
                    return Err(CliError::Config("diag: need at least one value".into()));
                }
                HermitianOperator::from_real_diagonal(values)
            }
            OperatorSpec::PauliX => HermitianOperator::pauli_x(),
            OperatorSpec::PauliZ => HermitianOperator::pauli_z(),
            OperatorSpec::Identity { dim } => HermitianOperator::identity(*dim),
            OperatorSpec::Matrix { re, im } => HermitianOperator::new(complex_rows(re, im.as_ref(), "matrix")?)?,
        })
    }
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix, CliError> {
        match self {
            StateSpec::Pure { re, im } => {
                if let Some(im) = im {
                    if im.len() != re.len() {
                        return Err(CliError::Config("pure state: `im` must match `re` in length".into()));
                    }
                }
                let psi: Vec<C64> = re
                    .iter()
                    .enumerate()
                    .map(|(k, &r)| C64::new(r, im.as_ref().map_or(0.0, |m| m[k])))
                    .collect();
                let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
                if !((norm - 1.0).abs() <= 1e-10) {
                    return Err(CliError::Config(format!(
                        "pure state is not normalized (norm^2 = {norm})"
                    )));
                }
                Ok(DensityMatrix::pure(&psi)?)
            }
            StateSpec::Density { re, im } => Ok(DensityMatrix::new(complex_rows(re, im.as_ref(), "density")?)?),
            StateSpec::Basis { dim, index } => {
                if index >= dim {
                    return Err(CliError::Config(format!("basis index {index} outside dimension {dim}")));
                }
                let mut pops = vec![0.0; *dim];
                pops[*index] = 1.0;
                Ok(DensityMatrix::from_diagonal(&pops)?)
            }
            StateSpec::Uniform { dim } => {
                if *dim == 0 {
                    return Err(CliError::Config("uniform state needs dim >= 1".into()));
                }
                let amp = C64::new(1.0 / (*dim as f64).sqrt(), 0.0);
                Ok(DensityMatrix::pure(&vec![amp; *dim])?)
            }
        }
    }
}

fn polynomial(coeffs: Vec<f64>) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
    Arc::new(move |t| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c))
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

impl ClockSpec {
    pub fn build(&self) -> Result<ClockModel, CliError> {
        Ok(match self {
            ClockSpec::Ideal => ClockModel::ideal(),
            ClockSpec::ConstantSigma { sigma } => ClockModel::constant_sigma(*sigma)?,
            ClockSpec::Expansion { spread, drift } => {
                if spread.is_empty() || spread.iter().chain(drift.iter().flatten()).any(|c| !c.is_finite()) {
                    return Err(CliError::Config(
                        "expansion: coefficients must be finite and non-empty".into(),
                    ));
                }
                let drift = drift.clone().unwrap_or_default();
                ClockModel::expansion(
                    polynomial(drift),
                    polynomial(spread.clone()),
                    Some(polynomial(derivative(spread))),
                )
            }
            ClockSpec::FundamentalLimit { t_planck, t_max } => ClockModel::fundamental_limit(*t_planck, *t_max)?,
            ClockSpec::Gaussian { width } => ClockModel::gaussian(*width)?,
        })
    }
}

fn amplitude_pair(a: &[f64; 4]) -> (C64, C64) {
    (C64::new(a[0], a[1]), C64::new(a[2], a[3]))
}

impl BathSpec {
    pub fn build(&self, root_seed: u64) -> Result<SpinBath, CliError> {
        Ok(match self {
            BathSpec::Random { atoms, g_min, g_max } => {
                let mut rng = component_rng(root_seed, "zurek.bath");
                SpinBath::random(*atoms, *g_min, *g_max, &mut rng)?
            }
            BathSpec::Commensurate { atoms, g0 } => SpinBath::commensurate(*atoms, *g0)?,
            BathSpec::Explicit { couplings, env, system } => SpinBath::new(
                couplings.clone(),
                env.iter().map(amplitude_pair).collect(),
                amplitude_pair(system),
            )?,
        })
    }
}

impl CondClockSpec {
    pub fn free_particle(&self) -> Option<(FreeParticleClock, f64)> {
        match *self {
            CondClockSpec::FreeParticle {
                n,
                spacing,
                mass,
                width,
                momentum,
                start,
                t_halfwidth,
            } => Some((
                FreeParticleClock {
                    n,
                    spacing,
                    mass,
                    width,
                    momentum,
                    start,
                },
                t_halfwidth,
            )),
            CondClockSpec::Gaussian { .. } => None,
        }
    }
}
