//! JSON run configurations, one document per command.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use nhmagic::sweep::{GridSpec, Quantity};
use nhmagic::{BlochVector, Hopping, PureState2};

use crate::error::{CliError, CliResult};

/// Parse a configuration, reporting the path of the offending field.
pub fn parse<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Config(inner.to_string())
        } else {
            CliError::Config(format!("at `{path}`: {inner}"))
        }
    })
}

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            parse(&text)
        }
    }
}

fn real() -> Hopping {
    Hopping::Real
}

/// Initial state: a named state or an explicit Bloch vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Named(NamedState),
    Bloch([f64; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedState {
    /// `|f>`, the non-decaying level.
    F,
    /// `|e>`, the decaying level.
    E,
    Plus,
    Mixed,
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Named(NamedState::F)
    }
}

impl InitialState {
    pub fn bloch(&self) -> CliResult<BlochVector> {
        Ok(match self {
            InitialState::Named(NamedState::Mixed) => BlochVector::ORIGIN,
            InitialState::Named(_) => self.pure().expect("named pure state").bloch(),
            InitialState::Bloch([x, y, z]) => BlochVector::checked(*x, *y, *z)?,
        })
    }

    /// The state as a ket, when it is a named pure state.
    pub fn pure(&self) -> Option<PureState2> {
        match self {
            InitialState::Named(NamedState::F) => Some(PureState2::ground()),
            InitialState::Named(NamedState::E) => Some(PureState2::excited()),
            InitialState::Named(NamedState::Plus) => Some(PureState2::plus()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default = "real")]
    pub hopping: Hopping,
    pub gamma_decay: f64,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Normalized non-Hermitian evolution.
    Nh,
    /// Noise-averaged Bloch equations.
    Average,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveRun {
    pub name: String,
    #[serde(default = "nh_model")]
    pub model: Model,
    #[serde(default = "real")]
    pub hopping: Hopping,
    pub gamma_decay: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub initial: InitialState,
    pub t_final: f64,
    #[serde(default = "default_points")]
    pub n_points: usize,
    /// Add the closed-form `M2~(t)` column (real hopping, zero detuning, `Gamma > 2`).
    #[serde(default)]
    pub analytic: bool,
}

fn nh_model() -> Model {
    Model::Nh
}

fn default_points() -> usize {
    201
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub runs: Vec<EvolveRun>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoriesConfig {
    #[serde(default = "real")]
    pub hopping: Hopping,
    pub gamma_decay: f64,
    pub noise: f64,
    #[serde(default = "mixed")]
    pub initial: InitialState,
    /// Final time in units of the inverse dissipative gap.
    pub horizon_gaps: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    /// Histogram times in units of the inverse gap.
    #[serde(default)]
    pub histogram_times_gaps: Vec<f64>,
    /// How many trajectories go into the long-format file; 0 skips it.
    #[serde(default)]
    pub trajectories_written: usize,
}

fn mixed() -> InitialState {
    InitialState::Named(NamedState::Mixed)
}

impl Default for TrajectoriesConfig {
    fn default() -> Self {
        Self {
            hopping: Hopping::Real,
            gamma_decay: 2.8,
            noise: 0.01,
            initial: mixed(),
            horizon_gaps: 5.0,
            n_steps: 500,
            n_trajectories: 1000,
            seed: 0,
            histogram_times_gaps: vec![0.5, 1.0, 2.0, 3.0, 5.0],
            trajectories_written: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryBlock {
    pub horizon_gaps: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "steady")]
    pub quantity: Quantity,
    #[serde(default = "real")]
    pub hopping: Hopping,
    /// Defaults to the standard 60 x 60 grid.
    #[serde(default)]
    pub grid: Option<GridAxes>,
    #[serde(default)]
    pub trajectory: Option<TrajectoryBlock>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub locate_maximum: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxes {
    pub noise: nhmagic::sweep::Axis,
    pub decay: nhmagic::sweep::Axis,
}

fn steady() -> Quantity {
    Quantity::SteadySre
}

fn yes() -> bool {
    true
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            quantity: Quantity::SteadySre,
            hopping: Hopping::Real,
            grid: None,
            trajectory: None,
            seed: 0,
            locate_maximum: true,
        }
    }
}

impl SweepConfig {
    pub fn grid_spec(&self) -> GridSpec {
        match self.grid {
            Some(g) => GridSpec {
                noise: g.noise,
                decay: g.decay,
                hopping: self.hopping,
            },
            None => GridSpec::standard(self.hopping),
        }
    }
}
