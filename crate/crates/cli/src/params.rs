//! Parameter parsing shared by all subcommands.

use clap::Args;
use qsearch::qmodel::{to_coupling, to_spectral};
use qsearch::{CouplingParams, InitialState, SearchError, SpectralParams};

use crate::CliError;

/// Either parameterization plus the initial state. Angles in radians.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Mean energy E_p = (E1 + E2)/2 (spectral form)
    #[arg(long, allow_negative_numbers = true)]
    pub ep: Option<f64>,
    /// Half-gap E_o = (E1 - E2)/2 (spectral form)
    #[arg(long, allow_negative_numbers = true)]
    pub eo: Option<f64>,
    /// Eigenvector phase alpha (spectral form, default 0)
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Projector weight E_fg (coupling form)
    #[arg(long, allow_negative_numbers = true)]
    pub efg: Option<f64>,
    /// Cross-term magnitude E_f (coupling form)
    #[arg(long, allow_negative_numbers = true)]
    pub ef: Option<f64>,
    /// Cross-term phase phi (coupling form, default 0)
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Initial-state angle beta in [0, pi/2]
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Initial-state phase u
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub u: f64,
}

/// Names accepted by `--sweep`.
pub const PARAM_NAMES: [&str; 8] = ["ep", "eo", "alpha", "efg", "ef", "phi", "beta", "u"];

impl ParamArgs {
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        match name {
            "ep" => self.ep = Some(value),
            "eo" => self.eo = Some(value),
            "alpha" => self.alpha = Some(value),
            "efg" => self.efg = Some(value),
            "ef" => self.ef = Some(value),
            "phi" => self.phi = Some(value),
            "beta" => self.beta = Some(value),
            "u" => self.u = value,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown parameter `{other}` (expected one of {})",
                    PARAM_NAMES.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<ParamSet, CliError> {
        let spectral = self.ep.is_some() || self.eo.is_some() || self.alpha.is_some();
        let coupling = self.efg.is_some() || self.ef.is_some() || self.phi.is_some();
        let beta = self
            .beta
            .ok_or_else(|| CliError::Usage("--beta is required".into()))?;
        let init = InitialState::new(beta, self.u)?;
        let form = match (spectral, coupling) {
            (true, true) => {
                return Err(CliError::Usage(
                    "give either --ep/--eo/--alpha or --efg/--ef/--phi, not both".into(),
                ))
            }
            (false, false) => return Err(CliError::Usage(
                "missing Hamiltonian parameters: give --ep/--eo[/--alpha] or --efg/--ef[/--phi]"
                    .into(),
            )),
            (true, false) => {
                let (ep, eo) = self.ep.zip(self.eo).ok_or_else(|| {
                    CliError::Usage("spectral form needs both --ep and --eo".into())
                })?;
                Form::Spectral(SpectralParams::new(ep, eo, self.alpha.unwrap_or(0.0))?)
            }
            (false, true) => {
                let (efg, ef) = self.efg.zip(self.ef).ok_or_else(|| {
                    CliError::Usage("coupling form needs both --efg and --ef".into())
                })?;
                Form::Coupling(CouplingParams::new(efg, ef, self.phi.unwrap_or(0.0))?)
            }
        };
        Ok(ParamSet { form, init })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    Spectral(SpectralParams),
    Coupling(CouplingParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    pub form: Form,
    pub init: InitialState,
}

impl ParamSet {
    pub fn spectral(&self) -> SpectralParams {
        match self.form {
            Form::Spectral(sp) => sp,
            Form::Coupling(cp) => to_spectral(&cp, &self.init).spectral,
        }
    }

    /// Coupling parameters; unavailable for spectral input when cos β = 0
    /// or cos γ = 0.
    pub fn coupling(&self) -> Result<CouplingParams, SearchError> {
        match self.form {
            Form::Spectral(sp) => to_coupling(&sp, &self.init),
            Form::Coupling(cp) => Ok(cp),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.form {
            Form::Spectral(_) => "spectral",
            Form::Coupling(_) => "coupling",
        }
    }
}

/// One `--sweep name:start:stop:steps` axis, sampled on a closed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::Usage(format!(
                "malformed sweep `{text}`, expected name:start:stop:steps"
            ))
        };
        let parts: Vec<&str> = text.split(':').collect();
        let [name, start, stop, steps] = parts.as_slice() else {
            return Err(bad());
        };
        if !PARAM_NAMES.contains(name) {
            return Err(CliError::Usage(format!(
                "unknown sweep parameter `{name}` (expected one of {})",
                PARAM_NAMES.join(", ")
            )));
        }
        let start: f64 = start.parse().map_err(|_| bad())?;
        let stop: f64 = stop.parse().map_err(|_| bad())?;
        let steps: usize = steps.parse().map_err(|_| bad())?;
        if steps < 2 {
            return Err(CliError::Usage(format!(
                "sweep `{text}` needs at least 2 steps"
            )));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        Ok(Self {
            name: name.to_string(),
            start,
            stop,
            steps,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last
                }
            })
            .collect()
    }
}
