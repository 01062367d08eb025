//! The run configuration: an optional TOML file, overridden key by key by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative bracket width for the bisection on `M`.
    pub bisection: Option<f64>,
    pub ode_rtol: Option<f64>,
    pub ode_atol: Option<f64>,
    /// Log-spacing of the stored profile grid, which sets the quadrature resolution.
    pub quadrature: Option<f64>,
    /// Bound on eigenpair residuals.
    pub eigen: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    /// Finite-volume cells of the spectral operator.
    pub intervals: Option<usize>,
    /// Outer radius of the spectral operator.
    pub radius: Option<f64>,
    /// Points per decade of the Pucci–Serrin scan.
    pub per_decade: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<String>,
    pub d: Option<u32>,
    pub p: Option<f64>,
    pub omega: Option<f64>,
    pub omega_list: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub grid: GridOverrides,
    pub output: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    /// Eigenpairs requested by `spectrum`.
    pub k: Option<usize>,
    /// `rescaled`, `profile`, `critical` or `subcritical`.
    pub operator: Option<String>,
    pub eps_list: Option<Vec<f64>>,
    pub m_lo: Option<f64>,
    pub m_hi: Option<f64>,
    pub samples: Option<usize>,
    /// Central height used to extend the Pucci–Serrin scan.
    pub phi0: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Every `Some` field of `over` replaces the corresponding field here.
    pub fn overridden_by(mut self, over: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident).+) => {
                if over.$($f).+.is_some() {
                    self.$($f).+ = over.$($f).+;
                }
            };
        }
        take!(subcommand);
        take!(d);
        take!(p);
        take!(omega);
        take!(omega_list);
        take!(tolerances.bisection);
        take!(tolerances.ode_rtol);
        take!(tolerances.ode_atol);
        take!(tolerances.quadrature);
        take!(tolerances.eigen);
        take!(grid.intervals);
        take!(grid.radius);
        take!(grid.per_decade);
        take!(output);
        take!(cache_dir);
        take!(k);
        take!(operator);
        take!(eps_list);
        take!(m_lo);
        take!(m_hi);
        take!(samples);
        take!(phi0);
        self
    }

    pub fn require_d(&self) -> Result<u32> {
        self.d.ok_or_else(|| Error::Config("missing d".into()))
    }

    pub fn require_p(&self) -> Result<f64> {
        self.p.ok_or_else(|| Error::Config("missing p".into()))
    }

    pub fn require_omega(&self) -> Result<f64> {
        self.omega.ok_or_else(|| Error::Config("missing omega".into()))
    }
}
