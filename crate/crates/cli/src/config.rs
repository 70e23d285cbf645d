//! JSON experiment configuration and its validation.

use std::path::{Path, PathBuf};

use graphon_ldp::dynamics::{CouplingSpec, Observable, SimConfig};
use graphon_ldp::graphon::{KernelSpec, NormMode, EXACT_NORM_LIMIT};
use graphon_ldp::ldp::{DynRateSearch, EventMetric};
use graphon_ldp::random_graphs::{FiniteLaw, Profile};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::Command;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; when present it must name the subcommand being run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// Registry string (`product`, `constant:<c>`, `er:<p>`) or `file:<path>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    /// Second kernel for `norms`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<String>,
    #[serde(default)]
    pub resolutions: Vec<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[serde(default)]
    pub directed: bool,
    /// Sparse schedule `alpha_n = n^(-sparse_exponent)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparse_exponent: Option<f64>,
    #[serde(default)]
    pub norm: NormBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ldp: Option<LdpBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub staircase: Option<StaircaseBlock>,
    #[serde(default)]
    pub plot: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormBlock {
    /// Largest resolution evaluated exactly; heuristic above.
    pub exact_limit: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for NormBlock {
    fn default() -> Self {
        Self { exact_limit: 12, restarts: 16, seed: 0 }
    }
}

impl NormBlock {
    pub fn mode(&self, n: usize) -> NormMode {
        if n <= self.exact_limit {
            NormMode::Exact
        } else {
            self.heuristic()
        }
    }

    pub fn heuristic(&self) -> NormMode {
        NormMode::Heuristic { restarts: self.restarts, seed: self.seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    /// A W-random graph per seed.
    #[default]
    Sampled,
    /// The projected kernel itself (no randomness).
    Kernel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsBlock {
    pub coupling: CouplingSpec,
    pub t_end: f64,
    pub dt: f64,
    pub save_every: usize,
    /// Initial profile: `linear`, `constant:<c>`, `affine:<a>,<b>`, `cos:<k>`.
    pub initial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<ParameterBlock>,
    #[serde(default)]
    pub graph: GraphSource,
    /// Continuum reference resolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<usize>,
    /// Largest perturbation size for `continuity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterBlock {
    /// Finite law, e.g. `uniform:-1,1`.
    pub law: String,
    pub rho: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdpBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_metric")]
    pub metric: EventMetric,
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<DynRateSearch>,
    /// Law for the Legendre table of `rate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    #[serde(default)]
    pub legendre_points: Vec<f64>,
}

fn default_metric() -> EventMetric {
    EventMetric::InfOne
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaircaseBlock {
    /// Coupling CSV; otherwise one random coupling per seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

fn malformed(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn strictly_increasing<T: PartialOrd>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl ExperimentConfig {
    /// Reads and parses the config; relative file references are resolved
    /// against the config's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        if !path.is_file() {
            return Err(CliError::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
        // a run manifest replays the config it echoes
        if value.get("version").is_some() && value.get("files").is_some() {
            if let Some(inner) = value.get_mut("config") {
                value = inner.take();
            }
        }
        let mut cfg: Self = serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?;
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let base = dir.canonicalize().map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        let base = base.as_path();
        for spec in [&mut cfg.kernel, &mut cfg.compare].into_iter().flatten() {
            *spec = resolve_kernel(spec, base);
        }
        if let Some(t) = cfg.ldp.as_mut().and_then(|l| l.target.as_mut()) {
            *t = resolve_kernel(t, base);
        }
        if let Some(p) = cfg.staircase.as_mut().and_then(|s| s.coupling.as_mut()) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self, cmd: Command) -> Result<(), CliError> {
        if let Some(c) = &self.command {
            if c != cmd.name() {
                return Err(malformed(format!("config is for '{c}', not '{}'", cmd.name())));
            }
        }
        for spec in [&self.kernel, &self.compare, &self.ldp.as_ref().and_then(|l| l.target.clone())]
            .into_iter()
            .flatten()
        {
            check_kernel_file(spec)?;
        }
        if let Some(p) = self.staircase.as_ref().and_then(|s| s.coupling.as_ref()) {
            if !p.is_file() {
                return Err(CliError::MissingFile(p.clone()));
            }
        }
        if !strictly_increasing(&self.resolutions) {
            return Err(malformed("resolutions must be strictly increasing"));
        }
        if self.resolutions.contains(&0) {
            return Err(malformed("resolutions must be positive"));
        }
        if self.norm.exact_limit > EXACT_NORM_LIMIT {
            return Err(malformed(format!("norm.exact_limit above {EXACT_NORM_LIMIT}")));
        }
        if self.norm.restarts == 0 {
            return Err(malformed("norm.restarts must be positive"));
        }
        if let Some(l) = &self.ldp {
            if !strictly_increasing(&l.lambdas) {
                return Err(malformed("ldp.lambdas must be strictly increasing"));
            }
        }
        if let Some(d) = &self.dynamics {
            d.initial.parse::<Profile>().map_err(|e| malformed(e.to_string()))?;
            if let Some(p) = &d.parameters {
                p.law.parse::<FiniteLaw>().map_err(|e| malformed(e.to_string()))?;
            }
            if d.save_every == 0 || !(d.dt > 0.0) || !(d.t_end > 0.0) {
                return Err(malformed("dynamics needs t_end > 0, dt > 0, save_every > 0"));
            }
        }

        use Command::*;
        let needs_kernel = !matches!(cmd, Staircase);
        if needs_kernel {
            self.kernel_spec()?;
        }
        if matches!(cmd, Sample | Lln | SparseLln | Continuum | Continuity | LdpMc | Staircase | Simulate)
            && self.seeds.is_empty() && !(cmd == Staircase && self.has_coupling_file()) && !self.deterministic_graphs() {
                return Err(malformed("seeds must be listed explicitly"));
            }
        if !matches!(cmd, Dynrate) && self.resolutions.is_empty() {
            return Err(malformed("resolutions ladder is empty"));
        }
        match cmd {
            Norms => {
                self.compare_spec()?;
            }
            SparseLln => {
                let a = self.sparse_exponent.ok_or_else(|| malformed("sparse-lln needs sparse_exponent"))?;
                if !(a > 0.0 && a < 0.5) {
                    return Err(malformed("sparse_exponent must lie in (0, 0.5) so that alpha_n^2 n grows"));
                }
            }
            Simulate | Continuum | Continuity | Dynrate => {
                let d = self.dynamics()?;
                if cmd == Continuum {
                    let r = d.reference.ok_or_else(|| malformed("continuum needs dynamics.reference"))?;
                    if r == 0 {
                        return Err(malformed("dynamics.reference must be positive"));
                    }
                    if d.coupling.f.needs_parameters() {
                        return Err(malformed("continuum supports parameter-free couplings only"));
                    }
                }
                if cmd == Continuity {
                    self.replicas()?;
                    let e = d.perturbation.ok_or_else(|| malformed("continuity needs dynamics.perturbation"))?;
                    if !(e > 0.0) {
                        return Err(malformed("dynamics.perturbation must be positive"));
                    }
                }
                if cmd == Dynrate {
                    let l = self.ldp()?;
                    if l.lambdas.is_empty() {
                        return Err(malformed("dynrate needs a nonempty ldp.lambdas ladder"));
                    }
                    if l.observable.is_none() || l.observable_target.is_none() {
                        return Err(malformed("dynrate needs ldp.observable and ldp.observable_target"));
                    }
                }
            }
            LdpMc => {
                self.replicas()?;
                self.target_spec()?;
                if self.ldp()?.delta.is_none() {
                    return Err(malformed("ldp-mc needs ldp.delta"));
                }
            }
            Rate => {
                self.target_spec()?;
                let l = self.ldp()?;
                if !l.legendre_points.is_empty() && l.law.is_none() {
                    return Err(malformed("ldp.legendre_points given without ldp.law"));
                }
                if let Some(law) = &l.law {
                    law.parse::<FiniteLaw>().map_err(|e| malformed(e.to_string()))?;
                }
            }
            Staircase => {
                let k = self.staircase_k()?;
                if let Some(&c) = self.resolutions.iter().find(|&&c| k % c != 0) {
                    return Err(malformed(format!("level {c} does not divide k = {k}")));
                }
            }
            Sample | Lln => {}
        }
        Ok(())
    }

    fn has_coupling_file(&self) -> bool {
        self.staircase.as_ref().is_some_and(|s| s.coupling.is_some())
    }

    fn deterministic_graphs(&self) -> bool {
        self.dynamics.as_ref().is_some_and(|d| d.graph == GraphSource::Kernel)
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec, CliError> {
        parse_kernel(self.kernel.as_deref().ok_or_else(|| malformed("missing kernel"))?)
    }

    pub fn compare_spec(&self) -> Result<KernelSpec, CliError> {
        parse_kernel(self.compare.as_deref().ok_or_else(|| malformed("norms needs a compare kernel"))?)
    }

    pub fn target_spec(&self) -> Result<KernelSpec, CliError> {
        parse_kernel(self.ldp()?.target.as_deref().ok_or_else(|| malformed("missing ldp.target"))?)
    }

    pub fn replicas(&self) -> Result<usize, CliError> {
        match self.replicas {
            Some(r) if r >= 2 => Ok(r),
            _ => Err(malformed("replicas must be given and at least 2")),
        }
    }

    pub fn dynamics(&self) -> Result<&DynamicsBlock, CliError> {
        self.dynamics.as_ref().ok_or_else(|| malformed("missing dynamics block"))
    }

    pub fn ldp(&self) -> Result<&LdpBlock, CliError> {
        self.ldp.as_ref().ok_or_else(|| malformed("missing ldp block"))
    }

    pub fn staircase_k(&self) -> Result<usize, CliError> {
        let s = self.staircase.as_ref().ok_or_else(|| malformed("missing staircase block"))?;
        match (&s.coupling, s.k) {
            (Some(p), _) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(p.clone(), e))?;
                let nu = graphon_ldp::staircase::DiscreteCoupling::from_csv(&text).map_err(|e| malformed(e.to_string()))?;
                Ok(nu.k())
            }
            (None, Some(k)) if k > 0 => Ok(k),
            _ => Err(malformed("staircase needs a coupling file or k > 0")),
        }
    }
}

impl DynamicsBlock {
    pub fn sim(&self) -> SimConfig {
        SimConfig::new(self.t_end, self.dt, self.save_every)
    }

    pub fn profile(&self) -> Profile {
        self.initial.parse().expect("validated")
    }
}

fn resolve_kernel(spec: &str, base: &Path) -> String {
    let s = spec.trim();
    let path = s.strip_prefix("file:").unwrap_or(s);
    if (s.starts_with("file:") || path.ends_with(".csv")) && Path::new(path).is_relative() {
        format!("file:{}", base.join(path).display())
    } else {
        s.to_string()
    }
}

fn check_kernel_file(spec: &str) -> Result<(), CliError> {
    if let Some(p) = spec.strip_prefix("file:") {
        if !Path::new(p).is_file() {
            return Err(CliError::MissingFile(PathBuf::from(p)));
        }
    }
    Ok(())
}

fn parse_kernel(spec: &str) -> Result<KernelSpec, CliError> {
    check_kernel_file(spec)?;
    spec.parse().map_err(|e: graphon_ldp::Error| malformed(e.to_string()))
}
