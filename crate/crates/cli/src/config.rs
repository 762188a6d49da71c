//! Run configuration: a TOML file with one table per component. Every field
//! has a default, and the fully resolved configuration is written next to
//! the outputs so a run directory describes itself.

use std::path::{Path, PathBuf};

use jumpexit_core::kernel::DEFAULT_EPSILON;
use jumpexit_core::{AbsorbingSpec, DomainPartition, Grid, IntervalSet, JumpKernel, Scheme, Table};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub kernel: KernelConfig,
    pub domain: DomainConfig,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub mc: McConfig,
    pub paths: PathsConfig,
    pub compare: CompareConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    CompoundPoissonUniform,
    TruncatedStable,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub family: FamilyName,
    pub lambda: f64,
    pub rate: f64,
    pub alpha: f64,
    pub m: f64,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_path: Option<PathBuf>,
}

/// `"full"`, `"empty"`, or an explicit list of intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AbsorbingConfig {
    Keyword(String),
    Intervals(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainConfig {
    pub omega: Vec<[f64; 2]>,
    pub omega_d: AbsorbingConfig,
    /// Optional; must agree with `kernel.lambda` when given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub h: f64,
}

/// `"uniform"` on Ω or a point `x0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialConfig {
    Keyword(String),
    Point(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub scheme: String,
    pub dt: f64,
    pub t_end: f64,
    pub k_max: usize,
    pub initial: InitialConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub n_paths: usize,
    pub seed: u64,
    /// Censoring time; resolved to 50 × the largest mean exit time when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    pub initial: InitialConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathModeName {
    Free,
    Confined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessName {
    /// Jump process with the configured kernel.
    Kernel,
    /// Brownian motion with diffusion coefficient 1/2.
    Brownian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub process: ProcessName,
    pub n_paths: usize,
    pub t_max: f64,
    pub x0: f64,
    pub mode: PathModeName,
    /// Time step of the Brownian comparator.
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    pub checkpoints: Vec<f64>,
    pub z_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub dump_operator: bool,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            family: FamilyName::CompoundPoissonUniform,
            lambda: 1.0,
            rate: 0.2,
            alpha: 0.5,
            m: 1.0,
            epsilon: DEFAULT_EPSILON,
            table_path: None,
        }
    }
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            omega: vec![[0.0, 1.0]],
            omega_d: AbsorbingConfig::Keyword("full".into()),
            lambda: None,
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { h: 1.0 / 256.0 }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            scheme: Scheme::ImplicitEuler.to_string(),
            dt: 0.01,
            t_end: 50.0,
            k_max: 2,
            initial: InitialConfig::Keyword("uniform".into()),
        }
    }
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_paths: 100_000,
            seed: 1,
            t_max: None,
            initial: InitialConfig::Keyword("uniform".into()),
        }
    }
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            process: ProcessName::Kernel,
            n_paths: 5,
            t_max: 50.0,
            x0: 0.0,
            mode: PathModeName::Free,
            dt: 0.01,
        }
    }
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            checkpoints: vec![1.0, 5.0, 10.0, 25.0, 50.0],
            z_max: 3.0,
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            dump_operator: false,
        }
    }
}

/// Kernel, partition and grid built from a validated configuration.
pub struct Model {
    pub kernel: JumpKernel,
    pub partition: DomainPartition,
    pub grid: Grid,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        // relative table paths are taken relative to the config file
        if let (Some(p), Some(base)) = (cfg.kernel.table_path.as_mut(), path.parent()) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the resolved configuration text. The output directory is
    /// left out so identical runs in different directories share a hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        hex::encode(Sha256::digest(c.to_toml().as_bytes()))
    }

    pub fn scheme(&self) -> Result<Scheme, CliError> {
        self.solver.scheme.parse().map_err(CliError::from)
    }

    /// Cross-checks the blocks and builds the model.
    pub fn build(&self) -> Result<Model, CliError> {
        let k = &self.kernel;
        if let Some(l) = self.domain.lambda {
            if (l - k.lambda).abs() > 1e-12 * l.abs().max(k.lambda.abs()) {
                return Err(CliError::validation(format!(
                    "domain.lambda = {l} differs from kernel.lambda = {}",
                    k.lambda
                )));
            }
        }
        let kernel = match k.family {
            FamilyName::CompoundPoissonUniform => JumpKernel::compound_poisson_uniform(k.rate, k.lambda)?,
            FamilyName::TruncatedStable => JumpKernel::truncated_stable(k.alpha, k.m, k.epsilon, k.lambda)?,
            FamilyName::Tabulated => {
                let path = k
                    .table_path
                    .as_ref()
                    .ok_or_else(|| CliError::validation("kernel.table_path is required for tabulated kernels"))?;
                JumpKernel::tabulated(Table::from_csv(path)?, k.lambda)?
            }
        };
        let absorbing = match &self.domain.omega_d {
            AbsorbingConfig::Keyword(s) if s == "full" => AbsorbingSpec::Full,
            AbsorbingConfig::Keyword(s) if s == "empty" => AbsorbingSpec::Empty,
            AbsorbingConfig::Keyword(s) => {
                return Err(CliError::validation(format!(
                    "domain.omega_d must be \"full\", \"empty\" or a list of intervals, got {s:?}"
                )))
            }
            AbsorbingConfig::Intervals(v) => AbsorbingSpec::Explicit(IntervalSet::from_pairs(v)?),
        };
        let partition = DomainPartition::from_pairs(&self.domain.omega, k.lambda, absorbing)?;
        let grid = Grid::build(&partition, self.grid.h)?;
        self.scheme()?;
        for (name, init) in [("solver.initial", &self.solver.initial), ("mc.initial", &self.mc.initial)] {
            if let InitialConfig::Keyword(s) = init {
                if s != "uniform" {
                    return Err(CliError::validation(format!("{name} must be \"uniform\" or a number, got {s:?}")));
                }
            }
        }
        if self.mc.n_paths == 0 {
            return Err(CliError::validation("mc.n_paths must be at least 1"));
        }
        if let Some(t) = self.mc.t_max {
            if !(t > 0.0) {
                return Err(CliError::validation(format!("mc.t_max must be positive, got {t}")));
            }
        }
        if self.solver.k_max == 0 {
            return Err(CliError::validation("solver.k_max must be at least 1"));
        }
        if !(self.solver.dt > 0.0 && self.solver.t_end > 0.0) {
            return Err(CliError::validation("solver.dt and solver.t_end must be positive"));
        }
        Ok(Model {
            kernel,
            partition,
            grid,
        })
    }
}
