//! Run configuration: TOML sections per module, validated before dispatch.

use serde::Deserialize;

use fracreg::solver::DescentMethod;
use fracreg::{Domain, FracError, SolverConfig};

pub const DEFAULT_SEED: u64 = 0xF5AC;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub obstacle: ObstacleConfig,
    #[serde(default)]
    pub barrier: BarrierConfig,
    #[serde(default)]
    pub diagnose: DiagnoseConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: String,
    pub params: Vec<f64>,
    pub dim: usize,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig { kind: "interval".into(), params: vec![0.0, 1.0], dim: 1 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub p: f64,
    pub s: f64,
    /// Constant load for solve/diagnose runs.
    #[serde(default = "one")]
    pub f: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig { p: 2.0, s: 0.5, f: 1.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub h: f64,
    #[serde(default = "default_margin")]
    pub margin_cells: usize,
}

fn default_margin() -> usize {
    4
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { h: 1.0 / 256.0, margin_cells: 4 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_ls_decrease")]
    pub ls_decrease: f64,
    #[serde(default = "default_ls_backtrack")]
    pub ls_backtrack: f64,
    #[serde(default = "default_true")]
    pub obstacle_projection: bool,
}

fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    50_000
}
fn default_method() -> String {
    "two-point-step".into()
}
fn default_ls_decrease() -> f64 {
    1e-4
}
fn default_ls_backtrack() -> f64 {
    0.5
}
fn default_true() -> bool {
    true
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            tol: default_tol(),
            max_iter: default_max_iter(),
            method: default_method(),
            ls_decrease: default_ls_decrease(),
            ls_backtrack: default_ls_backtrack(),
            obstacle_projection: true,
        }
    }
}

/// Obstacle profile: a constant, a multiple of d^s, or a multiple of the
/// domain torsion function.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleProfile {
    pub kind: String,
    #[serde(default)]
    pub value: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleConfig {
    pub lower: Option<ObstacleProfile>,
    pub upper: Option<ObstacleProfile>,
}

impl Default for ObstacleConfig {
    fn default() -> Self {
        ObstacleConfig {
            lower: Some(ObstacleProfile { kind: "torsion_frac".into(), value: 0.5 }),
            upper: Some(ObstacleProfile { kind: "const".into(), value: 1e6 }),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierConfig {
    pub r: f64,
    #[serde(default = "default_barrier_kind")]
    pub kind: String,
    /// Boundary parameter of the anchor.
    #[serde(default)]
    pub anchor_t: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    /// Sweep points per sign (plus lambda = 0).
    #[serde(default = "default_lambda_steps")]
    pub lambda_steps: usize,
    /// Quadrature base spacing = r / base_cells.
    #[serde(default = "default_base_cells")]
    pub base_cells: usize,
    /// Also run the double-obstacle barrier construction.
    #[serde(default)]
    pub upper_obstacle: bool,
}

fn default_barrier_kind() -> String {
    "bump-lower".into()
}
fn default_lambda_max() -> f64 {
    0.5
}
fn default_lambda_steps() -> usize {
    4
}
fn default_base_cells() -> usize {
    128
}

impl Default for BarrierConfig {
    fn default() -> Self {
        BarrierConfig {
            r: 0.1,
            kind: default_barrier_kind(),
            anchor_t: 0.0,
            lambda_max: default_lambda_max(),
            lambda_steps: default_lambda_steps(),
            base_cells: default_base_cells(),
            upper_obstacle: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    #[serde(default = "default_anchors")]
    pub anchors: usize,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_anchors() -> usize {
    4
}
fn default_levels() -> usize {
    3
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig { anchors: 4, levels: 3 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Subset of criterion ids; empty runs all.
    #[serde(default)]
    pub criteria: Vec<usize>,
    /// Multiplies every pass tolerance (tamper fixture support).
    #[serde(default = "one")]
    pub tolerance_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { criteria: Vec::new(), tolerance_scale: 1.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out")]
    pub dir: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_out() -> String {
    "out".into()
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out(), seed: DEFAULT_SEED }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, FracError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| FracError::Contract(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), FracError> {
        self.domain()?;
        self.solver_config()?.validate()?;
        if !(self.grid.h > 0.0 && self.grid.h < 1.0) {
            return Err(FracError::Contract(format!("grid spacing out of range: {}", self.grid.h)));
        }
        if !self.problem.f.is_finite() {
            return Err(FracError::Contract("load must be finite".into()));
        }
        if !(self.verify.tolerance_scale > 0.0) {
            return Err(FracError::Contract("tolerance_scale must be positive".into()));
        }
        if self.verify.criteria.iter().any(|&c| c == 0 || c > 11) {
            return Err(FracError::Contract("verify criteria ids must lie in 1..=11".into()));
        }
        if !(self.barrier.lambda_max > 0.0 && self.barrier.lambda_max <= 0.5) {
            return Err(FracError::Contract("barrier lambda_max must lie in (0, 1/2]".into()));
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain, FracError> {
        let p = &self.domain.params;
        let need = |n: usize| -> Result<(), FracError> {
            if p.len() != n {
                return Err(FracError::Contract(format!(
                    "domain kind {} expects {n} params, got {}",
                    self.domain.kind,
                    p.len()
                )));
            }
            Ok(())
        };
        match (self.domain.kind.as_str(), self.domain.dim) {
            ("interval", 1) => {
                need(2)?;
                Domain::interval(p[0], p[1])
            }
            ("ball", 2) => {
                need(3)?;
                Domain::ball([p[0], p[1]], p[2])
            }
            ("stadium", 2) => {
                need(4)?;
                Domain::stadium([p[0], p[1]], p[2], p[3])
            }
            ("ellipse", 2) => {
                need(4)?;
                Domain::ellipse([p[0], p[1]], p[2], p[3])
            }
            (k, d) => Err(FracError::Contract(format!("unsupported domain kind {k} in dim {d}"))),
        }
    }

    pub fn solver_config(&self) -> Result<SolverConfig, FracError> {
        let mut cfg = SolverConfig::new(self.problem.p, self.problem.s);
        cfg.tol = self.solver.tol;
        cfg.max_iter = self.solver.max_iter;
        cfg.ls_decrease = self.solver.ls_decrease;
        cfg.ls_backtrack = self.solver.ls_backtrack;
        cfg.obstacle_projection = self.solver.obstacle_projection;
        cfg.method = match self.solver.method.as_str() {
            "two-point-step" => DescentMethod::TwoPointStep,
            "quasi-newton" => DescentMethod::QuasiNewton,
            m => return Err(FracError::Contract(format!("unknown descent method {m}"))),
        };
        Ok(cfg)
    }
}
