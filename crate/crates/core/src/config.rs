//! Run configuration: physical parameters, grids, Picard controls and forces.

use crate::error::{Error, Result};
use crate::function_spaces::{
    AxiVectorField, RadialGrid, RadialProfile, SpectralMeasure, ZetaGrid, DEFAULT_NODES, DEFAULT_R_MAX,
    DEFAULT_ZETA_NODES, DEFAULT_Z_MAX,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

/// `|α|` above this is reported as outside the small-rotation regime.
pub const ALPHA_SMALL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub nodes: usize,
    pub r_max: f64,
    pub zeta_max: f64,
    pub zeta_nodes: usize,
    /// Largest atom index kept by the nonlinear iteration.
    pub atom_cutoff: i64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            r_max: DEFAULT_R_MAX,
            zeta_max: DEFAULT_Z_MAX,
            zeta_nodes: DEFAULT_ZETA_NODES,
            atom_cutoff: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardConfig {
    pub max_iter: usize,
    pub tol_fx: f64,
    pub relax: f64,
    /// Forces with `‖f‖_{FX(L∞_{ρ+1})}` above this trigger a warning.
    pub smallness: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { max_iter: 50, tol_fx: 1e-12, relax: 1.0, smallness: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub boundary: f64,
    pub residual: f64,
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { boundary: 1e-8, residual: 1e-6, oracle: 1e-6 }
    }
}

/// Physical and numerical parameters of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub gamma: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub picard: PicardConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_rho() -> f64 {
    2.5
}

impl FlowConfig {
    /// Defaults with the given suction strength.
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            alpha: 0.0,
            rho: default_rho().min(gamma),
            grid: GridConfig::default(),
            picard: PicardConfig::default(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if !(self.gamma.is_finite() && self.gamma > 2.0) {
            return bad(format!("gamma must exceed 2 (gamma > 2), got {}", self.gamma));
        }
        if !(self.rho > 2.0 && self.rho < 3.0) {
            return bad(format!("rho must satisfy 2 < rho < 3, got {}", self.rho));
        }
        if self.rho > self.gamma {
            return bad(format!("rho must not exceed gamma (rho <= gamma), got rho = {} > gamma = {}", self.rho, self.gamma));
        }
        if !self.alpha.is_finite() {
            return bad(format!("alpha must be finite, got {}", self.alpha));
        }
        if self.grid.nodes < crate::function_spaces::MIN_NODES {
            return bad(format!("grid.nodes must be at least {}", crate::function_spaces::MIN_NODES));
        }
        if !(self.grid.r_max > 1.0) {
            return bad(format!("grid.r_max must exceed 1, got {}", self.grid.r_max));
        }
        if self.grid.zeta_nodes < 3 || self.grid.zeta_nodes % 2 == 0 || !(self.grid.zeta_max > 0.0) {
            return bad("grid.zeta_nodes must be odd and >= 3 with zeta_max > 0".into());
        }
        if self.grid.atom_cutoff < 0 {
            return bad("grid.atom_cutoff must be nonnegative".into());
        }
        let p = &self.picard;
        if p.max_iter == 0 || !(p.tol_fx > 0.0) || !(p.relax > 0.0 && p.relax <= 1.0) {
            return bad("picard needs max_iter >= 1, tol_fx > 0 and relax in (0, 1]".into());
        }
        Ok(())
    }

    /// Whether `|α|` lies in the small-rotation regime the construction needs.
    pub fn alpha_is_small(&self) -> bool {
        self.alpha.abs() <= ALPHA_SMALL
    }

    pub fn radial_grid(&self) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(RadialGrid::geometric(self.grid.nodes, self.grid.r_max)?))
    }

    pub fn zeta_grid(&self) -> Result<Arc<ZetaGrid>> {
        Ok(Arc::new(ZetaGrid::uniform(self.grid.zeta_max, self.grid.zeta_nodes)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    R,
    Theta,
    Z,
}

/// Vertical structure of a force term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSpec {
    /// `e^{imz}`; for `m ≠ 0` the conjugate term at `−m` is added.
    Atom { m: i64 },
    /// Density `exp(−((ζ−center)/width)²)`; mirrored and conjugated when
    /// `center ≠ 0`, real part taken when `center = 0`.
    Gaussian { center: f64, width: f64 },
}

/// Radial structure of a force term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialSpec {
    Powerlaw {
        amplitude: f64,
        #[serde(default)]
        amplitude_im: f64,
        exponent: f64,
    },
    GaussianBump {
        center: f64,
        width: f64,
        amplitude: f64,
        #[serde(default)]
        amplitude_im: f64,
    },
}

impl RadialSpec {
    fn profile(&self, grid: &Arc<RadialGrid>) -> RadialProfile {
        match *self {
            RadialSpec::Powerlaw { amplitude, amplitude_im, exponent } => {
                RadialProfile::power_law(grid.clone(), Complex64::new(amplitude, amplitude_im), exponent)
            }
            RadialSpec::GaussianBump { center, width, amplitude, amplitude_im } => {
                let a = Complex64::new(amplitude, amplitude_im);
                RadialProfile::from_fn(grid.clone(), |r| a * (-((r - center) / width).powi(2)).exp(), f64::INFINITY)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceTerm {
    pub component: Component,
    pub mode: ModeSpec,
    pub radial: RadialSpec,
}

/// A real force field as a list of terms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ForceSpec {
    pub terms: Vec<ForceTerm>,
}

impl ForceSpec {
    pub fn validate(&self, rho: f64) -> Result<()> {
        for (i, t) in self.terms.iter().enumerate() {
            match t.radial {
                RadialSpec::Powerlaw { exponent, .. } if exponent < rho + 1.0 - 1e-9 => {
                    return Err(Error::Validation(format!(
                        "force[{i}].radial.exponent must be >= rho + 1 = {}, got {exponent}",
                        rho + 1.0
                    )));
                }
                RadialSpec::GaussianBump { width, .. } if !(width > 0.0) => {
                    return Err(Error::Validation(format!("force[{i}].radial.width must be positive")));
                }
                _ => {}
            }
            if let ModeSpec::Gaussian { width, .. } = t.mode {
                if !(width > 0.0) {
                    return Err(Error::Validation(format!("force[{i}].mode.width must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn has_density(&self) -> bool {
        self.terms.iter().any(|t| matches!(t.mode, ModeSpec::Gaussian { .. }))
    }

    /// Assemble the force with Hermitian completion.
    pub fn build(&self, grid: &Arc<RadialGrid>, zeta: Option<&Arc<ZetaGrid>>) -> Result<AxiVectorField> {
        let mut comps = [
            SpectralMeasure::zero(grid.clone()),
            SpectralMeasure::zero(grid.clone()),
            SpectralMeasure::zero(grid.clone()),
        ];
        for t in &self.terms {
            let idx = match t.component {
                Component::R => 0,
                Component::Theta => 1,
                Component::Z => 2,
            };
            let p = t.radial.profile(grid);
            let target = &mut comps[idx];
            match t.mode {
                ModeSpec::Atom { m: 0 } => {
                    target.add_atom(0, p.add(&p.conj())?.scale_real(0.5))?;
                }
                ModeSpec::Atom { m } => {
                    target.add_atom(m, p.clone())?;
                    target.add_atom(-m, p.conj())?;
                }
                ModeSpec::Gaussian { center, width } => {
                    let zg = zeta.ok_or_else(|| Error::Validation("density force needs a zeta grid".into()))?;
                    let w = move |z: f64| (-((z - center) / width).powi(2)).exp();
                    if center == 0.0 {
                        let re = p.add(&p.conj())?.scale_real(0.5);
                        target.add_density(zg.clone(), &re, w)?;
                    } else {
                        target.add_density(zg.clone(), &p, w)?;
                        target.add_density(zg.clone(), &p.conj(), move |z: f64| w(-z))?;
                    }
                }
            }
        }
        let [r, th, z] = comps;
        Ok(AxiVectorField::new(r, th, z))
    }
}

/// Where and how densely to sample fields for output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    pub r_values: Vec<f64>,
    pub z_count: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            r_values: vec![1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 10.0, 20.0, 50.0],
            z_count: 8,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    gamma: f64,
    #[serde(default)]
    alpha: f64,
    #[serde(default = "default_rho")]
    rho: f64,
    #[serde(default)]
    grid: GridConfig,
    #[serde(default)]
    picard: PicardConfig,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    force: Vec<ForceTerm>,
    #[serde(default)]
    output: OutputConfig,
}

/// Contents of a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub flow: FlowConfig,
    pub forces: Vec<ForceTerm>,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn force_spec(&self) -> ForceSpec {
        ForceSpec { terms: self.forces.clone() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))?;
        let cfg = RunConfig {
            flow: FlowConfig {
                gamma: raw.gamma,
                alpha: raw.alpha,
                rho: raw.rho,
                grid: raw.grid,
                picard: raw.picard,
                tolerances: raw.tolerances,
            },
            forces: raw.force,
            output: raw.output,
        };
        cfg.flow.validate()?;
        cfg.force_spec().validate(cfg.flow.rho)?;
        if cfg.output.z_count == 0 {
            return Err(Error::Validation("output.z_count must be positive".into()));
        }
        Ok(cfg)
    }
}

/// Read, parse and validate a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read config {}: {e}", path.display())))?;
    RunConfig::parse(&text)
}
