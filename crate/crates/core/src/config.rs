//! Run configuration (TOML) and the named presets.
//!
//! Every key is optional; missing keys take the default, which is the
//! swept-detuning run with a 50:50 first splitter. Units are given next to
//! each field.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bec_dynamics::{
    DetuningSchedule, EquationCoefficients, Fig3Case, PhysicalParams, RateUnits, TrapSpec, DEFAULT_SAMPLES,
    DEFAULT_TAIL_FRACTION, DEFAULT_TOL, DEFAULT_T_END, DEFAULT_KAPPA, DEFAULT_L_PERP, DEFAULT_L_Z, DEFAULT_OMEGA_PERP,
};
use crate::error::{invalid, Error, Result};
use crate::mode_projection::{CondensateModeSpec, Handedness, RabiProfileSpec, RadialEnvelope};
use crate::optics_network::{OamSuperposition, SplitterSpec};

/// Interferometer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticsConfig {
    /// input charge ℓ (nonzero)
    pub ell: i32,
    /// first-splitter reflection amplitude `[re, im]`
    pub r: Complex64,
    /// first-splitter transmission amplitude `[re, im]`
    pub t: Complex64,
    /// arm phase φ, rad
    pub phi: f64,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        let s = SplitterSpec::balanced();
        Self { ell: 2, r: s.r, t: s.t, phi: PI }
    }
}

impl OpticsConfig {
    pub fn splitter(&self) -> Result<SplitterSpec> {
        SplitterSpec::new(self.r, self.t)
    }
}

/// Rates of the projected equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    /// ω⊥, Hz
    pub omega_perp: f64,
    /// κ, Hz
    pub kappa: f64,
    /// Raman coupling Ω_R, Hz; defaults to ω⊥
    pub coupling: Option<f64>,
    pub units: RateUnits,
    /// Replace the reference prefactors; `None` keeps them.
    pub coefficients: Option<EquationCoefficients>,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self { omega_perp: DEFAULT_OMEGA_PERP, kappa: DEFAULT_KAPPA, coupling: None, units: RateUnits::AsGiven, coefficients: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrationConfig {
    /// s
    pub t_end: f64,
    pub tol: f64,
    /// output samples including t = 0 and t_end
    pub samples: usize,
    /// trailing fraction of the run averaged for steady-state ratios
    pub tail_fraction: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self { t_end: DEFAULT_T_END, tol: DEFAULT_TOL, samples: DEFAULT_SAMPLES, tail_fraction: DEFAULT_TAIL_FRACTION }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    /// cells per side
    pub n: usize,
    /// condensate image half-width, m
    pub half_width: f64,
    /// L⊥, m
    pub l_perp: f64,
    /// L_z, m
    pub l_z: f64,
    /// vortex amplitudes `[β₊, β₋]`; defaults to the prepared optical amplitudes
    pub beta: Option<[Complex64; 2]>,
    /// non-rotating admixture c in the interference image
    pub admixture: Complex64,
    /// optical beam waist, m
    pub lg_waist: f64,
    /// optical image half-width, m
    pub lg_half_width: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            n: 101,
            half_width: 3.0 * DEFAULT_L_PERP,
            l_perp: DEFAULT_L_PERP,
            l_z: DEFAULT_L_Z,
            beta: None,
            admixture: Complex64::new(1.0, 0.0),
            lg_waist: 1e-3,
            lg_half_width: 2.5e-3,
        }
    }
}

/// Inputs of the coefficient report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectionConfig {
    pub trap: TrapSpec,
    /// Gauss-Hermite nodes per axis (the report also runs twice this)
    pub order: usize,
    /// Raman beam waist, m
    pub rabi_waist: f64,
    /// net two-photon wavenumber along z, 1/m
    pub rabi_k: f64,
    pub envelope: RadialEnvelope,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            trap: TrapSpec::rb87(),
            order: crate::mode_projection::DEFAULT_ORDER,
            rabi_waist: 100e-6,
            rabi_k: 0.0,
            envelope: RadialEnvelope::Gaussian,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    pub optics: OpticsConfig,
    pub dynamics: DynamicsConfig,
    pub schedule: DetuningSchedule,
    pub integration: IntegrationConfig,
    pub render: RenderConfig,
    pub projection: ProjectionConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::fig3(Fig3Case::D)
    }
}

impl RunConfig {
    /// Transfer-function panel `case` with a 50:50 first splitter.
    pub fn fig3(case: Fig3Case) -> Self {
        Self {
            experiment: format!("fig3{}", case.label()),
            optics: OpticsConfig::default(),
            dynamics: DynamicsConfig::default(),
            schedule: case.schedule(),
            integration: IntegrationConfig::default(),
            render: RenderConfig::default(),
            projection: ProjectionConfig::default(),
            output: OutputConfig::default(),
        }
    }

    /// Swept-detuning run with `|t|² = plus_fraction`, giving
    /// `|a₊|² : |a₋|² = plus_fraction : 1 − plus_fraction`.
    pub fn fig4(plus_fraction: f64) -> Result<Self> {
        let s = SplitterSpec::from_transmission(plus_fraction)?;
        let mut cfg = Self::fig3(Fig3Case::D);
        cfg.experiment = format!("fig4-{plus_fraction:.4}");
        cfg.optics.r = s.r;
        cfg.optics.t = s.t;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.optics.ell == 0 {
            return Err(invalid("optics.ell must be nonzero"));
        }
        self.optics.splitter()?;
        self.schedule.validate()?;
        let ig = &self.integration;
        if !(ig.t_end > 0.0) || ig.samples < 2 {
            return Err(invalid("integration needs t_end > 0 and at least 2 samples"));
        }
        if !(ig.tail_fraction > 0.0 && ig.tail_fraction < 1.0) {
            return Err(invalid("integration.tail_fraction must lie in (0, 1)"));
        }
        if self.render.n < 2 || !(self.render.half_width > 0.0) || !(self.render.lg_half_width > 0.0) {
            return Err(invalid("render grid needs n >= 2 and positive half-widths"));
        }
        Ok(())
    }

    /// `|ℓ|` used by the condensate equations.
    pub fn vortex_charge(&self) -> u32 {
        self.optics.ell.unsigned_abs()
    }

    /// Physical parameters with `a± = ⟨±|ℓ||prepared⟩`.
    pub fn physical_params(&self, prepared: &OamSuperposition) -> PhysicalParams {
        let ell = self.vortex_charge();
        let d = &self.dynamics;
        PhysicalParams {
            omega_perp: d.omega_perp,
            kappa: d.kappa,
            coupling: d.coupling.unwrap_or(d.omega_perp),
            a_plus: prepared.amplitude(ell as i32),
            a_minus: prepared.amplitude(-(ell as i32)),
            ell,
            coefficients: d.coefficients.unwrap_or(EquationCoefficients::REFERENCE),
            units: d.units,
        }
    }

    pub fn condensate_mode(&self) -> CondensateModeSpec {
        CondensateModeSpec {
            l_perp: self.render.l_perp,
            l_z: self.render.l_z,
            ell: self.vortex_charge(),
            handedness: Handedness::Plus,
        }
    }

    pub fn rabi_profile(&self, prepared: &OamSuperposition) -> RabiProfileSpec {
        let ell = self.vortex_charge();
        RabiProfileSpec {
            a_plus: prepared.amplitude(ell as i32),
            a_minus: prepared.amplitude(-(ell as i32)),
            omega0: 1.0,
            waist: self.projection.rabi_waist,
            ell,
            k: self.projection.rabi_k,
            envelope: self.projection.envelope,
        }
    }
}

/// Parses a `--fig4` ratio: either `|a₊|²` as a fraction (`0.8`) or a
/// ratio `80:20`.
pub fn parse_plus_fraction(text: &str) -> Result<f64> {
    let value = if let Some((a, b)) = text.split_once(':') {
        let a: f64 = a.trim().parse().map_err(|_| Error::Config(format!("bad ratio `{text}`")))?;
        let b: f64 = b.trim().parse().map_err(|_| Error::Config(format!("bad ratio `{text}`")))?;
        if !(a >= 0.0 && b >= 0.0 && a + b > 0.0) {
            return Err(Error::Config(format!("bad ratio `{text}`")));
        }
        a / (a + b)
    } else {
        text.trim().parse().map_err(|_| Error::Config(format!("bad ratio `{text}`")))?
    };
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Config(format!("ratio `{text}` must give a fraction in [0, 1]")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_swept_preset() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.schedule, DetuningSchedule::Linear { delta0: 3000.0, slope: -160000.0 });
        assert_eq!(cfg.dynamics.omega_perp, 132.0);
        assert_eq!(cfg.dynamics.kappa, 422.0);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::fig4(0.8).unwrap();
        cfg.dynamics.coupling = Some(99.5);
        cfg.render.beta = Some([Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg = RunConfig::from_toml_str("[schedule]\nkind = \"constant\"\ndelta0 = 380.0\n").unwrap();
        assert_eq!(cfg.schedule, DetuningSchedule::Constant { delta0: 380.0 });
        assert_eq!(cfg.integration, IntegrationConfig::default());
    }

    #[test]
    fn bad_files_rejected() {
        assert!(matches!(RunConfig::from_toml_str("[optics]\nbogus = 1\n"), Err(Error::Config(_))));
        assert!(matches!(
            RunConfig::from_toml_str("[optics]\nr = [0.9, 0.0]\nt = [0.9, 0.0]\n"),
            Err(Error::NonUnitarySplitter { .. })
        ));
        assert!(RunConfig::from_toml_str("[optics]\nell = 0\n").is_err());
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_plus_fraction("0.8").unwrap(), 0.8);
        assert!((parse_plus_fraction("80:20").unwrap() - 0.8).abs() < 1e-15);
        assert!(parse_plus_fraction("1.5").is_err());
        assert!(parse_plus_fraction("x:1").is_err());
    }
}
