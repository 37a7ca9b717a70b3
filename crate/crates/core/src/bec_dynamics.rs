//! Projected three-mode condensate dynamics.
//!
//! The condensate is restricted to the non-rotating mode `ψ_g` with
//! amplitude `α` and the two vortex modes `ψ_v±` (charge `±ℓ`) with
//! amplitudes `β±`. In this basis the Raman-coupled mean-field equations
//! become
//!
//! ```text
//! i α̇  = 3κ|α|²α + Ω_R (a₊* β₊ + a₋* β₋)
//! i β̇± = (δ(t) + 2ω⊥ + (κ/2)(|β₊|² + |β₋|²)) β± + Ω_R a± α
//! ```
//!
//! with `Ω_R = ω⊥` by default. The numeric prefactors (3, 1/2, 2) hold for
//! `ℓ = 2`; other charges need explicitly supplied [`EquationCoefficients`].
//!
//! Rates are used exactly as given (no implicit 2π), see [`RateUnits`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, RB87_MASS};
use crate::error::{invalid, Error, Result};
use crate::integrator::{rk4, Dop853, StepStats};

/// Transverse trap frequency of the presets, Hz.
pub const DEFAULT_OMEGA_PERP: f64 = 132.0;
/// Interaction rate of the presets, Hz.
pub const DEFAULT_KAPPA: f64 = 422.0;
/// Scattering length, m.
pub const DEFAULT_A_SC: f64 = 5e-9;
/// Transverse condensate size, m.
pub const DEFAULT_L_PERP: f64 = 2.35e-6;
/// Axial condensate size, m.
pub const DEFAULT_L_Z: f64 = 1.4e-6;
/// Intercept of the swept detuning, Hz.
pub const DEFAULT_SWEEP_INTERCEPT: f64 = 3000.0;
/// Slope of the swept detuning, `−400²` Hz/s.
pub const DEFAULT_SWEEP_SLOPE: f64 = -400.0 * 400.0;

/// Default integration span, s.
pub const DEFAULT_T_END: f64 = 0.1;
/// Default relative/absolute tolerance of the adaptive integrator.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default number of output samples (including both endpoints).
pub const DEFAULT_SAMPLES: usize = 2001;
/// Default trailing fraction of the run used for steady-state averages.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;

const MIN_TOL: f64 = 1e-13;
const MAX_TOL: f64 = 1e-6;

/// `(α, β₊, β₋)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondensateAmplitudes {
    pub alpha: Complex64,
    pub beta_plus: Complex64,
    pub beta_minus: Complex64,
}

impl CondensateAmplitudes {
    /// All population in the non-rotating mode.
    pub fn ground() -> Self {
        Self::from_array([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])
    }

    pub fn from_array(a: [Complex64; 3]) -> Self {
        Self { alpha: a[0], beta_plus: a[1], beta_minus: a[2] }
    }

    pub fn to_array(self) -> [Complex64; 3] {
        [self.alpha, self.beta_plus, self.beta_minus]
    }

    /// `(|α|², |β₊|², |β₋|²)`
    pub fn populations(&self) -> [f64; 3] {
        [self.alpha.norm_sqr(), self.beta_plus.norm_sqr(), self.beta_minus.norm_sqr()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.populations().iter().sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_array(self.to_array().map(|x| x * c))
    }
}

/// How configured rates enter the equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnits {
    /// Every rate (ω⊥, κ, Ω_R, δ) enters the equations as given.
    #[default]
    AsGiven,
    /// Rates are cyclic frequencies and are multiplied by 2π.
    CyclicHz,
}

impl RateUnits {
    pub fn factor(self) -> f64 {
        match self {
            RateUnits::AsGiven => 1.0,
            RateUnits::CyclicHz => 2.0 * PI,
        }
    }
}

/// Prefactors of the nonlinear and offset terms.
///
/// `alpha_self·κ` multiplies `|α|²α`, `beta_self·κ` multiplies
/// `(|β₊|²+|β₋|²)β±` and `vortex_offset·ω⊥` is the vortex energy offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquationCoefficients {
    pub alpha_self: f64,
    pub beta_self: f64,
    pub vortex_offset: f64,
}

impl EquationCoefficients {
    /// Reference `ℓ = 2` prefactors.
    pub const REFERENCE: Self = Self { alpha_self: 3.0, beta_self: 0.5, vortex_offset: 2.0 };

    pub fn is_reference(&self) -> bool {
        *self == Self::REFERENCE
    }
}

impl Default for EquationCoefficients {
    fn default() -> Self {
        Self::REFERENCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// ω⊥, Hz
    pub omega_perp: f64,
    /// κ, Hz
    pub kappa: f64,
    /// Raman coupling Ω_R, Hz
    pub coupling: f64,
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub ell: u32,
    #[serde(default)]
    pub coefficients: EquationCoefficients,
    #[serde(default)]
    pub units: RateUnits,
}

impl PhysicalParams {
    /// ω⊥ = 132 Hz, κ = 422 Hz, Ω_R = ω⊥, equal optical amplitudes, ℓ = 2.
    pub fn preset() -> Self {
        Self {
            omega_perp: DEFAULT_OMEGA_PERP,
            kappa: DEFAULT_KAPPA,
            coupling: DEFAULT_OMEGA_PERP,
            a_plus: Complex64::new(FRAC_1_SQRT_2, 0.0),
            a_minus: Complex64::new(FRAC_1_SQRT_2, 0.0),
            ell: 2,
            coefficients: EquationCoefficients::REFERENCE,
            units: RateUnits::AsGiven,
        }
    }

    pub fn with_amplitudes(mut self, a_plus: Complex64, a_minus: Complex64) -> Self {
        self.a_plus = a_plus;
        self.a_minus = a_minus;
        self
    }

    /// Real amplitudes with `|a₊|² = fraction`.
    pub fn with_plus_fraction(self, fraction: f64) -> Self {
        self.with_amplitudes(
            Complex64::new(fraction.sqrt(), 0.0),
            Complex64::new((1.0 - fraction).sqrt(), 0.0),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega_perp", self.omega_perp), ("kappa", self.kappa), ("coupling", self.coupling)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be a finite non-negative rate, got {v}")));
            }
        }
        let norm = self.a_plus.norm_sqr() + self.a_minus.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("|a+|^2 + |a-|^2 must equal 1, got {norm}")));
        }
        if self.ell == 0 {
            return Err(invalid("vortex charge must be at least 1"));
        }
        if self.coefficients.is_reference() && self.ell != 2 {
            return Err(invalid(format!(
                "the reference coefficients hold for ell = 2 only (got ell = {}); supply recomputed coefficients",
                self.ell
            )));
        }
        Ok(())
    }
}

/// Two-photon detuning δ(t) in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetuningSchedule {
    Constant { delta0: f64 },
    Linear { delta0: f64, slope: f64 },
}

impl DetuningSchedule {
    /// δ(t) = 3000 − 400²·t Hz.
    pub fn standard_sweep() -> Self {
        DetuningSchedule::Linear { delta0: DEFAULT_SWEEP_INTERCEPT, slope: DEFAULT_SWEEP_SLOPE }
    }

    pub fn at(&self, t: f64) -> f64 {
        match *self {
            DetuningSchedule::Constant { delta0 } => delta0,
            DetuningSchedule::Linear { delta0, slope } => delta0 + slope * t,
        }
    }

    pub fn delta0(&self) -> f64 {
        match *self {
            DetuningSchedule::Constant { delta0 } | DetuningSchedule::Linear { delta0, .. } => delta0,
        }
    }

    pub fn with_delta0(self, value: f64) -> Self {
        match self {
            DetuningSchedule::Constant { .. } => DetuningSchedule::Constant { delta0: value },
            DetuningSchedule::Linear { slope, .. } => DetuningSchedule::Linear { delta0: value, slope },
        }
    }

    /// Replaces the slope, turning a constant schedule into a linear one.
    pub fn with_slope(self, value: f64) -> Self {
        DetuningSchedule::Linear { delta0: self.delta0(), slope: value }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DetuningSchedule::Constant { delta0 } => delta0.is_finite(),
            DetuningSchedule::Linear { delta0, slope } => delta0.is_finite() && slope.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("detuning schedule must be finite"))
        }
    }
}

/// Time derivative `(α̇, β̇₊, β̇₋)` at detuning `delta`.
pub fn rhs(state: &CondensateAmplitudes, params: &PhysicalParams, delta: f64) -> CondensateAmplitudes {
    CondensateAmplitudes::from_array(rhs_array(&state.to_array(), params, delta))
}

fn rhs_array(y: &[Complex64; 3], p: &PhysicalParams, delta: f64) -> [Complex64; 3] {
    let u = p.units.factor();
    let kappa = u * p.kappa;
    let omega = u * p.omega_perp;
    let coupling = u * p.coupling;
    let delta = u * delta;
    let c = &p.coefficients;
    let [alpha, bp, bm] = *y;
    let minus_i = Complex64::new(0.0, -1.0);

    let vortex_pop = bp.norm_sqr() + bm.norm_sqr();
    let alpha_dot = minus_i
        * (alpha * (c.alpha_self * kappa * alpha.norm_sqr())
            + (p.a_plus.conj() * bp + p.a_minus.conj() * bm) * coupling);
    let diag = delta + c.vortex_offset * omega + c.beta_self * kappa * vortex_pop;
    let drive = alpha * coupling;
    [alpha_dot, minus_i * (bp * diag + p.a_plus * drive), minus_i * (bm * diag + p.a_minus * drive)]
}

/// Immutable record of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CondensateAmplitudes>,
    pub params: PhysicalParams,
    pub schedule: DetuningSchedule,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn transfer_series(&self) -> Vec<f64> {
        self.states.iter().map(transfer_function).collect()
    }

    pub fn min_transfer(&self) -> f64 {
        self.transfer_series().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn final_transfer(&self) -> f64 {
        self.states.last().map(transfer_function).unwrap_or(f64::NAN)
    }

    /// Largest `| |α|²+|β₊|²+|β₋|² − 1 |` over the samples.
    pub fn max_norm_drift(&self) -> f64 {
        self.states.iter().map(|s| (s.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn detunings(&self) -> Vec<f64> {
        self.times.iter().map(|&t| self.schedule.at(t)).collect()
    }
}

/// `n` equally spaced times from 0 to `t_end` inclusive.
pub fn sample_times(t_end: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid(format!("t_end must be positive, got {t_end}")));
    }
    if n < 2 {
        return Err(invalid(format!("need at least 2 samples, got {n}")));
    }
    let dt = t_end / (n - 1) as f64;
    Ok((0..n).map(|k| if k == n - 1 { t_end } else { k as f64 * dt }).collect())
}

fn check_tol(tol: f64) -> Result<()> {
    if (MIN_TOL..=MAX_TOL).contains(&tol) {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// Adaptive integration with output at `n_samples` equally spaced times on `[0, t_end]`.
pub fn integrate(
    initial: CondensateAmplitudes,
    params: &PhysicalParams,
    schedule: &DetuningSchedule,
    t_end: f64,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    let times = sample_times(t_end, n_samples)?;
    integrate_at(initial, params, schedule, &times, tol)
}

/// Adaptive integration from t = 0 with output at the given sorted times.
pub fn integrate_at(
    initial: CondensateAmplitudes,
    params: &PhysicalParams,
    schedule: &DetuningSchedule,
    times: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    params.validate()?;
    schedule.validate()?;
    check_tol(tol)?;
    if times.first() != Some(&0.0) || times.len() < 2 {
        return Err(invalid("sample times must start at 0 and contain at least two points"));
    }
    let solver = Dop853::with_tolerance(tol);
    let (ys, stats) = solver.solve(
        |t, y: &[Complex64; 3]| rhs_array(y, params, schedule.at(t)),
        0.0,
        initial.to_array(),
        times,
    )?;
    Ok(Trajectory {
        times: times.to_vec(),
        states: ys.into_iter().map(CondensateAmplitudes::from_array).collect(),
        params: *params,
        schedule: *schedule,
        stats,
    })
}

/// Fixed-step RK4 reference solution at the given times.
pub fn integrate_reference(
    initial: CondensateAmplitudes,
    params: &PhysicalParams,
    schedule: &DetuningSchedule,
    times: &[f64],
    dt: f64,
) -> Result<Trajectory> {
    params.validate()?;
    schedule.validate()?;
    let ys = rk4(
        |t, y: &[Complex64; 3]| rhs_array(y, params, schedule.at(t)),
        0.0,
        initial.to_array(),
        times,
        dt,
    )?;
    Ok(Trajectory {
        times: times.to_vec(),
        states: ys.into_iter().map(CondensateAmplitudes::from_array).collect(),
        params: *params,
        schedule: *schedule,
        stats: StepStats::default(),
    })
}

/// `f = |α|² − |β₊|² − |β₋|²`
pub fn transfer_function(state: &CondensateAmplitudes) -> f64 {
    let [a, p, m] = state.populations();
    a - p - m
}

/// Tail-averaged vortex populations, normalized to a ratio pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateRatio {
    /// `⟨|β₊|²⟩ / (⟨|β₊|²⟩ + ⟨|β₋|²⟩)`
    pub plus: f64,
    pub minus: f64,
    /// Raw tail means of `|β₊|²` and `|β₋|²`.
    pub mean_plus: f64,
    pub mean_minus: f64,
    /// Peak-to-peak excursion of `f(t)` inside the window.
    pub transfer_oscillation: f64,
}

/// Arithmetic mean over samples with `t ≥ t_end − tail_fraction·(t_end − t₀)`.
pub fn steady_state_ratio(traj: &Trajectory, tail_fraction: f64) -> Result<SteadyStateRatio> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(invalid(format!("tail fraction must lie in (0, 1), got {tail_fraction}")));
    }
    let (Some(&t0), Some(&t1)) = (traj.times.first(), traj.times.last()) else {
        return Err(invalid("empty trajectory"));
    };
    let cut = t1 - tail_fraction * (t1 - t0);
    let window: Vec<&CondensateAmplitudes> = traj
        .times
        .iter()
        .zip(&traj.states)
        .filter(|(&t, _)| t >= cut)
        .map(|(_, s)| s)
        .collect();
    let n = window.len() as f64;
    let mean_plus = window.iter().map(|s| s.beta_plus.norm_sqr()).sum::<f64>() / n;
    let mean_minus = window.iter().map(|s| s.beta_minus.norm_sqr()).sum::<f64>() / n;
    if mean_plus < 1e-12 && mean_minus < 1e-12 {
        return Err(Error::UndefinedRatio);
    }
    let fs = window.iter().map(|s| transfer_function(s));
    let (lo, hi) = fs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| (lo.min(f), hi.max(f)));
    let total = mean_plus + mean_minus;
    Ok(SteadyStateRatio {
        plus: mean_plus / total,
        minus: mean_minus / total,
        mean_plus,
        mean_minus,
        transfer_oscillation: hi - lo,
    })
}

/// Trap and cloud parameters entering κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    /// ω⊥, s⁻¹
    pub omega_perp: f64,
    /// ω_z, s⁻¹
    pub omega_z: f64,
    /// L⊥, m
    pub l_perp: f64,
    /// L_z, m
    pub l_z: f64,
    /// atomic mass, kg
    pub mass: f64,
    /// s-wave scattering length, m
    pub a_sc: f64,
    pub atom_number: f64,
}

impl TrapSpec {
    /// ⁸⁷Rb with the preset sizes; N is back-derived so that κ = 422 Hz
    /// and ω_z is set to the oscillator frequency matching L_z.
    pub fn rb87() -> Self {
        let mut trap = Self {
            omega_perp: DEFAULT_OMEGA_PERP,
            omega_z: HBAR / (RB87_MASS * DEFAULT_L_Z * DEFAULT_L_Z),
            l_perp: DEFAULT_L_PERP,
            l_z: DEFAULT_L_Z,
            mass: RB87_MASS,
            a_sc: DEFAULT_A_SC,
            atom_number: 1.0,
        };
        trap.atom_number = atom_number_for_kappa(&trap, DEFAULT_KAPPA);
        trap
    }

    /// Transverse oscillator length `√(ħ/(m ω⊥))`.
    pub fn oscillator_length_perp(&self) -> f64 {
        (HBAR / (self.mass * self.omega_perp)).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_perp", self.omega_perp),
            ("omega_z", self.omega_z),
            ("l_perp", self.l_perp),
            ("l_z", self.l_z),
            ("mass", self.mass),
            ("a_sc", self.a_sc),
            ("atom_number", self.atom_number),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("trap field {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `κ = π ħ a_sc N / (m (2π)^{3/2} L⊥² L_z)`
pub fn kappa_from_trap(trap: &TrapSpec) -> f64 {
    PI * HBAR * trap.a_sc * trap.atom_number
        / (trap.mass * (2.0 * PI).powf(1.5) * trap.l_perp.powi(2) * trap.l_z)
}

/// Atom number that makes [`kappa_from_trap`] return `kappa`.
pub fn atom_number_for_kappa(trap: &TrapSpec, kappa: f64) -> f64 {
    kappa * trap.mass * (2.0 * PI).powf(1.5) * trap.l_perp.powi(2) * trap.l_z / (PI * HBAR * trap.a_sc)
}

/// Transfer-function presets selected by `--fig3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fig3Case {
    A,
    B,
    C,
    D,
}

impl Fig3Case {
    pub const ALL: [Fig3Case; 4] = [Fig3Case::A, Fig3Case::B, Fig3Case::C, Fig3Case::D];

    /// δ = 0, 900, 380 Hz, or the linear sweep 3000 − 400²·t Hz.
    pub fn schedule(self) -> DetuningSchedule {
        match self {
            Fig3Case::A => DetuningSchedule::Constant { delta0: 0.0 },
            Fig3Case::B => DetuningSchedule::Constant { delta0: 900.0 },
            Fig3Case::C => DetuningSchedule::Constant { delta0: 380.0 },
            Fig3Case::D => DetuningSchedule::standard_sweep(),
        }
    }

    pub fn label(self) -> char {
        match self {
            Fig3Case::A => 'a',
            Fig3Case::B => 'b',
            Fig3Case::C => 'c',
            Fig3Case::D => 'd',
        }
    }
}

impl std::str::FromStr for Fig3Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Fig3Case::A),
            "b" => Ok(Fig3Case::B),
            "c" => Ok(Fig3Case::C),
            "d" => Ok(Fig3Case::D),
            other => Err(Error::Config(format!("unknown --fig3 case `{other}` (expected a, b, c or d)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Figure3Run {
    pub case: Fig3Case,
    pub trajectory: Trajectory,
    pub transfer: Vec<f64>,
}

/// Runs one panel with the preset parameters from the ground state.
pub fn run_figure3(case: Fig3Case) -> Result<Figure3Run> {
    run_figure3_with(case, &PhysicalParams::preset(), DEFAULT_T_END, DEFAULT_TOL, DEFAULT_SAMPLES)
}

pub fn run_figure3_with(
    case: Fig3Case,
    params: &PhysicalParams,
    t_end: f64,
    tol: f64,
    n_samples: usize,
) -> Result<Figure3Run> {
    let trajectory = integrate(CondensateAmplitudes::ground(), params, &case.schedule(), t_end, tol, n_samples)?;
    let transfer = trajectory.transfer_series();
    Ok(Figure3Run { case, trajectory, transfer })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rhs_from_ground_state() {
        let p = PhysicalParams::preset().with_amplitudes(c(1.0, 0.0), c(0.0, 0.0));
        let d = rhs(&CondensateAmplitudes::ground(), &p, 0.0);
        assert_eq!(d.alpha, c(0.0, -3.0 * DEFAULT_KAPPA));
        assert_eq!(d.beta_plus, c(0.0, -DEFAULT_OMEGA_PERP));
        assert_eq!(d.beta_minus, c(0.0, 0.0));
    }

    #[test]
    fn rhs_from_pure_vortex() {
        let p = PhysicalParams::preset().with_amplitudes(c(1.0, 0.0), c(0.0, 0.0));
        let s = CondensateAmplitudes::from_array([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let delta = 123.0;
        let d = rhs(&s, &p, delta);
        assert_eq!(d.beta_plus, c(0.0, -(delta + 2.0 * DEFAULT_OMEGA_PERP + DEFAULT_KAPPA / 2.0)));
    }

    #[test]
    fn cyclic_units_scale_every_rate() {
        let mut p = PhysicalParams::preset();
        let s = CondensateAmplitudes::from_array([c(0.6, 0.1), c(0.3, -0.2), c(0.1, 0.5)]);
        let base = rhs(&s, &p, 50.0);
        p.units = RateUnits::CyclicHz;
        let scaled = rhs(&s, &p, 50.0);
        for (a, b) in base.to_array().iter().zip(scaled.to_array()) {
            assert!((a * (2.0 * PI) - b).norm() < 1e-9);
        }
    }

    #[test]
    fn transfer_function_values() {
        assert_eq!(transfer_function(&CondensateAmplitudes::ground()), 1.0);
        let vortex = CondensateAmplitudes::from_array([c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.8)]);
        assert!((transfer_function(&vortex) + 1.0).abs() < 1e-15);
        let half = CondensateAmplitudes::from_array([c(FRAC_1_SQRT_2, 0.0), c(0.5, 0.0), c(0.0, 0.5)]);
        assert!(transfer_function(&half).abs() < 1e-15);
    }

    #[test]
    fn zero_params_freeze_the_state() {
        let p = PhysicalParams { omega_perp: 0.0, kappa: 0.0, coupling: 0.0, ..PhysicalParams::preset() };
        let s0 = CondensateAmplitudes::from_array([c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)]);
        let tr = integrate(s0, &p, &DetuningSchedule::Constant { delta0: 0.0 }, 0.05, 1e-10, 11).unwrap();
        assert!(tr.states.iter().all(|s| *s == s0));
    }

    #[test]
    fn resonant_rabi_oscillation() {
        let p = PhysicalParams { kappa: 0.0, ..PhysicalParams::preset() }.with_amplitudes(c(1.0, 0.0), c(0.0, 0.0));
        let sched = DetuningSchedule::Constant { delta0: -2.0 * DEFAULT_OMEGA_PERP };
        let tr = integrate(CondensateAmplitudes::ground(), &p, &sched, 0.1, 1e-12, 501).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            let exact = (DEFAULT_OMEGA_PERP * t).cos().powi(2);
            assert!((s.alpha.norm_sqr() - exact).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn validation_errors() {
        let good = PhysicalParams::preset();
        assert!(good.validate().is_ok());
        assert!(PhysicalParams { kappa: -1.0, ..good }.validate().is_err());
        assert!(PhysicalParams { ell: 3, ..good }.validate().is_err());
        let custom = EquationCoefficients { alpha_self: 4.0, beta_self: 1.5, vortex_offset: 3.0 };
        assert!(PhysicalParams { ell: 3, coefficients: custom, ..good }.validate().is_ok());
        assert!(good.with_amplitudes(c(1.0, 0.0), c(0.1, 0.0)).validate().is_err());
        let sched = DetuningSchedule::Constant { delta0: 0.0 };
        let g = CondensateAmplitudes::ground();
        assert!(matches!(integrate(g, &good, &sched, 0.01, 1e-3, 5), Err(Error::InvalidTolerance(_))));
        assert!(matches!(integrate(g, &good, &sched, 0.01, 1e-14, 5), Err(Error::InvalidTolerance(_))));
        assert!(integrate(g, &good, &sched, -1.0, 1e-10, 5).is_err());
    }

    #[test]
    fn single_branch_ratio_is_exact() {
        let p = PhysicalParams::preset().with_amplitudes(c(1.0, 0.0), c(0.0, 0.0));
        let tr = integrate(CondensateAmplitudes::ground(), &p, &DetuningSchedule::standard_sweep(), 0.05, 1e-10, 501).unwrap();
        let r = steady_state_ratio(&tr, 0.2).unwrap();
        assert_eq!((r.plus, r.minus), (1.0, 0.0));
    }

    #[test]
    fn ratio_undefined_without_vortex_population() {
        let p = PhysicalParams { coupling: 0.0, ..PhysicalParams::preset() };
        let tr = integrate(CondensateAmplitudes::ground(), &p, &DetuningSchedule::standard_sweep(), 0.01, 1e-10, 11).unwrap();
        assert!(matches!(steady_state_ratio(&tr, 0.2), Err(Error::UndefinedRatio)));
        assert!(steady_state_ratio(&tr, 1.0).is_err());
    }

    #[test]
    fn kappa_formula() {
        let trap = TrapSpec::rb87();
        assert!((kappa_from_trap(&trap) - 422.0).abs() < 1e-9);
        let doubled = TrapSpec { atom_number: 2.0 * trap.atom_number, ..trap };
        assert!((kappa_from_trap(&doubled) - 844.0).abs() < 1e-9);
        assert_eq!(kappa_from_trap(&TrapSpec { a_sc: 0.0, ..trap }), 0.0);
        // a few thousand atoms
        assert!(trap.atom_number > 4000.0 && trap.atom_number < 5000.0, "N = {}", trap.atom_number);
    }

    #[test]
    fn fig3_case_parsing() {
        assert_eq!("D".parse::<Fig3Case>().unwrap(), Fig3Case::D);
        assert!("e".parse::<Fig3Case>().is_err());
        assert_eq!(Fig3Case::D.schedule().at(0.01), 3000.0 - 1600.0);
    }
}
