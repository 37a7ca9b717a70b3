//! Condensate mode functions, Raman Rabi profiles, and quadrature of the
//! overlap integrals that generate the projected amplitude equations.
//!
//! Mode functions:
//!
//! ```text
//! ψ_g(r)  = exp(−½[(r/L⊥)² + (z/L_z)²]) / (π^{3/4} L⊥ L_z^{1/2})
//! ψ_v±(r) = (x ± iy)^{|ℓ|} / (√(|ℓ|!) L⊥^{|ℓ|}) · ψ_g(r)
//! ```
//!
//! Rabi profile of branch ±:
//!
//! ```text
//! Ω±(r) = a± Ω₀ exp(−r²/w²) (√2 r/w)^{|ℓ|} exp(±iℓφ) exp(ikz)
//! ```
//!
//! [`projected_coefficients`] evaluates the mean-field and coupling
//! overlaps by tensor Gauss-Hermite quadrature and lists them next to the
//! coefficients used by [`crate::bec_dynamics`]. The report is informational;
//! the dynamics never pick up recomputed values on their own.

use std::fmt::Write as _;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bec_dynamics::{kappa_from_trap, EquationCoefficients, TrapSpec};
use crate::constants::HBAR;
use crate::error::{invalid, Error, Result};
use crate::quadrature::Hermite3;

/// Default Gauss-Hermite nodes per axis.
pub const DEFAULT_ORDER: usize = 24;

/// Convergence threshold on `|c(2n) − c(n)|`, relative part.
pub const QUADRATURE_REL_TOL: f64 = 1e-8;
/// Convergence threshold on `|c(2n) − c(n)|`, absolute part.
pub const QUADRATURE_ABS_TOL: f64 = 1e-12;

/// Relative deviation above which a report entry is flagged.
pub const DISCREPANCY_THRESHOLD: f64 = 1e-3;

/// Sense of rotation of a vortex mode or Rabi branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Handedness {
    Plus,
    Minus,
}

impl Handedness {
    pub fn sign(self) -> f64 {
        match self {
            Handedness::Plus => 1.0,
            Handedness::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Handedness::Plus => Handedness::Minus,
            Handedness::Minus => Handedness::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondensateModeSpec {
    /// L⊥, m
    pub l_perp: f64,
    /// L_z, m
    pub l_z: f64,
    /// vortex charge magnitude |ℓ| ≥ 1
    pub ell: u32,
    pub handedness: Handedness,
}

impl CondensateModeSpec {
    pub fn new(l_perp: f64, l_z: f64, ell: u32, handedness: Handedness) -> Result<Self> {
        let s = Self { l_perp, l_z, ell, handedness };
        s.validate()?;
        Ok(s)
    }

    /// Sizes taken from the trap.
    pub fn from_trap(trap: &TrapSpec, ell: u32) -> Self {
        Self { l_perp: trap.l_perp, l_z: trap.l_z, ell, handedness: Handedness::Plus }
    }

    pub fn with_handedness(self, handedness: Handedness) -> Self {
        Self { handedness, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l_perp > 0.0 && self.l_z > 0.0 && self.l_perp.is_finite() && self.l_z.is_finite()) {
            return Err(invalid("condensate sizes must be positive"));
        }
        if self.ell == 0 || self.ell > 20 {
            return Err(invalid(format!("vortex charge must lie in 1..=20, got {}", self.ell)));
        }
        Ok(())
    }

    fn vortex_prefactor(&self) -> f64 {
        let fact: f64 = (1..=self.ell).map(f64::from).product();
        1.0 / (fact.sqrt() * self.l_perp.powi(self.ell as i32))
    }
}

/// Non-rotating Gaussian mode.
pub fn psi_g(point: [f64; 3], spec: &CondensateModeSpec) -> f64 {
    let [x, y, z] = point;
    let arg = (x * x + y * y) / spec.l_perp.powi(2) + (z / spec.l_z).powi(2);
    (-0.5 * arg).exp() / (PI.powf(0.75) * spec.l_perp * spec.l_z.sqrt())
}

/// Vortex mode with winding `±|ℓ|` set by `spec.handedness`.
pub fn psi_v(point: [f64; 3], spec: &CondensateModeSpec) -> Complex64 {
    let w = Complex64::new(point[0], spec.handedness.sign() * point[1]);
    w.powu(spec.ell) * (spec.vortex_prefactor() * psi_g(point, spec))
}

fn psi_g_gradient(point: [f64; 3], spec: &CondensateModeSpec) -> [f64; 3] {
    let g = psi_g(point, spec);
    let lp2 = spec.l_perp.powi(2);
    [-point[0] / lp2 * g, -point[1] / lp2 * g, -point[2] / spec.l_z.powi(2) * g]
}

fn psi_v_gradient(point: [f64; 3], spec: &CondensateModeSpec) -> [Complex64; 3] {
    let s = spec.handedness.sign();
    let w = Complex64::new(point[0], s * point[1]);
    let pref = spec.vortex_prefactor();
    let poly = w.powu(spec.ell) * pref;
    let dpoly = w.powu(spec.ell - 1) * (spec.ell as f64 * pref);
    let g = psi_g(point, spec);
    let dg = psi_g_gradient(point, spec);
    [
        dpoly * g + poly * dg[0],
        dpoly * Complex64::new(0.0, s) * g + poly * dg[1],
        poly * dg[2],
    ]
}

/// Whether the radial Gaussian of the Rabi profile is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialEnvelope {
    #[default]
    Gaussian,
    /// Drops `exp(−r²/w²)`, valid when the beam is much wider than the cloud.
    Dropped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiProfileSpec {
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    /// Ω₀, Hz
    pub omega0: f64,
    /// beam waist w, m
    pub waist: f64,
    /// charge magnitude |ℓ|
    pub ell: u32,
    /// net two-photon wavenumber along z, 1/m
    pub k: f64,
    #[serde(default)]
    pub envelope: RadialEnvelope,
}

impl RabiProfileSpec {
    pub fn validate(&self) -> Result<()> {
        let norm = self.a_plus.norm_sqr() + self.a_minus.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("|a+|^2 + |a-|^2 must equal 1, got {norm}")));
        }
        if !(self.waist > 0.0 && self.waist.is_finite()) {
            return Err(invalid("beam waist must be positive"));
        }
        if !self.omega0.is_finite() || !self.k.is_finite() {
            return Err(invalid("Rabi frequency and wavenumber must be finite"));
        }
        Ok(())
    }

    pub fn amplitude(&self, branch: Handedness) -> Complex64 {
        match branch {
            Handedness::Plus => self.a_plus,
            Handedness::Minus => self.a_minus,
        }
    }
}

/// Raman Rabi frequency of one branch at a point.
pub fn rabi_profile(point: [f64; 3], spec: &RabiProfileSpec, branch: Handedness) -> Complex64 {
    let [x, y, z] = point;
    let scale = 2.0_f64.sqrt() / spec.waist;
    // (√2 r/w)^{|ℓ|} e^{±iℓφ} = (√2/w)^{|ℓ|} (x ± iy)^{|ℓ|}
    let winding = Complex64::new(scale * x, branch.sign() * scale * y).powu(spec.ell);
    let envelope = match spec.envelope {
        RadialEnvelope::Gaussian => (-(x * x + y * y) / spec.waist.powi(2)).exp(),
        RadialEnvelope::Dropped => 1.0,
    };
    spec.amplitude(branch) * spec.omega0 * envelope * winding * Complex64::from_polar(1.0, spec.k * z)
}

/// Norms and mutual overlaps of `ψ_g`, `ψ_v+`, `ψ_v−`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeNorms {
    pub ground: f64,
    pub vortex_plus: f64,
    pub vortex_minus: f64,
    pub ground_vortex_plus: Complex64,
    pub ground_vortex_minus: Complex64,
    pub vortex_plus_minus: Complex64,
}

pub fn mode_norms(spec: &CondensateModeSpec, order: usize) -> Result<ModeNorms> {
    spec.validate()?;
    let plus = spec.with_handedness(Handedness::Plus);
    let minus = spec.with_handedness(Handedness::Minus);
    let q = Hermite3::new(order, [spec.l_perp, spec.l_perp, spec.l_z])?;
    Ok(ModeNorms {
        ground: q.integrate_real(|p| psi_g(p, spec).powi(2)),
        vortex_plus: q.integrate_real(|p| psi_v(p, &plus).norm_sqr()),
        vortex_minus: q.integrate_real(|p| psi_v(p, &minus).norm_sqr()),
        ground_vortex_plus: q.integrate(|p| psi_v(p, &plus) * psi_g(p, spec)),
        ground_vortex_minus: q.integrate(|p| psi_v(p, &minus) * psi_g(p, spec)),
        vortex_plus_minus: q.integrate(|p| psi_v(p, &plus).conj() * psi_v(p, &minus)),
    })
}

/// `⟨ψ|T + V|ψ⟩/ħ` for a harmonic trap, as an angular rate.
fn mode_energy_rate(
    trap: &TrapSpec,
    q: &Hermite3,
    density: impl Fn([f64; 3]) -> f64 + Sync,
    grad_sqr: impl Fn([f64; 3]) -> f64 + Sync,
) -> f64 {
    let kinetic = HBAR * HBAR / (2.0 * trap.mass) * q.integrate_real(grad_sqr);
    let potential = q.integrate_real(|p| {
        let v = 0.5
            * trap.mass
            * (trap.omega_perp.powi(2) * (p[0] * p[0] + p[1] * p[1]) + trap.omega_z.powi(2) * p[2] * p[2]);
        v * density(p)
    });
    (kinetic + potential) / HBAR
}

/// One row of the coefficient report.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientEntry {
    pub name: &'static str,
    /// What the value is expressed in, e.g. `kappa` or `omega_perp`.
    pub unit: &'static str,
    /// Value used by the dynamics, when there is one.
    pub reference: Option<f64>,
    pub recomputed: f64,
    /// `|c(2n) − c(n)|`
    pub error_estimate: f64,
    /// Nodes per axis of the finer rule.
    pub order: usize,
}

impl CoefficientEntry {
    pub fn relative_deviation(&self) -> Option<f64> {
        match self.reference {
            Some(p) if p != 0.0 => Some((self.recomputed - p) / p),
            _ => None,
        }
    }

    /// True when the recomputed value disagrees with a nonzero reference value.
    pub fn is_discrepant(&self) -> bool {
        match (self.reference, self.relative_deviation()) {
            (_, Some(d)) => d.abs() > DISCREPANCY_THRESHOLD,
            (Some(p), None) => (self.recomputed - p).abs() > DISCREPANCY_THRESHOLD,
            (None, None) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientReport {
    pub mode: CondensateModeSpec,
    pub trap: TrapSpec,
    pub rabi: RabiProfileSpec,
    /// κ from the trap parameters, Hz
    pub kappa: f64,
    pub entries: Vec<CoefficientEntry>,
}

impl CoefficientReport {
    pub fn entry(&self, name: &str) -> Option<&CoefficientEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn discrepancies(&self) -> Vec<&CoefficientEntry> {
        self.entries.iter().filter(|e| e.is_discrepant()).collect()
    }

    /// Recomputed prefactors, for explicitly opting out of the reference
    /// prefactors.
    pub fn equation_coefficients(&self) -> EquationCoefficients {
        let get = |n: &str| self.entry(n).map(|e| e.recomputed).unwrap_or(f64::NAN);
        EquationCoefficients {
            alpha_self: get("alpha_self_interaction"),
            beta_self: get("beta_self_interaction"),
            vortex_offset: get("vortex_energy_offset"),
        }
    }

    /// Tab-separated table with `#` header lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# projected-equation coefficient report");
        let _ = writeln!(s, "# ell = {}", self.mode.ell);
        let _ = writeln!(s, "# l_perp_m = {:.16e}", self.mode.l_perp);
        let _ = writeln!(s, "# l_z_m = {:.16e}", self.mode.l_z);
        let _ = writeln!(s, "# omega_perp_per_s = {:.16e}", self.trap.omega_perp);
        let _ = writeln!(s, "# omega_z_per_s = {:.16e}", self.trap.omega_z);
        let _ = writeln!(s, "# atom_number = {:.16e}", self.trap.atom_number);
        let _ = writeln!(s, "# kappa_hz = {:.16e}", self.kappa);
        let _ = writeln!(s, "# rabi_waist_m = {:.16e}", self.rabi.waist);
        let _ = writeln!(s, "# rabi_k_per_m = {:.16e}", self.rabi.k);
        let _ = writeln!(s, "name\tunit\treference\trecomputed\trelative_deviation\tgrid_order\terror_estimate\tflag");
        for e in &self.entries {
            let reference = e.reference.map_or("NA".to_string(), |v| format!("{v:.16e}"));
            let dev = e.relative_deviation().map_or("NA".to_string(), |v| format!("{v:.16e}"));
            let flag = if e.is_discrepant() { "DIFFERS" } else { "ok" };
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{:.16e}\t{}\t{}\t{:.16e}\t{}",
                e.name, e.unit, reference, e.recomputed, dev, e.order, e.error_estimate, flag
            );
        }
        s
    }
}

/// Raw coefficient values at one quadrature order, in report order.
fn coefficients_at(
    spec: &CondensateModeSpec,
    trap: &TrapSpec,
    rabi: &RabiProfileSpec,
    order: usize,
) -> Result<Vec<f64>> {
    let plus = spec.with_handedness(Handedness::Plus);
    let minus = spec.with_handedness(Handedness::Minus);
    let (lp, lz) = (spec.l_perp, spec.l_z);

    // g/ħ with g = 4πħ² a N / m, expressed in units of κ
    let kappa = kappa_from_trap(trap);
    let g_rate = 4.0 * PI * HBAR * trap.a_sc * trap.atom_number / trap.mass;
    let quartic = Hermite3::new(order, [lp / 2f64.sqrt(), lp / 2f64.sqrt(), lz / 2f64.sqrt()])?;
    let in_kappa = |v: f64| g_rate * v / kappa;
    let alpha_self = in_kappa(quartic.integrate_real(|p| psi_g(p, spec).powi(4)));
    let beta_self = in_kappa(quartic.integrate_real(|p| psi_v(p, &plus).norm_sqr().powi(2)));
    let beta_cross = in_kappa(quartic.integrate_real(|p| psi_v(p, &plus).norm_sqr() * psi_v(p, &minus).norm_sqr()));
    let alpha_vortex = in_kappa(quartic.integrate_real(|p| psi_g(p, spec).powi(2) * psi_v(p, &plus).norm_sqr()));

    let quadratic = Hermite3::new(order, [lp, lp, lz])?;
    let e_g = mode_energy_rate(
        trap,
        &quadratic,
        |p| psi_g(p, spec).powi(2),
        |p| psi_g_gradient(p, spec).iter().map(|d| d * d).sum(),
    );
    let e_v = mode_energy_rate(
        trap,
        &quadratic,
        |p| psi_v(p, &plus).norm_sqr(),
        |p| psi_v_gradient(p, &plus).iter().map(|d| d.norm_sqr()).sum(),
    );
    let offset = (e_v - e_g) / trap.omega_perp;

    // ⟨ψ_v±|Ω±|ψ_g⟩ / (a± Ω₀), and the cross-branch leakage ⟨ψ_v∓|Ω±|ψ_g⟩ / Ω₀
    let unit_rabi = RabiProfileSpec {
        a_plus: Complex64::new(1.0, 0.0),
        a_minus: Complex64::new(1.0, 0.0),
        omega0: 1.0,
        ..*rabi
    };
    let transverse = match rabi.envelope {
        RadialEnvelope::Gaussian => 1.0 / (1.0 / (lp * lp) + 1.0 / rabi.waist.powi(2)).sqrt(),
        RadialEnvelope::Dropped => lp,
    };
    let coupling_q = Hermite3::new(order, [transverse, transverse, lz])?;
    let overlap = |mode: &CondensateModeSpec, branch: Handedness| {
        coupling_q.integrate(|p| psi_v(p, mode).conj() * rabi_profile(p, &unit_rabi, branch) * psi_g(p, spec))
    };
    let c_plus = overlap(&plus, Handedness::Plus).norm();
    let c_minus = overlap(&minus, Handedness::Minus).norm();
    let leak = overlap(&minus, Handedness::Plus).norm().max(overlap(&plus, Handedness::Minus).norm());

    Ok(vec![alpha_self, beta_self, beta_cross, alpha_vortex, offset, c_plus, c_minus, leak])
}

const ENTRY_META: [(&str, &str, Option<f64>); 8] = [
    ("alpha_self_interaction", "kappa", Some(3.0)),
    ("beta_self_interaction", "kappa", Some(0.5)),
    ("beta_cross_interaction", "kappa", Some(0.5)),
    ("alpha_vortex_cross_interaction", "kappa", Some(0.0)),
    ("vortex_energy_offset", "omega_perp", Some(2.0)),
    ("coupling_overlap_plus", "a_plus*omega0", None),
    ("coupling_overlap_minus", "a_minus*omega0", None),
    ("coupling_branch_leakage", "omega0", Some(0.0)),
];

/// Recomputes the projected-equation coefficients at `order` and `2·order`
/// Gauss-Hermite nodes per axis.
///
/// Interaction terms are in units of κ (computed from `trap`), the energy
/// offset in units of `trap.omega_perp`, and the coupling overlaps per unit
/// `a± Ω₀`. Fails if any entry changes by more than the quadrature tolerance
/// between the two orders.
pub fn projected_coefficients(
    spec: &CondensateModeSpec,
    trap: &TrapSpec,
    rabi: &RabiProfileSpec,
    order: usize,
) -> Result<CoefficientReport> {
    spec.validate()?;
    trap.validate()?;
    rabi.validate()?;
    if rabi.ell != spec.ell {
        return Err(invalid(format!(
            "Rabi profile charge {} does not match vortex charge {}",
            rabi.ell, spec.ell
        )));
    }
    let coarse = coefficients_at(spec, trap, rabi, order)?;
    let fine = coefficients_at(spec, trap, rabi, 2 * order)?;
    let mut entries = Vec::with_capacity(fine.len());
    for (k, (&(name, unit, reference), (c, f))) in ENTRY_META.iter().zip(coarse.iter().zip(&fine)).enumerate() {
        let estimate = (f - c).abs();
        if !(estimate <= QUADRATURE_REL_TOL * f.abs() + QUADRATURE_ABS_TOL) {
            return Err(Error::QuadratureNotConverged { name: name.to_string(), estimate });
        }
        debug_assert_eq!(k, entries.len());
        entries.push(CoefficientEntry { name, unit, reference, recomputed: *f, error_estimate: estimate, order: 2 * order });
    }
    Ok(CoefficientReport { mode: *spec, trap: *trap, rabi: *rabi, kappa: kappa_from_trap(trap), entries })
}

/// Coefficient values at a sequence of quadrature orders.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub orders: Vec<usize>,
    /// `values[i][k]`: entry `k` at `orders[i]`
    pub values: Vec<Vec<f64>>,
}

impl ConvergenceStudy {
    pub fn names() -> impl Iterator<Item = &'static str> {
        ENTRY_META.iter().map(|m| m.0)
    }

    /// Every successive change is below 10% of the one before it, or already
    /// at round-off level.
    pub fn is_grid_convergent(&self) -> bool {
        self.values.windows(3).all(|w| {
            (0..w[0].len()).all(|k| {
                let prev = (w[1][k] - w[0][k]).abs();
                let next = (w[2][k] - w[1][k]).abs();
                next <= 0.1 * prev || next <= 1e-12 * w[2][k].abs().max(1.0)
            })
        })
    }
}

/// Evaluates the raw coefficients at `base`, `2·base`, `4·base`, ... nodes.
pub fn convergence_study(
    spec: &CondensateModeSpec,
    trap: &TrapSpec,
    rabi: &RabiProfileSpec,
    base: usize,
    levels: usize,
) -> Result<ConvergenceStudy> {
    spec.validate()?;
    trap.validate()?;
    rabi.validate()?;
    let orders: Vec<usize> = (0..levels).map(|i| base << i).collect();
    let values = orders
        .iter()
        .map(|&n| coefficients_at(spec, trap, rabi, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceStudy { orders, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bec_dynamics::{DEFAULT_L_PERP, DEFAULT_L_Z};

    fn spec() -> CondensateModeSpec {
        CondensateModeSpec::new(DEFAULT_L_PERP, DEFAULT_L_Z, 2, Handedness::Plus).unwrap()
    }

    fn rabi(waist: f64, envelope: RadialEnvelope) -> RabiProfileSpec {
        RabiProfileSpec {
            a_plus: Complex64::new(0.8f64.sqrt(), 0.0),
            a_minus: Complex64::new(0.0, 0.2f64.sqrt()),
            omega0: 1.0,
            waist,
            ell: 2,
            k: 0.0,
            envelope,
        }
    }

    #[test]
    fn ground_mode_peak_and_parity() {
        let s = spec();
        let peak = 1.0 / (PI.powf(0.75) * s.l_perp * s.l_z.sqrt());
        assert!((psi_g([0.0; 3], &s) - peak).abs() <= 1e-15 * peak);
        let p = [1e-6, -0.4e-6, 0.9e-6];
        assert_eq!(psi_g(p, &s), psi_g([-p[0], -p[1], -p[2]], &s));
    }

    #[test]
    fn vortex_mode_vanishes_on_axis_and_winds() {
        let s = spec();
        assert_eq!(psi_v([0.0, 0.0, 0.7e-6], &s), Complex64::new(0.0, 0.0));
        for h in [Handedness::Plus, Handedness::Minus] {
            let m = s.with_handedness(h);
            let n = 256;
            let phases: Vec<f64> = (0..n)
                .map(|k| {
                    let phi = 2.0 * PI * k as f64 / n as f64;
                    psi_v([1e-6 * phi.cos(), 1e-6 * phi.sin(), 0.0], &m).arg()
                })
                .collect();
            let w = crate::grid::accumulate_phase(&phases, true);
            assert!((w - h.sign() * 4.0 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn modes_are_orthonormal() {
        let n = mode_norms(&spec(), DEFAULT_ORDER).unwrap();
        assert!((n.ground - 1.0).abs() < 1e-10);
        assert!((n.vortex_plus - 1.0).abs() < 1e-10);
        assert!((n.vortex_minus - 1.0).abs() < 1e-10);
        // overlaps are in units of 1/volume-normalized modes, so dimensionless
        assert!(n.ground_vortex_plus.norm() < 1e-8);
        assert!(n.ground_vortex_minus.norm() < 1e-8);
        assert!(n.vortex_plus_minus.norm() < 1e-8);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let s = spec();
        let p = [0.7e-6, -1.1e-6, 0.4e-6];
        let g = psi_v_gradient(p, &s);
        let h = 1e-11;
        for axis in 0..3 {
            let mut a = p;
            let mut b = p;
            a[axis] += h;
            b[axis] -= h;
            let fd = (psi_v(a, &s) - psi_v(b, &s)) / (2.0 * h);
            assert!((fd - g[axis]).norm() <= 1e-6 * g[axis].norm().max(1e-3 * psi_v(p, &s).norm() / s.l_perp));
        }
    }

    #[test]
    fn rabi_profile_properties() {
        let r = rabi(50e-6, RadialEnvelope::Gaussian);
        assert_eq!(rabi_profile([0.0, 0.0, 1e-6], &r, Handedness::Plus).norm(), 0.0);
        let p = [1.3e-6, 0.4e-6, -0.2e-6];
        let plus = rabi_profile(p, &r, Handedness::Plus);
        let minus = rabi_profile(p, &r, Handedness::Minus);
        assert!((plus.norm() / minus.norm() - (r.a_plus.norm() / r.a_minus.norm())).abs() < 1e-12);
        // branches are conjugate up to the amplitudes and the common e^{ikz}
        let rk = RabiProfileSpec { k: 3e6, ..r };
        let kz = Complex64::from_polar(1.0, rk.k * p[2]);
        let bare_plus = rabi_profile(p, &rk, Handedness::Plus) / (rk.a_plus * kz);
        let bare_minus = rabi_profile(p, &rk, Handedness::Minus) / (rk.a_minus * kz);
        assert!((bare_plus.conj() - bare_minus).norm() < 1e-12 * bare_plus.norm());
    }

    #[test]
    fn dropping_the_envelope_for_wide_beams() {
        let s = spec();
        let trap = TrapSpec::rb87();
        // kept / dropped overlap ratio is (1 + L⊥²/w²)^{-3}
        for factor in [20.0, 60.0] {
            let w = factor * s.l_perp;
            let kept = projected_coefficients(&s, &trap, &rabi(w, RadialEnvelope::Gaussian), 16).unwrap();
            let dropped = projected_coefficients(&s, &trap, &rabi(w, RadialEnvelope::Dropped), 16).unwrap();
            let a = kept.entry("coupling_overlap_plus").unwrap().recomputed;
            let b = dropped.entry("coupling_overlap_plus").unwrap().recomputed;
            let rel = (b - a).abs() / b;
            let expected = 1.0 - (1.0 + 1.0 / (factor * factor)).powi(-3);
            assert!((rel - expected).abs() < 1e-10, "w={factor}L rel={rel}");
            if factor >= 55.0 {
                assert!(rel <= 1e-3);
            }
        }
    }

    #[test]
    fn coupling_overlap_closed_form() {
        let s = spec();
        let trap = TrapSpec::rb87();
        let w = 30e-6;
        let r = RabiProfileSpec { k: 4e5, ..rabi(w, RadialEnvelope::Gaussian) };
        let rep = projected_coefficients(&s, &trap, &r, 24).unwrap();
        let a = 1.0 / s.l_perp.powi(2) + 1.0 / (w * w);
        let exact = 2.0 * 2f64.sqrt() / (s.l_perp.powi(4) * w * w * a.powi(3)) * (-(r.k * s.l_z).powi(2) / 4.0).exp();
        for name in ["coupling_overlap_plus", "coupling_overlap_minus"] {
            let v = rep.entry(name).unwrap().recomputed;
            assert!((v - exact).abs() < 1e-10 * exact, "{name}: {v} vs {exact}");
        }
        assert!(rep.entry("coupling_branch_leakage").unwrap().recomputed < 1e-12 * exact);
    }

    #[test]
    fn interaction_multiples() {
        let s = spec();
        let trap = TrapSpec::rb87();
        let rep = projected_coefficients(&s, &trap, &rabi(50e-6, RadialEnvelope::Gaussian), DEFAULT_ORDER).unwrap();
        // ∫|ψ_g|⁴ = 1/((2π)^{3/2} L⊥² L_z) ⇒ 4κ; vortex moments give 3/8 and 1/4 of that
        let get = |n: &str| rep.entry(n).unwrap().recomputed;
        assert!((get("alpha_self_interaction") - 4.0).abs() < 1e-10);
        assert!((get("beta_self_interaction") - 1.5).abs() < 1e-10);
        assert!((get("beta_cross_interaction") - 1.5).abs() < 1e-10);
        assert!((get("alpha_vortex_cross_interaction") - 1.0).abs() < 1e-10);
        let flagged: Vec<_> = rep.discrepancies().iter().map(|e| e.name).collect();
        assert!(flagged.contains(&"alpha_self_interaction"));
        assert!(!flagged.contains(&"coupling_overlap_plus"));
        assert!(rep.to_text().contains("alpha_self_interaction\tkappa\t3.0000000000000000e0"));
    }

    #[test]
    fn oscillator_length_gives_two_quanta() {
        let mut trap = TrapSpec::rb87();
        trap.l_perp = trap.oscillator_length_perp();
        let s = CondensateModeSpec::from_trap(&trap, 2);
        let r = RabiProfileSpec { ell: 2, ..rabi(50e-6, RadialEnvelope::Gaussian) };
        let rep = projected_coefficients(&s, &trap, &r, DEFAULT_ORDER).unwrap();
        let off = rep.entry("vortex_energy_offset").unwrap().recomputed;
        assert!((off - 2.0).abs() < 1e-6 * 2.0, "offset {off}");
    }

    #[test]
    fn convergence_is_monotone() {
        let s = spec();
        let trap = TrapSpec::rb87();
        let r = RabiProfileSpec { k: 2e6, ..rabi(8e-6, RadialEnvelope::Gaussian) };
        let study = convergence_study(&s, &trap, &r, 6, 4).unwrap();
        assert!(study.is_grid_convergent(), "{:?}", study.values);
    }

    #[test]
    fn nonconvergence_reported() {
        let s = spec();
        let trap = TrapSpec::rb87();
        // strongly oscillating e^{ikz} needs far more than 2 nodes
        let r = RabiProfileSpec { k: 5e6, ..rabi(50e-6, RadialEnvelope::Gaussian) };
        assert!(matches!(
            projected_coefficients(&s, &trap, &r, 2),
            Err(Error::QuadratureNotConverged { .. })
        ));
        let mismatched = RabiProfileSpec { ell: 1, ..r };
        assert!(projected_coefficients(&s, &trap, &mismatched, 8).is_err());
    }
}
