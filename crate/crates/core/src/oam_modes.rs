//! Laguerre-Gaussian beam modes at the waist.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::ComplexGrid;
use crate::quadrature::LegendreRule;

/// Largest supported `p + |ℓ|`; factorials up to 20! fit in a `u64`.
pub const MAX_MODE_ORDER: u32 = 20;

/// Radial cutoff of the normalization quadrature, in units of the waist.
pub const NORM_CUTOFF_WAISTS: f64 = 8.0;

/// Indices and waist of an `LG_p^ℓ` mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgModeSpec {
    pub p: u32,
    pub ell: i32,
    /// Beam waist `w₀` in meters.
    pub w0: f64,
}

impl LgModeSpec {
    pub fn new(p: u32, ell: i32, w0: f64) -> Result<Self> {
        let spec = Self { p, ell, w0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w0 > 0.0 && self.w0.is_finite()) {
            return Err(invalid(format!("beam waist must be positive, got {}", self.w0)));
        }
        if self.p + self.ell.unsigned_abs() > MAX_MODE_ORDER {
            return Err(invalid(format!(
                "p + |ℓ| = {} exceeds the supported maximum {MAX_MODE_ORDER}",
                self.p + self.ell.unsigned_abs()
            )));
        }
        Ok(())
    }

    /// `√(2 p! / (π (|ℓ|+p)!)) / w₀`
    pub fn normalization(&self) -> f64 {
        let a = self.ell.unsigned_abs();
        let ratio = factorial(self.p) as f64 / factorial(self.p + a) as f64;
        (2.0 * ratio / PI).sqrt() / self.w0
    }
}

/// A point in cylindrical coordinates with `φ` wrapped into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalPoint {
    pub rho: f64,
    pub phi: f64,
    pub z: f64,
}

impl CylindricalPoint {
    pub fn new(rho: f64, phi: f64, z: f64) -> Result<Self> {
        if !(rho >= 0.0) {
            return Err(invalid(format!("radial coordinate must be non-negative, got {rho}")));
        }
        Ok(Self { rho, phi: wrap_angle(phi), z })
    }

    pub fn from_cartesian(x: f64, y: f64, z: f64) -> Self {
        Self { rho: x.hypot(y), phi: wrap_angle(y.atan2(x)), z }
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// `n!` in exact integer arithmetic. Panics past 20! which would overflow.
pub fn factorial(n: u32) -> u64 {
    assert!(n <= MAX_MODE_ORDER, "factorial({n}) overflows u64");
    (1..=n as u64).product()
}

/// Exact binomial coefficient; valid while the result fits in `u128`.
fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Associated Laguerre polynomial `L_p^a(x)` from its explicit finite sum.
///
/// The coefficient `(a+p)! / ((p−m)! (a+m)! m!)` is formed as the exact
/// integer `C(a+p, p−m)` divided by `m!`.
pub fn assoc_laguerre(p: u32, ell_abs: u32, x: f64) -> f64 {
    let n = p + ell_abs;
    let mut sum = 0.0;
    let mut m_fact = 1.0;
    let mut x_pow = 1.0;
    for m in 0..=p {
        if m > 0 {
            m_fact *= m as f64;
            x_pow *= x;
        }
        let coeff = binomial(n, p - m) as f64 / m_fact;
        let term = coeff * x_pow;
        if m % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Complex amplitude of the normalized LG mode at the waist.
pub fn lg_amplitude(spec: &LgModeSpec, point: &CylindricalPoint) -> Complex64 {
    let a = spec.ell.unsigned_abs();
    let s = 2.0_f64.sqrt() * point.rho / spec.w0;
    let radial = spec.normalization()
        * s.powi(a as i32)
        * assoc_laguerre(spec.p, a, s * s)
        * (-(point.rho / spec.w0).powi(2)).exp();
    Complex64::from_polar(radial, spec.ell as f64 * point.phi)
}

/// Samples the mode on an `n × n` grid over `[−half_width, half_width]²`
/// (layout documented on [`ComplexGrid`]).
pub fn sample_mode_grid(spec: &LgModeSpec, half_width: f64, n: usize) -> Result<ComplexGrid> {
    spec.validate()?;
    ComplexGrid::from_fn(n, half_width, |x, y| {
        lg_amplitude(spec, &CylindricalPoint::from_cartesian(x, y, 0.0))
    })
}

/// `∫∫ |LG|² ρ dρ dφ` by Gauss-Legendre in ρ on `[0, 8 w₀]` and the
/// trapezoid rule in φ (exact for the trigonometric φ-dependence).
pub fn mode_norm(spec: &LgModeSpec, n_radial: usize, n_angular: usize) -> Result<f64> {
    spec.validate()?;
    if n_angular == 0 {
        return Err(invalid("angular sample count must be positive"));
    }
    let rule = LegendreRule::new(n_radial, 0.0, NORM_CUTOFF_WAISTS * spec.w0)?;
    let dphi = 2.0 * PI / n_angular as f64;
    let total = rule.integrate(|rho| {
        let ring: f64 = (0..n_angular)
            .map(|k| {
                let pt = CylindricalPoint { rho, phi: k as f64 * dphi, z: 0.0 };
                lg_amplitude(spec, &pt).norm_sqr()
            })
            .sum();
        ring * dphi * rho
    });
    Ok(total)
}

/// Coherent sum `Σ c_ℓ LG_p^ℓ` over a set of charges sharing `p` and `w₀`.
pub fn superposed_amplitude(
    amplitudes: impl IntoIterator<Item = (i32, Complex64)>,
    p: u32,
    w0: f64,
    point: &CylindricalPoint,
) -> Complex64 {
    amplitudes
        .into_iter()
        .map(|(ell, c)| c * lg_amplitude(&LgModeSpec { p, ell, w0 }, point))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `L_p^a(x)` by the three-term recurrence, independent of the explicit sum.
    fn laguerre_recurrence(p: u32, a: u32, x: f64) -> f64 {
        let a = a as f64;
        let (mut l0, mut l1) = (1.0, 1.0 + a - x);
        if p == 0 {
            return l0;
        }
        for k in 1..p {
            let k = k as f64;
            let l2 = ((2.0 * k + 1.0 + a - x) * l1 - (k + a) * l0) / (k + 1.0);
            l0 = l1;
            l1 = l2;
        }
        l1
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(assoc_laguerre(0, 2, 7.3), 1.0);
        assert!(assoc_laguerre(1, 0, 1.0).abs() < 1e-15);
        assert!((assoc_laguerre(2, 1, 0.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn laguerre_at_zero_is_binomial() {
        for p in 0..=6u32 {
            for a in 0..=6u32 {
                // exact integer (a+p)!/(p! a!)
                let exact = (1..=(a + p) as u128).product::<u128>()
                    / ((1..=p as u128).product::<u128>() * (1..=a as u128).product::<u128>());
                assert_eq!(assoc_laguerre(p, a, 0.0), exact as f64, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn laguerre_matches_recurrence() {
        for p in 0..=8 {
            for a in 0..=5 {
                for &x in &[0.1, 0.7, 2.5, 6.0] {
                    let s = assoc_laguerre(p, a, x);
                    let r = laguerre_recurrence(p, a, x);
                    assert!((s - r).abs() <= 1e-10 * r.abs().max(1.0), "p={p} a={a} x={x}");
                }
            }
        }
    }

    #[test]
    fn on_axis_zero_for_charged_modes() {
        let spec = LgModeSpec::new(0, 2, 1e-3).unwrap();
        let v = lg_amplitude(&spec, &CylindricalPoint::new(0.0, 0.3, 0.0).unwrap());
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phase_advances_with_charge() {
        let spec = LgModeSpec::new(0, 2, 1.0).unwrap();
        let a = lg_amplitude(&spec, &CylindricalPoint::new(0.8, 0.0, 0.0).unwrap());
        let b = lg_amplitude(&spec, &CylindricalPoint::new(0.8, PI / 4.0, 0.0).unwrap());
        assert!((b.arg() - a.arg() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_by_quadrature() {
        for (p, l) in [(0, 1), (0, 2), (1, 2)] {
            let spec = LgModeSpec::new(p, l, 2.5e-4).unwrap();
            let norm = mode_norm(&spec, 96, 16).unwrap();
            assert!((norm - 1.0).abs() < 1e-6, "p={p} l={l} norm={norm}");
        }
    }

    #[test]
    fn gaussian_peaks_at_center() {
        let spec = LgModeSpec::new(0, 0, 1.0).unwrap();
        let g = sample_mode_grid(&spec, 3.0, 41).unwrap();
        assert_eq!(g.argmax_norm(), (20, 20));
    }

    #[test]
    fn grid_winding_counts_charge() {
        let spec = LgModeSpec::new(0, 2, 1.0).unwrap();
        let g = sample_mode_grid(&spec, 3.0, 61).unwrap();
        let w = g.winding_phase(10).unwrap();
        assert!((w - 4.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn conjugate_charge_is_conjugate_field() {
        let plus = sample_mode_grid(&LgModeSpec::new(1, 3, 1.0).unwrap(), 2.0, 33).unwrap();
        let minus = sample_mode_grid(&LgModeSpec::new(1, -3, 1.0).unwrap(), 2.0, 33).unwrap();
        for (a, b) in plus.data().iter().zip(minus.data()) {
            assert!((a.conj() - b).norm() <= 1e-15 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn phi_wrapping() {
        let p = CylindricalPoint::from_cartesian(-1.0, -1e-300, 0.0);
        assert!(p.phi >= 0.0 && p.phi < 2.0 * PI);
        assert!((CylindricalPoint::new(1.0, -PI / 2.0, 0.0).unwrap().phi - 1.5 * PI).abs() < 1e-15);
        assert!(CylindricalPoint::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(LgModeSpec::new(0, 1, 0.0).is_err());
        assert!(LgModeSpec::new(15, -6, 1.0).is_err());
        assert!(sample_mode_grid(&LgModeSpec::new(0, 1, 1.0).unwrap(), 1.0, 1).is_err());
        assert!(sample_mode_grid(&LgModeSpec::new(0, 1, 1.0).unwrap(), -1.0, 8).is_err());
    }
}
