//! Forward-model images of the condensate and the optical beam.
//!
//! All condensate images are taken in the `z = 0` plane.

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::{count_cyclic_maxima, ComplexGrid};
use crate::mode_projection::{psi_g, psi_v, CondensateModeSpec, Handedness};
use crate::oam_modes::{superposed_amplitude, CylindricalPoint};
use crate::optics_network::OamSuperposition;

/// Vortex-pair amplitudes plus a non-rotating reference admixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateImage {
    pub mode: CondensateModeSpec,
    pub beta_plus: Complex64,
    pub beta_minus: Complex64,
    /// Amplitude `c` of `ψ_g` in the interference image.
    pub admixture: Complex64,
}

impl CondensateImage {
    /// `β₊ψ_v+ + β₋ψ_v−`
    pub fn vortex_field(&self, x: f64, y: f64) -> Complex64 {
        let p = [x, y, 0.0];
        let plus = self.mode.with_handedness(Handedness::Plus);
        let minus = self.mode.with_handedness(Handedness::Minus);
        self.beta_plus * psi_v(p, &plus) + self.beta_minus * psi_v(p, &minus)
    }

    /// `β₊ψ_v+ + β₋ψ_v− + c ψ_g`
    pub fn interference_field(&self, x: f64, y: f64) -> Complex64 {
        self.vortex_field(x, y) + self.admixture * psi_g([x, y, 0.0], &self.mode)
    }

    pub fn vortex_grid(&self, half_width: f64, n: usize) -> Result<ComplexGrid> {
        self.mode.validate()?;
        ComplexGrid::from_fn(n, half_width, |x, y| self.vortex_field(x, y))
    }

    pub fn interference_grid(&self, half_width: f64, n: usize) -> Result<ComplexGrid> {
        self.mode.validate()?;
        ComplexGrid::from_fn(n, half_width, |x, y| self.interference_field(x, y))
    }

    /// Radius of the density ring of a single vortex, `√|ℓ| · L⊥`.
    pub fn ring_radius(&self) -> f64 {
        (self.mode.ell as f64).sqrt() * self.mode.l_perp
    }
}

/// Optical field `Σ c_ℓ LG_0^ℓ` of a prepared superposition at the waist.
pub fn lg_superposition_grid(state: &OamSuperposition, w0: f64, half_width: f64, n: usize) -> Result<ComplexGrid> {
    let spec = crate::oam_modes::LgModeSpec { p: 0, ell: 0, w0 };
    spec.validate()?;
    for (ell, _) in state.iter() {
        crate::oam_modes::LgModeSpec { p: 0, ell, w0 }.validate()?;
    }
    ComplexGrid::from_fn(n, half_width, |x, y| {
        superposed_amplitude(state.iter(), 0, w0, &CylindricalPoint::from_cartesian(x, y, 0.0))
    })
}

/// Number of density maxima on a circle through the grid, from bilinear
/// interpolation at 1440 angles. Bumps below 10⁻³ of the peak are ignored.
pub fn azimuthal_maxima(grid: &ComplexGrid, radius: f64) -> Result<usize> {
    let profile = grid.circle_profile(radius, 1440, |c| c.norm_sqr())?;
    Ok(count_cyclic_maxima(&profile, 1e-3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bec_dynamics::{DEFAULT_L_PERP, DEFAULT_L_Z};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn image(bp: Complex64, bm: Complex64) -> CondensateImage {
        CondensateImage {
            mode: CondensateModeSpec::new(DEFAULT_L_PERP, DEFAULT_L_Z, 2, Handedness::Plus).unwrap(),
            beta_plus: bp,
            beta_minus: bm,
            admixture: Complex64::new(1.0, 0.0),
        }
    }

    #[test]
    fn equal_superposition_has_four_lobes() {
        let img = image(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0));
        let g = img.vortex_grid(3.0 * DEFAULT_L_PERP, 121).unwrap();
        assert_eq!(azimuthal_maxima(&g, img.ring_radius()).unwrap(), 4);
        // density ∝ cos²(2φ)
        let r = img.ring_radius();
        let d0 = img.vortex_field(r, 0.0).norm_sqr();
        for k in 0..16 {
            let phi = k as f64 * PI / 16.0;
            let d = img.vortex_field(r * phi.cos(), r * phi.sin()).norm_sqr();
            assert!((d - d0 * (2.0 * phi).cos().powi(2)).abs() < 1e-12 * d0);
        }
    }

    #[test]
    fn single_vortex_ring_is_uniform_and_winds() {
        let img = image(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let r = img.ring_radius();
        let values: Vec<f64> = (0..64)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / 64.0;
                img.vortex_field(r * phi.cos(), r * phi.sin()).norm_sqr()
            })
            .collect();
        let (lo, hi) = values.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        assert!((hi - lo) / hi < 1e-12);
        let g = img.vortex_grid(3.0 * DEFAULT_L_PERP, 81).unwrap();
        assert!((g.winding_phase(15).unwrap() - 4.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn lg_superposition_grid_matches_sum() {
        let s = OamSuperposition::from_pairs([(2, Complex64::new(0.6, 0.0)), (-2, Complex64::new(0.0, 0.8))]);
        let g = lg_superposition_grid(&s, 1e-3, 2e-3, 41).unwrap();
        // counter-rotating pair: intensity has 2|ℓ| lobes
        assert_eq!(azimuthal_maxima(&g, 1e-3).unwrap(), 4);
    }
}
