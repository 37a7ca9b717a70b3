//! Gauss-type quadrature rules used by the normalization and overlap oracles.
//!
//! Nodes and weights come from `gauss-quad` (Golub-Welsch). This module only
//! adapts them to the integrals needed here: Gauss-Legendre on a finite
//! interval, and Gauss-Hermite rescaled to a Gaussian of arbitrary width so
//! that plain functions on ℝ or ℝ³ can be integrated.

use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};

fn degree(n: usize) -> Result<NonZeroUsize> {
    NonZeroUsize::new(n).ok_or_else(|| invalid("quadrature order must be at least 1"))
}

/// Gauss-Legendre rule mapped onto `[a, b]`.
#[derive(Debug, Clone)]
pub struct LegendreRule {
    nodes: Vec<(f64, f64)>,
}

impl LegendreRule {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        let rule = GaussLegendre::new(degree(n)?);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (mid + half * x, half * w))
            .collect();
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().map(|&(x, w)| w * f(x)).sum()
    }
}

/// Gauss-Hermite rule for `∫ f(x) dx` over ℝ where `f` decays like
/// `exp(−x²/scale²)`.
///
/// Nodes are `scale·uᵢ` and weights `scale·wᵢ·exp(uᵢ²)`, so the rule is
/// exact when `f(x)·exp(x²/scale²)` is a polynomial of degree `< 2n`.
#[derive(Debug, Clone)]
pub struct HermiteRule {
    nodes: Vec<(f64, f64)>,
}

impl HermiteRule {
    pub fn new(n: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("Gauss-Hermite scale must be positive, got {scale}")));
        }
        let rule = GaussHermite::new(degree(n)?);
        let nodes = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(u, w)| (scale * u, scale * (w.ln() + u * u).exp()))
            .collect();
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Tensor-product Gauss-Hermite rule on ℝ³.
#[derive(Debug, Clone)]
pub struct Hermite3 {
    x: HermiteRule,
    y: HermiteRule,
    z: HermiteRule,
}

impl Hermite3 {
    /// `n` nodes per axis; `scales` are the Gaussian widths along x, y, z.
    pub fn new(n: usize, scales: [f64; 3]) -> Result<Self> {
        Ok(Self {
            x: HermiteRule::new(n, scales[0])?,
            y: HermiteRule::new(n, scales[1])?,
            z: HermiteRule::new(n, scales[2])?,
        })
    }

    pub fn order(&self) -> usize {
        self.x.len()
    }

    /// Integrates a complex function over ℝ³.
    ///
    /// x-slices are evaluated in parallel and summed in node order, so the
    /// result does not depend on thread scheduling.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn([f64; 3]) -> Complex64 + Sync,
    {
        let slices: Vec<Complex64> = self
            .x
            .nodes()
            .par_iter()
            .map(|&(x, wx)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(y, wy) in self.y.nodes() {
                    for &(z, wz) in self.z.nodes() {
                        acc += f([x, y, z]) * (wy * wz);
                    }
                }
                acc * wx
            })
            .collect();
        slices.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b)
    }

    pub fn integrate_real<F>(&self, f: F) -> f64
    where
        F: Fn([f64; 3]) -> f64 + Sync,
    {
        self.integrate(|p| Complex64::new(f(p), 0.0)).re
    }
}
