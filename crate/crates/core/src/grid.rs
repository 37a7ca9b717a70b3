//! Square Cartesian sample grids of complex fields.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// An `n × n` complex field sampled on `[−half_width, half_width]²`.
///
/// Storage is row-major with the row index running over `y` and the column
/// index over `x`: cell `(i, j)` sits at `(x_j, y_i)` and is stored at
/// `data[i * n + j]`. Both axes go from `−half_width` to `+half_width`
/// inclusive with spacing `2·half_width/(n − 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    n: usize,
    half_width: f64,
    data: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn from_fn(n: usize, half_width: f64, mut f: impl FnMut(f64, f64) -> Complex64) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("grid size must be at least 2, got {n}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid(format!("grid half-width must be positive, got {half_width}")));
        }
        let step = 2.0 * half_width / (n - 1) as f64;
        let coord = |k: usize| -half_width + step * k as f64;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let y = coord(i);
            for j in 0..n {
                data.push(f(coord(j), y));
            }
        }
        Ok(Self { n, half_width, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    /// Coordinate of index `k` along either axis.
    pub fn coord(&self, k: usize) -> f64 {
        -self.half_width + self.spacing() * k as f64
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            n: self.n,
            half_width: self.half_width,
            data: self.data.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Index of the cell with the largest modulus (first one on ties).
    pub fn argmax_norm(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, c) in self.data.iter().enumerate() {
            if c.norm_sqr() > self.data[best].norm_sqr() {
                best = k;
            }
        }
        (best / self.n, best % self.n)
    }

    /// Total phase accumulated walking counter-clockwise around the square
    /// ring of cells `ring` steps out from the grid center.
    ///
    /// Each increment is wrapped into `(−π, π]`, so the result is `2π` times
    /// the enclosed winding number as long as the field is resolved.
    pub fn winding_phase(&self, ring: usize) -> Result<f64> {
        let (c_lo, c_hi) = if self.n % 2 == 1 {
            ((self.n - 1) / 2, (self.n - 1) / 2)
        } else {
            (self.n / 2 - 1, self.n / 2)
        };
        if ring == 0 && c_lo == c_hi {
            return Err(invalid("winding ring must enclose the center"));
        }
        if ring > c_lo {
            return Err(invalid(format!("ring {ring} leaves the grid")));
        }
        let lo = c_lo - ring;
        let hi = c_hi + ring;
        let mut path = Vec::new();
        for j in lo..hi {
            path.push((lo, j));
        }
        for i in lo..hi {
            path.push((i, hi));
        }
        for j in (lo + 1..=hi).rev() {
            path.push((hi, j));
        }
        for i in (lo + 1..=hi).rev() {
            path.push((i, lo));
        }
        let phases: Vec<f64> = path.iter().map(|&(i, j)| self.get(i, j).arg()).collect();
        Ok(accumulate_phase(&phases, true))
    }

    /// Bilinearly interpolated samples of `f(cell)` on a circle of the given
    /// radius around the origin, at `n_angles` equally spaced angles from 0.
    pub fn circle_profile(&self, radius: f64, n_angles: usize, f: impl Fn(Complex64) -> f64) -> Result<Vec<f64>> {
        if radius <= 0.0 || radius >= self.half_width {
            return Err(invalid(format!(
                "profile radius {radius} must lie strictly inside (0, {})",
                self.half_width
            )));
        }
        let h = self.spacing();
        let values: Vec<f64> = self.data.iter().map(|&c| f(c)).collect();
        let at = |i: usize, j: usize| values[i * self.n + j];
        Ok((0..n_angles)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / n_angles as f64;
                let gx = (radius * phi.cos() + self.half_width) / h;
                let gy = (radius * phi.sin() + self.half_width) / h;
                let j = (gx.floor() as usize).min(self.n - 2);
                let i = (gy.floor() as usize).min(self.n - 2);
                let fx = gx - j as f64;
                let fy = gy - i as f64;
                (1.0 - fy) * ((1.0 - fx) * at(i, j) + fx * at(i, j + 1))
                    + fy * ((1.0 - fx) * at(i + 1, j) + fx * at(i + 1, j + 1))
            })
            .collect())
    }
}

/// Sums successive phase differences, each wrapped into `(−π, π]`.
/// With `closed`, the step from the last sample back to the first is included.
pub fn accumulate_phase(phases: &[f64], closed: bool) -> f64 {
    let mut total = 0.0;
    let n = phases.len();
    let steps = if closed { n } else { n.saturating_sub(1) };
    for k in 0..steps {
        total += wrap_to_pi(phases[(k + 1) % n] - phases[k]);
    }
    total
}

pub fn wrap_to_pi(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Number of strict local maxima in a cyclic sequence whose prominence over
/// both neighbouring minima exceeds `rel_prominence · max(values)`.
pub fn count_cyclic_maxima(values: &[f64], rel_prominence: f64) -> usize {
    let n = values.len();
    if n < 3 {
        return 0;
    }
    let peak = values.iter().cloned().fold(f64::MIN, f64::max);
    let threshold = rel_prominence * peak.abs();
    // Start the scan at the global minimum so every bump is bracketed.
    let start = (0..n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap())
        .unwrap();
    let mut count = 0;
    let mut low = values[start];
    let mut high = low;
    let mut rising = true;
    for k in 1..=n {
        let v = values[(start + k) % n];
        if rising {
            if v > high {
                high = v;
            } else if high - v > threshold && high - low > threshold {
                count += 1;
                rising = false;
                low = v;
            }
        } else if v < low {
            low = v;
        } else if v - low > threshold {
            rising = true;
            high = v;
        }
    }
    count
}
