//! Explicit Runge-Kutta integrators for small complex systems `ẏ = f(t, y)`.
//!
//! [`Dop853`] is the Dormand-Prince 8(5,3) pair with step-size control and a
//! seventh-order continuous extension for output at arbitrary times. [`rk4`]
//! is a classical fixed-step fourth-order method kept as a reference.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

mod tableau;

use tableau::{A, B, C, D, E3, E5, STAGES, STAGES_EXTENDED};

pub type State<const N: usize> = [Complex64; N];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
fn lincomb<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o += acc * h;
    }
    out
}

/// `y + h Σ_j w_j k_j`, skipping zero weights.
#[inline]
fn weighted<const N: usize>(y: &State<N>, h: f64, w: &[f64], k: &[State<N>]) -> State<N> {
    let mut acc = [ZERO; N];
    for (&wj, kj) in w.iter().zip(k) {
        if wj != 0.0 {
            for i in 0..N {
                acc[i] += kj[i] * wj;
            }
        }
    }
    std::array::from_fn(|i| y[i] + acc[i] * h)
}

/// Step-size controller settings.
#[derive(Debug, Clone, Copy)]
pub struct Dop853 {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed step; `None` means the whole span.
    pub h_max: Option<f64>,
    /// Steps smaller than `h_min_rel · |t_end − t0|` abort with a stiffness error.
    pub h_min_rel: f64,
    pub max_steps: usize,
    pub safety: f64,
}

impl Default for Dop853 {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, h_max: None, h_min_rel: 1e-14, max_steps: 5_000_000, safety: 0.9 }
    }
}

/// Counters from one adaptive run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ORDER: f64 = 7.0;

impl Dop853 {
    pub fn with_tolerance(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }

    /// Scaled error of the step, combining the fifth- and third-order
    /// estimates as in the original code.
    fn error_norm<const N: usize>(&self, h: f64, y0: &State<N>, y1: &State<N>, k: &[State<N>]) -> f64 {
        let e5 = weighted(&[ZERO; N], 1.0, &E5, k);
        let e3 = weighted(&[ZERO; N], 1.0, &E3, k);
        let (mut n5, mut n3) = (0.0, 0.0);
        for i in 0..N {
            let sc_re = self.atol + self.rtol * y0[i].re.abs().max(y1[i].re.abs());
            let sc_im = self.atol + self.rtol * y0[i].im.abs().max(y1[i].im.abs());
            n5 += (e5[i].re / sc_re).powi(2) + (e5[i].im / sc_im).powi(2);
            n3 += (e3[i].re / sc_re).powi(2) + (e3[i].im / sc_im).powi(2);
        }
        if n5 == 0.0 && n3 == 0.0 {
            return 0.0;
        }
        h.abs() * n5 / ((n5 + 0.01 * n3) * (2 * N) as f64).sqrt()
    }

    /// Starting step from the scaled size of `y` and `f(t0, y0)`.
    fn initial_step<const N: usize, F>(&self, f: &mut F, t0: f64, y0: &State<N>, f0: &State<N>, span: f64) -> f64
    where
        F: FnMut(f64, &State<N>) -> State<N>,
    {
        let scale = |c: f64| self.atol + self.rtol * c.abs();
        let (mut d0, mut d1) = (0.0, 0.0);
        for i in 0..N {
            d0 += (y0[i].re / scale(y0[i].re)).powi(2) + (y0[i].im / scale(y0[i].im)).powi(2);
            d1 += (f0[i].re / scale(y0[i].re)).powi(2) + (f0[i].im / scale(y0[i].im)).powi(2);
        }
        let (d0, d1) = ((d0 / (2 * N) as f64).sqrt(), (d1 / (2 * N) as f64).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1 = lincomb(y0, h0, &[(1.0, f0)]);
        let f1 = f(t0 + h0, &y1);
        let mut d2 = 0.0;
        for i in 0..N {
            let df = f1[i] - f0[i];
            d2 += (df.re / scale(y0[i].re)).powi(2) + (df.im / scale(y0[i].im)).powi(2);
        }
        let d2 = (d2 / (2 * N) as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / (ORDER + 1.0))
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// Integrates from `t0` and reports the solution at each of `times`,
    /// which must be non-decreasing and lie in `[t0, ∞)`.
    pub fn solve<const N: usize, F>(
        &self,
        mut f: F,
        t0: f64,
        y0: State<N>,
        times: &[f64],
    ) -> Result<(Vec<State<N>>, StepStats)>
    where
        F: FnMut(f64, &State<N>) -> State<N>,
    {
        if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < t0) {
            return Err(invalid("output times must be sorted and not precede t0"));
        }
        let mut out = Vec::with_capacity(times.len());
        let mut stats = StepStats::default();
        let Some(&t_end) = times.last() else {
            return Ok((out, stats));
        };
        let span = t_end - t0;
        let mut next = 0;
        while next < times.len() && times[next] <= t0 {
            out.push(y0);
            next += 1;
        }
        if next == times.len() {
            return Ok((out, stats));
        }

        let h_max = self.h_max.unwrap_or(span).min(span);
        let h_min = self.h_min_rel * span;
        let mut t = t0;
        let mut y = y0;
        let mut k = [[ZERO; N]; STAGES_EXTENDED];
        k[0] = f(t, &y);
        stats.evaluations += 1;
        let mut h = self.initial_step(&mut f, t0, &y0, &k[0], span).min(h_max);
        stats.evaluations += 1;
        let mut last_rejected = false;
        let exponent = -1.0 / (ORDER + 1.0);

        while next < times.len() {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::TooManySteps { max_steps: self.max_steps, t_end });
            }
            if h < h_min {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            if t + h > t_end || (t_end - (t + h)) < 1e-12 * span {
                h = t_end - t;
            }

            for s in 1..STAGES {
                let ys = weighted(&y, h, &A[s][..s], &k[..s]);
                k[s] = f(t + C[s] * h, &ys);
            }
            let y_new = weighted(&y, h, &B, &k[..STAGES]);
            k[STAGES] = f(t + h, &y_new);
            stats.evaluations += STAGES;

            let en = self.error_norm(h, &y, &y_new, &k[..=STAGES]);
            if !en.is_finite() {
                stats.rejected += 1;
                h *= MIN_FACTOR;
                last_rejected = true;
                continue;
            }

            if en <= 1.0 {
                let t_new = if h == t_end - t { t_end } else { t + h };
                let interior = next < times.len() && times[next] < t_new;
                if interior {
                    for s in STAGES + 1..STAGES_EXTENDED {
                        let ys = weighted(&y, h, &A[s][..s], &k[..s]);
                        k[s] = f(t + C[s] * h, &ys);
                    }
                    stats.evaluations += STAGES_EXTENDED - STAGES - 1;
                }
                let dense = interior.then(|| DenseStep::new(h, &y, &y_new, &k));
                while next < times.len() && times[next] <= t_new {
                    let ys = match &dense {
                        Some(d) if times[next] < t_new => d.eval(((times[next] - t) / h).clamp(0.0, 1.0)),
                        _ => y_new,
                    };
                    out.push(ys);
                    next += 1;
                }
                let mut factor = if en == 0.0 { MAX_FACTOR } else { (self.safety * en.powf(exponent)).min(MAX_FACTOR) };
                if last_rejected {
                    factor = factor.min(1.0);
                }
                t = t_new;
                y = y_new;
                k[0] = k[STAGES];
                stats.accepted += 1;
                last_rejected = false;
                h = (h * factor).min(h_max);
            } else {
                stats.rejected += 1;
                last_rejected = true;
                h *= (self.safety * en.powf(exponent)).max(MIN_FACTOR);
            }
        }
        Ok((out, stats))
    }
}

/// Seventh-order interpolant over one accepted step.
struct DenseStep<const N: usize> {
    y_old: State<N>,
    f: [State<N>; 7],
}

impl<const N: usize> DenseStep<N> {
    fn new(h: f64, y_old: &State<N>, y_new: &State<N>, k: &[State<N>; STAGES_EXTENDED]) -> Self {
        let f_old = &k[0];
        let f_new = &k[STAGES];
        let dy: State<N> = std::array::from_fn(|i| y_new[i] - y_old[i]);
        let mut f = [[ZERO; N]; 7];
        f[0] = dy;
        f[1] = std::array::from_fn(|i| f_old[i] * h - dy[i]);
        f[2] = std::array::from_fn(|i| dy[i] * 2.0 - (f_new[i] + f_old[i]) * h);
        for (row, d) in D.iter().enumerate() {
            f[3 + row] = weighted(&[ZERO; N], h, d, k);
        }
        Self { y_old: *y_old, f }
    }

    fn eval(&self, x: f64) -> State<N> {
        let mut y = [ZERO; N];
        for (j, fj) in self.f.iter().rev().enumerate() {
            for i in 0..N {
                y[i] += fj[i];
                y[i] *= if j % 2 == 0 { x } else { 1.0 - x };
            }
        }
        std::array::from_fn(|i| y[i] + self.y_old[i])
    }
}

/// Classical RK4 with steps no longer than `dt`, landing exactly on each of `times`.
pub fn rk4<const N: usize, F>(mut f: F, t0: f64, y0: State<N>, times: &[f64], dt: f64) -> Result<Vec<State<N>>>
where
    F: FnMut(f64, &State<N>) -> State<N>,
{
    if !(dt > 0.0) {
        return Err(invalid(format!("fixed step must be positive, got {dt}")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < t0) {
        return Err(invalid("output times must be sorted and not precede t0"));
    }
    let mut t = t0;
    let mut y = y0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let gap = target - t;
        if gap > 0.0 {
            let steps = (gap / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let h = gap / steps as f64;
            for s in 0..steps {
                let ts = t + s as f64 * h;
                let k1 = f(ts, &y);
                let k2 = f(ts + 0.5 * h, &lincomb(&y, h, &[(0.5, &k1)]));
                let k3 = f(ts + 0.5 * h, &lincomb(&y, h, &[(0.5, &k2)]));
                let k4 = f(ts + h, &lincomb(&y, h, &[(1.0, &k3)]));
                y = lincomb(&y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]);
            }
            t = target;
        }
        out.push(y);
    }
    Ok(out)
}
