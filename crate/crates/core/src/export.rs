//! Plain-text and CSV writers.
//!
//! Every float is written as `{:.16e}` (17 significant digits), which
//! reloads bit-for-bit. Files start with `# key = value` header lines.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::bec_dynamics::{transfer_function, DetuningSchedule, PhysicalParams, Trajectory};
use crate::error::Result;
use crate::grid::ComplexGrid;
use crate::optics_network::OamSuperposition;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Ordered `# key = value` header lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Header {
    lines: Vec<(String, String)>,
}

impl Header {
    pub fn new(kind: &str) -> Self {
        let mut h = Self::default();
        h.push("file", kind);
        h.push("code_version", CODE_VERSION);
        h
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.lines.push((key.into(), value.into()));
        self
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.push(key, fmt_f(value))
    }

    pub fn complex(&mut self, key: &str, value: Complex64) -> &mut Self {
        self.num(format!("{key}_re"), value.re);
        self.num(format!("{key}_im"), value.im)
    }

    pub fn params(&mut self, p: &PhysicalParams) -> &mut Self {
        self.num("omega_perp_hz", p.omega_perp)
            .num("kappa_hz", p.kappa)
            .num("coupling_hz", p.coupling)
            .complex("a_plus", p.a_plus)
            .complex("a_minus", p.a_minus)
            .push("ell", p.ell.to_string())
            .num("coeff_alpha_self", p.coefficients.alpha_self)
            .num("coeff_beta_self", p.coefficients.beta_self)
            .num("coeff_vortex_offset", p.coefficients.vortex_offset)
            .push("reference_coefficients", p.coefficients.is_reference().to_string())
            .push(
                "rate_units",
                match p.units {
                    crate::bec_dynamics::RateUnits::AsGiven => "as_given",
                    crate::bec_dynamics::RateUnits::CyclicHz => "cyclic_hz",
                },
            )
    }

    pub fn schedule(&mut self, s: &DetuningSchedule) -> &mut Self {
        match *s {
            DetuningSchedule::Constant { delta0 } => self.push("schedule", "constant").num("delta0_hz", delta0),
            DetuningSchedule::Linear { delta0, slope } => self
                .push("schedule", "linear")
                .num("delta0_hz", delta0)
                .num("slope_hz_per_s", slope),
        }
    }

    /// The header block as written at the top of a file.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write_into(&mut out);
        out
    }

    fn write_into(&self, out: &mut String) {
        for (k, v) in &self.lines {
            let _ = writeln!(out, "# {k} = {v}");
        }
    }
}

/// Columns: `t, Re/Im of α, β₊, β₋, |α|², |β₊|², |β₋|², f, δ`.
pub fn trajectory_csv(traj: &Trajectory, header: &Header) -> String {
    let mut out = String::new();
    header.write_into(&mut out);
    out.push_str(
        "t_s,alpha_re,alpha_im,beta_plus_re,beta_plus_im,beta_minus_re,beta_minus_im,\
         pop_alpha,pop_beta_plus,pop_beta_minus,transfer_f,delta_hz\n",
    );
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let [pa, pp, pm] = s.populations();
        let row = [
            *t,
            s.alpha.re,
            s.alpha.im,
            s.beta_plus.re,
            s.beta_plus.im,
            s.beta_minus.re,
            s.beta_minus.im,
            pa,
            pp,
            pm,
            transfer_function(s),
            traj.schedule.at(*t),
        ];
        push_row(&mut out, &row);
    }
    out
}

/// Columns: `ell, re, im`, ascending in ℓ.
pub fn superposition_csv(state: &OamSuperposition, header: &Header) -> String {
    let mut out = String::new();
    header.write_into(&mut out);
    out.push_str("ell,re,im\n");
    for (ell, c) in state.iter() {
        let _ = writeln!(out, "{ell},{},{}", fmt_f(c.re), fmt_f(c.im));
    }
    out
}

/// Columns: `x, y, re, im, abs2, arg`, in grid storage order.
pub fn grid_csv(grid: &ComplexGrid, header: &Header) -> String {
    let mut out = String::new();
    header.write_into(&mut out);
    out.push_str("x,y,re,im,abs2,arg\n");
    let n = grid.n();
    for i in 0..n {
        for j in 0..n {
            let c = grid.get(i, j);
            push_row(&mut out, &[grid.coord(j), grid.coord(i), c.re, c.im, c.norm_sqr(), c.arg()]);
        }
    }
    out
}

/// One text row per grid row (`y` ascending), whitespace separated.
pub fn grid_matrix(grid: &ComplexGrid, header: &Header, f: impl Fn(Complex64) -> f64) -> String {
    let mut out = String::new();
    header.write_into(&mut out);
    let n = grid.n();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| fmt_f(f(grid.get(i, j)))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn grid_header(kind: &str, grid: &ComplexGrid) -> Header {
    let mut h = Header::new(kind);
    h.push("n", grid.n().to_string())
        .num("half_width_m", grid.half_width())
        .push("layout", "row-major; row index over y, column index over x; both ascending");
    h
}

pub(crate) fn push_row(out: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&fmt_f(*v));
    }
    out.push('\n');
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<std::path::PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}
