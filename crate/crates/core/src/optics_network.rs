//! Two-path interferometer acting on OAM superpositions.
//!
//! States live in `{port 1, port 2} ⊗ span{|ℓ⟩}`. Every element acts on the
//! port index and/or the charge label and is lossless.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deviation of `|r|² + |t|²` from 1 tolerated by [`SplitterSpec::new`].
pub const UNITARITY_TOL: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `Σ c_ℓ |ℓ⟩`, keyed by winding number.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OamSuperposition {
    amplitudes: BTreeMap<i32, Complex64>,
}

impl OamSuperposition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(ell: i32, amplitude: Complex64) -> Self {
        let mut s = Self::new();
        s.add(ell, amplitude);
        s
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i32, Complex64)>) -> Self {
        let mut s = Self::new();
        for (ell, c) in pairs {
            s.add(ell, c);
        }
        s
    }

    /// Adds `c` to the amplitude of `|ℓ⟩`.
    pub fn add(&mut self, ell: i32, c: Complex64) {
        let entry = self.amplitudes.entry(ell).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        // exact cancellations drop out of the support
        if *entry == Complex64::new(0.0, 0.0) {
            self.amplitudes.remove(&ell);
        }
    }

    pub fn amplitude(&self, ell: i32) -> Complex64 {
        self.amplitudes.get(&ell).copied().unwrap_or_default()
    }

    /// Components in ascending order of `ℓ`.
    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.amplitudes.iter().map(|(&l, &c)| (l, c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_pairs(self.iter().map(|(l, c)| (l, c * factor)))
    }

    /// Maps every `|ℓ⟩` to `|−ℓ⟩`.
    pub fn flip_handedness(&self) -> Self {
        Self::from_pairs(self.iter().map(|(l, c)| (-l, c)))
    }

    /// Linear combination `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        let mut out = self.scale(a);
        for (l, c) in other.iter() {
            out.add(l, c * b);
        }
        out
    }
}

/// Output port of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Port {
    One,
    Two,
}

impl TryFrom<u8> for Port {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Port::One),
            2 => Ok(Port::Two),
            other => Err(format!("port must be 1 or 2, got {other}")),
        }
    }
}

impl From<Port> for u8 {
    fn from(p: Port) -> u8 {
        match p {
            Port::One => 1,
            Port::Two => 2,
        }
    }
}

/// One superposition per spatial path.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathOamState {
    pub port1: OamSuperposition,
    pub port2: OamSuperposition,
}

impl PathOamState {
    /// `(|ℓ⟩, 0)ᵀ`: a pure charge entering port 1.
    pub fn input(ell: i32) -> Self {
        Self { port1: OamSuperposition::single(ell, Complex64::new(1.0, 0.0)), port2: OamSuperposition::new() }
    }

    pub fn port(&self, port: Port) -> &OamSuperposition {
        match port {
            Port::One => &self.port1,
            Port::Two => &self.port2,
        }
    }

    fn port_mut(&mut self, port: Port) -> &mut OamSuperposition {
        match port {
            Port::One => &mut self.port1,
            Port::Two => &mut self.port2,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.port1.norm_sqr() + self.port2.norm_sqr()
    }
}

/// Beam-splitter amplitudes: reflection `r`, transmission `i·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitterSpec {
    pub r: Complex64,
    pub t: Complex64,
}

impl SplitterSpec {
    pub fn new(r: Complex64, t: Complex64) -> Result<Self> {
        let spec = Self { r, t };
        spec.validate()?;
        Ok(spec)
    }

    /// Real amplitudes with transmitted intensity fraction `|t|²`.
    pub fn from_transmission(t_sqr: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t_sqr) {
            return Err(crate::error::invalid(format!(
                "transmitted fraction must lie in [0, 1], got {t_sqr}"
            )));
        }
        Self::new(Complex64::new((1.0 - t_sqr).sqrt(), 0.0), Complex64::new(t_sqr.sqrt(), 0.0))
    }

    pub fn balanced() -> Self {
        Self { r: Complex64::new(FRAC_1_SQRT_2, 0.0), t: Complex64::new(FRAC_1_SQRT_2, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.r.norm_sqr() + self.t.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > UNITARITY_TOL {
            return Err(Error::NonUnitarySplitter { norm });
        }
        Ok(())
    }

    /// The 2×2 port matrix `[[r, i·t̄], [i·t, r̄]]`.
    ///
    /// Column 1 is `(r, i·t)`, the response to light entering port 1. The
    /// conjugates in column 2 complete it to a unitary for complex `r, t`;
    /// for real amplitudes this is `[[r, i·t], [i·t, r]]`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.r, I * self.t.conj()], [I * self.t, self.r.conj()]]
    }
}

pub fn apply_beam_splitter(state: &PathOamState, spec: &SplitterSpec) -> Result<PathOamState> {
    spec.validate()?;
    let m = spec.matrix();
    Ok(PathOamState {
        port1: state.port1.combine(m[0][0], &state.port2, m[0][1]),
        port2: state.port1.combine(m[1][0], &state.port2, m[1][1]),
    })
}

pub fn apply_dove_prism(state: &PathOamState, port: Port) -> PathOamState {
    let mut out = state.clone();
    *out.port_mut(port) = state.port(port).flip_handedness();
    out
}

pub fn apply_phase(state: &PathOamState, port: Port, phi: f64) -> PathOamState {
    let mut out = state.clone();
    *out.port_mut(port) = state.port(port).scale(Complex64::from_polar(1.0, phi));
    out
}

/// A perfectly reflecting mirror; identity on the OAM label.
///
/// Any handedness flip from the two arm mirrors cancels between the arms and
/// is folded into the arm-phase convention.
pub fn apply_mirror(state: &PathOamState, _port: Port) -> PathOamState {
    state.clone()
}

/// One optical element of a network description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "element", rename_all = "snake_case")]
pub enum Element {
    BeamSplitter { r: Complex64, t: Complex64 },
    DovePrism { port: Port },
    Phase { port: Port, phi: f64 },
    Mirror { port: Port },
}

impl Element {
    pub fn apply(&self, state: &PathOamState) -> Result<PathOamState> {
        Ok(match *self {
            Element::BeamSplitter { r, t } => apply_beam_splitter(state, &SplitterSpec { r, t })?,
            Element::DovePrism { port } => apply_dove_prism(state, port),
            Element::Phase { port, phi } => apply_phase(state, port, phi),
            Element::Mirror { port } => apply_mirror(state, port),
        })
    }
}

/// An ordered element list fed with a single charge at port 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub input_ell: i32,
    pub elements: Vec<Element>,
}

impl Network {
    /// First splitter `spec`, dove prism in arm 1, phase `φ` in arm 2, both
    /// mirrors, then a 50:50 splitter.
    pub fn mach_zehnder(ell: i32, spec: &SplitterSpec, phi: f64) -> Self {
        let half = SplitterSpec::balanced();
        Self {
            input_ell: ell,
            elements: vec![
                Element::BeamSplitter { r: spec.r, t: spec.t },
                Element::DovePrism { port: Port::One },
                Element::Phase { port: Port::Two, phi },
                Element::Mirror { port: Port::One },
                Element::Mirror { port: Port::Two },
                Element::BeamSplitter { r: half.r, t: half.t },
            ],
        }
    }

    pub fn run(&self) -> Result<PathOamState> {
        self.elements
            .iter()
            .try_fold(PathOamState::input(self.input_ell), |s, e| e.apply(&s))
    }
}

/// Output of the Mach-Zehnder preparation stage.
///
/// Port 1 carries `(r|−ℓ⟩ − e^{iφ} t|ℓ⟩)/√2` and port 2
/// `i(r|−ℓ⟩ + e^{iφ} t|ℓ⟩)/√2`; at `φ = π` port 1 is `(t|ℓ⟩ + r|−ℓ⟩)/√2`.
pub fn mach_zehnder(ell: i32, spec: &SplitterSpec, phi: f64) -> Result<PathOamState> {
    spec.validate()?;
    Network::mach_zehnder(ell, spec, phi).run()
}

/// Discards the other port and rescales the chosen one to unit norm.
pub fn renormalize_port(state: &PathOamState, port: Port) -> Result<OamSuperposition> {
    let s = state.port(port);
    let norm = s.norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::ZeroNormPort { port: port.into() });
    }
    Ok(s.scale(Complex64::new(1.0 / norm.sqrt(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn balanced_splitter_on_port1() {
        let out = apply_beam_splitter(&PathOamState::input(3), &SplitterSpec::balanced()).unwrap();
        assert!(close(out.port1.amplitude(3), c(FRAC_1_SQRT_2, 0.0)));
        assert!(close(out.port2.amplitude(3), c(0.0, FRAC_1_SQRT_2)));
    }

    #[test]
    fn mirror_like_splitter() {
        let spec = SplitterSpec::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let out = apply_beam_splitter(&PathOamState::input(2), &spec).unwrap();
        assert!((out.port1.amplitude(2).norm() - 1.0).abs() < 1e-15);
        assert_eq!(out.port2.norm_sqr(), 0.0);
    }

    #[test]
    fn non_unitary_splitter_rejected() {
        assert!(matches!(
            SplitterSpec::new(c(0.8, 0.0), c(0.8, 0.0)),
            Err(Error::NonUnitarySplitter { .. })
        ));
        let bad = SplitterSpec { r: c(1.0, 0.0), t: c(0.1, 0.0) };
        assert!(apply_beam_splitter(&PathOamState::input(1), &bad).is_err());
    }

    #[test]
    fn dove_prism_flips_charge() {
        let s = PathOamState { port1: OamSuperposition::single(2, c(1.0, 0.0)), port2: OamSuperposition::single(5, c(0.0, 1.0)) };
        let out = apply_dove_prism(&s, Port::One);
        assert_eq!(out.port1, OamSuperposition::single(-2, c(1.0, 0.0)));
        assert_eq!(out.port2, s.port2);
        assert_eq!(apply_dove_prism(&out, Port::One), s);
        let zero = PathOamState { port1: OamSuperposition::single(0, c(0.3, 0.4)), port2: OamSuperposition::new() };
        assert_eq!(apply_dove_prism(&zero, Port::One), zero);
    }

    #[test]
    fn phase_element() {
        let s = PathOamState::input(2);
        assert_eq!(apply_phase(&s, Port::One, 0.0), s);
        let flipped = apply_phase(&s, Port::One, std::f64::consts::PI);
        assert!(close(flipped.port1.amplitude(2), c(-1.0, 0.0)));
    }

    #[test]
    fn balanced_mach_zehnder_matches_closed_form() {
        let out = mach_zehnder(2, &SplitterSpec::balanced(), std::f64::consts::PI).unwrap();
        assert!(close(out.port1.amplitude(2), c(0.5, 0.0)));
        assert!(close(out.port1.amplitude(-2), c(0.5, 0.0)));
        assert!(close(out.port2.amplitude(-2), c(0.0, 0.5)));
        assert!(close(out.port2.amplitude(2), c(0.0, -0.5)));
    }

    #[test]
    fn fully_transmitting_mach_zehnder() {
        let spec = SplitterSpec::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let out = mach_zehnder(2, &spec, std::f64::consts::PI).unwrap();
        assert!(close(out.port1.amplitude(2), c(FRAC_1_SQRT_2, 0.0)));
        assert!(close(out.port2.amplitude(2), c(0.0, -FRAC_1_SQRT_2)));
        assert!(out.port1.amplitude(-2).norm() < 1e-15);
    }

    #[test]
    fn renormalization() {
        let spec = SplitterSpec::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let out = mach_zehnder(2, &spec, std::f64::consts::PI).unwrap();
        let prepared = renormalize_port(&out, Port::One).unwrap();
        assert!(close(prepared.amplitude(2), spec.t));
        assert!(close(prepared.amplitude(-2), spec.r));

        let single = PathOamState::input(4);
        assert_eq!(renormalize_port(&single, Port::One).unwrap(), single.port1);
        assert!(matches!(renormalize_port(&single, Port::Two), Err(Error::ZeroNormPort { port: 2 })));
    }

    #[test]
    fn network_config_roundtrip() {
        let net = Network::mach_zehnder(2, &SplitterSpec::balanced(), 1.0);
        let text = toml::to_string(&net).unwrap();
        let back: Network = toml::from_str(&text).unwrap();
        assert_eq!(back, net);
        assert!(toml::from_str::<Network>("input_ell = 1\n[[elements]]\nelement = \"mirror\"\nport = 3\n").is_err());
    }
}
