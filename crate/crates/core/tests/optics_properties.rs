use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use vortexsim::optics_network::{
    apply_beam_splitter, apply_dove_prism, apply_mirror, apply_phase, mach_zehnder, renormalize_port,
    OamSuperposition, PathOamState, Port, SplitterSpec,
};

type M4 = [[Complex64; 4]; 4];

fn unitary_spec() -> impl Strategy<Value = SplitterSpec> {
    (0.0..PI / 2.0, -PI..PI, -PI..PI).prop_map(|(theta, pr, pt)| {
        SplitterSpec::new(Complex64::from_polar(theta.cos(), pr), Complex64::from_polar(theta.sin(), pt)).unwrap()
    })
}

fn superposition() -> impl Strategy<Value = OamSuperposition> {
    prop::collection::vec((-6i32..=6, -1.0..1.0f64, -1.0..1.0f64), 0..5)
        .prop_map(|v| OamSuperposition::from_pairs(v.into_iter().map(|(l, re, im)| (l, Complex64::new(re, im)))))
}

fn two_port() -> impl Strategy<Value = PathOamState> {
    (superposition(), superposition()).prop_map(|(port1, port2)| PathOamState { port1, port2 })
}

fn port() -> impl Strategy<Value = Port> {
    prop_oneof![Just(Port::One), Just(Port::Two)]
}

fn mul(a: &M4, b: &M4) -> M4 {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn diag(d: [Complex64; 4]) -> M4 {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        m[i][i] = d[i];
    }
    m
}

/// Basis `(port 1, ℓ), (port 1, −ℓ), (port 2, ℓ), (port 2, −ℓ)`; splitter `[[r, i t̄], [i t, r̄]]`.
fn splitter_matrix(r: Complex64, t: Complex64) -> M4 {
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    let (a, b, c, d) = (r, i * t.conj(), i * t, r.conj());
    [[a, z, b, z], [z, a, z, b], [c, z, d, z], [z, c, z, d]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn every_element_preserves_two_port_norm(
        state in two_port(), spec in unitary_spec(), p in port(), phi in -PI..PI,
    ) {
        let before = state.norm_sqr();
        let outs = [
            apply_beam_splitter(&state, &spec).unwrap(),
            apply_dove_prism(&state, p),
            apply_phase(&state, p, phi),
            apply_mirror(&state, p),
        ];
        for out in outs {
            prop_assert!((out.norm_sqr() - before).abs() <= 1e-12 * before.max(1.0));
        }
    }

    #[test]
    fn output_norm_is_one_for_any_unitary_splitter(spec in unitary_spec(), phi in -PI..PI, ell in 1i32..=10) {
        let out = mach_zehnder(ell, &spec, phi).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn renormalized_port_one_has_splitter_weights(spec in unitary_spec(), phi in -PI..PI, ell in 1i32..=10) {
        let p1 = renormalize_port(&mach_zehnder(ell, &spec, phi).unwrap(), Port::One).unwrap();
        prop_assert!((p1.amplitude(ell).norm_sqr() - spec.t.norm_sqr()).abs() <= 1e-12);
        prop_assert!((p1.amplitude(-ell).norm_sqr() - spec.r.norm_sqr()).abs() <= 1e-12);
        prop_assert!((p1.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn network_equals_composed_matrix(spec in unitary_spec(), phi in -PI..PI, ell in 1i32..=10) {
        let one = Complex64::new(1.0, 0.0);
        let dove = {
            let z = Complex64::new(0.0, 0.0);
            [[z, one, z, z], [one, z, z, z], [z, z, one, z], [z, z, z, one]]
        };
        let e = Complex64::from_polar(1.0, phi);
        let phase = diag([one, one, e, e]);
        let mirrors = diag([one; 4]);
        let h = FRAC_1_SQRT_2;
        let total = [
            splitter_matrix(Complex64::new(h, 0.0), Complex64::new(h, 0.0)),
            mirrors,
            phase,
            dove,
            splitter_matrix(spec.r, spec.t),
        ]
        .iter()
        .fold(diag([one; 4]), |acc, m| mul(&acc, m));

        let out = mach_zehnder(ell, &spec, phi).unwrap();
        let got = [
            out.port1.amplitude(ell),
            out.port1.amplitude(-ell),
            out.port2.amplitude(ell),
            out.port2.amplitude(-ell),
        ];
        for (k, g) in got.iter().enumerate() {
            prop_assert!((g - total[k][0]).norm() <= 1e-12, "component {k}: {g} vs {}", total[k][0]);
        }
    }
}
