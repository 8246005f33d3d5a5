use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::linalg::Mat;

fn assert_orthonormal(basis: &SingleParticleBasis) {
    let gram = basis.gram();
    let err = (gram - Mat::identity(basis.cutoff(), basis.cutoff())).amax();
    assert!(err <= ORTHONORMALITY_TOL, "orthonormality error {err:e}");
}

#[test]
fn harmonic_energies_are_analytic() {
    let basis = solve_trap(&TrapPotential::harmonic(1.0), 5).unwrap();
    assert_eq!(basis.energies(), &[0.5, 1.5, 2.5, 3.5, 4.5]);
    assert_orthonormal(&basis);
    assert_eq!(basis.sign_changes(), vec![0, 1, 2, 3, 4]);
}

#[test]
fn infinite_well_energies_are_analytic() {
    let basis = solve_trap(&TrapPotential::infinite_well(1.0), 3).unwrap();
    let expected = [PI * PI / 2.0, 2.0 * PI * PI, 4.5 * PI * PI];
    for (e, x) in basis.energies().iter().zip(expected) {
        assert!(((e - x) / x).abs() <= 1e-12);
    }
    assert!((basis.energy(0) - 4.9348).abs() < 1e-4);
    assert!((basis.energy(2) - 44.4132).abs() < 1e-4);
    assert_orthonormal(&basis);
}

#[test]
fn large_cutoffs_stay_orthonormal() {
    for trap in [TrapPotential::harmonic(1.0), TrapPotential::infinite_well(2.0)] {
        let basis = solve_trap(&trap, 40).unwrap();
        assert_orthonormal(&basis);
        assert_eq!(basis.sign_changes(), (0..40).collect::<Vec<_>>());
    }
}

#[test]
fn zero_cutoff_is_invalid() {
    let err = solve_trap(&TrapPotential::harmonic(1.0), 0).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
}

#[test]
fn invalid_trap_parameters_are_rejected() {
    assert!(solve_trap(&TrapPotential::harmonic(0.0), 3).is_err());
    assert!(solve_trap(&TrapPotential::infinite_well(-1.0), 3).is_err());
    assert!(solve_trap(&TrapPotential::harmonic(1.0).with_mass(0.0), 3).is_err());
}

#[test]
fn quadrature_order_below_cutoff_requirement_is_a_resolution_error() {
    let opts = SolveOptions { order: Some(5) };
    let err = solve_trap_with(&TrapPotential::harmonic(1.0), 10, &opts).unwrap_err();
    assert!(matches!(err, Error::Resolution { .. }));
    // Exact for quartic products but too few nodes for the pair products.
    let opts = SolveOptions { order: Some(21) };
    let err = solve_trap_with(&TrapPotential::harmonic(1.0), 11, &opts).unwrap_err();
    assert!(matches!(err, Error::Resolution { mode: Some(_), .. }), "{err}");
}

// ---- quadrature examples ---------------------------------------------------

#[test]
fn harmonic_rule_normalizes_ground_state() {
    let trap = TrapPotential::harmonic(1.0);
    let rule = quadrature_rule(&trap, 40).unwrap();
    let phi0 = |x: f64| PI.powf(-0.25) * (-0.5 * x * x).exp();
    let norm = rule.integrate(|x| phi0(x).powi(2));
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn harmonic_rule_integrates_gaussian_quartic() {
    // Oracle: ∫ π^{-1} e^{-2x²} dx = 1/sqrt(2π), evaluated in closed form.
    let trap = TrapPotential::harmonic(1.0);
    let rule = quadrature_rule(&trap, 64).unwrap();
    let phi0 = |x: f64| PI.powf(-0.25) * (-0.5 * x * x).exp();
    let quartic = rule.integrate(|x| phi0(x).powi(4));
    assert!((quartic - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-10);
    assert!((quartic - 0.398942).abs() < 1e-6);
}

/// Composite Simpson rule with many panels: an independent oracle for
/// smooth integrands on a finite interval.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

#[test]
fn well_rule_integrates_sine_quartic() {
    let f = |x: f64| 4.0 * (PI * x).sin().powi(4);
    let oracle = simpson(f, 0.0, 1.0, 20_000);
    assert!((oracle - 1.5).abs() < 1e-12);
    let rule = quadrature_rule(&TrapPotential::infinite_well(1.0), 64).unwrap();
    assert!((rule.integrate(f) - oracle).abs() < 1e-10);
}

#[test]
fn mode_evaluation_matches_closed_forms() {
    let basis = solve_trap(&TrapPotential::harmonic(2.0).with_mass(0.5), 4).unwrap();
    // m ω = 1: φ_1(x) = sqrt(2) π^{-1/4} x e^{-x²/2}
    let x = 0.7;
    let expected = 2f64.sqrt() * PI.powf(-0.25) * x * (-0.5 * x * x).exp();
    assert!((basis.evaluate(1, x) - expected).abs() < 1e-14);
    let well = solve_trap(&TrapPotential::infinite_well(2.0), 3).unwrap();
    assert!((well.evaluate(1, 0.5) - (PI * 0.5).sin()).abs() < 1e-14);
    assert_eq!(well.evaluate(0, -0.1), 0.0);
}

// ---- custom traps ----------------------------------------------------------

/// Rayleigh-Ritz oracle for `p²/2 + x⁴` in a harmonic-oscillator basis of
/// frequency `omega`, with `x` built from ladder operators.
fn quartic_variational(size: usize, omega: f64) -> Vec<f64> {
    let big = size + 4;
    let mut x = Mat::zeros(big, big);
    for n in 1..big {
        let v = (n as f64 / (2.0 * omega)).sqrt();
        x[(n - 1, n)] = v;
        x[(n, n - 1)] = v;
    }
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let mut h = Mat::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            let ho = if i == j { omega * (i as f64 + 0.5) } else { 0.0 };
            h[(i, j)] = ho - 0.5 * omega * omega * x2[(i, j)] + x4[(i, j)];
        }
    }
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn variational_oracle_is_converged() {
    let a = quartic_variational(120, 3.0);
    let b = quartic_variational(160, 3.5);
    for n in 0..4 {
        assert!((a[n] - b[n]).abs() < 1e-10, "level {n}: {} vs {}", a[n], b[n]);
    }
    // p² + y⁴ has ground energy 1.0603620904841829; rescaling x = 2^{-1/6} y
    // maps p²/2 + x⁴ onto 2^{-2/3} (p² + y⁴).
    let literature = 2f64.powf(-2.0 / 3.0) * 1.060_362_090_484_182_9;
    assert!((a[0] - literature).abs() < 1e-9, "{} vs {literature}", a[0]);
}

#[test]
fn quartic_trap_matches_variational_oracle() {
    let oracle = quartic_variational(160, 3.5);
    let pot = CustomPotential::from_fn(|x| x.powi(4), -6.0, 6.0, 24_001).unwrap();
    let trap = TrapPotential::custom(pot);
    let basis = solve_trap_with(&trap, 4, &SolveOptions { order: Some(95_999) }).unwrap();
    for (n, &expected) in oracle.iter().enumerate().take(4) {
        let err = (basis.energy(n) - expected).abs();
        assert!(err < 1e-6, "level {n}: {} vs {expected} (err {err:e})", basis.energy(n));
    }
    assert_orthonormal(&basis);
    assert_eq!(basis.sign_changes(), vec![0, 1, 2, 3]);
}

#[test]
fn sampled_harmonic_potential_reproduces_oscillator() {
    let pot = CustomPotential::from_fn(|x| 0.5 * x * x, -10.0, 10.0, 2001).unwrap();
    let trap = TrapPotential::custom(pot);
    let basis = solve_trap_with(&trap, 5, &SolveOptions { order: Some(4000) }).unwrap();
    for n in 0..5 {
        assert!((basis.energy(n) - (n as f64 + 0.5)).abs() < 1e-3);
    }
    assert!(trap.is_reflection_symmetric());
}

#[test]
fn coarse_grid_reports_first_failing_mode() {
    let pot = CustomPotential::from_fn(|x| x * x, -5.0, 5.0, 101).unwrap();
    let trap = TrapPotential::custom(pot);
    let err = solve_trap_with(&trap, 6, &SolveOptions { order: Some(24) }).unwrap_err();
    match err {
        Error::Resolution { mode: Some(m), .. } => assert!(m < 6),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn grid_refinement_converges() {
    let pot = CustomPotential::from_fn(|x| x.powi(4), -5.0, 5.0, 4001).unwrap();
    let trap = TrapPotential::custom(pot);
    let shifts = check_grid_convergence(&trap, 3, 4000, 1e-3).unwrap();
    assert!(shifts.iter().all(|s| *s < 1e-3));
    let err = check_grid_convergence(&trap, 3, 100, 1e-9).unwrap_err();
    assert!(matches!(err, Error::Resolution { mode: Some(_), .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn harmonic_invariants_hold(omega in 0.2f64..5.0, mass in 0.2f64..5.0, cutoff in 1usize..25) {
        let basis = solve_trap(&TrapPotential::harmonic(omega).with_mass(mass), cutoff).unwrap();
        for (n, e) in basis.energies().iter().enumerate() {
            let exact = omega * (n as f64 + 0.5);
            prop_assert!(((e - exact) / exact).abs() <= 1e-12);
        }
        prop_assert!(basis.energies().windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(basis.sign_changes(), (0..cutoff).collect::<Vec<_>>());
        let gram = basis.gram();
        prop_assert!((gram - Mat::identity(cutoff, cutoff)).amax() <= 1e-10);
    }

    #[test]
    fn well_invariants_hold(length in 0.3f64..4.0, cutoff in 1usize..25) {
        let basis = solve_trap(&TrapPotential::infinite_well(length), cutoff).unwrap();
        prop_assert_eq!(basis.sign_changes(), (0..cutoff).collect::<Vec<_>>());
        let gram = basis.gram();
        prop_assert!((gram - Mat::identity(cutoff, cutoff)).amax() <= 1e-10);
    }
}
