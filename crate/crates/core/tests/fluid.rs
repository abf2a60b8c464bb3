use proptest::prelude::*;
use relshock::fluid::{check_strict_causality, default_directions, ideal_stress, BarotropicEos, FluidState, PowerTerm};
use relshock::linalg::Vec2;

fn eos_family() -> Vec<BarotropicEos<f64>> {
    let mixed = BarotropicEos::polynomial(
        vec![PowerTerm { coef: 1.0 / 3.0, power: 4.0 }, PowerTerm { coef: 0.1, power: 2.5 }],
        1e-2,
        1e2,
    )
    .unwrap();
    vec![BarotropicEos::radiation(), BarotropicEos::power_law(5.0).unwrap(), mixed]
}

/// L^β = p̃(θ(ψ)) ψ^β as a function of the covariant pair.
fn l_beta(eos: &BarotropicEos<f64>, y: [f64; 2], beta: usize) -> f64 {
    let s = FluidState::from_covariant(Vec2(y)).unwrap();
    eos.p(s.theta()) * s.contravariant()[beta]
}

proptest! {
    #[test]
    fn four_velocity_is_normalized(psi0 in 1e-2f64..1e2, frac in -0.999f64..0.999) {
        let s = FluidState::new(psi0, frac * psi0).unwrap();
        let u = s.velocity();
        prop_assert!((-u[0] * u[0] + u[1] * u[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn stress_is_gradient_of_generating_function(psi0 in 0.3f64..3.0, frac in -0.8f64..0.8, which in 0usize..3) {
        // T^{αβ} = ∂(p̃ ψ^β)/∂ψ_α, differentiated numerically in the covariant components
        let eos = &eos_family()[which];
        let s = FluidState::new(psi0, frac * psi0).unwrap();
        let t = ideal_stress(&s, eos).unwrap();
        let y = s.covariant().0;
        for beta in 0..2 {
            for alpha in 0..2 {
                let h = 1e-6 * (y[0].abs() + y[1].abs());
                let mut yp = y;
                let mut ym = y;
                yp[alpha] += h;
                ym[alpha] -= h;
                let fd = (l_beta(eos, yp, beta) - l_beta(eos, ym, beta)) / (2.0 * h);
                let exact = t.component(alpha, beta);
                let scale = t.matrix().norm();
                prop_assert!((fd - exact).abs() < 1e-6 * scale, "T^{alpha}{beta}: fd {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn radiation_gnl_is_four_ninths(rho in 1e-3f64..1e3) {
        let g = BarotropicEos::radiation().gnl_indicator(rho).unwrap();
        prop_assert!((g - 4.0 / 9.0).abs() < 1e-12);
    }
}

#[test]
fn energy_temperature_round_trip_on_log_grid() {
    for eos in eos_family() {
        let (lo, hi) = eos.theta_interval();
        let (lo, hi) = (lo.max(1e-2), hi.min(1e2));
        for i in 0..100 {
            let theta = lo * (hi / lo).powf(i as f64 / 99.0);
            let back = eos.theta_of_energy(eos.energy(theta)).unwrap();
            assert!((back - theta).abs() <= 1e-10 * theta, "{}: {theta} -> {back}", eos.name());
        }
    }
}

#[test]
fn radiation_stress_is_traceless() {
    let rad = BarotropicEos::<f64>::radiation();
    for (a, b) in [(1.0, 0.0), (2.0, 1.5), (0.7, -0.3)] {
        let s = FluidState::new(a, b).unwrap();
        let t = ideal_stress(&s, &rad).unwrap();
        let rho = rad.energy(s.theta());
        let p = rad.p(s.theta());
        // two transverse directions contribute p each
        assert!((t.mixed_trace() + 2.0 * p).abs() < 1e-12 * rho.max(1.0));
        assert!((3.0 * p - rho).abs() < 1e-12 * rho);
    }
}

#[test]
fn rest_state_stress_examples() {
    let t = ideal_stress(&FluidState::<f64>::new(1.0, 0.0).unwrap(), &BarotropicEos::radiation()).unwrap();
    assert!((t.component(0, 0) - 1.0).abs() < 1e-15 && (t.component(1, 1) - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(t.component(0, 1), 0.0);
    let t = ideal_stress(&FluidState::<f64>::new(1.0, 0.0).unwrap(), &BarotropicEos::power_law(5.0).unwrap()).unwrap();
    assert!((t.component(0, 0) - 4.0).abs() < 1e-14 && (t.component(1, 1) - 1.0).abs() < 1e-14);
}

#[test]
fn causality_examples() {
    let rest = FluidState::new(1.0, 0.0).unwrap();
    let rad = BarotropicEos::<f64>::radiation();
    let r = check_strict_causality(&rest, &rad, &default_directions()).unwrap();
    assert!(r.pass);
    assert_eq!(r.checks.len(), 3);
    let stiff = BarotropicEos::power_law(2.0).unwrap();
    let r = check_strict_causality(&rest, &stiff, &default_directions()).unwrap();
    assert!(!r.pass);
    assert!(r.checks.iter().any(|c| !c.negative_definite));
}

#[test]
fn single_precision_instantiation() {
    let rad = BarotropicEos::<f32>::radiation();
    let (rho, p, c2) = rad.energy_pressure(1.0).unwrap();
    assert!((rho - 1.0).abs() < 1e-6 && (p - 1.0 / 3.0).abs() < 1e-6 && (c2 - 1.0 / 3.0).abs() < 1e-6);
    let s = FluidState::<f32>::new(2.0, 1.0).unwrap();
    let t = ideal_stress(&s, &rad).unwrap();
    assert!(t.component(0, 0).is_finite());
}
