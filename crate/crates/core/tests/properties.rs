//! Structural invariants, checked over randomized inputs.

use proptest::prelude::*;
use triplewave::propagator::propagation_factor;
use triplewave::verify::energy;
use triplewave::*;

fn sample(g: &Grid64, f: impl Fn(f64) -> f64) -> Vec<f64> {
    g.points().into_iter().map(f).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conformal_factors_multiply_to_beta(a in 0.2f64..3.0, b in 0.0f64..2.0, m in 1usize..6) {
        let x = Grid64::linspace(0.0, 2.0, 41);
        let p = WarpedProfile::from_fn(x, m, |x| a + b * x * x).unwrap();
        let c = conformal_factors(&p).unwrap();
        for ((pre, post), beta) in c.pre.iter().zip(&c.post).zip(&p.beta) {
            prop_assert!((pre * post - beta).abs() <= 1e-12 * beta);
        }
    }

    #[test]
    fn cayley_is_unimodular_and_injective(t1 in -50.0f64..50.0, t2 in -50.0f64..50.0) {
        let (u1, u2) = (cayley_unitary(t1), cayley_unitary(t2));
        prop_assert!((u1.norm() - 1.0).abs() <= 1e-12);
        if (t1 - t2).abs() > 1e-6 {
            prop_assert!((u1 - u2).norm() > 0.0);
        }
    }

    #[test]
    fn weyl_function_increases_with_lambda(l1 in -20.0f64..-1e-3, d in 1e-3f64..5.0, k in 0.0f64..5.0) {
        let l2 = (l1 + d).min(-1e-6);
        prop_assume!(l2 > l1);
        let (m1, m2) = (weyl_function(l1, k).unwrap().value, weyl_function(l2, k).unwrap().value);
        prop_assert!(m1 < m2);
        prop_assert!(m2 < 0.0);
    }

    #[test]
    fn traces_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, s in 0.5f64..3.0) {
        let g = Grid64::linspace(0.0, 4.0, 401);
        let u = sample(&g, |x| (-s * x).exp());
        let w = sample(&g, |x| (s * x).cos() * (-x * x).exp());
        let uw: Vec<f64> = u.iter().zip(&w).map(|(u, w)| a * u + b * w).collect();
        let tm = TraceMaps::new(g.step);
        let (tu, tw, tuw) = (tm.traces(&u).unwrap(), tm.traces(&w).unwrap(), tm.traces(&uw).unwrap());
        prop_assert!((tuw.value - (a * tu.value + b * tw.value)).abs() <= 1e-12);
        prop_assert!((tuw.derivative - (a * tu.derivative + b * tw.derivative)).abs() <= 1e-9);
    }

    #[test]
    fn energy_is_quadratic(c in -4.0f64..4.0, k in 0.0f64..2.0, alpha in -2.0f64..2.0) {
        let g = Grid64::linspace(0.0, 10.0, 201);
        let u = sample(&g, |x| (-(x - 3.0).powi(2)).exp() + 0.2 * (-x).exp());
        let v = sample(&g, |x| x * (-(x - 4.0).powi(2)).exp());
        let bc = BoundaryCondition::robin(alpha);
        let e1 = energy(&u, &v, &g, &bc, k, None, None);
        let cu: Vec<f64> = u.iter().map(|u| c * u).collect();
        let cv: Vec<f64> = v.iter().map(|v| c * v).collect();
        let ec = energy(&cu, &cv, &g, &bc, k, None, None);
        prop_assert!((ec.e - c * c * e1.e).abs() <= 1e-12 * (1.0 + ec.e.abs()));
        prop_assert!((ec.e_total - c * c * e1.e_total).abs() <= 1e-12 * (1.0 + ec.e_total.abs()));
    }

    #[test]
    fn images_kernel_symmetries(t in 0.0f64..5.0, x in 0.0f64..5.0, y in 0.0f64..5.0, neumann in any::<bool>()) {
        let bc = if neumann { BoundaryCondition::Neumann } else { BoundaryCondition::Dirichlet };
        let g = images_kernel(t, x, y, &bc).unwrap();
        prop_assert_eq!(images_kernel(-t, x, y, &bc).unwrap(), -g);
        prop_assert_eq!(images_kernel(t, y, x, &bc).unwrap(), g);
    }

    #[test]
    fn propagation_factor_is_odd(lambda in -4.0f64..100.0, t in 0.0f64..10.0) {
        let s = propagation_factor(lambda, t);
        prop_assert_eq!(propagation_factor(lambda, -t), -s);
    }

    #[test]
    fn propagation_factor_solves_the_mode_equation(lambda in -2.0f64..50.0, t in 0.1f64..3.0) {
        let h = 1e-3;
        let s = |t| propagation_factor(lambda, t);
        let d2 = (s(t + h) - 2.0 * s(t) + s(t - h)) / (h * h);
        prop_assert!((d2 + lambda * s(t)).abs() <= 1e-4 * (1.0 + s(t).abs() * lambda.abs()));
    }
}

#[test]
fn bound_state_exists_iff_spectrum_test_flags() {
    for i in 0..20 {
        let alpha = -3.0 + 6.0 * i as f64 / 19.0;
        let bc = BoundaryCondition::robin(alpha);
        let range = KRange::Single { k: 0.0 };
        match bound_state(alpha, 0.0) {
            Some(b) => {
                let r = spectrum_test(b.lambda, &bc, &range).unwrap();
                assert_eq!(r.verdict, Verdict::InSpectrum, "alpha = {alpha}");
                let off = spectrum_test(b.lambda * 0.9, &bc, &range).unwrap();
                assert_eq!(off.verdict, Verdict::NotInSpectrum);
            }
            None => {
                for lambda in [-0.01, -0.5, -2.0, -9.0] {
                    let r = spectrum_test(lambda, &bc, &range).unwrap();
                    assert_eq!(
                        r.verdict,
                        Verdict::NotInSpectrum,
                        "alpha = {alpha}, lambda = {lambda}"
                    );
                }
            }
        }
    }
}

#[test]
fn spectrum_test_agrees_with_fd_count() {
    let g = Grid64::linspace(0.0, 25.0, 2500);
    for alpha in [-2.0, -1.0, -0.5, 0.0, 1.0] {
        let bc = BoundaryCondition::robin(alpha);
        let fd = assemble_fd(&bc, 0.0, g).unwrap().count_below(0.0);
        let lambdas: Vec<f64> = (1..=400).map(|i| -5.0 * i as f64 / 400.0).collect();
        let scan = spectrum_scan(&lambdas, &bc, &KRange::Single { k: 0.0 }).unwrap();
        let flagged = scan
            .iter()
            .filter(|r| r.verdict == Verdict::InSpectrum)
            .count();
        assert_eq!(fd, usize::from(alpha < 0.0), "alpha = {alpha}");
        assert_eq!(flagged, fd, "alpha = {alpha}");
    }
}

#[test]
fn kernel_invariants_hold_for_every_condition() {
    let t = Grid64::linspace(-1.0, 1.0, 9);
    let x = Grid64::linspace(0.2, 2.0, 7);
    let q = Quadrature::new(20.0, 2000, Window::Hann).unwrap();
    let conditions = [
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Neumann,
        BoundaryCondition::robin(-1.0),
        BoundaryCondition::robin(0.7),
        BoundaryCondition::WentzellLaplace,
    ];
    for bc in conditions {
        let res = resolve(&bc, 0.5, q).unwrap();
        let inv = KernelGrid::build(&res, t, x, x).invariants();
        assert!(inv.time_antisymmetry <= 1e-12, "{}", bc.name());
        assert!(inv.spatial_symmetry.unwrap() <= 1e-12, "{}", bc.name());
        assert!(inv.zero_slice.unwrap() <= 1e-12, "{}", bc.name());
    }
}
