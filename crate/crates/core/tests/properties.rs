use adrc_pid::lti::{log_grid, step_response, Polynomial, StateSpace, TransferFunction};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

/// Independent oracle: `C (sI - A)^{-1} B + D` via a dense complex solve.
fn oracle(ss: &StateSpace, s: Complex64) -> Option<Complex64> {
    let n = ss.n_states();
    let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
        diag - ss.a()[(i, j)]
    });
    let b = DVector::<Complex64>::from_fn(n, |i, _| ss.b()[(i, 0)].into());
    let x = m.full_piv_lu().solve(&b)?;
    let cx: Complex64 = (0..n).map(|i| x[i] * ss.c()[(0, i)]).sum();
    Some(cx + ss.d()[(0, 0)])
}

fn random_stable(rng: &mut StdRng, n: usize) -> StateSpace {
    let mut a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
    let shift = adrc_pid::lti::eigenvalues(&a)
        .unwrap()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    for i in 0..n {
        a[(i, i)] -= shift + rng.random_range(0.1..1.0);
    }
    let b = DMatrix::<f64>::from_fn(n, 1, |_, _| rng.random_range(-1.0..1.0));
    let c = DMatrix::<f64>::from_fn(1, n, |_, _| rng.random_range(-1.0..1.0));
    let d = DMatrix::<f64>::from_element(1, 1, rng.random_range(-1.0..1.0));
    StateSpace::new(a, b, c, d).unwrap()
}

#[test]
fn ss_to_tf_agrees_with_direct_solve() {
    let mut rng = StdRng::seed_from_u64(7);
    for trial in 0..200 {
        let n = 1 + trial % 6;
        let ss = random_stable(&mut rng, n);
        let tf = ss.to_tf(0, 0).unwrap();
        for _ in 0..20 {
            let w = 10f64.powf(rng.random_range(-2.0..3.0));
            let s = Complex64::new(0.0, w);
            let want = oracle(&ss, s).expect("stable model has no imaginary-axis poles");
            let got = tf.eval(s);
            assert!(
                (got - want).norm() <= 1e-8 * want.norm().max(1e-300),
                "n={n} w={w}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn adrc_channels_agree_with_direct_solve() {
    let mut rng = StdRng::seed_from_u64(11);
    for design in [
        adrc_pid::adrc::AdrcDesign::tune(
            1,
            adrc_pid::adrc::AdrcTuning::new(1.0, 10.0, 1.0).unwrap(),
        )
        .unwrap(),
        adrc_pid::adrc::AdrcDesign::tune(
            2,
            adrc_pid::adrc::AdrcTuning::new(1.0, 10.0, 1.0).unwrap(),
        )
        .unwrap(),
    ] {
        let ss = design.controller().state_space().clone();
        for input in 0..2 {
            let tf = ss.to_tf(input, 0).unwrap();
            let single = StateSpace::new(
                ss.a().clone(),
                ss.b().columns(input, 1).into_owned(),
                ss.c().clone(),
                ss.d().columns(input, 1).into_owned(),
            )
            .unwrap();
            for _ in 0..20 {
                let s = Complex64::new(0.0, 10f64.powf(rng.random_range(-2.0..4.0)));
                let want = oracle(&single, s).unwrap();
                assert!((tf.eval(s) - want).norm() <= 1e-8 * want.norm());
            }
        }
    }
}

#[test]
fn first_order_lag_step_is_exact() {
    for tau in [0.01, 0.3, 1.0, 7.0] {
        let lag = StateSpace::from_tf(&TransferFunction::from_coeffs(&[1.0], &[1.0, tau]).unwrap())
            .unwrap();
        let r = step_response(&lag, 0, 5.0 * tau, 500).unwrap();
        for (t, y) in r.t.iter().zip(r.column("y0").unwrap()) {
            assert!((y - (1.0 - (-t / tau).exp())).abs() < 1e-10);
        }
    }
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..=max_len)
}

proptest! {
    #[test]
    fn tf_ss_round_trip(num in coeffs(4), den in prop::collection::vec(0.1f64..10.0, 2..=5)) {
        let den_deg = den.len() - 1;
        let num: Vec<f64> = num.into_iter().take(den_deg + 1).collect();
        let tf = TransferFunction::from_coeffs(&num, &den).unwrap();
        let back = StateSpace::from_tf(&tf).unwrap().to_tf(0, 0).unwrap();
        let r = back.equivalence_mismatch(&tf);
        prop_assert!(r < 1e-9, "{} vs {}: {}", back, tf, r);
    }

    #[test]
    fn comparison_is_scale_invariant(num in coeffs(3), den in prop::collection::vec(0.1f64..10.0, 2..=4),
                                     k in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]) {
        let a = TransferFunction::from_coeffs(&num, &den).unwrap();
        let b = TransferFunction::new(
            Polynomial::new(num.clone()).scale(k),
            Polynomial::new(den.clone()).scale(k),
        ).unwrap();
        prop_assert!(a.coefficient_mismatch(&b) < 1e-12);
    }

    #[test]
    fn poles_of_two_real_factors(a in 0.1f64..100.0, b in 0.1f64..100.0) {
        // Near-coincident roots are ill-conditioned (error ~ eps * a^2 / |a - b|).
        prop_assume!((a - b).abs() > 1e-2);
        let tf = TransferFunction::new(
            Polynomial::one(),
            Polynomial::new(vec![a, 1.0]) * Polynomial::new(vec![b, 1.0]),
        ).unwrap();
        let mut p: Vec<f64> = tf.poles().unwrap().iter().map(|z| { assert!(z.im.abs() < 1e-9); z.re }).collect();
        p.sort_by(f64::total_cmp);
        let mut want = [-a, -b];
        want.sort_by(f64::total_cmp);
        prop_assert!((p[0] - want[0]).abs() < 1e-9 * a.max(b));
        prop_assert!((p[1] - want[1]).abs() < 1e-9 * a.max(b));
        prop_assert!(tf.is_stable().unwrap());
    }

    #[test]
    fn freq_response_round_trip(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let ss = random_stable(&mut rng, n);
        let omega = log_grid(1e-2, 1e4, 50).unwrap();
        let direct = ss.freq_response(0, 0, &omega).unwrap();
        let via_tf = ss.to_tf(0, 0).unwrap().freq_response(&omega);
        for (x, y) in direct.iter().zip(&via_tf) {
            prop_assert!((x - y).norm() <= 1e-8 * x.norm().max(1e-300));
        }
    }
}
