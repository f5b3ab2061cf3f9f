mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use taylor_lcu::densesim::{
    amplify, operator_norm, power_iteration_norm, svd_norm, DenseOperator, DenseSimulator,
};
use taylor_lcu::hamiltonian::parse_hamiltonian;
use taylor_lcu::planner::{self, greedy_plan, StopRule};

fn random_complex(r: &mut impl Rng, n: usize, m: usize) -> CMat {
    DMatrix::from_fn(n, m, |_, _| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

#[test]
fn eigendecomposition_matches_scaling_and_squaring() {
    let mut r = rng(5);
    for trial in 0..6 {
        let (h, raw) = random_real_hamiltonian(&mut r, 4, 12);
        let sim = DenseSimulator::new(&h).unwrap();
        for t in [0.3, planner::t_infinity(&h), 2.5] {
            let u = sim.exact_evolution(t).unwrap();
            let oracle = expm(&(raw_matrix(&raw) * c(0.0, -t)));
            let diff = spectral_norm(&(u.matrix() - oracle));
            assert!(diff <= 1e-10, "trial {trial}, t = {t}: {diff:e}");
        }
    }
}

#[test]
fn exact_evolution_is_unitary() {
    let mut r = rng(6);
    for qubits in 1..=5 {
        let (h, _) = random_real_hamiltonian(&mut r, qubits, 10);
        let sim = DenseSimulator::new(&h).unwrap();
        let u = sim.exact_evolution(1.7).unwrap();
        let dim = u.dim();
        let dev = spectral_norm(&(u.matrix().adjoint() * u.matrix() - CMat::identity(dim, dim)));
        assert!(dev <= 1e-12, "{qubits} qubits: {dev:e}");
    }
}

#[test]
fn series_converges_within_taylor_remainder() {
    let mut r = rng(7);
    for _ in 0..4 {
        let (h, _) = random_real_hamiltonian(&mut r, 3, 8);
        let sim = DenseSimulator::new(&h).unwrap();
        let t = planner::t_infinity(&h);
        let exact = sim.exact_evolution(t).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=20 {
            let series = sim
                .truncated_series_operator(&planner::full_order_levels(&h, n), t)
                .unwrap();
            let err = (&series - &exact).norm().unwrap();
            // 1e-14 absorbs the roundoff floor of the eigendecomposition
            assert!(err <= prev + 1e-14, "n = {n}: {err:e} after {prev:e}");
            assert!(err <= 2.0 * ln2_pow_over_factorial(n) + 1e-14, "n = {n}: {err:e}");
            prev = err;
        }
        assert!(prev <= 1e-10);
    }
}

#[test]
fn series_product_is_left_to_right() {
    // (1, 2) with H_1 = Z, H_2 = Z + 0.5 X: second-order term is H_1 H_2 (not H_2 H_1)
    let h = parse_hamiltonian("1.0 Z\n0.5 X\n").unwrap();
    let sim = DenseSimulator::new(&h).unwrap();
    let t = 0.4;
    let got = sim.truncated_series_operator(&vec![1, 2].into(), t).unwrap();
    let h1 = prefix_matrix(&h, 1);
    let h2 = prefix_matrix(&h, 2);
    let id = CMat::identity(2, 2);
    let expected = &id + &h1 * c(0.0, -t) + (&h1 * &h2) * c(-t * t / 2.0, 0.0);
    assert!((got.matrix() - expected).camax() < 1e-15);
}

#[test]
fn power_iteration_agrees_with_svd() {
    let mut r = rng(8);
    for n in [2, 8, 32, 128] {
        let m = random_complex(&mut r, n, n);
        let a = svd_norm(&m);
        let b = power_iteration_norm(&m).unwrap();
        assert!((a - b).abs() <= 1e-10 * a, "n = {n}: {a} vs {b}");
        assert!((a - spectral_norm(&m)).abs() <= 1e-10 * a);
    }
    let big = DenseOperator::from_matrix(random_complex(&mut r, 128, 128)).unwrap();
    let via = operator_norm(&big).unwrap();
    assert!((via - svd_norm(big.matrix())).abs() <= 1e-10 * via);
}

#[test]
fn non_hermitian_input_rejected() {
    let h = parse_hamiltonian("1.0 Z\n0.5i X\n").unwrap();
    let sim = DenseSimulator::new(&h).unwrap();
    assert!(sim.exact_evolution(0.1).is_err());
}

#[test]
fn qubit_cap_enforced() {
    let h = parse_hamiltonian("1.0 ZZZZ\n").unwrap();
    let err = DenseSimulator::with_cap(&h, 3).err().unwrap();
    assert_eq!(err.exit_code(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Error bounds on greedy prefixes: single step, then repeated steps.
    #[test]
    fn measured_errors_within_bounds(seed in any::<u64>(), qubits in 2usize..=4, terms in 2usize..=8) {
        let mut r = rng(seed);
        let (h, _) = random_real_hamiltonian(&mut r, qubits, terms);
        let sim = DenseSimulator::new(&h).unwrap();
        let trace = greedy_plan(&h, StopRule::Budget(3 * h.len())).unwrap();
        for cost in 1..=trace.final_levels.cost() {
            let levels = trace.levels_at_cost(cost).unwrap();
            let report = sim.multi_step_error(&levels, 4).unwrap();
            let (eps, delta) = (report.epsilon, report.delta);
            if eps > 0.5 {
                continue;
            }
            prop_assert!(delta <= eps + 2.0 * eps * eps, "delta {delta:e} eps {eps:e}");
            for step in &report.r_step {
                let r = step.r as f64;
                prop_assert!(step.error <= r * delta + 10.0 * r * r * delta * delta);
            }
        }
    }

    #[test]
    fn amplified_operator_is_contraction(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (h, _) = random_real_hamiltonian(&mut r, 2, 5);
        let sim = DenseSimulator::new(&h).unwrap();
        let levels = greedy_plan(&h, StopRule::Budget(4)).unwrap().final_levels;
        let a = sim.amplified_operator(&levels, planner::t_infinity(&h)).unwrap();
        prop_assert!(a.norm().unwrap() <= 1.0 + 1e-12);
        let s = planner::s_value(&h, &levels, planner::t_infinity(&h)).unwrap();
        let u = sim.truncated_series_operator(&levels, planner::t_infinity(&h)).unwrap();
        let rebuilt = amplify(&u, s);
        prop_assert_eq!(rebuilt.matrix(), a.matrix());
    }
}
