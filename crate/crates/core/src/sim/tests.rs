use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use proptest::prelude::*;

use super::*;
use crate::angles::{build_angle_table, discrete_theta};
use crate::circuit::{build_discrete_circuit, build_upsampling_circuit, Control, Metadata};
use crate::dist::{make_binomial, DiscreteSpec, Target};

fn gaussian_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Literal product formula, bit by bit.
fn product_formula(table: &AngleTable, i: usize) -> f64 {
    let n = table.n();
    (1..=n)
        .map(|m| {
            let bit = (i >> (n - m)) & 1;
            let low = i & ((1 << (n - m)) - 1);
            (-FRAC_PI_2 * bit as f64 + table.theta(m, low) / 2.0).cos()
        })
        .product()
}

fn single(gate: Gate, n: usize) -> Circuit {
    let mut c = Circuit::new(n, Metadata::new("t"));
    c.push(gate).unwrap();
    c
}

fn real(state: &StateVector) -> Vec<f64> {
    state.amplitudes().iter().map(|a| a.re).collect()
}

#[test]
fn one_qubit_gates() {
    let s = simulate(&single(Gate::h(0), 1)).unwrap();
    assert_eq!(real(&s), vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
    let theta = 1.234;
    let s = simulate(&single(Gate::ry(theta, 0), 1)).unwrap();
    let amps = real(&s);
    assert!((amps[0] - (theta / 2.0).cos()).abs() < 1e-15);
    assert!((amps[1] - (theta / 2.0).sin()).abs() < 1e-15);
}

#[test]
fn controls_and_swaps_act_on_matching_patterns() {
    // X on q1 only where q0 = 0, starting from |q1 q0> = |01>.
    let mut s = StateVector::basis(2, 0b01).unwrap();
    s.apply_gate(&Gate::x(1).with_controls(vec![Control::negative(0)]))
        .unwrap();
    assert_eq!(s.probabilities(), vec![0.0, 1.0, 0.0, 0.0]);
    let mut s = StateVector::basis(3, 0b011).unwrap();
    s.apply_gate(&Gate::swap(1, 2)).unwrap();
    assert_eq!(s.probabilities()[0b101], 1.0);
    s.apply_gate(&Gate::cswap(1, 0, 2)).unwrap();
    assert_eq!(s.probabilities()[0b101], 1.0);
    s.apply_gate(&Gate::cswap(0, 1, 2)).unwrap();
    assert_eq!(s.probabilities()[0b011], 1.0);
}

#[test]
fn budget() {
    assert_eq!(budget_from(None), 24);
    assert_eq!(budget_from(Some("10")), 10);
    assert_eq!(budget_from(Some("99")), 24);
    assert_eq!(budget_from(Some("junk")), 24);
    assert!(matches!(
        StateVector::zero(25),
        Err(Error::QubitBudget { requested: 25, .. })
    ));
}

#[test]
fn product_oracle_examples() {
    let table = AngleTable::from_levels(1, vec![vec![0.8]]).unwrap();
    let amps = oracle_amplitudes(&table);
    assert!((amps[0] - 0.4f64.cos()).abs() < 1e-16 && (amps[1] - 0.4f64.sin()).abs() < 1e-16);
    let uniform = AngleTable::from_levels(
        3,
        vec![vec![FRAC_PI_2; 4], vec![FRAC_PI_2; 2], vec![FRAC_PI_2]],
    )
    .unwrap();
    for a in oracle_amplitudes(&uniform) {
        assert!((a - FRAC_1_SQRT_2.powi(3)).abs() < 1e-15);
    }
}

#[test]
fn gaussian_n3_triangle() {
    let spec = DistributionSpec::gaussian(0.0, 1.0).unwrap();
    let grid = SamplingGrid::new(3, 12.0, 0.0, 0.0).unwrap();
    let table = build_angle_table(&spec, &grid, 1e-14).unwrap();
    let state = simulate(&build_upsampling_circuit(&table)).unwrap();
    let product = oracle_amplitudes(&table);
    let xi = oracle_xi(&spec, &grid, 1e-14).unwrap();
    for i in 0..8 {
        let literal = product_formula(&table, i);
        assert!((product[i] - literal).abs() < 1e-14);
        assert!((state.amplitudes()[i].re - literal).abs() < 1e-10);
        assert!((xi[i] - literal).abs() < 1e-10);
    }
    assert!(state.max_imag() < 1e-14);
}

#[test]
fn xi_examples() {
    let spec = DistributionSpec::gaussian(0.0, 1.0).unwrap();
    let grid = SamplingGrid::new(1, 4.0, 0.5, 0.0).unwrap();
    let xi = oracle_xi(&spec, &grid, 1e-14).unwrap();
    assert!((xi[0] - FRAC_1_SQRT_2).abs() < 1e-15 && (xi[1] - FRAC_1_SQRT_2).abs() < 1e-15);

    // Brute-force image sums over |j| <= 50.
    let grid = SamplingGrid::new(3, 12.0, 0.0, 0.0).unwrap();
    let xi = oracle_xi(&spec, &grid, 1e-14).unwrap();
    let brute = |x: f64, p: f64| {
        (-50..=50)
            .map(|j| gaussian_pdf(x + j as f64 * p))
            .sum::<f64>()
    };
    let dx = 1.0 / brute(grid.x_origin(), grid.delta_x());
    for (i, v) in xi.iter().enumerate() {
        assert!((v - (dx * brute(grid.x(i), 12.0)).sqrt()).abs() < 1e-14);
    }
    let peak = (0..8).max_by(|&a, &b| xi[a].total_cmp(&xi[b])).unwrap();
    assert_eq!(peak, 4);
    assert!(xi[..4].windows(2).all(|w| w[0] < w[1]) && xi[4..].windows(2).all(|w| w[0] > w[1]));

    // Wrapped Laplace(0, 1): sum_j e^{-|x + j w|} / 2 in closed form.
    let spec = DistributionSpec::laplace(0.0, 1.0).unwrap();
    let w = 12.0;
    let wrapped = |x: f64| {
        let r = x.rem_euclid(w);
        ((-r).exp() + (r - w).exp()) / (2.0 * (1.0 - (-w).exp()))
    };
    let grid = SamplingGrid::new(2, w, 0.0, 0.0).unwrap();
    let xi = oracle_xi(&spec, &grid, 1e-14).unwrap();
    let total: f64 = (0..4).map(|i| wrapped(grid.x(i))).sum();
    for (i, v) in xi.iter().enumerate() {
        assert!((v - (wrapped(grid.x(i)) / total).sqrt()).abs() < 1e-13);
    }
}

#[test]
fn marginals() {
    let mut bell = StateVector::zero(2).unwrap();
    bell.apply_gate(&Gate::h(0)).unwrap();
    bell.apply_gate(&Gate::cnot(0, 1)).unwrap();
    for p in marginal(&bell, &[0]).unwrap() {
        assert!((p - 0.5).abs() < 1e-15);
    }
    let both = marginal(&bell, &[1, 0]).unwrap();
    assert!((both[0] - 0.5).abs() < 1e-15 && (both[3] - 0.5).abs() < 1e-15);

    let mut product = StateVector::zero(2).unwrap();
    product.apply_gate(&Gate::ry(1.0, 0)).unwrap();
    product.apply_gate(&Gate::ry(2.0, 1)).unwrap();
    let m = marginal(&product, &[1]).unwrap();
    assert!((m[0] - 1f64.cos().powi(2)).abs() < 1e-15);
    assert!(marginal(&product, &[0, 0]).is_err());
    assert!(marginal(&product, &[2]).is_err());
}

#[test]
fn postselection() {
    let mut uniform = StateVector::zero(3).unwrap();
    for q in 0..3 {
        uniform.apply_gate(&Gate::h(q)).unwrap();
    }
    for q in 0..3 {
        for p in postselect(&uniform, q, 1).unwrap() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }
    let zero = StateVector::zero(2).unwrap();
    assert!(matches!(
        postselect(&zero, 1, 1),
        Err(Error::ZeroProbabilityBranch { .. })
    ));
    // Remaining qubits keep their order when a middle qubit is removed.
    let s = StateVector::basis(3, 0b101).unwrap();
    assert_eq!(postselect(&s, 1, 0).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
}

fn discrete_checks(probs: &DiscreteSpec) {
    let n = probs.num_qubits();
    let c = build_discrete_circuit(&discrete_theta(probs), n).unwrap();
    let s = simulate(&c).unwrap();
    let top = n as usize - 1;
    let kept = postselect(&s, top, 0).unwrap();
    for (a, b) in kept.iter().zip(probs.probs()) {
        assert!((a - b).abs() <= 1e-12);
    }
    let rest = (1u64 << top) as f64 - 1.0;
    let other = postselect(&s, top, 1).unwrap();
    for (a, b) in other.iter().zip(probs.probs()) {
        assert!((a - (1.0 - b) / rest).abs() <= 1e-12);
    }
}

#[test]
fn discrete_binomial_exact() {
    discrete_checks(&make_binomial(7, 0.5).unwrap());
    discrete_checks(&make_binomial(7, 0.3).unwrap());
}

#[test]
fn verify_examples() {
    let spec = DistributionSpec::gaussian(0.0, 1.0).unwrap();
    let grid = SamplingGrid::new(3, 12.0, 0.0, 0.0).unwrap();
    let table = build_angle_table(&spec, &grid, 1e-14).unwrap();
    let c = build_upsampling_circuit(&table);
    let report = verify(
        &Target::Continuous(spec),
        Some(&grid),
        &c,
        &VerifyOptions::default(),
    )
    .unwrap();
    assert!(report.passed, "{:?}", report.failures);
    assert!(report.tvd < 1e-10);
    assert!(report.sampling_l1 < 1e-6);
    assert!(report.wrap_error_estimate < 1e-6);
    assert!(report.tvd >= 0.0 && report.tvd <= 1.0);
    assert_eq!(
        report.stats.counts["ry"] + report.stats.counts["cry"] + report.stats.counts["c2ry"],
        7
    );
    let csv = report.to_csv().unwrap();
    assert!(csv.starts_with("index,x,prob_circuit,prob_oracle,pdf_delta,abs_err\n"));
    assert_eq!(csv.lines().count(), 9);
    let json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 8);

    let probs = make_binomial(7, 0.5).unwrap();
    let c = build_discrete_circuit(&discrete_theta(&probs), 4).unwrap();
    let report = verify(
        &Target::Discrete(probs),
        None,
        &c,
        &VerifyOptions::default(),
    )
    .unwrap();
    assert!(report.passed, "{:?}", report.failures);
    assert!(report.max_abs_err <= 1e-12);
    assert!(report.complement_max_err.unwrap() <= 1e-12);

    assert!(verify(
        &Target::Continuous(spec),
        None,
        &c,
        &VerifyOptions::default()
    )
    .is_err());
    let p = vec![0.1, 0.2, 0.7];
    assert_eq!(tvd(&p, &p).unwrap(), 0.0);
}

#[test]
fn verify_flags_a_wrong_circuit() {
    let spec = DistributionSpec::gaussian(0.0, 1.0).unwrap();
    let grid = SamplingGrid::new(2, 12.0, 0.0, 0.0).unwrap();
    let mut c = Circuit::new(2, Metadata::new("t"));
    c.push(Gate::h(0)).unwrap();
    c.push(Gate::h(1)).unwrap();
    let report = verify(
        &Target::Continuous(spec),
        Some(&grid),
        &c,
        &VerifyOptions::default(),
    )
    .unwrap();
    assert!(!report.passed);
    assert!(!report.failures.is_empty());
}

fn arb_gate() -> impl Strategy<Value = Gate> {
    (
        Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
        0u8..5,
        -7.0..7.0f64,
        0usize..3,
        any::<u8>(),
    )
        .prop_map(|(q, kind, theta, k, pols)| {
            let controls: Vec<Control> = q[2..2 + k.min(2)]
                .iter()
                .enumerate()
                .map(|(j, &c)| Control {
                    qubit: c,
                    polarity: crate::circuit::Polarity::from_bit(pols >> j & 1 == 1),
                })
                .collect();
            match kind {
                0 => Gate::ry(theta, q[0]).with_controls(controls),
                1 => Gate::h(q[0]),
                2 => Gate::x(q[0]).with_controls(controls),
                3 => Gate::swap(q[0], q[1]),
                _ => Gate::cswap(q[2], q[0], q[1]),
            }
        })
}

proptest! {
    #[test]
    fn unitarity(gates in prop::collection::vec(arb_gate(), 0..60)) {
        let mut c = Circuit::new(4, Metadata::new("random"));
        for g in gates {
            c.push(g).unwrap();
        }
        let s = simulate(&c).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn ry_inverse(prefix in prop::collection::vec(arb_gate(), 0..20), theta in -10.0..10.0f64,
                  target in 0usize..4, pols in any::<u8>()) {
        let mut c = Circuit::new(4, Metadata::new("random"));
        for g in prefix {
            c.push(g).unwrap();
        }
        let before = simulate(&c).unwrap();
        let controls: Vec<Control> = (0..4)
            .filter(|&q| q != target && pols >> q & 1 == 1)
            .map(|q| Control { qubit: q, polarity: crate::circuit::Polarity::from_bit(pols >> (q + 4) & 1 == 1) })
            .collect();
        let mut after = before.clone();
        after.apply_gate(&Gate::ry(theta, target).with_controls(controls.clone())).unwrap();
        after.apply_gate(&Gate::ry(-theta, target).with_controls(controls)).unwrap();
        for (a, b) in before.amplitudes().iter().zip(after.amplitudes()) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn discrete_exactness(raw in prop::collection::vec(0.0..1.0f64, 2..=64)) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-3);
        let probs: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let spec = DiscreteSpec::new(probs).unwrap();
        discrete_checks(&spec);
    }
}
