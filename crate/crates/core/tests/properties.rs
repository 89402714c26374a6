mod common;

use approx::assert_relative_eq;
use common::*;
use proptest::prelude::*;
use rand::Rng;
use taylor_greedy::harness::verify::small_instance;
use taylor_greedy::harness::VerifyProblem;
use taylor_greedy::objective::{check_monotone_submodular, grad_exact};
use taylor_greedy::optimizer::ExactOracle;
use taylor_greedy::problems::{build_fl, gen_cn_synth, CnSynthParams, FacilitySpec};
use taylor_greedy::rounding::{pipage_round, swap_round};
use taylor_greedy::{continuous_greedy, AnalyticKernel, Basis, GreedyConfig, Monomial, PartitionMatroid, Poly};

fn matroid_strategy() -> impl Strategy<Value = PartitionMatroid> {
    (1usize..=4, 1usize..=3)
        .prop_flat_map(|(blocks, size)| {
            let n = blocks * size;
            (Just(n), Just(blocks), proptest::collection::vec(1usize..=size, blocks))
        })
        .prop_map(|(n, blocks, caps)| {
            let per = n / blocks;
            let parts = (0..blocks).map(|b| (b * per..(b + 1) * per).collect()).collect();
            PartitionMatroid::new(n, parts, caps).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluate_matches_enumeration(seed in any::<u64>(), n in 1usize..=8, complement in any::<bool>()) {
        let mut r = rng(seed);
        let basis = if complement { Basis::Complement } else { Basis::Standard };
        let p = random_poly(&mut r, n, basis, 10, 4);
        let y = random_point(&mut r, n);
        let want = expectation(n, &y, |x| poly_at(&p, x));
        prop_assert!((p.evaluate(&y).unwrap() - want).abs() <= 1e-10 * want.abs().max(1.0));
        let grad = p.gradient(&y).unwrap();
        let oracle = gradient(n, &y, |x| poly_at(&p, x));
        for (a, b) in grad.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn product_is_pointwise(seed in any::<u64>(), n in 1usize..=7) {
        let mut r = rng(seed);
        let p = random_poly(&mut r, n, Basis::Standard, 8, 3);
        let q = random_poly(&mut r, n, Basis::Standard, 8, 3);
        let pq = p.multiply(&q).unwrap();
        for m in 0u64..1 << n {
            let x = bits(m, n);
            prop_assert!((poly_at(&pq, &x) - poly_at(&p, &x) * poly_at(&q, &x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn basis_change_preserves_values(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let p = random_poly(&mut r, n, Basis::Complement, 6, 3);
        let q = p.to_basis(Basis::Standard, n).unwrap();
        for m in 0u64..1 << n {
            let x = bits(m, n);
            prop_assert!((poly_at(&p, &x) - poly_at(&q, &x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn lp_maximize_is_optimal(mat in matroid_strategy(), seed in any::<u64>()) {
        let n = mat.ground_size();
        let mut r = rng(seed);
        let w: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let best = mat.lp_maximize(&w).unwrap();
        prop_assert!(mat.is_independent(&best).unwrap());
        let value = |x: &[bool]| x.iter().zip(&w).filter(|(&b, _)| b).map(|(_, v)| v).sum::<f64>();
        let brute = (0u64..1 << n)
            .map(|m| bits(m, n))
            .filter(|x| mat.is_independent(x).unwrap())
            .map(|x| value(&x))
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((value(&best) - brute).abs() <= 1e-12);
    }

    #[test]
    fn independence_axioms(mat in matroid_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let n = mat.ground_size();
        let mask = (1u64 << n) - 1;
        let (a, b) = (a & mask, b & mask);
        let (xa, xb) = (bits(a, n), bits(b, n));
        if mat.is_independent(&xa).unwrap() {
            // down-closed
            for i in 0..n {
                let mut sub = xa.clone();
                sub[i] = false;
                prop_assert!(mat.is_independent(&sub).unwrap());
            }
            // exchange
            if mat.is_independent(&xb).unwrap() && b.count_ones() > a.count_ones() {
                let grows = (0..n).any(|i| {
                    let mut bigger = xa.clone();
                    xb[i] && !xa[i] && { bigger[i] = true; mat.is_independent(&bigger).unwrap() }
                });
                prop_assert!(grows);
            }
        }
    }

    #[test]
    fn fl_value_is_max_weight(seed in any::<u64>(), n in 1usize..=6, m in 1usize..=3) {
        let mut r = rng(seed);
        let weights: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| r.random::<f64>()).collect())
            .collect();
        let spec = FacilitySpec::new(weights.clone()).unwrap();
        let obj = build_fl::<f64>(&spec, AnalyticKernel::identity()).unwrap();
        for mask in 0u64..1 << n {
            let x = bits(mask, n);
            let want: f64 = (0..m)
                .map(|j| (0..n).filter(|&i| x[i]).map(|i| weights[i][j]).fold(0.0, f64::max))
                .sum::<f64>()
                / m as f64;
            prop_assert!((obj.exact_value(&x).unwrap() - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn pipage_output_is_feasible(mat in matroid_strategy(), seed in any::<u64>()) {
        let n = mat.ground_size();
        let mut r = rng(seed);
        // weighted coverage: convex along every exchange direction e_i - e_j
        let covers: Vec<Monomial<f64>> = (0..6)
            .map(|_| {
                let vars: Vec<usize> = (0..3).map(|_| r.random_range(0..n)).collect();
                Monomial::new(-r.random::<f64>(), vars)
            })
            .collect();
        let p = Poly::from_terms(n, Basis::Complement, covers).unwrap();
        let a = mat.lp_maximize(&random_point(&mut r, n)).unwrap();
        let b = mat.lp_maximize(&random_point(&mut r, n)).unwrap();
        let y: Vec<f64> = a.iter().zip(&b).map(|(&u, &v)| 0.5 * f64::from(u8::from(u) + u8::from(v))).collect();
        let out = pipage_round(&p, &mat, &y).unwrap();
        prop_assert!(mat.is_independent(&out.x).unwrap());
        prop_assert!(out.steps <= n);
        prop_assert!(out.worst_decrease() <= 1e-12);
    }

    #[test]
    fn swap_round_returns_basis(mat in matroid_strategy(), seed in any::<u64>()) {
        let n = mat.ground_size();
        let mut r = rng(seed);
        let combo: Vec<(f64, Vec<bool>)> = (0..4)
            .map(|_| (0.25, mat.lp_maximize(&random_point(&mut r, n)).unwrap()))
            .collect();
        let x = swap_round(&mat, &combo, seed).unwrap();
        prop_assert!(mat.is_basis(&x).unwrap());
    }
}

#[test]
fn swap_round_preserves_marginals() {
    let mat = PartitionMatroid::new(4, vec![vec![0, 1, 2, 3]], vec![2]).unwrap();
    let combo = vec![
        (0.5, vec![true, true, false, false]),
        (0.3, vec![false, true, true, false]),
        (0.2, vec![false, false, true, true]),
    ];
    let want = [0.5, 0.8, 0.5, 0.2];
    let trials = 20_000;
    let mut counts = [0usize; 4];
    for seed in 0..trials {
        for (c, b) in counts.iter_mut().zip(swap_round(&mat, &combo, seed as u64).unwrap()) {
            *c += usize::from(b);
        }
    }
    for (c, w) in counts.iter().zip(want) {
        assert!((*c as f64 / trials as f64 - w).abs() < 0.02, "{counts:?}");
    }
}

#[test]
fn problem_objectives_are_monotone_submodular() {
    for (problem, n, m) in [
        (VerifyProblem::Sm, 8, 2),
        (VerifyProblem::Im, 7, 3),
        (VerifyProblem::Fl, 7, 3),
        (VerifyProblem::Modular, 6, 1),
    ] {
        for seed in 0..3 {
            let inst = small_instance(problem, n, m, seed).unwrap();
            let (mono, sub) = check_monotone_submodular(&inst.objective, 16, 1e-12).unwrap();
            assert!(mono && sub, "{problem:?} seed {seed}");
            let zero = vec![false; inst.objective.ground_size()];
            assert!(inst.objective.exact_value(&zero).unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn im_values_are_fractions() {
    let inst = small_instance(VerifyProblem::Im, 6, 2, 4).unwrap();
    let n = inst.objective.ground_size();
    let ln2 = 2f64.ln();
    for mask in 0u64..1 << n {
        let v = inst.objective.exact_value(&bits(mask, n)).unwrap();
        assert!((0.0..=ln2 + 1e-12).contains(&v));
    }
}

#[test]
fn cache_gain_starts_at_zero_and_grows() {
    let (inst, _) = gen_cn_synth(
        &CnSynthParams {
            nodes: 4,
            catalog: 2,
            requests: 5,
            capacity: 1,
            load: 0.7,
        },
        3,
    )
    .unwrap();
    let obj = &inst.objective;
    let n = obj.ground_size();
    assert!(obj.exact_value(&vec![false; n]).unwrap().abs() < 1e-12);
    let (mono, _) = check_monotone_submodular(obj, 16, 1e-9).unwrap();
    assert!(mono);
}

#[test]
fn exact_greedy_trajectory_is_feasible_and_monotone() {
    let inst = small_instance(VerifyProblem::Fl, 8, 3, 1).unwrap();
    let res = continuous_greedy(
        &mut ExactOracle::new(&inst.objective),
        &inst.matroid,
        &GreedyConfig::new(0.05).unwrap().with_record_every(1),
    )
    .unwrap();
    assert!(inst.matroid.in_polytope(&res.y, 1e-9));
    for w in res.trace.rows.windows(2) {
        assert!(w[1].estimate >= w[0].estimate - 1e-12);
    }
    assert_relative_eq!(res.trace.rows.last().unwrap().estimate, relaxation(&inst.objective, &res.y), epsilon = 1e-10);
    let g = grad_exact(&inst.objective, &res.y).unwrap();
    let oracle = exact_gradient(&inst.objective, &res.y);
    for (a, b) in g.values.iter().zip(&oracle) {
        assert_relative_eq!(*a, *b, epsilon = 1e-10);
    }
}

#[test]
fn poly_type_alias_round_trips_text() {
    let mut r = rng(8);
    let p = random_poly(&mut r, 5, Basis::Complement, 6, 3);
    let q: Poly = p.to_string().parse().unwrap();
    assert_eq!(p, q);
}
