//! Brute-force oracles shared by the integration tests. Nothing here calls the
//! library's own expectation or gradient code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taylor_greedy::{Basis, Monomial, Objective, PartitionMatroid, Poly};

pub fn bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// Value of a polynomial at a binary point, read straight off its monomials.
pub fn poly_at(p: &Poly, x: &[bool]) -> f64 {
    let present = match p.basis() {
        Basis::Standard => true,
        Basis::Complement => false,
    };
    p.terms()
        .filter(|(vars, _)| vars.iter().all(|&i| x[i] == present))
        .map(|(_, c)| c)
        .sum()
}

/// Probability of `x` under independent Bernoulli(y) coordinates.
pub fn prob(x: &[bool], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(&b, &p)| if b { p } else { 1.0 - p }).product()
}

/// `E[f(x)]` by enumerating all `2^N` points.
pub fn expectation(n: usize, y: &[f64], f: impl Fn(&[bool]) -> f64) -> f64 {
    (0u64..1 << n)
        .map(|m| {
            let x = bits(m, n);
            prob(&x, y) * f(&x)
        })
        .sum()
}

/// `dG/dy_i = E[f(x | x_i = 1) - f(x | x_i = 0)]`, by enumeration.
pub fn gradient(n: usize, y: &[f64], f: impl Fn(&[bool]) -> f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let mut yi = y.to_vec();
            yi[i] = 1.0;
            let hi = expectation(n, &yi, &f);
            yi[i] = 0.0;
            hi - expectation(n, &yi, &f)
        })
        .collect()
}

pub fn objective_value(obj: &Objective, x: &[bool]) -> f64 {
    obj.exact_value(x).unwrap()
}

pub fn relaxation(obj: &Objective, y: &[f64]) -> f64 {
    expectation(obj.ground_size(), y, |x| objective_value(obj, x))
}

pub fn exact_gradient(obj: &Objective, y: &[f64]) -> Vec<f64> {
    gradient(obj.ground_size(), y, |x| objective_value(obj, x))
}

/// Best value over all independent sets.
pub fn brute_opt(obj: &Objective, mat: &PartitionMatroid) -> f64 {
    let n = obj.ground_size();
    (0u64..1 << n)
        .map(|m| bits(m, n))
        .filter(|x| mat.is_independent(x).unwrap())
        .map(|x| objective_value(obj, &x))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, basis: Basis, max_terms: usize, max_size: usize) -> Poly {
    let terms = rng.random_range(1..=max_terms);
    let monos: Vec<Monomial<f64>> = (0..terms)
        .map(|_| {
            let size = rng.random_range(0..=max_size.min(n));
            let vars: Vec<usize> = (0..size).map(|_| rng.random_range(0..n)).collect();
            Monomial::new(rng.random_range(-1.0..1.0), vars)
        })
        .collect();
    Poly::from_terms(n, basis, monos).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}
