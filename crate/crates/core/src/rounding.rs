//! Rounding fractional points of the matroid polytope to independent sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input, Result};
use crate::matroid::PartitionMatroid;
use crate::objective::{relaxation_exact_guarded, CompositeObjective, ORACLE_MAX_N};
use crate::polynomial::{check_unit_vector, MultilinearPoly, UNIT_TOL};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct PipageOutcome<T> {
    pub x: Vec<bool>,
    /// Number of mass transfers performed.
    pub steps: usize,
    /// Estimator value before the first step and after every step.
    pub values: Vec<T>,
}

impl<T: Scalar> PipageOutcome<T> {
    /// Largest drop of the estimator between consecutive steps (0 when monotone).
    pub fn worst_decrease(&self) -> T {
        self.values
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(T::zero(), T::max)
    }
}

fn is_fractional<T: Scalar>(v: T) -> bool {
    let tol = T::lit(UNIT_TOL);
    v > tol && v < T::one() - tol
}

fn snap<T: Scalar>(v: T) -> T {
    let tol = T::lit(UNIT_TOL);
    if v <= tol {
        T::zero()
    } else if v >= T::one() - tol {
        T::one()
    } else {
        v
    }
}

/// Deterministic pipage rounding guided by the estimator `fhat`.
///
/// Each step either moves mass between the two lowest-index fractional coordinates
/// of the first block holding at least two, picking the better of the two extreme
/// transfers (ties raise the lower index), or settles a lone fractional coordinate
/// at whichever of 0 and 1 scores higher. Every step makes at least one coordinate
/// integral, so at most `N` steps are taken.
pub fn pipage_round<T: Scalar>(
    fhat: &MultilinearPoly<T>,
    mat: &PartitionMatroid,
    y: &[T],
) -> Result<PipageOutcome<T>> {
    let n = mat.ground_size();
    check_unit_vector(y, n)?;
    if fhat.ground_size() != n {
        return input(format!(
            "estimator has ground size {}, matroid {n}",
            fhat.ground_size()
        ));
    }
    if !mat.in_polytope(y, T::lit(UNIT_TOL)) {
        return input("point lies outside the matroid polytope");
    }
    let mut y: Vec<T> = y.iter().map(|&v| snap(v)).collect();
    let mut values = vec![fhat.evaluate(&y)?];
    let mut steps = 0;
    loop {
        let fractional: Vec<Vec<usize>> = mat
            .blocks()
            .iter()
            .map(|b| {
                let mut f: Vec<usize> = b.iter().copied().filter(|&i| is_fractional(y[i])).collect();
                f.sort_unstable();
                f
            })
            .collect();
        let (a, b) = if let Some(f) = fractional.iter().find(|f| f.len() >= 2) {
            let (i, j) = (f[0], f[1]);
            let eps1 = (T::one() - y[i]).min(y[j]);
            let eps2 = y[i].min(T::one() - y[j]);
            let mut raise_i = y.clone();
            raise_i[i] = snap(raise_i[i] + eps1);
            raise_i[j] = snap(raise_i[j] - eps1);
            let mut raise_j = y.clone();
            raise_j[i] = snap(raise_j[i] - eps2);
            raise_j[j] = snap(raise_j[j] + eps2);
            (raise_i, raise_j)
        } else if let Some(f) = fractional.iter().find(|f| f.len() == 1) {
            let i = f[0];
            let mut up = y.clone();
            up[i] = T::one();
            let mut down = y.clone();
            down[i] = T::zero();
            if mat.in_polytope(&up, T::lit(UNIT_TOL)) {
                (up, down)
            } else {
                (down.clone(), down)
            }
        } else {
            break;
        };
        let va = fhat.evaluate(&a)?;
        let vb = fhat.evaluate(&b)?;
        let (next, v) = if va >= vb { (a, va) } else { (b, vb) };
        y = next;
        values.push(v);
        steps += 1;
    }
    let x: Vec<bool> = y.iter().map(|&v| v > T::lit(0.5)).collect();
    debug_assert!(mat.is_independent(&x).unwrap_or(false));
    Ok(PipageOutcome { x, steps, values })
}

/// Both sides of `G(x_out) >= G(y) - 2(N+1) R_L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipageCertificate<T> {
    pub lhs: T,
    pub rhs: T,
    /// `G(y)`.
    pub relaxed: T,
    /// `sum_j |w_j| R_{j,L}`.
    pub residual: T,
}

impl<T: Scalar> PipageCertificate<T> {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs - T::lit(1e-12)
    }
}

pub fn pipage_certificate<T: Scalar>(
    obj: &CompositeObjective<T>,
    y: &[T],
    x_out: &[bool],
    degree: u32,
) -> Result<PipageCertificate<T>> {
    let n = obj.ground_size();
    if x_out.len() != n {
        return input(format!("rounded point has length {}, expected {n}", x_out.len()));
    }
    let relaxed = relaxation_exact_guarded(obj, y, ORACLE_MAX_N)?;
    let xo: Vec<T> = x_out.iter().map(|&b| if b { T::one() } else { T::zero() }).collect();
    let lhs = relaxation_exact_guarded(obj, &xo, ORACLE_MAX_N)?;
    let residual = obj.residual_total(degree);
    let rhs = relaxed - T::lit(2.0 * (n as f64 + 1.0)) * residual;
    Ok(PipageCertificate {
        lhs,
        rhs,
        relaxed,
        residual,
    })
}

/// Randomized swap rounding of the convex combination `sum_k gamma_k m_k`.
///
/// Each `m_k` is first padded to a basis. The bases are merged left to right: while
/// the running basis `C` (weight `acc`) differs from the next basis `B` (weight
/// `gamma`), a pair `i in C \ B`, `j in B \ C` from the same block is exchanged, keeping
/// `C`'s element with probability `acc / (acc + gamma)`.
pub fn swap_round(
    mat: &PartitionMatroid,
    combo: &[(f64, Vec<bool>)],
    seed: u64,
) -> Result<Vec<bool>> {
    if combo.is_empty() {
        return input("empty convex combination");
    }
    let total: f64 = combo.iter().map(|(g, _)| g).sum();
    if (total - 1.0).abs() > 1e-9 {
        return input(format!("combination weights sum to {total}, expected 1"));
    }
    let mut bases = Vec::with_capacity(combo.len());
    for (k, (gamma, m)) in combo.iter().enumerate() {
        if !(*gamma >= 0.0) {
            return input(format!("weight {k} is negative"));
        }
        if !mat.is_independent(m)? {
            return input(format!("vector {k} is not independent"));
        }
        bases.push((*gamma, mat.pad_to_basis(m)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut iter = bases.into_iter();
    let (mut acc, mut current) = iter.next().expect("non-empty");
    for (gamma, mut other) in iter {
        if gamma == 0.0 {
            continue;
        }
        let keep = acc / (acc + gamma);
        for block in mat.blocks() {
            loop {
                let i = block.iter().copied().filter(|&i| current[i] && !other[i]).min();
                let j = block.iter().copied().filter(|&j| other[j] && !current[j]).min();
                let (Some(i), Some(j)) = (i, j) else { break };
                if rng.random::<f64>() < keep {
                    other[j] = false;
                    other[i] = true;
                } else {
                    current[i] = false;
                    current[j] = true;
                }
            }
        }
        acc += gamma;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{Basis, Monomial};

    fn coverage() -> MultilinearPoly<f64> {
        MultilinearPoly::from_terms(
            2,
            Basis::Standard,
            [
                Monomial::new(1.0, [0]),
                Monomial::new(1.0, [1]),
                Monomial::new(-1.0, [0, 1]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn pipage_examples() {
        let mat = PartitionMatroid::uniform(2, 1).unwrap();
        let out = pipage_round(&coverage(), &mat, &[0.5, 0.5]).unwrap();
        assert_eq!(out.x, vec![true, false]);
        assert_eq!(out.values, vec![0.75, 1.0]);
        assert_eq!(out.steps, 1);

        let out = pipage_round(&coverage(), &mat, &[0.0, 1.0]).unwrap();
        assert_eq!(out.x, vec![false, true]);
        assert_eq!(out.steps, 0);

        let mat2 = PartitionMatroid::uniform(2, 2).unwrap();
        let out = pipage_round(&coverage(), &mat2, &[0.3, 0.0]).unwrap();
        assert_eq!(out.x, vec![true, false]);

        assert!(pipage_round(&coverage(), &mat, &[0.7, 0.7]).is_err());
    }

    #[test]
    fn swap_examples() {
        let mat = PartitionMatroid::uniform(2, 1).unwrap();
        let combo = vec![(0.5, vec![true, false]), (0.5, vec![false, true])];
        let hits = (0..10_000)
            .filter(|&s| swap_round(&mat, &combo, s).unwrap()[0])
            .count();
        assert!((hits as f64 / 1e4 - 0.5).abs() < 0.02, "{hits}");
        assert_eq!(
            swap_round(&mat, &[(1.0, vec![false, true])], 3).unwrap(),
            vec![false, true]
        );
        assert!(swap_round(&mat, &[(0.7, vec![true, false])], 3).is_err());
        assert!(swap_round(&mat, &[(1.0, vec![true, true])], 3).is_err());
        // a lone empty vector is padded to the lowest-index basis
        assert_eq!(
            swap_round(&mat, &[(1.0, vec![false, false])], 3).unwrap(),
            vec![true, false]
        );
    }
}
