//! Composite objectives `f(x) = offset + sum_j w_j h_j(g_j(x))`, their polynomial and
//! sampling gradient estimators, and exhaustive oracles for small ground sets.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticKernel, KernelKind};
use crate::error::{input, Error, Result};
use crate::matroid::PartitionMatroid;
use crate::polynomial::{check_unit_vector, Basis, MultilinearPoly, SparseScratch};
use crate::scalar::Scalar;

/// Default ground-size limit for the `2^N` enumeration oracles.
pub const ORACLE_MAX_N: usize = 20;

#[derive(Clone, Debug)]
pub struct CompositeTerm<T> {
    pub weight: T,
    pub kernel: AnalyticKernel<T>,
    pub inner: MultilinearPoly<T>,
}

#[derive(Clone, Debug)]
pub struct CompositeObjective<T> {
    ground_size: usize,
    terms: Vec<CompositeTerm<T>>,
    offset: T,
}

/// Which family an objective belongs to; selects the closed-form bias bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Summarization (diversity reward).
    Sm,
    /// Influence maximization.
    Im,
    /// Facility location.
    Fl,
    /// Cache network caching gain.
    Cn,
    /// Purely multilinear objective (identity kernels); the estimator is exact.
    Multilinear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimatorTag {
    Poly(u32),
    Sample(usize),
    Exact,
}

impl fmt::Display for EstimatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorTag::Poly(l) => write!(f, "POLY{l}"),
            EstimatorTag::Sample(t) => write!(f, "SAMP{t}"),
            EstimatorTag::Exact => write!(f, "EXACT"),
        }
    }
}

impl FromStr for EstimatorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let upper = s.to_ascii_uppercase();
        if upper == "EXACT" {
            return Ok(EstimatorTag::Exact);
        }
        if let Some(l) = upper.strip_prefix("POLY") {
            return l
                .parse()
                .map(EstimatorTag::Poly)
                .map_err(|_| Error::Input(format!("bad estimator `{s}`")));
        }
        if let Some(t) = upper.strip_prefix("SAMP") {
            return match t.parse::<usize>() {
                Ok(t) if t >= 1 => Ok(EstimatorTag::Sample(t)),
                _ => input(format!("bad estimator `{s}`")),
            };
        }
        input(format!("unknown estimator `{s}`"))
    }
}

#[derive(Clone, Debug)]
pub struct GradientEstimate<T> {
    pub values: Vec<T>,
    pub tag: EstimatorTag,
    /// Seconds spent computing the estimate.
    pub wall_time: f64,
    /// Per-coordinate standard errors, for sampled estimates.
    pub std_errors: Option<Vec<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    samples: usize,
    pub seed: u64,
}

impl SampleConfig {
    pub fn new(samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return input("sample count must be at least 1");
        }
        Ok(SampleConfig { samples, seed })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }
}

/// Result of [`lipschitz_p`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzBound<T> {
    pub value: T,
    /// `true` when computed by enumerating every independent set; otherwise
    /// `2 f(1)`, an upper bound for monotone objectives.
    pub exhaustive: bool,
}

impl<T: Scalar> CompositeObjective<T> {
    /// Builds the objective; every inner polynomial must share the ground size and basis.
    pub fn new(ground_size: usize, terms: Vec<CompositeTerm<T>>, offset: T) -> Result<Self> {
        if let Some(first) = terms.first() {
            let basis = first.inner.basis();
            for (j, t) in terms.iter().enumerate() {
                if t.inner.ground_size() != ground_size {
                    return input(format!(
                        "term {j} has ground size {}, expected {ground_size}",
                        t.inner.ground_size()
                    ));
                }
                if t.inner.basis() != basis {
                    return input(format!("term {j} uses a different polynomial basis"));
                }
                if !t.weight.is_finite() {
                    return input(format!("term {j} has non-finite weight"));
                }
            }
        }
        Ok(CompositeObjective {
            ground_size,
            terms,
            offset,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn terms(&self) -> &[CompositeTerm<T>] {
        &self.terms
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn basis(&self) -> Basis {
        self.terms
            .first()
            .map(|t| t.inner.basis())
            .unwrap_or_default()
    }

    /// `f(x)` with exact kernels.
    pub fn exact_value(&self, x: &[bool]) -> Result<T> {
        if x.len() != self.ground_size {
            return input(format!(
                "point has length {}, expected {}",
                x.len(),
                self.ground_size
            ));
        }
        self.exact_value_unchecked(x)
    }

    fn exact_value_unchecked(&self, x: &[bool]) -> Result<T> {
        let mut total = self.offset;
        for t in &self.terms {
            total += t.weight * t.kernel.eval(t.inner.evaluate_binary_unchecked(x))?;
        }
        Ok(total)
    }

    /// `sum_j |w_j| R_{j,L}`: a uniform bound on `|f(x) - f_L(x)|`.
    pub fn residual_total(&self, degree: u32) -> T {
        self.terms
            .iter()
            .map(|t| t.weight.abs() * t.kernel.residual_bound(degree))
            .sum()
    }

    /// Expands `offset + sum_j w_j h_L(g_j(x))` into one multilinear polynomial.
    pub fn build_poly_estimator(&self, degree: u32) -> Result<MultilinearPoly<T>> {
        let basis = self.basis();
        let mut expansions = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let expanded = match t.kernel.kind() {
                KernelKind::Identity => t.inner.clone(),
                _ => {
                    let taylor = t.kernel.taylor(degree)?;
                    let shifted = t.inner.add_constant(-taylor.center);
                    // Horner in the idempotent ring
                    let mut coeffs = taylor.coefficients.iter().rev();
                    let lead = *coeffs.next().expect("non-empty Taylor polynomial");
                    let mut acc = MultilinearPoly::constant_in(self.ground_size, basis, lead);
                    for &a in coeffs {
                        acc = acc.multiply(&shifted)?.add_constant(a);
                    }
                    acc
                }
            };
            expansions.push((t.weight, expanded));
        }
        let total = MultilinearPoly::linear_combination(
            self.ground_size,
            basis,
            expansions.iter().map(|(w, p)| (*w, p)),
        )?;
        Ok(total.add_constant(self.offset))
    }

    /// Checks `g_j(x)` against each kernel's domain on every binary `x`.
    pub fn check_domains(&self, max_n: usize) -> Result<()> {
        guard(self.ground_size, max_n)?;
        for mask in 0u64..(1u64 << self.ground_size) {
            let x = mask_to_bits(mask, self.ground_size);
            self.exact_value_unchecked(&x)?;
        }
        Ok(())
    }
}

fn guard(n: usize, max_n: usize) -> Result<()> {
    if n > max_n {
        return Err(Error::Guard(format!(
            "ground size {n} exceeds the exhaustive-oracle limit {max_n}"
        )));
    }
    Ok(())
}

pub(crate) fn mask_to_bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// Deterministic gradient of the polynomial estimator: coordinate `i` is
/// `f_L([y]_{+i}) - f_L([y]_{-i})`.
pub fn grad_poly<T: Scalar>(fhat: &MultilinearPoly<T>, y: &[T], degree: u32) -> Result<GradientEstimate<T>> {
    let start = Instant::now();
    let values = fhat.gradient(y)?;
    Ok(GradientEstimate {
        values,
        tag: EstimatorTag::Poly(degree),
        wall_time: start.elapsed().as_secs_f64(),
        std_errors: None,
    })
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_bernoulli<T: Scalar>(rng: &mut ChaCha8Rng, y: &[T], x: &mut [bool]) {
    for (xi, &yi) in x.iter_mut().zip(y) {
        *xi = rng.random::<f64>() < yi.as_f64();
    }
}

/// Monte-Carlo gradient: `(1/T) sum_l f([x_l]_{+i}) - f([x_l]_{-i})` with
/// `x_l ~ Bernoulli(y)`. Sample `l` draws from its own ChaCha stream of `cfg.seed`.
///
/// All `N` differences of one sample are obtained from a single pass over each
/// `g_j`: since `g_j` is multilinear, `g_j([x]_{+i})` and `g_j([x]_{-i})` follow from
/// `g_j(x)` and the discrete partial in coordinate `i`.
pub fn grad_sample<T: Scalar>(
    obj: &CompositeObjective<T>,
    y: &[T],
    cfg: &SampleConfig,
) -> Result<GradientEstimate<T>> {
    check_unit_vector(y, obj.ground_size)?;
    let start = Instant::now();
    let n = obj.ground_size;
    let t_count = cfg.samples;
    let mut sum = vec![0.0f64; n];
    let mut sumsq = vec![0.0f64; n];
    let mut x = vec![false; n];
    let mut partials = SparseScratch::<T>::new(n);
    let mut row = SparseScratch::<T>::new(n);
    for l in 0..t_count {
        let mut rng = sample_rng(cfg.seed, l as u64);
        draw_bernoulli(&mut rng, y, &mut x);
        for term in &obj.terms {
            partials.clear();
            let g = term.inner.binary_value_and_partials(&x, &mut partials);
            for &i in &partials.touched {
                let d = partials.values[i];
                if d == T::zero() {
                    continue;
                }
                let (hi, lo) = if x[i] { (g, g - d) } else { (g + d, g) };
                let diff = term.kernel.eval(hi)? - term.kernel.eval(lo)?;
                row.add(i, term.weight * diff);
            }
        }
        for &i in &row.touched {
            let v = row.values[i].as_f64();
            sum[i] += v;
            sumsq[i] += v * v;
        }
        row.clear();
    }
    let tf = t_count as f64;
    let values = sum.iter().map(|&s| T::lit(s / tf)).collect();
    let std_errors = sum
        .iter()
        .zip(&sumsq)
        .map(|(&s, &q)| {
            if t_count < 2 {
                return T::zero();
            }
            let mean = s / tf;
            let var = ((q - tf * mean * mean) / (tf - 1.0)).max(0.0);
            T::lit((var / tf).sqrt())
        })
        .collect();
    Ok(GradientEstimate {
        values,
        tag: EstimatorTag::Sample(t_count),
        wall_time: start.elapsed().as_secs_f64(),
        std_errors: Some(std_errors),
    })
}

/// Monte-Carlo estimate of `G(y) = E[f(x)]` from `samples` draws.
pub fn sample_relaxation<T: Scalar>(
    obj: &CompositeObjective<T>,
    y: &[T],
    samples: usize,
    seed: u64,
) -> Result<T> {
    check_unit_vector(y, obj.ground_size)?;
    if samples == 0 {
        return input("sample count must be at least 1");
    }
    let mut x = vec![false; obj.ground_size];
    let mut total = 0.0f64;
    for l in 0..samples {
        let mut rng = sample_rng(seed, l as u64);
        draw_bernoulli(&mut rng, y, &mut x);
        total += obj.exact_value_unchecked(&x)?.as_f64();
    }
    Ok(T::lit(total / samples as f64))
}

/// `G(y)` by summing over all `2^N` binary points.
pub fn relaxation_exact<T: Scalar>(obj: &CompositeObjective<T>, y: &[T]) -> Result<T> {
    relaxation_exact_guarded(obj, y, ORACLE_MAX_N)
}

pub fn relaxation_exact_guarded<T: Scalar>(
    obj: &CompositeObjective<T>,
    y: &[T],
    max_n: usize,
) -> Result<T> {
    guard(obj.ground_size, max_n)?;
    check_unit_vector(y, obj.ground_size)?;
    expectation(obj.ground_size, y, |x| obj.exact_value_unchecked(x))
}

/// `sum_x F(x) prod_i y_i^{x_i} (1 - y_i)^{1 - x_i}`, skipping zero-probability points.
pub(crate) fn expectation<T: Scalar>(
    n: usize,
    y: &[T],
    mut f: impl FnMut(&[bool]) -> Result<T>,
) -> Result<T> {
    let mut total = T::zero();
    let mut x = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        let mut prob = T::one();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = mask >> i & 1 == 1;
            prob *= if *xi { y[i] } else { T::one() - y[i] };
        }
        if prob == T::zero() {
            continue;
        }
        total += prob * f(&x)?;
    }
    Ok(total)
}

fn with_coord<T: Scalar>(y: &[T], i: usize, v: T) -> Vec<T> {
    let mut out = y.to_vec();
    out[i] = v;
    out
}

/// Exact gradient of `G`: `G([y]_{+i}) - G([y]_{-i})` per coordinate.
pub fn grad_exact<T: Scalar>(obj: &CompositeObjective<T>, y: &[T]) -> Result<GradientEstimate<T>> {
    grad_exact_guarded(obj, y, ORACLE_MAX_N)
}

pub fn grad_exact_guarded<T: Scalar>(
    obj: &CompositeObjective<T>,
    y: &[T],
    max_n: usize,
) -> Result<GradientEstimate<T>> {
    guard(obj.ground_size, max_n)?;
    check_unit_vector(y, obj.ground_size)?;
    let start = Instant::now();
    let mut values = Vec::with_capacity(obj.ground_size);
    for i in 0..obj.ground_size {
        let hi = relaxation_exact_guarded(obj, &with_coord(y, i, T::one()), max_n)?;
        let lo = relaxation_exact_guarded(obj, &with_coord(y, i, T::zero()), max_n)?;
        values.push(hi - lo);
    }
    Ok(GradientEstimate {
        values,
        tag: EstimatorTag::Exact,
        wall_time: start.elapsed().as_secs_f64(),
        std_errors: None,
    })
}

/// Per-coordinate bias bound `E[R_L([x]_{+i})] + E[R_L([x]_{-i})]` with the pointwise
/// residual `R_L(x) = sum_j |w_j| |h_j(g_j(x)) - h_L(g_j(x))|`, by enumeration.
pub fn epsilon_vector<T: Scalar>(obj: &CompositeObjective<T>, y: &[T], degree: u32) -> Result<Vec<T>> {
    guard(obj.ground_size, ORACLE_MAX_N)?;
    check_unit_vector(y, obj.ground_size)?;
    let mut tayl = Vec::with_capacity(obj.terms.len());
    for t in &obj.terms {
        tayl.push(match t.kernel.kind() {
            KernelKind::Identity => None,
            _ => Some(t.kernel.taylor(degree)?),
        });
    }
    let residual = |x: &[bool]| -> Result<T> {
        let mut r = T::zero();
        for (t, tp) in obj.terms.iter().zip(&tayl) {
            if let Some(tp) = tp {
                let s = t.inner.evaluate_binary_unchecked(x);
                r += t.weight.abs() * (t.kernel.eval(s)? - tp.eval(s)).abs();
            }
        }
        Ok(r)
    };
    let n = obj.ground_size;
    let mut eps = Vec::with_capacity(n);
    for i in 0..n {
        let hi = expectation(n, &with_coord(y, i, T::one()), residual)?;
        let lo = expectation(n, &with_coord(y, i, T::zero()), residual)?;
        eps.push(hi + lo);
    }
    Ok(eps)
}

/// Closed-form bound on `||grad G - grad G_L||_2` for each problem family.
///
/// `m` is the number of composite terms (edges for cache networks) and `n` the
/// ground size (`|V||C|` for cache networks).
pub fn bias_bound<T: Scalar>(
    kind: ProblemKind,
    m: usize,
    n: usize,
    degree: u32,
    s_bar: Option<T>,
) -> Result<T> {
    let l1 = T::lit(degree as f64 + 1.0);
    let root_n = T::lit(n as f64).sqrt();
    let two_l = T::lit(2.0).powi(degree as i32);
    Ok(match kind {
        ProblemKind::Sm => T::lit(m as f64) * root_n / (l1 * two_l),
        ProblemKind::Im | ProblemKind::Fl => root_n / (l1 * two_l),
        ProblemKind::Cn => {
            let s = s_bar.ok_or_else(|| Error::Input("cache-network bound needs s_bar".into()))?;
            if !(s >= T::zero() && s < T::one()) {
                return Err(Error::Stability(s.as_f64()));
            }
            T::lit(2.0 * m as f64) * root_n * s.powi(degree as i32 + 1) / (T::one() - s)
        }
        ProblemKind::Multilinear => T::zero(),
    })
}

/// Largest `f(x)` over the bases of `mat`, by enumeration. For monotone `f` this is
/// the integral optimum.
pub fn integral_opt<T: Scalar>(
    obj: &CompositeObjective<T>,
    mat: &PartitionMatroid,
) -> Result<(T, Vec<bool>)> {
    check_matroid(obj, mat)?;
    let mut best: Option<(T, Vec<bool>)> = None;
    for x in mat.enumerate_bases()? {
        let v = obj.exact_value_unchecked(&x)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, x));
        }
    }
    best.ok_or_else(|| Error::Input("matroid has no bases".into()))
}

fn check_matroid<T: Scalar>(obj: &CompositeObjective<T>, mat: &PartitionMatroid) -> Result<()> {
    if obj.ground_size != mat.ground_size() {
        return input(format!(
            "objective has ground size {}, matroid {}",
            obj.ground_size,
            mat.ground_size()
        ));
    }
    Ok(())
}

/// `P = 2 max_{x in M} f(x)`, the Lipschitz constant of `G`.
///
/// Enumerates all independent sets when `N <= ORACLE_MAX_N`; otherwise returns
/// `2 f(1)`, which bounds `P` from above only when `f` is monotone.
pub fn lipschitz_p<T: Scalar>(
    obj: &CompositeObjective<T>,
    mat: &PartitionMatroid,
) -> Result<LipschitzBound<T>> {
    check_matroid(obj, mat)?;
    let n = obj.ground_size;
    if n <= ORACLE_MAX_N {
        let mut best = T::neg_infinity();
        for mask in 0u64..(1u64 << n) {
            let x = mask_to_bits(mask, n);
            if mat.is_independent(&x)? {
                best = best.max(obj.exact_value_unchecked(&x)?);
            }
        }
        return Ok(LipschitzBound {
            value: T::lit(2.0) * best,
            exhaustive: true,
        });
    }
    let all = vec![true; n];
    Ok(LipschitzBound {
        value: T::lit(2.0) * obj.exact_value_unchecked(&all)?,
        exhaustive: false,
    })
}

/// Sample count `T = (10 / delta^2)(1 + ln N)` with `delta = 1 / (40 d^2 N)` that the
/// sampling analysis requires for ground size `N` and matroid rank `d`.
pub fn theoretical_sample_count(n: usize, rank: usize) -> u128 {
    let nf = n as f64;
    let d = rank as f64;
    let delta = 1.0 / (40.0 * d * d * nf);
    let t = 10.0 / (delta * delta) * (1.0 + nf.ln());
    if t >= u128::MAX as f64 {
        u128::MAX
    } else {
        t.ceil() as u128
    }
}

/// Exhaustive check of monotonicity and submodularity (diminishing marginals).
/// Returns `(monotone, submodular)`.
pub fn check_monotone_submodular<T: Scalar>(
    obj: &CompositeObjective<T>,
    max_n: usize,
    tol: T,
) -> Result<(bool, bool)> {
    let n = obj.ground_size;
    guard(n, max_n)?;
    let values: Vec<T> = (0u64..(1u64 << n))
        .map(|m| obj.exact_value_unchecked(&mask_to_bits(m, n)))
        .collect::<Result<_>>()?;
    let mut monotone = true;
    let mut submodular = true;
    for a in 0u64..(1u64 << n) {
        for e in 0..n {
            if a >> e & 1 == 1 {
                continue;
            }
            let gain_a = values[(a | 1 << e) as usize] - values[a as usize];
            if gain_a < -tol {
                monotone = false;
            }
            // supersets of a that miss e, via adding one more element
            for b_extra in 0..n {
                if b_extra == e || a >> b_extra & 1 == 1 {
                    continue;
                }
                let b = a | 1 << b_extra;
                let gain_b = values[(b | 1 << e) as usize] - values[b as usize];
                if gain_b > gain_a + tol {
                    submodular = false;
                }
            }
        }
    }
    Ok((monotone, submodular))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::Monomial;
    use approx::assert_relative_eq;

    fn coverage_obj() -> CompositeObjective<f64> {
        let g = MultilinearPoly::from_terms(
            2,
            Basis::Standard,
            [
                Monomial::new(1.0, [0]),
                Monomial::new(1.0, [1]),
                Monomial::new(-1.0, [0, 1]),
            ],
        )
        .unwrap();
        CompositeObjective::new(
            2,
            vec![CompositeTerm {
                weight: 1.0,
                kernel: AnalyticKernel::identity(),
                inner: g,
            }],
            0.0,
        )
        .unwrap()
    }

    fn linear(n: usize, r: &[(usize, f64)], kernel: AnalyticKernel<f64>) -> CompositeObjective<f64> {
        let g = MultilinearPoly::from_terms(
            n,
            Basis::Standard,
            r.iter().map(|&(i, c)| Monomial::new(c, [i])),
        )
        .unwrap();
        CompositeObjective::new(
            n,
            vec![CompositeTerm {
                weight: 1.0,
                kernel,
                inner: g,
            }],
            0.0,
        )
        .unwrap()
    }

    fn sm_toy() -> CompositeObjective<f64> {
        linear(2, &[(0, 0.6), (1, 0.4)], AnalyticKernel::log1p())
    }

    #[test]
    fn exact_values() {
        assert_relative_eq!(sm_toy().exact_value(&[true, true]).unwrap(), 2f64.ln());
        assert_eq!(sm_toy().exact_value(&[false, false]).unwrap(), 0.0);
        assert_eq!(coverage_obj().exact_value(&[true, false]).unwrap(), 1.0);
        assert!(sm_toy().exact_value(&[true]).is_err());
    }

    #[test]
    fn poly_estimator_examples() {
        let cov = coverage_obj();
        for l in 0..4 {
            assert_eq!(cov.build_poly_estimator(l).unwrap(), cov.terms()[0].inner);
        }
        let q = linear(1, &[(0, 0.5)], AnalyticKernel::queue_delay(0.5).unwrap());
        let fhat = q.build_poly_estimator(2).unwrap();
        assert_eq!(fhat.len(), 1);
        assert_relative_eq!(fhat.coefficient(&[0]), 0.75);

        let lg = linear(1, &[(0, 1.0)], AnalyticKernel::log1p());
        let fhat = lg.build_poly_estimator(1).unwrap();
        assert_relative_eq!(fhat.constant_term(), 1.5f64.ln() - 1.0 / 3.0);
        assert_relative_eq!(fhat.coefficient(&[0]), 2.0 / 3.0);
    }

    #[test]
    fn gradient_examples() {
        let cov = coverage_obj();
        let fhat = cov.build_poly_estimator(1).unwrap();
        let g = grad_poly(&fhat, &[0.3, 0.4], 1).unwrap();
        assert_relative_eq!(g.values[0], 0.6);
        assert_relative_eq!(g.values[1], 0.7);
        let e = grad_exact(&cov, &[0.3, 0.4]).unwrap();
        assert_relative_eq!(e.values[0], 0.6, epsilon = 1e-12);
        assert_relative_eq!(e.values[1], 0.7, epsilon = 1e-12);
        assert_eq!(
            grad_poly(&MultilinearPoly::zero(2), &[0.3, 0.4], 1).unwrap().values,
            vec![0.0, 0.0]
        );
        assert_eq!(
            grad_poly(&MultilinearPoly::constant(2, 4.0), &[0.3, 0.4], 1)
                .unwrap()
                .values,
            vec![0.0, 0.0]
        );
        let sm = grad_exact(&sm_toy(), &[0.5, 0.5]).unwrap();
        let want = 0.5 * (1.6f64.ln() + 2f64.ln()) - 0.5 * 1.4f64.ln();
        assert_relative_eq!(sm.values[0], want, epsilon = 1e-12);
        assert_relative_eq!(sm.values[0], 0.413339, epsilon = 1e-6);
    }

    #[test]
    fn relaxation_examples() {
        assert_relative_eq!(relaxation_exact(&coverage_obj(), &[0.5, 0.5]).unwrap(), 0.75);
        assert_relative_eq!(
            relaxation_exact(&sm_toy(), &[1.0, 0.0]).unwrap(),
            sm_toy().exact_value(&[true, false]).unwrap()
        );
        let c = CompositeObjective::<f64>::new(3, vec![], 2.5).unwrap();
        assert_relative_eq!(relaxation_exact(&c, &[0.2, 0.3, 0.9]).unwrap(), 2.5);
        assert_eq!(grad_exact(&c, &[0.2, 0.3, 0.9]).unwrap().values, vec![0.0; 3]);
        let big = CompositeObjective::<f64>::new(21, vec![], 1.0).unwrap();
        assert!(matches!(
            relaxation_exact(&big, &[0.5; 21]),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn sampler_examples() {
        let cov = coverage_obj();
        let exact = grad_sample(&cov, &[1.0, 0.0], &SampleConfig::new(7, 3).unwrap()).unwrap();
        assert_eq!(exact.values, vec![1.0, 0.0]);
        let cfg = SampleConfig::new(100_000, 11).unwrap();
        let g = grad_sample(&cov, &[0.5, 0.5], &cfg).unwrap();
        assert!((g.values[0] - 0.5).abs() <= 3.0 * 0.5 / (1e5f64).sqrt());
        let again = grad_sample(&cov, &[0.5, 0.5], &cfg).unwrap();
        assert_eq!(g.values, again.values);
        assert_eq!(g.tag, EstimatorTag::Sample(100_000));
        assert!(SampleConfig::new(0, 1).is_err());
    }

    #[test]
    fn sampler_matches_naive_formula() {
        // compare the one-pass partials against explicit f([x]_{+i}) - f([x]_{-i})
        let obj = linear(3, &[(0, 0.5), (1, 0.3), (2, 0.2)], AnalyticKernel::log1p());
        let y = [0.3, 0.6, 0.5];
        let cfg = SampleConfig::new(50, 9).unwrap();
        let fast = grad_sample(&obj, &y, &cfg).unwrap();
        let mut naive = vec![0.0; 3];
        let mut x = vec![false; 3];
        for l in 0..50 {
            let mut rng = sample_rng(9, l);
            draw_bernoulli(&mut rng, &y, &mut x);
            for (i, acc) in naive.iter_mut().enumerate() {
                let mut hi = x.clone();
                hi[i] = true;
                let mut lo = x.clone();
                lo[i] = false;
                *acc += obj.exact_value(&hi).unwrap() - obj.exact_value(&lo).unwrap();
            }
        }
        for i in 0..3 {
            assert_relative_eq!(fast.values[i], naive[i] / 50.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn bias_bounds() {
        let sm: f64 = bias_bound(ProblemKind::Sm, 5, 200, 3, None).unwrap();
        assert_relative_eq!(sm, 5.0 * 200f64.sqrt() / 32.0);
        assert_relative_eq!(sm, 2.2097, epsilon = 1e-4);
        let im: f64 = bias_bound(ProblemKind::Im, 1, 200, 3, None).unwrap();
        assert_relative_eq!(im, 0.44194, epsilon = 1e-5);
        let cn: f64 = bias_bound(ProblemKind::Cn, 1, 4, 2, Some(0.5)).unwrap();
        assert_relative_eq!(cn, 1.0);
        assert!(bias_bound::<f64>(ProblemKind::Cn, 1, 4, 2, None).is_err());
    }

    #[test]
    fn lipschitz_and_sample_count() {
        let obj = linear(3, &[(0, 0.5), (1, 0.3), (2, 0.2)], AnalyticKernel::identity());
        let mat = PartitionMatroid::uniform(3, 1).unwrap();
        let p = lipschitz_p(&obj, &mat).unwrap();
        assert!(p.exhaustive);
        assert_relative_eq!(p.value, 1.0);
        let c = CompositeObjective::<f64>::new(3, vec![], 0.7).unwrap();
        assert_relative_eq!(lipschitz_p(&c, &mat).unwrap().value, 1.4);
        let t = theoretical_sample_count(100, 2);
        assert!((t as f64 - 1.435e10).abs() / 1.435e10 < 1e-3, "{t}");
    }

    #[test]
    fn estimator_tags_round_trip() {
        for tag in [EstimatorTag::Poly(2), EstimatorTag::Sample(100), EstimatorTag::Exact] {
            assert_eq!(tag.to_string().parse::<EstimatorTag>().unwrap(), tag);
        }
        assert!("SAMP0".parse::<EstimatorTag>().is_err());
        assert!("FOO1".parse::<EstimatorTag>().is_err());
    }

    #[test]
    fn monotone_submodular_check() {
        assert_eq!(
            check_monotone_submodular(&coverage_obj(), 12, 1e-12).unwrap(),
            (true, true)
        );
        // x0 x1 is supermodular
        let g = MultilinearPoly::from_terms(2, Basis::Standard, [Monomial::new(1.0, [0, 1])]).unwrap();
        let obj = CompositeObjective::new(
            2,
            vec![CompositeTerm {
                weight: 1.0,
                kernel: AnalyticKernel::identity(),
                inner: g,
            }],
            0.0,
        )
        .unwrap();
        assert_eq!(check_monotone_submodular(&obj, 12, 1e-12).unwrap(), (true, false));
    }
}
