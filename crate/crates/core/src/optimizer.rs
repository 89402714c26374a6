//! The continuous greedy (Frank-Wolfe) loop over a partition matroid polytope.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::{input, Error, Result};
use crate::matroid::PartitionMatroid;
use crate::objective::{
    bias_bound, grad_exact_guarded, grad_sample, integral_opt, lipschitz_p,
    relaxation_exact_guarded, sample_relaxation, CompositeObjective, EstimatorTag, ProblemKind,
    SampleConfig, ORACLE_MAX_N,
};
use crate::polynomial::MultilinearPoly;
use crate::scalar::Scalar;

pub const TRACE_HEADER: &str = "k,t,estimate,wall_seconds";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreedyConfig {
    gamma: f64,
    /// Trace stride in iterations; the first and last iterates are always recorded.
    pub record_every: usize,
    /// Keep a copy of `y` in every trace row.
    pub snapshots: bool,
}

impl GreedyConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return input(format!("step size {gamma} must lie in (0, 1]"));
        }
        Ok(GreedyConfig {
            gamma,
            record_every: 10,
            snapshots: false,
        })
    }

    pub fn with_record_every(mut self, stride: usize) -> Self {
        self.record_every = stride.max(1);
        self
    }

    pub fn with_snapshots(mut self, on: bool) -> Self {
        self.snapshots = on;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Number of iterations `K = ceil(1 / gamma)`.
    pub fn iterations(&self) -> usize {
        self.step_sizes().len()
    }

    /// `gamma_k = min(gamma, 1 - t_k)`; the final step is clipped so the sizes sum to 1.
    pub fn step_sizes(&self) -> Vec<f64> {
        let k = ((1.0 / self.gamma) - 1e-9).ceil().max(1.0) as usize;
        let mut steps = vec![self.gamma; k];
        steps[k - 1] = 1.0 - (k - 1) as f64 * self.gamma;
        steps
    }
}

/// Gradient source driving [`continuous_greedy`].
pub trait GradientOracle<T: Scalar> {
    fn tag(&self) -> EstimatorTag;
    fn ground_size(&self) -> usize;
    /// Gradient estimate at iteration `k`.
    fn gradient(&mut self, y: &[T], k: usize) -> Result<Vec<T>>;
    /// Objective value recorded in the trace.
    fn estimate(&mut self, y: &[T], k: usize) -> Result<T>;
}

/// Gradients of an expanded polynomial estimator.
pub struct PolyOracle<'a, T> {
    pub fhat: &'a MultilinearPoly<T>,
    pub degree: u32,
}

impl<T: Scalar> GradientOracle<T> for PolyOracle<'_, T> {
    fn tag(&self) -> EstimatorTag {
        EstimatorTag::Poly(self.degree)
    }

    fn ground_size(&self) -> usize {
        self.fhat.ground_size()
    }

    fn gradient(&mut self, y: &[T], _k: usize) -> Result<Vec<T>> {
        self.fhat.gradient(y)
    }

    fn estimate(&mut self, y: &[T], _k: usize) -> Result<T> {
        self.fhat.evaluate(y)
    }
}

/// Monte-Carlo gradients; iteration `k` uses a seed derived from `(seed, k)`.
pub struct SampleOracle<'a, T> {
    pub obj: &'a CompositeObjective<T>,
    pub config: SampleConfig,
    /// Draws used for the trace value.
    pub trace_samples: usize,
}

impl<'a, T: Scalar> SampleOracle<'a, T> {
    pub fn new(obj: &'a CompositeObjective<T>, config: SampleConfig) -> Self {
        SampleOracle {
            obj,
            config,
            trace_samples: config.samples(),
        }
    }
}

pub(crate) fn derive_seed(seed: u64, k: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl<T: Scalar> GradientOracle<T> for SampleOracle<'_, T> {
    fn tag(&self) -> EstimatorTag {
        EstimatorTag::Sample(self.config.samples())
    }

    fn ground_size(&self) -> usize {
        self.obj.ground_size()
    }

    fn gradient(&mut self, y: &[T], k: usize) -> Result<Vec<T>> {
        let cfg = SampleConfig::new(self.config.samples(), derive_seed(self.config.seed, k as u64, 1))?;
        Ok(grad_sample(self.obj, y, &cfg)?.values)
    }

    fn estimate(&mut self, y: &[T], k: usize) -> Result<T> {
        sample_relaxation(
            self.obj,
            y,
            self.trace_samples,
            derive_seed(self.config.seed, k as u64, 2),
        )
    }
}

/// Exact gradients by enumeration (small `N` only).
pub struct ExactOracle<'a, T> {
    pub obj: &'a CompositeObjective<T>,
    pub max_n: usize,
}

impl<'a, T: Scalar> ExactOracle<'a, T> {
    pub fn new(obj: &'a CompositeObjective<T>) -> Self {
        ExactOracle {
            obj,
            max_n: ORACLE_MAX_N,
        }
    }
}

impl<T: Scalar> GradientOracle<T> for ExactOracle<'_, T> {
    fn tag(&self) -> EstimatorTag {
        EstimatorTag::Exact
    }

    fn ground_size(&self) -> usize {
        self.obj.ground_size()
    }

    fn gradient(&mut self, y: &[T], _k: usize) -> Result<Vec<T>> {
        Ok(grad_exact_guarded(self.obj, y, self.max_n)?.values)
    }

    fn estimate(&mut self, y: &[T], _k: usize) -> Result<T> {
        relaxation_exact_guarded(self.obj, y, self.max_n)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow<T> {
    /// Number of completed iterations.
    pub k: usize,
    /// Accumulated step size.
    pub t: f64,
    pub estimate: T,
    /// Loop time so far, excluding trace evaluations.
    pub wall_seconds: f64,
    pub y: Option<Vec<T>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GreedyTrace<T> {
    pub rows: Vec<TraceRow<T>>,
}

impl<T: Scalar> GreedyTrace<T> {
    /// CSV with header `k,t,estimate,wall_seconds`.
    pub fn to_csv(&self) -> String {
        self.render(true)
    }

    /// The CSV without the timing column; identical across reruns with the same seeds.
    pub fn to_csv_untimed(&self) -> String {
        self.render(false)
    }

    fn render(&self, timed: bool) -> String {
        let mut out = String::new();
        out.push_str(if timed { TRACE_HEADER } else { "k,t,estimate" });
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{}", r.k, r.t, r.estimate.as_f64());
            if timed {
                let _ = write!(out, ",{}", r.wall_seconds);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == TRACE_HEADER => {}
            Some((i, h)) => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected header `{TRACE_HEADER}`, found `{h}`"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty trace".into(),
                })
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let k = fields[0].parse().map_err(|_| bad("bad iteration"))?;
            let t = fields[1].parse().map_err(|_| bad("bad t"))?;
            let estimate: f64 = fields[2].parse().map_err(|_| bad("bad estimate"))?;
            let wall_seconds = fields[3].parse().map_err(|_| bad("bad wall_seconds"))?;
            rows.push(TraceRow {
                k,
                t,
                estimate: T::lit(estimate),
                wall_seconds,
                y: None,
            });
        }
        Ok(GreedyTrace { rows })
    }
}

#[derive(Clone, Debug)]
pub struct GreedyResult<T> {
    pub y: Vec<T>,
    pub trace: GreedyTrace<T>,
    /// `(gamma_k, m_k)` per iteration; `y = sum_k gamma_k m_k`.
    pub steps: Vec<(f64, Vec<bool>)>,
    /// Time spent inside the gradient oracle.
    pub gradient_seconds: f64,
    /// Loop time excluding trace evaluations.
    pub wall_seconds: f64,
}

/// Runs `K = ceil(1/gamma)` Frank-Wolfe steps from `y = 0`, each moving along the
/// matroid vertex that maximizes the inner product with the estimated gradient.
pub fn continuous_greedy<T: Scalar, O: GradientOracle<T> + ?Sized>(
    oracle: &mut O,
    mat: &PartitionMatroid,
    cfg: &GreedyConfig,
) -> Result<GreedyResult<T>> {
    let n = mat.ground_size();
    if oracle.ground_size() != n {
        return input(format!(
            "estimator has ground size {}, matroid {n}",
            oracle.ground_size()
        ));
    }
    let steps_sizes = cfg.step_sizes();
    let iterations = steps_sizes.len();
    let mut y = vec![T::zero(); n];
    let mut t = 0.0f64;
    let mut trace = GreedyTrace { rows: Vec::new() };
    let mut steps = Vec::with_capacity(iterations);
    let mut gradient_seconds = 0.0;
    let mut excluded = 0.0;
    let start = Instant::now();

    let mut record = |k: usize, t: f64, y: &[T], oracle: &mut O, excluded: &mut f64| -> Result<()> {
        let wall_seconds = start.elapsed().as_secs_f64() - *excluded;
        let t0 = Instant::now();
        let estimate = oracle.estimate(y, k).map_err(|e| Error::Iteration {
            iteration: k,
            source: Box::new(e),
        })?;
        trace.rows.push(TraceRow {
            k,
            t,
            estimate,
            wall_seconds,
            y: cfg.snapshots.then(|| y.to_vec()),
        });
        *excluded += t0.elapsed().as_secs_f64();
        Ok(())
    };

    record(0, 0.0, &y, oracle, &mut excluded)?;
    for (k, &gamma_k) in steps_sizes.iter().enumerate() {
        let g0 = Instant::now();
        let grad = oracle.gradient(&y, k).map_err(|e| Error::Iteration {
            iteration: k,
            source: Box::new(e),
        })?;
        gradient_seconds += g0.elapsed().as_secs_f64();
        let m = mat.lp_maximize(&grad)?;
        let step = T::lit(gamma_k);
        for (yi, &mi) in y.iter_mut().zip(&m) {
            if mi {
                *yi = (*yi + step).min(T::one());
            }
        }
        t = if k + 1 == iterations { 1.0 } else { t + gamma_k };
        steps.push((gamma_k, m));
        if (k + 1) % cfg.record_every == 0 || k + 1 == iterations {
            record(k + 1, t, &y, oracle, &mut excluded)?;
        }
    }
    let wall_seconds = start.elapsed().as_secs_f64() - excluded;
    Ok(GreedyResult {
        y,
        trace,
        steps,
        gradient_seconds,
        wall_seconds,
    })
}

/// Both sides of the end-to-end continuous greedy guarantee.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproximationCertificate<T> {
    /// `G(y_K)` by enumeration.
    pub lhs: T,
    /// `(1 - 1/e) OPT - D eps(L) - P / (2K)`.
    pub rhs: T,
    pub opt: T,
    pub diameter: T,
    pub bias: T,
    pub lipschitz: T,
    pub iterations: usize,
}

impl<T: Scalar> ApproximationCertificate<T> {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs - T::lit(1e-12)
    }
}

/// Evaluates `G(y_K) >= (1 - 1/e) OPT - D eps(L) - P / (2K)` with the integral optimum
/// found by enumerating bases. Guarded to small ground sets.
pub fn approximation_certificate<T: Scalar>(
    obj: &CompositeObjective<T>,
    mat: &PartitionMatroid,
    y: &[T],
    degree: u32,
    iterations: usize,
    kind: ProblemKind,
) -> Result<ApproximationCertificate<T>> {
    if iterations == 0 {
        return input("iteration count must be positive");
    }
    let lhs = relaxation_exact_guarded(obj, y, ORACLE_MAX_N)?;
    let (opt, _) = integral_opt(obj, mat)?;
    let s_bar = obj.terms().iter().find_map(|t| t.kernel.s_bar());
    let bias = bias_bound(kind, obj.terms().len(), obj.ground_size(), degree, s_bar)?;
    let lipschitz = lipschitz_p(obj, mat)?.value;
    let diameter = T::lit(mat.diameter());
    let factor = T::one() - T::lit((-1.0f64).exp());
    let rhs = factor * opt - diameter * bias - lipschitz / T::lit(2.0 * iterations as f64);
    Ok(ApproximationCertificate {
        lhs,
        rhs,
        opt,
        diameter,
        bias,
        lipschitz,
        iterations,
    })
}
