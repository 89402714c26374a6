//! Oracle-backed checks of the estimator and rounding bounds on small instances.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::AnalyticKernel;
use crate::error::{Error, Result};
use crate::matroid::PartitionMatroid;
use crate::objective::{
    bias_bound, grad_exact_guarded, grad_poly, grad_sample, CompositeObjective, CompositeTerm,
    ProblemKind, SampleConfig,
};
use crate::optimizer::{approximation_certificate, continuous_greedy, GreedyConfig, PolyOracle};
use crate::polynomial::{Basis, Monomial, MultilinearPoly};
use crate::problems::{
    gen_cn_synth, gen_fl_synth, gen_im_synth, gen_sm_synth, CnSynthParams, EdgeModel,
    FlSynthParams, ImSynthParams, Instance, SmSynthParams,
};
use crate::rounding::{pipage_certificate, pipage_round};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyProblem {
    Sm,
    Im,
    Fl,
    Cn,
    Modular,
}

impl std::str::FromStr for VerifyProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sm" => Ok(VerifyProblem::Sm),
            "im" => Ok(VerifyProblem::Im),
            "fl" => Ok(VerifyProblem::Fl),
            "cn" => Ok(VerifyProblem::Cn),
            "modular" => Ok(VerifyProblem::Modular),
            _ => Err(Error::Input(format!("unknown problem `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub problem: VerifyProblem,
    /// Ground size.
    pub n: usize,
    /// Number of composite terms (blocks, cascades, customers or requests).
    pub m: usize,
    pub seed: u64,
    pub degrees: Vec<u32>,
    /// Random points per bias check.
    pub points: usize,
    /// Draws for the sampler check.
    pub samples: usize,
    pub gamma: f64,
    pub max_n: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            problem: VerifyProblem::Sm,
            n: 10,
            m: 2,
            seed: 0,
            degrees: (1..=6).collect(),
            points: 5,
            samples: 10_000,
            gamma: 0.1,
            max_n: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured={:.6e} bound={:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.bound
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<CheckLine>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    fn push(&mut self, name: impl Into<String>, measured: f64, bound: f64, pass: bool) {
        self.lines.push(CheckLine {
            name: name.into(),
            measured,
            bound,
            pass,
        });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Small seeded instance of the requested family with ground size `n`.
pub fn small_instance(problem: VerifyProblem, n: usize, m: usize, seed: u64) -> Result<Instance> {
    let m = m.max(1);
    let blocks = if n >= 4 { 2 } else { 1 };
    match problem {
        VerifyProblem::Sm => gen_sm_synth(
            &SmSynthParams {
                n,
                reward_blocks: m.min(n),
                blocks,
                k: 2,
            },
            seed,
        ),
        VerifyProblem::Im => gen_im_synth(
            &ImSynthParams {
                left: n,
                right: n,
                edges: (2 * n).min(n * n),
                model: EdgeModel::Uniform,
                alpha: 2.5,
                p: 0.5,
                cascades: m,
                blocks,
                k: 2,
            },
            seed,
        ),
        VerifyProblem::Fl => gen_fl_synth(
            &FlSynthParams {
                facilities: n,
                customers: m,
                edges: (2 * n).min(n * m),
                blocks,
                k: 2,
            },
            seed,
        ),
        VerifyProblem::Cn => {
            // (nodes - 1) * catalog elements
            let catalog = 2;
            let nodes = (n / catalog).max(1) + 1;
            let (inst, _) = gen_cn_synth(
                &CnSynthParams {
                    nodes,
                    catalog,
                    requests: m.max(2),
                    capacity: 1,
                    load: 0.8,
                },
                seed,
            )?;
            Ok(inst)
        }
        VerifyProblem::Modular => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let total: f64 = r.iter().sum();
            let inner = MultilinearPoly::from_terms(
                n,
                Basis::Standard,
                r.iter().enumerate().map(|(i, &v)| Monomial::new(v / total, [i])),
            )?;
            Ok(Instance {
                name: "modular".into(),
                kind: ProblemKind::Multilinear,
                objective: CompositeObjective::new(
                    n,
                    vec![CompositeTerm {
                        weight: 1.0,
                        kernel: AnalyticKernel::identity(),
                        inner,
                    }],
                    0.0,
                )?,
                matroid: PartitionMatroid::uniform(n, 2.min(n.max(1)))?,
            })
        }
    }
}

fn s_bar(obj: &CompositeObjective<f64>) -> Option<f64> {
    obj.terms().iter().find_map(|t| t.kernel.s_bar())
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Runs the bias, sampler, continuous greedy and pipage checks.
pub fn verify(cfg: &VerifyConfig) -> Result<Report> {
    if cfg.n > cfg.max_n {
        return Err(Error::Guard(format!(
            "verify needs N <= {} for enumeration, got N = {}",
            cfg.max_n, cfg.n
        )));
    }
    let inst = small_instance(cfg.problem, cfg.n, cfg.m, cfg.seed)?;
    let obj = &inst.objective;
    let n = obj.ground_size();
    if n > cfg.max_n {
        return Err(Error::Guard(format!("instance has N = {n} > {}", cfg.max_n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let points: Vec<Vec<f64>> = (0..cfg.points.max(1))
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect();
    let exact: Vec<Vec<f64>> = points
        .iter()
        .map(|y| grad_exact_guarded(obj, y, cfg.max_n).map(|g| g.values))
        .collect::<Result<_>>()?;
    let mut report = Report::default();

    for &l in &cfg.degrees {
        let fhat = obj.build_poly_estimator(l)?;
        let mut worst = 0.0f64;
        for (y, ex) in points.iter().zip(&exact) {
            worst = worst.max(l2(&grad_poly(&fhat, y, l)?.values, ex));
        }
        let bound = bias_bound(inst.kind, obj.terms().len(), n, l, s_bar(obj))?;
        report.push(
            format!("bias L={l}"),
            worst,
            bound,
            worst <= bound + 1e-12,
        );
    }

    let cfg_s = SampleConfig::new(cfg.samples.max(2), cfg.seed)?;
    let est = grad_sample(obj, &points[0], &cfg_s)?;
    let se = est.std_errors.clone().unwrap_or_default();
    let mut worst_z = 0.0f64;
    let mut ok = true;
    for i in 0..n {
        let d = (est.values[i] - exact[0][i]).abs();
        if se[i] > 0.0 {
            worst_z = worst_z.max(d / se[i]);
        } else if d > 1e-12 {
            ok = false;
        }
    }
    report.push(
        format!("sampler T={} (max z-score)", cfg_s.samples()),
        worst_z,
        4.0,
        ok && worst_z <= 4.0,
    );

    let greedy = GreedyConfig::new(cfg.gamma)?;
    for &l in cfg.degrees.iter().take(3) {
        let fhat = obj.build_poly_estimator(l)?;
        let res = continuous_greedy(&mut PolyOracle { fhat: &fhat, degree: l }, &inst.matroid, &greedy)?;
        let cert = approximation_certificate(obj, &inst.matroid, &res.y, l, greedy.iterations(), inst.kind)?;
        report.push(
            format!("greedy certificate L={l} K={}", greedy.iterations()),
            cert.lhs,
            cert.rhs,
            cert.holds(),
        );
        let out = pipage_round(&fhat, &inst.matroid, &res.y)?;
        let pc = pipage_certificate(obj, &res.y, &out.x, l)?;
        report.push(format!("pipage certificate L={l}"), pc.lhs, pc.rhs, pc.holds());
        report.push(
            format!("pipage steps L={l}"),
            out.steps as f64,
            n as f64,
            out.steps <= n && inst.matroid.is_independent(&out.x)?,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sm_suite_passes() {
        let report = verify(&VerifyConfig::default()).unwrap();
        assert_eq!(report.lines.iter().filter(|l| l.name.starts_with("bias")).count(), 6);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn modular_certificate() {
        let cfg = VerifyConfig {
            problem: VerifyProblem::Modular,
            n: 5,
            ..Default::default()
        };
        let report = verify(&cfg).unwrap();
        assert!(report.lines.iter().any(|l| l.name.starts_with("greedy certificate")));
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn oversized_request_refused() {
        let cfg = VerifyConfig {
            n: 30,
            ..Default::default()
        };
        assert!(matches!(verify(&cfg), Err(Error::Guard(_))));
    }
}
