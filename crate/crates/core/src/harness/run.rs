//! Running an estimator grid on one instance and writing its artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, RoundMode};
use crate::error::{Error, Result};
use crate::objective::{relaxation_exact_guarded, sample_relaxation, EstimatorTag, SampleConfig};
use crate::optimizer::{
    continuous_greedy, derive_seed, ExactOracle, GradientOracle, GreedyConfig, GreedyResult,
    PolyOracle, SampleOracle,
};
use crate::problems::Instance;
use crate::rounding::{pipage_round, swap_round};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub estimator: String,
    /// Final utility `G(y)`; `NaN` is never written, failed cells carry `error`.
    pub f: Option<f64>,
    /// Greedy loop seconds (plus build time with `include_build`).
    pub seconds: Option<f64>,
    pub err: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_seconds: Option<f64>,
    /// Estimator construction seconds (polynomial expansion).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub build_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounded_f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub instance: String,
    pub runs: Vec<RunRecord>,
    /// Best final utility across the grid.
    pub f_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_seconds: Option<f64>,
}

impl RunSummary {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn run(&self, estimator: &str) -> Option<&RunRecord> {
        self.runs.iter().find(|r| r.estimator == estimator)
    }
}

/// Solution file written next to each trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub estimator: String,
    pub y: Vec<f64>,
    /// `(gamma_k, selected indices)` per greedy step.
    pub steps: Vec<(f64, Vec<usize>)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounded: Option<Vec<usize>>,
}

impl Solution {
    pub fn step_vectors(&self, n: usize) -> Vec<(f64, Vec<bool>)> {
        self.steps
            .iter()
            .map(|(g, idx)| {
                let mut m = vec![false; n];
                for &i in idx {
                    if i < n {
                        m[i] = true;
                    }
                }
                (*g, m)
            })
            .collect()
    }
}

pub fn to_indices(x: &[bool]) -> Vec<usize> {
    x.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

/// Utility of a fractional point: enumeration up to the oracle limit, otherwise a
/// Monte-Carlo estimate with a fixed seed shared by every cell.
pub fn utility(inst: &Instance, y: &[f64], cfg: &ExperimentConfig) -> Result<f64> {
    if inst.objective.ground_size() <= cfg.oracle_max_n {
        relaxation_exact_guarded(&inst.objective, y, cfg.oracle_max_n)
    } else {
        sample_relaxation(&inst.objective, y, cfg.eval_samples.max(1), cfg.eval_seed)
    }
}

pub fn utility_method(inst: &Instance, cfg: &ExperimentConfig) -> String {
    if inst.objective.ground_size() <= cfg.oracle_max_n {
        "exact".into()
    } else {
        format!("sampled:{}", cfg.eval_samples.max(1))
    }
}

/// Per-cell sampling seed.
pub fn cell_seed(base: u64, tag: EstimatorTag) -> u64 {
    match tag {
        EstimatorTag::Sample(t) => derive_seed(base, t as u64, 3),
        EstimatorTag::Poly(l) => derive_seed(base, u64::from(l), 4),
        EstimatorTag::Exact => derive_seed(base, 0, 5),
    }
}

/// Outcome of one estimator cell, before output is written.
pub struct CellRun {
    pub tag: EstimatorTag,
    pub result: GreedyResult<f64>,
    pub build_seconds: f64,
    pub f: f64,
    pub rounded: Option<(Vec<bool>, f64)>,
}

pub fn run_cell(inst: &Instance, tag: EstimatorTag, cfg: &ExperimentConfig) -> Result<CellRun> {
    let greedy = GreedyConfig::new(cfg.gamma)?.with_record_every(cfg.record_every);
    let obj = &inst.objective;
    let t0 = Instant::now();
    let poly = match tag {
        EstimatorTag::Poly(l) => Some(obj.build_poly_estimator(l)?),
        _ => None,
    };
    let build_seconds = t0.elapsed().as_secs_f64();
    let seed = cell_seed(cfg.seed, tag);
    let mut oracle: Box<dyn GradientOracle<f64> + '_> = match (tag, &poly) {
        (EstimatorTag::Poly(l), Some(fhat)) => Box::new(PolyOracle { fhat, degree: l }),
        (EstimatorTag::Sample(t), _) => {
            let mut o = SampleOracle::new(obj, SampleConfig::new(t, seed)?);
            if let Some(ts) = cfg.trace_samples {
                o.trace_samples = ts.max(1);
            }
            Box::new(o)
        }
        _ => Box::new(ExactOracle {
            obj,
            max_n: cfg.oracle_max_n,
        }),
    };
    let result = continuous_greedy(oracle.as_mut(), &inst.matroid, &greedy)?;
    drop(oracle);
    let f = utility(inst, &result.y, cfg)?;
    let rounded = match cfg.round {
        RoundMode::None => None,
        RoundMode::Pipage => {
            let fhat = match poly {
                Some(p) => p,
                None => obj.build_poly_estimator(cfg.pipage_degree)?,
            };
            let x = pipage_round(&fhat, &inst.matroid, &result.y)?.x;
            let v = obj.exact_value(&x)?;
            Some((x, v))
        }
        RoundMode::Swap => {
            let x = swap_round(&inst.matroid, &result.steps, seed)?;
            let v = obj.exact_value(&x)?;
            Some((x, v))
        }
    };
    Ok(CellRun {
        tag,
        result,
        build_seconds,
        f,
        rounded,
    })
}

pub fn instance_dir(root: &Path, name: &str) -> PathBuf {
    root.join(name)
}

fn write_cell(dir: &Path, cell: &CellRun) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("trace.csv"), cell.result.trace.to_csv())?;
    let sol = Solution {
        estimator: cell.tag.to_string(),
        y: cell.result.y.clone(),
        steps: cell
            .result
            .steps
            .iter()
            .map(|(g, m)| (*g, to_indices(m)))
            .collect(),
        rounded: cell.rounded.as_ref().map(|(x, _)| to_indices(x)),
    };
    std::fs::write(dir.join("solution.json"), serde_json::to_string_pretty(&sol)?)?;
    Ok(())
}

/// Builds the instance, runs every grid cell, and writes
/// `<root>/<instance>/<estimator>/trace.csv` plus `<root>/<instance>/summary.json`.
/// A failing cell is recorded with its error; the other cells still run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let grid = cfg.grid()?;
    let t0 = Instant::now();
    let inst = cfg.instance.build()?;
    let instance_seconds = t0.elapsed().as_secs_f64();
    run_on_instance(&inst, &grid, cfg, Some(instance_seconds))
}

pub fn run_on_instance(
    inst: &Instance,
    grid: &[EstimatorTag],
    cfg: &ExperimentConfig,
    instance_seconds: Option<f64>,
) -> Result<RunSummary> {
    if grid.is_empty() {
        return Err(Error::Input("the estimator grid is empty".into()));
    }
    let name = cfg.name.clone().unwrap_or_else(|| inst.name.clone());
    let root = instance_dir(&cfg.output_root(), &name);
    std::fs::create_dir_all(&root)?;
    let mut runs = Vec::with_capacity(grid.len());
    for &tag in grid {
        let label = tag.to_string();
        let record = match run_cell(inst, tag, cfg).and_then(|cell| {
            write_cell(&root.join(&label), &cell)?;
            Ok(cell)
        }) {
            Ok(cell) => RunRecord {
                estimator: label,
                f: Some(cell.f),
                seconds: Some(
                    cell.result.wall_seconds + if cfg.include_build { cell.build_seconds } else { 0.0 },
                ),
                err: None,
                gradient_seconds: Some(cell.result.gradient_seconds),
                build_seconds: Some(cell.build_seconds),
                rounded_f: cell.rounded.map(|(_, v)| v),
                error: None,
            },
            Err(e) => RunRecord {
                estimator: label,
                f: None,
                seconds: None,
                err: None,
                gradient_seconds: None,
                build_seconds: None,
                rounded_f: None,
                error: Some(e.to_string()),
            },
        };
        runs.push(record);
    }
    let f_star = runs.iter().filter_map(|r| r.f).fold(None, |best: Option<f64>, f| {
        Some(best.map_or(f, |b| b.max(f)))
    });
    if let Some(fs) = f_star {
        for r in &mut runs {
            r.err = r.f.map(|f| if fs == 0.0 { 0.0 } else { (f - fs) / fs });
        }
    }
    let summary = RunSummary {
        instance: name,
        runs,
        f_star,
        utility_method: Some(utility_method(inst, cfg)),
        iterations: Some(GreedyConfig::new(cfg.gamma)?.iterations()),
        instance_seconds,
    };
    std::fs::write(root.join("summary.json"), summary.to_json()?)?;
    Ok(summary)
}
