//! Experiment configuration and instance construction.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::io::load_instance;
use crate::error::{input, Result};
use crate::objective::{EstimatorTag, ORACLE_MAX_N};
use crate::problems::loaders::{
    load_movielens_movies, load_movielens_ratings, load_snap_edges, movielens_instance,
    social_im_instance, EpinionsParams, MovieLensParams,
};
use crate::problems::{
    gen_cn_synth, gen_fl_synth, gen_im_synth, gen_sm_synth, CnSynthParams, EdgeModel,
    FlSynthParams, ImSynthParams, Instance, SmSynthParams,
};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "TGREEDY_OUT";

pub const DEFAULT_GRID: [&str; 7] = ["POLY1", "POLY2", "POLY3", "SAMP1", "SAMP10", "SAMP100", "SAMP1000"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorName {
    Imsynth1,
    Imsynth2,
    Flsynth1,
    Smsynth1,
    Cnsynth,
}

impl std::str::FromStr for GeneratorName {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_ascii_lowercase()))
            .or_else(|_| input(format!("unknown generator `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum InstanceSource {
    Generator {
        generator: GeneratorName,
        #[serde(default)]
        seed: u64,
        /// Overrides for the generator's parameters.
        #[serde(default)]
        params: Value,
    },
    File {
        path: PathBuf,
    },
    Snap {
        path: PathBuf,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        params: EpinionsParams,
    },
    Movielens {
        ratings: PathBuf,
        movies: PathBuf,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        params: MovieLensParams,
    },
}

fn params<T: serde::de::DeserializeOwned + Default>(v: &Value) -> Result<T> {
    if v.is_null() {
        return Ok(T::default());
    }
    Ok(serde_json::from_value(v.clone())?)
}

impl InstanceSource {
    pub fn build(&self) -> Result<Instance> {
        match self {
            InstanceSource::Generator {
                generator,
                seed,
                params: p,
            } => match generator {
                GeneratorName::Imsynth1 | GeneratorName::Imsynth2 => {
                    let mut ip: ImSynthParams = params(p)?;
                    ip.model = if *generator == GeneratorName::Imsynth1 {
                        EdgeModel::Uniform
                    } else {
                        EdgeModel::PowerLaw
                    };
                    gen_im_synth(&ip, *seed)
                }
                GeneratorName::Flsynth1 => gen_fl_synth(&params::<FlSynthParams>(p)?, *seed),
                GeneratorName::Smsynth1 => gen_sm_synth(&params::<SmSynthParams>(p)?, *seed),
                GeneratorName::Cnsynth => Ok(gen_cn_synth(&params::<CnSynthParams>(p)?, *seed)?.0),
            },
            InstanceSource::File { path } => load_instance(path),
            InstanceSource::Snap { path, seed, params } => {
                social_im_instance(&load_snap_edges(path)?.graph, params, *seed)
            }
            InstanceSource::Movielens {
                ratings,
                movies,
                seed,
                params,
            } => movielens_instance(
                &load_movielens_ratings(ratings)?,
                &load_movielens_movies(movies)?,
                params,
                *seed,
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundMode {
    #[default]
    None,
    Pipage,
    Swap,
}

impl std::str::FromStr for RoundMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(RoundMode::None),
            "pipage" => Ok(RoundMode::Pipage),
            "swap" => Ok(RoundMode::Swap),
            _ => input(format!("unknown rounding mode `{s}`")),
        }
    }
}

fn default_grid() -> Vec<String> {
    DEFAULT_GRID.iter().map(|s| s.to_string()).collect()
}

fn default_gamma() -> f64 {
    0.01
}

fn default_record_every() -> usize {
    10
}

fn default_max_n() -> usize {
    ORACLE_MAX_N
}

fn default_eval_samples() -> usize {
    20_000
}

fn default_pipage_degree() -> u32 {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    /// Overrides the instance's own name in the output layout.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_grid")]
    pub estimators: Vec<String>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Base seed for the sampling cells.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub round: RoundMode,
    /// Output root; falls back to `$TGREEDY_OUT`, then `out`.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Largest ground size for which utilities are computed by enumeration.
    #[serde(default = "default_max_n")]
    pub oracle_max_n: usize,
    /// Monte-Carlo draws for final utilities above the enumeration limit.
    #[serde(default = "default_eval_samples")]
    pub eval_samples: usize,
    #[serde(default)]
    pub eval_seed: u64,
    /// Add the estimator construction time to the reported seconds.
    #[serde(default)]
    pub include_build: bool,
    /// Draws for the trace value of sampling cells; defaults to the cell's `T`.
    #[serde(default)]
    pub trace_samples: Option<usize>,
    /// Degree of the estimator guiding pipage rounding for non-polynomial cells.
    #[serde(default = "default_pipage_degree")]
    pub pipage_degree: u32,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSource) -> Self {
        ExperimentConfig {
            instance,
            name: None,
            estimators: default_grid(),
            gamma: default_gamma(),
            seed: 0,
            record_every: default_record_every(),
            round: RoundMode::None,
            output: None,
            oracle_max_n: default_max_n(),
            eval_samples: default_eval_samples(),
            eval_seed: 0,
            include_build: false,
            trace_samples: None,
            pipage_degree: default_pipage_degree(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn grid(&self) -> Result<Vec<EstimatorTag>> {
        if self.estimators.is_empty() {
            return input("the estimator grid is empty");
        }
        self.estimators.iter().map(|s| s.parse()).collect()
    }

    pub fn output_root(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"instance":{"source":"generator","generator":"smsynth1","seed":3,"params":{"n":20,"k":2}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.grid().unwrap().len(), 7);
        assert_eq!(cfg.gamma, 0.01);
        let inst = cfg.instance.build().unwrap();
        assert_eq!(inst.objective.ground_size(), 20);
        assert_eq!(inst.matroid.capacities(), &[2, 2]);
    }

    #[test]
    fn empty_grid_rejected() {
        let mut cfg = ExperimentConfig::new(InstanceSource::Generator {
            generator: GeneratorName::Smsynth1,
            seed: 0,
            params: Value::Null,
        });
        cfg.estimators.clear();
        assert!(cfg.grid().is_err());
        cfg.estimators = vec!["POLYX".into()];
        assert!(cfg.grid().is_err());
    }

    #[test]
    fn names_parse() {
        assert_eq!("IMsynth2".parse::<GeneratorName>().unwrap(), GeneratorName::Imsynth2);
        assert!("nope".parse::<GeneratorName>().is_err());
        assert_eq!("swap".parse::<RoundMode>().unwrap(), RoundMode::Swap);
    }
}
