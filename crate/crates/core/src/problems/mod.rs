//! Builders for the four application families and their synthetic or dataset-backed
//! instances.

pub mod cn;
pub mod fl;
pub mod generators;
pub mod im;
pub mod loaders;
pub mod sm;

pub use cn::{build_cn, CacheNetwork, CacheNetworkSpec, Request};
pub use fl::{build_fl, FacilitySpec};
pub use generators::{
    gen_cn_synth, gen_fl_synth, gen_im_synth, gen_sm_synth, CnSynthParams, EdgeModel,
    FlSynthParams, ImSynthParams, SmSynthParams,
};
pub use im::{build_im, simulate_ic, CascadeSet, DiGraph};
pub use sm::{build_sm, SummarizationSpec};

use crate::matroid::PartitionMatroid;
use crate::objective::{CompositeObjective, ProblemKind};

/// An objective paired with its constraint.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub kind: ProblemKind,
    pub objective: CompositeObjective<f64>,
    pub matroid: PartitionMatroid,
}
