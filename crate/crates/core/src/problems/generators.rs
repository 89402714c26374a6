//! Seeded synthetic instances.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cn::{build_cn, CacheNetworkSpec, Request};
use super::fl::{build_fl, FacilitySpec};
use super::im::{build_im, simulate_ic, DiGraph};
use super::sm::{build_sm, SummarizationSpec};
use super::Instance;
use crate::analytic::AnalyticKernel;
use crate::error::{input, Result};
use crate::matroid::PartitionMatroid;
use crate::objective::ProblemKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeModel {
    Uniform,
    PowerLaw,
}

/// Bipartite influence instance: edges run from `V1 = 0..left` to
/// `V2 = left..left+right`, and only `V1` nodes may be seeded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImSynthParams {
    pub left: usize,
    pub right: usize,
    pub edges: usize,
    pub model: EdgeModel,
    /// Degree exponent of the power-law model.
    pub alpha: f64,
    pub p: f64,
    pub cascades: usize,
    pub blocks: usize,
    pub k: usize,
}

impl Default for ImSynthParams {
    fn default() -> Self {
        ImSynthParams {
            left: 100,
            right: 100,
            edges: 400,
            model: EdgeModel::Uniform,
            alpha: 2.5,
            p: 1.0,
            cascades: 1,
            blocks: 10,
            k: 3,
        }
    }
}

fn bipartite_edges(
    rng: &mut ChaCha8Rng,
    left: usize,
    right: usize,
    count: usize,
    model: EdgeModel,
    alpha: f64,
) -> Result<Vec<(usize, usize)>> {
    if count > left * right {
        return input(format!("{count} edges do not fit in a {left}x{right} bipartite graph"));
    }
    if model == EdgeModel::PowerLaw && !(alpha > 1.0) {
        return input(format!("power-law exponent {alpha} must exceed 1"));
    }
    // expected out-degree of the r-th ranked source ~ r^{-1/(alpha-1)}
    let mut weights: Vec<f64> = (0..left)
        .map(|r| match model {
            EdgeModel::Uniform => 1.0,
            EdgeModel::PowerLaw => ((r + 1) as f64).powf(-1.0 / (alpha - 1.0)),
        })
        .collect();
    weights.shuffle(rng);
    let source = WeightedIndex::new(&weights).map_err(|e| crate::error::Error::Input(e.to_string()))?;
    let mut seen = HashSet::with_capacity(count);
    let mut edges = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while edges.len() < count {
        attempts += 1;
        let u = if attempts > 100 * count.max(1) {
            // saturated high-weight sources; fall back to uniform sources
            rng.random_range(0..left)
        } else {
            source.sample(rng)
        };
        let v = left + rng.random_range(0..right);
        if seen.insert((u, v)) {
            edges.push((u, v));
        }
    }
    Ok(edges)
}

pub fn gen_im_synth(params: &ImSynthParams, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = bipartite_edges(
        &mut rng,
        params.left,
        params.right,
        params.edges,
        params.model,
        params.alpha,
    )?;
    let graph = DiGraph::new(params.left + params.right, edges)?;
    let cascades = simulate_ic(&graph, params.p, params.cascades, rng.random())?;
    let candidates: Vec<usize> = (0..params.left).collect();
    let objective = build_im(&cascades, &candidates, AnalyticKernel::log1p())?;
    let matroid = PartitionMatroid::equal_blocks(params.left, params.blocks, params.k)?;
    let name = match params.model {
        EdgeModel::Uniform => "IMsynth1",
        EdgeModel::PowerLaw => "IMsynth2",
    };
    Ok(Instance {
        name: name.into(),
        kind: ProblemKind::Im,
        objective,
        matroid,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlSynthParams {
    pub facilities: usize,
    pub customers: usize,
    pub edges: usize,
    pub blocks: usize,
    pub k: usize,
}

impl Default for FlSynthParams {
    fn default() -> Self {
        FlSynthParams {
            facilities: 200,
            customers: 200,
            edges: 800,
            blocks: 10,
            k: 5,
        }
    }
}

pub fn gen_fl_synth(params: &FlSynthParams, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m) = (params.facilities, params.customers);
    if params.edges > n * m {
        return input(format!("{} edges do not fit in a {n}x{m} bipartite graph", params.edges));
    }
    let mut seen = HashSet::with_capacity(params.edges);
    let mut triples = Vec::with_capacity(params.edges);
    while triples.len() < params.edges {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..m);
        if seen.insert((i, j)) {
            let level = rng.random_range(0..=5u32);
            triples.push((i, j, f64::from(level) * 0.2));
        }
    }
    let spec = FacilitySpec::from_triples(n, m, triples)?;
    Ok(Instance {
        name: "FLsynth1".into(),
        kind: ProblemKind::Fl,
        objective: build_fl(&spec, AnalyticKernel::log1p())?,
        matroid: PartitionMatroid::equal_blocks(n, params.blocks, params.k)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmSynthParams {
    pub n: usize,
    /// Number of similarity blocks.
    pub reward_blocks: usize,
    pub blocks: usize,
    pub k: usize,
}

impl Default for SmSynthParams {
    fn default() -> Self {
        SmSynthParams {
            n: 200,
            reward_blocks: 5,
            blocks: 2,
            k: 10,
        }
    }
}

pub fn gen_sm_synth(params: &SmSynthParams, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n;
    if params.reward_blocks == 0 || params.reward_blocks > n {
        return input(format!("cannot split {n} elements into {} blocks", params.reward_blocks));
    }
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let m = params.reward_blocks;
    let blocks = (0..m).map(|b| (b * n / m..(b + 1) * n / m).collect()).collect();
    let matroid = PartitionMatroid::equal_blocks(n, params.blocks, params.k)?;
    let spec = SummarizationSpec::normalized(raw, blocks, matroid)?;
    let (objective, matroid) = build_sm(&spec, AnalyticKernel::log1p())?;
    Ok(Instance {
        name: "SMsynth1".into(),
        kind: ProblemKind::Sm,
        objective,
        matroid,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CnSynthParams {
    pub nodes: usize,
    pub catalog: usize,
    pub requests: usize,
    pub capacity: usize,
    /// Worst-case edge load with empty caches; service rates are scaled to hit it.
    pub load: f64,
}

impl Default for CnSynthParams {
    fn default() -> Self {
        CnSynthParams {
            nodes: 6,
            catalog: 3,
            requests: 12,
            capacity: 1,
            load: 0.8,
        }
    }
}

/// Random tree rooted at node 0, which serves the whole catalog; requests travel
/// from random non-root nodes to the root.
pub fn gen_cn_synth(params: &CnSynthParams, seed: u64) -> Result<(Instance, CacheNetworkSpec)> {
    if params.nodes < 2 || params.catalog == 0 {
        return input("a cache network needs at least 2 nodes and 1 item");
    }
    if !(params.load > 0.0 && params.load < 1.0) {
        return input(format!("target load {} must lie in (0, 1)", params.load));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parent: Vec<usize> = (0..params.nodes)
        .map(|v| if v == 0 { 0 } else { rng.random_range(0..v) })
        .collect();
    let mut requests = Vec::with_capacity(params.requests);
    for _ in 0..params.requests {
        let mut v = rng.random_range(1..params.nodes);
        let item = rng.random_range(0..params.catalog);
        let mut path = vec![v];
        while v != 0 {
            v = parent[v];
            path.push(v);
        }
        requests.push(Request {
            item,
            path,
            rate: 0.5 + rng.random::<f64>(),
        });
    }
    let mut unit_load = vec![0.0; params.nodes];
    for r in &requests {
        for w in r.path.windows(2) {
            unit_load[w[0]] += r.rate;
        }
    }
    let worst = unit_load.iter().copied().fold(0.0, f64::max);
    let mu = (worst / params.load).max(f64::MIN_POSITIVE);
    let edges = (1..params.nodes)
        .flat_map(|v| [(v, parent[v], mu), (parent[v], v, mu)])
        .collect();
    let mut capacities = vec![params.capacity; params.nodes];
    capacities[0] = 0;
    let spec = CacheNetworkSpec {
        nodes: params.nodes,
        edges,
        catalog: params.catalog,
        requests,
        capacities,
    };
    let net = build_cn(&spec)?;
    Ok((
        Instance {
            name: "CNsynth".into(),
            kind: ProblemKind::Cn,
            objective: net.objective,
            matroid: net.matroid,
        },
        spec,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shapes() {
        let sm = gen_sm_synth(&SmSynthParams::default(), 1).unwrap();
        assert_eq!(sm.objective.ground_size(), 200);
        assert_eq!(sm.objective.terms().len(), 5);
        assert!(sm.objective.terms().iter().all(|t| t.inner.len() == 40));
        assert_eq!(sm.matroid.blocks().len(), 2);
        assert_eq!(sm.matroid.capacities(), &[10, 10]);

        let im = gen_im_synth(&ImSynthParams::default(), 1).unwrap();
        assert_eq!(im.objective.ground_size(), 100);
        assert_eq!(im.matroid.blocks().len(), 10);
        assert_eq!(im.matroid.rank(), 30);

        let fl = gen_fl_synth(&FlSynthParams::default(), 1).unwrap();
        assert_eq!(fl.objective.ground_size(), 200);
        assert_eq!(fl.objective.terms().len(), 200);
        assert_eq!(fl.matroid.rank(), 50);
    }

    #[test]
    fn seeded_determinism() {
        let p = ImSynthParams {
            model: EdgeModel::PowerLaw,
            ..Default::default()
        };
        let a = gen_im_synth(&p, 5).unwrap();
        let b = gen_im_synth(&p, 5).unwrap();
        assert_eq!(a.objective.terms()[0].inner, b.objective.terms()[0].inner);
        let c = gen_im_synth(&p, 6).unwrap();
        assert_ne!(a.objective.terms()[0].inner, c.objective.terms()[0].inner);
    }

    #[test]
    fn power_law_is_skewed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let edges = bipartite_edges(&mut rng, 100, 100, 400, EdgeModel::PowerLaw, 2.5).unwrap();
        let mut deg = vec![0usize; 100];
        for (u, _) in edges {
            deg[u] += 1;
        }
        deg.sort_unstable();
        assert!(deg[99] >= 20, "max out-degree {}", deg[99]);
        assert!(deg[50] <= 4);
    }

    #[test]
    fn cache_network_is_stable() {
        let (inst, spec) = gen_cn_synth(&CnSynthParams::default(), 2).unwrap();
        assert!(inst.objective.exact_value(&vec![false; inst.objective.ground_size()]).unwrap().abs() < 1e-12);
        assert_eq!(spec.capacities[0], 0);
        assert_eq!(inst.objective.ground_size(), 5 * 3);
    }
}
