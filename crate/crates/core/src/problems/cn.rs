//! Caching gain in a network of M/M/1 queues.
//!
//! A request for item `i` travels along its path from the requester towards a
//! designated server at the last node; the response retraces the path backwards
//! from the first node caching `i`. The response crossing from `p_{k+1}` to `p_k`
//! exists iff none of `p_1..p_k` caches `i`.

use std::collections::HashMap;

use crate::analytic::AnalyticKernel;
use crate::error::{input, Error, Result};
use crate::matroid::PartitionMatroid;
use crate::objective::{CompositeObjective, CompositeTerm};
use crate::polynomial::{Basis, Monomial, MultilinearPoly};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Request {
    pub item: usize,
    /// Nodes from the requester to the server.
    pub path: Vec<usize>,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CacheNetworkSpec {
    pub nodes: usize,
    /// Directed edges with their service rates.
    pub edges: Vec<(usize, usize, f64)>,
    pub catalog: usize,
    pub requests: Vec<Request>,
    /// Cache slots per node.
    pub capacities: Vec<usize>,
}

/// Output of [`build_cn`].
#[derive(Clone, Debug)]
pub struct CacheNetwork<T> {
    pub objective: CompositeObjective<T>,
    pub matroid: PartitionMatroid,
    /// `(node, item)` for every ground element.
    pub placements: Vec<(usize, usize)>,
    /// Worst-case edge load, reached with empty caches.
    pub s_bar: f64,
    /// Edges with non-zero load, in the order of the objective's terms.
    pub loaded_edges: Vec<(usize, usize)>,
}

impl CacheNetworkSpec {
    fn validate(&self) -> Result<HashMap<(usize, usize), f64>> {
        if self.capacities.len() != self.nodes {
            return input("one cache capacity per node is required");
        }
        let mut rates = HashMap::new();
        for &(u, v, mu) in &self.edges {
            if u >= self.nodes || v >= self.nodes {
                return input(format!("edge ({u}, {v}) is out of range"));
            }
            if !(mu > 0.0) {
                return input(format!("edge ({u}, {v}) has non-positive service rate"));
            }
            rates.insert((u, v), mu);
        }
        for (r, req) in self.requests.iter().enumerate() {
            if req.item >= self.catalog {
                return input(format!("request {r} asks for unknown item {}", req.item));
            }
            if !(req.rate >= 0.0) {
                return input(format!("request {r} has a negative rate"));
            }
            if req.path.is_empty() {
                return input(format!("request {r} has an empty path"));
            }
            let mut seen = vec![false; self.nodes];
            for &v in &req.path {
                if v >= self.nodes || seen[v] {
                    return input(format!("request {r} path is not simple"));
                }
                seen[v] = true;
            }
            for w in req.path.windows(2) {
                if !rates.contains_key(&(w[1], w[0])) {
                    return input(format!(
                        "request {r}: no response edge ({}, {})",
                        w[1], w[0]
                    ));
                }
            }
        }
        Ok(rates)
    }
}

/// Objective `sum_e h(g_e(0)) - sum_e h(g_e(x))` with `h(s) = s / (1 - s)` and
/// `g_e` the load of edge `e`; ground elements are `(node, item)` pairs at nodes with
/// cache space, constrained by one block per node.
pub fn build_cn<T: Scalar>(spec: &CacheNetworkSpec) -> Result<CacheNetwork<T>> {
    let rates = spec.validate()?;
    let mut placements = Vec::new();
    let mut index = HashMap::new();
    let mut blocks = Vec::new();
    let mut caps = Vec::new();
    for v in 0..spec.nodes {
        if spec.capacities[v] == 0 || spec.catalog == 0 {
            continue;
        }
        let mut block = Vec::with_capacity(spec.catalog);
        for i in 0..spec.catalog {
            index.insert((v, i), placements.len());
            block.push(placements.len());
            placements.push((v, i));
        }
        blocks.push(block);
        caps.push(spec.capacities[v]);
    }
    let n = placements.len();

    // per response edge: (rate / mu, variables of the cache nodes upstream)
    let mut loads: Vec<((usize, usize), Vec<Monomial<T>>, f64)> = Vec::new();
    let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
    for req in &spec.requests {
        let mut upstream = Vec::new();
        for k in 0..req.path.len().saturating_sub(1) {
            let (v, u) = (req.path[k], req.path[k + 1]);
            if let Some(&g) = index.get(&(v, req.item)) {
                upstream.push(g);
            }
            let edge = (u, v);
            let a = req.rate / rates[&edge];
            let s = *slot.entry(edge).or_insert_with(|| {
                loads.push((edge, Vec::new(), 0.0));
                loads.len() - 1
            });
            loads[s].1.push(Monomial::new(T::lit(a), upstream.iter().copied()));
            loads[s].2 += a;
        }
    }
    loads.retain(|(_, _, at_zero)| *at_zero > 0.0);
    let s_bar = loads.iter().map(|(_, _, z)| *z).fold(0.0, f64::max);
    if s_bar >= 1.0 {
        return Err(Error::Stability(s_bar));
    }
    let kernel = AnalyticKernel::queue_delay(T::lit(s_bar))?;
    let mut offset = T::zero();
    let mut terms = Vec::with_capacity(loads.len());
    let mut loaded_edges = Vec::with_capacity(loads.len());
    for (edge, monos, _) in loads {
        let inner = MultilinearPoly::from_terms(n, Basis::Complement, monos)?;
        let zero_load = inner.evaluate_binary(&vec![false; n])?;
        offset += kernel.eval(zero_load)?;
        terms.push(CompositeTerm {
            weight: -T::one(),
            kernel,
            inner,
        });
        loaded_edges.push(edge);
    }
    let matroid = if n == 0 {
        PartitionMatroid::new(0, vec![], vec![])?
    } else {
        PartitionMatroid::new(n, blocks, caps)?
    };
    Ok(CacheNetwork {
        objective: CompositeObjective::new(n, terms, offset)?,
        matroid,
        placements,
        s_bar,
        loaded_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_nodes(mu: f64) -> CacheNetworkSpec {
        CacheNetworkSpec {
            nodes: 2,
            edges: vec![(1, 0, mu)],
            catalog: 1,
            requests: vec![Request {
                item: 0,
                path: vec![0, 1],
                rate: 1.0,
            }],
            capacities: vec![1, 0],
        }
    }

    #[test]
    fn single_request() {
        let net = build_cn::<f64>(&two_nodes(2.0)).unwrap();
        assert_relative_eq!(net.s_bar, 0.5);
        assert_relative_eq!(net.objective.offset(), 1.0);
        assert_eq!(net.placements, vec![(0, 0)]);
        assert_relative_eq!(net.objective.exact_value(&[false]).unwrap(), 0.0);
        assert_relative_eq!(net.objective.exact_value(&[true]).unwrap(), 1.0);
        let fast = build_cn::<f64>(&two_nodes(1e12)).unwrap();
        assert!(fast.objective.exact_value(&[true]).unwrap().abs() < 1e-9);
    }

    #[test]
    fn unstable_and_invalid() {
        assert!(matches!(
            build_cn::<f64>(&two_nodes(1.0)),
            Err(Error::Stability(_))
        ));
        let mut bad = two_nodes(2.0);
        bad.edges.clear();
        assert!(build_cn::<f64>(&bad).is_err());
    }
}
