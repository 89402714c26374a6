//! Influence maximization under the independent cascade model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::AnalyticKernel;
use crate::error::{input, Result};
use crate::objective::{CompositeObjective, CompositeTerm};
use crate::polynomial::{Basis, Monomial, MultilinearPoly};
use crate::scalar::Scalar;

/// Directed graph on nodes `0..nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl DiGraph {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= nodes || v >= nodes) {
            return input(format!("edge ({u}, {v}) references a node outside 0..{nodes}"));
        }
        Ok(DiGraph { nodes, edges })
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes];
        for &(u, _) in &self.edges {
            d[u] += 1;
        }
        d
    }
}

/// Reachability families of `M` simulated cascades.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeSet {
    pub nodes: usize,
    /// `families[j][v]`: sorted nodes that reach `v` over cascade `j`'s live edges.
    pub families: Vec<Vec<Vec<usize>>>,
}

impl CascadeSet {
    pub fn cascades(&self) -> usize {
        self.families.len()
    }
}

/// Samples each edge live with probability `p` independently per cascade; cascade `j`
/// draws from stream `j` of `seed`.
pub fn simulate_ic(graph: &DiGraph, p: f64, cascades: usize, seed: u64) -> Result<CascadeSet> {
    if !(0.0..=1.0).contains(&p) {
        return input(format!("edge probability {p} must lie in [0, 1]"));
    }
    let n = graph.nodes;
    let families = (0..cascades)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let mut reverse = vec![Vec::new(); n];
            for &(u, v) in &graph.edges {
                if rng.random::<f64>() < p {
                    reverse[v].push(u);
                }
            }
            reverse_reach(&reverse)
        })
        .collect();
    Ok(CascadeSet { nodes: n, families })
}

fn reverse_reach(reverse: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = reverse.len();
    let mut mark = vec![usize::MAX; n];
    let mut stack = Vec::new();
    (0..n)
        .map(|v| {
            let mut reach = vec![v];
            mark[v] = v;
            stack.push(v);
            while let Some(w) = stack.pop() {
                for &u in &reverse[w] {
                    if mark[u] != v {
                        mark[u] = v;
                        reach.push(u);
                        stack.push(u);
                    }
                }
            }
            reach.sort_unstable();
            reach
        })
        .collect()
}

/// `f(x) = (1/M) sum_j h(g_j(x))` with `g_j(x)` the fraction of nodes `v` having a
/// selected seed in `P_v^j`.
///
/// `candidates[i]` is the node represented by ground element `i`; nodes that are not
/// candidates can be influenced but never seeded.
pub fn build_im<T: Scalar>(
    cascades: &CascadeSet,
    candidates: &[usize],
    kernel: AnalyticKernel<T>,
) -> Result<CompositeObjective<T>> {
    let n_nodes = cascades.nodes;
    if n_nodes == 0 {
        return input("graph has no nodes");
    }
    let mut index = vec![usize::MAX; n_nodes];
    for (i, &v) in candidates.iter().enumerate() {
        if v >= n_nodes || index[v] != usize::MAX {
            return input(format!("candidate node {v} is out of range or repeated"));
        }
        index[v] = i;
    }
    let ground = candidates.len();
    let share = T::one() / T::lit(n_nodes as f64);
    let weight = T::one() / T::lit(cascades.cascades().max(1) as f64);
    let terms = cascades
        .families
        .iter()
        .map(|family| {
            // 1 - prod (1 - x) per node, in the complement basis
            let mut monos = Vec::with_capacity(family.len() + 1);
            let mut covered = 0usize;
            for reach in family {
                let vars: Vec<usize> = reach
                    .iter()
                    .map(|&u| index[u])
                    .filter(|&i| i != usize::MAX)
                    .collect();
                if vars.is_empty() {
                    continue;
                }
                covered += 1;
                monos.push(Monomial::new(-share, vars));
            }
            monos.push(Monomial::constant(share * T::lit(covered as f64)));
            let inner = MultilinearPoly::from_terms(ground, Basis::Complement, monos)?;
            Ok(CompositeTerm {
                weight,
                kernel,
                inner,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CompositeObjective::new(ground, terms, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_node_reachability() {
        let g = DiGraph::new(2, vec![(0, 1)]).unwrap();
        let c = simulate_ic(&g, 1.0, 1, 7).unwrap();
        assert_eq!(c.families[0], vec![vec![0], vec![0, 1]]);
        let none = simulate_ic(&g, 0.0, 3, 7).unwrap();
        for fam in &none.families {
            assert_eq!(fam, &vec![vec![0], vec![1]]);
        }
        assert_eq!(simulate_ic(&g, 0.5, 4, 1).unwrap(), simulate_ic(&g, 0.5, 4, 1).unwrap());
        assert!(simulate_ic(&g, 1.5, 1, 0).is_err());
    }

    #[test]
    fn coverage_values() {
        let g = DiGraph::new(2, vec![(0, 1)]).unwrap();
        let c = simulate_ic(&g, 1.0, 3, 0).unwrap();
        let obj = build_im::<f64>(&c, &[0, 1], AnalyticKernel::log1p()).unwrap();
        assert_relative_eq!(obj.exact_value(&[true, false]).unwrap(), 2f64.ln());
        assert_eq!(obj.exact_value(&[false, false]).unwrap(), 0.0);
        assert_relative_eq!(obj.exact_value(&[true, true]).unwrap(), 2f64.ln());
        // only node 1 may be seeded: it covers itself alone
        let obj = build_im::<f64>(&c, &[1], AnalyticKernel::identity()).unwrap();
        assert_relative_eq!(obj.exact_value(&[true]).unwrap(), 0.5);
    }

    #[test]
    fn reach_through_chain() {
        let g = DiGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let c = simulate_ic(&g, 1.0, 1, 0).unwrap();
        assert_eq!(c.families[0][2], vec![0, 1, 2]);
    }
}
