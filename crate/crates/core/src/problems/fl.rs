//! Facility location: `f(x) = (1/M) sum_j h(max_{i in supp(x)} w_{i,j})`.

use crate::analytic::AnalyticKernel;
use crate::error::{input, Result};
use crate::objective::{CompositeObjective, CompositeTerm};
use crate::polynomial::{Basis, Monomial, MultilinearPoly};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct FacilitySpec {
    /// `weights[i][j]`: value of facility `i` to customer `j`, in `[0, 1]`.
    weights: Vec<Vec<f64>>,
    customers: usize,
    /// Per customer, facilities with positive weight in descending weight order
    /// (ties by lowest index).
    order: Vec<Vec<usize>>,
}

impl FacilitySpec {
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        let customers = weights.first().map_or(0, Vec::len);
        for (i, row) in weights.iter().enumerate() {
            if row.len() != customers {
                return input(format!("facility {i} has {} weights, expected {customers}", row.len()));
            }
            if let Some(w) = row.iter().find(|w| !(0.0..=1.0).contains(*w)) {
                return input(format!("weight {w} of facility {i} is outside [0, 1]"));
            }
        }
        let order = (0..customers)
            .map(|j| {
                let mut o: Vec<usize> = (0..weights.len()).filter(|&i| weights[i][j] > 0.0).collect();
                o.sort_by(|&a, &b| weights[b][j].total_cmp(&weights[a][j]).then(a.cmp(&b)));
                o
            })
            .collect();
        Ok(FacilitySpec {
            weights,
            customers,
            order,
        })
    }

    /// Builds from `(facility, customer, weight)` triples; missing pairs weigh 0.
    pub fn from_triples(
        facilities: usize,
        customers: usize,
        triples: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut w = vec![vec![0.0; customers]; facilities];
        for (i, j, v) in triples {
            if i >= facilities || j >= customers {
                return input(format!("pair ({i}, {j}) is out of range"));
            }
            w[i][j] = v;
        }
        Self::new(w)
    }

    pub fn facilities(&self) -> usize {
        self.weights.len()
    }

    pub fn customers(&self) -> usize {
        self.customers
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i][j]
    }

    pub fn order(&self, j: usize) -> &[usize] {
        &self.order[j]
    }
}

/// `g_j(x) = sum_l (w_{i_l,j} - w_{i_{l+1},j}) (1 - prod_{k <= l} (1 - x_{i_k}))`, which
/// telescopes to the best selected weight, stored in the complement basis.
pub fn build_fl<T: Scalar>(spec: &FacilitySpec, kernel: AnalyticKernel<T>) -> Result<CompositeObjective<T>> {
    let n = spec.facilities();
    let weight = T::one() / T::lit(spec.customers.max(1) as f64);
    let terms = (0..spec.customers)
        .map(|j| {
            let order = &spec.order[j];
            let mut monos = Vec::with_capacity(order.len() + 1);
            if let Some(&top) = order.first() {
                monos.push(Monomial::constant(T::lit(spec.weights[top][j])));
            }
            for (l, &i) in order.iter().enumerate() {
                let next = order.get(l + 1).map_or(0.0, |&k| spec.weights[k][j]);
                let diff = spec.weights[i][j] - next;
                if diff > 0.0 {
                    monos.push(Monomial::new(-T::lit(diff), order[..=l].iter().copied()));
                }
            }
            let inner = MultilinearPoly::from_terms(n, Basis::Complement, monos)?;
            Ok(CompositeTerm {
                weight,
                kernel,
                inner,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CompositeObjective::new(n, terms, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_selected_weight() {
        let spec = FacilitySpec::new(vec![vec![0.8], vec![0.5]]).unwrap();
        let obj = build_fl::<f64>(&spec, AnalyticKernel::identity()).unwrap();
        let g = &obj.terms()[0].inner;
        assert!((g.evaluate_binary(&[false, true]).unwrap() - 0.5).abs() < 1e-15);
        assert!((g.evaluate_binary(&[true, true]).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(g.evaluate_binary(&[false, false]).unwrap(), 0.0);
    }

    #[test]
    fn validation() {
        assert!(FacilitySpec::new(vec![vec![1.2]]).is_err());
        assert!(FacilitySpec::new(vec![vec![0.2], vec![0.1, 0.3]]).is_err());
        let s = FacilitySpec::from_triples(3, 1, [(2, 0, 0.4), (0, 0, 0.4), (1, 0, 0.9)]).unwrap();
        assert_eq!(s.order(0), &[1, 0, 2]);
    }
}
