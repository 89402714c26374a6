//! Partition matroids and linear maximization over their polytope.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::scalar::Scalar;

/// Upper limit on the number of bases [`PartitionMatroid::enumerate_bases`] will produce.
pub const MAX_BASES: u128 = 1_000_000;

/// Disjoint blocks covering `0..ground_size`, each with a selection capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionMatroid {
    ground_size: usize,
    blocks: Vec<Vec<usize>>,
    capacities: Vec<usize>,
    block_of: Vec<usize>,
}

impl PartitionMatroid {
    /// Validates the partition. Capacities larger than their block are clipped.
    pub fn new(ground_size: usize, blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return input(format!(
                "{} blocks but {} capacities",
                blocks.len(),
                capacities.len()
            ));
        }
        let mut block_of = vec![usize::MAX; ground_size];
        let mut blocks = blocks;
        for (b, block) in blocks.iter_mut().enumerate() {
            block.sort_unstable();
            for &i in block.iter() {
                if i >= ground_size {
                    return input(format!("element {i} outside ground set of size {ground_size}"));
                }
                if block_of[i] != usize::MAX {
                    return input(format!("element {i} appears in more than one block"));
                }
                block_of[i] = b;
            }
        }
        if let Some(i) = block_of.iter().position(|&b| b == usize::MAX) {
            return input(format!("element {i} is not covered by any block"));
        }
        let mut capacities = capacities;
        for (b, k) in capacities.iter_mut().enumerate() {
            if *k == 0 {
                return input(format!("block {b} has zero capacity"));
            }
            *k = (*k).min(blocks[b].len());
        }
        Ok(PartitionMatroid {
            ground_size,
            blocks,
            capacities,
            block_of,
        })
    }

    /// Uniform matroid: at most `k` elements overall.
    pub fn uniform(ground_size: usize, k: usize) -> Result<Self> {
        Self::new(ground_size, vec![(0..ground_size).collect()], vec![k])
    }

    /// `m` contiguous blocks of (nearly) equal size, all with capacity `k`.
    pub fn equal_blocks(ground_size: usize, m: usize, k: usize) -> Result<Self> {
        if m == 0 || m > ground_size {
            return input(format!("cannot split {ground_size} elements into {m} blocks"));
        }
        let blocks = (0..m)
            .map(|b| (b * ground_size / m..(b + 1) * ground_size / m).collect())
            .collect();
        Self::new(ground_size, blocks, vec![k; m])
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    /// Size of every basis.
    pub fn rank(&self) -> usize {
        self.capacities.iter().sum()
    }

    /// Largest Euclidean norm over the polytope, attained at any basis.
    pub fn diameter(&self) -> f64 {
        (self.rank() as f64).sqrt()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.ground_size {
            return input(format!(
                "vector has length {len}, expected {}",
                self.ground_size
            ));
        }
        Ok(())
    }

    pub fn is_independent(&self, x: &[bool]) -> Result<bool> {
        self.check_len(x.len())?;
        Ok(self
            .blocks
            .iter()
            .zip(&self.capacities)
            .all(|(block, &k)| block.iter().filter(|&&i| x[i]).count() <= k))
    }

    pub fn is_basis(&self, x: &[bool]) -> Result<bool> {
        self.check_len(x.len())?;
        Ok(self
            .blocks
            .iter()
            .zip(&self.capacities)
            .all(|(block, &k)| block.iter().filter(|&&i| x[i]).count() == k))
    }

    /// Vertex of the polytope maximizing `<m, w>`: in each block the `k` largest
    /// strictly positive weights, ties broken by lowest index.
    pub fn lp_maximize<T: Scalar>(&self, w: &[T]) -> Result<Vec<bool>> {
        self.check_len(w.len())?;
        let mut m = vec![false; self.ground_size];
        let mut order: Vec<usize> = Vec::new();
        for (block, &k) in self.blocks.iter().zip(&self.capacities) {
            order.clear();
            order.extend(block.iter().copied().filter(|&i| w[i] > T::zero()));
            order.sort_by(|&a, &b| {
                w[b].partial_cmp(&w[a])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            for &i in order.iter().take(k) {
                m[i] = true;
            }
        }
        Ok(m)
    }

    /// Membership in `{y in [0,1]^N : sum_{i in B_l} y_i <= k_l}` up to additive `tol`.
    pub fn in_polytope<T: Scalar>(&self, y: &[T], tol: T) -> bool {
        if y.len() != self.ground_size {
            return false;
        }
        if y
            .iter()
            .any(|&v| !(v >= -tol && v <= T::one() + tol))
        {
            return false;
        }
        self.blocks.iter().zip(&self.capacities).all(|(block, &k)| {
            let s: T = block.iter().map(|&i| y[i]).sum();
            s <= T::lit(k as f64) + tol
        })
    }

    /// Adds unselected elements, lowest index first, until every block is full.
    pub fn pad_to_basis(&self, x: &[bool]) -> Result<Vec<bool>> {
        if !self.is_independent(x)? {
            return input("cannot pad a dependent set");
        }
        let mut out = x.to_vec();
        for (block, &k) in self.blocks.iter().zip(&self.capacities) {
            let mut count = block.iter().filter(|&&i| out[i]).count();
            for &i in block {
                if count >= k {
                    break;
                }
                if !out[i] {
                    out[i] = true;
                    count += 1;
                }
            }
        }
        Ok(out)
    }

    /// Number of bases, `prod_l C(|B_l|, k_l)`, saturating.
    pub fn basis_count(&self) -> u128 {
        self.blocks
            .iter()
            .zip(&self.capacities)
            .fold(1u128, |acc, (b, &k)| acc.saturating_mul(binomial(b.len(), k)))
    }

    /// Every basis, refusing when there are more than [`MAX_BASES`].
    pub fn enumerate_bases(&self) -> Result<impl Iterator<Item = Vec<bool>> + '_> {
        let count = self.basis_count();
        if count > MAX_BASES {
            return Err(Error::Guard(format!(
                "matroid has {count} bases, more than the limit {MAX_BASES}"
            )));
        }
        let n = self.ground_size;
        Ok(self
            .blocks
            .iter()
            .zip(&self.capacities)
            .map(|(b, &k)| b.iter().copied().combinations(k))
            .multi_cartesian_product()
            .map(move |choice| {
                let mut x = vec![false; n];
                for i in choice.into_iter().flatten() {
                    x[i] = true;
                }
                x
            }))
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Matroid description used in instance files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatroidSpec {
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Uniform {
        uniform_k: usize,
    },
}

impl MatroidSpec {
    pub fn build(&self, ground_size: usize) -> Result<PartitionMatroid> {
        match self {
            MatroidSpec::Partition { blocks, capacities } => {
                PartitionMatroid::new(ground_size, blocks.clone(), capacities.clone())
            }
            MatroidSpec::Uniform { uniform_k } => PartitionMatroid::uniform(ground_size, *uniform_k),
        }
    }

    pub fn of(m: &PartitionMatroid) -> Self {
        MatroidSpec::Partition {
            blocks: m.blocks.clone(),
            capacities: m.capacities.clone(),
        }
    }
}
