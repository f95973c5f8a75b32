//! Brute-force verifiers that share no code path with the evaluator:
//! full expansion of the pulled-back product, the string-equation recursion
//! for psi integrals, and an exhaustive check that pairwise compatibility
//! decides whether two strata meet.
//!
//! Nothing in the evaluator depends on this module.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{binomial, multinomial};
use crate::error::{Error, Result};
use crate::intersect::{flag_equivalence, DecoratedTree};
use crate::trees::{for_each_stable_tree, LabelSet, MarkedSet, StableTree};

pub mod fuzz;

/// Largest total edge weight accepted by [`expansion_eval`].
pub const EXPANSION_BUDGET: u64 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub value: BigInt,
    /// Decompositions of the edge weights that survive the dimension test.
    pub surviving: usize,
    /// Decompositions examined.
    pub candidates: u64,
}

/// Expands `prod_e (-1)^k (ψ_{v,e} + ψ_{v',e})^k` term by term, keeping the
/// monomials whose degree at every vertex equals its dimension, and
/// integrates each survivor with vertex multinomials.
pub fn expansion_eval(d: &DecoratedTree) -> Result<Expansion> {
    d.check_dimension()?;
    let total = d.edge_weight_sum();
    if total > EXPANSION_BUDGET {
        return Err(Error::BudgetExceeded {
            total,
            budget: EXPANSION_BUDGET,
        });
    }
    let tree = d.tree();
    let weights = d.edge_weights();
    let psi_load: Vec<u32> = tree
        .vertex_ids()
        .map(|v| d.psi_at(v).iter().map(|&(_, w)| w).sum())
        .collect();

    // `near[e]` is the exponent of ψ at `ends[0]`; the rest goes to `ends[1]`.
    let mut near = vec![0u32; weights.len()];
    let mut sum = BigInt::zero();
    let mut surviving = 0;
    let mut candidates = 0u64;
    loop {
        candidates += 1;
        let mut load = psi_load.clone();
        for (e, edge) in tree.edges().iter().enumerate() {
            load[edge.ends[0].0] += near[e];
            load[edge.ends[1].0] += weights[e] - near[e];
        }
        if tree.vertex_ids().all(|v| load[v.0] == d.vertex_dim(v)) {
            surviving += 1;
            let mut term = BigInt::one();
            for (e, &k) in weights.iter().enumerate() {
                term *= binomial(k, near[e]);
            }
            for v in tree.vertex_ids() {
                let mut parts = Vec::new();
                for &e in &tree.vertex(v).edges {
                    let edge = tree.edge(e);
                    parts.push(if edge.ends[0] == v {
                        near[e.0]
                    } else {
                        weights[e.0] - near[e.0]
                    });
                }
                parts.extend(d.psi_at(v).into_iter().map(|(_, w)| w));
                term *= multinomial(d.vertex_dim(v), &parts)?;
            }
            sum += term;
        }
        // Odometer over 0..=k(e) for every edge.
        let mut i = 0;
        while i < near.len() && near[i] == weights[i] {
            near[i] = 0;
            i += 1;
        }
        if i == near.len() {
            break;
        }
        near[i] += 1;
    }
    if total % 2 == 1 {
        sum = -sum;
    }
    Ok(Expansion {
        value: sum,
        surviving,
        candidates,
    })
}

/// `∫ ψ_1^{k_1} ... ψ_n^{k_n}` by the string equation: forget a point whose
/// exponent is zero and lower each positive exponent in turn, down to the
/// single point with three markings.
pub fn string_eq_psi_integral(n: u32, exponents: &[u32]) -> Result<BigInt> {
    let ground = MarkedSet::new(n)?;
    if exponents.len() > n as usize {
        return Err(Error::LabelOutOfRange {
            label: exponents.len() as u32,
            n,
        });
    }
    let degree: u64 = exponents.iter().map(|&k| u64::from(k)).sum();
    if degree != u64::from(ground.dim()) {
        return Err(Error::DegreeMismatch {
            degree,
            expected: ground.dim(),
        });
    }
    let mut k = exponents.to_vec();
    k.resize(n as usize, 0);
    Ok(string_recursion(&k))
}

fn string_recursion(k: &[u32]) -> BigInt {
    if k.len() == 3 {
        return BigInt::one();
    }
    let forget = k.iter().position(|&x| x == 0).expect("sum k = n - 3 < n");
    let mut rest: Vec<u32> = k.to_vec();
    rest.remove(forget);
    let mut total = BigInt::zero();
    for i in 0..rest.len() {
        if rest[i] > 0 {
            rest[i] -= 1;
            total += string_recursion(&rest);
            rest[i] += 1;
        }
    }
    total
}

/// Result of comparing edge-pair compatibility with the existence of a
/// common refinement over pairs of boundary strata.
#[derive(Clone, Debug)]
pub struct FlagReport {
    pub n: u32,
    pub pairs_checked: u64,
    pub discrepancies: Vec<(StableTree, StableTree)>,
}

impl FlagReport {
    pub fn is_flag(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Every stable tree on `1..=n` as a bitmask over the canonical splits.
///
/// Built from the structural enumeration only, so a common refinement found
/// here is a genuine witness that two strata meet.
pub struct RefinementIndex {
    split_bit: HashMap<LabelSet, u32>,
    trees: Vec<u128>,
}

impl RefinementIndex {
    /// Supports `n <= 8` (at most 119 canonical splits).
    pub fn new(n: u32) -> Result<Self> {
        if n > 8 {
            return Err(Error::TooLarge { n, max: 8 });
        }
        let mut split_bit = HashMap::new();
        for_each_stable_tree(n, Some(1), |t| {
            let next = split_bit.len() as u32;
            split_bit.insert(t.edges()[0].split.block(), next);
        })?;
        let mut index = RefinementIndex {
            split_bit,
            trees: Vec::new(),
        };
        let mut masks = Vec::new();
        for_each_stable_tree(n, None, |t| masks.push(index.mask(&t)))?;
        index.trees = masks;
        Ok(index)
    }

    pub fn mask(&self, t: &StableTree) -> u128 {
        t.splits()
            .fold(0u128, |m, s| m | 1u128 << self.split_bit[&s.block()])
    }

    /// Whether some stable tree contains every split of `a` and of `b`.
    pub fn common_refinement(&self, a: &StableTree, b: &StableTree) -> bool {
        let want = self.mask(a) | self.mask(b);
        self.trees.iter().any(|&m| m & want == want)
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }
}

/// Checks, for pairs of boundary strata on `1..=n`, that pairwise edge
/// compatibility agrees with the existence of a common refinement. All pairs
/// are checked unless `sample_limit` is given, in which case that many pairs
/// are drawn with a generator seeded by `seed`.
pub fn flag_certify(n: u32, sample_limit: Option<u64>, seed: u64) -> Result<FlagReport> {
    if n < 4 {
        return Err(Error::TooSmall { n, min: 4 });
    }
    if n > 7 {
        return Err(Error::TooLarge { n, max: 7 });
    }
    let index = RefinementIndex::new(n)?;
    let mut strata = Vec::new();
    for_each_stable_tree(n, None, |t| {
        if t.codim() > 0 {
            strata.push(t)
        }
    })?;

    let mut report = FlagReport {
        n,
        pairs_checked: 0,
        discrepancies: Vec::new(),
    };
    let mut check = |a: &StableTree, b: &StableTree| -> Result<()> {
        report.pairs_checked += 1;
        if flag_equivalence(a, b)? != index.common_refinement(a, b) {
            report.discrepancies.push((a.clone(), b.clone()));
        }
        Ok(())
    };
    match sample_limit {
        None => {
            for i in 0..strata.len() {
                for j in i..strata.len() {
                    check(&strata[i], &strata[j])?;
                }
            }
        }
        Some(limit) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..limit {
                let i = rng.gen_range(0..strata.len());
                let j = rng.gen_range(0..strata.len());
                check(&strata[i], &strata[j])?;
            }
        }
    }
    Ok(report)
}
