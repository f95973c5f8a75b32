//! Balanced weights and the closed evaluation of dimension-zero products.
//!
//! After pulling the excess divisor factors back to the stratum, each edge
//! contributes `(-1)^k (ψ_{v,e} + ψ_{v',e})^k`. At most one monomial of the
//! expansion survives on the product of vertex moduli spaces: the one given
//! by the balanced weighting, found greedily by peeling leaf vertices.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{factorial, multinomial};
use crate::error::{Error, Result};
use crate::intersect::DecoratedTree;
use crate::trees::{EdgeId, Label, MarkedSet, VertexId};

/// Split of every edge weight into half-edge weights `k(v,e) + k(v',e)`
/// such that each vertex receives exactly its dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedWeighting {
    decorated: DecoratedTree,
    /// `halves[e][i]` sits at `edge(e).ends[i]`.
    halves: Vec<[u32; 2]>,
}

impl BalancedWeighting {
    pub fn decorated(&self) -> &DecoratedTree {
        &self.decorated
    }

    pub fn halves(&self, e: EdgeId) -> [u32; 2] {
        self.halves[e.0]
    }

    /// `k(v, e)`; `v` must be an end of `e`.
    pub fn half(&self, v: VertexId, e: EdgeId) -> u32 {
        let ends = self.decorated.tree().edge(e).ends;
        if ends[0] == v {
            self.halves[e.0][0]
        } else {
            assert_eq!(ends[1], v, "{v} is not an end of {e}");
            self.halves[e.0][1]
        }
    }

    /// The parts of the vertex multinomial at `v`: half-weights of incident
    /// edges followed by psi weights of attached leaves.
    pub fn parts_at(&self, v: VertexId) -> Vec<u32> {
        let tree = self.decorated.tree();
        tree.vertex(v)
            .edges
            .iter()
            .map(|&e| self.half(v, e))
            .chain(self.decorated.psi_at(v).into_iter().map(|(_, w)| w))
            .collect()
    }
}

/// The balanced weighting, or `None` when none exists.
pub fn balance(d: &DecoratedTree) -> Result<Option<BalancedWeighting>> {
    balance_with(d, |_| 0)
}

/// [`balance`] with the next leaf vertex chosen by `pick`, which receives the
/// current candidates and returns an index into them. The result does not
/// depend on the choices made.
pub fn balance_with<F>(d: &DecoratedTree, pick: F) -> Result<Option<BalancedWeighting>>
where
    F: FnMut(&[VertexId]) -> usize,
{
    peel(d, pick, &mut Vec::new())
}

/// One greedy step: leaf vertex `vertex` takes its whole remaining dimension
/// `here` from `edge`, the rest `there` goes to the other end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeelStep {
    pub vertex: VertexId,
    pub edge: EdgeId,
    pub here: i64,
    pub there: i64,
}

/// The greedy steps taken by [`balance`] together with its result. When no
/// balancing exists the last step is the one that failed, if any.
pub fn balance_trace(d: &DecoratedTree) -> Result<(Vec<PeelStep>, Option<BalancedWeighting>)> {
    let mut steps = Vec::new();
    let outcome = peel(d, |_| 0, &mut steps)?;
    Ok((steps, outcome))
}

fn peel<F>(
    d: &DecoratedTree,
    mut pick: F,
    steps: &mut Vec<PeelStep>,
) -> Result<Option<BalancedWeighting>>
where
    F: FnMut(&[VertexId]) -> usize,
{
    d.check_dimension()?;
    let tree = d.tree();
    let mut residual: Vec<i64> = tree
        .vertex_ids()
        .map(|v| {
            let psi: i64 = d.psi_at(v).iter().map(|&(_, w)| i64::from(w)).sum();
            i64::from(d.vertex_dim(v)) - psi
        })
        .collect();
    if residual.iter().any(|&r| r < 0) {
        return Ok(None);
    }
    let mut open: Vec<usize> = tree.vertices().iter().map(|v| v.edges.len()).collect();
    let mut resolved = vec![false; tree.edges().len()];
    let mut halves = vec![[0u32; 2]; tree.edges().len()];
    let mut ready: Vec<VertexId> = tree.vertex_ids().filter(|v| open[v.0] == 1).collect();

    while !ready.is_empty() {
        let idx = pick(&ready) % ready.len();
        let v = ready.swap_remove(idx);
        if open[v.0] != 1 {
            continue;
        }
        let e = *tree
            .vertex(v)
            .edges
            .iter()
            .find(|e| !resolved[e.0])
            .expect("one open edge");
        let w = tree.other_end(e, v);
        let k = i64::from(d.edge_weight(e));
        let here = residual[v.0];
        let there = k - here;
        steps.push(PeelStep {
            vertex: v,
            edge: e,
            here,
            there,
        });
        if there < 0 {
            return Ok(None);
        }
        residual[v.0] = 0;
        residual[w.0] -= there;
        if residual[w.0] < 0 {
            return Ok(None);
        }
        let slot = usize::from(tree.edge(e).ends[0] != v);
        halves[e.0][slot] = here as u32;
        halves[e.0][1 - slot] = there as u32;
        resolved[e.0] = true;
        open[v.0] = 0;
        open[w.0] -= 1;
        if open[w.0] == 1 {
            ready.push(w);
        }
    }
    if residual.iter().any(|&r| r != 0) {
        return Ok(None);
    }
    Ok(Some(BalancedWeighting {
        decorated: d.clone(),
        halves,
    }))
}

/// Why an evaluation produced its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    Ok,
    /// The strata do not meet.
    Empty,
    /// The strata meet but no balanced weighting exists.
    NoBalance,
}

impl Reason {
    pub fn name(self) -> &'static str {
        match self {
            Reason::Ok => "ok",
            Reason::Empty => "empty",
            Reason::NoBalance => "no_balance",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalResult {
    pub value: BigInt,
    pub sign: i8,
    pub reason: Reason,
    pub edge_factors: Vec<(EdgeId, BigInt)>,
    pub vertex_factors: Vec<(VertexId, BigInt)>,
    pub weighting: Option<BalancedWeighting>,
}

impl EvalResult {
    /// The value of a product whose strata do not intersect.
    pub fn empty() -> Self {
        EvalResult {
            value: BigInt::zero(),
            sign: 1,
            reason: Reason::Empty,
            edge_factors: Vec::new(),
            vertex_factors: Vec::new(),
            weighting: None,
        }
    }
}

/// Degree of `prod_e [D_e]^{1+k(e)} * prod psi` on the decorated stratum.
pub fn evaluate(d: &DecoratedTree) -> Result<EvalResult> {
    let sign = d.sign();
    let Some(weighting) = balance(d)? else {
        return Ok(EvalResult {
            value: BigInt::zero(),
            sign,
            reason: Reason::NoBalance,
            edge_factors: Vec::new(),
            vertex_factors: Vec::new(),
            weighting: None,
        });
    };
    let tree = d.tree();
    let mut value = BigInt::from(sign);
    let mut edge_factors = Vec::with_capacity(tree.edges().len());
    for e in tree.edge_ids() {
        let f = multinomial(d.edge_weight(e), &weighting.halves(e))?;
        value *= &f;
        edge_factors.push((e, f));
    }
    let mut vertex_factors = Vec::with_capacity(tree.vertices().len());
    for v in tree.vertex_ids() {
        let f = multinomial(d.vertex_dim(v), &weighting.parts_at(v))?;
        value *= &f;
        vertex_factors.push((v, f));
    }
    Ok(EvalResult {
        value,
        sign,
        reason: Reason::Ok,
        edge_factors,
        vertex_factors,
        weighting: Some(weighting),
    })
}

/// The same degree as a single factorial ratio,
/// `± prod_v n(v)! prod_e k(e)! / prod_{(v,e)} k(v,e)!^2`.
///
/// Psi weights enter as pendant edges that do not split: `ψ!` upstairs and
/// `ψ!^2` downstairs. Numerator and denominator are formed exactly and the
/// quotient must be integral.
pub fn evaluate_ratio(d: &DecoratedTree) -> Result<BigInt> {
    let weighting = balance(d)?.ok_or(Error::NoBalanceGiven)?;
    let tree = d.tree();
    let mut numerator = BigInt::one();
    let mut denominator = BigInt::one();
    for v in tree.vertex_ids() {
        numerator *= factorial(d.vertex_dim(v));
    }
    for e in tree.edge_ids() {
        numerator *= factorial(d.edge_weight(e));
        for h in weighting.halves(e) {
            let f = factorial(h);
            denominator *= &f * &f;
        }
    }
    for &w in d.psi_weights().values() {
        let f = factorial(w);
        numerator *= &f;
        denominator *= &f * &f;
    }
    if !(&numerator % &denominator).is_zero() {
        return Err(Error::RatioNotIntegral {
            numerator: numerator.to_string(),
            denominator: denominator.to_string(),
        });
    }
    Ok(BigInt::from(d.sign()) * numerator / denominator)
}

/// `∫ ψ_1^{k_1} ... ψ_n^{k_n}` over the moduli space with `n` marked points;
/// `exponents[i]` belongs to label `i + 1`, missing entries are zero.
pub fn integrate_psi_monomial(n: u32, exponents: &[u32]) -> Result<BigInt> {
    let ground = MarkedSet::new(n)?;
    if exponents.len() > n as usize {
        return Err(Error::LabelOutOfRange {
            label: exponents.len() as Label,
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
    multinomial(ground.dim(), exponents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::{product_to_decorated, BoundaryProduct};
    use crate::trees::{tree_from_splits, Split, StableTree};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn g(n: u32) -> MarkedSet {
        MarkedSet::new(n).unwrap()
    }

    fn product(n: u32, divisors: &[(&[Label], u32)], psi: &[(Label, u32)]) -> BoundaryProduct {
        let ground = g(n);
        let mut p = BoundaryProduct::new(ground);
        for &(labels, e) in divisors {
            p = p
                .divisor(Split::from_labels(ground, labels).unwrap(), e)
                .unwrap();
        }
        for &(l, e) in psi {
            p = p.psi(l, e).unwrap();
        }
        p
    }

    fn decorate(n: u32, divisors: &[(&[Label], u32)], psi: &[(Label, u32)]) -> DecoratedTree {
        product_to_decorated(&product(n, divisors, psi))
            .unwrap()
            .unwrap()
    }

    const SIX_VERTEX: [(&[Label], u32); 5] = [
        (&[1, 2], 2),
        (&[3, 4, 5], 3),
        (&[1, 2, 3, 4, 5, 6, 7, 8], 4),
        (&[11, 12], 1),
        (&[13, 14, 15], 2),
    ];

    fn half_at(w: &BalancedWeighting, edge: &[Label], vertex_leaf: Label) -> u32 {
        let t = w.decorated().tree();
        let e = t
            .edge_of_split(&Split::from_labels(t.ground(), edge).unwrap())
            .unwrap();
        w.half(t.leaf_vertex(vertex_leaf), e)
    }

    #[test]
    fn balance_six_vertex() {
        let d = decorate(15, &SIX_VERTEX, &[]);
        let w = balance(&d).unwrap().unwrap();
        // x carries leaf 9, w leaf 6, v leaf 3, u leaf 1, z leaf 13, y leaf 11.
        let big: &[Label] = &[1, 2, 3, 4, 5, 6, 7, 8];
        assert_eq!((half_at(&w, big, 9), half_at(&w, big, 6)), (2, 1));
        assert_eq!(
            (half_at(&w, &[3, 4, 5], 6), half_at(&w, &[3, 4, 5], 3)),
            (1, 1)
        );
        assert_eq!((half_at(&w, &[1, 2], 1), half_at(&w, &[1, 2], 6)), (0, 1));
        assert_eq!(
            (
                half_at(&w, &[13, 14, 15], 9),
                half_at(&w, &[13, 14, 15], 13)
            ),
            (0, 1)
        );
        assert_eq!(
            (half_at(&w, &[11, 12], 11), half_at(&w, &[11, 12], 9)),
            (0, 0)
        );
    }

    #[test]
    fn trace_shows_where_peeling_fails() {
        let d = decorate(7, &[(&[1, 2], 3), (&[5, 6, 7], 1)], &[]);
        let (steps, w) = balance_trace(&d).unwrap();
        assert!(w.is_none());
        let last = steps.last().unwrap();
        let far = d.tree().other_end(last.edge, last.vertex);
        assert!(i64::from(d.vertex_dim(far)) < last.there);

        let (steps, w) = balance_trace(&decorate(15, &SIX_VERTEX, &[])).unwrap();
        assert_eq!(steps.len(), 5);
        assert!(steps.iter().all(|s| s.here >= 0 && s.there >= 0));
        assert!(w.is_some());
    }

    #[test]
    fn balance_single_vertex() {
        let d = decorate(6, &[], &[(1, 1), (2, 2)]);
        let w = balance(&d).unwrap().unwrap();
        assert_eq!(w.parts_at(VertexId(0)), vec![1, 2]);
    }

    #[test]
    fn caterpillar_has_no_balance() {
        let d = decorate(7, &[(&[1, 2], 3), (&[5, 6, 7], 1)], &[]);
        let t = d.tree();
        let dims: Vec<u32> = [1, 3, 5]
            .iter()
            .map(|&l| d.vertex_dim(t.leaf_vertex(l)))
            .collect();
        assert_eq!(dims, vec![0, 1, 1]);
        assert_eq!(balance(&d).unwrap(), None);
        let r = evaluate(&d).unwrap();
        assert_eq!(r.value, BigInt::zero());
        assert_eq!(r.reason, Reason::NoBalance);
        assert!(r.weighting.is_none());
        assert_eq!(evaluate_ratio(&d), Err(Error::NoBalanceGiven));
    }

    #[test]
    fn unbalanced_dimension_is_an_error() {
        let t = tree_from_splits(g(6), [Split::from_labels(g(6), &[1, 2]).unwrap()]).unwrap();
        let d = DecoratedTree::new(t, vec![0], BTreeMap::new()).unwrap();
        assert_eq!(
            balance(&d),
            Err(Error::DimensionUnbalanced {
                weights: 0,
                dims: 2
            })
        );
        assert!(evaluate(&d).is_err());
    }

    #[test]
    fn six_vertex_value_and_factors() {
        let d = decorate(15, &SIX_VERTEX, &[]);
        let r = evaluate(&d).unwrap();
        assert_eq!(r.value, BigInt::from(-36));
        assert_eq!(r.sign, -1);
        assert_eq!(r.reason, Reason::Ok);
        let mut nontrivial: Vec<BigInt> = r
            .edge_factors
            .iter()
            .map(|(_, f)| f)
            .chain(r.vertex_factors.iter().map(|(_, f)| f))
            .filter(|f| !f.is_one())
            .cloned()
            .collect();
        nontrivial.sort();
        assert_eq!(nontrivial, vec![2.into(), 3.into(), 6.into()]);
        let t = d.tree();
        let w_vertex = t.leaf_vertex(6);
        assert_eq!(r.vertex_factors[w_vertex.0].1, BigInt::from(6));
        assert_eq!(evaluate_ratio(&d).unwrap(), BigInt::from(-36));
    }

    #[test]
    fn psi_fixture_value() {
        let divisors: [(&[Label], u32); 5] = [
            (&[1, 2], 2),
            (&[3, 4, 5], 1),
            (&[1, 2, 3, 4, 5, 6, 7, 8], 3),
            (&[11, 12], 1),
            (&[13, 14, 15], 2),
        ];
        let d = decorate(15, &divisors, &[(4, 1), (7, 2)]);
        let r = evaluate(&d).unwrap();
        assert_eq!(r.value, BigInt::from(3));
        assert_eq!(r.sign, 1);
        assert_eq!(evaluate_ratio(&d).unwrap(), BigInt::from(3));
        let w = r.weighting.unwrap();
        let big: &[Label] = &[1, 2, 3, 4, 5, 6, 7, 8];
        assert_eq!((half_at(&w, big, 9), half_at(&w, big, 6)), (2, 0));
        assert_eq!((half_at(&w, &[1, 2], 1), half_at(&w, &[1, 2], 6)), (0, 1));
        assert_eq!(
            (half_at(&w, &[3, 4, 5], 3), half_at(&w, &[3, 4, 5], 6)),
            (0, 0)
        );
        assert_eq!(
            (
                half_at(&w, &[13, 14, 15], 9),
                half_at(&w, &[13, 14, 15], 13)
            ),
            (0, 1)
        );

        // With the exponents on 4 and 7 swapped, psi_4^2 exceeds the
        // one-dimensional factor at its vertex.
        let swapped = decorate(15, &divisors, &[(4, 2), (7, 1)]);
        let r = evaluate(&swapped).unwrap();
        assert_eq!(r.value, BigInt::zero());
        assert_eq!(r.reason, Reason::NoBalance);
    }

    #[test]
    fn small_ground_truths() {
        for side in [[1, 2], [1, 3], [1, 4]] {
            let r = evaluate(&decorate(4, &[(&side, 1)], &[])).unwrap();
            assert_eq!(r.value, BigInt::one());
            assert_eq!(
                evaluate_ratio(&decorate(4, &[(&side, 1)], &[])).unwrap(),
                BigInt::one()
            );
        }
        assert_eq!(
            evaluate(&decorate(5, &[(&[1, 2], 2)], &[])).unwrap().value,
            BigInt::from(-1)
        );
        assert_eq!(
            evaluate(&decorate(6, &[(&[1, 2, 3], 3)], &[]))
                .unwrap()
                .value,
            BigInt::from(2)
        );
        assert_eq!(
            evaluate(&decorate(6, &[(&[1, 2], 3)], &[])).unwrap().value,
            BigInt::from(1)
        );
    }

    #[test]
    fn point_space_evaluates_to_one() {
        let d = decorate(3, &[], &[]);
        assert_eq!(evaluate(&d).unwrap().value, BigInt::one());
        assert_eq!(evaluate_ratio(&d).unwrap(), BigInt::one());
    }

    #[test]
    fn ratio_single_vertex_psi() {
        let d = decorate(6, &[], &[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(evaluate_ratio(&d).unwrap(), BigInt::from(6));
        let d = decorate(6, &[], &[(1, 2), (2, 1)]);
        assert_eq!(evaluate_ratio(&d).unwrap(), BigInt::from(3));
        assert_eq!(evaluate(&d).unwrap().value, BigInt::from(3));
    }

    #[test]
    fn psi_monomials() {
        assert_eq!(
            integrate_psi_monomial(6, &[1, 1, 1, 0, 0, 0]).unwrap(),
            BigInt::from(6)
        );
        assert_eq!(integrate_psi_monomial(4, &[1]).unwrap(), BigInt::one());
        assert_eq!(integrate_psi_monomial(5, &[2]).unwrap(), BigInt::one());
        assert!(matches!(
            integrate_psi_monomial(5, &[1]),
            Err(Error::DegreeMismatch { .. })
        ));
        assert!(integrate_psi_monomial(4, &[0, 0, 0, 0, 1]).is_err());
    }

    #[test]
    fn single_vertex_matches_psi_integral() {
        for n in 3..=8u32 {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..20 {
                let mut k = vec![0u32; n as usize];
                for _ in 0..n - 3 {
                    k[rng.gen_range(0..n as usize)] += 1;
                }
                let psi: BTreeMap<Label, u32> = k
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| (i as Label + 1, w))
                    .collect();
                let d = DecoratedTree::new(StableTree::trivial(g(n)), vec![], psi).unwrap();
                assert_eq!(
                    evaluate(&d).unwrap().value,
                    integrate_psi_monomial(n, &k).unwrap()
                );
            }
        }
    }

    #[test]
    fn peeling_order_does_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 5..=12 {
            for _ in 0..40 {
                let t = crate::oracle::fuzz::random_tree(g(n), &mut rng);
                let with_psi = rng.gen_bool(0.5);
                let d = crate::oracle::fuzz::balanced_decoration(&t, with_psi, &mut rng);
                let first = balance(&d).unwrap();
                for _ in 0..5 {
                    let mut pick_rng = ChaCha8Rng::seed_from_u64(rng.gen());
                    let other = balance_with(&d, |c| pick_rng.gen_range(0..c.len())).unwrap();
                    assert_eq!(first, other);
                }
                // Pure-divisor sign law.
                if d.psi_weights().is_empty() {
                    let r = evaluate(&d).unwrap();
                    let expected = if t.dim() % 2 == 0 { 1 } else { -1 };
                    assert_eq!(r.sign, expected);
                }
            }
        }
    }
}
