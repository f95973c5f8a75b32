//! Intersections of boundary strata.
//!
//! Split insertion is the production route; the blue/red coloring
//! construction computes the same intersection by separating branches at a
//! vertex and is kept alongside it as an executable cross-check.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::shape::Shape;
use crate::trees::{
    blocks_compatible, tree_from_splits, EdgeId, Label, LabelSet, MarkedSet, Split, StableTree,
    VertexId,
};

fn same_ground(a: MarkedSet, b: MarkedSet) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GroundMismatch {
            left: a.n(),
            right: b.n(),
        })
    }
}

/// Whether `D_{s1} ∩ D_{s2}` is nonempty.
pub fn compatible(s1: &Split, s2: &Split) -> Result<bool> {
    same_ground(s1.ground(), s2.ground())?;
    Ok(blocks_compatible(s1.block(), s2.block(), s1.ground()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Blue,
    Red,
}

impl Color {
    pub fn name(self) -> &'static str {
        match self {
            Color::Blue => "blue",
            Color::Red => "red",
        }
    }
}

/// A branch at a vertex: a pendant leaf or the subtree behind an internal edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Leaf(Label),
    Edge(EdgeId),
}

/// Blue/red coloring of a tree against a divisor `D_{X|Y}`.
///
/// `X` is the side of the divisor containing label 1. An internal edge is blue
/// when one of its sides is contained in `X` and red when one of its sides
/// contains `X`; an edge whose split equals the divisor is blue. Leaves in `X`
/// are blue, leaves in `Y` red.
#[derive(Clone, Debug)]
pub struct Coloring {
    pub tree: StableTree,
    pub divisor: Split,
    pub edge_colors: Vec<Color>,
    /// Indexed by `label - 1`.
    pub leaf_colors: Vec<Color>,
    /// Internal vertices on the path from the smallest blue leaf to the
    /// smallest red leaf.
    pub path: Vec<VertexId>,
    /// The vertex preceding the first red edge on `path`.
    pub split_vertex: VertexId,
}

impl Coloring {
    pub fn blue_labels(&self) -> LabelSet {
        self.divisor.complement()
    }

    pub fn red_labels(&self) -> LabelSet {
        self.divisor.block()
    }

    pub fn leaf_color(&self, label: Label) -> Color {
        self.leaf_colors[(label - 1) as usize]
    }

    pub fn edge_color(&self, e: EdgeId) -> Color {
        self.edge_colors[e.0]
    }

    pub fn branch_color(&self, branch: Branch) -> Color {
        match branch {
            Branch::Leaf(l) => self.leaf_color(l),
            Branch::Edge(e) => self.edge_color(e),
        }
    }

    /// Branches at `v`, pendant leaves first.
    pub fn branches_at(&self, v: VertexId) -> Vec<Branch> {
        let vx = self.tree.vertex(v);
        vx.leaves
            .iter()
            .map(Branch::Leaf)
            .chain(vx.edges.iter().copied().map(Branch::Edge))
            .collect()
    }

    /// Branches at the split vertex with the color of their attaching edge.
    pub fn branches(&self) -> Vec<(Branch, Color)> {
        self.branches_at(self.split_vertex)
            .into_iter()
            .map(|b| (b, self.branch_color(b)))
            .collect()
    }

    /// Labels of `branch` seen from vertex `at`.
    pub fn branch_labels(&self, at: VertexId, branch: Branch) -> LabelSet {
        match branch {
            Branch::Leaf(l) => LabelSet::singleton(l),
            Branch::Edge(e) => self.tree.side_labels(self.tree.other_end(e, at), e),
        }
    }

    /// Whether every edge and leaf of `branch` (seen from `at`) shares the
    /// color of its attaching edge.
    pub fn is_monochromatic(&self, at: VertexId, branch: Branch) -> bool {
        let color = self.branch_color(branch);
        let Branch::Edge(first) = branch else {
            return true;
        };
        let mut stack = vec![(self.tree.other_end(first, at), first)];
        while let Some((v, via)) = stack.pop() {
            if self.edge_color(via) != color {
                return false;
            }
            let vx = self.tree.vertex(v);
            if vx.leaves.iter().any(|l| self.leaf_color(l) != color) {
                return false;
            }
            for &e in &vx.edges {
                if e != via {
                    stack.push((self.tree.other_end(e, v), e));
                }
            }
        }
        true
    }

    /// Split vertex reached along the path from `blue` to `red`.
    ///
    /// Panics unless `blue` is a blue leaf and `red` a red leaf.
    pub fn split_vertex_for(&self, blue: Label, red: Label) -> VertexId {
        assert_eq!(self.leaf_color(blue), Color::Blue);
        assert_eq!(self.leaf_color(red), Color::Red);
        let hops = vertex_path(&self.tree, blue, red);
        let mut prev = hops[0].0;
        for &(v, via) in &hops[1..] {
            if self.edge_color(via.expect("interior hop")) == Color::Red {
                return prev;
            }
            prev = v;
        }
        // The red leaf edge is the first red edge.
        prev
    }

    /// Whether the divisor already is an edge of the tree, i.e. exactly one
    /// branch at the split vertex differs in color from the rest.
    pub fn is_existing_edge(&self) -> bool {
        let branches = self.branches();
        let blue = branches.iter().filter(|(_, c)| *c == Color::Blue).count();
        blue == 1 || branches.len() - blue == 1
    }

    /// The intersection stratum built by moving the red branches at the
    /// split vertex across a new edge.
    pub fn separate(&self) -> Result<StableTree> {
        if self.is_existing_edge() {
            return Ok(self.tree.clone());
        }
        let shape = Shape::from_tree(&self.tree);
        let v = self.split_vertex;
        let moved: Vec<usize> = shape
            .neighbours(v.0)
            .iter()
            .copied()
            .filter(|&nb| {
                let color = match shape.label(nb) {
                    Some(l) => self.leaf_color(l),
                    None => {
                        let e = self
                            .tree
                            .vertex(v)
                            .edges
                            .iter()
                            .copied()
                            .find(|&e| self.tree.other_end(e, v).0 == nb)
                            .expect("internal neighbour is joined by an edge");
                        self.edge_color(e)
                    }
                };
                color == Color::Red
            })
            .collect();
        shape.separate(v.0, &moved).stable_tree(self.tree.ground())
    }
}

/// `(vertex, edge used to enter it)` along the path between the vertices
/// carrying labels `a` and `b`.
fn vertex_path(tree: &StableTree, a: Label, b: Label) -> Vec<(VertexId, Option<EdgeId>)> {
    let start = tree.leaf_vertex(a);
    let goal = tree.leaf_vertex(b);
    let mut came: Vec<Option<(VertexId, EdgeId)>> = vec![None; tree.vertices().len()];
    let mut stack = vec![start];
    let mut seen = vec![false; tree.vertices().len()];
    seen[start.0] = true;
    while let Some(v) = stack.pop() {
        if v == goal {
            break;
        }
        for &e in &tree.vertex(v).edges {
            let w = tree.other_end(e, v);
            if !seen[w.0] {
                seen[w.0] = true;
                came[w.0] = Some((v, e));
                stack.push(w);
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = goal;
    while let Some((prev, e)) = came[cur.0] {
        out.push((cur, Some(e)));
        cur = prev;
    }
    out.push((cur, None));
    out.reverse();
    out
}

/// Colors `tree` against `divisor` and locates the vertex at which every
/// branch is monochromatic.
pub fn color_for_divisor(tree: &StableTree, divisor: &Split) -> Result<Coloring> {
    same_ground(tree.ground(), divisor.ground())?;
    let x = divisor.complement();
    let mut edge_colors = Vec::with_capacity(tree.edges().len());
    for edge in tree.edges() {
        let (p, q) = (edge.split.block(), edge.split.complement());
        let color = if p.is_subset(x) || q.is_subset(x) {
            Color::Blue
        } else if x.is_subset(p) || x.is_subset(q) {
            Color::Red
        } else {
            return Err(Error::EdgeConditionFails(edge.split));
        };
        edge_colors.push(color);
    }
    let leaf_colors = (1..=tree.n())
        .map(|l| {
            if x.contains(l) {
                Color::Blue
            } else {
                Color::Red
            }
        })
        .collect();
    let blue = x.min_label().expect("stable split side is nonempty");
    let red = divisor
        .block()
        .min_label()
        .expect("stable split side is nonempty");
    let mut coloring = Coloring {
        tree: tree.clone(),
        divisor: *divisor,
        edge_colors,
        leaf_colors,
        path: vertex_path(tree, blue, red)
            .into_iter()
            .map(|(v, _)| v)
            .collect(),
        split_vertex: VertexId(0),
    };
    coloring.split_vertex = coloring.split_vertex_for(blue, red);
    Ok(coloring)
}

/// `X_T ∩ D`, or `None` when empty.
pub fn meet_divisor(tree: &StableTree, divisor: &Split) -> Result<Option<StableTree>> {
    same_ground(tree.ground(), divisor.ground())?;
    if tree
        .splits()
        .any(|s| !blocks_compatible(s.block(), divisor.block(), tree.ground()))
    {
        return Ok(None);
    }
    tree_from_splits(tree.ground(), tree.splits().chain([*divisor])).map(Some)
}

/// Intersection of all the given strata, or `None` when empty.
pub fn meet_all(trees: &[StableTree]) -> Result<Option<StableTree>> {
    let ground = trees.first().ok_or(Error::NoStrata)?.ground();
    for t in trees {
        same_ground(ground, t.ground())?;
    }
    let mut union: Vec<Split> = trees.iter().flat_map(|t| t.splits()).collect();
    union.sort();
    union.dedup();
    for (i, a) in union.iter().enumerate() {
        if union[i + 1..]
            .iter()
            .any(|b| !blocks_compatible(a.block(), b.block(), ground))
        {
            return Ok(None);
        }
    }
    tree_from_splits(ground, union).map(Some)
}

/// Whether `X_{T1} ∩ X_{T2}` is nonempty, decided edge pair by edge pair.
pub fn flag_equivalence(t1: &StableTree, t2: &StableTree) -> Result<bool> {
    same_ground(t1.ground(), t2.ground())?;
    let ground = t1.ground();
    Ok(t1.splits().all(|a| {
        t2.splits()
            .all(|b| blocks_compatible(a.block(), b.block(), ground))
    }))
}

/// A monomial in boundary divisors and psi classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryProduct {
    ground: MarkedSet,
    divisors: BTreeMap<Split, u32>,
    psi: BTreeMap<Label, u32>,
}

impl BoundaryProduct {
    pub fn new(ground: MarkedSet) -> Self {
        BoundaryProduct {
            ground,
            divisors: BTreeMap::new(),
            psi: BTreeMap::new(),
        }
    }

    pub fn ground(&self) -> MarkedSet {
        self.ground
    }

    /// Multiplies by `[D]^exponent`.
    pub fn divisor(mut self, split: Split, exponent: u32) -> Result<Self> {
        same_ground(self.ground, split.ground())?;
        if exponent > 0 {
            *self.divisors.entry(split).or_default() += exponent;
        }
        Ok(self)
    }

    /// Multiplies by `psi_label^exponent`.
    pub fn psi(mut self, label: Label, exponent: u32) -> Result<Self> {
        self.ground.check_label(label)?;
        if exponent > 0 {
            *self.psi.entry(label).or_default() += exponent;
        }
        Ok(self)
    }

    pub fn divisor_powers(&self) -> &BTreeMap<Split, u32> {
        &self.divisors
    }

    pub fn psi_powers(&self) -> &BTreeMap<Label, u32> {
        &self.psi
    }

    pub fn total_degree(&self) -> u64 {
        self.divisors
            .values()
            .chain(self.psi.values())
            .map(|&e| u64::from(e))
            .sum()
    }
}

/// A stratum with vertex dimensions `n(v)`, internal-edge weights `k(e)` and
/// psi weights on leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedTree {
    tree: StableTree,
    edge_weights: Vec<u32>,
    psi: BTreeMap<Label, u32>,
}

impl DecoratedTree {
    pub fn new(
        tree: StableTree,
        edge_weights: Vec<u32>,
        psi: BTreeMap<Label, u32>,
    ) -> Result<Self> {
        if edge_weights.len() != tree.edges().len() {
            return Err(Error::WeightCountMismatch {
                got: edge_weights.len(),
                expected: tree.edges().len(),
            });
        }
        for &l in psi.keys() {
            tree.ground().check_label(l)?;
        }
        let psi = psi.into_iter().filter(|&(_, w)| w > 0).collect();
        Ok(DecoratedTree {
            tree,
            edge_weights,
            psi,
        })
    }

    pub fn tree(&self) -> &StableTree {
        &self.tree
    }

    pub fn edge_weight(&self, e: EdgeId) -> u32 {
        self.edge_weights[e.0]
    }

    pub fn edge_weights(&self) -> &[u32] {
        &self.edge_weights
    }

    pub fn vertex_dim(&self, v: VertexId) -> u32 {
        self.tree.vertex_dim(v)
    }

    pub fn psi_weights(&self) -> &BTreeMap<Label, u32> {
        &self.psi
    }

    /// Psi weights on leaves attached to `v`, by increasing label.
    pub fn psi_at(&self, v: VertexId) -> Vec<(Label, u32)> {
        self.tree
            .vertex(v)
            .leaves
            .iter()
            .filter_map(|l| self.psi.get(&l).map(|&w| (l, w)))
            .collect()
    }

    pub fn edge_weight_sum(&self) -> u64 {
        self.edge_weights.iter().map(|&k| u64::from(k)).sum()
    }

    pub fn psi_weight_sum(&self) -> u64 {
        self.psi.values().map(|&k| u64::from(k)).sum()
    }

    /// `sum_e k(e) + sum psi = sum_v n(v)`.
    pub fn check_dimension(&self) -> Result<()> {
        let weights = self.edge_weight_sum() + self.psi_weight_sum();
        let dims = u64::from(self.tree.dim());
        if weights == dims {
            Ok(())
        } else {
            Err(Error::DimensionUnbalanced { weights, dims })
        }
    }

    /// `(-1)^{sum_e k(e)}`.
    pub fn sign(&self) -> i8 {
        if self.edge_weight_sum().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

fn check_degree(ground: MarkedSet, degree: u64) -> Result<()> {
    if degree == u64::from(ground.dim()) {
        Ok(())
    } else {
        Err(Error::DegreeMismatch {
            degree,
            expected: ground.dim(),
        })
    }
}

/// Normalizes a dimension-zero product: the stratum cut out by the divisor
/// support, `k(e) = exponent - 1` and the psi weights. `None` when the
/// support does not intersect.
pub fn product_to_decorated(product: &BoundaryProduct) -> Result<Option<DecoratedTree>> {
    let ground = product.ground();
    check_degree(ground, product.total_degree())?;
    let support: Vec<Split> = product.divisor_powers().keys().copied().collect();
    for (i, a) in support.iter().enumerate() {
        if support[i + 1..]
            .iter()
            .any(|b| !blocks_compatible(a.block(), b.block(), ground))
        {
            return Ok(None);
        }
    }
    let tree = tree_from_splits(ground, support)?;
    let weights = tree
        .splits()
        .map(|s| product.divisor_powers()[&s] - 1)
        .collect();
    DecoratedTree::new(tree, weights, product.psi_powers().clone()).map(Some)
}

/// Normalizes a dimension-zero product of strata classes; `k(e)` counts the
/// input strata lying in `D_e`, minus one.
pub fn strata_product_to_decorated(trees: &[StableTree]) -> Result<Option<DecoratedTree>> {
    let ground = trees.first().ok_or(Error::NoStrata)?.ground();
    for t in trees {
        same_ground(ground, t.ground())?;
    }
    check_degree(ground, trees.iter().map(|t| u64::from(t.codim())).sum())?;
    let Some(meet) = meet_all(trees)? else {
        return Ok(None);
    };
    let weights = meet
        .splits()
        .map(|s| trees.iter().filter(|t| t.contains_split(&s)).count() as u32 - 1)
        .collect();
    DecoratedTree::new(meet, weights, BTreeMap::new()).map(Some)
}
