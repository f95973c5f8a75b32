//! Splits, stable trees and their enumeration.
//!
//! A boundary stratum is stored as its set of splits; the vertex and edge
//! incidence of the dual tree is reconstructed from the splits and is only
//! needed for evaluation.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::shape::Shape;

/// A marked-point label, `1..=n`.
pub type Label = u32;

/// Largest supported number of marked points (labels live in a `u64` mask).
pub const MAX_LABELS: u32 = 64;

/// Largest `n` accepted by [`enumerate_stable_trees`].
pub const MAX_ENUMERATION: u32 = 9;

/// A set of labels stored as a bitmask, bit `i - 1` standing for label `i`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(u64);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn from_bits(bits: u64) -> Self {
        LabelSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(label: Label) -> Self {
        debug_assert!((1..=MAX_LABELS).contains(&label));
        LabelSet(1u64 << (label - 1))
    }

    /// Labels `1..=n`.
    pub fn full(n: u32) -> Self {
        if n >= 64 {
            LabelSet(u64::MAX)
        } else {
            LabelSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, label: Label) -> bool {
        (1..=MAX_LABELS).contains(&label) && self.0 & (1u64 << (label - 1)) != 0
    }

    pub fn insert(&mut self, label: Label) {
        self.0 |= LabelSet::singleton(label).0;
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: LabelSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 | other.0)
    }

    pub fn intersection(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & other.0)
    }

    pub fn difference(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & !other.0)
    }

    pub fn min_label(self) -> Option<Label> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    /// Labels in increasing order.
    pub fn iter(self) -> impl Iterator<Item = Label> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            Some(i + 1)
        })
    }
}

impl FromIterator<Label> for LabelSet {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        let mut set = LabelSet::EMPTY;
        for l in iter {
            set.insert(l);
        }
        set
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// The marked-point set `{1, ..., n}` with `3 <= n <= 64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedSet {
    n: u32,
}

impl MarkedSet {
    pub fn new(n: u32) -> Result<Self> {
        if !(3..=MAX_LABELS).contains(&n) {
            return Err(Error::InvalidGround(n));
        }
        Ok(MarkedSet { n })
    }

    pub fn n(self) -> u32 {
        self.n
    }

    /// Dimension of the moduli space, `n - 3`.
    pub fn dim(self) -> u32 {
        self.n - 3
    }

    pub fn labels(self) -> LabelSet {
        LabelSet::full(self.n)
    }

    pub fn contains(self, label: Label) -> bool {
        (1..=self.n).contains(&label)
    }

    pub fn check_label(self, label: Label) -> Result<()> {
        if self.contains(label) {
            Ok(())
        } else {
            Err(Error::LabelOutOfRange { label, n: self.n })
        }
    }

    pub fn complement(self, set: LabelSet) -> LabelSet {
        self.labels().difference(set)
    }

    fn same(self, other: MarkedSet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroundMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }
}

/// A two-block partition `A|B` of the marked points, i.e. the boundary
/// divisor `D_{A|B}`.
///
/// The stored block is the side that does not contain label 1, so every
/// divisor has exactly one representation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Split {
    ground: MarkedSet,
    block: LabelSet,
}

impl Split {
    /// Canonical split with `side` as one of its blocks.
    pub fn new(ground: MarkedSet, side: LabelSet) -> Result<Self> {
        if let Some(bad) = side.difference(ground.labels()).min_label() {
            return Err(Error::LabelOutOfRange {
                label: bad,
                n: ground.n(),
            });
        }
        let other = ground.complement(side);
        if side.len() < 2 || other.len() < 2 {
            return Err(Error::UnstableSplit {
                side: side.to_string(),
                n: ground.n(),
            });
        }
        let block = if side.contains(1) { other } else { side };
        Ok(Split { ground, block })
    }

    pub fn from_labels(ground: MarkedSet, labels: &[Label]) -> Result<Self> {
        for &l in labels {
            ground.check_label(l)?;
        }
        Split::new(ground, labels.iter().copied().collect())
    }

    /// Parses `2,6,8|1,3,4,5,7,9` or the one-sided `2,6,8`.
    pub fn parse(ground: MarkedSet, text: &str) -> Result<Self> {
        let malformed = || Error::MalformedSplit(text.to_string());
        let parse_side = |s: &str| -> Result<LabelSet> {
            let mut set = LabelSet::EMPTY;
            for tok in s.split(',') {
                let l: Label = tok.trim().parse().map_err(|_| malformed())?;
                ground.check_label(l)?;
                if set.contains(l) {
                    return Err(malformed());
                }
                set.insert(l);
            }
            Ok(set)
        };
        match text.split_once('|') {
            Some((a, b)) => {
                let a = parse_side(a)?;
                let b = parse_side(b)?;
                if !a.intersection(b).is_empty() || a.union(b) != ground.labels() {
                    return Err(malformed());
                }
                Split::new(ground, a)
            }
            None => Split::new(ground, parse_side(text)?),
        }
    }

    pub fn ground(&self) -> MarkedSet {
        self.ground
    }

    /// The canonical side (excludes label 1).
    pub fn block(&self) -> LabelSet {
        self.block
    }

    /// The side containing label 1.
    pub fn complement(&self) -> LabelSet {
        self.ground.complement(self.block)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.block, self.complement())
    }
}

impl fmt::Debug for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Split({self})")
    }
}

/// Index of an internal vertex of a [`StableTree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

/// Index of an internal edge of a [`StableTree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    /// Marked points attached directly to this vertex.
    pub leaves: LabelSet,
    /// Incident internal edges; the edge towards label 1 comes first.
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub split: Split,
    /// `ends[0]` lies on the side containing label 1, `ends[1]` on the block side.
    pub ends: [VertexId; 2],
}

/// A leaf-labelled tree whose internal vertices are at least trivalent,
/// i.e. the dual tree of a boundary stratum `X_T`.
///
/// Vertices are numbered in preorder from the vertex carrying label 1,
/// children visited by smallest label; vertex `j > 0` is joined to its parent
/// by edge `j - 1`. The numbering depends only on the split set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableTree {
    ground: MarkedSet,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    leaf_vertex: Vec<VertexId>,
}

impl StableTree {
    /// The open stratum: one vertex carrying every label.
    pub fn trivial(ground: MarkedSet) -> Self {
        StableTree {
            ground,
            vertices: vec![Vertex {
                leaves: ground.labels(),
                edges: Vec::new(),
            }],
            edges: Vec::new(),
            leaf_vertex: vec![VertexId(0); ground.n() as usize],
        }
    }

    pub fn ground(&self) -> MarkedSet {
        self.ground
    }

    pub fn n(&self) -> u32 {
        self.ground.n()
    }

    pub fn codim(&self) -> u32 {
        self.edges.len() as u32
    }

    /// `dim X_T = sum_v (deg(v) - 3)`.
    pub fn dim(&self) -> u32 {
        (0..self.vertices.len())
            .map(|v| self.vertex_dim(VertexId(v)))
            .sum()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn degree(&self, v: VertexId) -> u32 {
        let vx = self.vertex(v);
        vx.leaves.len() + vx.edges.len() as u32
    }

    /// `n(v) = deg(v) - 3`, the dimension of the vertex factor.
    pub fn vertex_dim(&self, v: VertexId) -> u32 {
        self.degree(v) - 3
    }

    pub fn leaf_vertex(&self, label: Label) -> VertexId {
        self.leaf_vertex[(label - 1) as usize]
    }

    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.edge(e).ends;
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn splits(&self) -> impl Iterator<Item = Split> + '_ {
        self.edges.iter().map(|e| e.split)
    }

    pub fn split_set(&self) -> BTreeSet<Split> {
        self.splits().collect()
    }

    pub fn edge_of_split(&self, split: &Split) -> Option<EdgeId> {
        self.edges
            .iter()
            .position(|e| e.split == *split)
            .map(EdgeId)
    }

    pub fn contains_split(&self, split: &Split) -> bool {
        self.edge_of_split(split).is_some()
    }

    /// Split obtained by deleting internal edge `e`.
    pub fn split_of_edge(&self, e: EdgeId) -> Result<Split> {
        self.edges
            .get(e.0)
            .map(|edge| edge.split)
            .ok_or(Error::NotInternalEdge(e.0))
    }

    /// Labels reachable from `from` without crossing edge `via`.
    pub fn side_labels(&self, from: VertexId, via: EdgeId) -> LabelSet {
        let split = self.edge(via).split;
        if self.edge(via).ends[1] == from {
            split.block()
        } else {
            split.complement()
        }
    }
}

impl fmt::Display for StableTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.splits().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// Canonical split with `side` as one of its blocks.
pub fn make_split(ground: MarkedSet, side: LabelSet) -> Result<Split> {
    Split::new(ground, side)
}

/// `A|B` and `X|Y` are compatible iff `A ⊆ X`, `A ⊆ Y`, `A ⊇ X` or `A ⊇ Y`.
pub(crate) fn blocks_compatible(a: LabelSet, x: LabelSet, ground: MarkedSet) -> bool {
    let y = ground.complement(x);
    a.is_subset(x) || a.is_subset(y) || x.is_subset(a) || y.is_subset(a)
}

/// Reconstructs the stable tree whose internal-edge splits are exactly `splits`.
pub fn tree_from_splits<I>(ground: MarkedSet, splits: I) -> Result<StableTree>
where
    I: IntoIterator<Item = Split>,
{
    let mut set = BTreeSet::new();
    for s in splits {
        ground.same(s.ground())?;
        set.insert(s);
    }
    let splits: Vec<Split> = set.into_iter().collect();
    for (i, s) in splits.iter().enumerate() {
        for t in &splits[i + 1..] {
            if !blocks_compatible(s.block(), t.block(), ground) {
                return Err(Error::IncompatibleSplits(*s, *t));
            }
        }
    }

    // Blocks exclude label 1, so compatible blocks are nested or disjoint and
    // form a laminar family rooted at the vertex carrying label 1.
    let m = splits.len();
    let mut parent: Vec<Option<usize>> = vec![None; m];
    for i in 0..m {
        let bi = splits[i].block();
        parent[i] = (0..m)
            .filter(|&j| j != i && bi.is_subset(splits[j].block()))
            .min_by_key(|&j| splits[j].block().len());
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    for i in 0..m {
        children[parent[i].map_or(0, |p| p + 1)].push(i);
    }
    for c in &mut children {
        c.sort_by_key(|&i| splits[i].block().min_label());
    }

    let mut vertices: Vec<Vertex> = Vec::with_capacity(m + 1);
    let mut edges = Vec::with_capacity(m);
    let mut leaf_vertex = vec![VertexId(0); ground.n() as usize];
    // (node in laminar forest, parent vertex id); node 0 is the root.
    let mut stack = vec![(0usize, None::<VertexId>)];
    while let Some((node, parent_vertex)) = stack.pop() {
        let id = VertexId(vertices.len());
        let own = if node == 0 {
            ground.labels()
        } else {
            splits[node - 1].block()
        };
        let covered = children[node]
            .iter()
            .fold(LabelSet::EMPTY, |acc, &c| acc.union(splits[c].block()));
        let leaves = own.difference(covered);
        for l in leaves.iter() {
            leaf_vertex[(l - 1) as usize] = id;
        }
        let mut incident = Vec::new();
        if let Some(p) = parent_vertex {
            let e = EdgeId(edges.len());
            edges.push(Edge {
                split: splits[node - 1],
                ends: [p, id],
            });
            vertices[p.0].edges.push(e);
            incident.push(e);
        }
        vertices.push(Vertex {
            leaves,
            edges: incident,
        });
        for &c in children[node].iter().rev() {
            stack.push((c + 1, Some(id)));
        }
    }

    let tree = StableTree {
        ground,
        vertices,
        edges,
        leaf_vertex,
    };
    debug_assert!(tree.vertex_ids().all(|v| tree.degree(v) >= 3));
    debug_assert_eq!(tree.dim() + tree.codim(), ground.dim());
    Ok(tree)
}

/// Two trees on the same ground set are equal iff their split sets are.
pub fn tree_equal(t1: &StableTree, t2: &StableTree) -> Result<bool> {
    t1.ground().same(t2.ground())?;
    Ok(t1.split_set() == t2.split_set())
}

/// Calls `f` on every stable tree with labels `1..=n`, optionally only those
/// with exactly `codim` internal edges.
///
/// Trees are generated structurally: each tree on `n` labels arises exactly
/// once from a tree on `n - 1` labels by attaching label `n` to an internal
/// vertex or by subdividing an edge with a new vertex carrying it. No
/// compatibility test is involved in generating the shapes.
pub fn for_each_stable_tree<F>(n: u32, codim: Option<u32>, mut f: F) -> Result<()>
where
    F: FnMut(StableTree),
{
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge {
            n,
            max: MAX_ENUMERATION,
        });
    }
    let ground = MarkedSet::new(n)?;
    let mut err = None;
    grow(&Shape::star(&[1, 2, 3]), 4, n, codim, &mut |shape| {
        if err.is_some() {
            return;
        }
        match shape.stable_tree(ground) {
            Ok(t) => f(t),
            Err(e) => err = Some(e),
        }
    });
    err.map_or(Ok(()), Err)
}

fn grow(shape: &Shape, next: Label, n: u32, codim: Option<u32>, f: &mut dyn FnMut(&Shape)) {
    let current = shape.internal_count() as u32 - 1;
    if let Some(k) = codim {
        // Each remaining label adds at most one edge.
        if current > k || current + (n + 1 - next) < k {
            return;
        }
    }
    if next > n {
        f(shape);
        return;
    }
    for v in shape.internal_nodes() {
        grow(&shape.attach_leaf(v, next), next + 1, n, codim, f);
    }
    for (a, b) in shape.edges() {
        grow(&shape.subdivide(a, b, next), next + 1, n, codim, f);
    }
}

/// Every stable tree on `1..=n` (optionally of a fixed codimension), each once.
pub fn enumerate_stable_trees(n: u32, codim: Option<u32>) -> Result<Vec<StableTree>> {
    let mut out = Vec::new();
    for_each_stable_tree(n, codim, |t| out.push(t))?;
    Ok(out)
}
