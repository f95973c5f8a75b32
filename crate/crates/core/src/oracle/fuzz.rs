//! Random and exhaustive generators of decorated trees.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Result;
use crate::intersect::DecoratedTree;
use crate::shape::Shape;
use crate::trees::{Label, MarkedSet, StableTree};

/// A stable tree grown by inserting labels `4..=n` at uniformly chosen
/// vertices or edges.
pub fn random_tree<R: Rng + ?Sized>(ground: MarkedSet, rng: &mut R) -> StableTree {
    let mut shape = Shape::star(&[1, 2, 3]);
    for label in 4..=ground.n() {
        let nodes = shape.internal_nodes();
        let edges = shape.edges();
        let pick = rng.gen_range(0..nodes.len() + edges.len());
        shape = if pick < nodes.len() {
            shape.attach_leaf(nodes[pick], label)
        } else {
            let (a, b) = edges[pick - nodes.len()];
            shape.subdivide(a, b, label)
        };
    }
    shape
        .stable_tree(ground)
        .expect("grown shapes are stable trees")
}

/// Scatters `dim X_T` units over the internal edges and, when `with_psi`,
/// the leaves. Usually unbalanced. A tree without internal edges always gets
/// psi weights.
pub fn random_decoration<R: Rng + ?Sized>(
    tree: &StableTree,
    with_psi: bool,
    rng: &mut R,
) -> DecoratedTree {
    let edges = tree.edges().len();
    let with_psi = with_psi || edges == 0;
    let slots = edges + if with_psi { tree.n() as usize } else { 0 };
    let mut weights = vec![0u32; edges];
    let mut psi = BTreeMap::new();
    for _ in 0..tree.dim() {
        let s = rng.gen_range(0..slots);
        if s < edges {
            weights[s] += 1;
        } else {
            *psi.entry((s - edges + 1) as Label).or_insert(0) += 1;
        }
    }
    DecoratedTree::new(tree.clone(), weights, psi).expect("weights match the tree")
}

/// Hands each vertex's dimension out to its incident edges (and, when
/// `with_psi`, its leaves) and sums the two halves of every edge, so the
/// result always admits a balanced weighting. A tree without internal edges
/// always gets psi weights.
pub fn balanced_decoration<R: Rng + ?Sized>(
    tree: &StableTree,
    with_psi: bool,
    rng: &mut R,
) -> DecoratedTree {
    let mut weights = vec![0u32; tree.edges().len()];
    let mut psi: BTreeMap<Label, u32> = BTreeMap::new();
    for v in tree.vertex_ids() {
        let vx = tree.vertex(v);
        let leaves: Vec<Label> = if with_psi || vx.edges.is_empty() {
            vx.leaves.iter().collect()
        } else {
            Vec::new()
        };
        let slots = vx.edges.len() + leaves.len();
        let dim = tree.vertex_dim(v);
        for _ in 0..dim {
            let s = rng.gen_range(0..slots);
            if s < vx.edges.len() {
                weights[vx.edges[s].0] += 1;
            } else {
                *psi.entry(leaves[s - vx.edges.len()]).or_insert(0) += 1;
            }
        }
    }
    DecoratedTree::new(tree.clone(), weights, psi).expect("weights match the tree")
}

/// Calls `f` on every decoration of `tree` satisfying the dimension
/// condition: all ways to place `dim X_T` units on internal edges and, when
/// `with_psi`, on leaves.
pub fn for_each_decoration<F>(tree: &StableTree, with_psi: bool, mut f: F) -> Result<()>
where
    F: FnMut(DecoratedTree) -> Result<()>,
{
    let edges = tree.edges().len();
    let slots = edges + if with_psi { tree.n() as usize } else { 0 };
    let dim = tree.dim();
    if slots == 0 {
        if dim == 0 {
            f(DecoratedTree::new(
                tree.clone(),
                Vec::new(),
                BTreeMap::new(),
            )?)?;
        }
        return Ok(());
    }
    let mut counts = vec![0u32; slots];
    fill(&mut counts, 0, dim, &mut |counts| {
        let weights = counts[..edges].to_vec();
        let psi = counts[edges..]
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(|(i, &w)| (i as Label + 1, w))
            .collect();
        f(DecoratedTree::new(tree.clone(), weights, psi)?)
    })
}

fn fill(
    counts: &mut [u32],
    at: usize,
    left: u32,
    f: &mut dyn FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    if at + 1 == counts.len() {
        counts[at] = left;
        let r = f(counts);
        counts[at] = 0;
        return r;
    }
    for here in 0..=left {
        counts[at] = here;
        fill(counts, at + 1, left - here, f)?;
    }
    counts[at] = 0;
    Ok(())
}
