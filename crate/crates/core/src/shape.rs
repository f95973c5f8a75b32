//! Adjacency-list trees for the places where a split set is an output rather
//! than an input: structural enumeration, random generation and the
//! branch-separation step of the coloring construction.

use crate::error::Result;
use crate::trees::{tree_from_splits, Label, LabelSet, MarkedSet, Split, StableTree};

#[derive(Clone, Debug)]
pub(crate) struct Shape {
    label: Vec<Option<Label>>,
    adj: Vec<Vec<usize>>,
}

impl Shape {
    pub fn star(labels: &[Label]) -> Shape {
        let mut s = Shape {
            label: vec![None],
            adj: vec![Vec::new()],
        };
        for &l in labels {
            let leaf = s.push(Some(l));
            s.link(0, leaf);
        }
        s
    }

    /// Internal vertex `i` of the tree becomes node `i`.
    pub fn from_tree(t: &StableTree) -> Shape {
        let mut s = Shape {
            label: vec![None; t.vertices().len()],
            adj: vec![Vec::new(); t.vertices().len()],
        };
        for edge in t.edges() {
            s.link(edge.ends[0].0, edge.ends[1].0);
        }
        for (i, v) in t.vertices().iter().enumerate() {
            for l in v.leaves.iter() {
                let leaf = s.push(Some(l));
                s.link(i, leaf);
            }
        }
        s
    }

    fn push(&mut self, label: Option<Label>) -> usize {
        self.label.push(label);
        self.adj.push(Vec::new());
        self.label.len() - 1
    }

    fn link(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    fn unlink(&mut self, a: usize, b: usize) {
        self.adj[a].retain(|&x| x != b);
        self.adj[b].retain(|&x| x != a);
    }

    pub fn is_internal(&self, node: usize) -> bool {
        self.label[node].is_none()
    }

    pub fn internal_nodes(&self) -> Vec<usize> {
        (0..self.label.len())
            .filter(|&i| self.is_internal(i))
            .collect()
    }

    pub fn internal_count(&self) -> usize {
        self.label.iter().filter(|l| l.is_none()).count()
    }

    pub fn neighbours(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn label(&self, node: usize) -> Option<Label> {
        self.label[node]
    }

    /// Every edge once, leaf edges included.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nbrs) in self.adj.iter().enumerate() {
            for &b in nbrs {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn attach_leaf(&self, v: usize, label: Label) -> Shape {
        let mut s = self.clone();
        let leaf = s.push(Some(label));
        s.link(v, leaf);
        s
    }

    pub fn subdivide(&self, a: usize, b: usize, label: Label) -> Shape {
        let mut s = self.clone();
        s.unlink(a, b);
        let mid = s.push(None);
        let leaf = s.push(Some(label));
        s.link(a, mid);
        s.link(mid, b);
        s.link(mid, leaf);
        s
    }

    /// Moves the neighbours `moved` of `v` onto a new internal node joined to `v`.
    pub fn separate(&self, v: usize, moved: &[usize]) -> Shape {
        let mut s = self.clone();
        let w = s.push(None);
        for &m in moved {
            s.unlink(v, m);
            s.link(w, m);
        }
        s.link(v, w);
        s
    }

    /// Labels reachable from `from` without passing through `avoid`.
    pub fn side_labels(&self, from: usize, avoid: usize) -> LabelSet {
        let mut set = LabelSet::EMPTY;
        let mut stack = vec![(from, avoid)];
        while let Some((node, prev)) = stack.pop() {
            if let Some(l) = self.label[node] {
                set.insert(l);
            }
            for &next in &self.adj[node] {
                if next != prev {
                    stack.push((next, node));
                }
            }
        }
        set
    }

    /// The split of every edge joining two internal nodes.
    pub fn splits(&self, ground: MarkedSet) -> Result<Vec<Split>> {
        self.edges()
            .into_iter()
            .filter(|&(a, b)| self.is_internal(a) && self.is_internal(b))
            .map(|(a, b)| Split::new(ground, self.side_labels(b, a)))
            .collect()
    }

    pub fn stable_tree(&self, ground: MarkedSet) -> Result<StableTree> {
        tree_from_splits(ground, self.splits(ground)?)
    }
}
