//! Cartesian tree (min-heap by value, in-order by index) built in O(n) with
//! the classic stack sweep, plus the derived structure the frozen-state
//! analysis needs: the minima path, per-node left-subtree maxima, and the
//! degree-three/leaf pairing.

use std::fmt;

use serde::Serialize;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CartesianError {
    DuplicateValue(i64),
}

impl fmt::Display for CartesianError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartesianError::DuplicateValue(v) => write!(f, "duplicate value {v} in input"),
        }
    }
}

impl std::error::Error for CartesianError {}

/// Cartesian tree over a sequence of distinct values. Node indices are the
/// sequence indices.
#[derive(Clone, Debug, Serialize)]
pub struct CartesianTree {
    values: Vec<i64>,
    root: usize,
    parent: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl CartesianTree {
    /// Stack-based O(n) construction. Rejects duplicate values (the heap
    /// order would be ambiguous).
    pub fn build(values: &[i64]) -> Result<Self, CartesianError> {
        let n = values.len();
        assert!(n > 0, "cannot build a Cartesian tree over nothing");
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(CartesianError::DuplicateValue(pair[0]));
            }
        }
        let mut parent = vec![NONE; n];
        let mut left = vec![NONE; n];
        let mut right = vec![NONE; n];
        // Rightmost spine of the tree built so far.
        let mut spine: Vec<usize> = Vec::with_capacity(n);
        for k in 0..n {
            let mut last_popped = NONE;
            while let Some(&top) = spine.last() {
                if values[top] < values[k] {
                    break;
                }
                last_popped = top;
                spine.pop();
            }
            if last_popped != NONE {
                // k takes the popped chain as its left subtree.
                left[k] = last_popped;
                parent[last_popped] = k;
            }
            if let Some(&top) = spine.last() {
                right[top] = k;
                parent[k] = top;
            }
            spine.push(k);
        }
        let root = spine[0];
        Ok(Self {
            values: values.to_vec(),
            root,
            parent,
            left,
            right,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn value(&self, node: usize) -> i64 {
        self.values[node]
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        (self.parent[node] != NONE).then(|| self.parent[node])
    }

    pub fn left(&self, node: usize) -> Option<usize> {
        (self.left[node] != NONE).then(|| self.left[node])
    }

    pub fn right(&self, node: usize) -> Option<usize> {
        (self.right[node] != NONE).then(|| self.right[node])
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.left[node] == NONE && self.right[node] == NONE
    }

    /// Number of tree edges at a node (children plus parent).
    pub fn degree(&self, node: usize) -> usize {
        (self.parent[node] != NONE) as usize
            + (self.left[node] != NONE) as usize
            + (self.right[node] != NONE) as usize
    }

    pub fn has_two_children(&self, node: usize) -> bool {
        self.left[node] != NONE && self.right[node] != NONE
    }

    /// Parent-index array (`None` encoded as the node's own index is avoided;
    /// the root maps to `usize::MAX`). For structured dumps.
    pub fn parent_array(&self) -> &[usize] {
        &self.parent
    }

    /// Root-to-rightmost-leaf path. Its nodes hold the right-to-left minima
    /// of the sequence, in increasing index order.
    pub fn minima_path(&self) -> Vec<usize> {
        let mut path = vec![self.root];
        let mut node = self.root;
        while self.right[node] != NONE {
            node = self.right[node];
            path.push(node);
        }
        path
    }

    /// In-order traversal; reproduces `0..len` for a correct build.
    pub fn in_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut node = self.root;
        loop {
            while node != NONE {
                stack.push(node);
                node = self.left[node];
            }
            match stack.pop() {
                Some(top) => {
                    out.push(top);
                    node = self.right[top];
                }
                None => break,
            }
        }
        out
    }

    /// Index of the maximum-value node within the subtree rooted at `node`.
    pub fn subtree_max(&self, node: usize) -> usize {
        let mut best = node;
        let mut stack = vec![node];
        while let Some(cur) = stack.pop() {
            if self.values[cur] > self.values[best] {
                best = cur;
            }
            if self.left[cur] != NONE {
                stack.push(self.left[cur]);
            }
            if self.right[cur] != NONE {
                stack.push(self.right[cur]);
            }
        }
        best
    }

    /// For every node: the index of the largest element in its left subtree,
    /// or the node itself when the left subtree is empty or the node is not
    /// on the minima path.
    pub fn left_subtree_max_map(&self) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.len()).collect();
        for &node in &self.minima_path() {
            if self.left[node] != NONE {
                map[node] = self.subtree_max(self.left[node]);
            }
        }
        map
    }

    /// Pair every node that has two children with a descendant leaf: walking
    /// down from the root, each subtree's maximum leaf is already claimed
    /// above, so a two-child node takes the smaller of its two subtree
    /// maximum leaves. The root is paired with the overall maximum leaf.
    /// Returns `pairing[node] = leaf` (usize::MAX where unpaired).
    pub fn leaf_pairing(&self) -> Vec<usize> {
        let n = self.len();
        // Maximum leaf of each subtree, computed on an explicit post-order.
        let mut max_leaf = vec![NONE; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![self.root];
        while let Some(node) = stack.pop() {
            order.push(node);
            if self.left[node] != NONE {
                stack.push(self.left[node]);
            }
            if self.right[node] != NONE {
                stack.push(self.right[node]);
            }
        }
        for &node in order.iter().rev() {
            if self.is_leaf(node) {
                max_leaf[node] = node;
                continue;
            }
            let mut best = NONE;
            for child in [self.left[node], self.right[node]] {
                if child != NONE {
                    let candidate = max_leaf[child];
                    if best == NONE || self.values[candidate] > self.values[best] {
                        best = candidate;
                    }
                }
            }
            max_leaf[node] = best;
        }
        let mut pairing = vec![NONE; n];
        if !self.is_leaf(self.root) {
            pairing[self.root] = max_leaf[self.root];
        }
        for &node in &order {
            if self.has_two_children(node) && node != self.root {
                let l = max_leaf[self.left[node]];
                let r = max_leaf[self.right[node]];
                pairing[node] = if self.values[l] < self.values[r] {
                    l
                } else {
                    r
                };
            }
        }
        pairing
    }
}

/// Marker for "no node" in pairing/left-max maps.
pub const NO_NODE: usize = NONE;
