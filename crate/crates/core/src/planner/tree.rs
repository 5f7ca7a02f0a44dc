use serde::{Deserialize, Serialize};

use super::index::SpatialIndex;
use crate::geometry::{Config, Rect};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node<T> {
    pub id: usize,
    pub config: Config<T>,
    pub parent: Option<usize>,
    /// Accumulated edge cost from the root under the active cost model.
    pub cost_to_root: T,
    /// Cost of the edge from `parent`; zero at the root.
    pub edge_cost: T,
    /// Noise level of the edge from `parent`.
    pub edge_sigma: T,
}

/// Node arena with implicit edges and a spatial index over configurations.
#[derive(Debug, Clone)]
pub struct Tree<T> {
    nodes: Vec<Node<T>>,
    children: Vec<Vec<usize>>,
    index: SpatialIndex<T>,
}

impl<T: Real> Tree<T> {
    pub fn new(root: Config<T>, bounds: Rect<T>, cell_hint: T) -> Self {
        let mut index = SpatialIndex::new(bounds, cell_hint);
        index.insert(root);
        Tree {
            nodes: vec![Node {
                id: 0,
                config: root,
                parent: None,
                cost_to_root: T::zero(),
                edge_cost: T::zero(),
                edge_sigma: T::zero(),
            }],
            children: vec![Vec::new()],
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &Node<T> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.children[id]
    }

    pub fn index(&self) -> &SpatialIndex<T> {
        &self.index
    }

    pub fn nearest(&self, q: Config<T>) -> usize {
        self.index.nearest(q).expect("tree always holds the root")
    }

    pub fn insert(
        &mut self,
        config: Config<T>,
        parent: usize,
        edge_cost: T,
        edge_sigma: T,
    ) -> usize {
        let id = self.index.insert(config);
        debug_assert_eq!(id, self.nodes.len());
        let cost_to_root = self.nodes[parent].cost_to_root + edge_cost;
        self.nodes.push(Node {
            id,
            config,
            parent: Some(parent),
            cost_to_root,
            edge_cost,
            edge_sigma,
        });
        self.children.push(Vec::new());
        self.children[parent].push(id);
        id
    }

    /// True if `a` lies on the root path of `b` (including `b` itself).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = Some(b);
        while let Some(id) = cur {
            if id == a {
                return true;
            }
            cur = self.nodes[id].parent;
        }
        false
    }

    /// Moves `id` under `new_parent` and refreshes costs in its subtree.
    ///
    /// # Panics
    /// If the move would create a cycle or `id` is the root.
    pub fn reparent(&mut self, id: usize, new_parent: usize, edge_cost: T, edge_sigma: T) {
        assert!(
            !self.is_ancestor(id, new_parent),
            "reparenting would create a cycle"
        );
        let old = self.nodes[id].parent.expect("root cannot be reparented");
        self.children[old].retain(|&c| c != id);
        self.children[new_parent].push(id);
        let node = &mut self.nodes[id];
        node.parent = Some(new_parent);
        node.edge_cost = edge_cost;
        node.edge_sigma = edge_sigma;
        self.propagate(id);
    }

    fn propagate(&mut self, from: usize) {
        let mut stack = vec![from];
        while let Some(id) = stack.pop() {
            let parent = self.nodes[id].parent.expect("non-root");
            self.nodes[id].cost_to_root =
                self.nodes[parent].cost_to_root + self.nodes[id].edge_cost;
            stack.extend_from_slice(&self.children[id]);
        }
    }

    /// Node ids from the root to `id`.
    pub fn path_to(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.nodes[p].parent;
        }
        out.reverse();
        out
    }

    /// Sum of edge costs along the root path, recomputed from scratch.
    pub fn recomputed_cost(&self, id: usize) -> T {
        self.path_to(id)
            .iter()
            .fold(T::zero(), |acc, &n| acc + self.nodes[n].edge_cost)
    }

    /// Heap bytes held by the tree and its index.
    pub fn heap_bytes(&self) -> usize {
        self.nodes.capacity() * std::mem::size_of::<Node<T>>()
            + self.children.capacity() * std::mem::size_of::<Vec<usize>>()
            + self
                .children
                .iter()
                .map(|c| c.capacity() * std::mem::size_of::<usize>())
                .sum::<usize>()
            + self.index.heap_bytes()
    }
}
