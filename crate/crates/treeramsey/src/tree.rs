//! Finite ordered rooted trees.
//!
//! Nodes are numbered in depth-first order respecting the sibling order, so
//! the index order on nodes coincides with the lexicographic order `<=_T`
//! (ancestors precede descendants, incomparable nodes are ordered by branch
//! order at their meet). Every tree value is canonical: two ordered trees are
//! isomorphic exactly when their parent arrays are equal.
//!
//! Heights are counted from 1 at the root: `ht(v)` is the number of
//! predecessors of `v`, including `v` itself.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::embed::TreeMap;
use crate::Error;

/// Index of a node relative to one [`OrderedTree`] value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeRef(pub usize);

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// A finite ordered rooted tree in canonical depth-first numbering.
#[derive(Clone, Debug)]
pub struct OrderedTree {
    parents: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    heights: Vec<usize>,
    subtree_sizes: Vec<usize>,
}

impl PartialEq for OrderedTree {
    fn eq(&self, other: &Self) -> bool {
        self.parents == other.parents
    }
}

impl Eq for OrderedTree {}

impl Hash for OrderedTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parents.hash(state);
    }
}

impl OrderedTree {
    /// The empty tree.
    pub fn empty() -> Self {
        OrderedTree {
            parents: Vec::new(),
            children: Vec::new(),
            heights: Vec::new(),
            subtree_sizes: Vec::new(),
        }
    }

    /// The one-node tree.
    pub fn singleton() -> Self {
        Self::from_parents(vec![None]).expect("singleton is valid")
    }

    /// The chain `[n]` with its unique ordering.
    pub fn chain(n: usize) -> Self {
        let parents = (0..n).map(|i| if i == 0 { None } else { Some(i - 1) }).collect();
        Self::from_parents(parents).expect("chain is valid")
    }

    /// The regular tree `T^{k,n}`: every non-leaf has exactly `k` ordered
    /// children and every leaf has height `n`. By convention `T^{k,0}` is
    /// empty and `T^{0,n}` has a single node for `n >= 1`.
    pub fn regular(k: usize, n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        if k == 0 {
            return Self::singleton();
        }
        let mut parents = Vec::new();
        // Emit the preorder directly: node, then k subtrees while below height n.
        fn emit(parents: &mut Vec<Option<usize>>, parent: Option<usize>, ht: usize, k: usize, n: usize) {
            let me = parents.len();
            parents.push(parent);
            if ht < n {
                for _ in 0..k {
                    emit(parents, Some(me), ht + 1, k, n);
                }
            }
        }
        emit(&mut parents, None, 1, k, n);
        Self::from_parents(parents).expect("regular tree is valid")
    }

    /// Builds a tree from a parent array. `parents[0]` must be `None`, every
    /// other entry `Some(j)` with `j < i`, and the numbering must be the
    /// depth-first order of the tree it describes.
    pub fn from_parents(parents: Vec<Option<usize>>) -> Result<Self, Error> {
        let n = parents.len();
        if n == 0 {
            return Ok(Self::empty());
        }
        if parents[0].is_some() {
            return Err(Error::InvalidTree("node 0 must be the root".into()));
        }
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut heights = vec![1usize; n];
        for i in 1..n {
            match parents[i] {
                None => {
                    return Err(Error::InvalidTree(format!("node {i} has no parent but is not node 0")));
                }
                Some(p) if p >= i => {
                    return Err(Error::InvalidTree(format!("parent[{i}] = {p} violates parent[i] < i")));
                }
                Some(p) => {
                    children[p].push(i);
                    heights[i] = heights[p] + 1;
                }
            }
        }
        // The numbering must be exactly the preorder induced by the sibling
        // order, otherwise index order and lexicographic order disagree.
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            order.push(v);
            for &c in children[v].iter().rev() {
                stack.push(c);
            }
        }
        if order.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::InvalidTree("parent array is not in depth-first order".into()));
        }
        let mut subtree_sizes = vec![1usize; n];
        for i in (1..n).rev() {
            let p = parents[i].unwrap();
            subtree_sizes[p] += subtree_sizes[i];
        }
        Ok(OrderedTree {
            parents,
            children,
            heights,
            subtree_sizes,
        })
    }

    /// Builds a tree from the JSON convention: `-1` marks the root slot.
    pub fn from_parent_slots(slots: &[i64]) -> Result<Self, Error> {
        let mut parents = Vec::with_capacity(slots.len());
        for (i, &s) in slots.iter().enumerate() {
            if s < -1 {
                return Err(Error::InvalidTree(format!("parent[{i}] = {s} is negative")));
            }
            parents.push(if s == -1 { None } else { Some(s as usize) });
        }
        Self::from_parents(parents)
    }

    /// Parent array with `-1` for the root slot.
    pub fn to_parent_slots(&self) -> Vec<i64> {
        self.parents
            .iter()
            .map(|p| p.map(|v| v as i64).unwrap_or(-1))
            .collect()
    }

    /// Builds a tree with a fresh root whose child subtrees are `forest`, in order.
    pub fn from_forest(forest: &[OrderedTree]) -> Self {
        let mut parents = vec![None];
        for t in forest {
            let off = parents.len();
            for (i, p) in t.parents.iter().enumerate() {
                parents.push(Some(match p {
                    None => 0,
                    Some(q) => q + off,
                }));
                debug_assert!(off + i < parents.len() + 1);
            }
        }
        Self::from_parents(parents).expect("forest composition is valid")
    }

    pub fn size(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeRef> {
        (0..self.size()).map(NodeRef)
    }

    fn check(&self, v: NodeRef) -> usize {
        assert!(v.0 < self.size(), "node {} out of range for tree of size {}", v, self.size());
        v.0
    }

    pub fn parent(&self, v: NodeRef) -> Option<NodeRef> {
        self.parents[self.check(v)].map(NodeRef)
    }

    /// Immediate successors of `v` in sibling order.
    pub fn children(&self, v: NodeRef) -> impl Iterator<Item = NodeRef> + '_ {
        self.children[self.check(v)].iter().map(|&c| NodeRef(c))
    }

    pub fn child_count(&self, v: NodeRef) -> usize {
        self.children[self.check(v)].len()
    }

    pub fn is_leaf(&self, v: NodeRef) -> bool {
        self.children[self.check(v)].is_empty()
    }

    /// Leaves in lexicographic order.
    pub fn leaves(&self) -> Vec<NodeRef> {
        (0..self.size()).filter(|&i| self.children[i].is_empty()).map(NodeRef).collect()
    }

    /// `ht(v)`: the number of predecessors of `v`, including `v`.
    pub fn height_of(&self, v: NodeRef) -> usize {
        self.heights[self.check(v)]
    }

    /// `ht(T)`, with `ht(empty) = 0`.
    pub fn height(&self) -> usize {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    /// `br(T)`: the maximal number of immediate successors, 0 for the empty tree.
    pub fn branching(&self) -> usize {
        self.children.iter().map(|c| c.len()).max().unwrap_or(0)
    }

    /// Is `a` a predecessor of `b`? Every node is a predecessor of itself.
    pub fn is_predecessor(&self, a: NodeRef, b: NodeRef) -> bool {
        let a = self.check(a);
        let mut cur = self.check(b);
        loop {
            if cur == a {
                return true;
            }
            match self.parents[cur] {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// `v ∧_T w`: the largest common predecessor.
    pub fn wedge(&self, v: NodeRef, w: NodeRef) -> NodeRef {
        let mut a = self.check(v);
        let mut b = self.check(w);
        while self.heights[a] > self.heights[b] {
            a = self.parents[a].expect("non-root has parent");
        }
        while self.heights[b] > self.heights[a] {
            b = self.parents[b].expect("non-root has parent");
        }
        while a != b {
            a = self.parents[a].expect("distinct nodes at height 1 impossible in a rooted tree");
            b = self.parents[b].expect("distinct nodes at height 1 impossible in a rooted tree");
        }
        NodeRef(a)
    }

    /// The lexicographic order `<=_T`, computed from the definition (meet and
    /// branch order), not by comparing indices.
    pub fn lex_compare(&self, v: NodeRef, w: NodeRef) -> Ordering {
        if v == w {
            return Ordering::Equal;
        }
        if self.is_predecessor(v, w) {
            return Ordering::Less;
        }
        if self.is_predecessor(w, v) {
            return Ordering::Greater;
        }
        let m = self.wedge(v, w);
        let a = self.branch_child(m, v);
        let b = self.branch_child(m, w);
        let pos = |x: usize| self.children[m.0].iter().position(|&c| c == x).expect("branch child");
        pos(a.0).cmp(&pos(b.0))
    }

    /// The predecessor of `v` among the immediate successors of `m`;
    /// `m` must be a proper predecessor of `v`.
    pub fn branch_child(&self, m: NodeRef, v: NodeRef) -> NodeRef {
        let m = self.check(m);
        let mut cur = self.check(v);
        loop {
            match self.parents[cur] {
                Some(p) if p == m => return NodeRef(cur),
                Some(p) => cur = p,
                None => panic!("{v} is not a successor of n{m}"),
            }
        }
    }

    /// `T(v)` together with the injection from the new indices into `self`.
    pub fn subtree(&self, v: NodeRef) -> (OrderedTree, Vec<NodeRef>) {
        let v = self.check(v);
        let sz = self.subtree_sizes[v];
        let map: Vec<NodeRef> = (v..v + sz).map(NodeRef).collect();
        let parents = (0..sz)
            .map(|i| {
                if i == 0 {
                    None
                } else {
                    Some(self.parents[v + i].expect("subtree node has parent") - v)
                }
            })
            .collect();
        let t = Self::from_parents(parents).expect("subtree slice stays in preorder");
        (t, map)
    }

    /// Induced tree on a predecessor-closed node set given in increasing index order.
    fn induced(&self, kept: &[usize]) -> OrderedTree {
        let mut remap = vec![usize::MAX; self.size()];
        for (new, &old) in kept.iter().enumerate() {
            remap[old] = new;
        }
        let parents = kept
            .iter()
            .map(|&old| self.parents[old].map(|p| remap[p]))
            .collect();
        Self::from_parents(parents).expect("induced set is predecessor-closed")
    }

    /// Nodes of `T^*` (all nodes of height below `ht(T)`), in index order.
    pub fn star_nodes(&self) -> Vec<NodeRef> {
        let h = self.height();
        (0..self.size()).filter(|&i| self.heights[i] < h).map(NodeRef).collect()
    }

    /// `T^*`: the tree with all highest leaves removed.
    pub fn derive_star(&self) -> OrderedTree {
        let kept: Vec<usize> = self.star_nodes().into_iter().map(|v| v.0).collect();
        self.induced(&kept)
    }

    /// `T` with all leaves removed.
    pub fn minus(&self) -> OrderedTree {
        let kept: Vec<usize> = (0..self.size()).filter(|&i| !self.children[i].is_empty()).collect();
        self.induced(&kept)
    }

    /// `T` with one fresh node added on top of every leaf.
    pub fn plus(&self) -> OrderedTree {
        if self.is_empty() {
            return Self::empty();
        }
        let mut parents = Vec::with_capacity(self.size() * 2);
        fn emit(t: &OrderedTree, v: usize, parent: Option<usize>, out: &mut Vec<Option<usize>>) {
            let me = out.len();
            out.push(parent);
            if t.children[v].is_empty() {
                out.push(Some(me));
            } else {
                for &c in &t.children[v] {
                    emit(t, c, Some(me), out);
                }
            }
        }
        emit(self, 0, None, &mut parents);
        Self::from_parents(parents).expect("leaf extension is valid")
    }

    /// Balanced-parenthesis encoding; equal codes characterize isomorphic
    /// ordered trees.
    pub fn canonical_code(&self) -> String {
        fn code(t: &OrderedTree, v: usize, out: &mut String) {
            out.push('(');
            for &c in &t.children[v] {
                code(t, c, out);
            }
            out.push(')');
        }
        let mut out = String::new();
        if !self.is_empty() {
            code(self, 0, &mut out);
        }
        out
    }

    /// `T'` computed by removing the final segment of the rightmost branch.
    pub fn derive_prime(&self) -> DerivePrime {
        let n = self.size();
        if n == 0 {
            return DerivePrime {
                derived: Self::empty(),
                removed_len: 0,
                splitting_node: None,
            };
        }
        // The lexicographically largest node is the last one in preorder; the
        // removed nodes are its predecessors v with T(v) having no other leaf.
        let mut removed = 1usize;
        let mut top = n - 1;
        while let Some(p) = self.parents[top] {
            if self.children[p].len() == 1 {
                removed += 1;
                top = p;
            } else {
                break;
            }
        }
        let kept: Vec<usize> = (0..n - removed).collect();
        let derived = self.induced(&kept);
        let splitting_node = self.parents[top].map(NodeRef);
        DerivePrime {
            derived,
            removed_len: removed,
            splitting_node,
        }
    }

    /// Child-index path from the root to `v`.
    pub fn path_of(&self, v: NodeRef) -> Vec<usize> {
        let mut v = self.check(v);
        let mut path = Vec::new();
        while let Some(p) = self.parents[v] {
            let pos = self.children[p].iter().position(|&c| c == v).unwrap();
            path.push(pos);
            v = p;
        }
        path.reverse();
        path
    }

    /// Node reached from the root along child positions, if present.
    pub fn node_at_path(&self, path: &[usize]) -> Option<NodeRef> {
        if self.is_empty() {
            return None;
        }
        let mut v = 0usize;
        for &pos in path {
            v = *self.children[v].get(pos)?;
        }
        Some(NodeRef(v))
    }
}

/// Result of the rightmost-branch derivation.
#[derive(Clone, Debug)]
pub struct DerivePrime {
    /// `T'` as an ordered tree; its nodes are the initial index segment of `T`.
    pub derived: OrderedTree,
    /// `p = |T \ T'|`, identifying the removed chain with `[p]` by increasing height.
    pub removed_len: usize,
    /// The unique node of `T'` with an immediate successor among the removed
    /// nodes, when `T'` is non-empty.
    pub splitting_node: Option<NodeRef>,
}

/// Which of the two canonical inclusions `T^{k,n} -> T^{k,n+1}` to build.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IotaVariant {
    /// Root to root; preserves heights.
    Star,
    /// Smallest leaf to smallest leaf; identifies `T^{k,n}` with the subtree
    /// at the first child of the root of `T^{k,n+1}`.
    Prime,
}

/// The canonical embedding `T^{k,n} -> T^{k,n+1}` of the requested variant.
pub fn iota(k: usize, n: usize, variant: IotaVariant) -> TreeMap {
    let small = OrderedTree::regular(k, n);
    let big = OrderedTree::regular(k, n + 1);
    let image = small
        .nodes()
        .map(|v| {
            let mut path = small.path_of(v);
            if variant == IotaVariant::Prime && k > 0 {
                path.insert(0, 0);
            }
            big.node_at_path(&path).expect("regular tree contains the image path").0
        })
        .collect();
    TreeMap::new(small, big, image).expect("iota image is valid")
}

/// All ordered trees with exactly `n` nodes.
pub fn all_trees_of_size(n: usize) -> Vec<OrderedTree> {
    if n == 0 {
        return vec![OrderedTree::empty()];
    }
    let mut by_size: Vec<Vec<OrderedTree>> = vec![vec![OrderedTree::empty()]];
    for sz in 1..=n {
        let mut trees = Vec::new();
        let mut forest: Vec<OrderedTree> = Vec::new();
        build_forests(sz - 1, &by_size, &mut forest, &mut trees);
        by_size.push(trees);
    }
    by_size.pop().unwrap()
}

fn build_forests(
    remaining: usize,
    by_size: &[Vec<OrderedTree>],
    forest: &mut Vec<OrderedTree>,
    out: &mut Vec<OrderedTree>,
) {
    if remaining == 0 {
        out.push(OrderedTree::from_forest(forest));
        return;
    }
    for first in 1..=remaining {
        for t in &by_size[first] {
            forest.push(t.clone());
            build_forests(remaining - first, by_size, forest, out);
            forest.pop();
        }
    }
}

/// All ordered trees with at most `n` nodes, smallest first.
pub fn all_trees_up_to(n: usize) -> Vec<OrderedTree> {
    (0..=n).flat_map(all_trees_of_size).collect()
}

/// All ordered trees with branching at most `k` and height at most `max_ht`,
/// including the empty tree.
pub fn bounded_trees(k: usize, max_ht: usize) -> Vec<OrderedTree> {
    fn gen(k: usize, h: usize) -> Vec<OrderedTree> {
        if h == 0 {
            return Vec::new();
        }
        let below = gen(k, h - 1);
        let mut out = vec![OrderedTree::singleton()];
        let mut forest = Vec::new();
        build_bounded(k, &below, &mut forest, &mut out);
        out
    }
    let mut out = vec![OrderedTree::empty()];
    out.extend(gen(k, max_ht));
    out
}

fn build_bounded(k: usize, below: &[OrderedTree], forest: &mut Vec<OrderedTree>, out: &mut Vec<OrderedTree>) {
    if !forest.is_empty() {
        out.push(OrderedTree::from_forest(forest));
    }
    if forest.len() == k {
        return;
    }
    for t in below {
        forest.push(t.clone());
        build_bounded(k, below, forest, out);
        forest.pop();
    }
}

impl Serialize for OrderedTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            parent: Vec<i64>,
        }
        Repr {
            parent: self.to_parent_slots(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrderedTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            parent: Vec<i64>,
        }
        let repr = Repr::deserialize(deserializer)?;
        OrderedTree::from_parent_slots(&repr.parent).map_err(D::Error::custom)
    }
}

impl fmt::Display for OrderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_code())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_tree_conventions() {
        assert!(OrderedTree::regular(2, 0).is_empty());
        assert_eq!(OrderedTree::regular(0, 5).size(), 1);
        let t = OrderedTree::regular(2, 2);
        assert_eq!(t.size(), 3);
        assert_eq!(t.children(NodeRef(0)).count(), 2);
        assert_eq!(t.canonical_code(), "(()())");
    }

    #[test]
    fn regular_tree_shape() {
        let t = OrderedTree::regular(2, 3);
        assert_eq!(t.size(), 7);
        assert_eq!(t.height(), 3);
        assert_eq!(t.branching(), 2);
        for v in t.nodes() {
            if t.is_leaf(v) {
                assert_eq!(t.height_of(v), 3);
            } else {
                assert_eq!(t.child_count(v), 2);
            }
        }
    }

    #[test]
    fn from_parents_rejects_bad_arrays() {
        assert!(OrderedTree::from_parents(vec![Some(0)]).is_err());
        assert!(OrderedTree::from_parents(vec![None, Some(1)]).is_err());
        assert!(OrderedTree::from_parents(vec![None, None]).is_err());
        // Topologically sorted but not in depth-first order: node 3 hangs off
        // node 1 while node 2 (a later sibling subtree) intervenes.
        assert!(OrderedTree::from_parents(vec![None, Some(0), Some(0), Some(1)]).is_err());
    }

    #[test]
    fn wedge_examples() {
        let t = OrderedTree::regular(2, 2);
        let (a, b) = (NodeRef(1), NodeRef(2));
        assert_eq!(t.wedge(a, a), a);
        assert_eq!(t.wedge(a, b), NodeRef(0));
        let c = OrderedTree::chain(3);
        assert_eq!(c.wedge(NodeRef(1), NodeRef(2)), NodeRef(1));
    }

    #[test]
    fn lex_compare_matches_index_order_small() {
        for t in all_trees_up_to(7) {
            for v in t.nodes() {
                for w in t.nodes() {
                    assert_eq!(t.lex_compare(v, w), v.0.cmp(&w.0), "tree {t} nodes {v} {w}");
                }
            }
        }
    }

    #[test]
    fn derive_star_examples() {
        assert!(OrderedTree::empty().derive_star().is_empty());
        assert_eq!(OrderedTree::regular(2, 2).derive_star(), OrderedTree::singleton());
        assert_eq!(OrderedTree::chain(3).derive_star(), OrderedTree::chain(2));
    }

    #[test]
    fn derive_prime_examples() {
        let r = OrderedTree::chain(3).derive_prime();
        assert!(r.derived.is_empty());
        assert_eq!(r.removed_len, 3);
        assert!(r.splitting_node.is_none());

        let r = OrderedTree::regular(2, 2).derive_prime();
        assert_eq!(r.derived, OrderedTree::chain(2));
        assert_eq!(r.removed_len, 1);
        assert_eq!(r.splitting_node, Some(NodeRef(0)));

        let r = OrderedTree::singleton().derive_prime();
        assert!(r.derived.is_empty());
        assert_eq!(r.removed_len, 1);

        let r = OrderedTree::empty().derive_prime();
        assert_eq!(r.removed_len, 0);
    }

    #[test]
    fn derive_prime_drops_one_leaf() {
        for t in all_trees_up_to(6) {
            if t.is_empty() {
                continue;
            }
            let r = t.derive_prime();
            assert_eq!(r.derived.leaves().len(), t.leaves().len() - 1, "tree {t}");
        }
    }

    #[test]
    fn subtree_examples() {
        let t = OrderedTree::regular(2, 3);
        let (s, map) = t.subtree(NodeRef(0));
        assert_eq!(s, t);
        assert_eq!(map[0], NodeRef(0));
        let (s, map) = t.subtree(NodeRef(1));
        assert_eq!(s, OrderedTree::regular(2, 2));
        assert_eq!(map, vec![NodeRef(1), NodeRef(2), NodeRef(3)]);
        let (s, _) = t.subtree(NodeRef(2));
        assert_eq!(s, OrderedTree::singleton());
    }

    #[test]
    fn plus_minus_examples() {
        assert!(OrderedTree::empty().plus().is_empty());
        assert!(OrderedTree::singleton().minus().is_empty());
        assert_eq!(OrderedTree::regular(2, 2).plus().size(), 5);
        for t in all_trees_up_to(6) {
            assert_eq!(t.plus().minus(), t, "tree {t}");
            assert_eq!(t.plus().canonical_code().len(), (t.size() + t.leaves().len()) * 2);
        }
    }

    #[test]
    fn canonical_code_examples() {
        assert_eq!(OrderedTree::empty().canonical_code(), "");
        assert_eq!(OrderedTree::singleton().canonical_code(), "()");
        assert_eq!(OrderedTree::regular(2, 2).canonical_code(), "(()())");
    }

    #[test]
    fn canonical_code_injective_small() {
        let trees = all_trees_up_to(6);
        for (i, a) in trees.iter().enumerate() {
            for b in trees.iter().skip(i + 1) {
                assert_ne!(a.canonical_code(), b.canonical_code());
            }
        }
    }

    #[test]
    fn tree_counts_are_catalan() {
        assert_eq!(all_trees_of_size(4).len(), 5);
        assert_eq!(all_trees_of_size(5).len(), 14);
        assert_eq!(bounded_trees(2, 3).len(), 14); // 13 shapes plus the empty tree
    }

    #[test]
    fn json_round_trip() {
        let t = OrderedTree::regular(2, 2);
        let js = serde_json::to_string(&t).unwrap();
        assert_eq!(js, r#"{"parent":[-1,0,0]}"#);
        let back: OrderedTree = serde_json::from_str(&js).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<OrderedTree>(r#"{"parent":[-1,2,1]}"#).is_err());
    }
}
