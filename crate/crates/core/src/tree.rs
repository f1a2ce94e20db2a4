//! Unlabeled, unordered rooted trees whose vertices carry a weight and a
//! color.
//!
//! Children are always stored in descending [`Ord`] order, so two trees are
//! isomorphic as colored weighted rooted trees exactly when they compare
//! equal. The ordering compares subtree weight first, then root weight, root
//! color and finally the children sequences lexicographically; it coincides
//! with the byte order of [`Tree::canonical_code`].

use std::fmt::Write as _;
use std::sync::Arc;

use crate::scheme::{ColorId, ColorScheme};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    // Field order defines the derived ordering; keep `total` first.
    total: u32,
    weight: u32,
    color: ColorId,
    children: Vec<Arc<Tree>>,
}

impl Tree {
    pub fn leaf(weight: u32, color: ColorId) -> Self {
        Self { total: weight, weight, color, children: Vec::new() }
    }

    /// Builds a tree from a root and arbitrary children; children are sorted.
    pub fn new<C>(weight: u32, color: ColorId, children: impl IntoIterator<Item = C>) -> Self
    where
        C: Into<Arc<Tree>>,
    {
        let mut children: Vec<Arc<Tree>> = children.into_iter().map(Into::into).collect();
        children.sort_unstable_by(|a, b| b.cmp(a));
        Self::from_sorted(weight, color, children)
    }

    /// `children` must already be in descending order.
    pub(crate) fn from_sorted(weight: u32, color: ColorId, children: Vec<Arc<Tree>>) -> Self {
        debug_assert!(children.windows(2).all(|w| w[0] >= w[1]));
        let total = weight + children.iter().map(|c| c.total).sum::<u32>();
        Self { total, weight, color, children }
    }

    /// Returns a copy with one more child attached to the root.
    pub fn with_child(&self, child: impl Into<Arc<Tree>>) -> Self {
        let child = child.into();
        let mut children = self.children.clone();
        let at = children.partition_point(|c| **c > *child);
        children.insert(at, child);
        Self::from_sorted(self.weight, self.color, children)
    }

    /// Returns a copy with the `index`-th child detached.
    pub fn without_child(&self, index: usize) -> Self {
        let mut children = self.children.clone();
        children.remove(index);
        Self::from_sorted(self.weight, self.color, children)
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.weight
    }

    #[inline]
    pub fn color(&self) -> ColorId {
        self.color
    }

    /// Sum of all vertex weights.
    #[inline]
    pub fn total_weight(&self) -> u32 {
        self.total
    }

    #[inline]
    pub fn children(&self) -> &[Arc<Tree>] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.vertex_count()).sum::<usize>()
    }

    /// Vertices in preorder as `(depth, weight, color)`.
    pub fn preorder(&self) -> Vec<(usize, u32, ColorId)> {
        fn walk(t: &Tree, depth: usize, out: &mut Vec<(usize, u32, ColorId)>) {
            out.push((depth, t.weight, t.color));
            for c in &t.children {
                walk(c, depth + 1, out);
            }
        }
        let mut out = Vec::new();
        walk(self, 0, &mut out);
        out
    }

    /// AHU-style serialization: `total`, `weight` (big-endian u32), `color`
    /// (big-endian u16), then `0x01 <child code>` per child and a closing
    /// `0x00`. Equal codes mean isomorphic trees; the byte order of codes is
    /// the order of [`Tree`].
    pub fn canonical_code(&self) -> Vec<u8> {
        fn walk(t: &Tree, out: &mut Vec<u8>) {
            out.extend_from_slice(&t.total.to_be_bytes());
            out.extend_from_slice(&t.weight.to_be_bytes());
            out.extend_from_slice(&t.color.0.to_be_bytes());
            for c in &t.children {
                out.push(1);
                walk(c, out);
            }
            out.push(0);
        }
        let mut out = Vec::with_capacity(16 * self.vertex_count());
        walk(self, &mut out);
        out
    }

    /// One-line text form: preorder `depth:weight:color` tokens joined by
    /// single spaces.
    pub fn to_text(&self, scheme: &ColorScheme) -> String {
        let mut out = String::new();
        for (i, (depth, weight, color)) in self.preorder().into_iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{depth}:{weight}:{}", scheme.name(color)).unwrap();
        }
        out
    }

    /// Parses the format written by [`Tree::to_text`]. Children may appear in
    /// any order; the result is normalized.
    pub fn parse_text(line: &str, scheme: &ColorScheme) -> Result<Tree> {
        let mut tokens = Vec::new();
        for tok in line.split_whitespace() {
            let mut parts = tok.splitn(3, ':');
            let (Some(d), Some(w), Some(c)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("bad vertex token {tok:?}")));
            };
            let depth: usize = d.parse().map_err(|_| Error::Parse(format!("bad depth in {tok:?}")))?;
            let weight: u32 = w.parse().map_err(|_| Error::Parse(format!("bad weight in {tok:?}")))?;
            let color = scheme
                .color_by_name(c)
                .ok_or_else(|| Error::Parse(format!("unknown color {c:?}")))?;
            tokens.push((depth, weight, color));
        }
        if tokens.is_empty() {
            return Err(Error::Parse("empty tree".into()));
        }
        if tokens[0].0 != 0 {
            return Err(Error::Parse("the first vertex must have depth 0".into()));
        }
        // Stack of partially built vertices along the current root path.
        let mut stack: Vec<(u32, ColorId, Vec<Arc<Tree>>)> = Vec::new();
        let close = |stack: &mut Vec<(u32, ColorId, Vec<Arc<Tree>>)>| {
            let (w, c, ch) = stack.pop().expect("non-empty stack");
            let t = Arc::new(Tree::new(w, c, ch));
            if let Some(parent) = stack.last_mut() {
                parent.2.push(t);
                None
            } else {
                Some(t)
            }
        };
        for (i, &(depth, weight, color)) in tokens.iter().enumerate() {
            if i > 0 && depth == 0 {
                return Err(Error::Parse("more than one root".into()));
            }
            if depth > stack.len() {
                return Err(Error::Parse(format!("vertex {i} skips a depth level")));
            }
            while stack.len() > depth {
                close(&mut stack);
            }
            stack.push((weight, color, Vec::new()));
        }
        let mut root = None;
        while !stack.is_empty() {
            root = close(&mut stack);
        }
        let root = root.expect("root closes last");
        Ok(Arc::try_unwrap(root).unwrap_or_else(|a| (*a).clone()))
    }
}

/// A multiset of rooted trees, kept in descending order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Forest {
    trees: Vec<Arc<Tree>>,
}

impl Forest {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<C: Into<Arc<Tree>>>(trees: impl IntoIterator<Item = C>) -> Self {
        let mut trees: Vec<Arc<Tree>> = trees.into_iter().map(Into::into).collect();
        trees.sort_unstable_by(|a, b| b.cmp(a));
        Self { trees }
    }

    pub(crate) fn from_sorted(trees: Vec<Arc<Tree>>) -> Self {
        debug_assert!(trees.windows(2).all(|w| w[0] >= w[1]));
        Self { trees }
    }

    pub fn trees(&self) -> &[Arc<Tree>] {
        &self.trees
    }

    pub fn into_trees(self) -> Vec<Arc<Tree>> {
        self.trees
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn total_weight(&self) -> u32 {
        self.trees.iter().map(|t| t.total).sum()
    }

    /// Weight of a heaviest tree, 0 for the empty forest.
    pub fn largest(&self) -> u32 {
        self.trees.first().map_or(0, |t| t.total)
    }

    /// Number of trees attaining [`Forest::largest`].
    pub fn multiplicity(&self) -> u32 {
        let m = self.largest();
        self.trees.iter().take_while(|t| t.total == m).count() as u32
    }

    /// Sorted, deduplicated root colors.
    pub fn color_set(&self) -> Vec<ColorId> {
        let mut cs: Vec<ColorId> = self.trees.iter().map(|t| t.color).collect();
        cs.sort();
        cs.dedup();
        cs
    }

    /// Attaches every tree of the forest to a new root.
    pub fn into_tree(self, weight: u32, color: ColorId) -> Tree {
        Tree::from_sorted(weight, color, self.trees)
    }

    pub fn to_text(&self, scheme: &ColorScheme) -> String {
        self.trees
            .iter()
            .map(|t| t.to_text(scheme))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// First violated constraint found by [`check_canonical`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ZeroTotalWeight,
    UnknownColor { vertex: usize },
    WeightOutOfRange { vertex: usize, weight: u32 },
    ChildColor { vertex: usize },
    SubtreeTooLight { vertex: usize, weight: u32, min: u32 },
    AdjacentZeroWeights { vertex: usize },
    ZeroWeightLeaf { vertex: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ZeroTotalWeight => write!(f, "total weight is zero"),
            Violation::UnknownColor { vertex } => write!(f, "vertex {vertex} has an unknown color"),
            Violation::WeightOutOfRange { vertex, weight } => {
                write!(f, "vertex {vertex} has weight {weight} outside its color's range")
            }
            Violation::ChildColor { vertex } => {
                write!(f, "vertex {vertex} does not have its parent's child color")
            }
            Violation::SubtreeTooLight { vertex, weight, min } => {
                write!(f, "subtree at vertex {vertex} weighs {weight}, below the minimum {min}")
            }
            Violation::AdjacentZeroWeights { vertex } => write!(
                f,
                "vertex {vertex} and its parent both weigh 0; zero-weight vertices must form an independent set"
            ),
            Violation::ZeroWeightLeaf { vertex } => write!(f, "leaf vertex {vertex} has weight 0"),
        }
    }
}

/// Checks canonicity (zero-weight vertices independent, no zero-weight leaf,
/// where the root counts as a leaf when it has a single child) together with
/// conformance to `scheme`. Vertices are numbered in preorder.
pub fn check_canonical(t: &Tree, scheme: &ColorScheme) -> std::result::Result<(), Violation> {
    if t.total == 0 {
        return Err(Violation::ZeroTotalWeight);
    }
    fn walk(
        t: &Tree,
        parent: Option<&Tree>,
        scheme: &ColorScheme,
        next: &mut usize,
    ) -> std::result::Result<(), Violation> {
        let vertex = *next;
        *next += 1;
        if t.color.index() >= scheme.len() {
            return Err(Violation::UnknownColor { vertex });
        }
        let spec = scheme.color(t.color);
        if t.weight < spec.min_weight || spec.max_weight.is_some_and(|m| t.weight > m) {
            return Err(Violation::WeightOutOfRange { vertex, weight: t.weight });
        }
        if let Some(p) = parent {
            if scheme.child(p.color) != t.color {
                return Err(Violation::ChildColor { vertex });
            }
            if p.weight == 0 && t.weight == 0 {
                return Err(Violation::AdjacentZeroWeights { vertex });
            }
        }
        if t.total < spec.min_tree_weight {
            return Err(Violation::SubtreeTooLight { vertex, weight: t.total, min: spec.min_tree_weight });
        }
        let degree = t.children.len() + usize::from(parent.is_some());
        if t.weight == 0 && degree <= 1 {
            return Err(Violation::ZeroWeightLeaf { vertex });
        }
        for c in &t.children {
            walk(c, Some(t), scheme, next)?;
        }
        Ok(())
    }
    let mut next = 0;
    walk(t, None, scheme, &mut next)
}

pub fn is_canonical(t: &Tree, scheme: &ColorScheme) -> bool {
    check_canonical(t, scheme).is_ok()
}

/// Contracts every connected group of zero-weight vertices into one vertex
/// and drops zero-weight leaves. The result is rooted at the image of the
/// original root, or at its neighbor if the root itself was dropped.
pub fn canonicalize_weighted(t: &Tree) -> Result<Tree> {
    if t.total == 0 {
        return Err(Error::Argument("cannot canonicalize a tree of total weight 0".into()));
    }
    let flat = Flat::from_tree(t);
    let n = flat.len();
    // Representative of each vertex: topmost vertex of its zero-weight group.
    let mut rep: Vec<usize> = (0..n).collect();
    for v in 1..n {
        let p = flat.parent[v].expect("non-root has a parent");
        if flat.weight[v] == 0 && flat.weight[p] == 0 {
            rep[v] = rep[p];
        }
    }
    let mut edges = Vec::new();
    for v in 1..n {
        let p = flat.parent[v].unwrap();
        if rep[v] != rep[p] {
            edges.push((rep[p], rep[v]));
        }
    }
    let mut degree = vec![0usize; n];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let alive: Vec<bool> = (0..n)
        .map(|v| rep[v] == v && !(flat.weight[v] == 0 && degree[v] <= 1))
        .collect();
    let root = if alive[0] {
        0
    } else {
        edges
            .iter()
            .find_map(|&(a, b)| if a == 0 { Some(b) } else if b == 0 { Some(a) } else { None })
            .expect("a dropped root has one neighbor")
    };
    let mut index = vec![usize::MAX; n];
    let mut weights = Vec::new();
    let mut colors = Vec::new();
    for v in 0..n {
        if alive[v] {
            index[v] = weights.len();
            weights.push(flat.weight[v]);
            colors.push(flat.color[v]);
        }
    }
    let kept: Vec<(usize, usize)> = edges
        .iter()
        .filter(|(a, b)| alive[*a] && alive[*b])
        .map(|&(a, b)| (index[a], index[b]))
        .collect();
    Ok(Flat::from_edges(weights, colors, &kept).rooted_at(index[root]))
}

/// Array form of a tree, used for traversals that ignore the rooting.
#[derive(Clone, Debug)]
pub(crate) struct Flat {
    pub weight: Vec<u32>,
    pub color: Vec<ColorId>,
    /// Parent in the original rooting (preorder numbering from a `Tree`).
    pub parent: Vec<Option<usize>>,
    pub adj: Vec<Vec<usize>>,
}

impl Flat {
    pub fn from_tree(t: &Tree) -> Self {
        let mut flat = Flat { weight: Vec::new(), color: Vec::new(), parent: Vec::new(), adj: Vec::new() };
        fn walk(t: &Tree, parent: Option<usize>, flat: &mut Flat) {
            let v = flat.weight.len();
            flat.weight.push(t.weight);
            flat.color.push(t.color);
            flat.parent.push(parent);
            flat.adj.push(Vec::with_capacity(t.children.len() + 1));
            if let Some(p) = parent {
                flat.adj[v].push(p);
                flat.adj[p].push(v);
            }
            for c in &t.children {
                walk(c, Some(v), flat);
            }
        }
        walk(t, None, &mut flat);
        flat
    }

    /// `edges` must form a tree on the given vertices.
    pub fn from_edges(weight: Vec<u32>, color: Vec<ColorId>, edges: &[(usize, usize)]) -> Self {
        let n = weight.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        if n > 0 {
            seen[0] = true;
        }
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    stack.push(u);
                }
            }
        }
        Flat { weight, color, parent, adj }
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn total(&self) -> u32 {
        self.weight.iter().sum()
    }

    pub fn rooted_at(&self, root: usize) -> Tree {
        self.rooted_away_from(root, None)
    }

    /// Subtree containing `root` after deleting the edge to `blocked`.
    pub fn rooted_away_from(&self, root: usize, blocked: Option<usize>) -> Tree {
        let children: Vec<Arc<Tree>> = self.adj[root]
            .iter()
            .filter(|&&u| Some(u) != blocked)
            .map(|&u| Arc::new(self.rooted_away_from(u, Some(root))))
            .collect();
        Tree::new(self.weight[root], self.color[root], children)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: ColorId = ColorId(0);

    fn star(n: usize) -> Tree {
        Tree::new(1, G, (1..n).map(|_| Tree::leaf(1, G)))
    }

    fn path(weights: &[u32]) -> Tree {
        let mut t = Tree::leaf(*weights.last().unwrap(), G);
        for &w in weights.iter().rev().skip(1) {
            t = Tree::new(w, G, [t]);
        }
        t
    }

    #[test]
    fn total_weight_examples() {
        assert_eq!(Tree::leaf(5, G).total_weight(), 5);
        assert_eq!(Forest::empty().total_weight(), 0);
        assert_eq!(path(&[2, 0, 3]).total_weight(), 5);
    }

    #[test]
    fn codes_identify_isomorphism() {
        assert_eq!(Tree::leaf(3, G).canonical_code(), Tree::leaf(3, G).canonical_code());
        let a = Tree::new(1, G, [Tree::leaf(1, G), path(&[1, 1])]);
        let b = Tree::new(1, G, [path(&[1, 1]), Tree::leaf(1, G)]);
        assert_eq!(a, b);
        assert_eq!(a.canonical_code(), b.canonical_code());
        // path on 3 vertices rooted at an end vs. at the middle
        assert_ne!(path(&[1, 1, 1]).canonical_code(), star(3).canonical_code());
    }

    #[test]
    fn code_order_matches_tree_order() {
        let trees = [
            Tree::leaf(1, G),
            Tree::leaf(2, G),
            star(3),
            path(&[1, 1, 1]),
            path(&[1, 2]),
            path(&[2, 1]),
            Tree::new(0, G, [Tree::leaf(1, G), Tree::leaf(2, G)]),
            Tree::leaf(1, ColorId(1)),
        ];
        for a in &trees {
            for b in &trees {
                assert_eq!(a.cmp(b), a.canonical_code().cmp(&b.canonical_code()), "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn text_format() {
        let gray = ColorScheme::gray();
        assert_eq!(star(3).to_text(&gray), "0:1:Gray 1:1:Gray 1:1:Gray");
        let t = Tree::new(1, G, [Tree::leaf(1, G), path(&[1, 1])]);
        let text = t.to_text(&gray);
        assert_eq!(text, "0:1:Gray 1:1:Gray 2:1:Gray 1:1:Gray");
        assert_eq!(Tree::parse_text(&text, &gray).unwrap(), t);
        // children in non-canonical order are accepted
        let shuffled = Tree::parse_text("0:1:Gray 1:1:Gray 1:1:Gray 2:1:Gray", &gray).unwrap();
        assert_eq!(shuffled, t);
    }

    #[test]
    fn text_parse_errors() {
        let gray = ColorScheme::gray();
        for bad in ["", "1:1:Gray", "0:1:Gray 2:1:Gray", "0:1:Red", "0:x:Gray", "0:1", "0:1:Gray 0:1:Gray"] {
            assert!(Tree::parse_text(bad, &gray).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn forest_accessors() {
        let f = Forest::new([Tree::leaf(1, G), path(&[1, 1]), path(&[1, 1])]);
        assert_eq!(f.largest(), 2);
        assert_eq!(f.multiplicity(), 2);
        assert_eq!(f.total_weight(), 5);
        assert_eq!(f.color_set(), vec![G]);
        assert_eq!(Forest::empty().multiplicity(), 0);
    }

    #[test]
    fn canonicalize_examples() {
        // chain 0-0-3 -> 0-3 -> single vertex 3
        assert_eq!(canonicalize_weighted(&path(&[0, 0, 3])).unwrap(), Tree::leaf(3, G));
        // star with center 2 and leaves {0, 1}
        let t = Tree::new(2, G, [Tree::leaf(0, G), Tree::leaf(1, G)]);
        assert_eq!(canonicalize_weighted(&t).unwrap(), path(&[2, 1]));
        // already canonical
        let c = Tree::new(0, G, [Tree::leaf(1, G), Tree::leaf(2, G)]);
        assert_eq!(canonicalize_weighted(&c).unwrap(), c);
        assert!(canonicalize_weighted(&Tree::leaf(0, G)).is_err());
    }

    #[test]
    fn canonical_checks() {
        let pos = ColorScheme::parse("W 0 inf 1 W2\nW2 1 inf 1 W\n").unwrap();
        let w = ColorId(0);
        let w2 = ColorId(1);
        let ok = Tree::new(0, w, [Tree::leaf(1, w2), Tree::leaf(1, w2)]);
        assert_eq!(check_canonical(&ok, &pos), Ok(()));
        let zero_leaf_root = Tree::new(0, w, [Tree::leaf(1, w2)]);
        assert_eq!(check_canonical(&zero_leaf_root, &pos), Err(Violation::ZeroWeightLeaf { vertex: 0 }));
        let gray = ColorScheme::gray();
        assert!(matches!(check_canonical(&Tree::leaf(2, G), &gray), Err(Violation::WeightOutOfRange { .. })));

        let free_weights = ColorScheme::parse("A 0 inf 1 A2\nA2 0 inf 1 A\n");
        assert!(free_weights.is_err());

        let block = ColorScheme::block();
        let red = crate::scheme::BLOCK;
        let yellow = crate::scheme::CUT;
        // Yellow subtree of weight 1 violates mintw = 2.
        let t = Tree::new(1, red, [Tree::leaf(1, yellow)]);
        assert!(matches!(
            check_canonical(&t, &block),
            Err(Violation::SubtreeTooLight { vertex: 1, weight: 1, min: 2 })
        ));
        let adjacent = Tree::new(0, red, [Tree::new(0, red, [Tree::leaf(1, red)])]);
        assert!(!is_canonical(&adjacent, &block));
    }
}
