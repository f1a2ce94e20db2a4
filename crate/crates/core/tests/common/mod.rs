//! Brute-force oracles. They share no code with the library besides the
//! public `Tree`/`Graph` accessors used to convert outputs for comparison.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::Rng;
use treegen_core::{Graph, Tree};

/// A labeled tree with per-vertex weight and color.
#[derive(Clone, Debug)]
pub struct LTree {
    pub weight: Vec<u32>,
    pub color: Vec<u16>,
    pub adj: Vec<Vec<usize>>,
}

impl LTree {
    pub fn from_edges(weight: Vec<u32>, color: Vec<u16>, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); weight.len()];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        Self { weight, color, adj }
    }

    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Self {
        Self::from_edges(vec![1; n], vec![0; n], edges)
    }

    /// Preorder conversion of a library tree; vertex 0 is the root.
    pub fn from_tree(t: &Tree) -> Self {
        fn walk(t: &Tree, parent: Option<usize>, out: &mut LTree) {
            let v = out.weight.len();
            out.weight.push(t.weight());
            out.color.push(t.color().0);
            out.adj.push(Vec::new());
            if let Some(p) = parent {
                out.adj[v].push(p);
                out.adj[p].push(v);
            }
            for c in t.children() {
                walk(c, Some(v), out);
            }
        }
        let mut out = LTree { weight: Vec::new(), color: Vec::new(), adj: Vec::new() };
        walk(t, None, &mut out);
        out
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (a, ns) in self.adj.iter().enumerate() {
            e.extend(ns.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        e
    }

    /// AHU string of the tree rooted at `root`, children sorted as strings.
    pub fn rooted_code(&self, root: usize) -> String {
        self.code_below(root, usize::MAX)
    }

    fn code_below(&self, v: usize, parent: usize) -> String {
        let mut kids: Vec<String> =
            self.adj[v].iter().filter(|&&u| u != parent).map(|&u| self.code_below(u, v)).collect();
        kids.sort();
        format!("({},{}{})", self.weight[v], self.color[v], kids.concat())
    }

    /// Isomorphism invariant of the free tree: the least rooted code over all
    /// possible roots.
    pub fn free_code(&self) -> String {
        (0..self.len()).map(|r| self.rooted_code(r)).min().unwrap()
    }

    /// Same as [`LTree::free_code`] for unweighted single-color trees, but
    /// only tries the one or two centers.
    pub fn center_code(&self) -> String {
        centers(&self.adj).into_iter().map(|r| self.rooted_code(r)).min().unwrap()
    }

    /// `hs(v)` by deleting `v` and weighing every remaining component.
    pub fn naive_hs(&self) -> Vec<u32> {
        let n = self.len();
        (0..n)
            .map(|v| {
                let mut seen = vec![false; n];
                seen[v] = true;
                let mut best = 0;
                for &s in &self.adj[v] {
                    let mut sum = 0;
                    let mut stack = vec![s];
                    seen[s] = true;
                    while let Some(x) = stack.pop() {
                        sum += self.weight[x];
                        for &y in &self.adj[x] {
                            if !seen[y] {
                                seen[y] = true;
                                stack.push(y);
                            }
                        }
                    }
                    best = best.max(sum);
                }
                best
            })
            .collect()
    }

    /// Zero-weight vertices pairwise non-adjacent and every leaf positive.
    pub fn is_canonical(&self) -> bool {
        let n = self.len();
        (0..n).all(|v| {
            self.weight[v] > 0
                || (self.adj[v].len() >= 2 && self.adj[v].iter().all(|&u| self.weight[u] > 0))
                || n == 1
        }) && self.weight.iter().sum::<u32>() > 0
    }
}

/// Centers by repeated leaf removal.
fn centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &u in &adj[v] {
                degree[u] -= 1;
                if degree[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    layer
}

/// Labeled tree on `0..n` encoded by a Prüfer sequence.
pub fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Labeled tree number `k` in `0..n^(n-2)`.
fn labeled_tree(n: usize, mut k: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => {
            let seq: Vec<usize> = (0..n - 2)
                .map(|_| {
                    let s = k % n;
                    k /= n;
                    s
                })
                .collect();
            prufer_decode(&seq, n)
        }
    }
}

fn labeled_tree_count(n: usize) -> usize {
    if n < 2 {
        n
    } else {
        n.pow(n as u32 - 2)
    }
}

/// Every labeled tree on `n` vertices (via all Prüfer sequences).
pub fn labeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    (0..labeled_tree_count(n)).map(|k| labeled_tree(n, k)).collect()
}

/// Distinct unlabeled trees on `n` vertices, one labeled representative per
/// class, keyed by center code. Sequences are split across threads.
pub fn free_tree_catalogue(n: usize) -> HashMap<String, Vec<(usize, usize)>> {
    let total = labeled_tree_count(n);
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(total.max(1));
    let per = total.div_ceil(workers);
    let parts: Vec<HashMap<String, Vec<(usize, usize)>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|j| {
                s.spawn(move || {
                    let mut out = HashMap::new();
                    for k in j * per..((j + 1) * per).min(total) {
                        let edges = labeled_tree(n, k);
                        let code = LTree::unweighted(n, &edges).center_code();
                        out.entry(code).or_insert(edges);
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut out = HashMap::new();
    for part in parts {
        for (code, edges) in part {
            out.entry(code).or_insert(edges);
        }
    }
    out
}

/// Center codes of all unlabeled trees on `n` vertices.
pub fn prufer_free_codes(n: usize) -> HashSet<String> {
    free_tree_catalogue(n).into_keys().collect()
}

/// Rooted codes of all unlabeled rooted trees on `n` vertices, grown by
/// attaching one leaf at a time.
pub fn grown_rooted_codes(n: usize) -> HashSet<String> {
    // Parent arrays; vertex 0 is the root.
    let mut level: HashMap<String, Vec<usize>> = HashMap::new();
    level.insert(LTree::unweighted(1, &[]).rooted_code(0), vec![usize::MAX]);
    for size in 2..=n {
        let mut next = HashMap::new();
        for parents in level.values() {
            for v in 0..parents.len() {
                let mut p = parents.clone();
                p.push(v);
                let edges: Vec<(usize, usize)> = (1..size).map(|x| (p[x], x)).collect();
                next.entry(LTree::unweighted(size, &edges).rooted_code(0)).or_insert(p);
            }
        }
        level = next;
    }
    if n == 0 {
        return HashSet::new();
    }
    level.into_keys().collect()
}

/// Free codes of all positive-weighted trees of total weight `w`: every
/// unlabeled shape with every assignment of positive weights.
pub fn positive_weighted_codes(w: u32) -> HashSet<String> {
    let mut out = HashSet::new();
    for k in 1..=w as usize {
        for edges in free_tree_catalogue(k).into_values() {
            for weights in compositions(w, k) {
                out.insert(LTree::from_edges(weights, vec![0; k], &edges).free_code());
            }
        }
    }
    out
}

/// Ordered ways to write `w` as `k` positive parts.
pub fn compositions(w: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return if w == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=w {
        for mut rest in compositions(w - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Adjacency matrix of a small graph as bits, upper triangle row-major.
fn bits_under(g: &Graph, perm: &[usize]) -> u64 {
    let n = g.order();
    let mut code = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            code = (code << 1) | u64::from(g.has_edge(perm[i], perm[j]));
        }
    }
    code
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Isomorphism invariant: the largest adjacency code over all relabelings.
/// Practical for up to 8 vertices.
pub fn graph_code(g: &Graph) -> (usize, u64) {
    let mut perm: Vec<usize> = (0..g.order()).collect();
    let mut best = bits_under(g, &perm);
    while next_permutation(&mut perm) {
        best = best.max(bits_under(g, &perm));
    }
    (g.order(), best)
}

/// Maximal cliques of a block graph are its blocks; found by brute force.
fn maximal_cliques(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1 << n) {
        let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if vs.len() < 2 && n > 1 {
            continue;
        }
        let is_clique = vs.iter().all(|&a| vs.iter().all(|&b| a == b || g.has_edge(a, b)));
        if !is_clique {
            continue;
        }
        let maximal = (0..n).filter(|v| !vs.contains(v)).all(|x| !vs.iter().all(|&a| g.has_edge(a, x)));
        if maximal {
            cliques.push(vs);
        }
    }
    cliques
}

/// All connected block graphs on `n` vertices up to isomorphism, grown by
/// enlarging a block with a new vertex or attaching a pendant edge.
pub fn block_graphs(n: usize) -> Vec<Graph> {
    let mut level: BTreeSet<(usize, u64)> = BTreeSet::new();
    let mut reps: Vec<Graph> = vec![Graph::new(1)];
    level.insert(graph_code(&reps[0]));
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &reps {
            let mut candidates = Vec::new();
            for v in 0..g.order() {
                let mut h = grow(g);
                h.add_edge(v, size - 1).unwrap();
                candidates.push(h);
            }
            if g.order() > 1 {
                for clique in maximal_cliques(g) {
                    let mut h = grow(g);
                    for &v in &clique {
                        h.add_edge(v, size - 1).unwrap();
                    }
                    candidates.push(h);
                }
            }
            for h in candidates {
                if seen.insert(graph_code(&h)) {
                    next.push(h);
                }
            }
        }
        reps = next;
    }
    if n == 0 {
        Vec::new()
    } else {
        reps
    }
}

fn grow(g: &Graph) -> Graph {
    Graph::from_edges(g.order() + 1, g.edges()).unwrap()
}

/// Uniform labeled tree on `n` vertices.
pub fn random_labeled_tree(rng: &mut impl Rng, n: usize) -> Vec<(usize, usize)> {
    match n {
        1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => {
            let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
            prufer_decode(&seq, n)
        }
    }
}

/// Builds a library tree from a labeled tree rooted at `root`.
pub fn to_tree(t: &LTree, root: usize) -> Tree {
    fn build(t: &LTree, v: usize, parent: usize) -> Tree {
        let kids: Vec<Tree> = t.adj[v].iter().filter(|&&u| u != parent).map(|&u| build(t, u, v)).collect();
        Tree::new(t.weight[v], treegen_core::ColorId(t.color[v]), kids)
    }
    build(t, root, usize::MAX)
}
