//! Connected block graphs (every block a clique) and their weighted block
//! trees.
//!
//! A weighted block tree uses the colors of [`ColorScheme::block`]: a
//! [`BLOCK`] vertex per block, weighted by the block's non-cut vertices, and a
//! [`CUT`] vertex of weight 1 per cut vertex. The two maps below are mutually
//! inverse up to isomorphism.

use std::fmt::Write as _;

use crate::centroid::centroid_rooted_flat;
use crate::scheme::{ColorScheme, BLOCK, CUT};
use crate::tree::{check_canonical, Flat, Tree};
use crate::{Error, Result};

/// Simple undirected graph on `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list; loops and out-of-range endpoints
    /// are rejected, repeated edges collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.adj.len();
        if u >= n || v >= n {
            return Err(Error::Argument(format!("edge {u}-{v} leaves the vertex range 0..{n}")));
        }
        if u == v {
            return Err(Error::Argument(format!("loop at vertex {u}")));
        }
        if let Err(at) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(at, v);
            let at = self.adj[v].binary_search(&u).unwrap_err();
            self.adj[v].insert(at, u);
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn size(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.size());
        for (u, ns) in self.adj.iter().enumerate() {
            out.extend(ns.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.order();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    /// Standard graph6 encoding, without a trailing newline.
    pub fn to_graph6(&self) -> String {
        let n = self.order();
        let mut out = Vec::new();
        if n <= 62 {
            out.push(n as u8 + 63);
        } else if n <= 258_047 {
            out.push(126);
            for shift in [12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        } else {
            out.extend([126, 126]);
            for shift in [30, 24, 18, 12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        }
        let (mut acc, mut filled) = (0u8, 0);
        for j in 1..n {
            for i in 0..j {
                acc = (acc << 1) | u8::from(self.has_edge(i, j));
                filled += 1;
                if filled == 6 {
                    out.push(acc + 63);
                    (acc, filled) = (0, 0);
                }
            }
        }
        if filled > 0 {
            out.push((acc << (6 - filled)) + 63);
        }
        String::from_utf8(out).expect("graph6 is printable ASCII")
    }

    pub fn from_graph6(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid graph6 string {text:?}"));
        let bytes: Vec<u8> = text.trim().bytes().collect();
        if bytes.iter().any(|&b| !(63..=126).contains(&b)) {
            return Err(bad());
        }
        let digits = |s: &[u8]| s.iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
        let (n, body) = match bytes.as_slice() {
            [126, 126, rest @ ..] if rest.len() >= 6 => (digits(&rest[..6]), &rest[6..]),
            [126, rest @ ..] if rest.len() >= 3 => (digits(&rest[..3]), &rest[3..]),
            [b, rest @ ..] if *b != 126 => ((*b - 63) as usize, rest),
            _ => return Err(bad()),
        };
        let bits = n * n.saturating_sub(1) / 2;
        if body.len() != bits.div_ceil(6) {
            return Err(bad());
        }
        let mut g = Graph::new(n);
        let mut k = 0;
        for j in 1..n {
            for i in 0..j {
                if (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1 {
                    g.add_edge(i, j)?;
                }
                k += 1;
            }
        }
        Ok(g)
    }

    /// One `u v` line per edge, zero-based.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.order() {
            writeln!(out, "  {v};").unwrap();
        }
        for (u, v) in self.edges() {
            writeln!(out, "  {u} -- {v};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Vertex sets of the blocks (maximal biconnected subgraphs), each sorted.
/// An isolated vertex forms a block of its own.
pub fn blocks(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut out = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for s in 0..n {
        if disc[s] != usize::MAX {
            continue;
        }
        if g.adj[s].is_empty() {
            out.push(vec![s]);
            disc[s] = time;
            time += 1;
            continue;
        }
        disc[s] = time;
        low[s] = time;
        time += 1;
        // Frames: (vertex, parent, next neighbor position).
        let mut frames = vec![(s, usize::MAX, 0usize)];
        while let Some(frame) = frames.last_mut() {
            let (v, parent) = (frame.0, frame.1);
            if frame.2 < g.adj[v].len() {
                let u = g.adj[v][frame.2];
                frame.2 += 1;
                if disc[u] == usize::MAX {
                    edges.push((v, u));
                    disc[u] = time;
                    low[u] = time;
                    time += 1;
                    frames.push((u, v, 0));
                } else if u != parent && disc[u] < disc[v] {
                    edges.push((v, u));
                    low[v] = low[v].min(disc[u]);
                }
                continue;
            }
            frames.pop();
            if parent == usize::MAX {
                continue;
            }
            low[parent] = low[parent].min(low[v]);
            if low[v] >= disc[parent] {
                let mut block = Vec::new();
                while let Some((a, b)) = edges.pop() {
                    block.push(a);
                    block.push(b);
                    if (a, b) == (parent, v) {
                        break;
                    }
                }
                block.sort_unstable();
                block.dedup();
                out.push(block);
            }
        }
    }
    out
}

/// Vertices lying in at least two blocks.
pub fn cut_vertices(g: &Graph) -> Vec<usize> {
    let mut count = vec![0usize; g.order()];
    for b in blocks(g) {
        for v in b {
            count[v] += 1;
        }
    }
    (0..g.order()).filter(|&v| count[v] >= 2).collect()
}

/// Connected and every block induces a clique.
pub fn is_block_graph(g: &Graph) -> bool {
    g.is_connected() && blocks(g).iter().all(|b| is_clique(g, b))
}

fn is_clique(g: &Graph, vs: &[usize]) -> bool {
    vs.iter().all(|&v| vs.iter().filter(|&&u| g.has_edge(v, u)).count() == vs.len() - 1)
}

/// The weighted block tree of a block graph, rooted at its central
/// centroid. Graphs with a non-clique block are rejected since their block
/// tree does not determine them.
pub fn graph_to_block_tree(g: &Graph) -> Result<Tree> {
    if g.order() == 0 {
        return Err(Error::Argument("the graph has no vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Argument("the graph is not connected".into()));
    }
    let blocks = blocks(g);
    if !blocks.iter().all(|b| is_clique(g, b)) {
        return Err(Error::Argument("the graph has a block that is not a clique".into()));
    }
    let mut membership = vec![0usize; g.order()];
    for b in &blocks {
        for &v in b {
            membership[v] += 1;
        }
    }
    let cuts: Vec<usize> = (0..g.order()).filter(|&v| membership[v] >= 2).collect();
    let mut cut_index = vec![usize::MAX; g.order()];
    for (k, &v) in cuts.iter().enumerate() {
        cut_index[v] = blocks.len() + k;
    }
    let mut weights = Vec::with_capacity(blocks.len() + cuts.len());
    let mut colors = Vec::with_capacity(weights.capacity());
    let mut edges = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let in_cut = b.iter().filter(|&&v| membership[v] >= 2).count();
        weights.push((b.len() - in_cut) as u32);
        colors.push(BLOCK);
        edges.extend(b.iter().filter(|&&v| membership[v] >= 2).map(|&v| (i, cut_index[v])));
    }
    for _ in &cuts {
        weights.push(1);
        colors.push(CUT);
    }
    Ok(centroid_rooted_flat(&Flat::from_edges(weights, colors, &edges)))
}

/// Checks that `t` is a weighted block tree: canonical under the block
/// scheme and every cut vertex joins at least two blocks.
pub fn check_block_tree(t: &Tree) -> Result<()> {
    check_canonical(t, &ColorScheme::block()).map_err(|v| Error::Argument(format!("not a block tree: {v}")))?;
    let flat = Flat::from_tree(t);
    if let Some(v) = (0..flat.len()).find(|&v| flat.color[v] == CUT && flat.adj[v].len() < 2) {
        return Err(Error::Argument(format!("not a block tree: cut vertex {v} touches fewer than two blocks")));
    }
    Ok(())
}

/// The block graph of a weighted block tree. Cliques are allocated in
/// preorder; each cut vertex merges the first unclaimed vertex of every
/// adjacent clique into the smallest of them.
pub fn block_tree_to_graph(t: &Tree) -> Result<Graph> {
    check_block_tree(t)?;
    let flat = Flat::from_tree(t);
    let mut start = vec![0usize; flat.len()];
    let mut claimed = vec![0usize; flat.len()];
    let mut total = 0;
    for v in 0..flat.len() {
        if flat.color[v] == BLOCK {
            start[v] = total;
            total += flat.weight[v] as usize + flat.adj[v].len();
        }
    }
    let mut image: Vec<usize> = (0..total).collect();
    for v in 0..flat.len() {
        if flat.color[v] != CUT {
            continue;
        }
        let picks: Vec<usize> = flat.adj[v]
            .iter()
            .map(|&b| {
                let x = start[b] + claimed[b];
                claimed[b] += 1;
                x
            })
            .collect();
        let target = *picks.iter().min().expect("cut vertices have neighbors");
        for x in picks {
            image[x] = target;
        }
    }
    // Compact relabeling, in increasing order of the surviving indices.
    let mut label = vec![usize::MAX; total];
    let mut n = 0;
    for x in 0..total {
        if image[x] == x {
            label[x] = n;
            n += 1;
        }
    }
    let mut g = Graph::new(n);
    for v in 0..flat.len() {
        if flat.color[v] != BLOCK {
            continue;
        }
        let size = flat.weight[v] as usize + flat.adj[v].len();
        let members: Vec<usize> = (start[v]..start[v] + size).map(|x| label[image[x]]).collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                g.add_edge(a, b)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centroid::{centroids, CentroidCase};

    fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    /// Three triangles joined through a bridge: {0,1,2}, 2-3 bridge,
    /// {3,4,5}, {5,6,7}.
    fn fig3_graph() -> Graph {
        Graph::from_edges(8, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5), (5, 6), (5, 7), (6, 7)]).unwrap()
    }

    fn fig3_tree() -> Tree {
        let mut t = Tree::leaf(2, BLOCK);
        for (w, c) in [(1, CUT), (1, BLOCK), (1, CUT), (0, BLOCK), (1, CUT), (2, BLOCK)] {
            t = Tree::new(w, c, [t]);
        }
        t
    }

    #[test]
    fn graph6_known_strings() {
        assert_eq!(complete(2).to_graph6(), "A_");
        assert_eq!(complete(1).to_graph6(), "@");
        assert_eq!(path3().to_graph6(), "Bg");
        assert_eq!(complete(4).to_graph6(), "C~");
        for g in [complete(5), path3(), fig3_graph(), complete(70)] {
            assert_eq!(Graph::from_graph6(&g.to_graph6()).unwrap(), g);
        }
        assert!(Graph::from_graph6("A").is_err());
    }

    #[test]
    fn text_outputs() {
        assert_eq!(path3().to_edge_list(), "0 1\n1 2\n");
        assert_eq!(complete(2).to_dot(), "graph G {\n  0;\n  1;\n  0 -- 1;\n}\n");
    }

    #[test]
    fn blocks_of_small_graphs() {
        assert_eq!(blocks(&complete(1)), vec![vec![0]]);
        assert_eq!(blocks(&complete(4)), vec![vec![0, 1, 2, 3]]);
        let mut b = blocks(&fig3_graph());
        b.sort();
        assert_eq!(b, vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![5, 6, 7]]);
        assert_eq!(cut_vertices(&fig3_graph()), vec![2, 3, 5]);
    }

    #[test]
    fn block_graph_recognition() {
        assert!(is_block_graph(&complete(5)));
        assert!(is_block_graph(&fig3_graph()));
        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(!is_block_graph(&c4));
        assert!(!is_block_graph(&Graph::new(2)));
    }

    #[test]
    fn tree_to_graph_examples() {
        assert_eq!(block_tree_to_graph(&Tree::leaf(5, BLOCK)).unwrap(), complete(5));
        let p = Tree::new(1, BLOCK, [Tree::new(1, CUT, [Tree::leaf(1, BLOCK)])]);
        let g = block_tree_to_graph(&p).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.size(), 2);
        assert!(is_block_graph(&g));
        let g = block_tree_to_graph(&fig3_tree()).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.size(), 10);
        assert!(is_block_graph(&g));
        assert_eq!(graph_to_block_tree(&g).unwrap(), graph_to_block_tree(&fig3_graph()).unwrap());
    }

    #[test]
    fn graph_to_tree_examples() {
        assert_eq!(graph_to_block_tree(&complete(5)).unwrap(), Tree::leaf(5, BLOCK));
        assert_eq!(graph_to_block_tree(&complete(1)).unwrap(), Tree::leaf(1, BLOCK));
        let expected = Tree::new(1, CUT, [Tree::leaf(1, BLOCK), Tree::leaf(1, BLOCK)]);
        assert_eq!(graph_to_block_tree(&path3()).unwrap(), expected);
        let t = graph_to_block_tree(&fig3_graph()).unwrap();
        assert_eq!(t.total_weight(), 8);
        let r = centroids(&t).unwrap();
        assert_eq!(r.case, Some(CentroidCase::Bi));
        assert!(graph_to_block_tree(&Graph::new(2)).is_err());
        assert!(graph_to_block_tree(&Graph::new(0)).is_err());
    }

    #[test]
    fn invalid_block_trees() {
        // Cut vertex with a single block.
        let t = Tree::new(1, CUT, [Tree::leaf(1, BLOCK)]);
        assert!(block_tree_to_graph(&t).is_err());
        // Adjacent blocks.
        let t = Tree::new(1, BLOCK, [Tree::leaf(1, BLOCK)]);
        assert!(block_tree_to_graph(&t).is_err());
    }
}
