//! Centroids of weighted trees.
//!
//! `hs(v)` is the largest total weight among the components of `T - v`; the
//! centroids are the minimizers of `hs`. They always lie on a path, and a
//! canonical weighted tree has at most three of them.

use crate::tree::{Flat, Tree};
use crate::{Error, Result};

/// Shape of the centroid set of a canonical tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CentroidCase {
    Mono,
    Bi,
    /// Three centroids; the middle one has weight 0.
    Tri,
}

/// Centroid data for a tree viewed as a free tree. Vertices are numbered in
/// preorder of the input tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentroidReport {
    pub hs: Vec<u32>,
    /// All centroids, in path order.
    pub path: Vec<usize>,
    /// The center (one or two vertices) of `path`.
    pub central: Vec<usize>,
    /// `None` when there are more than three centroids, which is impossible
    /// for canonical trees.
    pub case: Option<CentroidCase>,
}

pub fn centroids(t: &Tree) -> Result<CentroidReport> {
    if t.total_weight() == 0 {
        return Err(Error::Argument("centroids need a positive total weight".into()));
    }
    Ok(report(&Flat::from_tree(t)))
}

pub(crate) fn report(flat: &Flat) -> CentroidReport {
    let hs = heaviest_subtrees(flat);
    let best = *hs.iter().min().expect("non-empty tree");
    let is_min: Vec<bool> = hs.iter().map(|&h| h == best).collect();
    let members: Vec<usize> = (0..flat.len()).filter(|&v| is_min[v]).collect();
    let inner_degree = |v: usize| flat.adj[v].iter().filter(|&&u| is_min[u]).count();

    // Walk the path from an endpoint; fall back to index order if the set is
    // not a path so that callers can detect it.
    let start = members.iter().copied().find(|&v| inner_degree(v) <= 1).unwrap_or(members[0]);
    let mut path = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&next) = flat.adj[cur].iter().find(|&&u| is_min[u] && u != prev) {
        if path.contains(&next) {
            break;
        }
        path.push(next);
        prev = cur;
        cur = next;
    }
    if path.len() != members.len() {
        path = members;
    }

    let k = path.len();
    let central = if k % 2 == 1 { vec![path[k / 2]] } else { vec![path[k / 2 - 1], path[k / 2]] };
    let case = match k {
        1 => Some(CentroidCase::Mono),
        2 => Some(CentroidCase::Bi),
        3 => Some(CentroidCase::Tri),
        _ => None,
    };
    CentroidReport { hs, path, central, case }
}

/// `hs` for every vertex from subtree sums of one rooting: the component
/// above `v` weighs `total - sub(v)`, the ones below weigh `sub(child)`.
fn heaviest_subtrees(flat: &Flat) -> Vec<u32> {
    let n = flat.len();
    let total = flat.total();
    let order = preorder(flat);
    let mut sub = flat.weight.clone();
    for &v in order.iter().rev() {
        if let Some(p) = flat.parent[v] {
            sub[p] += sub[v];
        }
    }
    let mut hs = vec![0; n];
    for v in 0..n {
        let up = if flat.parent[v].is_some() { total - sub[v] } else { 0 };
        let down = flat.adj[v]
            .iter()
            .filter(|&&u| flat.parent[u] == Some(v))
            .map(|&u| sub[u])
            .max()
            .unwrap_or(0);
        hs[v] = up.max(down);
    }
    hs
}

fn preorder(flat: &Flat) -> Vec<usize> {
    let root = (0..flat.len()).find(|&v| flat.parent[v].is_none()).unwrap_or(0);
    let mut order = Vec::with_capacity(flat.len());
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(flat.adj[v].iter().filter(|&&u| flat.parent[u] == Some(v)));
    }
    order
}

/// Re-roots `t` at its central centroid. With two central centroids the root
/// is the one whose half is smaller in the tree order; equal halves make the
/// choice irrelevant.
pub fn centroid_rooted(t: &Tree) -> Result<Tree> {
    if t.total_weight() == 0 {
        return Err(Error::Argument("centroids need a positive total weight".into()));
    }
    Ok(centroid_rooted_flat(&Flat::from_tree(t)))
}

pub(crate) fn centroid_rooted_flat(flat: &Flat) -> Tree {
    let r = report(flat);
    match r.central[..] {
        [v] => flat.rooted_at(v),
        [a, b] => {
            let ta = flat.rooted_away_from(a, Some(b));
            let tb = flat.rooted_away_from(b, Some(a));
            if ta <= tb {
                ta.with_child(tb)
            } else {
                tb.with_child(ta)
            }
        }
        _ => unreachable!("a path has one or two centers"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{ColorId, BLOCK, CUT};

    const G: ColorId = ColorId(0);

    fn path_tree(weights: &[u32], colors: &[ColorId]) -> Tree {
        let n = weights.len();
        let mut t = Tree::leaf(weights[n - 1], colors[n - 1]);
        for i in (0..n - 1).rev() {
            t = Tree::new(weights[i], colors[i], [t]);
        }
        t
    }

    #[test]
    fn unweighted_path_of_four() {
        let t = path_tree(&[1, 1, 1, 1], &[G; 4]);
        let r = centroids(&t).unwrap();
        assert_eq!(r.hs, vec![3, 2, 2, 3]);
        assert_eq!(r.path.len(), 2);
        assert_eq!(r.case, Some(CentroidCase::Bi));
    }

    #[test]
    fn single_vertex() {
        let r = centroids(&Tree::leaf(4, G)).unwrap();
        assert_eq!(r.hs, vec![0]);
        assert_eq!(r.central, vec![0]);
        assert_eq!(r.case, Some(CentroidCase::Mono));
        assert!(centroids(&Tree::leaf(0, G)).is_err());
    }

    #[test]
    fn three_centroids_with_zero_middle() {
        let colors = [BLOCK, CUT, BLOCK, CUT, BLOCK];
        let t = path_tree(&[2, 1, 0, 1, 2], &colors);
        let r = centroids(&t).unwrap();
        assert_eq!(r.path.len(), 3);
        assert_eq!(r.central, vec![2]);
        assert_eq!(r.case, Some(CentroidCase::Tri));
        for &v in &r.path {
            assert_eq!(r.hs[v], 3);
        }
    }

    #[test]
    fn rooting_is_independent_of_input_root() {
        let colors = [G; 6];
        let a = path_tree(&[1, 1, 1, 1, 1, 1], &colors);
        let b = Tree::new(1, G, [path_tree(&[1, 1, 1, 1], &colors[..4]), Tree::leaf(1, G)]);
        assert_eq!(centroid_rooted(&a).unwrap(), centroid_rooted(&b).unwrap());
        let star = Tree::new(1, G, [Tree::leaf(1, G), Tree::leaf(1, G), Tree::leaf(1, G)]);
        let leaf_rooted = Tree::new(1, G, [Tree::new(1, G, [Tree::leaf(1, G), Tree::leaf(1, G)])]);
        assert_eq!(centroid_rooted(&leaf_rooted).unwrap(), star);
    }
}
