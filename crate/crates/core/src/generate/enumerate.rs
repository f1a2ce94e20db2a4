//! Lazy enumeration streams.
//!
//! Every stream only descends into sub-streams whose table count is
//! positive, so no work is spent on empty branches.

use std::sync::Arc;

use num_traits::Zero;

use crate::combinatorics::Multisets;
use crate::counting::{CountTable, FreeSegment};
use crate::scheme::ColorId;
use crate::tree::{Forest, Tree};

type Stream<T> = Box<dyn Iterator<Item = T> + Send>;

/// Rooted trees of weight `w` with root color `c` and child subtrees of
/// weight at most `m`; root weight ascending, then forest order.
pub struct RootedTrees {
    inner: Stream<Tree>,
}

impl RootedTrees {
    pub(crate) fn new(table: Arc<CountTable>, w: u32, c: ColorId, m: u32) -> Self {
        Self { inner: rooted(table, w, c, m) }
    }
}

impl Iterator for RootedTrees {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        self.inner.next()
    }
}

/// Forests of weight `w` over color `c`: all trees weighing at most `m`
/// (largest weight ascending, multiplicity ascending), or, in fixed mode, the
/// forests whose largest weight is exactly `m` with multiplicity exactly `μ`.
pub struct Forests {
    inner: Stream<Forest>,
}

impl Forests {
    pub(crate) fn bounded(table: Arc<CountTable>, w: u32, c: ColorId, m: u32) -> Self {
        Self { inner: forests_le(table, w, c, m) }
    }

    pub(crate) fn fixed(table: Arc<CountTable>, w: u32, c: ColorId, m: u32, mu: u32) -> Self {
        let inner: Stream<Forest> = if w == 0 && mu == 0 {
            Box::new(std::iter::once(Forest::empty()))
        } else if table.forests_exact(w, c, m, mu).is_zero() {
            Box::new(std::iter::empty())
        } else {
            forest_block(table, w, c, m, mu)
        };
        Self { inner }
    }
}

impl Iterator for Forests {
    type Item = Forest;

    fn next(&mut self) -> Option<Forest> {
        self.inner.next()
    }
}

/// Centroid-rooted free trees of one weight, segment by segment.
pub struct FreeTrees {
    inner: Stream<Tree>,
}

impl FreeTrees {
    pub(crate) fn new(table: Arc<CountTable>, w: u32) -> Self {
        let segments: Vec<FreeSegment> = table.free_count(w).map_or_else(
            |_| Vec::new(),
            |fc| fc.segments.iter().filter(|(_, n)| !n.is_zero()).map(|(s, _)| *s).collect(),
        );
        let inner = segments.into_iter().flat_map(move |s| free_segment(table.clone(), w, s));
        Self { inner: Box::new(inner) }
    }
}

impl Iterator for FreeTrees {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        self.inner.next()
    }
}

fn rooted(table: Arc<CountTable>, w: u32, c: ColorId, m: u32) -> Stream<Tree> {
    let spec = table.scheme().color(c);
    if w < spec.min_tree_weight {
        return Box::new(std::iter::empty());
    }
    let child = spec.child;
    let roots = spec.min_weight..=spec.max_weight_within(w);
    Box::new(roots.flat_map(move |r| {
        let (rest, bound) = (w - r, m.min(w - r));
        let forests: Stream<Forest> = if table.forests_le(rest, child, bound).is_zero() {
            Box::new(std::iter::empty())
        } else {
            forests_le(table.clone(), rest, child, bound)
        };
        forests.map(move |f| f.into_tree(r, c))
    }))
}

fn forests_le(table: Arc<CountTable>, w: u32, c: ColorId, m: u32) -> Stream<Forest> {
    if w == 0 {
        return Box::new(std::iter::once(Forest::empty()));
    }
    let lo = table.scheme().color(c).min_tree_weight;
    Box::new((lo..=m.min(w)).flat_map(move |mp| {
        let table = table.clone();
        (1..=w / mp)
            .filter({
                let table = table.clone();
                move |&mu| !table.forests_exact(w, c, mp, mu).is_zero()
            })
            .flat_map(move |mu| forest_block(table.clone(), w, c, mp, mu))
    }))
}

/// Forests with exactly `μ` trees of weight `m` (the high part) plus a forest
/// of the remaining weight whose trees are lighter (the low part). The high
/// multiset varies slowest.
fn forest_block(table: Arc<CountTable>, w: u32, c: ColorId, m: u32, mu: u32) -> Stream<Forest> {
    let rest = w - mu * m;
    let low_bound = rest.min(m - 1);
    let base = rooted(table.clone(), m, c, m).map(Arc::new);
    let highs = Multisets::new(base, mu as usize, None);
    Box::new(highs.flat_map(move |mut high: Vec<Arc<Tree>>| {
        high.sort_unstable_by(|a, b| b.cmp(a));
        forests_le(table.clone(), rest, c, low_bound).map(move |low| {
            let mut trees = high.clone();
            trees.extend(low.into_trees());
            Forest::from_sorted(trees)
        })
    }))
}

/// Joins two halves by an edge, rooted at the smaller half.
pub(crate) fn join(a: Tree, b: Tree) -> Tree {
    if a <= b {
        a.with_child(b)
    } else {
        b.with_child(a)
    }
}

fn free_segment(table: Arc<CountTable>, w: u32, segment: FreeSegment) -> Stream<Tree> {
    let half = w / 2;
    match segment {
        FreeSegment::Mono(c) => rooted(table, w, c, w.div_ceil(2) - 1),
        FreeSegment::Bi(c, d) if c == d => {
            let base = rooted(table, half, c, half - 1);
            Box::new(Multisets::new(base, 2, None).map(|mut pair| {
                let b = pair.pop().unwrap();
                let a = pair.pop().unwrap();
                join(a, b)
            }))
        }
        FreeSegment::Bi(c, d) => Box::new(rooted(table.clone(), half, c, half - 1).flat_map(move |a| {
            rooted(table.clone(), half, d, half - 1).map(move |b| join(a.clone(), b))
        })),
        FreeSegment::Tri(c) => {
            let child = table.scheme().child(c);
            let base = rooted(table, half, child, half).map(Arc::new);
            Box::new(Multisets::new(base, 2, None).map(move |pair| Tree::new(0, c, pair)))
        }
    }
}
