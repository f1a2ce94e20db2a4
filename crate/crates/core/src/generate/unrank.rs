//! Direct access by rank, and its inverse. Every function mirrors the order
//! of the matching stream in `enumerate`.

use std::sync::Arc;

use num_traits::Zero;

use super::enumerate::join;
use crate::centroid::{report, CentroidCase};
use crate::combinatorics::{find_multiset, rank_multiset};
use crate::counting::{CountTable, FreeSegment};
use crate::scheme::ColorId;
use crate::tree::{check_canonical, Flat, Forest, Tree};
use crate::{Count, Error, Result};

fn out_of_range(i: &Count, size: &Count) -> Error {
    Error::RankOutOfRange { rank: i.clone(), size: size.clone() }
}

fn mismatch(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn unrank_rooted(t: &CountTable, w: u32, c: ColorId, m: u32, i: &Count) -> Result<Tree> {
    let size = t.rooted_le(w, c, m);
    if i >= size {
        return Err(out_of_range(i, size));
    }
    let spec = t.scheme().color(c);
    let mut i = i.clone();
    for r in spec.min_weight..=spec.max_weight_within(w) {
        let block = t.forests_le(w - r, spec.child, m.min(w - r));
        if i < *block {
            let f = unrank_forest_le(t, w - r, spec.child, m.min(w - r), &i)?;
            return Ok(f.into_tree(r, c));
        }
        i -= block;
    }
    unreachable!("root weight blocks sum to the space size")
}

pub(crate) fn unrank_forest_le(t: &CountTable, w: u32, c: ColorId, m: u32, i: &Count) -> Result<Forest> {
    let m = m.min(w);
    let size = t.forests_le(w, c, m);
    if i >= size {
        return Err(out_of_range(i, size));
    }
    if w == 0 {
        return Ok(Forest::empty());
    }
    // Smallest m' with f≤(w, c, m') > i; the table is monotone in m'.
    let lo = t.scheme().color(c).min_tree_weight;
    let (mut a, mut b) = (lo, m);
    while a < b {
        let mid = a + (b - a) / 2;
        if t.forests_le(w, c, mid) > i {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    let mp = a;
    let i = i - t.forests_le(w, c, mp - 1);
    unrank_forest_max(t, w, c, mp, &i)
}

/// Forests whose largest tree weighs exactly `m`, multiplicity ascending.
fn unrank_forest_max(t: &CountTable, w: u32, c: ColorId, m: u32, i: &Count) -> Result<Forest> {
    let top = w / m;
    let (mut a, mut b) = (1, top);
    while a < b {
        let mid = a + (b - a) / 2;
        if t.forests_le_mu(w, c, m, mid) > i {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    let mu = a;
    let i = i - t.forests_le_mu(w, c, m, mu - 1);
    unrank_forest_block(t, w, c, m, mu, &i)
}

pub(crate) fn unrank_forest_block(t: &CountTable, w: u32, c: ColorId, m: u32, mu: u32, i: &Count) -> Result<Forest> {
    if w == 0 && mu == 0 {
        return if i.is_zero() { Ok(Forest::empty()) } else { Err(out_of_range(i, &Count::from(1u32))) };
    }
    let size = t.forests_exact(w, c, m, mu);
    if i >= size {
        return Err(out_of_range(i, size));
    }
    let rest = w - mu * m;
    let low_bound = rest.min(m - 1);
    let j = t.forests_le(rest, c, low_bound);
    let (high, low) = (i / j, i % j);
    let mut trees: Vec<Arc<Tree>> = find_multiset(t.rooted(m, c), mu, &high)?
        .iter()
        .map(|k| unrank_rooted(t, m, c, m, k).map(Arc::new))
        .collect::<Result<_>>()?;
    trees.sort_unstable_by(|a, b| b.cmp(a));
    trees.extend(unrank_forest_le(t, rest, c, low_bound, &low)?.into_trees());
    Ok(Forest::from_sorted(trees))
}

pub(crate) fn rank_rooted(t: &CountTable, w: u32, c: ColorId, m: u32, tree: &Tree) -> Result<Count> {
    if tree.total_weight() != w {
        return Err(mismatch(format!("tree weighs {}, expected {w}", tree.total_weight())));
    }
    if tree.color() != c {
        return Err(mismatch(format!(
            "vertex colored {} where {} is required",
            t.scheme().name(tree.color()),
            t.scheme().name(c)
        )));
    }
    let spec = t.scheme().color(c);
    let r = tree.weight();
    if w < spec.min_tree_weight || r < spec.min_weight || r > spec.max_weight_within(w) {
        return Err(mismatch(format!("tree violates the constraints of color {}", spec.name)));
    }
    let mut rank: Count = (spec.min_weight..r).map(|q| t.forests_le(w - q, spec.child, m.min(w - q))).sum();
    rank += rank_forest_le(t, w - r, spec.child, m.min(w - r), tree.children())?;
    Ok(rank)
}

pub(crate) fn rank_forest_le(t: &CountTable, w: u32, c: ColorId, m: u32, trees: &[Arc<Tree>]) -> Result<Count> {
    if trees.iter().map(|x| x.total_weight()).sum::<u32>() != w {
        return Err(mismatch("forest weight does not match"));
    }
    if trees.is_empty() {
        return Ok(Count::zero());
    }
    let mp = trees[0].total_weight();
    if mp == 0 {
        return Err(mismatch("a tree of the forest has weight 0"));
    }
    if mp > m.min(w) {
        return Err(mismatch(format!("a tree weighs {mp}, above the bound {m}")));
    }
    let mu = trees.iter().take_while(|x| x.total_weight() == mp).count() as u32;
    let mut rank = t.forests_le(w, c, mp - 1).clone();
    rank += t.forests_le_mu(w, c, mp, mu - 1);
    rank += rank_forest_block(t, w, c, mp, mu, trees)?;
    Ok(rank)
}

pub(crate) fn rank_forest_block(t: &CountTable, w: u32, c: ColorId, m: u32, mu: u32, trees: &[Arc<Tree>]) -> Result<Count> {
    let (high, low) = trees.split_at(mu as usize);
    let rest = w - mu * m;
    let low_bound = rest.min(m - 1);
    let ranks: Vec<Count> = high.iter().map(|x| rank_rooted(t, m, c, m, x)).collect::<Result<_>>()?;
    let high_rank = rank_multiset(t.rooted(m, c), mu, &ranks)?;
    let low_rank = rank_forest_le(t, rest, c, low_bound, low)?;
    Ok(high_rank * t.forests_le(rest, c, low_bound) + low_rank)
}

/// Checks that `f` is a forest of the fixed space `(w, c, m, μ)` and returns
/// its rank there.
pub(crate) fn rank_forest_fixed(t: &CountTable, w: u32, c: ColorId, m: u32, mu: u32, f: &Forest) -> Result<Count> {
    if f.total_weight() != w || f.largest() != m || f.multiplicity() != mu {
        return Err(mismatch("forest does not belong to the requested space"));
    }
    if w == 0 {
        return Ok(Count::zero());
    }
    rank_forest_block(t, w, c, m, mu, f.trees())
}

fn segment_of(t: &CountTable, w: u32, i: &Count) -> Result<(FreeSegment, Count)> {
    let counts = t.free_count(w)?;
    if *i >= counts.total {
        return Err(out_of_range(i, &counts.total));
    }
    let mut i = i.clone();
    for (s, n) in &counts.segments {
        if i < *n {
            return Ok((*s, i));
        }
        i -= n;
    }
    unreachable!("segments sum to the total")
}

fn segment_offset(t: &CountTable, w: u32, segment: FreeSegment) -> Result<Count> {
    let counts = t.free_count(w)?;
    let mut offset = Count::zero();
    for (s, n) in &counts.segments {
        if *s == segment {
            return Ok(offset);
        }
        offset += n;
    }
    Err(mismatch("tree does not belong to any free-tree segment of this scheme"))
}

pub(crate) fn unrank_free(t: &CountTable, w: u32, i: &Count) -> Result<Tree> {
    let (segment, i) = segment_of(t, w, i)?;
    let half = w / 2;
    Ok(match segment {
        FreeSegment::Mono(c) => unrank_rooted(t, w, c, w.div_ceil(2) - 1, &i)?,
        FreeSegment::Bi(c, d) if c == d => {
            let pair = find_multiset(t.rooted_le(half, c, half - 1), 2, &i)?;
            let a = unrank_rooted(t, half, c, half - 1, &pair[0])?;
            let b = unrank_rooted(t, half, c, half - 1, &pair[1])?;
            join(a, b)
        }
        FreeSegment::Bi(c, d) => {
            let nd = t.rooted_le(half, d, half - 1);
            let a = unrank_rooted(t, half, c, half - 1, &(&i / nd))?;
            let b = unrank_rooted(t, half, d, half - 1, &(&i % nd))?;
            join(a, b)
        }
        FreeSegment::Tri(c) => {
            let child = t.scheme().child(c);
            let pair = find_multiset(t.rooted(half, child), 2, &i)?;
            let a = unrank_rooted(t, half, child, half, &pair[0])?;
            let b = unrank_rooted(t, half, child, half, &pair[1])?;
            Tree::new(0, c, [a, b])
        }
    })
}

/// Rank of a free tree given in any rooting. The tree must be canonical and
/// conform to the scheme.
pub(crate) fn rank_free(t: &CountTable, w: u32, tree: &Tree) -> Result<Count> {
    if tree.total_weight() != w {
        return Err(mismatch(format!("tree weighs {}, expected {w}", tree.total_weight())));
    }
    t.check_weight(w)?;
    // Scheme conformance is checked on the centroid-rooted form below; the
    // given rooting may place children under a parent of the wrong color.
    let flat = Flat::from_tree(tree);
    let rep = report(&flat);
    let half = w / 2;
    let s = t.scheme();
    let (segment, local) = match (rep.case, &rep.central[..]) {
        (Some(CentroidCase::Mono), &[v]) => {
            let rooted = flat.rooted_at(v);
            conform(t, &rooted)?;
            let c = rooted.color();
            (FreeSegment::Mono(c), rank_rooted(t, w, c, w.div_ceil(2) - 1, &rooted)?)
        }
        (Some(CentroidCase::Bi), &[u, v]) => {
            let mut a = flat.rooted_away_from(u, Some(v));
            let mut b = flat.rooted_away_from(v, Some(u));
            conform(t, &join(a.clone(), b.clone()))?;
            if a.color() > b.color() {
                std::mem::swap(&mut a, &mut b);
            }
            let (c, d) = (a.color(), b.color());
            let ra = rank_rooted(t, half, c, half - 1, &a)?;
            let rb = rank_rooted(t, half, d, half - 1, &b)?;
            let local = if c == d {
                rank_multiset(t.rooted_le(half, c, half - 1), 2, &[ra, rb])?
            } else {
                ra * t.rooted_le(half, d, half - 1) + rb
            };
            (FreeSegment::Bi(c, d), local)
        }
        (Some(CentroidCase::Tri), &[v]) => {
            let rooted = flat.rooted_at(v);
            conform(t, &rooted)?;
            let c = rooted.color();
            let child = s.child(c);
            if rooted.weight() != 0 || rooted.children().len() != 2 {
                return Err(mismatch("the middle of three centroids must have weight 0 and degree 2"));
            }
            let ranks: Vec<Count> = rooted
                .children()
                .iter()
                .map(|x| rank_rooted(t, half, child, half, x))
                .collect::<Result<_>>()?;
            (FreeSegment::Tri(c), rank_multiset(t.rooted(half, child), 2, &ranks)?)
        }
        _ => return Err(mismatch("tree has more than three centroids, so it is not canonical")),
    };
    Ok(segment_offset(t, w, segment)? + local)
}

fn conform(t: &CountTable, tree: &Tree) -> Result<()> {
    check_canonical(tree, t.scheme()).map_err(|v| mismatch(v.to_string()))
}
