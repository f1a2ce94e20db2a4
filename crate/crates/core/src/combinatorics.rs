//! Multisets of a fixed size over an enumerated base set.
//!
//! A multiset of `k` elements is represented by the non-increasing sequence of
//! its base indices. Multisets are ordered lexicographically on that
//! sequence, which is also the order in which [`Multisets`] emits them: the
//! first multiset whose largest index is `l` has rank `CC(l, k)`.

use num_traits::{One, Zero};

use crate::{Count, Error, Result};

/// Number of multisets of `k` elements drawn from `n` distinct objects,
/// i.e. `binom(n - 1 + k, k)`.
pub fn multiset_count(n: &Count, k: u32) -> Count {
    if k == 0 {
        return Count::one();
    }
    if n.is_zero() {
        return Count::zero();
    }
    let mut acc = Count::one();
    for j in 1..=k {
        acc *= n + Count::from(j - 1);
        acc /= j;
    }
    acc
}

/// Lazily enumerates the multisets of `k` elements over the first
/// `upper_bound` items of `base`.
pub fn enumerate_multisets<I>(base: I, k: usize, upper_bound: Option<usize>) -> Multisets<I::IntoIter>
where
    I: IntoIterator,
    I::Item: Clone,
{
    Multisets::new(base.into_iter(), k, upper_bound)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Fresh,
    Active,
    Done,
}

/// Streaming multiset enumerator. Items are pulled from the base iterator only
/// when a multiset first needs them, so the base may be long or expensive.
pub struct Multisets<I: Iterator> {
    base: I,
    cache: Vec<I::Item>,
    exhausted: bool,
    indices: Vec<usize>,
    upper_bound: Option<usize>,
    state: State,
}

impl<I> Multisets<I>
where
    I: Iterator,
    I::Item: Clone,
{
    pub fn new(base: I, k: usize, upper_bound: Option<usize>) -> Self {
        Self {
            base,
            cache: Vec::new(),
            exhausted: false,
            indices: vec![0; k],
            upper_bound,
            state: State::Fresh,
        }
    }

    fn has_item(&mut self, index: usize) -> bool {
        if self.upper_bound.is_some_and(|b| index >= b) {
            return false;
        }
        while self.cache.len() <= index && !self.exhausted {
            match self.base.next() {
                Some(item) => self.cache.push(item),
                None => self.exhausted = true,
            }
        }
        index < self.cache.len()
    }

    /// Moves to the next multiset; returns `false` once the stream is over.
    pub fn advance(&mut self) -> bool {
        match self.state {
            State::Done => return false,
            State::Fresh => {
                if self.indices.is_empty() || self.has_item(0) {
                    self.state = State::Active;
                    return true;
                }
                self.state = State::Done;
                return false;
            }
            State::Active => {}
        }
        let k = self.indices.len();
        for j in (1..k).rev() {
            if self.indices[j] < self.indices[j - 1] {
                self.indices[j] += 1;
                self.indices[j + 1..].fill(0);
                return true;
            }
        }
        if k > 0 && self.has_item(self.indices[0] + 1) {
            self.indices[0] += 1;
            self.indices[1..].fill(0);
            return true;
        }
        self.state = State::Done;
        false
    }

    /// Base indices of the current multiset, largest first.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Items of the current multiset, in the order of [`Multisets::indices`].
    pub fn current(&self) -> impl Iterator<Item = &I::Item> + '_ {
        self.indices.iter().map(move |&i| &self.cache[i])
    }
}

impl<I> Iterator for Multisets<I>
where
    I: Iterator,
    I::Item: Clone,
{
    type Item = Vec<I::Item>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.advance() {
            Some(self.current().cloned().collect())
        } else {
            None
        }
    }
}

/// Returns the `i`-th multiset (zero-based, in enumeration order) of `k`
/// elements over `0..n`, as base indices largest first.
pub fn find_multiset(n: &Count, k: u32, i: &Count) -> Result<Vec<Count>> {
    let size = multiset_count(n, k);
    if *i >= size {
        return Err(Error::RankOutOfRange { rank: i.clone(), size });
    }
    let mut out = Vec::with_capacity(k as usize);
    let mut n = n.clone();
    let mut k = k;
    let mut i = i.clone();
    while k > 0 && !n.is_one() {
        // Largest l in [0, n) with CC(l, k) <= i; CC(0, k) = 0 so l exists.
        let mut lo = Count::zero();
        let mut hi = &n - 1u32;
        while lo < hi {
            let mid: Count = (&lo + &hi + 1u32) >> 1;
            if multiset_count(&mid, k) <= i {
                lo = mid;
            } else {
                hi = mid - 1u32;
            }
        }
        i -= multiset_count(&lo, k);
        n = &lo + 1u32;
        out.push(lo);
        k -= 1;
    }
    out.extend((0..k).map(|_| Count::zero()));
    Ok(out)
}

/// Inverse of [`find_multiset`]. Accepts the elements in any order.
pub fn rank_multiset(n: &Count, k: u32, multiset: &[Count]) -> Result<Count> {
    if multiset.len() != k as usize {
        return Err(Error::Argument(format!(
            "expected a multiset of {k} elements, got {}",
            multiset.len()
        )));
    }
    if let Some(bad) = multiset.iter().find(|e| *e >= n) {
        return Err(Error::Argument(format!("element {bad} is not below {n}")));
    }
    let mut sorted: Vec<&Count> = multiset.iter().collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut rank = Count::zero();
    for (j, e) in sorted.into_iter().enumerate() {
        rank += multiset_count(e, k - j as u32);
    }
    Ok(rank)
}
