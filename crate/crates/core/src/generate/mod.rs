//! Enumeration, ranking, unranking and uniform sampling over the spaces
//! counted by a [`CountTable`].

mod enumerate;
mod unrank;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub use enumerate::{Forests, FreeTrees, RootedTrees};

use crate::counting::{CountTable, FreeCounts};
use crate::scheme::{ColorId, ColorScheme};
use crate::tree::{Forest, Tree};
use crate::{Count, Error, Result};

/// Identifier of the random generator recorded next to samples.
pub const RNG_NAME: &str = "chacha20";

/// A family of structures with a fixed enumeration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Rooted trees of a weight with a given root color.
    Rooted { weight: u32, color: ColorId },
    /// Rooted trees whose child subtrees weigh at most `bound`.
    RootedBounded { weight: u32, color: ColorId, bound: u32 },
    /// Forests over one color. `bound` caps tree weights (default: no cap).
    /// With `multiplicity`, the largest tree weighs exactly `bound` and
    /// occurs exactly `multiplicity` times.
    Forest { weight: u32, color: ColorId, bound: Option<u32>, multiplicity: Option<u32> },
    /// Free trees, each rooted at its central centroid.
    Free { weight: u32 },
}

impl SpaceKind {
    pub fn weight(&self) -> u32 {
        match *self {
            SpaceKind::Rooted { weight, .. }
            | SpaceKind::RootedBounded { weight, .. }
            | SpaceKind::Forest { weight, .. }
            | SpaceKind::Free { weight } => weight,
        }
    }
}

/// An element of a [`RankedSpace`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    Tree(Tree),
    Forest(Forest),
}

impl Structure {
    pub fn as_tree(&self) -> Option<&Tree> {
        match self {
            Structure::Tree(t) => Some(t),
            Structure::Forest(_) => None,
        }
    }

    pub fn into_tree(self) -> Option<Tree> {
        match self {
            Structure::Tree(t) => Some(t),
            Structure::Forest(_) => None,
        }
    }

    pub fn as_forest(&self) -> Option<&Forest> {
        match self {
            Structure::Forest(f) => Some(f),
            Structure::Tree(_) => None,
        }
    }

    /// Tree text format; forests join their trees with ` | `.
    pub fn to_text(&self, scheme: &ColorScheme) -> String {
        match self {
            Structure::Tree(t) => t.to_text(scheme),
            Structure::Forest(f) => f.to_text(scheme),
        }
    }
}

/// Builds counting tables once and serves every space of one scheme.
#[derive(Clone, Debug)]
pub struct Generator {
    table: Arc<CountTable>,
}

impl Generator {
    pub fn new(scheme: ColorScheme, max_weight: u32) -> Result<Self> {
        Ok(Self::from_table(CountTable::build(scheme, max_weight)?))
    }

    pub fn from_table(table: CountTable) -> Self {
        Self { table: Arc::new(table) }
    }

    pub fn table(&self) -> &Arc<CountTable> {
        &self.table
    }

    pub fn scheme(&self) -> &ColorScheme {
        self.table.scheme()
    }

    pub fn max_weight(&self) -> u32 {
        self.table.max_weight()
    }

    pub fn space(&self, kind: SpaceKind) -> Result<RankedSpace> {
        RankedSpace::new(self.table.clone(), kind)
    }

    pub fn free_count(&self, w: u32) -> Result<&FreeCounts> {
        self.table.free_count(w)
    }

    pub fn free(&self, w: u32) -> Result<FreeTrees> {
        self.table.check_weight(w)?;
        Ok(FreeTrees::new(self.table.clone(), w))
    }

    pub fn rooted(&self, w: u32, c: ColorId, bound: Option<u32>) -> Result<RootedTrees> {
        self.table.rooted_bounded_count(w, c, 0)?;
        Ok(RootedTrees::new(self.table.clone(), w, c, bound.unwrap_or(w)))
    }

    pub fn forests(&self, w: u32, c: ColorId, bound: Option<u32>, multiplicity: Option<u32>) -> Result<Forests> {
        self.table.forest_count(w, c, bound, multiplicity)?;
        let m = bound.unwrap_or(w);
        Ok(match multiplicity {
            None => Forests::bounded(self.table.clone(), w, c, m),
            Some(mu) => Forests::fixed(self.table.clone(), w, c, m, mu),
        })
    }

    pub fn unrank_free(&self, w: u32, i: &Count) -> Result<Tree> {
        unrank::unrank_free(&self.table, w, i)
    }

    /// Rank of a free tree given in any rooting.
    pub fn rank_free(&self, w: u32, tree: &Tree) -> Result<Count> {
        unrank::rank_free(&self.table, w, tree)
    }

    pub fn unrank_rooted(&self, w: u32, c: ColorId, bound: Option<u32>, i: &Count) -> Result<Tree> {
        self.table.rooted_bounded_count(w, c, 0)?;
        unrank::unrank_rooted(&self.table, w, c, bound.unwrap_or(w), i)
    }

    pub fn rank_rooted(&self, w: u32, c: ColorId, bound: Option<u32>, tree: &Tree) -> Result<Count> {
        self.table.rooted_bounded_count(w, c, 0)?;
        unrank::rank_rooted(&self.table, w, c, bound.unwrap_or(w), tree)
    }

    pub fn unrank_forest(
        &self,
        w: u32,
        c: ColorId,
        bound: Option<u32>,
        multiplicity: Option<u32>,
        i: &Count,
    ) -> Result<Forest> {
        self.space(SpaceKind::Forest { weight: w, color: c, bound, multiplicity })?
            .unrank(i)
            .map(|s| match s {
                Structure::Forest(f) => f,
                Structure::Tree(_) => unreachable!("forest spaces hold forests"),
            })
    }

    pub fn rank_forest(
        &self,
        w: u32,
        c: ColorId,
        bound: Option<u32>,
        multiplicity: Option<u32>,
        forest: &Forest,
    ) -> Result<Count> {
        self.space(SpaceKind::Forest { weight: w, color: c, bound, multiplicity })?
            .rank(&Structure::Forest(forest.clone()))
    }

    /// A uniformly random free tree of weight `w`.
    pub fn sample(&self, w: u32, seed: u64) -> Result<Sample> {
        self.space(SpaceKind::Free { weight: w })?.sample(seed)
    }
}

/// A space together with its size; ranks are `0..size`.
#[derive(Clone, Debug)]
pub struct RankedSpace {
    table: Arc<CountTable>,
    kind: SpaceKind,
    size: Count,
}

impl RankedSpace {
    pub fn new(table: Arc<CountTable>, kind: SpaceKind) -> Result<Self> {
        let size = match kind {
            SpaceKind::Rooted { weight, color } => table.rooted_count(weight, color)?,
            SpaceKind::RootedBounded { weight, color, bound } => table.rooted_bounded_count(weight, color, bound)?,
            SpaceKind::Forest { weight, color, bound, multiplicity } => {
                table.forest_count(weight, color, bound, multiplicity)?
            }
            SpaceKind::Free { weight } => {
                if weight == 0 {
                    return Err(Error::Argument("free trees need a positive weight".into()));
                }
                table.free_count(weight)?.total.clone()
            }
        };
        Ok(Self { table, kind, size })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn size(&self) -> &Count {
        &self.size
    }

    pub fn scheme(&self) -> &ColorScheme {
        self.table.scheme()
    }

    /// The enumeration stream, in rank order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = Structure> + Send> {
        let t = self.table.clone();
        match self.kind {
            SpaceKind::Rooted { weight, color } => {
                Box::new(RootedTrees::new(t, weight, color, weight).map(Structure::Tree))
            }
            SpaceKind::RootedBounded { weight, color, bound } => {
                Box::new(RootedTrees::new(t, weight, color, bound).map(Structure::Tree))
            }
            SpaceKind::Forest { weight, color, bound, multiplicity } => {
                let m = bound.unwrap_or(weight);
                let f = match multiplicity {
                    None => Forests::bounded(t, weight, color, m),
                    Some(mu) => Forests::fixed(t, weight, color, m, mu),
                };
                Box::new(f.map(Structure::Forest))
            }
            SpaceKind::Free { weight } => Box::new(FreeTrees::new(t, weight).map(Structure::Tree)),
        }
    }

    pub fn unrank(&self, i: &Count) -> Result<Structure> {
        if *i >= self.size {
            return Err(Error::RankOutOfRange { rank: i.clone(), size: self.size.clone() });
        }
        let t = &self.table;
        Ok(match self.kind {
            SpaceKind::Rooted { weight, color } => Structure::Tree(unrank::unrank_rooted(t, weight, color, weight, i)?),
            SpaceKind::RootedBounded { weight, color, bound } => {
                Structure::Tree(unrank::unrank_rooted(t, weight, color, bound, i)?)
            }
            SpaceKind::Forest { weight, color, bound, multiplicity } => {
                let m = bound.unwrap_or(weight);
                Structure::Forest(match multiplicity {
                    None => unrank::unrank_forest_le(t, weight, color, m, i)?,
                    Some(mu) => unrank::unrank_forest_block(t, weight, color, m, mu, i)?,
                })
            }
            SpaceKind::Free { weight } => Structure::Tree(unrank::unrank_free(t, weight, i)?),
        })
    }

    pub fn rank(&self, item: &Structure) -> Result<Count> {
        let t = &self.table;
        let wrong = || Error::Argument("structure kind does not match the space".into());
        match (self.kind, item) {
            (SpaceKind::Rooted { weight, color }, Structure::Tree(x)) => {
                unrank::rank_rooted(t, weight, color, weight, x)
            }
            (SpaceKind::RootedBounded { weight, color, bound }, Structure::Tree(x)) => {
                unrank::rank_rooted(t, weight, color, bound, x)
            }
            (SpaceKind::Forest { weight, color, bound, multiplicity }, Structure::Forest(f)) => {
                let m = bound.unwrap_or(weight);
                match multiplicity {
                    None => unrank::rank_forest_le(t, weight, color, m, f.trees()),
                    Some(mu) => unrank::rank_forest_fixed(t, weight, color, m, mu, f),
                }
            }
            (SpaceKind::Free { weight }, Structure::Tree(x)) => unrank::rank_free(t, weight, x),
            _ => Err(wrong()),
        }
    }

    /// A uniform element drawn with a generator seeded by `seed`.
    pub fn sample(&self, seed: u64) -> Result<Sample> {
        self.sampler(seed).draw()
    }

    /// Repeated uniform draws from one seeded stream.
    pub fn sampler(&self, seed: u64) -> Sampler {
        Sampler { space: self.clone(), seed, rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// Splits the ranks into `workers` contiguous chunks and unranks each
    /// chunk on its own thread. Chunks concatenate to the enumeration stream.
    pub fn parallel_enumerate(&self, workers: usize) -> Result<Vec<Vec<Structure>>> {
        let chunks = chunk_ranges(&self.size, workers);
        std::thread::scope(|s| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|(lo, hi)| s.spawn(move || self.unrank_range(lo, hi)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    }

    /// Like [`RankedSpace::parallel_enumerate`], but hands every structure to
    /// `sink` with its worker index instead of collecting them.
    pub fn parallel_for_each<F>(&self, workers: usize, sink: F) -> Result<()>
    where
        F: Fn(usize, Structure) -> Result<()> + Sync,
    {
        let chunks = chunk_ranges(&self.size, workers);
        let sink = &sink;
        std::thread::scope(|s| {
            let handles: Vec<_> = chunks
                .iter()
                .enumerate()
                .map(|(p, (lo, hi))| {
                    s.spawn(move || {
                        let mut i = lo.clone();
                        while i < *hi {
                            sink(p, self.unrank(&i)?)?;
                            i += 1u32;
                        }
                        Ok(())
                    })
                })
                .collect();
            handles.into_iter().try_for_each(|h| h.join().expect("worker panicked"))
        })
    }

    fn unrank_range(&self, lo: &Count, hi: &Count) -> Result<Vec<Structure>> {
        let mut out = Vec::new();
        let mut i = lo.clone();
        while i < *hi {
            out.push(self.unrank(&i)?);
            i += 1u32;
        }
        Ok(out)
    }
}

/// Half-open rank ranges for `workers` workers: each gets `⌊n/P⌋` ranks and
/// the last one also takes the remainder.
pub fn chunk_ranges(n: &Count, workers: usize) -> Vec<(Count, Count)> {
    let workers = workers.max(1);
    let k = n / workers;
    (0..workers)
        .map(|p| {
            let lo = &k * p;
            let hi = if p + 1 == workers { n.clone() } else { &k * (p + 1) };
            (lo, hi)
        })
        .collect()
}

/// Uniform integer in `0..n` by rejection over the bit width of `n - 1`.
pub fn uniform_below(rng: &mut impl RngCore, n: &Count) -> Count {
    assert!(!n.is_zero(), "empty range");
    if n.is_one() {
        return Count::zero();
    }
    let bits = (n - 1u32).bits();
    let nbytes = bits.div_ceil(8) as usize;
    let spare = (nbytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[nbytes - 1] &= 0xffu8 >> spare;
        let x = BigUint::from_bytes_le(&buf);
        if x < *n {
            return x;
        }
    }
}

/// One uniform draw and the data needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub seed: u64,
    pub rank: Count,
    pub size: Count,
    pub item: Structure,
}

impl Sample {
    /// `# seed=<s> rank=<i> N=<N> rng=<name>`.
    pub fn metadata(&self) -> String {
        format!("# seed={} rank={} N={} rng={RNG_NAME}", self.seed, self.rank, self.size)
    }
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.metadata())
    }
}

pub struct Sampler {
    space: RankedSpace,
    seed: u64,
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn draw(&mut self) -> Result<Sample> {
        if self.space.size.is_zero() {
            return Err(Error::EmptySpace);
        }
        let rank = uniform_below(&mut self.rng, &self.space.size);
        let item = self.space.unrank(&rank)?;
        Ok(Sample { seed: self.seed, rank, size: self.space.size.clone(), item })
    }

    /// Draws only the rank.
    pub fn draw_rank(&mut self) -> Result<Count> {
        if self.space.size.is_zero() {
            return Err(Error::EmptySpace);
        }
        Ok(uniform_below(&mut self.rng, &self.space.size))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{BLOCK, CUT};
    use crate::tree::is_canonical;
    use std::collections::HashSet;

    const G: ColorId = ColorId(0);

    fn c(v: u64) -> Count {
        Count::from(v)
    }

    fn gen(scheme: ColorScheme, n: u32) -> Generator {
        Generator::new(scheme, n).unwrap()
    }

    fn check_space(space: &RankedSpace) {
        let items: Vec<Structure> = space.iter().collect();
        assert_eq!(c(items.len() as u64), *space.size(), "{:?}", space.kind());
        let distinct: HashSet<&Structure> = items.iter().collect();
        assert_eq!(distinct.len(), items.len(), "{:?}", space.kind());
        for (i, item) in items.iter().enumerate() {
            assert_eq!(&space.unrank(&c(i as u64)).unwrap(), item, "{:?} rank {i}", space.kind());
            assert_eq!(space.rank(item).unwrap(), c(i as u64), "{:?} rank {i}", space.kind());
        }
        assert!(space.unrank(space.size()).is_err());
    }

    #[test]
    fn gray_forests_of_two() {
        let g = gen(ColorScheme::gray(), 4);
        let fs: Vec<Forest> = g.forests(2, G, Some(2), None).unwrap().collect();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].len(), 2);
        assert_eq!(fs[1].len(), 1);
        let empty: Vec<Forest> = g.forests(0, G, None, None).unwrap().collect();
        assert_eq!(empty, vec![Forest::empty()]);
    }

    #[test]
    fn gray_rooted_three() {
        let g = gen(ColorScheme::gray(), 4);
        let ts: Vec<Tree> = g.rooted(3, G, None).unwrap().collect();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[0].children().len(), 2);
        assert_eq!(ts[1].children().len(), 1);
        assert_eq!(g.unrank_rooted(3, G, None, &c(1)).unwrap(), ts[1]);
        assert_eq!(g.unrank_rooted(1, G, None, &c(0)).unwrap(), Tree::leaf(1, G));
    }

    #[test]
    fn block_small_spaces() {
        let g = gen(ColorScheme::block(), 6);
        let ys: Vec<Tree> = g.rooted(2, CUT, None).unwrap().collect();
        assert_eq!(ys, vec![Tree::new(1, CUT, [Tree::leaf(1, BLOCK)])]);
        let rs: Vec<Forest> = g.forests(1, BLOCK, Some(1), None).unwrap().collect();
        assert_eq!(rs, vec![Forest::new([Tree::leaf(1, BLOCK)])]);
        assert_eq!(g.unrank_free(2, &c(0)).unwrap(), Tree::leaf(2, BLOCK));
    }

    #[test]
    fn round_trips_small() {
        for scheme in [ColorScheme::gray(), ColorScheme::positive_weighted(), ColorScheme::block()] {
            let g = gen(scheme.clone(), 7);
            for w in 1..=7 {
                check_space(&g.space(SpaceKind::Free { weight: w }).unwrap());
                for col in scheme.color_ids() {
                    check_space(&g.space(SpaceKind::Rooted { weight: w, color: col }).unwrap());
                    check_space(&g.space(SpaceKind::Forest { weight: w, color: col, bound: None, multiplicity: None }).unwrap());
                    for m in 1..=w {
                        for mu in 1..=w / m {
                            let kind = SpaceKind::Forest { weight: w, color: col, bound: Some(m), multiplicity: Some(mu) };
                            check_space(&g.space(kind).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn free_trees_are_canonical() {
        let g = gen(ColorScheme::block(), 8);
        for w in 1..=8 {
            for t in g.free(w).unwrap() {
                assert!(is_canonical(&t, g.scheme()), "{}", t.to_text(g.scheme()));
                assert_eq!(crate::centroid::centroid_rooted(&t).unwrap(), t);
            }
        }
    }

    #[test]
    fn chunk_layout() {
        let r = chunk_ranges(&c(10), 3);
        assert_eq!(r, vec![(c(0), c(3)), (c(3), c(6)), (c(6), c(10))]);
        let r = chunk_ranges(&c(2), 4);
        assert_eq!(r.iter().filter(|(a, b)| a == b).count(), 3);
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = gen(ColorScheme::block(), 8);
        let space = g.space(SpaceKind::Free { weight: 8 }).unwrap();
        let seq: Vec<Structure> = space.iter().collect();
        for p in [1, 2, 4, 7, 300] {
            let par: Vec<Structure> = space.parallel_enumerate(p).unwrap().into_iter().flatten().collect();
            assert_eq!(par, seq, "P = {p}");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let g = gen(ColorScheme::gray(), 10);
        let a = g.sample(10, 42).unwrap();
        let b = g.sample(10, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.metadata().starts_with("# seed=42 rank="));
        let seen: HashSet<Count> = (0..64).map(|s| g.sample(4, s).unwrap().rank).collect();
        assert_eq!(seen.len(), 2);
        assert_eq!(gen(ColorScheme::block(), 2).sample(2, 7).unwrap().rank, c(0));
    }

    #[test]
    fn uniform_below_stays_in_range() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for n in [1u64, 2, 3, 255, 256, 257, 1 << 40] {
            for _ in 0..200 {
                assert!(uniform_below(&mut rng, &c(n)) < c(n));
            }
        }
    }

    #[test]
    fn rank_rejects_foreign_trees() {
        let g = gen(ColorScheme::block(), 6);
        // Yellow leaf violates the minimum subtree weight.
        let bad = Tree::new(1, BLOCK, [Tree::leaf(1, CUT)]);
        assert!(g.rank_free(2, &bad).is_err());
        // Weight mismatch.
        assert!(g.rank_free(3, &Tree::leaf(2, BLOCK)).is_err());
        // Any rooting of a valid tree is accepted.
        let path = Tree::new(1, BLOCK, [Tree::new(1, CUT, [Tree::leaf(1, BLOCK)])]);
        let r = g.rank_free(3, &path).unwrap();
        assert_eq!(g.unrank_free(3, &r).unwrap(), crate::centroid::centroid_rooted(&path).unwrap());
    }
}
