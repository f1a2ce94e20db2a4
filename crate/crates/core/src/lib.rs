//! Exact counting, enumeration, ranking, unranking and uniform sampling of
//! unlabeled colored weighted trees.
//!
//! Every generator is configured by a [`ColorScheme`], which constrains vertex
//! weights, the color of a vertex's children and the minimum weight of a
//! subtree. Three schemes are built in:
//!
//! * `gray`: ordinary unweighted trees,
//! * `pos-weighted`: trees with positive integer vertex weights,
//! * `block`: weighted block trees, which are in bijection with connected
//!   block graphs (see [`blockgraph`]).
//!
//! The typical flow is to build a [`CountTable`] up to some maximum weight and
//! hand it to a [`Generator`]:
//!
//! ```
//! use treegen_core::{ColorScheme, Generator};
//!
//! let gen = Generator::new(ColorScheme::block(), 8).unwrap();
//! assert_eq!(gen.free_count(6).unwrap().total, 22u32.into());
//! let trees: Vec<_> = gen.free(6).unwrap().collect();
//! assert_eq!(trees.len(), 22);
//! ```

pub mod blockgraph;
pub mod centroid;
pub mod combinatorics;
pub mod counting;
mod error;
pub mod generate;
pub mod scheme;
pub mod tree;

pub use centroid::{centroid_rooted, centroids, CentroidCase, CentroidReport};
pub use combinatorics::{enumerate_multisets, find_multiset, multiset_count, rank_multiset};
pub use blockgraph::{block_tree_to_graph, graph_to_block_tree, is_block_graph, Graph};
pub use counting::{CacheOutcome, CountTable, FreeCounts, FreeSegment};
pub use error::{Error, Result};
pub use generate::{chunk_ranges, Forests, FreeTrees, Generator, RankedSpace, RootedTrees, Sample, Sampler, SpaceKind, Structure, RNG_NAME};
pub use scheme::{ColorId, ColorScheme, ColorSpec};
pub use tree::{canonicalize_weighted, check_canonical, is_canonical, Forest, Tree, Violation};

/// Exact non-negative count. Every table value and every rank is a `Count`.
pub type Count = num_bigint::BigUint;
