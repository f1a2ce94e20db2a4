mod common;

use common::LTree;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use treegen_core::{
    canonicalize_weighted, centroids, find_multiset, multiset_count, rank_multiset, ColorScheme, Count,
    Tree,
};

/// A random labeled tree (vertex count in `1..=max_n`, weights in
/// `0..=max_w`), rooted at vertex 0.
fn labeled(max_n: usize, max_w: u32) -> impl Strategy<Value = LTree> {
    (1..=max_n, any::<u64>()).prop_flat_map(move |(n, seed)| {
        prop::collection::vec(0..=max_w, n).prop_map(move |weights| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let edges = common::random_labeled_tree(&mut rng, n);
            LTree::from_edges(weights, vec![0; n], &edges)
        })
    })
}

fn positive(t: &LTree) -> bool {
    t.weight.iter().sum::<u32>() > 0
}

/// Rooted isomorphism by trying every bijection that fixes the roots.
fn brute_force_rooted_iso(a: &LTree, b: &LTree) -> bool {
    let n = a.len();
    if n != b.len() {
        return false;
    }
    let ea: Vec<(usize, usize)> = a.edges();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if perm[0] == 0
            && (0..n).all(|v| a.weight[v] == b.weight[perm[v]] && a.color[v] == b.color[perm[v]])
            && ea.iter().all(|&(x, y)| b.adj[perm[x]].contains(&perm[y]))
        {
            return true;
        }
        // next permutation
        let mut i = n - 1;
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn hs_matches_naive(t in labeled(12, 4).prop_filter("positive", positive)) {
        let tree = common::to_tree(&t, 0);
        let report = centroids(&tree).unwrap();
        prop_assert_eq!(report.hs, LTree::from_tree(&tree).naive_hs());
    }

    #[test]
    fn centroids_form_a_path(t in labeled(12, 4).prop_filter("positive", positive)) {
        let tree = canonicalize_weighted(&common::to_tree(&t, 0)).unwrap();
        let lt = LTree::from_tree(&tree);
        prop_assert!(lt.is_canonical());
        let r = centroids(&tree).unwrap();
        let total: u32 = lt.weight.iter().sum();
        let best = *r.hs.iter().min().unwrap();
        let mut members: Vec<usize> = (0..lt.len()).filter(|&v| r.hs[v] == best).collect();
        let mut path = r.path.clone();
        members.sort();
        path.sort();
        prop_assert_eq!(&members, &path);
        for w in r.path.windows(2) {
            prop_assert!(lt.adj[w[0]].contains(&w[1]));
        }
        if r.path.len() >= 2 {
            prop_assert_eq!(2 * r.hs[r.path[0]], total);
            for &v in &r.path[1..r.path.len() - 1] {
                prop_assert_eq!(lt.weight[v], 0);
            }
        }
        prop_assert!(r.path.len() <= 3);
        prop_assert!(r.case.is_some());
    }

    #[test]
    fn canonicalization_is_canonical_and_idempotent(t in labeled(12, 4).prop_filter("positive", positive)) {
        let tree = common::to_tree(&t, 0);
        let c = canonicalize_weighted(&tree).unwrap();
        prop_assert!(LTree::from_tree(&c).is_canonical());
        prop_assert_eq!(c.total_weight(), tree.total_weight());
        prop_assert_eq!(canonicalize_weighted(&c).unwrap(), c.clone());
    }

    #[test]
    fn code_equality_is_rooted_isomorphism(a in labeled(7, 1), b in labeled(7, 1)) {
        let (ta, tb) = (common::to_tree(&a, 0), common::to_tree(&b, 0));
        prop_assert_eq!(ta.canonical_code() == tb.canonical_code(), brute_force_rooted_iso(&a, &b));
        prop_assert_eq!(ta == tb, brute_force_rooted_iso(&a, &b));
    }

    #[test]
    fn code_order_is_tree_order(a in labeled(8, 3), b in labeled(8, 3)) {
        let (ta, tb) = (common::to_tree(&a, 0), common::to_tree(&b, 0));
        prop_assert_eq!(ta.cmp(&tb), ta.canonical_code().cmp(&tb.canonical_code()));
    }

    #[test]
    fn text_format_round_trips(t in labeled(10, 3)) {
        let scheme = ColorScheme::positive_weighted();
        let tree = common::to_tree(&t, 0);
        prop_assert_eq!(Tree::parse_text(&tree.to_text(&scheme), &scheme).unwrap(), tree);
    }

    #[test]
    fn multiset_rank_round_trip(n in 1u64..10_000, k in 0u32..6, seed in any::<u64>()) {
        let n = Count::from(n);
        let size = multiset_count(&n, k);
        let i = Count::from(seed) % &size;
        let ms = find_multiset(&n, k, &i).unwrap();
        prop_assert!(ms.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(rank_multiset(&n, k, &ms).unwrap(), i);
    }
}
