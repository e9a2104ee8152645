mod common;

use common::oracle_accepts;
use urd_core::ingredients::c4_factorization_bipartite;
use urd_core::model::{BlockKind, TargetGraph};
use urd_core::search::{find_resolvable_gdd, find_uniform_factorization, Budget, GddStrategy, SearchError};

#[test]
fn two_fold_k444_into_cycle_classes() {
    let t = TargetGraph::uniform_multipartite(4, 3, 2);
    let c = find_uniform_factorization(&t, &[BlockKind::Cycle4; 8], Budget::default(), None).unwrap();
    assert_eq!(c.classes.len(), 8);
    assert!(oracle_accepts(&c));
}

#[test]
fn two_fold_k44_search_agrees_with_generator() {
    let t = TargetGraph::uniform_multipartite(4, 2, 2);
    let searched = find_uniform_factorization(&t, &[BlockKind::Cycle4; 4], Budget::default(), None).unwrap();
    let built = c4_factorization_bipartite(4, 2);
    assert_eq!(searched.target, built.target);
    assert_eq!(searched.classes.len(), built.classes.len());
    assert!(oracle_accepts(&searched) && oracle_accepts(&built));
}

#[test]
fn k4_has_no_pair_of_star_classes() {
    // any two spanning stars on 4 points share the edge between their centres
    let t = TargetGraph::complete(4, 1);
    let e = find_uniform_factorization(&t, &[BlockKind::Star3; 2], Budget::default(), None).unwrap_err();
    assert!(matches!(e, SearchError::Exhausted { .. }), "{e}");
}

#[test]
fn rgdd_class_counts() {
    // t = g(u-1)/3 for index 1
    for (g, u, t) in [(4, 4, 4), (12, 4, 12), (4, 7, 8), (8, 4, 8)] {
        let c = find_resolvable_gdd(g, u, 1, Budget::default(), GddStrategy::Auto).unwrap();
        assert_eq!(c.classes.len(), t, "{g}^{u}");
        assert!(oracle_accepts(&c), "{g}^{u}");
    }
}

#[test]
fn rgdd_with_three_groups_is_impossible() {
    let e = find_resolvable_gdd(12, 3, 1, Budget::default(), GddStrategy::Auto).unwrap_err();
    assert!(matches!(e, SearchError::Impossible(_)));
}

#[test]
fn rgdd_beyond_point_cap() {
    let e = find_resolvable_gdd(4, 13, 1, Budget::default(), GddStrategy::Auto).unwrap_err();
    assert!(matches!(e, SearchError::TooLarge { points: 52, .. }));
}
