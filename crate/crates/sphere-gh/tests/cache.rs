use sphere_gh::cache::{budget_hash, PackingCache};
use sphere_gh::json::PackingDoc;
use sphere_gh_core::distortion::SearchBudget;
use sphere_gh_core::exec::Sequential;

#[test]
fn stored_packings_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = PackingCache::new(dir.path());
    let budget = SearchBudget::default();
    assert!(cache.load(2, 6, &budget, 3).is_none());
    let first = cache.get_or_compute(2, 6, &budget, 3, &Sequential).unwrap();
    let path = cache.path_for(2, 6, &budget, 3);
    let text = std::fs::read_to_string(&path).unwrap();
    let doc: Result<PackingDoc, _> = serde_json::from_str(&text);
    assert!(doc.is_ok(), "{doc:?}");
    let loaded = cache.load(2, 6, &budget, 3).expect("cached entry loads");
    assert_eq!(loaded.min_dist, first.min_dist);
    assert_eq!(loaded.iterations, first.iterations);
    for (a, b) in loaded.points.iter().zip(&first.points) {
        assert_eq!(a.coords(), b.coords());
    }
}

#[test]
fn keys_follow_the_search_parameters() {
    let base = SearchBudget::default();
    let h = budget_hash(2, 6, &base, 0);
    assert_eq!(h.len(), 64);
    assert_eq!(h, budget_hash(2, 6, &base, 0));
    assert_ne!(h, budget_hash(2, 7, &base, 0));
    assert_ne!(h, budget_hash(3, 6, &base, 0));
    assert_ne!(h, budget_hash(2, 6, &base, 1));
    assert_ne!(h, budget_hash(2, 6, &SearchBudget { restarts: 3, ..base }, 0));
    assert_ne!(h, budget_hash(2, 6, &SearchBudget { decay: 0.8, ..base }, 0));
    // the optimizer never reads `samples`, so it stays out of the key
    assert_eq!(h, budget_hash(2, 6, &base.with_samples(5), 0));
}

#[test]
fn malformed_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = PackingCache::new(dir.path());
    let budget = SearchBudget { restarts: 2, ..SearchBudget::default() };
    std::fs::write(cache.path_for(2, 4, &budget, 0), "{not json").unwrap();
    assert!(cache.load(2, 4, &budget, 0).is_none());
    let r = cache.get_or_compute(2, 4, &budget, 0, &Sequential).unwrap();
    assert_eq!(cache.load(2, 4, &budget, 0).unwrap(), r);
}
