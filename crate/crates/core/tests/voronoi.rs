mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sphere_gh_core::corr_voronoi::*;
use sphere_gh_core::correspondence::{pair_distortion, Correspondence, Element, Side};
use sphere_gh_core::distortion::{estimate_distortion, SearchBudget};
use sphere_gh_core::exec::Sequential;
use sphere_gh_core::geometry::{sample_uniform, UnitVector};
use sphere_gh_core::pointsets::*;
use sphere_gh_core::rng::RngStream;

/// A configuration with known upper bounds on both Voronoi diameters.
struct Setup {
    corr: VoronoiCorrespondence,
    vdiam_low: f64,
    vdiam_high: f64,
}

fn setups() -> Vec<Setup> {
    let mut out = Vec::new();
    for k in 2..=5 {
        out.push(Setup {
            corr: VoronoiCorrespondence::new(evenly_spaced_circle_set(k + 1).unwrap(), cross_polytope_set(k).unwrap())
                .unwrap(),
            vdiam_low: PI / (k + 1) as f64,
            vdiam_high: cross_polytope_vdiam_exact(k),
        });
    }
    for (n, k) in [(2, 3), (2, 5), (3, 5)] {
        out.push(Setup {
            corr: VoronoiCorrespondence::new(arc_augmented_set(n, k).unwrap(), cross_polytope_set(k).unwrap()).unwrap(),
            vdiam_low: PI * n as f64 / (n + 1) as f64,
            vdiam_high: cross_polytope_vdiam_exact(k),
        });
    }
    out.push(Setup {
        corr: VoronoiCorrespondence::new(cross_polytope_set(2).unwrap(), cross_polytope_set(2).unwrap()).unwrap(),
        vdiam_low: cross_polytope_vdiam_exact(2),
        vdiam_high: cross_polytope_vdiam_exact(2),
    });
    out
}

fn point_in(set: &AntipodalSet, cell: CellIndex, rng: &mut RngStream) -> UnitVector {
    loop {
        let x = sample_uniform(set.dim(), rng).unwrap();
        if set.cell_contains(cell, &x, 0.0) {
            return x;
        }
    }
}

fn random_cell(m: usize, rng: &mut RngStream) -> CellIndex {
    CellIndex::new(rng.random_range(1..=2 * m), m).unwrap()
}

fn other_rep(c: CellIndex, m: usize, rng: &mut RngStream) -> CellIndex {
    loop {
        let d = random_cell(m, rng);
        if d.rep() != c.rep() {
            return d;
        }
    }
}

fn case_pair(s: &Setup, case: PairCase, rng: &mut RngStream) -> (Element, Element) {
    let c = &s.corr;
    let m = c.m();
    let low = |cell, rng: &mut RngStream| c.low_site_element(cell, point_in(c.high_set(), cell, rng));
    let high = |cell, rng: &mut RngStream| c.high_site_element(cell, point_in(c.low_set(), cell, rng));
    let a = random_cell(m, rng);
    match case {
        PairCase::SameLowSite => (low(a, rng), low(a, rng)),
        PairCase::AntipodalLowSites => (low(a, rng), low(a.antipode(), rng)),
        PairCase::DistinctLowSites => {
            let b = other_rep(a, m, rng);
            (low(a, rng), low(b, rng))
        }
        PairCase::MatchedSites => (low(a, rng), high(a, rng)),
        PairCase::OppositeSites => (low(a, rng), high(a.antipode(), rng)),
        PairCase::UnmatchedSites => {
            let b = other_rep(a, m, rng);
            (low(a, rng), high(b, rng))
        }
        PairCase::DistinctHighSites => {
            let b = other_rep(a, m, rng);
            (high(a, rng), high(b, rng))
        }
        PairCase::AntipodalHighSites => (high(a, rng), high(a.antipode(), rng)),
        PairCase::SameHighSite => (high(a, rng), high(a, rng)),
    }
}

#[test]
fn every_case_respects_its_own_bound() {
    let mut rng = RngStream::new(17, 0);
    for s in setups() {
        for case in PairCase::ALL {
            let bound = s.corr.case_bound(case, s.vdiam_low, s.vdiam_high);
            assert!(bound <= s.corr.bound(s.vdiam_low, s.vdiam_high) + 1e-15);
            for _ in 0..300 {
                let (a, b) = case_pair(&s, case, &mut rng);
                assert_eq!(s.corr.classify(&a, &b), case);
                assert!(s.corr.contains(&a) && s.corr.contains(&b));
                let d = pair_distortion(&a, &b);
                assert!(d <= bound + 1e-9, "{}: {d} > {bound}", case.name());
            }
        }
    }
}

#[test]
fn named_case_witnesses() {
    // P = 6 evenly spaced points of S^1, Q = octahedron
    let s = &setups()[0];
    let c = &s.corr;
    let cell = |l| c.low_set().cell(l).unwrap();
    let y = UnitVector::new(vec![1.0, 1.0, 1.0]).unwrap();
    // x = p_1, x' = −p_1: distortion |π − d(y, y')| with y, y' in opposite cells
    let (a, b) = (c.low_site_element(cell(1), y.clone()), c.low_site_element(cell(4), y.neg()));
    assert_eq!(c.classify(&a, &b), PairCase::AntipodalLowSites);
    assert!(pair_distortion(&a, &b) < 1e-15);
    // x = p_1, y' = q_2 with x' = p_2 on the circle
    let x2 = c.low_set().site(cell(2));
    let (a, b) = (c.low_site_element(cell(1), y.clone()), c.high_site_element(cell(2), x2));
    assert_eq!(c.classify(&a, &b), PairCase::UnmatchedSites);
    assert!(pair_distortion(&a, &b) <= c.case_bound(PairCase::UnmatchedSites, s.vdiam_low, s.vdiam_high));
    // distinct low sites reach π − sep(P) on a shared Q-boundary
    let w = UnitVector::new(vec![1.0, -1.0, 0.0]).unwrap();
    let cells = c.high_set().cells_of(&w.neg(), 1e-9).unwrap();
    let best = cells
        .iter()
        .map(|&d| pair_distortion(&c.low_site_element(cell(1), w.clone()), &c.low_site_element(d, w.neg())))
        .fold(0.0, f64::max);
    assert!((best - 2.0 * PI / 3.0).abs() < 1e-12, "{best}");
}

#[test]
fn soundness_on_mixed_configurations() {
    let mut rng = RngStream::new(23, 0);
    let budget = SearchBudget::default().with_samples(40_000);
    for trial in 0..6u64 {
        let m = 3 + trial as usize % 3;
        let n = 1 + trial as usize % 3;
        let k = m - 1;
        let low = if n == 1 { evenly_spaced_circle_set(m).unwrap() } else { random_set(n, m, &mut rng).unwrap() };
        let high = if trial % 2 == 0 { cross_polytope_set(k).unwrap() } else { random_set(k.max(2), m, &mut rng).unwrap() };
        let vd = |set: &AntipodalSet| {
            voronoi_diameter_estimate(set, 100_000, 200, &RngStream::new(trial, 1), &Sequential).unwrap().value
        };
        let (vl, vh) = (vd(&low), vd(&high));
        let corr = VoronoiCorrespondence::new(low, high).unwrap();
        let bound = corr.bound(vl, vh);
        let r = estimate_distortion(&corr, &budget, &RngStream::new(trial, 2), &Sequential).unwrap();
        assert!(r.estimate <= bound + 1e-6, "trial {trial}: {} > {bound}", r.estimate);
        assert!((pair_distortion(&r.witness.0, &r.witness.1) - r.estimate).abs() < 1e-12);
    }
}

#[test]
fn even_circle_to_cross_polytope_converges_to_bound() {
    for k in [2, 3] {
        let corr =
            VoronoiCorrespondence::new(evenly_spaced_circle_set(k + 1).unwrap(), cross_polytope_set(k).unwrap()).unwrap();
        let r = estimate_distortion(&corr, &SearchBudget::default().with_samples(100_000), &RngStream::new(1, 0), &Sequential)
            .unwrap();
        let target = k as f64 * PI / (k + 1) as f64;
        assert!(r.estimate <= target + 1e-9 && target - r.estimate < 0.02, "k={k}: {}", r.estimate);
    }
}

proptest! {
    #[test]
    fn relation_is_antipodally_equivariant(seed in 0u64..5000) {
        let s = &setups()[seed as usize % 8];
        let mut rng = RngStream::new(seed, 9);
        let e = s.corr.sample_element(&mut rng);
        prop_assert!(s.corr.contains(&e));
        let neg = Element { low: e.low.neg(), high: e.high.neg(), stratum: 0 };
        prop_assert!(s.corr.contains(&neg));
    }

    #[test]
    fn correspondents_are_sites_of_containing_cells(y in unit(3)) {
        let corr = VoronoiCorrespondence::new(evenly_spaced_circle_set(4).unwrap(), cross_polytope_set(3).unwrap()).unwrap();
        let got = corr.correspondents_of(&y, Side::High, 1e-9).unwrap();
        let expected: Vec<UnitVector> = corr
            .high_set()
            .cells_of(&y, 1e-9)
            .unwrap()
            .into_iter()
            .map(|c| corr.low_set().site(c))
            .collect();
        prop_assert!(!got.is_empty());
        prop_assert_eq!(got, expected);
    }
}
