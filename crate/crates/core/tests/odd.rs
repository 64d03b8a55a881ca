mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sphere_gh_core::corr_odd::*;
use sphere_gh_core::correspondence::{pair_distortion, Correspondence};
use sphere_gh_core::distortion::{estimate_distortion, SearchBudget};
use sphere_gh_core::exec::Sequential;
use sphere_gh_core::geometry::{circle_distance, geodesic_distance, CircleAngle, UnitVector};
use sphere_gh_core::pointsets::cross_polytope_vdiam_exact;
use sphere_gh_core::rng::RngStream;

const KS: [usize; 4] = [3, 5, 7, 9];

fn v(c: &[f64]) -> UnitVector {
    UnitVector::new(c.to_vec()).unwrap()
}

fn random_cell(k: usize, rng: &mut RngStream) -> usize {
    rng.random_range(1..=2 * k + 2)
}

#[test]
fn corner_example_by_hand() {
    // x = (1/2, −1/2, 1/2, 1/2); the quotient in f_m is ±1 at every cell
    // containing x, so f_m(x) = (m − 1)π/4 ± π/24
    let x = v(&[0.5, -0.5, 0.5, 0.5]);
    let expected = [(1, -1.0), (2, 7.0), (3, 11.0), (8, 43.0)];
    let got = rk_correspondents(3, &x, 1e-9).unwrap();
    assert_eq!(got.len(), 4);
    for ((id, a), (m, num)) in got.iter().zip(expected) {
        assert_eq!(id.m(), m);
        assert!(circle_distance(*a, CircleAngle::new(num * PI / 24.0)) < 1e-12);
        assert!(circ(a.radians(), f_reference(3, m, x.coords())) < 1e-12);
    }
    let got = rk_correspondents(3, &x.neg(), 1e-9).unwrap();
    let expected = [(4, 19.0), (5, 23.0), (6, 31.0), (7, 35.0)];
    assert_eq!(got.len(), 4);
    for ((id, a), (m, num)) in got.iter().zip(expected) {
        assert_eq!(id.m(), m);
        assert!(circle_distance(*a, CircleAngle::new(num * PI / 24.0)) < 1e-12);
    }
}

#[test]
fn cross_polytope_diameter_below_odd_bound() {
    // equality at k = 3, strict beyond
    assert!((cross_polytope_vdiam_exact(3) - 2.0 * PI / 3.0).abs() < 1e-12);
    for k in 3..=1000 {
        let lhs = (-((k - 1) as f64) / (k + 1) as f64).acos();
        assert!(lhs <= (k - 1) as f64 * PI / k as f64 + 1e-12, "k={k}");
    }
}

#[test]
fn maps_match_reference_and_stay_in_their_arcs() {
    let mut rng = RngStream::new(1, 0);
    for k in KS {
        for _ in 0..250_000 / 4 {
            let m = random_cell(k, &mut rng);
            let x = sample_odd_cell(k, m, &mut rng);
            let a = f_m(k, m, &x).unwrap();
            assert!(circ(a.radians(), f_reference(k, m, x.coords())) < 1e-12);
            let id = OrderedCellId::new(k, m).unwrap();
            assert!(id.interval().contains(a, 1e-9), "k={k} m={m}");
        }
    }
}

#[test]
fn maps_are_distance_decreasing() {
    let mut rng = RngStream::new(2, 0);
    for k in KS {
        for _ in 0..100_000 {
            let m = random_cell(k, &mut rng);
            let x = sample_odd_cell(k, m, &mut rng);
            let y = sample_odd_cell(k, m, &mut rng);
            let ds = geodesic_distance(&x, &y).unwrap();
            let dc = circle_distance(f_m(k, m, &x).unwrap(), f_m(k, m, &y).unwrap());
            assert!(dc < ds || ds < 1e-12, "k={k} m={m}: {dc} vs {ds}");
        }
    }
}

#[test]
fn cyclic_and_antipodal_relations() {
    let mut rng = RngStream::new(3, 0);
    for k in [3, 5, 7] {
        let count = 2 * k + 2;
        for _ in 0..20_000 {
            let m = random_cell(k, &mut rng);
            let n = rng.random_range(0..count);
            let x = sample_odd_cell(k, m, &mut rng);
            let ax = cyclic_action(k, n, &x).unwrap();
            assert_eq!(ax.coords(), a_reference(n, x.coords()).as_slice());
            let target = (m - 1 + n) % count + 1;
            let lhs = f_m(k, target, &ax).unwrap();
            let rhs = f_m(k, m, &x).unwrap().shifted(n as f64 * PI / (k + 1) as f64);
            assert!(circle_distance(lhs, rhs) < 1e-12);
            let anti = (m - 1 + k + 1) % count + 1;
            let lhs = f_m(k, anti, &x.neg()).unwrap();
            let rhs = f_m(k, m, &x).unwrap().shifted(PI);
            assert!(circle_distance(lhs, rhs) < 1e-12);
        }
    }
}

#[test]
fn case_reduction_symmetries() {
    let mut rng = RngStream::new(4, 0);
    for k in [3, 5, 7] {
        let count = 2 * k + 2;
        for _ in 0..20_000 {
            let i = random_cell(k, &mut rng);
            let j = random_cell(k, &mut rng);
            let (i, j) = (i.min(j), i.max(j));
            let x = sample_odd_cell(k, i, &mut rng);
            let z = sample_odd_cell(k, j, &mut rng);
            // shift cell i back to cell 1
            let back = count - (i - 1);
            let (bx, bz) = (cyclic_action(k, back, &x).unwrap(), cyclic_action(k, back, &z).unwrap());
            let d = distortion_fn(k, i, j, &x, &z).unwrap();
            let shifted = distortion_fn(k, 1, j - i + 1, &bx, &bz).unwrap();
            assert!((d - shifted).abs() < 1e-12);
            // reflection through the antipodal cell
            let x1 = sample_odd_cell(k, 1, &mut rng);
            let d1 = distortion_fn(k, 1, j, &x1, &z).unwrap();
            let d2 = distortion_fn(k, j, k + 2, &z, &x1.neg()).unwrap();
            assert!((d1 - d2).abs() < 1e-12);
        }
    }
}

#[test]
fn coordinate_gap_bound() {
    let mut rng = RngStream::new(5, 0);
    for k in [3, 5, 7] {
        for _ in 0..50_000 {
            let m = random_cell(k, &mut rng);
            let x = sample_odd_cell(k, 1, &mut rng);
            let z = sample_odd_cell(k, m, &mut rng);
            let zm = z.coords()[cell_coord(k, m)].abs();
            let e = euclid(x.coords(), z.coords());
            assert!((x.coords()[0] - zm).powi(2) <= e * e + 1e-12);
        }
    }
}

#[test]
fn sufficient_condition_holds_on_samples() {
    let mut rng = RngStream::new(6, 0);
    for k in [3, 5, 7] {
        let kf = k as f64;
        let c = PI / (2.0 * kf * (kf + 1.0));
        for _ in 0..1_000_000 / 6 {
            let x = sample_odd_cell(k, 1, &mut rng);
            let xs = x.coords();
            let sx = xs.iter().sum::<f64>() / xs[0];
            for j in [k, k + 1] {
                let z = sample_odd_cell(k, j, &mut rng);
                let zs = z.coords();
                let lhs = if j == k {
                    c * (sx + (zs[..k].iter().sum::<f64>() - zs[k]) / zs[k - 1] - 2.0 * kf)
                } else {
                    c * (sx + zs.iter().sum::<f64>() / zs[k])
                };
                if lhs > 0.0 {
                    assert!(lhs <= euclid(xs, zs) + 1e-12, "k={k} j={j}");
                }
                assert!(distortion_fn(k, 1, j, &x, &z).unwrap() <= (kf - 1.0) * PI / kf + 1e-12);
            }
        }
    }
}

#[test]
fn boundary_search_dominates_interior_search() {
    for k in [3, 5, 7] {
        let corr = OddCorrespondence::new(k).unwrap();
        for (i, j) in case_reduction_pairs(k).unwrap() {
            let mut rng = RngStream::new(7, (k * 100 + j) as u64);
            let partner = |m: usize, rng: &mut RngStream| loop {
                let p = rng.random_range(1..=2 * k + 2);
                if (p - 1) % (k + 1) != (m - 1) % (k + 1) {
                    return p;
                }
            };
            let (mut boundary, mut interior) = (0.0f64, 0.0f64);
            for _ in 0..20_000 {
                let (pi, pj) = (partner(i, &mut rng), partner(j, &mut rng));
                let x = boundary_sample(k, i, pi, &mut rng).unwrap();
                let z = boundary_sample(k, j, pj, &mut rng).unwrap();
                boundary = boundary.max(distortion_fn(k, i, j, &x, &z).unwrap());
                let x = sample_odd_cell(k, i, &mut rng);
                let z = sample_odd_cell(k, j, &mut rng);
                interior = interior.max(distortion_fn(k, i, j, &x, &z).unwrap());
            }
            assert!(boundary >= interior, "k={k} ({i},{j}): {boundary} < {interior}");
            assert!(boundary <= corr.bound() + 1e-12);
        }
    }
}

#[test]
fn all_cell_pairs_respect_the_bound() {
    let mut rng = RngStream::new(8, 0);
    for k in [3, 5] {
        let bound = (k - 1) as f64 * PI / k as f64;
        for i in 1..=2 * k + 2 {
            for j in i..=2 * k + 2 {
                for _ in 0..500 {
                    let x = sample_odd_cell(k, i, &mut rng);
                    let z = sample_odd_cell(k, j, &mut rng);
                    assert!(distortion_fn(k, i, j, &x, &z).unwrap() <= bound + 1e-12);
                }
            }
        }
    }
}

#[test]
fn estimate_reaches_the_bound() {
    for k in [3, 5] {
        let corr = OddCorrespondence::new(k).unwrap();
        let r = estimate_distortion(&corr, &SearchBudget::default().with_samples(100_000), &RngStream::new(7, 0), &Sequential)
            .unwrap();
        assert!(r.estimate <= corr.bound() + 1e-6);
        assert!(corr.bound() - r.estimate < 0.02);
        assert!(corr.contains(&r.witness.0) && corr.contains(&r.witness.1));
        assert!((pair_distortion(&r.witness.0, &r.witness.1) - r.estimate).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn cells_match_reference(x in unit(5)) {
        let got: Vec<usize> = odd_cells_of(5, &x, 0.0).unwrap().iter().map(|c| c.m()).collect();
        let expected: Vec<usize> = (1..=12).filter(|&m| in_odd_cell(5, m, x.coords())).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn membership_is_enforced(x in unit(3), m in 1usize..=8) {
        let inside = odd_cells_of(3, &x, 1e-9).unwrap().iter().any(|c| c.m() == m);
        prop_assert_eq!(f_m(3, m, &x).is_ok(), inside);
    }

    #[test]
    fn boundary_samples_lie_on_both_cells(seed in 0u64..10_000, m1 in 1usize..=8, m2 in 1usize..=8) {
        let mut rng = RngStream::new(seed, 0);
        let r = boundary_sample(3, m1, m2, &mut rng);
        if (m1 - 1) % 4 == (m2 - 1) % 4 {
            prop_assert!(r.is_err());
        } else {
            let x = r.unwrap();
            let cells: Vec<usize> = odd_cells_of(3, &x, 1e-9).unwrap().iter().map(|c| c.m()).collect();
            prop_assert!(cells.contains(&m1) && cells.contains(&m2));
        }
    }
}
