mod common;

use common::*;
use sphere_gh_core::distortion::SearchBudget;
use sphere_gh_core::exec::Sequential;
use sphere_gh_core::packing::*;
use sphere_gh_core::rng::RngStream;

fn budget() -> SearchBudget {
    SearchBudget::default()
}

fn pack(n: usize, m: usize) -> PackingResult {
    optimize_packing(n, m, &budget(), &RngStream::new(7, 0), &Sequential).unwrap()
}

fn line_dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    d.abs().min(1.0).acos()
}

fn min_lines(p: &[[f64; 3]]) -> f64 {
    let mut best = FRAC_PI_2;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            best = best.min(line_dist(&p[i], &p[j]));
        }
    }
    best
}

fn sph(t: f64, f: f64) -> [f64; 3] {
    [t.sin() * f.cos(), t.sin() * f.sin(), t.cos()]
}

/// Best packing of four lines in ℝ³ by exhaustive grid search (first line
/// on the pole, second in a fixed half-plane) followed by a shrinking
/// random walk in parameter space.
fn grid_polish_four_lines() -> f64 {
    let (na, nt, nf) = (16, 16, 32);
    let mut best = (0.0, [0.0; 5]);
    for ia in 0..=na {
        let a = FRAC_PI_2 * ia as f64 / na as f64;
        let p2 = sph(a, 0.0);
        for it in 0..=nt {
            let t3 = FRAC_PI_2 * it as f64 / nt as f64;
            for i_f in 0..nf {
                let f3 = 2.0 * PI * i_f as f64 / nf as f64;
                let p3 = sph(t3, f3);
                let partial = min_lines(&[[0.0, 0.0, 1.0], p2, p3]);
                if partial <= best.0 {
                    continue;
                }
                for jt in 0..=nt {
                    let t4 = FRAC_PI_2 * jt as f64 / nt as f64;
                    for j_f in 0..nf {
                        let f4 = 2.0 * PI * j_f as f64 / nf as f64;
                        let d = min_lines(&[[0.0, 0.0, 1.0], p2, p3, sph(t4, f4)]);
                        if d > best.0 {
                            best = (d, [a, t3, f3, t4, f4]);
                        }
                    }
                }
            }
        }
    }
    let eval = |q: &[f64; 5]| min_lines(&[[0.0, 0.0, 1.0], sph(q[0], 0.0), sph(q[1], q[2]), sph(q[3], q[4])]);
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut uniform = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut step = 0.1;
    let (mut value, mut q) = best;
    while step > 1e-10 {
        let mut improved = false;
        for _ in 0..50 {
            let mut c = q;
            c.iter_mut().for_each(|x| *x += step * uniform());
            let d = eval(&c);
            if d > value {
                value = d;
                q = c;
                improved = true;
            }
        }
        if !improved {
            step *= 0.7;
        }
    }
    value
}

#[test]
fn four_lines_match_grid_oracle() {
    let oracle = grid_polish_four_lines();
    assert!((oracle - (1.0f64 / 3.0).acos()).abs() < 1e-4, "{oracle}");
    let r = pack(2, 4);
    assert!((r.min_dist - oracle).abs() < 1e-3, "{} vs {oracle}", r.min_dist);
}

#[test]
fn anchors() {
    assert!((pack(1, 5).min_dist - PI / 5.0).abs() < 1e-4);
    for m in 2..=3 {
        assert!((pack(2, m).min_dist - FRAC_PI_2).abs() < 1e-6);
    }
    for m in 2..=4 {
        assert!((pack(3, m).min_dist - FRAC_PI_2).abs() < 1e-6);
    }
}

#[test]
fn results_are_verified_and_canonical() {
    for (n, m) in [(2, 7), (3, 9), (1, 4)] {
        let r = pack(n, m);
        assert_eq!(r.points.len(), m);
        let mut brute = FRAC_PI_2;
        for i in 0..m {
            for j in i + 1..m {
                let d = acos_dist(r.points[i].coords(), r.points[j].coords());
                brute = brute.min(d.min(PI - d));
            }
        }
        assert!((r.min_dist - brute).abs() < 1e-7);
        assert_eq!(r.min_dist, min_projective_distance(&r.points));
        assert!(r.min_dist <= FRAC_PI_2);
        for p in &r.points {
            assert_eq!(p, &canonical_sign(p));
            assert!(*p.coords().iter().find(|c| c.abs() > 1e-12).unwrap() > 0.0);
        }
        assert_eq!(r.restarts_used, budget().restarts);
        let again = pack(n, m);
        assert_eq!(r, again);
    }
}

#[test]
fn packing_radius_decreases_with_more_points() {
    for n in [2, 3] {
        let mut prev = FRAC_PI_2;
        for m in 2..=12 {
            let p = pack(n, m).min_dist;
            // equal optima (e.g. 9 and 10 lines in ℝ⁴) only agree to solver precision
            assert!(p <= prev + 1e-6, "n={n} m={m}: {p} > {prev}");
            prev = p;
        }
    }
}

#[test]
fn radius_scales_like_inverse_root() {
    for n in [2, 3] {
        let scaled: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&m| pack(n, m).min_dist * (m as f64).powf(1.0 / n as f64))
            .collect();
        let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().copied().fold(0.0, f64::max);
        assert!(hi / lo < 1.5, "n={n}: {scaled:?}");
    }
}

#[test]
fn covering_radius_below_packing_radius() {
    for (n, m) in [(2, 4), (2, 6), (3, 8)] {
        let r = pack(n, m);
        let c = covering_radius_estimate(&r.points, 50_000, &RngStream::new(1, 1), &Sequential).unwrap();
        assert!(c.radius_estimate <= r.min_dist + 0.01, "n={n} m={m}");
        let near = r
            .points
            .iter()
            .map(|p| {
                let d = acos_dist(p.coords(), c.witness.coords());
                d.min(PI - d)
            })
            .fold(PI, f64::min);
        assert!((near - c.radius_estimate).abs() < 1e-7);
    }
}

#[test]
fn volume_bound_dominates_optimizer() {
    for (n, m) in [(2, 4), (2, 9), (3, 8), (2, 25)] {
        assert!(packing_upper_bound(n, m) >= pack(n, m).min_dist);
    }
}

#[test]
fn bound_aggregation() {
    for k in 2..=21usize {
        let b = best_bound(1, k, None).unwrap();
        let kf = k as f64;
        let expected = if k % 2 == 0 { kf * PI / (kf + 1.0) } else { (kf - 1.0) * PI / kf };
        assert!((b.value - expected).abs() < 1e-12);
        assert_eq!(b.exactness, Exactness::Exact);
        for n in 2..k {
            let b = best_bound(n, k, None).unwrap();
            assert!((b.general_bound - PI * kf / (kf + 1.0)).abs() < 1e-12);
            assert!(b.value <= b.general_bound);
        }
    }
    let p24 = pack(2, 25).min_dist;
    assert!(packing_bound(2, 24, p24).unwrap() < PI);
    let t = PackingTerms::new(2, 24, p24).unwrap();
    assert!(t.conservative >= t.separation && t.conservative >= t.cross_polytope);
    assert_eq!(t.evaluated, t.cross_polytope.max(t.separation).max(t.diameter_at_lower));
    assert!(t.diameter_at_upper >= t.diameter_at_lower);
}

#[test]
fn table_rows() {
    let ks: Vec<usize> = (3..=12).collect();
    let rows = asymptotic_table(2, &ks, |m| Ok(pack(2, m).min_dist)).unwrap();
    assert_eq!(rows.len(), ks.len());
    for r in &rows {
        assert!(r.gap > 0.0 && r.bound < PI);
        assert!((r.gap_sqrtk - r.gap * (r.k as f64).sqrt()).abs() < 1e-12);
    }
    assert!(asymptotic_table(1, &ks, |_| Ok(0.5)).is_err());
    assert!(asymptotic_table(3, &[3], |_| Ok(0.5)).is_err());
}
