//! Invariant suites behind `sphere-gh verify`.
//!
//! Each check samples its invariant, tracks the worst deviation together
//! with the sample that produced it, and reports pass when the deviation
//! stays within the check's tolerance. All sampling is seeded, so a suite
//! prints the same records on every run.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::Serialize;
use serde_json::value::RawValue;
use sphere_gh_core::corr_odd::{
    boundary_sample, case_reduction_pairs, cyclic_action, distortion_fn, f_m, odd_cells_of, rk_correspondents,
    rk_distortion_witness, validate_k, OddCorrespondence, OrderedCellId,
};
use sphere_gh_core::corr_voronoi::{PairCase, VoronoiCorrespondence};
use sphere_gh_core::correspondence::{pair_distortion, Correspondence, Element};
use sphere_gh_core::distortion::{estimate_distortion, SearchBudget};
use sphere_gh_core::exec::Executor;
use sphere_gh_core::geometry::{
    chord_length, circle_distance, geodesic_distance, projective_distance, sample_uniform, CircleAngle, UnitVector,
};
use sphere_gh_core::packing::{
    best_bound, covering_radius_estimate, euclidean_bound, min_projective_distance, packing_upper_bound, Exactness,
};
use sphere_gh_core::pointsets::{
    arc_augmented_set, cross_polytope_set, cross_polytope_vdiam_exact, evenly_spaced_circle_set, voronoi_diameter_estimate,
    AntipodalSet, CellIndex,
};
use sphere_gh_core::rng::RngStream;
use sphere_gh_core::Error;

use crate::cache::compute_packing;
use crate::json::{point_json, raw, Num, VerifyRecord};

/// Samples drawn by each sampled property check.
pub const PROPERTY_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scope {
    Geometry,
    Pointsets,
    Rpq,
    Odd,
    Packing,
    All,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub scope: Scope,
    /// Dimensions to check; each scope has its own default.
    pub ks: Option<Vec<usize>>,
    pub budget: SearchBudget,
    pub seed: u64,
}

pub fn run<E: Executor + ?Sized>(cfg: &VerifyConfig, exec: &E) -> Result<Vec<VerifyRecord>, Error> {
    let odd_ks = match (&cfg.ks, cfg.scope) {
        (Some(ks), Scope::Odd) => {
            ks.iter().try_for_each(|&k| validate_k(k))?;
            ks.clone()
        }
        (Some(ks), _) => ks.iter().copied().filter(|&k| validate_k(k).is_ok()).collect(),
        (None, Scope::All) => vec![3, 5, 7],
        (None, _) => vec![3],
    };
    let ks = cfg.ks.clone().unwrap_or_else(|| (2..=8).collect());
    if let Some(&k) = ks.iter().find(|&&k| k < 2) {
        return Err(Error::InvalidParameter(format!("verify needs k ≥ 2, got {k}")));
    }
    let mut out = Vec::new();
    let mut s = Suite {
        out: &mut out,
        seed: cfg.seed,
        budget: &cfg.budget,
        exec,
        next_stream: 0,
    };
    let all = cfg.scope == Scope::All;
    if all || cfg.scope == Scope::Geometry {
        s.geometry()?;
    }
    if all || cfg.scope == Scope::Pointsets {
        s.pointsets(&ks)?;
    }
    if all || cfg.scope == Scope::Rpq {
        for &k in &ks {
            s.rpq(k)?;
        }
    }
    if all || cfg.scope == Scope::Odd {
        for &k in &odd_ks {
            s.odd(k)?;
        }
    }
    if all || cfg.scope == Scope::Packing {
        s.packing()?;
    }
    Ok(out)
}

/// Worst deviation seen by one invariant.
struct Check {
    invariant: String,
    anchor: &'static str,
    tol: f64,
    worst: f64,
    witness: Option<Box<RawValue>>,
}

impl Check {
    fn new(invariant: impl Into<String>, anchor: &'static str, tol: f64) -> Self {
        Check {
            invariant: invariant.into(),
            anchor,
            tol,
            worst: 0.0,
            witness: None,
        }
    }

    /// Records a nonnegative deviation; NaN counts as an infinite one. The
    /// witness is only built when the sample becomes the new worst.
    fn observe<W: Serialize>(&mut self, err: f64, witness: impl FnOnce() -> W) {
        let err = if err.is_nan() { f64::INFINITY } else { err };
        if self.witness.is_none() || err > self.worst {
            self.worst = err;
            self.witness = Some(raw(&witness()));
        }
    }

    fn finish(self) -> VerifyRecord {
        let pass = self.worst <= self.tol;
        VerifyRecord {
            invariant: self.invariant,
            anchor: self.anchor,
            status: if pass { "pass" } else { "fail" },
            max_violation: Num(self.worst),
            witness: self.witness.unwrap_or_else(|| raw(&())),
        }
    }
}

fn excess(value: f64, limit: f64) -> f64 {
    (value - limit).max(0.0)
}

fn outside(value: f64, lo: f64, hi: f64) -> f64 {
    (lo - value).max(value - hi).max(0.0)
}

#[derive(Serialize)]
struct Points<'a> {
    points: Vec<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

fn pts(xs: &[&UnitVector]) -> Points<'static> {
    Points {
        points: xs.iter().map(|x| point_json(x)).collect(),
        note: None,
    }
}

#[derive(Serialize)]
struct Value {
    value: Num,
    expected: Num,
}

fn val(value: f64, expected: f64) -> Value {
    Value {
        value: Num(value),
        expected: Num(expected),
    }
}

#[derive(Serialize)]
struct Pair {
    a_low: Vec<Num>,
    a_high: Vec<Num>,
    b_low: Vec<Num>,
    b_high: Vec<Num>,
    distortion: Num,
    limit: Num,
}

fn pair_witness(a: &Element, b: &Element, limit: f64) -> Pair {
    Pair {
        a_low: point_json(&a.low),
        a_high: point_json(&a.high),
        b_low: point_json(&b.low),
        b_high: point_json(&b.high),
        distortion: Num(pair_distortion(a, b)),
        limit: Num(limit),
    }
}

struct Suite<'a, E: ?Sized> {
    out: &'a mut Vec<VerifyRecord>,
    seed: u64,
    budget: &'a SearchBudget,
    exec: &'a E,
    next_stream: u64,
}

impl<E: Executor + ?Sized> Suite<'_, E> {
    /// A fresh stream per check, in suite order.
    fn rng(&mut self) -> RngStream {
        self.next_stream += 1;
        RngStream::new(self.seed, self.next_stream)
    }

    fn push(&mut self, c: Check) {
        self.out.push(c.finish());
    }

    fn geometry(&mut self) -> Result<(), Error> {
        const ANCHOR: &str = "sphere metric axioms";
        let mut rng = self.rng();
        let mut sym = Check::new("geodesic-symmetry", ANCHOR, 1e-15);
        let mut tri = Check::new("geodesic-triangle-inequality", ANCHOR, 1e-12);
        let mut ident = Check::new("geodesic-identity-and-antipode", ANCHOR, 1e-12);
        let mut fold = Check::new("projective-fold", "projective quotient metric", 1e-12);
        let mut chord = Check::new("chord-relation", "euclidean conversion", 1e-12);
        let mut circle = Check::new("circle-metric-agreement", "circle metric", 1e-12);
        for i in 0..PROPERTY_SAMPLES {
            let dim = 1 + i % 6;
            let [x, y, z] = [(); 3].map(|_| sample_uniform(dim, &mut rng).expect("dim ≥ 1"));
            let dxy = geodesic_distance(&x, &y)?;
            let dyx = geodesic_distance(&y, &x)?;
            sym.observe((dxy - dyx).abs(), || pts(&[&x, &y]));
            let dxz = geodesic_distance(&x, &z)?;
            let dyz = geodesic_distance(&y, &z)?;
            tri.observe(excess(dxz, dxy + dyz), || pts(&[&x, &y, &z]));
            let self_err = geodesic_distance(&x, &x)?.max((geodesic_distance(&x, &x.neg())? - PI).abs());
            ident.observe(self_err, || pts(&[&x]));
            let p = projective_distance(&x, &y)?;
            fold.observe((p - dxy.min(PI - dxy)).abs(), || pts(&[&x, &y]));
            let e = chord_length(&x, &y)?;
            chord.observe((2.0 * (dxy / 2.0).sin() - e).abs(), || pts(&[&x, &y]));
            let (a, b) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            let (ca, cb) = (CircleAngle::new(a), CircleAngle::new(b));
            let on_sphere = geodesic_distance(&ca.to_unit_vector(), &cb.to_unit_vector())?;
            circle.observe((circle_distance(ca, cb) - on_sphere).abs(), || [Num(a), Num(b)]);
        }
        for (a, b, expected) in [
            (0.0, PI, PI),
            (-PI / 24.0, 43.0 * PI / 24.0, PI / 6.0),
            (0.1, 2.0 * PI + 0.1, 0.0),
            (FRAC_PI_2, -FRAC_PI_2, PI),
        ] {
            let d = circle_distance(CircleAngle::new(a), CircleAngle::new(b));
            circle.observe((d - expected).abs(), || val(d, expected));
        }
        for c in [sym, tri, ident, fold, chord, circle] {
            self.push(c);
        }
        Ok(())
    }

    fn pointsets(&mut self, ks: &[usize]) -> Result<(), Error> {
        let mut rng = self.rng();
        let mut closure = Check::new("antipodal-closure", "antipodal point sets", 0.0);
        let mut equivariance = Check::new("cell-antipode-equivariance", "antipodal point sets", 0.0);
        let mut sets: Vec<AntipodalSet> = Vec::new();
        let kmax = ks.iter().copied().max().unwrap_or(2);
        for &k in ks {
            sets.push(evenly_spaced_circle_set(k + 1)?);
            sets.push(cross_polytope_set(k)?);
        }
        for k in 3..=kmax {
            for n in 2..k {
                sets.push(arc_augmented_set(n, k)?);
            }
        }
        for set in &sets {
            let sites = set.sites();
            let closed = sites.len() == 2 * set.m()
                && sites.iter().all(|s| sites.iter().any(|t| t.coords() == s.neg().coords()));
            closure.observe(if closed { 0.0 } else { 1.0 }, || set_tag(set));
            for _ in 0..50 {
                let x = sample_uniform(set.dim(), &mut rng)?;
                let mut plus: Vec<usize> = set.cells_of(&x, 1e-9)?.iter().map(|c| c.antipode().linear()).collect();
                let mut minus: Vec<usize> = set.cells_of(&x.neg(), 1e-9)?.iter().map(|c| c.linear()).collect();
                plus.sort_unstable();
                minus.sort_unstable();
                equivariance.observe(if plus == minus { 0.0 } else { 1.0 }, || pts(&[&x]));
            }
        }
        self.push(closure);
        self.push(equivariance);

        let mut circle = Check::new("circle-set-separation-and-diameter", "evenly spaced circle sets", 1e-12);
        let mut cross_sep = Check::new("cross-polytope-separation", "cross-polytope diameters", 0.0);
        let mut cross_est = Check::new("cross-polytope-diameter-sampled", "cross-polytope diameters", 0.01);
        for &k in ks {
            let m = k + 1;
            let set = evenly_spaced_circle_set(m)?;
            let est = voronoi_diameter_estimate(&set, 1, 0, &rng, self.exec)?;
            let expected = PI / m as f64;
            circle.observe((set.separation() - expected).abs().max((est.value - expected).abs()), || {
                val(est.value, expected)
            });
            let cross = cross_polytope_set(k)?;
            let sep = cross.separation();
            cross_sep.observe((sep - FRAC_PI_2).abs(), || val(sep, FRAC_PI_2));
            if k <= 6 {
                let exact = cross_polytope_vdiam_exact(k);
                let stream = self.rng();
                let est = voronoi_diameter_estimate(&cross, 100_000, self.budget.refine_iters, &stream, self.exec)?;
                // a lower estimate: above the exact value is a hard failure
                let err = if est.value > exact + 1e-9 { f64::INFINITY } else { exact - est.value };
                cross_est.observe(err, || val(est.value, exact));
            }
        }
        self.push(circle);
        self.push(cross_sep);
        self.push(cross_est);

        let mut ratio = Check::new("cross-polytope-diameter-below-odd-bound", "cross-polytope diameters", 1e-12);
        for k in 3..=1000usize {
            let lhs = cross_polytope_vdiam_exact(k);
            let rhs = (k - 1) as f64 * PI / k as f64;
            ratio.observe(excess(lhs, rhs), || val(lhs, rhs));
        }
        let at3 = cross_polytope_vdiam_exact(3);
        ratio.observe((at3 - 2.0 * PI / 3.0).abs(), || val(at3, 2.0 * PI / 3.0));
        self.push(ratio);

        let mut size = Check::new("arc-set-size", "arc-augmented sets", 0.0);
        let mut sep = Check::new("arc-set-separation", "arc-augmented sets", 1e-12);
        let mut diam = Check::new("arc-set-diameter-sampled", "arc-augmented sets", 0.02);
        for k in 3..=kmax {
            for n in 2..k {
                let set = arc_augmented_set(n, k)?;
                let count = set.sites().len();
                size.observe(count.abs_diff(2 * (k + 1)) as f64, || [n, k, count]);
                let s = set.separation();
                let floor = PI / (k - n + 3) as f64;
                sep.observe(excess(floor, s), || ArcWitness { n, k, value: Num(s), limit: Num(floor) });
                let stream = self.rng();
                let est = voronoi_diameter_estimate(&set, 8192, 50, &stream, self.exec)?;
                let cap = PI * n as f64 / (n + 1) as f64;
                diam.observe(excess(est.value, cap), || ArcWitness { n, k, value: Num(est.value), limit: Num(cap) });
            }
        }
        self.push(size);
        self.push(sep);
        self.push(diam);
        Ok(())
    }

    fn rpq(&mut self, k: usize) -> Result<(), Error> {
        const ANCHOR: &str = "voronoi correspondence distortion";
        let corr = VoronoiCorrespondence::new(evenly_spaced_circle_set(k + 1)?, cross_polytope_set(k)?)?;
        let vl = PI / (k + 1) as f64;
        let vh = cross_polytope_vdiam_exact(k);
        let bound = corr.bound(vl, vh);
        let target = k as f64 * PI / (k + 1) as f64;
        let mut rng = self.rng();
        let mut formula = Check::new(format!("rpq-bound-formula/k={k}"), ANCHOR, 1e-12);
        formula.observe((bound - target).abs(), || val(bound, target));
        self.push(formula);
        for case in PairCase::ALL {
            let limit = corr.case_bound(case, vl, vh);
            let mut c = Check::new(format!("rpq-case-{}/k={k}", case.name()), ANCHOR, 1e-9);
            for _ in 0..PROPERTY_SAMPLES / 20 {
                let (a, b) = case_pair(&corr, case, &mut rng);
                let err = if corr.classify(&a, &b) != case || !corr.contains(&a) || !corr.contains(&b) {
                    f64::INFINITY
                } else {
                    excess(pair_distortion(&a, &b), limit)
                };
                c.observe(err, || pair_witness(&a, &b, limit));
            }
            self.push(c);
        }
        let stream = self.rng();
        let r = estimate_distortion(&corr, self.budget, &stream, self.exec)?;
        let mut est = Check::new(format!("rpq-estimate-two-sided/k={k}"), ANCHOR, 0.0);
        let sound = corr.contains(&r.witness.0)
            && corr.contains(&r.witness.1)
            && (pair_distortion(&r.witness.0, &r.witness.1) - r.estimate).abs() < 1e-12;
        let err = if sound { outside(r.estimate, target - 0.02, bound + 1e-6) } else { f64::INFINITY };
        est.observe(err, || pair_witness(&r.witness.0, &r.witness.1, bound));
        self.push(est);
        Ok(())
    }

    fn odd(&mut self, k: usize) -> Result<(), Error> {
        const ANCHOR: &str = "odd correspondence";
        let kf = k as f64;
        let count = 2 * k + 2;
        let bound = (kf - 1.0) * PI / kf;
        let mut rng = self.rng();
        let tag = |name: &str| format!("{name}/k={k}");

        if k == 3 {
            let mut c = Check::new("odd-corner-example", "odd correspondence corner example", 1e-12);
            let x = UnitVector::new(vec![0.5, -0.5, 0.5, 0.5])?;
            for (point, expected) in [(x.clone(), [(1, -1.0), (2, 7.0), (3, 11.0), (8, 43.0)]), (x.neg(), [
                (4, 19.0),
                (5, 23.0),
                (6, 31.0),
                (7, 35.0),
            ])] {
                let got = rk_correspondents(3, &point, 1e-9)?;
                if got.len() != expected.len() || got.iter().zip(&expected).any(|((id, _), (m, _))| id.m() != *m) {
                    c.observe(f64::INFINITY, || pts(&[&point]));
                    continue;
                }
                for ((_, a), (_, num)) in got.iter().zip(expected) {
                    let e = CircleAngle::new(num * PI / 24.0);
                    c.observe(circle_distance(*a, e), || val(a.radians(), e.radians()));
                }
            }
            self.push(c);
        }

        let w = rk_distortion_witness(k)?;
        let (a, b) = w.elements();
        let corr = OddCorrespondence::new(k)?;
        let mut c = Check::new(tag("odd-witness-value"), ANCHOR, 1e-12);
        let ok = corr.contains(&a) && corr.contains(&b);
        let err = if ok { (w.value - bound).abs().max((pair_distortion(&a, &b) - bound).abs()) } else { f64::INFINITY };
        c.observe(err, || pair_witness(&a, &b, bound));
        self.push(c);

        let mut confine = Check::new(tag("odd-map-confinement"), ANCHOR, 1e-9);
        let mut decrease = Check::new(tag("odd-map-distance-decrease"), ANCHOR, 0.0);
        let mut cyclic = Check::new(tag("odd-cyclic-relation"), ANCHOR, 1e-12);
        let mut antipodal = Check::new(tag("odd-antipodal-relation"), ANCHOR, 1e-12);
        for _ in 0..PROPERTY_SAMPLES {
            let m = rng.random_range(1..=count);
            let x = odd_cell_point(k, m, &mut rng)?;
            let y = odd_cell_point(k, m, &mut rng)?;
            let fx = f_m(k, m, &x)?;
            let iv = OrderedCellId::new(k, m)?.interval();
            let off = if iv.contains(fx, 0.0) {
                0.0
            } else {
                circle_distance(fx, iv.lo).min(circle_distance(fx, iv.hi))
            };
            confine.observe(off, || pts(&[&x]));
            let ds = geodesic_distance(&x, &y)?;
            let dc = circle_distance(fx, f_m(k, m, &y)?);
            let err = if ds < 1e-12 || dc < ds { 0.0 } else { (dc - ds).max(f64::EPSILON) };
            decrease.observe(err, || pts(&[&x, &y]));
            let n = rng.random_range(0..count);
            let ax = cyclic_action(k, n, &x)?;
            let lhs = f_m(k, (m - 1 + n) % count + 1, &ax)?;
            let rhs = fx.shifted(n as f64 * PI / (kf + 1.0));
            cyclic.observe(circle_distance(lhs, rhs), || pts(&[&x]));
            let lhs = f_m(k, (m + k) % count + 1, &x.neg())?;
            antipodal.observe(circle_distance(lhs, fx.shifted(PI)), || pts(&[&x]));
        }
        for c in [confine, decrease, cyclic, antipodal] {
            self.push(c);
        }

        let mut shift = Check::new(tag("odd-case-reduction-shift"), ANCHOR, 1e-12);
        let mut reflect = Check::new(tag("odd-case-reduction-reflection"), ANCHOR, 1e-12);
        let mut gap = Check::new(tag("odd-coordinate-gap"), ANCHOR, 1e-12);
        let mut all_pairs = Check::new(tag("odd-distortion-below-bound"), ANCHOR, 1e-12);
        for _ in 0..PROPERTY_SAMPLES {
            let (i, j) = {
                let (p, q) = (rng.random_range(1..=count), rng.random_range(1..=count));
                (p.min(q), p.max(q))
            };
            let x = odd_cell_point(k, i, &mut rng)?;
            let z = odd_cell_point(k, j, &mut rng)?;
            let back = count - (i - 1);
            let d = distortion_fn(k, i, j, &x, &z)?;
            let d_shift = distortion_fn(k, 1, j - i + 1, &cyclic_action(k, back, &x)?, &cyclic_action(k, back, &z)?)?;
            shift.observe((d - d_shift).abs(), || pts(&[&x, &z]));
            all_pairs.observe(excess(d, bound), || pts(&[&x, &z]));
            let x1 = odd_cell_point(k, 1, &mut rng)?;
            let d1 = distortion_fn(k, 1, j, &x1, &z)?;
            let d2 = distortion_fn(k, j, k + 2, &z, &x1.neg())?;
            reflect.observe((d1 - d2).abs(), || pts(&[&x1, &z]));
            let zm = z.coords()[(j - 1) % (k + 1)].abs();
            let e = chord_length(&x1, &z)?;
            gap.observe(excess((x1.coords()[0] - zm).powi(2), e * e), || pts(&[&x1, &z]));
        }
        for c in [shift, reflect, gap, all_pairs] {
            self.push(c);
        }

        let mut sufficient = Check::new(tag("odd-sufficient-condition"), ANCHOR, 1e-12);
        let c0 = PI / (2.0 * kf * (kf + 1.0));
        for _ in 0..PROPERTY_SAMPLES {
            let x = odd_cell_point(k, 1, &mut rng)?;
            let xs = x.coords();
            let sx = xs.iter().sum::<f64>() / xs[0];
            for j in [k, k + 1] {
                let z = odd_cell_point(k, j, &mut rng)?;
                let zs = z.coords();
                let lhs = if j == k {
                    c0 * (sx + (zs[..k].iter().sum::<f64>() - zs[k]) / zs[k - 1] - 2.0 * kf)
                } else {
                    c0 * (sx + zs.iter().sum::<f64>() / zs[k])
                };
                let e = chord_length(&x, &z)?;
                sufficient.observe(excess(lhs, e), || pts(&[&x, &z]));
            }
        }
        self.push(sufficient);

        let mut dominance = Check::new(tag("odd-boundary-dominates-interior"), ANCHOR, 0.0);
        for (i, j) in case_reduction_pairs(k)? {
            let partner = |m: usize, rng: &mut RngStream| loop {
                let p = rng.random_range(1..=count);
                if (p - 1) % (k + 1) != (m - 1) % (k + 1) {
                    return p;
                }
            };
            let (mut boundary, mut interior) = (0.0f64, 0.0f64);
            for _ in 0..PROPERTY_SAMPLES / 4 {
                let (pi, pj) = (partner(i, &mut rng), partner(j, &mut rng));
                let x = boundary_sample(k, i, pi, &mut rng)?;
                let z = boundary_sample(k, j, pj, &mut rng)?;
                boundary = boundary.max(distortion_fn(k, i, j, &x, &z)?);
                let x = odd_cell_point(k, i, &mut rng)?;
                let z = odd_cell_point(k, j, &mut rng)?;
                interior = interior.max(distortion_fn(k, i, j, &x, &z)?);
            }
            dominance.observe(excess(interior, boundary), || [i, j]);
        }
        self.push(dominance);

        let stream = self.rng();
        let r = estimate_distortion(&corr, self.budget, &stream, self.exec)?;
        let mut est = Check::new(tag("odd-estimate-two-sided"), ANCHOR, 0.0);
        let sound = corr.contains(&r.witness.0)
            && corr.contains(&r.witness.1)
            && (pair_distortion(&r.witness.0, &r.witness.1) - r.estimate).abs() < 1e-12;
        let err = if sound { outside(r.estimate, bound - 0.02, bound + 1e-6) } else { f64::INFINITY };
        est.observe(err, || pair_witness(&r.witness.0, &r.witness.1, bound));
        self.push(est);
        Ok(())
    }

    fn packing(&mut self) -> Result<(), Error> {
        const ANCHOR: &str = "projective packings";
        let mut anchors = Check::new("packing-anchors", ANCHOR, 0.0);
        let targets = [
            (1, 5, PI / 5.0, 1e-4),
            (2, 2, FRAC_PI_2, 1e-6),
            (2, 3, FRAC_PI_2, 1e-6),
            (2, 4, (1.0f64 / 3.0).acos(), 1e-3),
        ];
        for (n, m, expected, tol) in targets {
            let r = compute_packing(n, m, self.budget, self.seed, self.exec)?;
            let exact = r.min_dist == min_projective_distance(&r.points);
            let err = if exact { excess((r.min_dist - expected).abs(), tol) } else { f64::INFINITY };
            anchors.observe(err, || PackingWitness { n, m, value: Num(r.min_dist), limit: Num(expected) });
        }
        self.push(anchors);

        let mut volume = Check::new("packing-volume-bound", ANCHOR, 1e-12);
        let mut covering = Check::new("covering-below-packing", ANCHOR, 0.01);
        for (n, m) in [(2, 5), (2, 6), (2, 8), (3, 6), (3, 8)] {
            let r = compute_packing(n, m, self.budget, self.seed, self.exec)?;
            let cap = packing_upper_bound(n, m);
            volume.observe(excess(r.min_dist, cap), || PackingWitness { n, m, value: Num(r.min_dist), limit: Num(cap) });
            let stream = self.rng();
            let c = covering_radius_estimate(&r.points, 20_000, &stream, self.exec)?;
            covering.observe(excess(c.radius_estimate, r.min_dist), || PackingWitness {
                n,
                m,
                value: Num(c.radius_estimate),
                limit: Num(r.min_dist),
            });
        }
        self.push(volume);
        self.push(covering);

        let mut table = Check::new("closed-form-bounds", "two-sphere bounds", 1e-12);
        for k in 2..=21usize {
            for n in 1..k {
                let b = best_bound(n, k, None)?;
                let kf = k as f64;
                let expected = match (n, k % 2) {
                    (1, 1) => (kf - 1.0) * PI / kf,
                    _ => kf * PI / (kf + 1.0),
                };
                let wrong_kind = (n == 1) != (b.exactness == Exactness::Exact);
                let err = if wrong_kind { f64::INFINITY } else { (b.value - expected).abs() };
                table.observe(err, || ArcWitness { n, k, value: Num(b.value), limit: Num(expected) });
            }
        }
        self.push(table);

        let mut euclid = Check::new("euclidean-conversion", "euclidean conversion", 1e-15);
        for i in 0..=100 {
            let x = PI * i as f64 / 100.0;
            let e = euclidean_bound(x)?;
            euclid.observe((e - (x / 2.0).sin()).abs(), || val(e, (x / 2.0).sin()));
        }
        self.push(euclid);
        Ok(())
    }
}

#[derive(Serialize)]
struct ArcWitness {
    n: usize,
    k: usize,
    value: Num,
    limit: Num,
}

#[derive(Serialize)]
struct PackingWitness {
    n: usize,
    m: usize,
    value: Num,
    limit: Num,
}

#[derive(Serialize)]
struct SetTag {
    label: &'static str,
    dim: usize,
    m: usize,
}

fn set_tag(set: &AntipodalSet) -> SetTag {
    SetTag {
        label: set.label().as_str(),
        dim: set.dim(),
        m: set.m(),
    }
}

/// Uniform point of the interior of `𝒢_m`: a uniform point moved into
/// cell `m` by the cyclic action, which permutes the cells.
pub fn odd_cell_point(k: usize, m: usize, rng: &mut RngStream) -> Result<UnitVector, Error> {
    loop {
        let x = sample_uniform(k, rng)?;
        let cells = odd_cells_of(k, &x, 0.0)?;
        let [only] = cells.as_slice() else { continue };
        let count = 2 * k + 2;
        let n = (m + count - only.m()) % count;
        return cyclic_action(k, n, &x);
    }
}

fn random_cell(m: usize, rng: &mut RngStream) -> CellIndex {
    CellIndex::new(rng.random_range(1..=2 * m), m).expect("index in range")
}

fn other_rep(c: CellIndex, m: usize, rng: &mut RngStream) -> CellIndex {
    loop {
        let d = random_cell(m, rng);
        if d.rep() != c.rep() {
            return d;
        }
    }
}

fn voronoi_point(set: &AntipodalSet, cell: CellIndex, rng: &mut RngStream) -> UnitVector {
    loop {
        let x = sample_uniform(set.dim(), rng).expect("dim ≥ 1");
        if set.cell_contains(cell, &x, 0.0) {
            return x;
        }
    }
}

/// A random pair of relation elements falling under `case`.
pub fn case_pair(c: &VoronoiCorrespondence, case: PairCase, rng: &mut RngStream) -> (Element, Element) {
    let m = c.m();
    let low = |cell, rng: &mut RngStream| c.low_site_element(cell, voronoi_point(c.high_set(), cell, rng));
    let high = |cell, rng: &mut RngStream| c.high_site_element(cell, voronoi_point(c.low_set(), cell, rng));
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
