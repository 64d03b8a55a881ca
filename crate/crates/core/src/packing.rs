//! Projective packings and coverings of `ℝP^n`, and the distance bounds
//! built on them.
//!
//! Points of `ℝP^n` are unit vectors up to sign; every distance here is
//! the projective one, `arccos |⟨x, y⟩|`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::distortion::SearchBudget;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::geometry::{self, exp_map, tangent_part, UnitVector};
use crate::math::{self, FRAC_PI_2, PI};
use crate::pointsets::{self, farthest_point_search, CoveringEstimate};
use crate::rng::RngStream;

/// Soft-min sharpness schedule of the smoothed ascent.
pub const BETA_SCHEDULE: [f64; 4] = [8.0, 32.0, 128.0, 512.0];
const POLISH_BETAS: [f64; 7] = [2048.0, 8192.0, 32768.0, 131072.0, 524288.0, 2097152.0, 8388608.0];

#[derive(Debug, Clone, PartialEq)]
pub struct PackingResult {
    pub points: Vec<UnitVector>,
    pub min_dist: f64,
    pub iterations: usize,
    pub restarts_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringResult {
    pub points: Vec<UnitVector>,
    pub radius_estimate: f64,
    pub witness: UnitVector,
    pub samples: usize,
}

/// Smallest pairwise projective distance.
pub fn min_projective_distance(points: &[UnitVector]) -> f64 {
    let mut best = FRAC_PI_2;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.min(geometry::projective(p.coords(), q.coords()));
        }
    }
    best
}

/// Flips `x` so that its first coordinate of magnitude above `1e−12` is positive.
pub fn canonical_sign(x: &UnitVector) -> UnitVector {
    match x.coords().iter().find(|c| c.abs() > 1e-12) {
        Some(&c) if c < 0.0 => x.neg(),
        _ => x.clone(),
    }
}

struct Config {
    pts: Vec<Vec<f64>>,
}

impl Config {
    fn distances(&self) -> Vec<(usize, usize, f64, f64)> {
        let m = self.pts.len();
        let mut out = Vec::with_capacity(m * (m - 1) / 2);
        for i in 0..m {
            for j in i + 1..m {
                let c = math::dot(&self.pts[i], &self.pts[j]).clamp(-1.0, 1.0);
                out.push((i, j, math::acos(c.abs()), c));
            }
        }
        out
    }

    fn min_dist(&self) -> f64 {
        let m = self.pts.len();
        let mut best = FRAC_PI_2;
        for i in 0..m {
            for j in i + 1..m {
                best = best.min(geometry::projective(&self.pts[i], &self.pts[j]));
            }
        }
        best
    }

    /// `E_β = −(1/β) log Σ exp(−β d_ij)` and its tangent gradient.
    fn energy(&self, beta: f64, grad: Option<&mut [Vec<f64>]>) -> f64 {
        let ds = self.distances();
        let dmin = ds.iter().fold(f64::INFINITY, |a, d| a.min(d.2));
        let weights: Vec<f64> = ds.iter().map(|d| math::exp(-beta * (d.2 - dmin))).collect();
        let total: f64 = weights.iter().sum();
        if let Some(g) = grad {
            g.iter_mut().for_each(|v| v.iter_mut().for_each(|c| *c = 0.0));
            for (&(i, j, _, c), w) in ds.iter().zip(&weights) {
                let s = math::sqrt((1.0 - c * c).max(1e-24));
                let f = -(w / total) * c.signum() / s;
                for t in 0..self.pts[i].len() {
                    let (xi, xj) = (self.pts[i][t], self.pts[j][t]);
                    g[i][t] += f * xj;
                    g[j][t] += f * xi;
                }
            }
            for (gi, xi) in g.iter_mut().zip(&self.pts) {
                tangent_part(xi, gi);
            }
        }
        dmin - math::ln(total) / beta
    }

    fn moved(&self, dirs: &[Vec<f64>], step: f64) -> Config {
        let pts = self
            .pts
            .iter()
            .zip(dirs)
            .map(|(x, d)| {
                let v: Vec<f64> = d.iter().map(|c| c * step).collect();
                exp_map(x, &v).into_coords()
            })
            .collect();
        Config { pts }
    }
}

/// Gradient ascent on `E_β` with an adaptive step; returns iterations used.
fn ascend(cfg: &mut Config, beta: f64, iters: usize, step0: f64, best: &mut (f64, Vec<Vec<f64>>)) -> usize {
    let dim = cfg.pts[0].len();
    let mut grad = alloc::vec![alloc::vec![0.0; dim]; cfg.pts.len()];
    let mut e = cfg.energy(beta, Some(&mut grad));
    let mut step = step0;
    let mut used = 0;
    for _ in 0..iters {
        used += 1;
        let gmax = grad.iter().map(|g| math::norm(g)).fold(0.0, f64::max);
        if gmax < 1e-300 {
            break;
        }
        let dirs: Vec<Vec<f64>> = grad.iter().map(|g| g.iter().map(|c| c / gmax).collect()).collect();
        let cand = cfg.moved(&dirs, step);
        let ec = cand.energy(beta, None);
        if ec > e {
            *cfg = cand;
            e = cfg.energy(beta, Some(&mut grad));
            step = (step * 1.5).min(FRAC_PI_2);
            let md = cfg.min_dist();
            if md > best.0 {
                *best = (md, cfg.pts.clone());
            }
        } else {
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
    }
    used
}

/// Pushes apart the pairs within `band` of the minimum; accepts a move
/// only if the exact minimum grows.
fn polish_active(cfg: &mut Config, iters: usize, step0: f64, decay: f64, best: &mut (f64, Vec<Vec<f64>>)) -> usize {
    let dim = cfg.pts[0].len();
    let mut cur = cfg.min_dist();
    let mut step = step0;
    let mut used = 0;
    for _ in 0..iters {
        used += 1;
        let band = (4.0 * step).max(1e-13);
        let mut dirs = alloc::vec![alloc::vec![0.0; dim]; cfg.pts.len()];
        for (i, j, d, c) in cfg.distances() {
            if d <= cur + band {
                let s = c.signum();
                for t in 0..dim {
                    let (xi, xj) = (cfg.pts[i][t], cfg.pts[j][t]);
                    dirs[i][t] -= s * xj;
                    dirs[j][t] -= s * xi;
                }
            }
        }
        for (d, x) in dirs.iter_mut().zip(&cfg.pts) {
            tangent_part(x, d);
        }
        let dmax = dirs.iter().map(|d| math::norm(d)).fold(0.0, f64::max);
        if dmax < 1e-300 {
            break;
        }
        dirs.iter_mut().for_each(|d| d.iter_mut().for_each(|c| *c /= dmax));
        let cand = cfg.moved(&dirs, step);
        let md = cand.min_dist();
        if md > cur {
            *cfg = cand;
            cur = md;
            if md > best.0 {
                *best = (md, cfg.pts.clone());
            }
        } else {
            step *= decay;
            if step < 1e-14 {
                break;
            }
        }
    }
    used
}

fn warm_start(n: usize, m: usize) -> Option<Vec<Vec<f64>>> {
    if n == 1 {
        return Some(
            (0..m)
                .map(|j| {
                    let t = j as f64 * PI / m as f64;
                    alloc::vec![math::cos(t), math::sin(t)]
                })
                .collect(),
        );
    }
    if m <= n + 1 {
        return Some(
            (0..m)
                .map(|i| {
                    let mut v = alloc::vec![0.0; n + 1];
                    v[i] = 1.0;
                    v
                })
                .collect(),
        );
    }
    pointsets::arc_augmented_set(n, m - 1)
        .ok()
        .map(|s| s.reps().iter().map(|p| p.coords().to_vec()).collect())
}

fn run_restart(n: usize, m: usize, budget: &SearchBudget, index: usize, rng: &mut RngStream) -> (f64, Vec<Vec<f64>>, usize) {
    let start = match (index, warm_start(n, m)) {
        (0, Some(pts)) => pts,
        _ => (0..m)
            .map(|_| geometry::sample_uniform_unchecked(n, rng).into_coords())
            .collect(),
    };
    let mut cfg = Config { pts: start };
    let mut best = (cfg.min_dist(), cfg.pts.clone());
    let mut iterations = 0;
    for beta in BETA_SCHEDULE.iter().chain(&POLISH_BETAS) {
        iterations += ascend(&mut cfg, *beta, budget.refine_iters, budget.initial_step, &mut best);
    }
    cfg = Config { pts: best.1.clone() };
    iterations += polish_active(&mut cfg, budget.refine_iters, budget.initial_step / 16.0, budget.decay, &mut best);
    (best.0, best.1, iterations)
}

fn points_cmp(a: &[UnitVector], b: &[UnitVector]) -> Ordering {
    for (p, q) in a.iter().zip(b) {
        for (x, y) in p.coords().iter().zip(q.coords()) {
            match x.total_cmp(y) {
                Ordering::Equal => {}
                o => return o,
            }
        }
    }
    Ordering::Equal
}

/// Lower bound on `p_m(ℝP^n)`: soft-min ascent through [`BETA_SCHEDULE`]
/// and sharper stages, then active-set polishing, from `budget.restarts`
/// independent starts (the first one warm). `refine_iters` is the
/// iteration cap per stage and `initial_step` the starting step.
pub fn optimize_packing<E: Executor + ?Sized>(
    n: usize,
    m: usize,
    budget: &SearchBudget,
    rng: &RngStream,
    exec: &E,
) -> Result<PackingResult> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    if m < 2 {
        return Err(Error::InvalidParameter(alloc::format!("packing needs m ≥ 2, got {m}")));
    }
    budget.validate()?;
    if budget.restarts == 0 {
        return Err(Error::InvalidParameter("packing needs at least one restart".into()));
    }
    let runs = exec.map_indexed(budget.restarts, |r| run_restart(n, m, budget, r, &mut rng.fork(r as u64)));
    let mut best: Option<PackingResult> = None;
    for (_, pts, iterations) in runs {
        let points: Vec<UnitVector> = pts
            .into_iter()
            .map(|c| canonical_sign(&UnitVector::normalized(c)))
            .collect();
        let min_dist = min_projective_distance(&points);
        let cand = PackingResult {
            points,
            min_dist,
            iterations,
            restarts_used: budget.restarts,
        };
        let replace = best.as_ref().is_none_or(|b| match cand.min_dist.total_cmp(&b.min_dist) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => points_cmp(&cand.points, &b.points) == Ordering::Less,
        });
        if replace {
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Lower estimate of `sup_x min_i d(x, points_i)` over `ℝP^n`; exact for
/// `n = 1`.
pub fn covering_radius_estimate<E: Executor + ?Sized>(
    points: &[UnitVector],
    samples: usize,
    rng: &RngStream,
    exec: &E,
) -> Result<CoveringResult> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidParameter("covering needs at least one point".into()))?;
    let dim = first.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: p.dim(),
        });
    }
    if samples == 0 {
        return Err(Error::EmptyBudget);
    }
    let estimate = if dim == 1 {
        let mut angles: Vec<f64> = points
            .iter()
            .map(|p| math::rem_euclid(math::atan2(p.coords()[1], p.coords()[0]), PI))
            .collect();
        angles.sort_by(f64::total_cmp);
        let mut best = (0.0, 0.0);
        for i in 0..angles.len() {
            let next = if i + 1 < angles.len() { angles[i + 1] } else { angles[0] + PI };
            let gap = next - angles[i];
            if gap / 2.0 > best.0 {
                best = (gap / 2.0, angles[i] + gap / 2.0);
            }
        }
        CoveringEstimate {
            value: best.0,
            witness: UnitVector::from_angle(best.1),
        }
    } else {
        let coords: Vec<Vec<f64>> = points.iter().map(|p| p.coords().to_vec()).collect();
        farthest_point_search(dim, &coords, samples, rng, exec)
    };
    Ok(CoveringResult {
        points: points.to_vec(),
        radius_estimate: estimate.value,
        witness: estimate.witness,
        samples,
    })
}

fn check_pair(n: usize, k: usize) -> Result<()> {
    if n < 2 || k <= n {
        return Err(Error::InvalidParameter(alloc::format!(
            "packing bound needs 2 ≤ n < k, got n={n}, k={k}"
        )));
    }
    Ok(())
}

/// `max{arccos(−(k−1)/(k+1)), π − p, 2p}` evaluated at the supplied `p`.
pub fn packing_bound(n: usize, k: usize, p_lower: f64) -> Result<f64> {
    check_pair(n, k)?;
    if !(p_lower > 0.0 && p_lower <= FRAC_PI_2) {
        return Err(Error::InvalidParameter(alloc::format!(
            "packing radius must lie in (0, π/2], got {p_lower}"
        )));
    }
    Ok(pointsets::cross_polytope_vdiam_exact(k).max(PI - p_lower).max(2.0 * p_lower))
}

/// `∫_0^r sin^{n−1}`, composite Simpson.
fn cap_integral(n: usize, r: f64) -> f64 {
    const STEPS: usize = 512;
    let h = r / STEPS as f64;
    let f = |t: f64| math::powi(math::sin(t), n as i32 - 1);
    let mut s = f(0.0) + f(r);
    for i in 1..STEPS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    s * h / 3.0
}

/// Volume upper bound on `p_m(ℝP^n)`: `m` disjoint balls of radius `p/2`
/// fit in `ℝP^n`.
pub fn packing_upper_bound(n: usize, m: usize) -> f64 {
    let whole = cap_integral(n, FRAC_PI_2);
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    if m as f64 * cap_integral(n, hi / 2.0) <= whole {
        return hi;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if m as f64 * cap_integral(n, mid / 2.0) <= whole {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    UpperBound,
}

impl Exactness {
    pub fn as_str(self) -> &'static str {
        match self {
            Exactness::Exact => "exact",
            Exactness::UpperBound => "upper bound",
        }
    }
}

/// The packing-based terms, each with the value of `p` it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingTerms {
    pub p_lower: f64,
    pub p_upper: f64,
    pub cross_polytope: f64,
    /// `π − p_lower`; conservative.
    pub separation: f64,
    /// `2 p_lower`; not conservative on its own.
    pub diameter_at_lower: f64,
    /// `2 p_upper`.
    pub diameter_at_upper: f64,
    /// The max evaluated at `p_lower`.
    pub evaluated: f64,
    /// `max{cross_polytope, separation, diameter_at_upper}`.
    pub conservative: f64,
}

impl PackingTerms {
    pub fn new(n: usize, k: usize, p_lower: f64) -> Result<Self> {
        let evaluated = packing_bound(n, k, p_lower)?;
        let p_upper = packing_upper_bound(n, k + 1).max(p_lower);
        let cross_polytope = pointsets::cross_polytope_vdiam_exact(k);
        let separation = PI - p_lower;
        let conservative = cross_polytope.max(separation).max(2.0 * p_upper);
        Ok(Self {
            p_lower,
            p_upper,
            cross_polytope,
            separation,
            diameter_at_lower: 2.0 * p_lower,
            diameter_at_upper: 2.0 * p_upper,
            evaluated,
            conservative,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub k: usize,
    /// Bound on `2·d_GH(S^n, S^k)`.
    pub value: f64,
    pub exactness: Exactness,
    pub source: &'static str,
    /// `πk/(k+1)`.
    pub general_bound: f64,
    pub packing: Option<PackingTerms>,
}

pub const SOURCE_CIRCLE_EXACT: &str = "circle-to-sphere exact value";
pub const SOURCE_ARC_AUGMENTED: &str = "arc-augmented voronoi correspondence";
pub const SOURCE_PACKING: &str = "projective packing correspondence";

/// Best available bound on `2·d_GH(S^n, S^k)`. With `p_lower` given
/// (`n ≥ 2`), the packing bound enters through its conservative envelope.
pub fn best_bound(n: usize, k: usize, p_lower: Option<f64>) -> Result<BoundReport> {
    if n < 1 || k <= n {
        return Err(Error::InvalidParameter(alloc::format!("bound needs 1 ≤ n < k, got n={n}, k={k}")));
    }
    let kf = k as f64;
    let general_bound = PI * kf / (kf + 1.0);
    if n == 1 {
        let value = if k.is_multiple_of(2) { general_bound } else { (kf - 1.0) * PI / kf };
        return Ok(BoundReport {
            n,
            k,
            value,
            exactness: Exactness::Exact,
            source: SOURCE_CIRCLE_EXACT,
            general_bound,
            packing: None,
        });
    }
    let packing = p_lower.map(|p| PackingTerms::new(n, k, p)).transpose()?;
    let (value, source) = match packing {
        Some(t) if t.conservative < general_bound => (t.conservative, SOURCE_PACKING),
        _ => (general_bound, SOURCE_ARC_AUGMENTED),
    };
    Ok(BoundReport {
        n,
        k,
        value,
        exactness: Exactness::UpperBound,
        source,
        general_bound,
        packing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub k: usize,
    pub bound: f64,
    pub gap: f64,
    pub gap_sqrtk: f64,
}

/// `(k, bound, π − bound, (π − bound)√k)` for each `k`, with
/// `p_{k+1}(ℝP^n)` lower bounds supplied by `p_lower(k + 1)`.
pub fn asymptotic_table<F>(n: usize, k_values: &[usize], mut p_lower: F) -> Result<Vec<TableRow>>
where
    F: FnMut(usize) -> Result<f64>,
{
    if n < 2 {
        return Err(Error::InvalidParameter(alloc::format!("table needs n ≥ 2, got {n}")));
    }
    k_values
        .iter()
        .map(|&k| {
            check_pair(n, k)?;
            let p = p_lower(k + 1)?;
            let b = best_bound(n, k, Some(p))?;
            let gap = PI - b.value;
            Ok(TableRow {
                k,
                bound: b.value,
                gap,
                gap_sqrtk: gap * math::sqrt(k as f64),
            })
        })
        .collect()
}

/// Euclidean-metric bound `sin(x/2)` on `d_GH` from a geodesic bound `x`
/// on `2·d_GH`.
pub fn euclidean_bound(two_dgh_geodesic: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&two_dgh_geodesic) {
        return Err(Error::InvalidParameter(alloc::format!(
            "geodesic bound must lie in [0, π], got {two_dgh_geodesic}"
        )));
    }
    Ok(math::sin(two_dgh_geodesic / 2.0))
}
