//! Finite antipodal point sets `P = {±p_1, …, ±p_m}` and their Voronoi
//! geometry: separation, cell membership, cell diameters, covering radius.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{shard_count, Executor};
use crate::geometry::{self, exp_map, tangent_part, UnitVector};
use crate::math::{self, FRAC_PI_2, PI};
use crate::rng::RngStream;

/// Default tolerance (radians) for Voronoi cell membership.
pub const CELL_TOL: f64 = 1e-9;

/// Two of the `2m` points closer than this are rejected as coincident.
const COINCIDENCE_TOL: f64 = 1e-9;

/// Samples per estimator shard; budgets are rounded up to whole shards.
pub const ESTIMATE_SHARD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetLabel {
    CircleEven,
    CrossPolytope,
    ArcAugmented,
    Custom,
}

impl SetLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SetLabel::CircleEven => "circle-even",
            SetLabel::CrossPolytope => "cross-polytope",
            SetLabel::ArcAugmented => "arc-augmented",
            SetLabel::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "circle-even" => SetLabel::CircleEven,
            "cross-polytope" => SetLabel::CrossPolytope,
            "arc-augmented" => SetLabel::ArcAugmented,
            "custom" => SetLabel::Custom,
            _ => return None,
        })
    }
}

/// A signed Voronoi cell `±F_i`, numbered `1..=2m`: `i` for `+p_i` and
/// `m + i` for `−p_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellIndex {
    linear: usize,
    m: usize,
}

impl CellIndex {
    pub fn new(linear: usize, m: usize) -> Result<Self> {
        if linear == 0 || linear > 2 * m {
            return Err(Error::InvalidParameter(alloc::format!(
                "cell index {linear} outside 1..={}",
                2 * m
            )));
        }
        Ok(Self { linear, m })
    }

    /// Cell of `sign · p_rep` (`rep` is one-based).
    pub fn from_rep(rep: usize, positive: bool, m: usize) -> Result<Self> {
        if rep == 0 || rep > m {
            return Err(Error::InvalidParameter(alloc::format!(
                "representative {rep} outside 1..={m}"
            )));
        }
        Ok(Self {
            linear: if positive { rep } else { rep + m },
            m,
        })
    }

    pub fn linear(self) -> usize {
        self.linear
    }

    pub fn rep(self) -> usize {
        if self.linear > self.m {
            self.linear - self.m
        } else {
            self.linear
        }
    }

    pub fn sign(self) -> f64 {
        if self.linear > self.m {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_positive(self) -> bool {
        self.linear <= self.m
    }

    pub fn antipode(self) -> Self {
        let linear = if self.linear > self.m {
            self.linear - self.m
        } else {
            self.linear + self.m
        };
        Self { linear, m: self.m }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntipodalSet {
    reps: Vec<UnitVector>,
    dim: usize,
    label: SetLabel,
}

impl AntipodalSet {
    /// The set `{±p : p ∈ reps}`. Rejects empty input, mixed dimensions, and
    /// any two of the `2m` points within `1e−9` of each other.
    pub fn new(reps: Vec<UnitVector>, label: SetLabel) -> Result<Self> {
        let dim = reps.first().ok_or(Error::EmptyBudget).map(UnitVector::dim);
        let dim = dim.map_err(|_| Error::InvalidParameter("antipodal set needs a point".into()))?;
        for r in &reps {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: r.dim(),
                });
            }
        }
        let m = reps.len();
        for i in 0..m {
            for j in i + 1..m {
                let d = geometry::geodesic(reps[i].coords(), reps[j].coords());
                if d < COINCIDENCE_TOL {
                    return Err(Error::CoincidentPoints {
                        first: i + 1,
                        second: j + 1,
                    });
                }
                if PI - d < COINCIDENCE_TOL {
                    return Err(Error::CoincidentPoints {
                        first: i + 1,
                        second: j + 1 + m,
                    });
                }
            }
        }
        Ok(Self { reps, dim, label })
    }

    pub fn reps(&self) -> &[UnitVector] {
        &self.reps
    }

    /// Number of representatives; the set has `2m` points.
    pub fn m(&self) -> usize {
        self.reps.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> SetLabel {
        self.label
    }

    pub fn site(&self, cell: CellIndex) -> UnitVector {
        let p = &self.reps[cell.rep() - 1];
        if cell.is_positive() {
            p.clone()
        } else {
            p.neg()
        }
    }

    /// All `2m` points in linear cell order.
    pub fn sites(&self) -> Vec<UnitVector> {
        self.reps
            .iter()
            .cloned()
            .chain(self.reps.iter().map(UnitVector::neg))
            .collect()
    }

    pub fn cell(&self, linear: usize) -> Result<CellIndex> {
        CellIndex::new(linear, self.m())
    }

    fn check_dim(&self, x: &UnitVector) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.dim(),
            });
        }
        Ok(())
    }

    /// Minimum distance between distinct points of the set.
    pub fn separation(&self) -> f64 {
        let mut best = PI;
        for i in 0..self.reps.len() {
            for j in i + 1..self.reps.len() {
                let d = geometry::projective(self.reps[i].coords(), self.reps[j].coords());
                best = best.min(d);
            }
        }
        best
    }

    /// Distance from `x` to each of the `2m` sites, in linear order.
    fn site_distances(&self, x: &[f64]) -> Vec<f64> {
        let m = self.reps.len();
        let mut out = alloc::vec![0.0; 2 * m];
        for (i, p) in self.reps.iter().enumerate() {
            let d = geometry::geodesic(x, p.coords());
            out[i] = d;
            out[i + m] = PI - d;
        }
        out
    }

    /// Cells whose site distance is within `tol` of the nearest one, in
    /// linear order. More than one cell means `x` lies on a boundary.
    pub fn cells_of(&self, x: &UnitVector, tol: f64) -> Result<Vec<CellIndex>> {
        self.check_dim(x)?;
        Ok(self.cells_of_unchecked(x.coords(), tol))
    }

    pub(crate) fn cells_of_unchecked(&self, x: &[f64], tol: f64) -> Vec<CellIndex> {
        let d = self.site_distances(x);
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        let m = self.m();
        d.iter()
            .enumerate()
            .filter(|(_, &di)| di <= min + tol)
            .map(|(i, _)| CellIndex { linear: i + 1, m })
            .collect()
    }

    /// Nearest cell (lowest index among ties) and its site distance.
    pub(crate) fn nearest_cell(&self, x: &[f64]) -> (CellIndex, f64) {
        let m = self.m();
        let mut best = (0usize, math::dot(x, self.reps[0].coords()));
        for (i, p) in self.reps.iter().enumerate().skip(1) {
            let c = math::dot(x, p.coords());
            if c.abs() > best.1.abs() {
                best = (i, c);
            }
        }
        let (i, c) = best;
        let cell = if c >= 0.0 { i + 1 } else { i + 1 + m };
        let site = if c >= 0.0 {
            self.reps[i].coords().to_vec()
        } else {
            self.reps[i].neg().into_coords()
        };
        (CellIndex { linear: cell, m }, geometry::geodesic(x, &site))
    }

    /// Distance from `x` to the nearest point of the set.
    pub fn nearest_distance(&self, x: &UnitVector) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.nearest_distance_unchecked(x.coords()))
    }

    pub(crate) fn nearest_distance_unchecked(&self, x: &[f64]) -> f64 {
        self.reps
            .iter()
            .map(|p| geometry::projective(x, p.coords()))
            .fold(PI, f64::min)
    }

    /// Whether `x` belongs to `cell` up to `tol`.
    pub fn cell_contains(&self, cell: CellIndex, x: &UnitVector, tol: f64) -> bool {
        x.dim() == self.dim && self.cell_contains_unchecked(cell, x.coords(), tol)
    }

    pub(crate) fn cell_contains_unchecked(&self, cell: CellIndex, x: &[f64], tol: f64) -> bool {
        let d = self.site_distances(x);
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        d[cell.linear - 1] <= min + tol
    }

    /// Pulls `x` into the closed cell (a polyhedral cone intersected with the
    /// sphere) by cyclic projection onto violated half-spaces
    /// `⟨x, s_cell − s_j⟩ ≥ 0`. `None` if that does not converge.
    pub(crate) fn project_to_cell(&self, cell: CellIndex, x: &[f64]) -> Option<UnitVector> {
        let site = self.site(cell).into_coords();
        let normals: Vec<Vec<f64>> = self
            .sites()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i + 1 != cell.linear)
            .map(|(_, s)| site.iter().zip(s.coords()).map(|(a, b)| a - b).collect())
            .collect();
        let mut y = x.to_vec();
        for _ in 0..200 {
            let mut clean = true;
            for n in &normals {
                let nn = math::dot(n, n);
                let c = math::dot(&y, n);
                if c < 0.0 {
                    clean = false;
                    // land slightly inside the half-space
                    let shift = (c - 1e-13 * math::sqrt(nn)) / nn;
                    y.iter_mut().zip(n).for_each(|(yi, ni)| *yi -= shift * ni);
                }
            }
            if clean {
                let len = math::norm(&y);
                if len < 1e-9 {
                    return None;
                }
                let u = UnitVector::normalized(y);
                return self
                    .cell_contains_unchecked(cell, u.coords(), CELL_TOL)
                    .then_some(u);
            }
        }
        None
    }
}

fn circle_point(theta: f64) -> UnitVector {
    UnitVector::from_angle(theta)
}

/// `2m` points of `S^1` at angles `jπ/m`; the first `m` are representatives.
pub fn evenly_spaced_circle_set(m: usize) -> Result<AntipodalSet> {
    if m < 2 {
        return Err(Error::InvalidParameter(alloc::format!(
            "evenly spaced set needs m ≥ 2, got {m}"
        )));
    }
    let reps = (0..m)
        .map(|j| {
            if 4 * j == 2 * m {
                // exact quarter turn keeps e_2 free of roundoff
                UnitVector::basis(1, 1).expect("S^1")
            } else {
                circle_point(j as f64 * PI / m as f64)
            }
        })
        .collect();
    AntipodalSet::new(reps, SetLabel::CircleEven)
}

/// `{±e_1, …, ±e_{k+1}} ⊂ S^k`.
pub fn cross_polytope_set(k: usize) -> Result<AntipodalSet> {
    if k < 1 {
        return Err(Error::InvalidDimension(k));
    }
    let reps = (0..=k)
        .map(|i| UnitVector::basis(k, i))
        .collect::<Result<Vec<_>>>()?;
    AntipodalSet::new(reps, SetLabel::CrossPolytope)
}

/// The `2(k+1)`-point set in `S^n`: cross-polytope vertices plus `k − n`
/// representatives spread along the "positive" arcs `e_i → e_j` and
/// `e_i → −e_j` (`i < j`), visited in lexicographic order. Each arc gets at
/// most `N = ⌈(k−n)/(n(n+1))⌉` points, evenly spaced.
pub fn arc_augmented_set(n: usize, k: usize) -> Result<AntipodalSet> {
    if n < 2 || k <= n {
        return Err(Error::InvalidParameter(alloc::format!(
            "arc-augmented set needs 2 ≤ n < k, got n={n}, k={k}"
        )));
    }
    let arcs = n * (n + 1);
    let per_arc = (k - n).div_ceil(arcs);
    let mut remaining = k - n;
    let mut reps: Vec<UnitVector> = (0..=n)
        .map(|i| UnitVector::basis(n, i))
        .collect::<Result<Vec<_>>>()?;
    'fill: for i in 0..=n {
        for j in i + 1..=n {
            for toward in [1.0, -1.0] {
                if remaining == 0 {
                    break 'fill;
                }
                let count = per_arc.min(remaining);
                remaining -= count;
                for s in 1..=count {
                    let t = FRAC_PI_2 * s as f64 / (count + 1) as f64;
                    let mut c = alloc::vec![0.0; n + 1];
                    c[i] = math::cos(t);
                    c[j] = toward * math::sin(t);
                    reps.push(UnitVector::normalized(c));
                }
            }
        }
    }
    AntipodalSet::new(reps, SetLabel::ArcAugmented)
}

/// `m` uniformly random representatives (resampled on near-coincidence).
pub fn random_set(dim: usize, m: usize, rng: &mut RngStream) -> Result<AntipodalSet> {
    if dim < 1 {
        return Err(Error::InvalidDimension(dim));
    }
    if m < 1 {
        return Err(Error::InvalidParameter("random set needs m ≥ 1".into()));
    }
    let mut reps: Vec<UnitVector> = Vec::with_capacity(m);
    while reps.len() < m {
        let x = geometry::sample_uniform_unchecked(dim, rng);
        if reps
            .iter()
            .all(|p| geometry::projective(p.coords(), x.coords()) > 1e-3)
        {
            reps.push(x);
        }
    }
    AntipodalSet::new(reps, SetLabel::Custom)
}

/// `arccos(−(k−1)/(k+1))`, the Voronoi diameter of the cross-polytope in `S^k`.
pub fn cross_polytope_vdiam_exact(k: usize) -> f64 {
    let k = k as f64;
    math::acos(-(k - 1.0) / (k + 1.0))
}

/// Largest Voronoi cell diameter found, with a pair realizing it.
#[derive(Debug, Clone, PartialEq)]
pub struct VdiamEstimate {
    pub value: f64,
    pub witness: (UnitVector, UnitVector),
    pub cell: CellIndex,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn better_pair(a: &VdiamEstimate, b: &VdiamEstimate) -> bool {
    match a.value.total_cmp(&b.value) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            let o = lex_cmp(a.witness.0.coords(), b.witness.0.coords())
                .then_with(|| lex_cmp(a.witness.1.coords(), b.witness.1.coords()));
            o == Ordering::Less
        }
    }
}

/// Circle sites sorted by angle: `(angle, cell)`.
fn sorted_circle_sites(set: &AntipodalSet) -> Vec<(f64, CellIndex)> {
    let m = set.m();
    let mut sites: Vec<(f64, CellIndex)> = set
        .sites()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let a = s.angle().expect("S^1 site").radians();
            (a, CellIndex { linear: i + 1, m })
        })
        .collect();
    sites.sort_by(|a, b| a.0.total_cmp(&b.0));
    sites
}

fn circle_vdiam(set: &AntipodalSet) -> VdiamEstimate {
    let sites = sorted_circle_sites(set);
    let n = sites.len();
    let gap = |i: usize| {
        let (a, b) = (sites[i].0, sites[(i + 1) % n].0);
        let g = b - a;
        if g <= 0.0 {
            g + math::TAU
        } else {
            g
        }
    };
    let mut best: Option<VdiamEstimate> = None;
    for i in 0..n {
        let before = gap((i + n - 1) % n);
        let after = gap(i);
        let value = ((before + after) / 2.0).min(PI);
        let a = sites[i].0;
        let cand = VdiamEstimate {
            value,
            witness: (
                circle_point(a - before / 2.0),
                circle_point(a + after / 2.0),
            ),
            cell: sites[i].1,
        };
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    best.expect("nonempty set")
}

/// Projected ascent of `d(a, b)` with both points kept inside `cell`.
fn refine_cell_pair(
    set: &AntipodalSet,
    cell: CellIndex,
    mut a: UnitVector,
    mut b: UnitVector,
    iters: usize,
    rng: &mut RngStream,
) -> (f64, UnitVector, UnitVector) {
    let mut value = geometry::geodesic(a.coords(), b.coords());
    let mut step = PI / 16.0;
    for _ in 0..iters {
        let mut moved = false;
        for which in 0..2 {
            let (p, o) = if which == 0 { (&a, &b) } else { (&b, &a) };
            let mut v: Vec<f64> = o.coords().iter().map(|c| -c).collect();
            tangent_part(p.coords(), &mut v);
            let vn = math::norm(&v);
            let mut noise = geometry::gaussian_vec(v.len(), rng);
            tangent_part(p.coords(), &mut noise);
            let nn = math::norm(&noise).max(1e-300);
            let w: f64 = 0.5 * rng.random::<f64>();
            let dir: Vec<f64> = v
                .iter()
                .zip(&noise)
                .map(|(vi, ni)| {
                    let g = if vn > 1e-300 { vi / vn } else { 0.0 };
                    step * (g + w * ni / nn)
                })
                .collect();
            let proposal = exp_map(p.coords(), &dir);
            let Some(q) = set.project_to_cell(cell, proposal.coords()) else {
                continue;
            };
            let d = geometry::geodesic(q.coords(), o.coords());
            if d > value {
                value = d;
                if which == 0 {
                    a = q;
                } else {
                    b = q;
                }
                moved = true;
            }
        }
        if !moved {
            step *= 0.8;
            if step < 1e-12 {
                break;
            }
        }
    }
    (value, a, b)
}

const TOP_PER_CELL: usize = 24;
const REFINED_CELLS: usize = 4;

/// Lower estimate of the largest Voronoi cell diameter.
///
/// On `S^1` the value is exact (cells are arcs between gap midpoints). In
/// higher dimensions each shard of [`ESTIMATE_SHARD`] samples folds its
/// points into the positive cells, keeps the points of each cell farthest
/// from its site, and refines the best pairs by projected ascent. The
/// budget is rounded up to whole shards, so increasing `samples` only adds
/// shards and the estimate cannot decrease.
pub fn voronoi_diameter_estimate<E: Executor + ?Sized>(
    set: &AntipodalSet,
    samples: usize,
    refine_iters: usize,
    rng: &RngStream,
    exec: &E,
) -> Result<VdiamEstimate> {
    if samples == 0 {
        return Err(Error::EmptyBudget);
    }
    if set.dim() == 1 {
        return Ok(circle_vdiam(set));
    }
    let shards = shard_count(samples, ESTIMATE_SHARD);
    let results = exec.map_indexed(shards, |shard| {
        let mut stream = rng.fork(shard as u64);
        vdiam_shard(set, refine_iters, &mut stream)
    });
    let mut best: Option<VdiamEstimate> = None;
    for r in results {
        if best.as_ref().is_none_or(|b| better_pair(&r, b)) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one shard"))
}

fn vdiam_shard(set: &AntipodalSet, refine_iters: usize, rng: &mut RngStream) -> VdiamEstimate {
    let m = set.m();
    // per positive cell: (distance from site, point), sorted descending
    let mut top: Vec<Vec<(f64, UnitVector)>> = alloc::vec![Vec::new(); m];
    for _ in 0..ESTIMATE_SHARD {
        let mut x = geometry::sample_uniform_unchecked(set.dim(), rng);
        let (mut cell, d) = set.nearest_cell(x.coords());
        if !cell.is_positive() {
            x = x.neg();
            cell = cell.antipode();
        }
        let bucket = &mut top[cell.rep() - 1];
        if bucket.len() < TOP_PER_CELL || d > bucket[bucket.len() - 1].0 {
            let pos = bucket.partition_point(|(e, _)| *e >= d);
            bucket.insert(pos, (d, x));
            bucket.truncate(TOP_PER_CELL);
        }
    }
    let mut pairs: Vec<(f64, usize, usize, usize)> = Vec::new();
    for (c, bucket) in top.iter().enumerate() {
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for i in 0..bucket.len() {
            for j in i + 1..bucket.len() {
                let d = geometry::geodesic(bucket[i].1.coords(), bucket[j].1.coords());
                if best.is_none_or(|b| d > b.0) {
                    best = Some((d, c, i, j));
                }
            }
        }
        if let Some(b) = best {
            pairs.push(b);
        } else if let Some((_, x)) = bucket.first() {
            // a lone point still bounds the diameter of its cell from below
            let _ = x;
            pairs.push((0.0, c, 0, 0));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    if pairs.is_empty() {
        let site = set.reps()[0].clone();
        return VdiamEstimate {
            value: 0.0,
            witness: (site.clone(), site),
            cell: CellIndex { linear: 1, m },
        };
    }
    let mut best: Option<VdiamEstimate> = None;
    for &(_, c, i, j) in pairs.iter().take(REFINED_CELLS) {
        let cell = CellIndex { linear: c + 1, m };
        let a = top[c][i].1.clone();
        let b = top[c][j].1.clone();
        let (value, a, b) = refine_cell_pair(set, cell, a, b, refine_iters, rng);
        let cand = VdiamEstimate {
            value,
            witness: (a, b),
            cell,
        };
        if best.as_ref().is_none_or(|b| better_pair(&cand, b)) {
            best = Some(cand);
        }
    }
    best.expect("nonempty")
}

/// Farthest point found from the set, i.e. a lower estimate of the
/// covering radius `sup_x min_p d(x, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringEstimate {
    pub value: f64,
    pub witness: UnitVector,
}

/// Lower estimate of the Hausdorff distance between the sphere and the set.
/// Exact on `S^1` (half the largest gap).
pub fn hausdorff_to_sphere_estimate<E: Executor + ?Sized>(
    set: &AntipodalSet,
    samples: usize,
    rng: &RngStream,
    exec: &E,
) -> Result<CoveringEstimate> {
    if samples == 0 {
        return Err(Error::EmptyBudget);
    }
    if set.dim() == 1 {
        let sites = sorted_circle_sites(set);
        let n = sites.len();
        let mut best = (0.0, 0.0);
        for i in 0..n {
            let mut g = sites[(i + 1) % n].0 - sites[i].0;
            if g <= 0.0 {
                g += math::TAU;
            }
            if g / 2.0 > best.0 {
                best = (g / 2.0, sites[i].0 + g / 2.0);
            }
        }
        return Ok(CoveringEstimate {
            value: best.0,
            witness: circle_point(best.1),
        });
    }
    let reps: Vec<Vec<f64>> = set.reps().iter().map(|p| p.coords().to_vec()).collect();
    Ok(farthest_point_search(
        set.dim(),
        &reps,
        samples,
        rng,
        exec,
    ))
}

/// Maximizes `x ↦ min_i projective(x, points_i)` over `S^dim` by sharded
/// sampling plus ascent away from the nearest points. Antipodal sets use
/// this through their representatives, since the geodesic distance to
/// `{±p}` equals the projective distance to `p`.
pub(crate) fn farthest_point_search<E: Executor + ?Sized>(
    dim: usize,
    points: &[Vec<f64>],
    samples: usize,
    rng: &RngStream,
    exec: &E,
) -> CoveringEstimate {
    let shards = shard_count(samples, ESTIMATE_SHARD);
    let results = exec.map_indexed(shards, |shard| {
        let mut stream = rng.fork(shard as u64);
        farthest_shard(dim, points, &mut stream)
    });
    let mut best: Option<CoveringEstimate> = None;
    for r in results {
        let replace = match &best {
            None => true,
            Some(b) => match r.value.total_cmp(&b.value) {
                Ordering::Greater => true,
                Ordering::Equal => lex_cmp(r.witness.coords(), b.witness.coords()) == Ordering::Less,
                Ordering::Less => false,
            },
        };
        if replace {
            best = Some(r);
        }
    }
    best.expect("at least one shard")
}

fn min_projective(x: &[f64], points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .map(|p| geometry::projective(x, p))
        .fold(PI, f64::min)
}

const FARTHEST_REFINED: usize = 8;
const FARTHEST_ITERS: usize = 200;

fn farthest_shard(dim: usize, points: &[Vec<f64>], rng: &mut RngStream) -> CoveringEstimate {
    let mut top: Vec<(f64, UnitVector)> = Vec::with_capacity(FARTHEST_REFINED + 1);
    for _ in 0..ESTIMATE_SHARD {
        let x = geometry::sample_uniform_unchecked(dim, rng);
        let f = min_projective(x.coords(), points);
        if top.len() < FARTHEST_REFINED || f > top[top.len() - 1].0 {
            let pos = top.partition_point(|(e, _)| *e >= f);
            top.insert(pos, (f, x));
            top.truncate(FARTHEST_REFINED);
        }
    }
    let mut best: Option<CoveringEstimate> = None;
    for (f, x) in top {
        let (value, witness) = climb_away(points, x, f, rng);
        let replace = best.as_ref().is_none_or(|b| {
            value > b.value
                || (value == b.value && lex_cmp(witness.coords(), b.witness.coords()) == Ordering::Less)
        });
        if replace {
            best = Some(CoveringEstimate { value, witness });
        }
    }
    best.expect("nonempty shard")
}

/// Ascent of the distance to the nearest point: step away from all points
/// within a small band of the minimum, plus jitter.
fn climb_away(points: &[Vec<f64>], mut x: UnitVector, mut f: f64, rng: &mut RngStream) -> (f64, UnitVector) {
    let mut step = PI / 16.0;
    for _ in 0..FARTHEST_ITERS {
        let mut dir = alloc::vec![0.0; x.coords().len()];
        for p in points {
            let d = geometry::projective(x.coords(), p);
            if d <= f + step {
                let s = if math::dot(x.coords(), p) >= 0.0 { -1.0 } else { 1.0 };
                dir.iter_mut().zip(p).for_each(|(di, pi)| *di += s * pi);
            }
        }
        tangent_part(x.coords(), &mut dir);
        let dn = math::norm(&dir);
        let mut noise = geometry::gaussian_vec(dir.len(), rng);
        tangent_part(x.coords(), &mut noise);
        let nn = math::norm(&noise).max(1e-300);
        let w: f64 = rng.random::<f64>();
        let v: Vec<f64> = dir
            .iter()
            .zip(&noise)
            .map(|(d, n)| {
                let g = if dn > 1e-300 { d / dn } else { 0.0 };
                step * (g + w * n / nn)
            })
            .collect();
        let y = exp_map(x.coords(), &v);
        let fy = min_projective(y.coords(), points);
        if fy > f {
            f = fy;
            x = y;
        } else {
            step *= 0.8;
            if step < 1e-12 {
                break;
            }
        }
    }
    (f, x)
}
