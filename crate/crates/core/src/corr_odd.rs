//! The correspondence `𝓡_k ⊂ S^1 × S^k` for odd `k ≥ 3`.
//!
//! `S^k` is cut into the `2k+2` cross-polytope cells `𝒢_m`, ordered so that
//! consecutive cells alternate sign and cycle through the coordinates, and
//! the second half is the antipode of the first. Each `𝒢_m` is mapped onto
//! the arc `ℱ_m` of width `π/(k+1)` by a distance-decreasing map `f_m`.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::correspondence::{pick, Correspondence, Element, Side};
use crate::error::{Error, Result};
use crate::geometry::{self, circle_distance, CircleAngle, UnitVector};
use crate::math::{self, PI};
use crate::pointsets::CELL_TOL;
use crate::rng::RngStream;

/// Cell `𝒢_m` of `S^k` (equivalently arc `ℱ_m` of `S^1`), `1 ≤ m ≤ 2k+2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedCellId {
    m: usize,
    k: usize,
}

pub fn validate_k(k: usize) -> Result<()> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(alloc::format!(
            "k must be odd and at least 3, got {k}"
        )));
    }
    Ok(())
}

impl OrderedCellId {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        validate_k(k)?;
        if m == 0 || m > 2 * k + 2 {
            return Err(Error::InvalidParameter(alloc::format!(
                "cell index {m} outside 1..={}",
                2 * k + 2
            )));
        }
        Ok(Self { m, k })
    }

    pub fn m(self) -> usize {
        self.m
    }

    pub fn k(self) -> usize {
        self.k
    }

    /// 1-based coordinate that is largest in magnitude on the cell.
    pub fn coord_index(self) -> usize {
        (self.m - 1) % (self.k + 1) + 1
    }

    /// Sign of that coordinate on the cell.
    pub fn sign(self) -> f64 {
        let first = if self.m <= self.k + 1 { self.m } else { self.m - self.k - 1 };
        let s = if first % 2 == 1 { 1.0 } else { -1.0 };
        if self.m <= self.k + 1 {
            s
        } else {
            -s
        }
    }

    /// `m + n`, cyclically in `1..=2k+2`.
    pub fn shifted(self, n: usize) -> Self {
        let count = 2 * self.k + 2;
        Self {
            m: (self.m - 1 + n) % count + 1,
            k: self.k,
        }
    }

    pub fn interval(self) -> CircleInterval {
        let w = PI / (2 * self.k + 2) as f64;
        CircleInterval {
            lo: CircleAngle::new((2 * self.m) as f64 * w - 3.0 * w),
            hi: CircleAngle::new((2 * self.m) as f64 * w - w),
        }
    }

    /// How far `x` is from satisfying the cell's defining inequalities.
    fn violation(self, x: &[f64]) -> f64 {
        let max = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        max - self.sign() * x[self.coord_index() - 1]
    }
}

/// Closed arc `[lo, hi]` of `S^1`, traversed counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleInterval {
    pub lo: CircleAngle,
    pub hi: CircleAngle,
}

impl CircleInterval {
    pub fn width(&self) -> f64 {
        math::rem_euclid(self.hi.radians() - self.lo.radians(), 2.0 * PI)
    }

    pub fn contains(&self, a: CircleAngle, tol: f64) -> bool {
        let half = self.width() / 2.0;
        let mid = self.lo.shifted(half);
        circle_distance(a, mid) <= half + tol
    }
}

fn check_dim(k: usize, x: &UnitVector) -> Result<()> {
    if x.dim() != k {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: k,
        });
    }
    Ok(())
}

/// Every cell `𝒢_m` containing `x` up to `tol`.
pub fn odd_cells_of(k: usize, x: &UnitVector, tol: f64) -> Result<Vec<OrderedCellId>> {
    validate_k(k)?;
    check_dim(k, x)?;
    Ok(cells_unchecked(k, x.coords(), tol))
}

fn cells_unchecked(k: usize, x: &[f64], tol: f64) -> Vec<OrderedCellId> {
    let max = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut out = Vec::new();
    for m in 1..=2 * k + 2 {
        let id = OrderedCellId { m, k };
        let v = id.sign() * x[id.coord_index() - 1];
        if v > 0.0 && v >= max - tol {
            out.push(id);
        }
    }
    out
}

/// `f_m` without the membership check. For `m > k+1` the antipodal
/// extension `f_{m-k-1}(−x) + π` reduces to the same quotient, so one
/// formula covers every cell.
fn f_raw(id: OrderedCellId, x: &[f64]) -> CircleAngle {
    let k = id.k;
    let i = id.coord_index() - 1;
    let num: f64 = x[..i].iter().sum::<f64>() - x[i + 1..].iter().sum::<f64>();
    let scale = PI / (2 * k * (k + 1)) as f64;
    CircleAngle::new((id.m - 1) as f64 * PI / (k + 1) as f64 + scale * num / x[i])
}

/// `f_m(x)` for `x ∈ 𝒢_m` (checked to `1e−9`).
pub fn f_m(k: usize, m: usize, x: &UnitVector) -> Result<CircleAngle> {
    let id = OrderedCellId::new(k, m)?;
    check_dim(k, x)?;
    let violation = id.violation(x.coords());
    if violation > CELL_TOL || id.sign() * x.coords()[id.coord_index() - 1] <= 0.0 {
        return Err(Error::CellMembership { cell: m, k, violation });
    }
    Ok(f_raw(id, x.coords()))
}

/// `A_1^n x` where `A_1(x_1, …, x_{k+1}) = (x_{k+1}, −x_1, …, −x_k)`.
pub fn cyclic_action(k: usize, n: usize, x: &UnitVector) -> Result<UnitVector> {
    check_dim(k, x)?;
    let mut v = x.coords().to_vec();
    for _ in 0..n % (2 * k + 2) {
        v.rotate_right(1);
        v[1..].iter_mut().for_each(|c| *c = -*c);
    }
    Ok(UnitVector::from_unit_coords(v))
}

/// `D_{i,j}(x, z) = |d_{S^1}(f_i x, f_j z) − d_{S^k}(x, z)|`.
pub fn distortion_fn(k: usize, i: usize, j: usize, x: &UnitVector, z: &UnitVector) -> Result<f64> {
    let a = f_m(k, i, x)?;
    let b = f_m(k, j, z)?;
    Ok((circle_distance(a, b) - geometry::geodesic(x.coords(), z.coords())).abs())
}

/// The angles related to `x`, one per cell containing it.
pub fn rk_correspondents(k: usize, x: &UnitVector, tol: f64) -> Result<Vec<(OrderedCellId, CircleAngle)>> {
    Ok(odd_cells_of(k, x, tol)?
        .into_iter()
        .map(|id| (id, f_raw(id, x.coords())))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RkWitness {
    pub x: UnitVector,
    pub first: CircleAngle,
    pub second: CircleAngle,
    pub value: f64,
}

impl RkWitness {
    pub fn elements(&self) -> (Element, Element) {
        let k = self.x.dim() as u32;
        (
            Element {
                low: self.first.to_unit_vector(),
                high: self.x.clone(),
                stratum: 1,
            },
            Element {
                low: self.second.to_unit_vector(),
                high: self.x.clone(),
                stratum: k + 1,
            },
        )
    }
}

/// The pair `(f_1 x, x), (f_{k+1} x, x)` at `x = (e_1 − e_{k+1})/√2`,
/// whose distortion is `(k−1)π/k`.
pub fn rk_distortion_witness(k: usize) -> Result<RkWitness> {
    validate_k(k)?;
    let mut v = alloc::vec![0.0; k + 1];
    v[0] = 1.0;
    v[k] = -1.0;
    let x = UnitVector::new(v)?;
    let first = f_m(k, 1, &x)?;
    let second = f_m(k, k + 1, &x)?;
    let value = circle_distance(first, second);
    Ok(RkWitness { x, first, second, value })
}

/// Cell pairs `(1, j)` left after the cyclic, reflection, and adjacency
/// reductions.
pub fn case_reduction_pairs(k: usize) -> Result<Vec<(usize, usize)>> {
    validate_k(k)?;
    Ok(alloc::vec![(1, k), (1, k + 1)])
}

/// A point on `𝒢_{m1} ∩ 𝒢_{m2}`: the two tied coordinates get the common
/// maximal magnitude with the cells' signs, the rest are Gaussian.
pub fn boundary_sample(k: usize, m1: usize, m2: usize, rng: &mut RngStream) -> Result<UnitVector> {
    let a = OrderedCellId::new(k, m1)?;
    let b = OrderedCellId::new(k, m2)?;
    if a.coord_index() == b.coord_index() {
        return Err(Error::IncompatibleCells { first: m1, second: m2 });
    }
    let mut g = geometry::gaussian_vec(k + 1, rng);
    if rng.random::<bool>() {
        let r: f64 = rng.random();
        g.iter_mut().for_each(|c| *c *= r);
    }
    let mut t = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if t < 1e-12 {
        t = 1.0;
    }
    g[a.coord_index() - 1] = a.sign() * t;
    g[b.coord_index() - 1] = b.sign() * t;
    Ok(UnitVector::normalized(g))
}

/// Two cells share a boundary iff they constrain different coordinates.
pub fn compatible(a: OrderedCellId, b: OrderedCellId) -> bool {
    a.coord_index() != b.coord_index()
}

/// `𝓡_k` as a black-box correspondence; `low` is `S^1`, `high` is `S^k`.
#[derive(Debug, Clone, Copy)]
pub struct OddCorrespondence {
    k: usize,
    tol: f64,
}

impl OddCorrespondence {
    pub fn new(k: usize) -> Result<Self> {
        validate_k(k)?;
        Ok(Self { k, tol: CELL_TOL })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `(k−1)π/k`.
    pub fn bound(&self) -> f64 {
        (self.k - 1) as f64 * PI / self.k as f64
    }

    fn element(&self, id: OrderedCellId, x: UnitVector) -> Element {
        Element {
            low: f_raw(id, x.coords()).to_unit_vector(),
            high: x,
            stratum: id.m as u32,
        }
    }

    fn random_cell(&self, rng: &mut RngStream) -> OrderedCellId {
        OrderedCellId {
            m: rng.random_range(1..=2 * self.k + 2),
            k: self.k,
        }
    }

    fn random_partner(&self, a: OrderedCellId, rng: &mut RngStream) -> OrderedCellId {
        loop {
            let b = self.random_cell(rng);
            if compatible(a, b) {
                return b;
            }
        }
    }

    fn boundary_point(&self, a: OrderedCellId, rng: &mut RngStream) -> UnitVector {
        let b = self.random_partner(a, rng);
        boundary_sample(self.k, a.m, b.m, rng).expect("compatible cells")
    }
}

impl Correspondence for OddCorrespondence {
    fn low_dim(&self) -> usize {
        1
    }

    fn high_dim(&self) -> usize {
        self.k
    }

    fn sample_element(&self, rng: &mut RngStream) -> Element {
        let x = geometry::sample_uniform_unchecked(self.k, rng);
        let cells = cells_unchecked(self.k, x.coords(), self.tol);
        let id = pick(&cells, rng).expect("every point lies in a cell");
        self.element(id, x)
    }

    fn correspondents(&self, side: Side, point: &UnitVector) -> Option<Vec<Element>> {
        match side {
            Side::Low => None,
            Side::High => {
                if point.dim() != self.k {
                    return Some(Vec::new());
                }
                Some(
                    cells_unchecked(self.k, point.coords(), self.tol)
                        .into_iter()
                        .map(|id| self.element(id, point.clone()))
                        .collect(),
                )
            }
        }
    }

    fn queryable_sides(&self) -> &'static [Side] {
        &[Side::High]
    }

    /// Half the draws share one boundary point between two cells; the other
    /// half sample the reduced cell pairs on boundaries, moved by a random
    /// cyclic shift.
    fn sample_focused_pair(&self, rng: &mut RngStream) -> Option<(Element, Element)> {
        let k = self.k;
        if rng.random::<bool>() {
            let a = self.random_cell(rng);
            let b = self.random_partner(a, rng);
            let x = boundary_sample(k, a.m, b.m, rng).expect("compatible cells");
            return Some((self.element(a, x.clone()), self.element(b, x)));
        }
        let pairs = case_reduction_pairs(k).expect("validated k");
        let (i, j) = pick(&pairs, rng).expect("nonempty");
        let (ci, cj) = (OrderedCellId { m: i, k }, OrderedCellId { m: j, k });
        let x = self.boundary_point(ci, rng);
        let z = self.boundary_point(cj, rng);
        let n = rng.random_range(0..2 * k + 2);
        let ax = cyclic_action(k, n, &x).expect("dimension");
        let az = cyclic_action(k, n, &z).expect("dimension");
        Some((self.element(ci.shifted(n), ax), self.element(cj.shifted(n), az)))
    }

    fn stratum_label(&self, stratum: u32) -> String {
        alloc::format!("G{stratum}")
    }
}
