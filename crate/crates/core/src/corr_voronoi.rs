//! The Voronoi-collapse correspondence `R_{P,Q}`: every cell `±G_i ⊂ S^k`
//! collapses onto `±p_i`, and every cell `±F_i ⊂ S^n` onto `±q_i`.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::correspondence::{pick, Correspondence, Element, Side};
use crate::error::{Error, Result};
use crate::geometry::{self, UnitVector};
use crate::math::{self, FRAC_PI_2, PI};
use crate::pointsets::{AntipodalSet, CellIndex, CELL_TOL};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct VoronoiCorrespondence {
    low: AntipodalSet,
    high: AntipodalSet,
    tol: f64,
}

/// The nine configurations of two elements of `R_{P,Q}`, by which
/// coordinate of each element is a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairCase {
    /// `x = x' = ±p_i`.
    SameLowSite,
    /// `x = −x' = ±p_i`.
    AntipodalLowSites,
    /// `x = ±p_i`, `x' = ±p_j`, `i ≠ j`.
    DistinctLowSites,
    /// `x = ±p_i`, `y' = ±q_i` with matching signs.
    MatchedSites,
    /// `x = ±p_i`, `y' = ∓q_i`.
    OppositeSites,
    /// `x = ±p_i`, `y' = ±q_j`, `i ≠ j`.
    UnmatchedSites,
    /// `y = ±q_i`, `y' = ±q_j`, `i ≠ j`.
    DistinctHighSites,
    /// `y = −y' = ±q_i`.
    AntipodalHighSites,
    /// `y = y' = ±q_i`.
    SameHighSite,
}

impl PairCase {
    pub const ALL: [PairCase; 9] = [
        PairCase::SameLowSite,
        PairCase::AntipodalLowSites,
        PairCase::DistinctLowSites,
        PairCase::MatchedSites,
        PairCase::OppositeSites,
        PairCase::UnmatchedSites,
        PairCase::DistinctHighSites,
        PairCase::AntipodalHighSites,
        PairCase::SameHighSite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairCase::SameLowSite => "same-low-site",
            PairCase::AntipodalLowSites => "antipodal-low-sites",
            PairCase::DistinctLowSites => "distinct-low-sites",
            PairCase::MatchedSites => "matched-sites",
            PairCase::OppositeSites => "opposite-sites",
            PairCase::UnmatchedSites => "unmatched-sites",
            PairCase::DistinctHighSites => "distinct-high-sites",
            PairCase::AntipodalHighSites => "antipodal-high-sites",
            PairCase::SameHighSite => "same-high-site",
        }
    }
}

/// Where an element of `R_{P,Q}` is anchored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// `(site of P-cell, y)` with `y` in the matching `Q`-cell.
    LowSite(CellIndex),
    /// `(x, site of Q-cell)` with `x` in the matching `P`-cell.
    HighSite(CellIndex),
}

impl VoronoiCorrespondence {
    /// `low` lives in `S^n`, `high` in `S^k`; both need the same number of
    /// representatives.
    pub fn new(low: AntipodalSet, high: AntipodalSet) -> Result<Self> {
        if low.m() != high.m() {
            return Err(Error::SizeMismatch {
                low: low.m(),
                high: high.m(),
            });
        }
        Ok(Self {
            low,
            high,
            tol: CELL_TOL,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn low_set(&self) -> &AntipodalSet {
        &self.low
    }

    pub fn high_set(&self) -> &AntipodalSet {
        &self.high
    }

    pub fn m(&self) -> usize {
        self.low.m()
    }

    /// `max{vdiam(P), π − sep(P), vdiam(Q), π − sep(Q)}`.
    pub fn bound(&self, vdiam_low: f64, vdiam_high: f64) -> f64 {
        vdiam_low
            .max(PI - self.low.separation())
            .max(vdiam_high)
            .max(PI - self.high.separation())
    }

    /// Points of the opposite sphere related to `point` (which lives on `side`).
    pub fn correspondents_of(&self, point: &UnitVector, side: Side, tol: f64) -> Result<Vec<UnitVector>> {
        let (own, other) = match side {
            Side::Low => (&self.low, &self.high),
            Side::High => (&self.high, &self.low),
        };
        let cells = own.cells_of(point, tol)?;
        Ok(cells.into_iter().map(|c| other.site(c)).collect())
    }

    pub fn anchor(&self, e: &Element) -> Anchor {
        let m2 = 2 * self.m() as u32;
        let m = self.m();
        if e.stratum < m2 {
            Anchor::LowSite(CellIndex::new(e.stratum as usize + 1, m).expect("stratum"))
        } else {
            Anchor::HighSite(CellIndex::new((e.stratum - m2) as usize + 1, m).expect("stratum"))
        }
    }

    /// Element `(site of low cell, y)`.
    pub fn low_site_element(&self, cell: CellIndex, y: UnitVector) -> Element {
        Element {
            low: self.low.site(cell),
            high: y,
            stratum: cell.linear() as u32 - 1,
        }
    }

    /// Element `(x, site of high cell)`.
    pub fn high_site_element(&self, cell: CellIndex, x: UnitVector) -> Element {
        Element {
            low: x,
            high: self.high.site(cell),
            stratum: 2 * self.m() as u32 + cell.linear() as u32 - 1,
        }
    }

    pub fn classify(&self, a: &Element, b: &Element) -> PairCase {
        use Anchor::*;
        match (self.anchor(a), self.anchor(b)) {
            (LowSite(c), LowSite(d)) => {
                if c == d {
                    PairCase::SameLowSite
                } else if c.antipode() == d {
                    PairCase::AntipodalLowSites
                } else {
                    PairCase::DistinctLowSites
                }
            }
            (HighSite(c), HighSite(d)) => {
                if c == d {
                    PairCase::SameHighSite
                } else if c.antipode() == d {
                    PairCase::AntipodalHighSites
                } else {
                    PairCase::DistinctHighSites
                }
            }
            (LowSite(c), HighSite(d)) | (HighSite(d), LowSite(c)) => {
                if c.rep() != d.rep() {
                    PairCase::UnmatchedSites
                } else if c.sign() == d.sign() {
                    PairCase::MatchedSites
                } else {
                    PairCase::OppositeSites
                }
            }
        }
    }

    /// Per-case bound on the distortion of a pair in that case.
    pub fn case_bound(&self, case: PairCase, vdiam_low: f64, vdiam_high: f64) -> f64 {
        let sep_low = self.low.separation();
        let sep_high = self.high.separation();
        match case {
            PairCase::SameLowSite | PairCase::AntipodalLowSites => vdiam_high,
            PairCase::DistinctLowSites => PI - sep_low,
            PairCase::MatchedSites | PairCase::OppositeSites => FRAC_PI_2,
            PairCase::UnmatchedSites => PI - (sep_low + sep_high) / 2.0,
            PairCase::DistinctHighSites => PI - sep_high,
            PairCase::AntipodalHighSites | PairCase::SameHighSite => vdiam_low,
        }
    }
}

impl Correspondence for VoronoiCorrespondence {
    fn low_dim(&self) -> usize {
        self.low.dim()
    }

    fn high_dim(&self) -> usize {
        self.high.dim()
    }

    fn sample_element(&self, rng: &mut RngStream) -> Element {
        let side = if rng.random::<bool>() { Side::High } else { Side::Low };
        let dim = match side {
            Side::Low => self.low.dim(),
            Side::High => self.high.dim(),
        };
        let point = geometry::sample_uniform_unchecked(dim, rng);
        let all = self.correspondents(side, &point).expect("both sides queryable");
        pick(&all, rng).expect("every point lies in a cell")
    }

    fn correspondents(&self, side: Side, point: &UnitVector) -> Option<Vec<Element>> {
        Some(match side {
            Side::High => {
                if point.dim() != self.high.dim() {
                    return Some(Vec::new());
                }
                self.high
                    .cells_of_unchecked(point.coords(), self.tol)
                    .into_iter()
                    .map(|c| self.low_site_element(c, point.clone()))
                    .collect()
            }
            Side::Low => {
                if point.dim() != self.low.dim() {
                    return Some(Vec::new());
                }
                self.low
                    .cells_of_unchecked(point.coords(), self.tol)
                    .into_iter()
                    .map(|c| self.high_site_element(c, point.clone()))
                    .collect()
            }
        })
    }

    /// A point on the bisector of its two nearest sites, paired with a
    /// correspondent of its antipode, or of itself through another cell.
    fn sample_focused_pair(&self, rng: &mut RngStream) -> Option<(Element, Element)> {
        let side = if rng.random::<bool>() { Side::High } else { Side::Low };
        let set = match side {
            Side::Low => &self.low,
            Side::High => &self.high,
        };
        let y = geometry::sample_uniform_unchecked(set.dim(), rng);
        let w = bisector_point(set, &y);
        let first = pick(&self.correspondents(side, &w)?, rng)?;
        let target = if rng.random::<bool>() {
            let scale = geometry::log_uniform(1e-9, 1e-2, rng);
            geometry::perturb(&w.neg(), scale, rng)
        } else {
            w
        };
        let second = pick(&self.correspondents(side, &target)?, rng)?;
        Some((first, second))
    }

    fn stratum_label(&self, stratum: u32) -> String {
        match self.anchor(&Element {
            low: self.low.reps()[0].clone(),
            high: self.high.reps()[0].clone(),
            stratum,
        }) {
            Anchor::LowSite(c) => alloc::format!("p{}", c.linear()),
            Anchor::HighSite(c) => alloc::format!("q{}", c.linear()),
        }
    }
}

/// Projection of `y` onto the bisector between its nearest and second
/// nearest sites.
fn bisector_point(set: &AntipodalSet, y: &UnitVector) -> UnitVector {
    let sites = set.sites();
    let mut order: Vec<(f64, usize)> = sites
        .iter()
        .enumerate()
        .map(|(i, s)| (geometry::geodesic(s.coords(), y.coords()), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (a, b) = (sites[order[0].1].coords(), sites[order[1].1].coords());
    let diff: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
    let t = math::dot(y.coords(), &diff) / math::dot(&diff, &diff);
    let w: Vec<f64> = y.coords().iter().zip(&diff).map(|(c, d)| c - t * d).collect();
    UnitVector::new(w).unwrap_or_else(|_| y.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::{cross_polytope_set, cross_polytope_vdiam_exact, evenly_spaced_circle_set};
    use alloc::vec;

    fn setup(k: usize) -> VoronoiCorrespondence {
        VoronoiCorrespondence::new(evenly_spaced_circle_set(k + 1).unwrap(), cross_polytope_set(k).unwrap())
            .unwrap()
    }

    #[test]
    fn bounds_for_circle_to_cross_polytope() {
        let c = setup(2);
        let b = c.bound(PI / 3.0, cross_polytope_vdiam_exact(2));
        assert!((b - 2.0 * PI / 3.0).abs() < 1e-15);
        let c = setup(4);
        let b = c.bound(PI / 5.0, cross_polytope_vdiam_exact(4));
        assert!((b - 4.0 * PI / 5.0).abs() < 1e-15);
    }

    #[test]
    fn size_mismatch() {
        let r = VoronoiCorrespondence::new(evenly_spaced_circle_set(3).unwrap(), cross_polytope_set(3).unwrap());
        assert_eq!(r.err(), Some(Error::SizeMismatch { low: 3, high: 4 }));
    }

    #[test]
    fn correspondents_queries() {
        let c = setup(2);
        let e1 = UnitVector::basis(2, 0).unwrap();
        let got = c.correspondents_of(&e1, Side::High, CELL_TOL).unwrap();
        assert_eq!(got, vec![c.low_set().reps()[0].clone()]);
        let corner = UnitVector::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(c.correspondents_of(&corner, Side::High, CELL_TOL).unwrap().len(), 3);
        let zero = UnitVector::from_angle(0.0);
        let got = c.correspondents_of(&zero, Side::Low, CELL_TOL).unwrap();
        assert_eq!(got, vec![c.high_set().reps()[0].clone()]);
        // cell boundary of angles 0 and π/3
        let mid = UnitVector::from_angle(PI / 6.0);
        assert_eq!(c.correspondents_of(&mid, Side::Low, CELL_TOL).unwrap().len(), 2);
        assert!(c.correspondents_of(&e1, Side::Low, CELL_TOL).is_err());
    }

    #[test]
    fn samples_are_members_and_reproducible() {
        let c = setup(2);
        let mut rng = RngStream::new(9, 0);
        for _ in 0..200 {
            let e = c.sample_element(&mut rng);
            assert!(c.contains(&e));
            let neg = Element {
                low: e.low.neg(),
                high: e.high.neg(),
                stratum: 0,
            };
            assert!(c.contains(&neg), "antipodal equivariance");
        }
        let a = c.sample_element(&mut RngStream::new(5, 5));
        let b = c.sample_element(&mut RngStream::new(5, 5));
        assert_eq!(a, b);
    }

    #[test]
    fn every_stratum_is_hit() {
        let c = setup(2);
        let mut rng = RngStream::new(1, 2);
        let mut seen = [false; 24];
        for _ in 0..100_000 {
            seen[c.sample_element(&mut rng).stratum as usize] = true;
        }
        // 6 cells in each sphere, two directions
        assert!(seen.iter().take(12).all(|&s| s), "{seen:?}");
    }

    #[test]
    fn classification() {
        let c = setup(2);
        let y = UnitVector::new(vec![0.9, 0.1, 0.2]).unwrap();
        let x = UnitVector::from_angle(0.1);
        let cell = |l| c.low_set().cell(l).unwrap();
        let a = c.low_site_element(cell(1), y.clone());
        let b = c.low_site_element(cell(4), y.neg());
        assert_eq!(c.classify(&a, &b), PairCase::AntipodalLowSites);
        let h = c.high_site_element(cell(1), x.clone());
        assert_eq!(c.classify(&a, &h), PairCase::MatchedSites);
        let h2 = c.high_site_element(cell(4), x.clone());
        assert_eq!(c.classify(&h2, &a), PairCase::OppositeSites);
        let h3 = c.high_site_element(cell(2), x);
        assert_eq!(c.classify(&a, &h3), PairCase::UnmatchedSites);
        assert_eq!(c.classify(&h, &h2), PairCase::AntipodalHighSites);
    }
}
