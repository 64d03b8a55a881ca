//! The black-box view of a correspondence `R ⊆ S^n × S^k` used by the
//! distortion engine: draw relation elements, and list the elements that
//! share a given coordinate.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::geometry::{self, UnitVector};
use crate::rng::RngStream;

/// Which factor of `S^n × S^k` a coordinate lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Low,
    High,
}

/// A member `(low, high)` of a relation, tagged with the stratum (cell) it
/// was produced from.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub low: UnitVector,
    pub high: UnitVector,
    pub stratum: u32,
}

impl Element {
    pub fn point(&self, side: Side) -> &UnitVector {
        match side {
            Side::Low => &self.low,
            Side::High => &self.high,
        }
    }
}

/// `|d(a.low, b.low) − d(a.high, b.high)|` with geodesic metrics on both factors.
pub fn pair_distortion(a: &Element, b: &Element) -> f64 {
    let dl = geometry::geodesic(a.low.coords(), b.low.coords());
    let dh = geometry::geodesic(a.high.coords(), b.high.coords());
    (dl - dh).abs()
}

pub trait Correspondence: Sync {
    fn low_dim(&self) -> usize;

    fn high_dim(&self) -> usize;

    /// A relation element drawn with positive density everywhere on the relation.
    fn sample_element(&self, rng: &mut RngStream) -> Element;

    /// Every element whose `side` coordinate equals `point`, or `None` if
    /// that side cannot be queried.
    fn correspondents(&self, side: Side, point: &UnitVector) -> Option<Vec<Element>>;

    /// Sides accepted by [`Correspondence::correspondents`].
    fn queryable_sides(&self) -> &'static [Side] {
        &[Side::Low, Side::High]
    }

    /// Pairs concentrated where large distortion is expected. `None` when
    /// the correspondence has no such prior.
    fn sample_focused_pair(&self, _rng: &mut RngStream) -> Option<(Element, Element)> {
        None
    }

    fn stratum_label(&self, stratum: u32) -> String {
        alloc::format!("{stratum}")
    }

    /// Membership test through the correspondent queries (tolerance `1e−9`).
    fn contains(&self, e: &Element) -> bool {
        if e.low.dim() != self.low_dim() || e.high.dim() != self.high_dim() {
            return false;
        }
        self.queryable_sides().iter().any(|&side| {
            let other = match side {
                Side::Low => Side::High,
                Side::High => Side::Low,
            };
            self.correspondents(side, e.point(side))
                .unwrap_or_default()
                .iter()
                .any(|c| {
                    geometry::geodesic(c.point(other).coords(), e.point(other).coords()) <= 1e-9
                })
        })
    }
}

/// `{(x, x)}` on `S^d × S^d`; zero distortion.
#[derive(Debug, Clone, Copy)]
pub struct IdentityCorrespondence {
    pub dim: usize,
}

impl Correspondence for IdentityCorrespondence {
    fn low_dim(&self) -> usize {
        self.dim
    }

    fn high_dim(&self) -> usize {
        self.dim
    }

    fn sample_element(&self, rng: &mut RngStream) -> Element {
        let x = geometry::sample_uniform_unchecked(self.dim, rng);
        Element {
            low: x.clone(),
            high: x,
            stratum: 0,
        }
    }

    fn correspondents(&self, _side: Side, point: &UnitVector) -> Option<Vec<Element>> {
        Some(alloc::vec![Element {
            low: point.clone(),
            high: point.clone(),
            stratum: 0,
        }])
    }
}

pub(crate) fn pick<T: Clone>(items: &[T], rng: &mut RngStream) -> Option<T> {
    if items.is_empty() {
        None
    } else {
        Some(items[rng.random_range(0..items.len())].clone())
    }
}
