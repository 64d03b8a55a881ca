//! JSON documents for point sets, reports and packings.
//!
//! Every floating-point value is written with 17 significant digits, which
//! round-trips `f64` exactly. Angles carry a second `*_pi` field holding the
//! same value in units of π.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sphere_gh_core::correspondence::Element;
use sphere_gh_core::distortion::DistortionReport;
use sphere_gh_core::geometry::UnitVector;
use sphere_gh_core::packing::{BoundReport, CoveringResult, PackingResult, PackingTerms};
use sphere_gh_core::pointsets::{AntipodalSet, SetLabel};
use sphere_gh_core::Error;

/// A float serialized as a 17-significant-digit decimal; non-finite values
/// become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format_num(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Num(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

/// Decimal text with 17 significant digits, as used in both JSON and CSV.
pub fn format_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn in_pi(x: f64) -> Num {
    Num(x / PI)
}

fn coords(x: &UnitVector) -> Vec<Num> {
    x.coords().iter().map(|&c| Num(c)).collect()
}

fn vector(c: &[Num]) -> Result<UnitVector, Error> {
    UnitVector::from_stored(c.iter().map(|n| n.0).collect())
}

/// Serializes `value` into a raw JSON fragment for embedding.
pub fn raw<T: Serialize>(value: &T) -> Box<RawValue> {
    let text = serde_json::to_string(value).expect("documents serialize");
    RawValue::from_string(text).expect("serializer emits valid JSON")
}

pub fn to_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSetDoc {
    pub dim: usize,
    pub label: String,
    pub reps: Vec<Vec<Num>>,
}

impl PointSetDoc {
    pub fn from_set(set: &AntipodalSet) -> Self {
        PointSetDoc {
            dim: set.dim(),
            label: set.label().as_str().to_string(),
            reps: set.reps().iter().map(coords).collect(),
        }
    }

    pub fn to_set(&self) -> Result<AntipodalSet, Error> {
        let label = SetLabel::parse(&self.label)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown point set label {:?}", self.label)))?;
        let reps = self.reps.iter().map(|r| vector(r)).collect::<Result<Vec<_>, _>>()?;
        if let Some(r) = reps.iter().find(|r| r.dim() != self.dim) {
            return Err(Error::DimensionMismatch { left: self.dim, right: r.dim() });
        }
        AntipodalSet::new(reps, label)
    }
}

/// A Voronoi correspondence as its two point sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrespondenceDoc {
    pub low: PointSetDoc,
    pub high: PointSetDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct PackingTermsDoc {
    pub p_lower: Num,
    pub p_upper: Num,
    pub cross_polytope: Num,
    pub separation: Num,
    pub diameter_at_lower: Num,
    pub diameter_at_upper: Num,
    pub evaluated: Num,
    pub conservative: Num,
}

impl From<&PackingTerms> for PackingTermsDoc {
    fn from(t: &PackingTerms) -> Self {
        PackingTermsDoc {
            p_lower: Num(t.p_lower),
            p_upper: Num(t.p_upper),
            cross_polytope: Num(t.cross_polytope),
            separation: Num(t.separation),
            diameter_at_lower: Num(t.diameter_at_lower),
            diameter_at_upper: Num(t.diameter_at_upper),
            evaluated: Num(t.evaluated),
            conservative: Num(t.conservative),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundDoc {
    pub n: usize,
    pub k: usize,
    pub two_dgh_bound: Num,
    pub two_dgh_bound_pi: Num,
    pub exactness: &'static str,
    pub euclidean_bound: Num,
    pub source: &'static str,
    pub general_bound: Num,
    pub general_bound_pi: Num,
    pub packing: Option<PackingTermsDoc>,
}

impl BoundDoc {
    pub fn new(r: &BoundReport, euclidean: f64) -> Self {
        BoundDoc {
            n: r.n,
            k: r.k,
            two_dgh_bound: Num(r.value),
            two_dgh_bound_pi: in_pi(r.value),
            exactness: r.exactness.as_str(),
            euclidean_bound: Num(euclidean),
            source: r.source,
            general_bound: Num(r.general_bound),
            general_bound_pi: in_pi(r.general_bound),
            packing: r.packing.as_ref().map(PackingTermsDoc::from),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessDoc {
    pub x: Vec<Num>,
    pub y: Vec<Num>,
    pub x2: Vec<Num>,
    pub y2: Vec<Num>,
}

impl WitnessDoc {
    pub fn new(a: &Element, b: &Element) -> Self {
        WitnessDoc {
            x: coords(&a.low),
            y: coords(&a.high),
            x2: coords(&b.low),
            y2: coords(&b.high),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistortionDoc {
    pub corr: String,
    pub n: usize,
    pub k: usize,
    pub bound: Option<Num>,
    pub bound_pi: Option<Num>,
    pub estimate: Num,
    pub estimate_pi: Num,
    pub witness: WitnessDoc,
    pub samples_used: usize,
    pub seed: u64,
    pub per_stratum: BTreeMap<String, Num>,
}

impl DistortionDoc {
    pub fn new(corr: &str, n: usize, k: usize, r: &DistortionReport) -> Self {
        DistortionDoc {
            corr: corr.to_string(),
            n,
            k,
            bound: r.bound.map(Num),
            bound_pi: r.bound.map(in_pi),
            estimate: Num(r.estimate),
            estimate_pi: in_pi(r.estimate),
            witness: WitnessDoc::new(&r.witness.0, &r.witness.1),
            samples_used: r.samples_used,
            seed: r.seed,
            per_stratum: r.per_stratum.iter().map(|(s, &v)| (s.clone(), Num(v))).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackingDoc {
    pub n: usize,
    pub m: usize,
    pub points: Vec<Vec<Num>>,
    pub min_dist: Num,
    pub min_dist_pi: Num,
    pub iterations: usize,
    pub restarts_used: usize,
}

impl PackingDoc {
    pub fn new(n: usize, r: &PackingResult) -> Self {
        PackingDoc {
            n,
            m: r.points.len(),
            points: r.points.iter().map(coords).collect(),
            min_dist: Num(r.min_dist),
            min_dist_pi: in_pi(r.min_dist),
            iterations: r.iterations,
            restarts_used: r.restarts_used,
        }
    }

    /// Rebuilds the result. The stored minimum distance is kept as written
    /// so cached values reproduce the original run bit for bit.
    pub fn to_result(&self) -> Result<PackingResult, Error> {
        let points = self.points.iter().map(|p| vector(p)).collect::<Result<Vec<_>, _>>()?;
        if points.len() != self.m || points.iter().any(|p| p.dim() != self.n) {
            return Err(Error::InvalidParameter("packing document does not match its n, m".into()));
        }
        Ok(PackingResult {
            points,
            min_dist: self.min_dist.0,
            iterations: self.iterations,
            restarts_used: self.restarts_used,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringDoc {
    pub points: Vec<Vec<Num>>,
    pub radius_estimate: Num,
    pub radius_estimate_pi: Num,
    pub witness: Vec<Num>,
    pub samples: usize,
}

impl From<&CoveringResult> for CoveringDoc {
    fn from(c: &CoveringResult) -> Self {
        CoveringDoc {
            points: c.points.iter().map(coords).collect(),
            radius_estimate: Num(c.radius_estimate),
            radius_estimate_pi: in_pi(c.radius_estimate),
            witness: coords(&c.witness),
            samples: c.samples,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRowDoc {
    pub k: usize,
    pub bound: Num,
    pub bound_pi: Num,
    pub gap: Num,
    pub gap_sqrtk: Num,
}

/// One line of `verify` output.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyRecord {
    pub invariant: String,
    pub anchor: &'static str,
    pub status: &'static str,
    pub max_violation: Num,
    pub witness: Box<RawValue>,
}

impl VerifyRecord {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

pub fn point_json(x: &UnitVector) -> Vec<Num> {
    coords(x)
}
