//! Empirical distortion `sup |d_low − d_high|` of a correspondence.
//!
//! Pairs of relation elements are drawn in fixed-size shards, each with its
//! own forked stream. Every shard keeps the best pair per stratum pair and
//! hill-climbs its strongest strata; shards are merged in index order with
//! a lexicographic tie-break, so the report does not depend on how the
//! shards were scheduled.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;

use crate::correspondence::{pair_distortion, pick, Correspondence, Element};
use crate::error::{Error, Result};
use crate::exec::{shard_count, Executor};
use crate::geometry;
use crate::math::PI;
use crate::rng::RngStream;

/// Pairs drawn per shard; budgets are rounded up to whole shards.
pub const PAIR_SHARD: usize = 16384;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    pub samples: usize,
    pub refine_iters: usize,
    pub initial_step: f64,
    pub decay: f64,
    pub restarts: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            refine_iters: 200,
            initial_step: PI / 16.0,
            decay: 0.9,
            restarts: 8,
        }
    }
}

impl SearchBudget {
    pub fn with_samples(self, samples: usize) -> Self {
        Self { samples, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::EmptyBudget);
        }
        if !(self.initial_step.is_finite() && self.initial_step > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "initial step must be positive, got {}",
                self.initial_step
            )));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "decay must lie in (0, 1), got {}",
                self.decay
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub bound: Option<f64>,
    pub estimate: f64,
    pub witness: (Element, Element),
    pub samples_used: usize,
    pub per_stratum: BTreeMap<String, f64>,
    pub seed: u64,
}

impl DistortionReport {
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    a: Element,
    b: Element,
}

fn witness_cmp(x: &Candidate, y: &Candidate) -> Ordering {
    let coords = |c: &Candidate| {
        let mut v: Vec<f64> = Vec::new();
        for p in [&c.a.low, &c.a.high, &c.b.low, &c.b.high] {
            v.extend_from_slice(p.coords());
        }
        v
    };
    let (cx, cy) = (coords(x), coords(y));
    for (p, q) in cx.iter().zip(&cy) {
        match p.total_cmp(q) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    cx.len().cmp(&cy.len())
}

/// True if `new` should replace `old`: larger value, ties to the
/// lexicographically smaller witness.
fn beats(new: &Candidate, old: &Candidate) -> bool {
    match new.value.total_cmp(&old.value) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => witness_cmp(new, old) == Ordering::Less,
    }
}

type Strata = BTreeMap<(u32, u32), Candidate>;

fn record(strata: &mut Strata, cand: Candidate) {
    let (s, t) = (cand.a.stratum, cand.b.stratum);
    let key = (s.min(t), s.max(t));
    match strata.get(&key) {
        Some(old) if !beats(&cand, old) => {}
        _ => {
            strata.insert(key, cand);
        }
    }
}

fn draw_pair<C: Correspondence + ?Sized>(corr: &C, rng: &mut RngStream) -> (Element, Element) {
    match rng.random_range(0..3u32) {
        0 => {}
        1 => {
            let a = corr.sample_element(rng);
            if let Some(&side) = pick(corr.queryable_sides(), rng).as_ref() {
                let mut u = a.point(side).clone();
                if rng.random::<bool>() {
                    u = u.neg();
                }
                let scale = geometry::log_uniform(1e-8, 1.0, rng);
                let u = geometry::perturb(&u, scale, rng);
                if let Some(b) = corr.correspondents(side, &u).and_then(|c| pick(&c, rng)) {
                    return (a, b);
                }
            }
            let b = corr.sample_element(rng);
            return (a, b);
        }
        _ => {
            if let Some(pair) = corr.sample_focused_pair(rng) {
                return pair;
            }
        }
    }
    (corr.sample_element(rng), corr.sample_element(rng))
}

fn refine<C: Correspondence + ?Sized>(
    corr: &C,
    start: Candidate,
    iters: usize,
    step: f64,
    decay: f64,
    rng: &mut RngStream,
) -> Candidate {
    let mut best = start;
    let mut step = step;
    for _ in 0..iters {
        let move_first = rng.random::<bool>();
        let Some(side) = pick(corr.queryable_sides(), rng) else {
            break;
        };
        let moving = if move_first { &best.a } else { &best.b };
        let p = geometry::perturb(moving.point(side), step, rng);
        let mut improved: Option<Candidate> = None;
        for e in corr.correspondents(side, &p).unwrap_or_default() {
            let cand = if move_first {
                Candidate {
                    value: pair_distortion(&e, &best.b),
                    a: e,
                    b: best.b.clone(),
                }
            } else {
                Candidate {
                    value: pair_distortion(&best.a, &e),
                    a: best.a.clone(),
                    b: e,
                }
            };
            if improved.as_ref().is_none_or(|c| cand.value > c.value) {
                improved = Some(cand);
            }
        }
        match improved {
            Some(c) if c.value > best.value => best = c,
            _ => step *= decay,
        }
    }
    best
}

/// Hill-climbs a pair of relation elements: perturb one sphere point,
/// re-derive its correspondents, keep strict improvements, shrink the step
/// after each rejected move.
pub fn refine_pair<C: Correspondence + ?Sized>(
    corr: &C,
    pair: (Element, Element),
    iters: usize,
    step: f64,
    decay: f64,
    rng: &mut RngStream,
) -> Result<(Element, Element)> {
    if !corr.contains(&pair.0) || !corr.contains(&pair.1) {
        return Err(Error::NotInRelation);
    }
    let value = pair_distortion(&pair.0, &pair.1);
    let c = refine(
        corr,
        Candidate {
            value,
            a: pair.0,
            b: pair.1,
        },
        iters,
        step,
        decay,
        rng,
    );
    Ok((c.a, c.b))
}

fn run_shard<C: Correspondence + ?Sized>(corr: &C, budget: &SearchBudget, rng: &mut RngStream) -> Strata {
    let mut strata = Strata::new();
    for _ in 0..PAIR_SHARD {
        let (a, b) = draw_pair(corr, rng);
        let value = pair_distortion(&a, &b);
        record(&mut strata, Candidate { value, a, b });
    }
    let mut top: Vec<Candidate> = strata.values().cloned().collect();
    top.sort_by(|x, y| y.value.total_cmp(&x.value));
    top.truncate(budget.restarts);
    for cand in top {
        let c = refine(corr, cand, budget.refine_iters, budget.initial_step, budget.decay, rng);
        record(&mut strata, c);
    }
    strata
}

/// Lower estimate of the distortion of `corr`. The theoretical bound, if
/// any, is attached by the caller through [`DistortionReport::with_bound`].
pub fn estimate_distortion<C, E>(corr: &C, budget: &SearchBudget, rng: &RngStream, exec: &E) -> Result<DistortionReport>
where
    C: Correspondence + ?Sized,
    E: Executor + ?Sized,
{
    budget.validate()?;
    let shards = shard_count(budget.samples, PAIR_SHARD);
    let results = exec.map_indexed(shards, |i| run_shard(corr, budget, &mut rng.fork(i as u64)));
    let mut merged = Strata::new();
    for shard in results {
        for (_, cand) in shard {
            record(&mut merged, cand);
        }
    }
    let mut best: Option<&Candidate> = None;
    for cand in merged.values() {
        if best.is_none_or(|b| beats(cand, b)) {
            best = Some(cand);
        }
    }
    let best = best.expect("at least one shard").clone();
    let per_stratum = merged
        .iter()
        .map(|(&(s, t), c)| {
            (
                alloc::format!("{}|{}", corr.stratum_label(s), corr.stratum_label(t)),
                c.value,
            )
        })
        .collect();
    Ok(DistortionReport {
        bound: None,
        estimate: best.value,
        witness: (best.a, best.b),
        samples_used: shards * PAIR_SHARD,
        per_stratum,
        seed: rng.seed(),
    })
}
