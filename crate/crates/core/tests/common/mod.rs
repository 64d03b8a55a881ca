#![allow(dead_code)]

use proptest::prelude::*;
use sphere_gh_core::geometry::{sample_uniform, UnitVector};
use sphere_gh_core::rng::RngStream;

#[allow(unused_imports)]
pub use std::f64::consts::{FRAC_PI_2, PI};

/// Reference geodesic distance: clamped arccos of the inner product.
pub fn acos_dist(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    d.clamp(-1.0, 1.0).acos()
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn unit(dim: usize) -> impl Strategy<Value = UnitVector> {
    prop::collection::vec(-1.0f64..1.0, dim + 1)
        .prop_filter("nondegenerate", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-4)
        .prop_map(|v| UnitVector::new(v).unwrap())
}

/// Sign of the largest coordinate of the ordered cell `m` of `S^k`, written
/// out from the alternating list rather than computed.
pub fn cell_sign(k: usize, m: usize) -> f64 {
    if m <= k + 1 {
        if m % 2 == 1 {
            1.0
        } else {
            -1.0
        }
    } else {
        -cell_sign(k, m - k - 1)
    }
}

pub fn cell_coord(k: usize, m: usize) -> usize {
    (m - 1) % (k + 1)
}

pub fn in_odd_cell(k: usize, m: usize, x: &[f64]) -> bool {
    let i = cell_coord(k, m);
    let v = cell_sign(k, m) * x[i];
    v > 0.0 && x.iter().all(|c| c.abs() <= v)
}

/// Rejection sample of the interior of `𝒢_m`.
pub fn sample_odd_cell(k: usize, m: usize, rng: &mut RngStream) -> UnitVector {
    loop {
        let x = sample_uniform(k, rng).unwrap();
        if in_odd_cell(k, m, x.coords()) {
            return x;
        }
    }
}

/// `f_m` straight from its definition: the quotient formula for the first
/// half, and `f_{m−k−1}(−x) + π` for the second.
pub fn f_reference(k: usize, m: usize, x: &[f64]) -> f64 {
    if m > k + 1 {
        let neg: Vec<f64> = x.iter().map(|c| -c).collect();
        return (f_reference(k, m - k - 1, &neg) + PI).rem_euclid(2.0 * PI);
    }
    let before: f64 = x[..m - 1].iter().sum();
    let after: f64 = x[m..].iter().sum();
    let kf = k as f64;
    let v = (m - 1) as f64 * PI / (kf + 1.0) + PI / (2.0 * kf * (kf + 1.0)) * (before - after) / x[m - 1];
    v.rem_euclid(2.0 * PI)
}

pub fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// `A_1` from its formula, applied `n` times.
pub fn a_reference(n: usize, x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    for _ in 0..n {
        let last = v[v.len() - 1];
        let mut w = vec![last];
        w.extend(v[..v.len() - 1].iter().map(|c| -c));
        v = w;
    }
    v
}
