//! Weighted-centroid localization: plain WCL, Cyclic WCL and the FVC-filtered
//! improved variant with its k-means threshold heuristic.

use crate::{Error, Point, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LocationEstimate {
    pub x: f64,
    pub y: f64,
    pub included_crs: Vec<usize>,
    pub phi0_used: Option<f64>,
}

impl LocationEstimate {
    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn norm_sq(&self) -> f64 {
        self.point().norm_sq()
    }
}

/// Centroid of `locs[j]` for `j` in `idx`, weighted by `weights[j]`.
pub fn weighted_centroid(locs: &[Point], weights: &[f64], idx: &[usize]) -> Result<LocationEstimate> {
    if locs.len() != weights.len() {
        return Err(Error::LengthMismatch { left: locs.len(), right: weights.len() });
    }
    if idx.is_empty() {
        return Err(Error::InvalidArgument("no CRs to localize with".into()));
    }
    let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
    for &j in idx {
        let w = weights[j];
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidArgument(format!("weight {j} is {w}; weights must be finite and >= 0")));
        }
        sx += w * locs[j].x;
        sy += w * locs[j].y;
        sw += w;
    }
    if sw == 0.0 {
        return Err(Error::AllZeroWeights);
    }
    Ok(LocationEstimate { x: sx / sw, y: sy / sw, included_crs: idx.to_vec(), phi0_used: None })
}

fn all(k: usize) -> Vec<usize> {
    (0..k).collect()
}

/// Traditional WCL weighted by received power (the `α = 0` CAC).
pub fn wcl(cr_locs: &[Point], received_powers: &[f64]) -> Result<LocationEstimate> {
    weighted_centroid(cr_locs, received_powers, &all(cr_locs.len()))
}

/// Cyclic WCL weighted by `|R̂_k|²` at the target's cyclic frequency.
pub fn cyclic_wcl(cr_locs: &[Point], cac_strengths: &[f64]) -> Result<LocationEstimate> {
    weighted_centroid(cr_locs, cac_strengths, &all(cr_locs.len()))
}

/// CRs with `φ̂_k <= φ₀`, in index order.
pub fn select_crs(fvc: &[f64], phi0: f64) -> Vec<usize> {
    fvc.iter().enumerate().filter(|(_, &p)| p <= phi0).map(|(j, _)| j).collect()
}

/// Cyclic WCL restricted to CRs whose FVC does not exceed `phi0`.
pub fn improved_cyclic_wcl(cr_locs: &[Point], strengths: &[f64], fvc: &[f64], phi0: f64) -> Result<LocationEstimate> {
    if fvc.len() != cr_locs.len() {
        return Err(Error::LengthMismatch { left: cr_locs.len(), right: fvc.len() });
    }
    let idx = select_crs(fvc, phi0);
    if idx.is_empty() {
        let min_phi = fvc.iter().copied().fold(f64::INFINITY, f64::min);
        return Err(Error::EmptySelection { phi0, min_phi });
    }
    let mut est = weighted_centroid(cr_locs, strengths, &idx)?;
    est.phi0_used = Some(phi0);
    Ok(est)
}

/// Sorted distinct FVC values; each one is a threshold that admits one more
/// group of CRs.
pub fn candidate_thresholds(fvc: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = fvc.to_vec();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeans1d {
    pub labels: Vec<usize>,
    pub centroids: Vec<f64>,
    /// Set when the input has fewer distinct values than clusters.
    pub degenerate: bool,
    pub iterations: usize,
}

/// Lloyd iteration on scalars. Centroids start evenly spaced between the
/// minimum and maximum (min and max for `k = 2`).
pub fn kmeans_1d(values: &[f64], k: usize) -> Result<KMeans1d> {
    if k == 0 || values.len() < k {
        return Err(Error::TooFewValues { needed: k.max(1), got: values.len() });
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let distinct = candidate_thresholds(values).len();
    if lo == hi {
        return Ok(KMeans1d { labels: vec![0; values.len()], centroids: vec![lo; k], degenerate: true, iterations: 0 });
    }
    let mut centroids: Vec<f64> = if k == 1 {
        vec![lo]
    } else {
        (0..k).map(|j| lo + (hi - lo) * j as f64 / (k - 1) as f64).collect()
    };
    let mut labels = vec![usize::MAX; values.len()];
    let mut iterations = 0;
    loop {
        let mut changed = false;
        for (l, &v) in labels.iter_mut().zip(values) {
            let mut best = 0;
            for j in 1..k {
                if (v - centroids[j]).abs() < (v - centroids[best]).abs() {
                    best = j;
                }
            }
            if *l != best {
                *l = best;
                changed = true;
            }
        }
        iterations += 1;
        if !changed || iterations >= 10_000 {
            break;
        }
        for (j, c) in centroids.iter_mut().enumerate() {
            let (s, n) = labels
                .iter()
                .zip(values)
                .filter(|(&l, _)| l == j)
                .fold((0.0, 0usize), |(s, n), (_, &v)| (s + v, n + 1));
            if n > 0 {
                *c = s / n as f64;
            }
        }
    }
    Ok(KMeans1d { labels, centroids, degenerate: distinct < k, iterations })
}

/// Outcome of the k-means threshold heuristic.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdChoice {
    pub phi0: f64,
    /// Candidate thresholds in increasing order.
    pub candidates: Vec<f64>,
    /// `‖L̂(φ₀)‖²` at each candidate.
    pub objective: Vec<f64>,
    /// Whether each candidate fell in the retained cluster.
    pub in_opt: Vec<bool>,
    pub degenerate: bool,
}

/// Suboptimal FVC threshold from 2-means clustering of `‖L̂(φ₀)‖²` over the
/// candidate thresholds.
pub fn suboptimal_threshold(cr_locs: &[Point], strengths: &[f64], fvc: &[f64]) -> Result<ThresholdChoice> {
    if cr_locs.len() < 2 {
        return Err(Error::TooFewValues { needed: 2, got: cr_locs.len() });
    }
    let candidates = candidate_thresholds(fvc);
    let objective = candidates
        .iter()
        .map(|&p| improved_cyclic_wcl(cr_locs, strengths, fvc, p).map(|e| e.norm_sq()))
        .collect::<Result<Vec<f64>>>()?;
    let last = *candidates.last().expect("non-empty");
    let fallback = |candidates: Vec<f64>, objective: Vec<f64>| ThresholdChoice {
        phi0: last,
        in_opt: vec![true; candidates.len()],
        candidates,
        objective,
        degenerate: true,
    };
    if objective.len() < 2 {
        return Ok(fallback(candidates, objective));
    }
    let km = kmeans_1d(&objective, 2)?;
    if km.degenerate {
        return Ok(fallback(candidates, objective));
    }
    let non_opt = km.labels[km.labels.len() - 1];
    let in_opt: Vec<bool> = km.labels.iter().map(|&l| l != non_opt).collect();
    let chosen: Vec<f64> = candidates.iter().zip(&in_opt).filter(|(_, &b)| b).map(|(&c, _)| c).collect();
    if chosen.is_empty() {
        return Ok(fallback(candidates, objective));
    }
    let phi0 = chosen.iter().sum::<f64>() / chosen.len() as f64;
    Ok(ThresholdChoice { phi0, candidates, objective, in_opt, degenerate: false })
}
