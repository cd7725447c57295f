//! Empirical measures of real sequences: cycles, limit sets, discrepancy and
//! distances to a predicted distribution.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::algnum::PrecisionReal;
use crate::error::{Error, Result};

/// Midpoints of `values`, provided every radius is below `tol / 10`.
pub fn collapse_to_midpoints(values: &[PrecisionReal], tol: f64) -> Result<Vec<f64>> {
    let worst = values.iter().map(PrecisionReal::abs_error).fold(0.0, f64::max);
    if worst >= tol / 10.0 {
        return Err(Error::InvalidInput(format!(
            "sample error {worst:e} is not below a tenth of the tolerance {tol:e}"
        )));
    }
    Ok(values.iter().map(PrecisionReal::value).collect())
}

/// A cumulative distribution function that is piecewise linear or a step function
/// between its knots.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    /// Left limit at `x`.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    /// Points where the function may stop being linear.
    fn knots(&self) -> Vec<f64>;
}

/// The measure `(1/n) sum_k delta_{x_k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    pub sorted_samples: Vec<f64>,
    pub n: usize,
}

impl EmpiricalMeasure {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::InsufficientData("an empirical measure needs at least one sample".into()));
        }
        if let Some(x) = sample.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("sample value {x} is not finite")));
        }
        let mut sorted_samples = sample.to_vec();
        sorted_samples.sort_by(f64::total_cmp);
        Ok(EmpiricalMeasure { n: sorted_samples.len(), sorted_samples })
    }

    pub fn mean(&self) -> f64 {
        self.sorted_samples.iter().sum::<f64>() / self.n as f64
    }

    /// Mass of `[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        let a = self.sorted_samples.partition_point(|&x| x < lo);
        let b = self.sorted_samples.partition_point(|&x| x <= hi);
        b.saturating_sub(a) as f64 / self.n as f64
    }

    /// Mass within `eps` of some point of `set`.
    pub fn mass_within(&self, set: &[f64], eps: f64) -> f64 {
        let near = self.sorted_samples.iter().filter(|x| set.iter().any(|c| (*x - c).abs() <= eps)).count();
        near as f64 / self.n as f64
    }

    /// Counts in `bins` equal bins over `[lo, hi)`; values outside are dropped.
    pub fn histogram(&self, lo: f64, hi: f64, bins: usize) -> Vec<HistogramBin> {
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &x in &self.sorted_samples {
            if x >= lo && x < hi {
                let i = (((x - lo) / width) as usize).min(bins - 1);
                counts[i] += 1;
            }
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(i, count)| HistogramBin {
                bin_lo: lo + width * i as f64,
                bin_hi: if i + 1 == bins { hi } else { lo + width * (i + 1) as f64 },
                count,
            })
            .collect()
    }
}

impl Cdf for EmpiricalMeasure {
    fn cdf(&self, x: f64) -> f64 {
        self.sorted_samples.partition_point(|&s| s <= x) as f64 / self.n as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.sorted_samples.partition_point(|&s| s < x) as f64 / self.n as f64
    }

    fn knots(&self) -> Vec<f64> {
        self.sorted_samples.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: usize,
}

/// CSV with header `bin_lo,bin_hi,count`.
pub fn write_histogram_csv<W: Write>(bins: &[HistogramBin], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for b in bins {
        out.serialize(b)?;
    }
    out.flush()?;
    Ok(())
}

/// Finite-data parameters for [`detect_cycle`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleParams {
    pub ell_max: usize,
    pub tol: f64,
    pub tail_fraction: f64,
}

impl Default for CycleParams {
    fn default() -> Self {
        CycleParams { ell_max: 12, tol: 1e-6, tail_fraction: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodDiagnostic {
    pub period: usize,
    /// Largest tail diameter over the residue classes.
    pub max_residue_diameter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleReport {
    pub found: bool,
    pub period: Option<usize>,
    /// Tail limit per residue class `k mod period`, or for the best candidate period.
    pub residue_limits: Vec<f64>,
    /// Tail diameter per residue class.
    pub residue_residuals: Vec<f64>,
    pub k_tail_start: i64,
    pub tolerance: f64,
    pub ell_max: usize,
    pub tail_fraction: f64,
    pub diagnostics: Vec<PeriodDiagnostic>,
}

fn residue_stats(tail: &[f64], k_tail_start: i64, ell: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::INFINITY; ell];
    let mut hi = vec![f64::NEG_INFINITY; ell];
    let mut last = vec![f64::NAN; ell];
    for (i, &x) in tail.iter().enumerate() {
        let r = (k_tail_start + i as i64).rem_euclid(ell as i64) as usize;
        lo[r] = lo[r].min(x);
        hi[r] = hi[r].max(x);
        last[r] = x;
    }
    let diam = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
    (last, diam)
}

/// Smallest `l <= ell_max` such that every residue class `k mod l` has tail diameter
/// below `tol`; `sample[0]` has index `first_index`.
pub fn detect_cycle(sample: &[f64], first_index: i64, params: &CycleParams) -> Result<CycleReport> {
    let CycleParams { ell_max, tol, tail_fraction } = *params;
    if ell_max == 0 || !(tail_fraction > 0.0 && tail_fraction <= 1.0) || !(tol > 0.0) {
        return Err(Error::InvalidInput("need ell_max >= 1, tol > 0 and tail_fraction in (0, 1]".into()));
    }
    let n = sample.len();
    let tail_len = (n as f64 * tail_fraction).floor() as usize;
    if tail_len < 10 * ell_max {
        return Err(Error::InsufficientData(format!(
            "a tail of {tail_len} terms is shorter than 10 * ell_max = {}",
            10 * ell_max
        )));
    }
    let start = n - tail_len;
    let tail = &sample[start..];
    let k_tail_start = first_index + start as i64;
    let mut diagnostics = Vec::with_capacity(ell_max);
    let mut best: Option<(usize, Vec<f64>, Vec<f64>)> = None;
    let mut best_diam = f64::INFINITY;
    for ell in 1..=ell_max {
        let (limits, diam) = residue_stats(tail, k_tail_start, ell);
        let worst = diam.iter().cloned().fold(0.0, f64::max);
        diagnostics.push(PeriodDiagnostic { period: ell, max_residue_diameter: worst });
        if worst < tol {
            return Ok(CycleReport {
                found: true,
                period: Some(ell),
                residue_limits: limits,
                residue_residuals: diam,
                k_tail_start,
                tolerance: tol,
                ell_max,
                tail_fraction,
                diagnostics,
            });
        }
        if worst < best_diam {
            best_diam = worst;
            best = Some((ell, limits, diam));
        }
    }
    let (_, limits, diam) = best.expect("ell_max >= 1");
    Ok(CycleReport {
        found: false,
        period: None,
        residue_limits: limits,
        residue_residuals: diam,
        k_tail_start,
        tolerance: tol,
        ell_max,
        tail_fraction,
        diagnostics,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub center: f64,
    pub radius: f64,
    pub tail_mass_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitSetEstimate {
    pub clusters: Vec<Cluster>,
    pub gap_threshold: f64,
}

/// Single-linkage clusters of the last `tail_fraction` of the sample: sorted tail
/// values are split wherever consecutive values differ by more than `gap_threshold`.
pub fn limit_set_estimate(sample: &[f64], tail_fraction: f64, gap_threshold: f64) -> Result<LimitSetEstimate> {
    let tail_len = (sample.len() as f64 * tail_fraction).floor() as usize;
    if tail_len == 0 {
        return Err(Error::InsufficientData("empty tail".into()));
    }
    let mut tail = sample[sample.len() - tail_len..].to_vec();
    tail.sort_by(f64::total_cmp);
    let mut clusters = Vec::new();
    let mut first = 0;
    for i in 1..=tail.len() {
        if i == tail.len() || tail[i] - tail[i - 1] > gap_threshold {
            let (lo, hi) = (tail[first], tail[i - 1]);
            clusters.push(Cluster {
                center: (lo + hi) / 2.0,
                radius: (hi - lo) / 2.0,
                tail_mass_fraction: (i - first) as f64 / tail_len as f64,
            });
            first = i;
        }
    }
    Ok(LimitSetEstimate { clusters, gap_threshold })
}

/// `D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N)` over the sorted sample.
pub fn star_discrepancy(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    if let Some(x) = sample.iter().find(|x| !(0.0..1.0).contains(*x)) {
        return Err(Error::OutOfRange(format!("{x} is not in [0, 1)")));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    Ok(s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / n - x).max(x - i / n)
        })
        .fold(0.0, f64::max))
}

/// `|(1/N) sum_k exp(2 pi i h x_k)|`.
pub fn weyl_sum(sample: &[f64], h: i64) -> Result<f64> {
    if h == 0 {
        return Err(Error::InvalidInput("h must be nonzero".into()));
    }
    if sample.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    let (mut re, mut im) = (0.0, 0.0);
    for &x in sample {
        // reduce h x mod 1 before scaling by 2 pi
        let t = std::f64::consts::TAU * (h as f64 * x).rem_euclid(1.0);
        re += t.cos();
        im += t.sin();
    }
    Ok(re.hypot(im) / sample.len() as f64)
}

/// Kolmogorov-Smirnov distance `sup_x |F_em(x) - F(x)|`, evaluated on both sides of
/// every sample point and knot of `cdf`.
pub fn ks_distance(em: &EmpiricalMeasure, cdf: &impl Cdf) -> f64 {
    let mut worst: f64 = 0.0;
    for x in em.sorted_samples.iter().copied().chain(cdf.knots()) {
        worst = worst.max((em.cdf(x) - cdf.cdf(x)).abs());
        worst = worst.max((em.cdf_left(x) - cdf.cdf_left(x)).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Uniform;

    impl Cdf for Uniform {
        fn cdf(&self, x: f64) -> f64 {
            x.clamp(0.0, 1.0)
        }

        fn knots(&self) -> Vec<f64> {
            vec![0.0, 1.0]
        }
    }

    #[test]
    fn empirical() {
        let em = EmpiricalMeasure::new(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(em.sorted_samples, vec![1.0, 2.0, 3.0]);
        assert!((em.cdf(2.0) - 2.0 / 3.0).abs() < 1e-15);
        let c = EmpiricalMeasure::new(&[0.5; 4]).unwrap();
        assert_eq!((c.cdf_left(0.5), c.cdf(0.5)), (0.0, 1.0));
        assert!(EmpiricalMeasure::new(&[]).is_err());
    }

    #[test]
    fn alternating_cycle() {
        let x: Vec<f64> = (1..=1000).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } + 1.0 / k as f64).collect();
        let params = CycleParams { ell_max: 4, tol: 0.05, tail_fraction: 0.5 };
        let r = detect_cycle(&x, 1, &params).unwrap();
        assert!(r.found);
        assert_eq!(r.period, Some(2));
        assert!((r.residue_limits[0] - 1.0).abs() < 0.01 && (r.residue_limits[1] + 1.0).abs() < 0.01);
        assert_eq!(r.k_tail_start, 501);
    }

    #[test]
    fn sine_has_no_cycle() {
        let x: Vec<f64> = (1..=10_000).map(|k| (k as f64).sin()).collect();
        let params = CycleParams { ell_max: 12, tol: 0.05, tail_fraction: 0.5 };
        let r = detect_cycle(&x, 1, &params).unwrap();
        assert!(!r.found && r.period.is_none());
        assert_eq!(r.diagnostics.len(), 12);
        assert!(r.diagnostics.iter().all(|d| d.max_residue_diameter > 1.9));
        assert!(r.residue_residuals.iter().any(|&d| d >= r.tolerance));
    }

    #[test]
    fn minimal_period() {
        for ell in 1..=6usize {
            let x: Vec<f64> = (0..600).map(|k| ((k % ell) as f64).powi(2)).collect();
            let r = detect_cycle(&x, 0, &CycleParams::default()).unwrap();
            assert_eq!(r.period, Some(ell));
        }
        let short = detect_cycle(&[0.0; 100], 1, &CycleParams::default());
        assert!(matches!(short, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn limit_sets() {
        let x: Vec<f64> = (1..=1000).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } + 1.0 / k as f64).collect();
        let est = limit_set_estimate(&x, 0.5, 0.1).unwrap();
        assert_eq!(est.clusters.len(), 2);
        assert!((est.clusters[0].center + 1.0).abs() < 0.01 && (est.clusters[1].center - 1.0).abs() < 0.01);
        let mass: f64 = est.clusters.iter().map(|c| c.tail_mass_fraction).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        let one = limit_set_estimate(&[2.5; 50], 0.5, 0.1).unwrap();
        assert_eq!(one.clusters, vec![Cluster { center: 2.5, radius: 0.0, tail_mass_fraction: 1.0 }]);
    }

    #[test]
    fn discrepancy() {
        let n = 1024;
        let mid: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        assert_eq!(star_discrepancy(&mid).unwrap(), 0.5 / n as f64);
        assert_eq!(star_discrepancy(&[0.0; 10]).unwrap(), 1.0);
        assert!(matches!(star_discrepancy(&[0.5, 1.0]), Err(Error::OutOfRange(_))));
        let s = 2f64.sqrt() - 1.0;
        let rot: Vec<f64> = (1..=10_000).map(|k| (k as f64 * s).fract()).collect();
        assert!(star_discrepancy(&rot).unwrap() < 0.01);
    }

    #[test]
    fn weyl_sums() {
        let halves: Vec<f64> = (1..=100).map(|k| (k as f64 / 2.0).fract()).collect();
        assert!((weyl_sum(&halves, 2).unwrap() - 1.0).abs() < 1e-12);
        let eq: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        assert!(weyl_sum(&eq, 3).unwrap() < 1e-12);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let rot: Vec<f64> = (1..=10_000).map(|k| (k as f64 * phi).fract()).collect();
        assert!(weyl_sum(&rot, 1).unwrap() < 0.01);
        assert!(weyl_sum(&rot, 0).is_err());
    }

    #[test]
    fn ks() {
        let n = 500;
        let q: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        let em = EmpiricalMeasure::new(&q).unwrap();
        assert!((ks_distance(&em, &Uniform) - 0.5 / n as f64).abs() < 1e-15);
        assert_eq!(ks_distance(&em, &em), 0.0);
    }

    #[test]
    fn midpoint_collapse() {
        let v = vec![PrecisionReal::from_i64(1, 40)];
        assert_eq!(collapse_to_midpoints(&v, 1e-6).unwrap(), vec![1.0]);
        let coarse = vec![PrecisionReal::from_f64(0.5, 10).unwrap().widen_ulps(&4u32.into())];
        assert!(collapse_to_midpoints(&coarse, 1e-6).is_err());
    }

    #[test]
    fn histogram_csv() {
        let em = EmpiricalMeasure::new(&[0.1, 0.2, 0.7]).unwrap();
        let bins = em.histogram(0.0, 1.0, 2);
        assert_eq!(bins[0].count, 2);
        assert_eq!(bins[1].count, 1);
        let mut buf = Vec::new();
        write_histogram_csv(&bins, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "bin_lo,bin_hi,count\n0.0,0.5,2\n0.5,1.0,1\n");
    }
}
