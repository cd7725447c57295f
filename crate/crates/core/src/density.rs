//! The limiting distribution of `c_k` for irrational `theta`.
//!
//! The points `{-s theta}`, `s = 1 ..= d+1`, cut `(0, 1)` into `J_0, ..., J_{d+1}`. On
//! each `J_j` the function `g` of [`crate::annihilate::g_eval`] is affine with slope
//! `(1 - alpha) p(1)`, and the empirical measures of `c_k = g({k theta})` converge to
//! `1 / ((alpha - 1)|p(1)|)` times the sum of the indicators of `I_j = g(J_j)`.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algnum::{IntPolynomial, PrecisionPolicy, PrecisionReal, RealAlgebraic, RealInput};
use crate::annihilate::c_weights;
use crate::error::{Error, Result};
use crate::measures::{ks_distance, Cdf, EmpiricalMeasure};

/// The sorted points `{-s theta}` and the open intervals between them.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionSpec {
    pub breakpoints: Vec<PrecisionReal>,
    pub j_intervals: Vec<[PrecisionReal; 2]>,
}

impl PartitionSpec {
    pub fn lengths(&self) -> Vec<f64> {
        self.j_intervals.iter().map(|[a, b]| (b - a).value()).collect()
    }
}

/// `{-theta}, ..., {-(d+1) theta}`, sorted and certified pairwise distinct.
pub fn breakpoints(theta: &RealInput, d: usize, bits: u32, policy: &PrecisionPolicy) -> Result<PartitionSpec> {
    if theta.is_rational() {
        return Err(Error::DegenerateTheta(format!("theta = {theta} is rational")));
    }
    let count = d + 1;
    let mut target = bits.max(32);
    loop {
        let mut pts = theta.frac_multiples(-(count as i64), count, target, policy)?;
        pts.sort_by(|a, b| a.value().total_cmp(&b.value()));
        let zero = PrecisionReal::zero(target);
        let one = PrecisionReal::from_i64(1, target);
        let separated = pts.windows(2).all(|w| w[0].cmp_certified(&w[1]) == Some(std::cmp::Ordering::Less))
            && pts[0].cmp_certified(&zero) == Some(std::cmp::Ordering::Greater)
            && pts[count - 1].cmp_certified(&one) == Some(std::cmp::Ordering::Less);
        if separated {
            let mut ends = Vec::with_capacity(count + 2);
            ends.push(zero);
            ends.extend(pts.iter().cloned());
            ends.push(one);
            let j_intervals = ends.windows(2).map(|w| [w[0].clone(), w[1].clone()]).collect();
            return Ok(PartitionSpec { breakpoints: pts, j_intervals });
        }
        if target >= policy.max_bits {
            return Err(Error::PrecisionExhausted { needed: u64::from(target) * 2, max: policy.max_bits });
        }
        target = target.saturating_mul(2).min(policy.max_bits);
    }
}

/// One image interval `I_j = g(J_j)` with its constant height.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPiece {
    pub lo: f64,
    pub hi: f64,
    pub height: f64,
}

impl DensityPiece {
    pub fn mass(&self) -> f64 {
        (self.hi - self.lo) * self.height
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictedDensity {
    /// Pieces may overlap; heights add.
    pub pieces: Vec<DensityPiece>,
    pub total_mass: f64,
    /// Slope of `g` on every `J_j`, `(1 - alpha) p(1)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<PrecisionReal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
}

impl PredictedDensity {
    /// A density from explicit pieces.
    pub fn from_pieces(pieces: Vec<DensityPiece>) -> Result<Self> {
        if pieces.is_empty() || pieces.iter().any(|p| !(p.height > 0.0) || !(p.hi >= p.lo)) {
            return Err(Error::InvalidInput("pieces need positive heights and lo <= hi".into()));
        }
        let total_mass = pieces.iter().map(DensityPiece::mass).sum();
        Ok(PredictedDensity { pieces, total_mass, slope: None, partition: None })
    }

    pub fn support_contains_interval(&self) -> bool {
        self.pieces.iter().any(|p| p.hi > p.lo)
    }

    pub fn min_piece_mass(&self) -> f64 {
        self.pieces.iter().map(DensityPiece::mass).fold(f64::INFINITY, f64::min)
    }

    /// Whether `x` is within `eps` of some piece.
    pub fn in_support(&self, x: f64, eps: f64) -> bool {
        self.pieces.iter().any(|p| x >= p.lo - eps && x <= p.hi + eps)
    }

    /// CSV with header `lo,hi,height`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for p in &self.pieces {
            out.serialize(p)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// The predicted density for `c_k` with `p`, its root `alpha > 1` and irrational `theta`.
pub fn predicted_density(
    p: &IntPolynomial,
    alpha: &RealAlgebraic,
    theta: &RealInput,
    bits: u32,
    policy: &PrecisionPolicy,
) -> Result<PredictedDensity> {
    if alpha.polynomial() != p {
        return Err(Error::InvalidInput(format!("alpha is a root of {}, not {p}", alpha.polynomial())));
    }
    let p1 = p.evaluate_at_one();
    if p1.is_zero() {
        return Err(Error::DomainError("p(1) = 0".into()));
    }
    if alpha.cmp_ratio(&BigRational::one(), policy)? != std::cmp::Ordering::Greater {
        return Err(Error::DomainError("alpha must exceed 1".into()));
    }
    let d = p.degree();
    let partition = breakpoints(theta, d, bits, policy)?;
    let w = partition.breakpoints[0].bits().max(bits) + 16;
    let a = alpha.refine_bits(w, policy)?;
    let t = theta.approx(w, policy)?;
    let weights = c_weights(p, &a);
    let slope = weights.iter().fold(PrecisionReal::zero(w), |acc, x| &acc + x);
    let one = PrecisionReal::from_i64(1, w);
    let height = one.checked_div(&(&a - &one).mul_int(&p1.abs()))?;
    let mut pieces = Vec::with_capacity(d + 2);
    let mut total = PrecisionReal::zero(w);
    for [lo, hi] in &partition.j_intervals {
        let (lo, hi) = (lo.rescale(w), hi.rescale(w));
        let mid = (&lo + &hi).mul_pow2(-1);
        // on J_j, {x + s theta} = x + s theta - n_s with n_s fixed
        let mut intercept = PrecisionReal::zero(w);
        for (s, ws) in weights.iter().enumerate().skip(1) {
            let shift = t.mul_int(&BigInt::from(s));
            let n_s = (&mid + &shift).floor()?;
            intercept = &intercept + &(ws * &shift.add_int(&-n_s));
        }
        let g_lo = &(&slope * &lo) + &intercept;
        let g_hi = &(&slope * &hi) + &intercept;
        let (a_end, b_end) =
            if g_lo.value() <= g_hi.value() { (g_lo, g_hi) } else { (g_hi, g_lo) };
        total = &total + &(&(&b_end - &a_end) * &height);
        pieces.push(DensityPiece { lo: a_end.value(), hi: b_end.value(), height: height.value() });
    }
    Ok(PredictedDensity {
        pieces,
        total_mass: total.value(),
        slope: Some(slope.rescale(bits + 2)),
        partition: Some(partition),
    })
}

/// Piecewise-linear CDF of a [`PredictedDensity`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictedCdf {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn predicted_cdf(pd: &PredictedDensity) -> PredictedCdf {
    let mut knots: Vec<f64> = pd.pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let values = knots
        .iter()
        .map(|&x| pd.pieces.iter().map(|p| p.height * (x.min(p.hi) - p.lo).max(0.0)).sum())
        .collect();
    PredictedCdf { knots, values }
}

impl Cdf for PredictedCdf {
    fn cdf(&self, x: f64) -> f64 {
        let i = self.knots.partition_point(|&k| k <= x);
        if i == 0 {
            return 0.0;
        }
        if i == self.knots.len() {
            return self.values[i - 1];
        }
        let (x0, x1) = (self.knots[i - 1], self.knots[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn knots(&self) -> Vec<f64> {
        self.knots.clone()
    }
}

impl PredictedCdf {
    /// CSV with header `x,F`, or whitespace-separated columns without a header.
    pub fn write_csv<W: Write>(&self, mut w: W, gnuplot: bool) -> Result<()> {
        if gnuplot {
            for (x, f) in self.knots.iter().zip(&self.values) {
                writeln!(w, "{x} {f}")?;
            }
            return Ok(());
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "F"])?;
        for (x, f) in self.knots.iter().zip(&self.values) {
            out.write_record([x.to_string(), f.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceMass {
    pub lo: f64,
    pub hi: f64,
    /// Predicted mass of `[lo, hi]` under the whole density.
    pub predicted: f64,
    pub empirical: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub n: usize,
    pub ks: f64,
    /// `sum |empirical bin mass - predicted bin mass|` over `histogram_bins` equal bins
    /// spanning the support, plus the empirical mass outside it.
    pub l1_histogram: f64,
    pub histogram_bins: usize,
    pub piece_masses: Vec<PieceMass>,
    pub support_dilation: f64,
    pub mass_outside_support: f64,
    pub min_piece_mass: f64,
    /// `min_piece_mass / 2`: a lower bound on the KS distance from the prediction of
    /// any measure with no atom inside the lightest piece, since the predicted CDF
    /// rises by at least `min_piece_mass` across that piece while the other CDF stays
    /// constant there.
    pub finite_support_ks_floor: f64,
    pub density: PredictedDensity,
}

/// KS distance of any measure with at most `atoms` atoms from a continuous CDF of total
/// mass 1: one of the `atoms + 1` gaps carries a rise of at least `1 / (atoms + 1)`.
pub fn ks_floor_for_atoms(atoms: usize) -> f64 {
    0.5 / (atoms as f64 + 1.0)
}

pub const SUPPORT_DILATION: f64 = 1e-6;

/// Compare the empirical measure of `c_sample` with the prediction for `(p, alpha, theta)`.
pub fn density_report(
    p: &IntPolynomial,
    alpha: &RealAlgebraic,
    theta: &RealInput,
    c_sample: &[f64],
    policy: &PrecisionPolicy,
) -> Result<DensityReport> {
    let density = predicted_density(p, alpha, theta, 64, policy)?;
    compare(density, c_sample, 64)
}

/// Distances between the empirical measure of `sample` and `density`.
pub fn compare(density: PredictedDensity, sample: &[f64], histogram_bins: usize) -> Result<DensityReport> {
    let em = EmpiricalMeasure::new(sample)?;
    let cdf = predicted_cdf(&density);
    let ks = ks_distance(&em, &cdf);
    let lo = density.pieces.iter().map(|p| p.lo).fold(f64::INFINITY, f64::min);
    let hi = density.pieces.iter().map(|p| p.hi).fold(f64::NEG_INFINITY, f64::max);
    let bins = em.histogram(lo, hi, histogram_bins);
    let inside: usize = bins.iter().map(|b| b.count).sum();
    let n = em.n as f64;
    let l1_histogram = bins
        .iter()
        .map(|b| (b.count as f64 / n - (cdf.cdf(b.bin_hi) - cdf.cdf(b.bin_lo))).abs())
        .sum::<f64>()
        + (em.n - inside) as f64 / n;
    let piece_masses = density
        .pieces
        .iter()
        .map(|p| PieceMass { lo: p.lo, hi: p.hi, predicted: cdf.cdf(p.hi) - cdf.cdf(p.lo), empirical: em.mass_in(p.lo, p.hi) })
        .collect();
    let outside = em.sorted_samples.iter().filter(|&&x| !density.in_support(x, SUPPORT_DILATION)).count();
    let min_piece_mass = density.min_piece_mass();
    Ok(DensityReport {
        n: em.n,
        ks,
        l1_histogram,
        histogram_bins,
        piece_masses,
        support_dilation: SUPPORT_DILATION,
        mass_outside_support: outside as f64 / n,
        min_piece_mass,
        finite_support_ks_floor: min_piece_mass / 2.0,
        density,
    })
}
