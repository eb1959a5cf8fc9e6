//! Statistics for runs and estimators: power-law rate fits, cross-seed
//! aggregation, and empirical moment audits of the gradient estimators.

use crate::error::{Error, Result};
use crate::game::QuantumGame;
use crate::hermitian::{DensityMatrix, HermitianMatrix};
use crate::learning::{estimate_gradient, EstimatorKind, ExplorationGeometry, RunResult};
use crate::seeding::stream_rng;

/// Values are clamped up to this floor before taking logarithms in rate
/// fits, so a series that hits numerical zero cannot poison the fit.
pub const RATE_FIT_CLAMP: f64 = 1e-12;

/// Least-squares fit of `ln v = slope · ln t + intercept`.
///
/// Values are clamped to [`RATE_FIT_CLAMP`]; the abscissas must be positive
/// and not all equal.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::InsufficientSamples {
            got: points.len(),
            need: 2,
            what: "power-law fit points",
        });
    }
    let n = points.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(t, v) in points {
        if !(t > 0.0) || !v.is_finite() {
            return Err(Error::DimMismatch(format!(
                "power-law fit needs positive abscissas and finite values, got ({t}, {v})"
            )));
        }
        let x = t.ln();
        let y = v.max(RATE_FIT_CLAMP).ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::DimMismatch(
            "power-law fit needs at least two distinct abscissas".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Ok((slope, intercept))
}

/// A fitted decay exponent for the tail of a series.
#[derive(Clone, Copy, Debug)]
pub struct RateFit {
    /// Exponent of `v ≈ c · t^slope`.
    pub slope: f64,
    /// `ln c`.
    pub intercept: f64,
    /// How many tail points entered the fit.
    pub points: usize,
}

/// Fit a decay exponent to the tail (`t ≥ t_max / 10`) of a within-run
/// series. Requires at least 8 tail points so a fit never rests on noise
/// from a couple of iterates.
pub fn rate_fit(ts: &[f64], values: &[f64]) -> Result<RateFit> {
    if ts.len() != values.len() {
        return Err(Error::DimMismatch(format!(
            "rate fit got {} abscissas and {} values",
            ts.len(),
            values.len()
        )));
    }
    let t_max = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tail: Vec<(f64, f64)> = ts
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= t_max / 10.0)
        .map(|(&t, &v)| (t, v))
        .collect();
    if tail.len() < 8 {
        return Err(Error::InsufficientSamples {
            got: tail.len(),
            need: 8,
            what: "rate-fit tail points",
        });
    }
    let (slope, intercept) = fit_power_law(&tail)?;
    Ok(RateFit {
        slope,
        intercept,
        points: tail.len(),
    })
}

/// Linear-interpolation quantile of an ascending-sorted slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Cross-seed statistics at one recorded iterate.
#[derive(Clone, Copy, Debug)]
pub struct SummaryRow {
    pub t: u64,
    pub gap_mean: f64,
    pub gap_q10: f64,
    pub gap_median: f64,
    pub gap_q90: f64,
    pub bregman_mean: f64,
    pub bregman_median: f64,
}

fn spread(values: &mut [f64]) -> (f64, f64, f64, f64) {
    if values.iter().any(|v| v.is_nan()) {
        return (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.sort_by(f64::total_cmp);
    (
        mean,
        quantile(values, 0.1),
        quantile(values, 0.5),
        quantile(values, 0.9),
    )
}

/// Aggregate several runs of the same configuration (hence the same record
/// grid) into per-iterate statistics of the averaged-profile gap and the
/// relative entropy.
pub fn summarize_runs(runs: &[RunResult]) -> Result<Vec<SummaryRow>> {
    let first = runs.first().ok_or(Error::InsufficientSamples {
        got: 0,
        need: 1,
        what: "runs to summarize",
    })?;
    for r in runs {
        if r.records.len() != first.records.len()
            || r.records
                .iter()
                .zip(&first.records)
                .any(|(a, b)| a.t != b.t)
        {
            return Err(Error::DimMismatch(
                "runs record different iterate grids; summarize runs of one configuration".into(),
            ));
        }
    }
    let mut rows = Vec::with_capacity(first.records.len());
    for idx in 0..first.records.len() {
        let mut gaps: Vec<f64> = runs.iter().map(|r| r.records[idx].gap_avg).collect();
        let mut bregmans: Vec<f64> = runs.iter().map(|r| r.records[idx].bregman).collect();
        let (gap_mean, gap_q10, gap_median, gap_q90) = spread(&mut gaps);
        let (bregman_mean, _, bregman_median, _) = spread(&mut bregmans);
        rows.push(SummaryRow {
            t: first.records[idx].t,
            gap_mean,
            gap_q10,
            gap_median,
            gap_q90,
            bregman_mean,
            bregman_median,
        });
    }
    Ok(rows)
}

/// Fraction of runs whose final relative entropy lies strictly below the
/// threshold.
pub fn vs_success_rate(final_divergences: &[f64], threshold: f64) -> Result<f64> {
    if final_divergences.is_empty() {
        return Err(Error::InsufficientSamples {
            got: 0,
            need: 1,
            what: "final divergences",
        });
    }
    let hits = final_divergences.iter().filter(|&&v| v < threshold).count();
    Ok(hits as f64 / final_divergences.len() as f64)
}

/// Empirical moment audit of a gradient estimator at a fixed profile.
///
/// Identity components of a signal act trivially on the multiplicative-
/// weights update, so the bias comparison happens in the traceless
/// quotient: both the empirical mean and the exact gradient are projected
/// to their traceless parts. Statistical checks allow three standard
/// errors above the stated bound; the per-sample norm bound is exact.
#[derive(Clone, Copy, Debug)]
pub struct MomentReport {
    pub kind: EstimatorKind,
    pub delta: f64,
    pub samples: usize,
    /// `‖mean Z − V(X)‖` in the traceless quotient.
    pub bias_norm: f64,
    pub bias_bound: f64,
    /// Standard error of the mean-estimate norm.
    pub bias_se: f64,
    pub bias_ok: bool,
    /// Mean of `‖Z‖²`.
    pub second_moment: f64,
    pub second_bound: f64,
    pub second_se: f64,
    pub second_ok: bool,
    /// Largest single-sample `‖Z‖`.
    pub max_norm: f64,
    pub max_norm_bound: f64,
    pub max_ok: bool,
}

impl MomentReport {
    pub fn ok(&self) -> bool {
        self.bias_ok && self.second_ok && self.max_ok
    }
}

fn traceless_part(m: &HermitianMatrix) -> HermitianMatrix {
    let mut out = m.clone();
    out.axpy(
        -m.trace() / m.dim() as f64,
        &HermitianMatrix::identity(m.dim()),
    )
    .expect("identity has matching dim");
    out
}

/// Sample an estimator repeatedly at a fixed profile and compare its
/// empirical moments against the stated bounds. Requires at least 10⁴
/// samples.
pub fn estimator_moments(
    game: &QuantumGame,
    x: &[DensityMatrix],
    kind: EstimatorKind,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<MomentReport> {
    if samples < 10_000 {
        return Err(Error::InsufficientSamples {
            got: samples,
            need: 10_000,
            what: "estimator moment audit",
        });
    }
    game.check_profile(x)?;
    let geometry = ExplorationGeometry::new(game.dims())?;
    let n = game.num_players();
    let mut rng = stream_rng(seed, 0);

    let mut sum: Vec<HermitianMatrix> = game
        .dims()
        .iter()
        .map(|&d| HermitianMatrix::zeros(d))
        .collect();
    let mut sum_norm_sq = 0.0;
    let mut sum_norm_4 = 0.0;
    let mut max_norm = 0.0f64;
    for _ in 0..samples {
        let est = estimate_gradient(game, x, kind, delta, &geometry, &mut rng)?;
        for (acc, zi) in sum.iter_mut().zip(&est.z) {
            acc.axpy(1.0, zi)?;
        }
        let norm_sq = est.norm.powi(2);
        sum_norm_sq += norm_sq;
        sum_norm_4 += norm_sq * norm_sq;
        max_norm = max_norm.max(est.norm);
    }
    let count = samples as f64;

    let exact = game.gradient_profile(x)?;
    let mut bias_sq = 0.0;
    let mut mean_norm_sq = 0.0;
    for i in 0..n {
        let mean_i = traceless_part(&sum[i].scale(1.0 / count));
        mean_norm_sq += mean_i.frob_norm().powi(2);
        bias_sq += mean_i.sub(&traceless_part(&exact[i]))?.frob_norm().powi(2);
    }
    let bias_norm = bias_sq.sqrt();

    let second_moment = sum_norm_sq / count;
    // Total variance of the stacked estimate around its mean.
    let variance = (second_moment - mean_norm_sq).max(0.0);
    let bias_se = (variance / count).sqrt();
    let second_var = (sum_norm_4 / count - second_moment * second_moment).max(0.0);
    let second_se = (second_var / count).sqrt();

    let constants = game.constants()?;
    let d_max = geometry.max_directions() as f64;
    let sum_d_sq: f64 = geometry
        .bases
        .iter()
        .map(|b| (b.len() as f64).powi(2))
        .sum();
    let l = constants.lipschitz;
    let l2 = constants.smoothness;
    let b = constants.payoff_bound;
    let (bias_bound, second_bound, max_norm_bound) = match kind {
        EstimatorKind::FullInfo => (0.0, l * l, l),
        EstimatorKind::TwoPoint => (
            4.0 * d_max * l2 * delta,
            16.0 * d_max * d_max * l * l,
            sum_d_sq.sqrt() * l * (n as f64).sqrt(),
        ),
        EstimatorKind::OnePoint => (
            4.0 * d_max * l2 * delta,
            4.0 * d_max * d_max * b * b / (delta * delta),
            sum_d_sq.sqrt() * b / delta,
        ),
    };

    let bias_ok = bias_norm <= bias_bound + 3.0 * bias_se;
    let second_ok = second_moment <= second_bound + 3.0 * second_se;
    let max_ok = max_norm <= max_norm_bound + 1e-9;
    Ok(MomentReport {
        kind,
        delta,
        samples,
        bias_norm,
        bias_bound,
        bias_se,
        bias_ok,
        second_moment,
        second_bound,
        second_se,
        second_ok,
        max_norm,
        max_norm_bound,
        max_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::uniform_profile;

    #[test]
    fn power_law_fit_recovers_synthetic_exponent() {
        let points: Vec<(f64, f64)> = (0..12)
            .map(|k| {
                let t = 10f64.powf(k as f64 / 3.0 + 1.0);
                (t, 3.7 * t.powf(-0.43))
            })
            .collect();
        let (slope, intercept) = fit_power_law(&points).unwrap();
        assert!((slope + 0.43).abs() < 1e-9);
        assert!((intercept - 3.7f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn rate_fit_uses_only_the_final_decade_and_needs_eight_points() {
        let ts: Vec<f64> = (1..=40).map(|k| k as f64 * 25.0).collect();
        let values: Vec<f64> = ts
            .iter()
            .map(|&t| if t >= 100.0 { 2.0 * t.powf(-0.5) } else { 1e9 })
            .collect();
        let fit = rate_fit(&ts, &values).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-9);
        assert_eq!(fit.points, 37);

        let short = rate_fit(&ts[..8], &values[..8]);
        // Only 25..200 with tail t >= 20: all 8 survive; shrink further.
        assert!(short.is_ok());
        assert!(matches!(
            rate_fit(&ts[..7], &values[..7]),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn rate_fit_clamps_vanished_values() {
        let ts: Vec<f64> = (1..=10).map(|k| 100.0 * k as f64).collect();
        let values = vec![0.0; 10];
        let fit = rate_fit(&ts, &values).unwrap();
        assert!(fit.slope.abs() < 1e-9);
        assert!((fit.intercept - RATE_FIT_CLAMP.ln()).abs() < 1e-9);
    }

    #[test]
    fn quantiles_interpolate_linearly() {
        let data = [1.0, 2.0, 3.0, 4.0];
        assert!((quantile(&data, 0.1) - 1.3).abs() < 1e-12);
        assert!((quantile(&data, 0.5) - 2.5).abs() < 1e-12);
        assert!((quantile(&data, 0.9) - 3.7).abs() < 1e-12);
        assert_eq!(quantile(&data, 0.0), 1.0);
        assert_eq!(quantile(&data, 1.0), 4.0);
    }

    #[test]
    fn success_rate_counts_strictly_below_threshold() {
        let finals = [0.5, 1.0, 1.5, 0.999_999_9];
        let rate = vs_success_rate(&finals, 1.0).unwrap();
        assert!((rate - 0.5).abs() < 1e-12);
        assert!(vs_success_rate(&[], 1.0).is_err());
    }

    #[test]
    fn moment_audit_requires_enough_samples() {
        let game = fixtures::matching_pennies();
        let x = uniform_profile(game.dims());
        assert!(matches!(
            estimator_moments(&game, &x, EstimatorKind::OnePoint, 0.1, 100, 1),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn one_point_moments_pass_the_stated_bounds_at_the_center() {
        let game = fixtures::matching_pennies();
        let x = uniform_profile(game.dims());
        let report =
            estimator_moments(&game, &x, EstimatorKind::OnePoint, 0.2, 20_000, 5).unwrap();
        assert!(report.bias_ok, "bias {} vs {}", report.bias_norm, report.bias_bound);
        assert!(
            report.second_ok,
            "second moment {} vs {}",
            report.second_moment, report.second_bound
        );
        assert!(report.max_ok, "max {} vs {}", report.max_norm, report.max_norm_bound);
        assert!(report.ok());
    }
}
