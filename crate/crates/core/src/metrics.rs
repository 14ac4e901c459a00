//! Forecast accuracy metrics: sMAPE, MASE, the Naive2 reference forecaster
//! and the OWA composite that scores methods relative to Naive2.
//!
//! These definitions anchor everything else in the toolkit: base learners
//! share the Naive2 seasonal pathway (seasonality test + multiplicative
//! classical decomposition) and the meta-learners train on per-series OWA
//! contributions computed here.

use serde::{Deserialize, Serialize};

use crate::data::TimeSeries;
use crate::error::{Error, Result};

/// Accuracy summary for one series or one aggregated subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    /// Symmetric mean absolute percentage error, in percent.
    pub smape: f64,
    /// Mean absolute scaled error.
    pub mase: f64,
    /// Overall weighted average relative to Naive2.
    pub owa: f64,
}

/// sMAPE in percent: (1/h) Σ 2|Y_t − Ŷ_t| / (|Y_t| + |Ŷ_t|) × 100.
///
/// Terms with |Y_t| + |Ŷ_t| = 0 contribute zero, keeping the metric defined
/// on all-zero segments.
pub fn smape(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    if actual.len() != forecast.len() {
        return Err(Error::Shape(format!(
            "smape: actual has {} values, forecast has {}",
            actual.len(),
            forecast.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::Shape("smape: empty inputs".into()));
    }
    let sum: f64 = actual
        .iter()
        .zip(forecast)
        .map(|(y, f)| {
            let denom = y.abs() + f.abs();
            if denom == 0.0 {
                0.0
            } else {
                2.0 * (y - f).abs() / denom
            }
        })
        .sum();
    Ok(sum / actual.len() as f64 * 100.0)
}

/// MASE: mean absolute forecast error scaled by the in-sample mean absolute
/// error of the seasonal naive with period `m`.
pub fn mase(insample: &[f64], actual: &[f64], forecast: &[f64], m: usize) -> Result<f64> {
    if actual.len() != forecast.len() {
        return Err(Error::Shape(format!(
            "mase: actual has {} values, forecast has {}",
            actual.len(),
            forecast.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::Shape("mase: empty forecast window".into()));
    }
    let n = insample.len();
    if n <= m {
        return Err(Error::InsufficientHistory(format!(
            "mase: {n} in-sample observations with seasonal period {m}"
        )));
    }
    let scale: f64 = (m..n)
        .map(|t| (insample[t] - insample[t - m]).abs())
        .sum::<f64>()
        / (n - m) as f64;
    if scale <= 0.0 {
        return Err(Error::DegenerateScale(
            "mase: in-sample seasonal naive error is zero".into(),
        ));
    }
    let numerator: f64 = actual
        .iter()
        .zip(forecast)
        .map(|(y, f)| (y - f).abs())
        .sum::<f64>()
        / actual.len() as f64;
    Ok(numerator / scale)
}

/// OWA of aggregated (sMAPE, MASE) pairs relative to the Naive2 aggregates:
/// 0.5 (MASE/MASE_n2 + sMAPE/sMAPE_n2).
pub fn owa(method: (f64, f64), naive2: (f64, f64)) -> Result<f64> {
    let (m_smape, m_mase) = method;
    let (n_smape, n_mase) = naive2;
    if n_smape <= 0.0 || n_mase <= 0.0 {
        return Err(Error::DegenerateReference(format!(
            "owa: Naive2 aggregates must be positive (smape {n_smape}, mase {n_mase})"
        )));
    }
    Ok(0.5 * (m_mase / n_mase + m_smape / n_smape))
}

/// Lag-k sample autocorrelation with the biased variance denominator.
/// Zero-variance input yields 0.
pub fn autocorrelation(values: &[f64], lag: usize) -> f64 {
    let n = values.len();
    if lag >= n {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let denom: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    if denom <= 0.0 {
        return 0.0;
    }
    let num: f64 = (lag..n)
        .map(|t| (values[t] - mean) * (values[t - lag] - mean))
        .sum();
    num / denom
}

/// 90% seasonality test: a series is treated as seasonal iff
/// |ACF_m| > 1.645 sqrt((1 + 2 Σ_{i<m} ACF_i²) / n).
pub fn is_seasonal(values: &[f64], m: usize) -> bool {
    let n = values.len();
    if m <= 1 || n < 3 * m {
        return false;
    }
    let sum_sq: f64 = (1..m).map(|i| autocorrelation(values, i).powi(2)).sum();
    let limit = 1.645 * ((1.0 + 2.0 * sum_sq) / n as f64).sqrt();
    autocorrelation(values, m).abs() > limit
}

/// Multiplicative seasonal indices from classical decomposition:
/// ratio-to-centered-moving-average, averaged per season, normalized to
/// mean one. Index j applies to observations at (t − 1) mod m = j for
/// 1-based t.
pub fn seasonal_indices(values: &[f64], m: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if m < 2 {
        return Ok(vec![1.0]);
    }
    if n < 2 * m {
        return Err(Error::InsufficientHistory(format!(
            "seasonal decomposition needs at least {} observations, got {n}",
            2 * m
        )));
    }
    let trend = centered_moving_average(values, m);
    let mut sums = vec![0.0; m];
    let mut counts = vec![0usize; m];
    for (t, ma) in trend.iter().enumerate() {
        if let Some(ma) = ma {
            if *ma <= 0.0 {
                return Err(Error::Domain(
                    "multiplicative decomposition requires a positive trend".into(),
                ));
            }
            sums[t % m] += values[t] / ma;
            counts[t % m] += 1;
        }
    }
    let mut indices = vec![0.0; m];
    for j in 0..m {
        if counts[j] == 0 {
            return Err(Error::InsufficientHistory(format!(
                "no trend-covered observation for season {j}"
            )));
        }
        indices[j] = sums[j] / counts[j] as f64;
    }
    let mean = indices.iter().sum::<f64>() / m as f64;
    if mean <= 0.0 {
        return Err(Error::Domain("seasonal indices must be positive".into()));
    }
    for idx in &mut indices {
        *idx /= mean;
    }
    Ok(indices)
}

/// Centered moving average of window `m`; even windows use the standard
/// 2×m average. Positions without a full window are `None`.
pub fn centered_moving_average(values: &[f64], m: usize) -> Vec<Option<f64>> {
    let n = values.len();
    let mut out = vec![None; n];
    if m == 0 || n < m {
        return out;
    }
    if m % 2 == 1 {
        let half = m / 2;
        for t in half..n - half {
            let window = &values[t - half..=t + half];
            out[t] = Some(window.iter().sum::<f64>() / m as f64);
        }
    } else {
        // average of two adjacent length-m windows, weighting ends by 1/2
        let half = m / 2;
        if n < m + 1 {
            return out;
        }
        for t in half..n - half {
            let lo = t - half;
            let hi = t + half;
            let mut acc = 0.5 * (values[lo] + values[hi]);
            for v in &values[lo + 1..hi] {
                acc += v;
            }
            out[t] = Some(acc / m as f64);
        }
    }
    out
}

/// Seasonal state shared by Naive2 and the deseasonalize/reseasonalize
/// pathway of the statistical base learners.
#[derive(Debug, Clone)]
pub struct SeasonalAdjustment {
    /// Multiplicative indices, length m (all ones when not seasonal).
    pub indices: Vec<f64>,
    /// Whether the seasonality test fired.
    pub seasonal: bool,
}

impl SeasonalAdjustment {
    /// Run the seasonality test and, if it fires, estimate indices.
    pub fn fit(values: &[f64], m: usize) -> Result<SeasonalAdjustment> {
        if m > 1 && is_seasonal(values, m) {
            let indices = seasonal_indices(values, m)?;
            Ok(SeasonalAdjustment {
                indices,
                seasonal: true,
            })
        } else {
            Ok(SeasonalAdjustment {
                indices: vec![1.0; m.max(1)],
                seasonal: false,
            })
        }
    }

    /// In-sample index for 1-based position t.
    pub fn index_at(&self, t: usize) -> f64 {
        self.indices[(t - 1) % self.indices.len()]
    }

    /// Divide out the seasonal component.
    pub fn deseasonalize(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| v / self.index_at(i + 1))
            .collect()
    }

    /// Re-apply indices to a forecast of length h starting at position n+1.
    pub fn reseasonalize(&self, forecast: &[f64], n: usize) -> Vec<f64> {
        forecast
            .iter()
            .enumerate()
            .map(|(j, v)| v * self.index_at(n + 1 + j))
            .collect()
    }
}

/// Naive2 forecast: seasonally adjusted last-value repetition.
///
/// When the seasonal period is 1 or the seasonality test fails, this is the
/// plain naive forecast. Otherwise the series is classically decomposed
/// (multiplicative, centered moving average), the adjusted series is
/// forecast by last-value repetition and the seasonal indices are
/// re-applied over the horizon.
pub fn naive2_forecast(series: &TimeSeries) -> Result<Vec<f64>> {
    naive2_from_values(
        &series.train,
        series.frequency.seasonal_period(),
        series.horizon(),
    )
}

/// Naive2 on raw values, for callers outside the corpus types.
pub fn naive2_from_values(train: &[f64], m: usize, h: usize) -> Result<Vec<f64>> {
    if train.is_empty() {
        return Err(Error::InsufficientHistory("naive2: empty series".into()));
    }
    let adjustment = SeasonalAdjustment::fit(train, m)?;
    let adjusted = adjustment.deseasonalize(train);
    let level = *adjusted.last().expect("non-empty");
    let flat = vec![level; h];
    Ok(adjustment.reseasonalize(&flat, train.len()))
}

/// Per-series sMAPE and MASE of a forecast against the series' test window.
pub fn score_series(series: &TimeSeries, forecast: &[f64]) -> Result<(f64, f64)> {
    let s = smape(&series.test, forecast)?;
    let m = mase(
        &series.train,
        &series.test,
        forecast,
        series.frequency.seasonal_period(),
    )?;
    Ok((s, m))
}

/// Per-series OWA contribution: the series' own sMAPE/MASE each divided by
/// that series' Naive2 values, halved and summed. This is the loss L used to
/// train the weighting meta-learners.
pub fn per_series_owa(series: &TimeSeries, forecast: &[f64]) -> Result<f64> {
    let method = score_series(series, forecast)?;
    let reference = score_series(series, &naive2_forecast(series)?)?;
    if reference.0 <= 0.0 || reference.1 <= 0.0 {
        return Err(Error::DegenerateReference(format!(
            "series {}: Naive2 sMAPE/MASE must be positive for per-series OWA",
            series.id
        )));
    }
    owa(method, reference)
}

/// Aggregate subset OWA: sMAPE and MASE are averaged across series first,
/// then each ratio is taken against the Naive2 averages.
pub fn subset_owa(method_scores: &[(f64, f64)], naive2_scores: &[(f64, f64)]) -> Result<f64> {
    if method_scores.len() != naive2_scores.len() || method_scores.is_empty() {
        return Err(Error::Shape(format!(
            "subset_owa: {} method scores vs {} reference scores",
            method_scores.len(),
            naive2_scores.len()
        )));
    }
    let mean = |scores: &[(f64, f64)]| {
        let n = scores.len() as f64;
        let (s, m) = scores
            .iter()
            .fold((0.0, 0.0), |(s, m), (a, b)| (s + a, m + b));
        (s / n, m / n)
    };
    owa(mean(method_scores), mean(naive2_scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DomainCategory, Frequency};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn monthly_series(train: Vec<f64>, test: Vec<f64>) -> TimeSeries {
        TimeSeries {
            id: "M1".into(),
            frequency: Frequency::Monthly,
            domain: DomainCategory::Macro,
            train,
            test,
        }
    }

    #[test]
    fn smape_examples() {
        assert_eq!(smape(&[100.0, 100.0], &[100.0, 100.0]).unwrap(), 0.0);
        assert_relative_eq!(
            smape(&[100.0], &[50.0]).unwrap(),
            200.0 / 3.0,
            max_relative = 1e-12
        );
        assert_eq!(smape(&[0.0], &[0.0]).unwrap(), 0.0);
        assert!(smape(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mase_examples() {
        // denominator = mean(|2-1|,|3-2|,|4-3|) = 1
        assert_relative_eq!(
            mase(&[1.0, 2.0, 3.0, 4.0], &[5.0], &[4.0], 1).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_eq!(
            mase(&[1.0, 2.0, 3.0, 4.0], &[5.0, 6.0], &[5.0, 6.0], 1).unwrap(),
            0.0
        );
        let degenerate = mase(&[7.0, 7.0, 7.0, 7.0], &[7.0], &[6.0], 1).unwrap_err();
        assert_eq!(degenerate.category(), "degenerate-scale");
        let short = mase(&[1.0], &[2.0], &[2.0], 1).unwrap_err();
        assert_eq!(short.category(), "insufficient-history");
    }

    #[test]
    fn owa_examples() {
        assert_eq!(owa((10.0, 2.0), (10.0, 2.0)).unwrap(), 1.0);
        assert_eq!(owa((5.0, 1.0), (10.0, 2.0)).unwrap(), 0.5);
        assert!(owa((5.0, 1.0), (0.0, 2.0)).is_err());
    }

    #[test]
    fn naive2_nonseasonal_repeats_last_value() {
        let f = naive2_from_values(&[2.0, 4.0, 6.0], 1, 5).unwrap();
        assert_eq!(f, vec![6.0; 5]);
    }

    #[test]
    fn naive2_constant_seasonal_series_stays_constant() {
        let train = vec![5.0; 36];
        let f = naive2_from_values(&train, 12, 18).unwrap();
        for v in f {
            assert_relative_eq!(v, 5.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn naive2_reproduces_fixed_multiplicative_pattern() {
        // brute-force oracle: for y_t = level * s[(t-1) % 4] with constant
        // level, the centered MA equals the level wherever defined, the
        // per-season ratio means equal s exactly (s averages to one), the
        // adjusted series is the constant level, and the forecast must be
        // level * s over the horizon.
        let pattern = [0.8, 1.2, 0.9, 1.1];
        let level = 50.0;
        let n = 20;
        let train: Vec<f64> = (0..n).map(|t| level * pattern[t % 4]).collect();
        assert!(is_seasonal(&train, 4), "pure pattern must test seasonal");

        let h = 8;
        let forecast = naive2_from_values(&train, 4, h).unwrap();
        for (j, value) in forecast.iter().enumerate() {
            let expected = level * pattern[(n + j) % 4];
            assert_relative_eq!(*value, expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn per_series_owa_of_naive2_is_one() {
        let train: Vec<f64> = (1..=40).map(|t| 10.0 + (t as f64) * 0.7 + ((t * t) % 5) as f64).collect();
        let test: Vec<f64> = (41..=58).map(|t| 10.0 + (t as f64) * 0.7).collect();
        let series = monthly_series(train, test);
        let n2 = naive2_forecast(&series).unwrap();
        let value = per_series_owa(&series, &n2).unwrap();
        assert_relative_eq!(value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn subset_owa_matches_per_series_on_singleton() {
        let train: Vec<f64> = (1..=40).map(|t| 10.0 + (t as f64).sqrt() * 3.0).collect();
        let test: Vec<f64> = (41..=58).map(|t| 10.0 + (t as f64).sqrt() * 3.0).collect();
        let series = monthly_series(train, test);
        let forecast = vec![12.0; 18];
        let method = score_series(&series, &forecast).unwrap();
        let reference = score_series(&series, &naive2_forecast(&series).unwrap()).unwrap();
        let aggregate = subset_owa(&[method], &[reference]).unwrap();
        let per_series = per_series_owa(&series, &forecast).unwrap();
        assert_relative_eq!(aggregate, per_series, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn smape_is_symmetric_and_scale_invariant(
            values in proptest::collection::vec((1.0f64..1e4, 1.0f64..1e4), 1..20),
            scale in 0.01f64..100.0,
        ) {
            let (actual, forecast): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
            let forward = smape(&actual, &forecast).unwrap();
            let backward = smape(&forecast, &actual).unwrap();
            prop_assert!((forward - backward).abs() < 1e-9);

            let scaled_a: Vec<f64> = actual.iter().map(|v| v * scale).collect();
            let scaled_f: Vec<f64> = forecast.iter().map(|v| v * scale).collect();
            let scaled = smape(&scaled_a, &scaled_f).unwrap();
            prop_assert!((forward - scaled).abs() < 1e-7);
        }

        #[test]
        fn mase_is_scale_invariant(
            insample in proptest::collection::vec(1.0f64..1e3, 5..40),
            errors in proptest::collection::vec(-5.0f64..5.0, 1..8),
            scale in 0.01f64..100.0,
        ) {
            let actual: Vec<f64> = errors.iter().map(|e| 50.0 + e).collect();
            let forecast: Vec<f64> = errors.iter().map(|_| 50.0).collect();
            let base = mase(&insample, &actual, &forecast, 1);
            prop_assume!(base.is_ok());
            let base = base.unwrap();
            let s = |v: &[f64]| v.iter().map(|x| x * scale).collect::<Vec<f64>>();
            let scaled = mase(&s(&insample), &s(&actual), &s(&forecast), 1).unwrap();
            prop_assert!((base - scaled).abs() <= 1e-7 * base.max(1.0));
        }
    }
}
