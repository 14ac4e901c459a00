//! M4-format series: frequency constants, corpus loading, external
//! forecast ingestion and cross-validation folds.

mod folds;
mod forecasts;
mod load;

pub use folds::{make_folds, FoldAssignment, Membership};
pub use forecasts::{ForecastSet, ForecastStore};
pub use load::{load_m4_corpus, save_m4_corpus};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling frequency of a series. Owns the per-frequency horizon and
/// seasonal-period constants used everywhere else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Frequency {
    Yearly,
    Quarterly,
    Monthly,
    Weekly,
    Daily,
    Hourly,
}

impl Frequency {
    /// All frequencies in canonical order.
    pub const ALL: [Frequency; 6] = [
        Frequency::Yearly,
        Frequency::Quarterly,
        Frequency::Monthly,
        Frequency::Weekly,
        Frequency::Daily,
        Frequency::Hourly,
    ];

    /// Forecast horizon h.
    pub fn horizon(self) -> usize {
        match self {
            Frequency::Yearly => 6,
            Frequency::Quarterly => 8,
            Frequency::Monthly => 18,
            Frequency::Weekly => 13,
            Frequency::Daily => 14,
            Frequency::Hourly => 48,
        }
    }

    /// Seasonal period m used by MASE and the Naive2 reference.
    pub fn seasonal_period(self) -> usize {
        match self {
            Frequency::Monthly => 12,
            Frequency::Quarterly => 4,
            Frequency::Hourly => 24,
            _ => 1,
        }
    }

    /// Second seasonal period L; defined only for hourly data.
    pub fn second_seasonal_period(self) -> Option<usize> {
        match self {
            Frequency::Hourly => Some(168),
            _ => None,
        }
    }

    /// Seasonal window lengths (K, L) used by the hybrid smoothing/recurrent
    /// learner. Weekly series are treated as single-seasonal here even though
    /// their MASE period is 1.
    pub fn hybrid_periods(self) -> (usize, Option<usize>) {
        match self {
            Frequency::Yearly | Frequency::Daily => (1, None),
            Frequency::Quarterly => (4, None),
            Frequency::Monthly => (12, None),
            Frequency::Weekly => (52, None),
            Frequency::Hourly => (24, Some(168)),
        }
    }

    /// Minimum in-sample length accepted at load time.
    pub fn min_train_len(self) -> usize {
        match self {
            Frequency::Yearly => 13,
            Frequency::Quarterly => 16,
            _ => 1,
        }
    }

    /// Canonical name, matching the info-file spelling.
    pub fn name(self) -> &'static str {
        match self {
            Frequency::Yearly => "Yearly",
            Frequency::Quarterly => "Quarterly",
            Frequency::Monthly => "Monthly",
            Frequency::Weekly => "Weekly",
            Frequency::Daily => "Daily",
            Frequency::Hourly => "Hourly",
        }
    }

    /// Parse a frequency name, case-insensitively.
    pub fn parse(name: &str) -> Result<Frequency> {
        match name.trim().to_ascii_lowercase().as_str() {
            "yearly" => Ok(Frequency::Yearly),
            "quarterly" => Ok(Frequency::Quarterly),
            "monthly" => Ok(Frequency::Monthly),
            "weekly" => Ok(Frequency::Weekly),
            "daily" => Ok(Frequency::Daily),
            "hourly" => Ok(Frequency::Hourly),
            other => Err(Error::Config(format!("unknown frequency {other:?}"))),
        }
    }
}

/// Series domain category from the corpus info file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DomainCategory {
    Micro,
    Industry,
    Macro,
    Finance,
    Demographic,
    Other,
}

impl DomainCategory {
    pub const ALL: [DomainCategory; 6] = [
        DomainCategory::Micro,
        DomainCategory::Industry,
        DomainCategory::Macro,
        DomainCategory::Finance,
        DomainCategory::Demographic,
        DomainCategory::Other,
    ];

    /// Index into the canonical one-hot encoding.
    pub fn index(self) -> usize {
        match self {
            DomainCategory::Micro => 0,
            DomainCategory::Industry => 1,
            DomainCategory::Macro => 2,
            DomainCategory::Finance => 3,
            DomainCategory::Demographic => 4,
            DomainCategory::Other => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainCategory::Micro => "Micro",
            DomainCategory::Industry => "Industry",
            DomainCategory::Macro => "Macro",
            DomainCategory::Finance => "Finance",
            DomainCategory::Demographic => "Demographic",
            DomainCategory::Other => "Other",
        }
    }

    pub fn parse(name: &str) -> Result<DomainCategory> {
        match name.trim().to_ascii_lowercase().as_str() {
            "micro" => Ok(DomainCategory::Micro),
            "industry" => Ok(DomainCategory::Industry),
            "macro" => Ok(DomainCategory::Macro),
            "finance" => Ok(DomainCategory::Finance),
            "demographic" | "demo" => Ok(DomainCategory::Demographic),
            "other" => Ok(DomainCategory::Other),
            other => Err(Error::Config(format!("unknown domain category {other:?}"))),
        }
    }
}

/// One observed series with its fixed train/test split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub id: String,
    pub frequency: Frequency,
    pub domain: DomainCategory,
    /// In-sample observations y_1..y_n.
    pub train: Vec<f64>,
    /// Held-out observations; length equals `frequency.horizon()`.
    pub test: Vec<f64>,
}

impl TimeSeries {
    /// Validating constructor; enforces the per-frequency minimum length,
    /// the horizon and finiteness/non-negativity of all observations.
    pub fn new(
        id: String,
        frequency: Frequency,
        domain: DomainCategory,
        train: Vec<f64>,
        test: Vec<f64>,
    ) -> Result<TimeSeries> {
        if train.len() < frequency.min_train_len() {
            return Err(Error::Shape(format!(
                "series {id}: {} observations, {} frequency requires at least {}",
                train.len(),
                frequency.name(),
                frequency.min_train_len()
            )));
        }
        if test.len() != frequency.horizon() {
            return Err(Error::Shape(format!(
                "series {id}: test length {} does not match {} horizon {}",
                test.len(),
                frequency.name(),
                frequency.horizon()
            )));
        }
        for (what, values) in [("train", &train), ("test", &test)] {
            if let Some(pos) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Domain(format!(
                    "series {id}: {what} value at position {} is {} (observations must be finite and non-negative)",
                    pos + 1,
                    values[pos]
                )));
            }
        }
        Ok(TimeSeries {
            id,
            frequency,
            domain,
            train,
            test,
        })
    }

    pub fn horizon(&self) -> usize {
        self.frequency.horizon()
    }

    pub fn len(&self) -> usize {
        self.train.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty()
    }
}
