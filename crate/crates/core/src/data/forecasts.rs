//! Per-series base-learner forecasts and ingestion of external forecast
//! files ("id,F1..Fh" CSV rows, optional header, trailing blanks trimmed).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Matrix of base-learner forecasts for one series: row order matches
/// `learners`, every row has length h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSet {
    pub series_id: String,
    pub learners: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl ForecastSet {
    /// Forecast row for one learner by name.
    pub fn row(&self, learner: &str) -> Option<&[f64]> {
        let idx = self.learners.iter().position(|l| l == learner)?;
        Some(&self.values[idx])
    }

    pub fn horizon(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }
}

/// Forecasts for a whole corpus, keyed by series id, with one shared
/// learner ordering (the set M).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ForecastStore {
    learners: Vec<String>,
    rows: BTreeMap<String, Vec<Option<Vec<f64>>>>,
}

impl ForecastStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Learner names in insertion order.
    pub fn learners(&self) -> &[String] {
        &self.learners
    }

    /// Series ids present in the store, sorted.
    pub fn series_ids(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Register a new learner name, extending every stored row.
    /// Re-registering an existing learner is a conflict.
    pub fn register_learner(&mut self, name: &str) -> Result<usize> {
        if self.learners.iter().any(|l| l == name) {
            return Err(Error::Conflict(format!("learner {name} already registered")));
        }
        self.learners.push(name.to_string());
        for row in self.rows.values_mut() {
            row.push(None);
        }
        Ok(self.learners.len() - 1)
    }

    /// Insert one forecast row for an already-registered learner.
    pub fn insert(&mut self, learner: &str, series_id: &str, values: Vec<f64>) -> Result<()> {
        let idx = self
            .learners
            .iter()
            .position(|l| l == learner)
            .ok_or_else(|| Error::Config(format!("learner {learner} is not registered")))?;
        let width = self.learners.len();
        let row = self
            .rows
            .entry(series_id.to_string())
            .or_insert_with(|| vec![None; width]);
        if row[idx].is_some() {
            return Err(Error::Conflict(format!(
                "duplicate forecast for series {series_id}, learner {learner}"
            )));
        }
        row[idx] = Some(values);
        Ok(())
    }

    /// Ingest an external forecast CSV for one learner and merge its rows.
    ///
    /// `horizon_of` maps a series id to its expected horizon; rows whose id
    /// maps to `None` are not part of the target corpus and are skipped,
    /// which lets combined all-subset submission files be ingested directly.
    /// A row with the wrong number of values is a shape error; an empty file
    /// merges nothing and leaves the learner unregistered. Returns the number
    /// of rows merged.
    pub fn load_external_forecasts(
        &mut self,
        path: &Path,
        learner_name: &str,
        horizon_of: &dyn Fn(&str) -> Option<usize>,
    ) -> Result<usize> {
        if self.learners.iter().any(|l| l == learner_name) {
            return Err(Error::Conflict(format!(
                "learner {learner_name} already registered"
            )));
        }
        let rows = parse_forecast_rows(path)?;
        let mut merged = Vec::new();
        for (row_no, id, values) in rows {
            let Some(h) = horizon_of(&id) else { continue };
            if values.len() != h {
                return Err(Error::Shape(format!(
                    "{} row {row_no}: series {id} has {} forecast values, expected horizon {h}",
                    path.display(),
                    values.len()
                )));
            }
            merged.push((id, values));
        }
        if merged.is_empty() {
            return Ok(0);
        }
        self.register_learner(learner_name)?;
        let count = merged.len();
        for (id, values) in merged {
            self.insert(learner_name, &id, values)?;
        }
        Ok(count)
    }

    /// Full forecast matrix for one series; a coverage error names the
    /// learners that are missing it.
    pub fn complete_set(&self, series_id: &str) -> Result<ForecastSet> {
        let row = self
            .rows
            .get(series_id)
            .ok_or_else(|| Error::Coverage {
                learner: self.learners.join("+"),
                ids: vec![series_id.to_string()],
            })?;
        let mut values = Vec::with_capacity(self.learners.len());
        for (idx, learner) in self.learners.iter().enumerate() {
            match &row[idx] {
                Some(v) => values.push(v.clone()),
                None => {
                    return Err(Error::Coverage {
                        learner: learner.clone(),
                        ids: vec![series_id.to_string()],
                    })
                }
            }
        }
        Ok(ForecastSet {
            series_id: series_id.to_string(),
            learners: self.learners.clone(),
            values,
        })
    }

    /// Ids that a learner does not cover, per learner, for error reporting.
    pub fn coverage_gaps(&self, required_ids: &[String]) -> Vec<(String, Vec<String>)> {
        self.learners
            .iter()
            .enumerate()
            .filter_map(|(idx, learner)| {
                let missing: Vec<String> = required_ids
                    .iter()
                    .filter(|id| {
                        self.rows
                            .get(*id)
                            .map_or(true, |row| row[idx].is_none())
                    })
                    .cloned()
                    .collect();
                (!missing.is_empty()).then(|| (learner.clone(), missing))
            })
            .collect()
    }
}

/// Parse "id,F1..Fh" rows; detects and skips a header row; trims trailing
/// blank cells.
fn parse_forecast_rows(path: &Path) -> Result<Vec<(usize, String, Vec<f64>)>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let row_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let id = cells.next().unwrap_or("").trim().trim_matches('"').to_string();
        let rest: Vec<&str> = cells.map(|c| c.trim().trim_matches('"')).collect();
        // header row: first value cell is non-numeric
        if idx == 0 {
            let looks_like_header = rest
                .iter()
                .find(|c| !c.is_empty())
                .map_or(false, |c| c.parse::<f64>().is_err());
            if looks_like_header {
                continue;
            }
        }
        let mut values = Vec::new();
        for (col, cell) in rest.iter().enumerate() {
            if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan")
            {
                continue; // ragged padding in combined files
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                row: row_no,
                column: col + 2,
                detail: format!("non-numeric forecast cell {cell:?}"),
            })?;
            values.push(v);
        }
        out.push((row_no, id, values));
    }
    Ok(out)
}
