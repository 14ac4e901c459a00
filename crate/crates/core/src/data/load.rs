//! Corpus loading and saving in the M4 file layout.
//!
//! Train and test files are CSVs with a header row and then one series per
//! row: the series id followed by comma-separated values, with trailing
//! blank cells permitted (the corpus is ragged). The info file maps each
//! id to its domain category and frequency.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::{DomainCategory, Frequency, TimeSeries};

struct InfoRecord {
    domain: DomainCategory,
    frequency: Frequency,
}

/// Load an M4-format corpus from a train CSV, a test CSV and an info CSV.
///
/// Series are returned sorted by id. Every series is validated against the
/// per-frequency minimum length and horizon; ids appearing in the data files
/// but not in the info file produce an orphan-series error.
pub fn load_m4_corpus(
    train_path: &Path,
    test_path: &Path,
    info_path: &Path,
) -> Result<Vec<TimeSeries>> {
    let info = load_info(info_path)?;
    let (train_rows, test_rows) = rayon::join(
        || load_value_rows(train_path),
        || load_value_rows(test_path),
    );
    let train_rows = train_rows?;
    let test_rows = test_rows?;

    let mut orphans: Vec<String> = train_rows
        .keys()
        .chain(test_rows.keys())
        .filter(|id| !info.contains_key(*id))
        .cloned()
        .collect();
    orphans.dedup();
    if !orphans.is_empty() {
        return Err(Error::OrphanSeries { ids: orphans });
    }

    let mut corpus = Vec::with_capacity(train_rows.len());
    for (id, train) in train_rows {
        let test = test_rows.get(&id).cloned().ok_or_else(|| {
            Error::Shape(format!("series {id}: present in train file but not in test file"))
        })?;
        let record = &info[&id];
        corpus.push(TimeSeries::new(
            id,
            record.frequency,
            record.domain,
            train,
            test,
        )?);
    }
    Ok(corpus)
}

/// Write a corpus back out as train/test/info CSVs (the inverse of
/// [`load_m4_corpus`]).
pub fn save_m4_corpus(
    corpus: &[TimeSeries],
    train_path: &Path,
    test_path: &Path,
    info_path: &Path,
) -> Result<()> {
    let mut sorted: Vec<&TimeSeries> = corpus.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let max_train = sorted.iter().map(|s| s.train.len()).max().unwrap_or(0);
    let max_test = sorted.iter().map(|s| s.test.len()).max().unwrap_or(0);

    write_value_file(train_path, &sorted, max_train, |s| &s.train)?;
    write_value_file(test_path, &sorted, max_test, |s| &s.test)?;

    let mut out = String::from("M4id,category,Frequency,Horizon\n");
    for series in &sorted {
        out.push_str(&format!(
            "{},{},{},{}\n",
            series.id,
            series.domain.name(),
            series.frequency.name(),
            series.frequency.horizon()
        ));
    }
    std::fs::write(info_path, out).map_err(|e| Error::io(info_path.display().to_string(), e))
}

fn write_value_file(
    path: &Path,
    corpus: &[&TimeSeries],
    width: usize,
    select: impl Fn(&TimeSeries) -> &[f64],
) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut header = String::from("id");
    for i in 1..=width {
        header.push_str(&format!(",V{i}"));
    }
    header.push('\n');
    file.write_all(header.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    for series in corpus {
        let values = select(series);
        let mut line = series.id.clone();
        for v in values {
            line.push_str(&format!(",{v}"));
        }
        // pad to a rectangular layout with trailing blanks
        for _ in values.len()..width {
            line.push(',');
        }
        line.push('\n');
        file.write_all(line.as_bytes())
            .map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    Ok(())
}

fn load_info(path: &Path) -> Result<BTreeMap<String, InfoRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_open_error(path, e))?;

    let headers = reader
        .headers()
        .map_err(|e| csv_open_error(path, e))?
        .clone();
    let col = |names: &[&str]| -> Option<usize> {
        headers
            .iter()
            .position(|h| names.iter().any(|n| h.trim().eq_ignore_ascii_case(n)))
    };
    let id_col = col(&["M4id", "id"]).unwrap_or(0);
    let category_col = col(&["category"]).ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        row: 1,
        column: 1,
        detail: "info file has no 'category' column".into(),
    })?;
    let freq_col = col(&["Frequency", "SP"]).ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        row: 1,
        column: 1,
        detail: "info file has no 'Frequency' column".into(),
    })?;

    let mut info = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // 1-based, after the header
        let record = record.map_err(|e| csv_open_error(path, e))?;
        let field = |c: usize| -> Result<&str> {
            record.get(c).ok_or_else(|| Error::Parse {
                path: path.display().to_string(),
                row,
                column: c + 1,
                detail: "missing field".into(),
            })
        };
        let id = field(id_col)?.trim().to_string();
        let domain = DomainCategory::parse(field(category_col)?).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            row,
            column: category_col + 1,
            detail: e.to_string(),
        })?;
        let frequency = Frequency::parse(field(freq_col)?).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            row,
            column: freq_col + 1,
            detail: e.to_string(),
        })?;
        if info
            .insert(id.clone(), InfoRecord { domain, frequency })
            .is_some()
        {
            return Err(Error::Conflict(format!("duplicate info row for series {id}")));
        }
    }
    Ok(info)
}

/// Parse a header-plus-rows value file into id -> values, trimming trailing
/// blank cells (treated as series termination).
fn load_value_rows(path: &Path) -> Result<BTreeMap<String, Vec<f64>>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .skip(1) // header
        .filter(|(_, line)| !line.trim().is_empty())
        .collect();

    let parsed: Vec<Result<(String, Vec<f64>)>> = rows
        .par_iter()
        .map(|(idx, line)| parse_value_row(path, idx + 1, line))
        .collect();

    let mut out = BTreeMap::new();
    for item in parsed {
        let (id, values) = item?;
        if out.insert(id.clone(), values).is_some() {
            return Err(Error::Conflict(format!(
                "duplicate series id {id} in {}",
                path.display()
            )));
        }
    }
    Ok(out)
}

fn parse_value_row(path: &Path, row: usize, line: &str) -> Result<(String, Vec<f64>)> {
    let mut cells = line.split(',');
    let id = cells
        .next()
        .unwrap_or("")
        .trim()
        .trim_matches('"')
        .to_string();
    if id.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            row,
            column: 1,
            detail: "empty series id".into(),
        });
    }
    let mut values = Vec::new();
    let mut ended = false;
    for (i, cell) in cells.enumerate() {
        let cell = cell.trim().trim_matches('"');
        if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
            ended = true; // trailing blanks terminate the series
            continue;
        }
        if ended {
            return Err(Error::Parse {
                path: path.display().to_string(),
                row,
                column: i + 2,
                detail: "value after blank cell; blanks may only trail the series".into(),
            });
        }
        let value: f64 = cell.parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            row,
            column: i + 2,
            detail: format!("non-numeric cell {cell:?}"),
        })?;
        values.push(value);
    }
    Ok((id, values))
}

fn csv_open_error(path: &Path, e: csv::Error) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        row: 0,
        column: 0,
        detail: e.to_string(),
    }
}
