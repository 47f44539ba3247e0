//! CSV ingestion of univariate and multivariate series.
//!
//! The first line is a header. Data rows are numbered from 1 in error
//! messages. A cell is missing when it is empty or one of `NA`, `NaN`,
//! `null` (case-insensitive). Missing cells are allowed only before the
//! first or after the last observed value; anything in between is a gap.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("column '{0}' not found in header")]
    UnknownColumn(String),
    #[error("row {row}: cannot parse '{value}' in column '{column}' as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: missing value inside column '{column}'")]
    DataGap { row: usize, column: String },
    #[error("column '{0}' holds no observations")]
    Empty(String),
    #[error("differencing needs at least two observations in column '{0}'")]
    TooShortToDifference(String),
}

/// Column selector: a header name, or a 0-based position when no header
/// cell has that name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnRef(pub String);

impl ColumnRef {
    fn resolve(&self, header: &[String]) -> Result<usize, IngestError> {
        if let Some(i) = header.iter().position(|h| h == &self.0) {
            return Ok(i);
        }
        match self.0.parse::<usize>() {
            Ok(i) if i < header.len() => Ok(i),
            _ => Err(IngestError::UnknownColumn(self.0.clone())),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Transform {
    pub difference: bool,
    pub demean: bool,
}

/// What was done to the raw column, enough to map transformed values back
/// to levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub column: String,
    /// Data-row number (1-based) of the first kept raw observation.
    pub first_row: usize,
    pub transform: Transform,
    /// Mean removed after differencing, if demeaned.
    pub mean: Option<f64>,
    /// Raw observations before any transform.
    pub levels: Vec<f64>,
}

impl SeriesMeta {
    /// Maps a transformed value at position `k` of the series back to the
    /// scale of the raw column.
    pub fn to_level(&self, k: usize, value: f64) -> f64 {
        let v = value + self.mean.unwrap_or(0.0);
        if self.transform.difference {
            self.levels[k] + v
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub values: Vec<f64>,
    /// Label of each value: the `t` column when present, else the row number.
    pub labels: Vec<String>,
    pub meta: SeriesMeta,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table, IngestError> {
    let io = |source| IngestError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(io)?;
    let header = reader
        .headers()
        .map_err(io)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record.map_err(io)?.iter().map(str::to_string).collect());
    }
    Ok(Table { header, rows })
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || ["na", "nan", "null"].contains(&cell.to_ascii_lowercase().as_str())
}

/// Parses one column into `(row number, value)` pairs with edge-missing
/// rows removed.
fn parse_column(table: &Table, idx: usize) -> Result<Vec<(usize, f64)>, IngestError> {
    let name = &table.header[idx];
    let cells: Vec<Option<f64>> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let cell = row.get(idx).map(String::as_str).unwrap_or("");
            if is_missing(cell) {
                return Ok(None);
            }
            cell.parse::<f64>()
                .map(Some)
                .map_err(|_| IngestError::Parse {
                    row: i + 1,
                    column: name.clone(),
                    value: cell.to_string(),
                })
        })
        .collect::<Result<_, _>>()?;
    let first = cells.iter().position(Option::is_some);
    let last = cells.iter().rposition(Option::is_some);
    let (Some(first), Some(last)) = (first, last) else {
        return Err(IngestError::Empty(name.clone()));
    };
    (first..=last)
        .map(|i| {
            cells[i].map(|v| (i + 1, v)).ok_or(IngestError::DataGap {
                row: i + 1,
                column: name.clone(),
            })
        })
        .collect()
}

fn label_column(table: &Table) -> Option<usize> {
    table.header.iter().position(|h| h == "t")
}

fn build_series(
    table: &Table,
    idx: usize,
    rows: &[(usize, f64)],
    transform: Transform,
) -> Result<Series, IngestError> {
    let name = table.header[idx].clone();
    let t_col = label_column(table);
    let label = |row: usize| match t_col {
        Some(c) => table.rows[row - 1].get(c).cloned().unwrap_or_default(),
        None => row.to_string(),
    };
    let levels: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (mut values, labels): (Vec<f64>, Vec<String>) = if transform.difference {
        if levels.len() < 2 {
            return Err(IngestError::TooShortToDifference(name));
        }
        (
            levels.windows(2).map(|w| w[1] - w[0]).collect(),
            rows[1..].iter().map(|r| label(r.0)).collect(),
        )
    } else {
        (levels.clone(), rows.iter().map(|r| label(r.0)).collect())
    };
    let mean = transform.demean.then(|| {
        let m = values.iter().sum::<f64>() / values.len() as f64;
        values.iter_mut().for_each(|v| *v -= m);
        m
    });
    Ok(Series {
        values,
        labels,
        meta: SeriesMeta {
            column: name,
            first_row: rows[0].0,
            transform,
            mean,
            levels,
        },
    })
}

/// Reads one column, then optionally differences and demeans it.
pub fn ingest_csv(
    path: &Path,
    column: &ColumnRef,
    transform: Transform,
) -> Result<Series, IngestError> {
    let table = read_table(path)?;
    let idx = column.resolve(&table.header)?;
    let rows = parse_column(&table, idx)?;
    build_series(&table, idx, &rows, transform)
}

/// Reads several columns restricted to the rows where all of them are
/// observed. With `columns` empty every column except `t` is used.
pub fn ingest_csv_multi(
    path: &Path,
    columns: &[ColumnRef],
    transform: Transform,
) -> Result<Vec<Series>, IngestError> {
    let table = read_table(path)?;
    let idx: Vec<usize> = if columns.is_empty() {
        let t = label_column(&table);
        (0..table.header.len()).filter(|&i| Some(i) != t).collect()
    } else {
        columns
            .iter()
            .map(|c| c.resolve(&table.header))
            .collect::<Result<_, _>>()?
    };
    let parsed: Vec<Vec<(usize, f64)>> = idx
        .iter()
        .map(|&i| parse_column(&table, i))
        .collect::<Result<_, _>>()?;
    let lo = parsed.iter().map(|c| c[0].0).max().unwrap_or(1);
    let hi = parsed.iter().map(|c| c[c.len() - 1].0).min().unwrap_or(0);
    idx.iter()
        .zip(&parsed)
        .map(|(&i, rows)| {
            let kept: Vec<(usize, f64)> = rows
                .iter()
                .copied()
                .filter(|r| r.0 >= lo && r.0 <= hi)
                .collect();
            if kept.is_empty() {
                return Err(IngestError::Empty(table.header[i].clone()));
            }
            build_series(&table, i, &kept, transform)
        })
        .collect()
}
