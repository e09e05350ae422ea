//! Synthetic datasets and CSV ingestion. Real corpora are not bundled; the
//! generators reproduce their sizes and value ranges, which is what the
//! query and sorting workloads exercise.

use std::ops::RangeInclusive;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Cryptocurrency-transaction-scale workload: 1,085 amounts.
pub const BITCOIN_COUNT: usize = 1_085;
/// Epidemiology-count-scale workload: 340 case counts.
pub const COVID19_COUNT: usize = 340;
/// Genome-coordinate-scale workload: 34,423 positions.
pub const HG38_COUNT: usize = 34_423;
/// All three concatenated: 35,848 values.
pub const ALL_COUNT: usize = BITCOIN_COUNT + COVID19_COUNT + HG38_COUNT;

pub const DATASET_NAMES: [&str; 4] = ["bitcoin", "covid19", "hg38", "all"];

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: &'static str,
    pub values: Vec<i64>,
}

fn gen(seed: u64, count: usize, range: RangeInclusive<i64>) -> Vec<i64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(range.clone())).collect()
}

/// Deterministic per (name, seed). `all` is the literal concatenation of the
/// other three at the same seed.
pub fn synth(name: &str, seed: u64) -> Result<Dataset> {
    let (name, values) = match name {
        "bitcoin" => ("bitcoin", gen(seed, BITCOIN_COUNT, 1..=1_000_000)),
        "covid19" => ("covid19", gen(seed.wrapping_add(1), COVID19_COUNT, 0..=100_000)),
        "hg38" => ("hg38", gen(seed.wrapping_add(2), HG38_COUNT, 1..=250_000_000)),
        "all" => {
            let mut values = synth("bitcoin", seed)?.values;
            values.extend(synth("covid19", seed)?.values);
            values.extend(synth("hg38", seed)?.values);
            ("all", values)
        }
        other => bail!("unknown dataset '{other}' (expected one of {DATASET_NAMES:?})"),
    };
    Ok(Dataset { name, values })
}

pub fn write_csv(path: &Path, values: &[i64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(["value"])?;
    for v in values {
        w.write_record([v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One cell per row: the named column when `column` is given (requires a
/// header row), otherwise the first column, skipping a leading header if its
/// first cell is not numeric. Row numbers are 1-based file lines.
fn read_column_cells(path: &Path, column: Option<&str>) -> Result<Vec<(usize, String)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record.with_context(|| format!("row {}: malformed CSV", idx + 1))?;
        rows.push(record);
    }

    let (col, skip_header) = match column {
        Some(name) => {
            let header = rows
                .first()
                .ok_or_else(|| anyhow::anyhow!("empty CSV: no header row"))?;
            match header.iter().position(|h| h == name) {
                Some(col) => (col, true),
                // not a header name; accept a 0-based column index
                None => match name.parse::<usize>() {
                    Ok(col) => {
                        let header_like = header
                            .get(col)
                            .is_some_and(|c| c.parse::<f64>().is_err() && !c.is_empty());
                        (col, header_like)
                    }
                    Err(_) => bail!(
                        "column '{name}' not found; headers: {}",
                        header.iter().collect::<Vec<_>>().join(", ")
                    ),
                },
            }
        }
        None => {
            let header_like = rows
                .first()
                .and_then(|r| r.get(0))
                .is_some_and(|c| c.parse::<f64>().is_err() && !c.is_empty());
            (0, header_like)
        }
    };

    let mut out = Vec::new();
    for (idx, record) in rows.iter().enumerate() {
        if skip_header && idx == 0 {
            continue;
        }
        let cell = record
            .get(col)
            .with_context(|| format!("row {}: missing column {}", idx + 1, col + 1))?;
        if cell.is_empty() && record.iter().all(|c| c.is_empty()) {
            continue; // blank line
        }
        out.push((idx + 1, cell.to_string()));
    }
    Ok(out)
}

pub fn read_ints(path: &Path, column: Option<&str>) -> Result<Vec<i64>> {
    read_column_cells(path, column)?
        .into_iter()
        .map(|(row, cell)| {
            cell.parse::<i64>()
                .with_context(|| format!("row {row}: cannot parse '{cell}' as an integer"))
        })
        .collect()
}

pub fn read_reals(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    read_column_cells(path, column)?
        .into_iter()
        .map(|(row, cell)| {
            cell.parse::<f64>()
                .with_context(|| format!("row {row}: cannot parse '{cell}' as a number"))
        })
        .collect()
}
