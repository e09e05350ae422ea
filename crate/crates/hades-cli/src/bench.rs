//! Wall-clock timing of the five core operations. Criterion lives in
//! hades-core's bench target; this is the coarse, scriptable variant that
//! feeds the CLI's JSON/CSV reports.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use hades_core::{
    cmp_basic, cmp_fae, enc_basic, enc_fae, keygen, CekMode, KeyTriple, Params,
};

pub const OPERATIONS: [&str; 5] = ["KeyGen", "EncBasic", "EncFAE", "CmpBasic", "CmpFAE"];

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub operation: String,
    pub count: usize,
    pub total_ms: f64,
    pub mean_ms: f64,
}

fn record(operation: &str, count: usize, total_ms: f64) -> BenchRecord {
    BenchRecord {
        operation: operation.to_string(),
        count,
        total_ms,
        mean_ms: total_ms / count as f64,
    }
}

fn time<F: FnMut()>(count: usize, mut f: F) -> f64 {
    let start = Instant::now();
    for _ in 0..count {
        f();
    }
    start.elapsed().as_secs_f64() * 1e3
}

/// Times each operation `count` times per repeat and averages the totals
/// across `repeats` passes. KeyGen is always measured 1x per repeat — it is
/// orders of magnitude slower than the rest and scaling it by `count` would
/// dominate the run for no extra information.
pub fn run(params: &Params, count: usize, repeats: usize, seed: u64) -> Result<Vec<BenchRecord>> {
    if count == 0 || repeats == 0 {
        bail!("bench needs count >= 1 and repeats >= 1");
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let triple: KeyTriple = keygen(params, CekMode::Gadget, &mut rng)?;
    let m_max = params.m_max as i64;

    let mut totals = [0.0f64; 5];
    for _ in 0..repeats {
        totals[0] += time(1, || {
            keygen(params, CekMode::Gadget, &mut rng).expect("keygen");
        });

        let ms: Vec<i64> = (0..count).map(|_| rng.gen_range(-m_max..=m_max)).collect();
        let mut i = 0usize;
        totals[1] += time(count, || {
            enc_basic(&triple.pk, ms[i % ms.len()], params, &mut rng).expect("enc");
            i += 1;
        });
        let mut i = 0usize;
        totals[2] += time(count, || {
            enc_fae(&triple.pk, ms[i % ms.len()], params, &mut rng).expect("enc");
            i += 1;
        });

        let pool = count.clamp(2, 64);
        let basics: Vec<_> = (0..pool)
            .map(|i| enc_basic(&triple.pk, ms[i % ms.len()], params, &mut rng).expect("enc"))
            .collect();
        let faes: Vec<_> = (0..pool)
            .map(|i| enc_fae(&triple.pk, ms[i % ms.len()], params, &mut rng).expect("enc"))
            .collect();
        let mut i = 0usize;
        totals[3] += time(count, || {
            let a = &basics[i % pool];
            let b = &basics[(i + 1) % pool];
            std::hint::black_box(cmp_basic(&triple.cek, a, b, params).expect("cmp"));
            i += 1;
        });
        let mut i = 0usize;
        totals[4] += time(count, || {
            let a = &faes[i % pool];
            let b = &faes[(i + 1) % pool];
            std::hint::black_box(cmp_fae(&triple.cek, a, b, params).expect("cmp"));
            i += 1;
        });
    }

    let counts = [1, count, count, count, count];
    Ok(OPERATIONS
        .iter()
        .zip(counts)
        .zip(totals)
        .map(|((op, c), total)| record(op, c, total / repeats as f64))
        .collect())
}

/// JSON for `.json`, CSV for `.csv`; anything else is an error so a typo'd
/// extension never silently picks a format.
pub fn write_report(path: &Path, records: &[BenchRecord]) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let json = serde_json::to_string_pretty(records)?;
            std::fs::write(path, json)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        Some("csv") => {
            let mut w = csv::Writer::from_path(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        other => bail!("unsupported report extension {other:?}: use .json or .csv"),
    }
    Ok(())
}

pub fn render_table(records: &[BenchRecord]) -> String {
    let mut out = format!(
        "{:<10} {:>8} {:>14} {:>14}\n",
        "operation", "count", "total_ms", "mean_ms"
    );
    for r in records {
        out.push_str(&format!(
            "{:<10} {:>8} {:>14.3} {:>14.4}\n",
            r.operation, r.count, r.total_ms, r.mean_ms
        ));
    }
    out
}
