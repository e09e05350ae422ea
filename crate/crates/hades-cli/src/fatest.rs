//! Frequency-analysis resistance checks: a fixed plaintext must encrypt to
//! all-distinct ciphertexts, and equal-plaintext comparisons must come out
//! "greater" at a rate statistically indistinguishable from a coin flip.

use std::collections::HashSet;
use std::path::Path;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use hades_core::{batch, eval_value, CompareEvalKey, Flavor, Params, PublicKey};

#[derive(Debug, Clone)]
pub struct FaConfig {
    pub value: i64,
    pub encryptions: usize,
    pub pairs: usize,
    pub seed: u64,
    pub bins: usize,
}

impl Default for FaConfig {
    fn default() -> Self {
        FaConfig { value: 7, encryptions: 1000, pairs: 10_000, seed: 7, bins: 40 }
    }
}

#[derive(Debug)]
pub struct FaReport {
    pub value: i64,
    pub encryptions: usize,
    pub distinct: usize,
    pub pairs: usize,
    pub greater: usize,
    pub rate: f64,
    pub ci_half_width: f64,
    /// (lo, hi, count) per evaluation-value bucket.
    pub histogram: Vec<(i64, i64, usize)>,
    pub all_distinct: bool,
    pub rate_in_band: bool,
}

impl FaReport {
    pub fn passed(&self) -> bool {
        self.all_distinct && self.rate_in_band
    }
}

fn histogram(values: &[i64], bins: usize) -> Vec<(i64, i64, usize)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = *values.iter().min().unwrap();
    let hi = *values.iter().max().unwrap();
    let width = (((hi - lo) as i128 + bins as i128) / bins as i128).max(1) as i64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as i64 * width, lo + (i as i64 + 1) * width, c))
        .collect()
}

/// Runs both checks at `value` under the FAE flavor. The pair evaluations
/// use two independently-encrypted batches so every comparison sees fresh
/// masking noise on both sides.
pub fn run(
    pk: &PublicKey,
    cek: &CompareEvalKey,
    params: &Params,
    cfg: &FaConfig,
) -> Result<FaReport> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);

    let ms = vec![cfg.value; cfg.encryptions.max(cfg.pairs)];
    let left = batch::encrypt_batch(pk, &ms, Flavor::Fae, params, rng.gen())?;
    let right = batch::encrypt_batch(pk, &ms[..cfg.pairs], Flavor::Fae, params, rng.gen())?;

    let distinct: HashSet<Vec<u8>> =
        left.iter().take(cfg.encryptions).map(|ct| ct.to_bytes()).collect();

    let mut greater = 0usize;
    let mut values = Vec::with_capacity(cfg.pairs);
    for i in 0..cfg.pairs {
        let v = eval_value(cek, &left[i], &right[i], params)?;
        if v > 0 {
            greater += 1;
        }
        values.push(v);
    }

    let rate = greater as f64 / cfg.pairs as f64;
    let ci_half_width = 1.96 * (rate * (1.0 - rate) / cfg.pairs as f64).sqrt();
    Ok(FaReport {
        value: cfg.value,
        encryptions: cfg.encryptions,
        distinct: distinct.len(),
        pairs: cfg.pairs,
        greater,
        rate,
        ci_half_width,
        histogram: histogram(&values, cfg.bins),
        all_distinct: distinct.len() == cfg.encryptions,
        rate_in_band: (0.45..=0.55).contains(&rate),
    })
}

pub fn write_histogram_csv(path: &Path, report: &FaReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(["bucket_lo", "bucket_hi", "count"])?;
    for (lo, hi, count) in &report.histogram {
        w.write_record([lo.to_string(), hi.to_string(), count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn render(report: &FaReport) -> String {
    format!(
        "frequency-analysis test on plaintext {}\n\
           distinct ciphertexts: {}/{} {}\n\
           equal-plaintext \"greater\" rate: {:.4} (95% CI +/- {:.4}, {} of {} pairs) {}\n\
           verdict: {}\n",
        report.value,
        report.distinct,
        report.encryptions,
        if report.all_distinct { "[ok]" } else { "[REPEATED CIPHERTEXT]" },
        report.rate,
        report.ci_half_width,
        report.greater,
        report.pairs,
        if report.rate_in_band { "[ok: within 0.45..=0.55]" } else { "[OUT OF BAND]" },
        if report.passed() { "pass" } else { "FAIL" },
    )
}
