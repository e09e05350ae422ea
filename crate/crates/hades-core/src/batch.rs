//! Bulk operations over many ciphertexts: batch encryption, pivot scans,
//! sorting and range filtering — the building blocks of encrypted queries.
//!
//! With the `parallel` feature (default) the heavy loops run on rayon;
//! without it everything degrades to plain sequential code. Results are
//! bit-identical either way: randomness comes from per-item seeds derived
//! from one master seed, never from a shared stream, so thread scheduling
//! cannot reorder draws. The `_seq` variants always run sequentially and
//! exist for timing comparisons.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::compare::{cmp_basic, cmp_fae};
use crate::encrypt::{enc_basic, enc_fae, Ciphertext, Flavor};
use crate::error::{Error, Result};
use crate::keys::{check_element, expected_parts, CompareEvalKey, PublicKey};
use crate::params::Params;

/// splitmix64 finalizer over master + (index+1) * golden-gamma: independent
/// per-item seeds from one master seed, stable across thread count.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn enc_one(
    pk: &PublicKey,
    m: i64,
    flavor: Flavor,
    params: &Params,
    seed: u64,
) -> Result<Ciphertext> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    match flavor {
        Flavor::Basic => enc_basic(pk, m, params, &mut rng),
        Flavor::Fae => enc_fae(pk, m, params, &mut rng),
    }
}

pub fn encrypt_batch(
    pk: &PublicKey,
    ms: &[i64],
    flavor: Flavor,
    params: &Params,
    master_seed: u64,
) -> Result<Vec<Ciphertext>> {
    #[cfg(feature = "parallel")]
    {
        ms.par_iter()
            .enumerate()
            .map(|(i, &m)| enc_one(pk, m, flavor, params, derive_seed(master_seed, i as u64)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        encrypt_batch_seq(pk, ms, flavor, params, master_seed)
    }
}

pub fn encrypt_batch_seq(
    pk: &PublicKey,
    ms: &[i64],
    flavor: Flavor,
    params: &Params,
    master_seed: u64,
) -> Result<Vec<Ciphertext>> {
    ms.iter()
        .enumerate()
        .map(|(i, &m)| enc_one(pk, m, flavor, params, derive_seed(master_seed, i as u64)))
        .collect()
}

/// Sign of (a compared to b) under the flavor's semantics: three-way for
/// basic, +/-1 for fae.
fn classify(
    cek: &CompareEvalKey,
    a: &Ciphertext,
    b: &Ciphertext,
    params: &Params,
) -> Result<i8> {
    match a.flavor {
        Flavor::Basic => cmp_basic(cek, a, b, params),
        Flavor::Fae => Ok(if cmp_fae(cek, a, b, params)? { 1 } else { -1 }),
    }
}

/// Validates everything a scan or sort will touch, so the hot loop can
/// assume well-formed inputs.
fn validate_batch(
    cek: &CompareEvalKey,
    items: &[&Ciphertext],
    params: &Params,
) -> Result<()> {
    let want = expected_parts(params, cek.mode);
    if cek.parts.len() != want {
        return Err(Error::BadElement(format!(
            "compare-eval key has {} parts, expected {want}",
            cek.parts.len()
        )));
    }
    for p in &cek.parts {
        check_element(params, p)?;
    }
    let flavor = match items.first() {
        Some(ct) => ct.flavor,
        None => return Ok(()),
    };
    for ct in items {
        if ct.flavor != flavor {
            return Err(Error::FlavorMismatch { expected: flavor, found: ct.flavor });
        }
        check_element(params, &ct.c0)?;
        check_element(params, &ct.c1)?;
    }
    Ok(())
}

/// Compares every item against one pivot; out[i] is the sign of
/// (items[i] - pivot).
pub fn compare_scan(
    cek: &CompareEvalKey,
    items: &[Ciphertext],
    pivot: &Ciphertext,
    params: &Params,
) -> Result<Vec<i8>> {
    let refs: Vec<&Ciphertext> = items.iter().chain([pivot]).collect();
    validate_batch(cek, &refs, params)?;
    #[cfg(feature = "parallel")]
    {
        items
            .par_iter()
            .map(|ct| classify(cek, ct, pivot, params))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(|ct| classify(cek, ct, pivot, params)).collect()
    }
}

pub fn compare_scan_seq(
    cek: &CompareEvalKey,
    items: &[Ciphertext],
    pivot: &Ciphertext,
    params: &Params,
) -> Result<Vec<i8>> {
    let refs: Vec<&Ciphertext> = items.iter().chain([pivot]).collect();
    validate_batch(cek, &refs, params)?;
    items.iter().map(|ct| classify(cek, ct, pivot, params)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortReport {
    /// Permutation: order[k] is the index of the k-th smallest item.
    pub order: Vec<usize>,
    /// Ciphertext comparisons evaluated.
    pub comparisons: u64,
}

struct SortCtx<'a> {
    cek: &'a CompareEvalKey,
    items: &'a [Ciphertext],
    params: &'a Params,
    comparisons: AtomicU64,
}

impl SortCtx<'_> {
    fn le(&self, a: usize, b: usize) -> bool {
        self.comparisons.fetch_add(1, Ordering::Relaxed);
        classify(self.cek, &self.items[a], &self.items[b], self.params)
            .expect("batch inputs were validated") <= 0
    }
}

// Sequential cutoff: below this a single thread merges faster than the
// fork-join overhead can pay for itself.
const SORT_PAR_THRESHOLD: usize = 256;

fn merge_sort(indices: Vec<usize>, ctx: &SortCtx) -> Vec<usize> {
    if indices.len() <= 1 {
        return indices;
    }
    let mid = indices.len() / 2;
    let (left, right) = {
        let (l, r) = indices.split_at(mid);
        (l.to_vec(), r.to_vec())
    };
    #[cfg(feature = "parallel")]
    let (left, right) = if indices.len() >= SORT_PAR_THRESHOLD {
        rayon::join(|| merge_sort(left, ctx), || merge_sort(right, ctx))
    } else {
        (merge_sort(left, ctx), merge_sort(right, ctx))
    };
    #[cfg(not(feature = "parallel"))]
    let (left, right) = (merge_sort(left, ctx), merge_sort(right, ctx));

    // stable merge: ties keep the left (earlier-index) element first
    let mut out = Vec::with_capacity(left.len() + right.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if ctx.le(left[i], right[j]) {
            out.push(left[i]);
            i += 1;
        } else {
            out.push(right[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&left[i..]);
    out.extend_from_slice(&right[j..]);
    out
}

/// Sorts ciphertexts by their hidden plaintexts using only the compare-eval
/// key: a stable merge sort, parallel across the recursion when enabled.
pub fn sort_indices(
    cek: &CompareEvalKey,
    items: &[Ciphertext],
    params: &Params,
) -> Result<SortReport> {
    let refs: Vec<&Ciphertext> = items.iter().collect();
    validate_batch(cek, &refs, params)?;
    let ctx = SortCtx { cek, items, params, comparisons: AtomicU64::new(0) };
    let order = merge_sort((0..items.len()).collect(), &ctx);
    Ok(SortReport { order, comparisons: ctx.comparisons.into_inner() })
}

/// Indices of items inside [lower, upper]. Basic flavor includes the
/// endpoints exactly; fae keeps an item unless it is strictly outside, so
/// boundary-equal items fall either way with the usual fae coin-flip odds.
pub fn range_filter(
    cek: &CompareEvalKey,
    items: &[Ciphertext],
    lower: &Ciphertext,
    upper: &Ciphertext,
    params: &Params,
) -> Result<Vec<usize>> {
    let refs: Vec<&Ciphertext> = items.iter().chain([lower, upper]).collect();
    validate_batch(cek, &refs, params)?;
    let keep = |ct: &Ciphertext| -> Result<bool> {
        match ct.flavor {
            Flavor::Basic => Ok(cmp_basic(cek, ct, lower, params)? >= 0
                && cmp_basic(cek, ct, upper, params)? <= 0),
            Flavor::Fae => Ok(!cmp_fae(cek, lower, ct, params)?
                && !cmp_fae(cek, ct, upper, params)?),
        }
    };
    #[cfg(feature = "parallel")]
    let mask: Vec<bool> = items
        .par_iter()
        .map(keep)
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let mask: Vec<bool> = items.iter().map(keep).collect::<Result<_>>()?;
    Ok(mask
        .into_iter()
        .enumerate()
        .filter_map(|(i, k)| k.then_some(i))
        .collect())
}
