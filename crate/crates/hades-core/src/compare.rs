//! Server-side comparison. The evaluator sees two ciphertexts and the
//! compare-eval key, forms the difference, and key-switches c1 through the
//! gadget parts to recover scale * (phase difference) in the constant
//! coefficient. Its sign orders the plaintexts; |value| < tau flags equality
//! for basic-flavor ciphertexts. Nothing here touches the secret key and no
//! ciphertext is modified or enlarged.

use rand::Rng;

use crate::encrypt::{enc_fae_traced, Ciphertext, Flavor};
use crate::error::{Error, Result};
use crate::keys::{check_element, expected_parts, CekMode, CompareEvalKey, KeyTriple};
use crate::ntt::{add_mod, sub_mod};
use crate::params::Params;
use crate::ring::{center, RingElement};

/// Balanced base-b_g digits of every coefficient's centered lift:
/// digits[j][i] is digit j of coefficient i, in [-b_g/2, b_g/2).
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetDigits {
    pub digits: Vec<Vec<i64>>,
    pub b_g: u64,
}

impl GadgetDigits {
    /// Each digit row as a ring element (for reference-path evaluation).
    pub fn to_ring_elements(&self, params: &Params) -> Result<Vec<RingElement>> {
        self.digits
            .iter()
            .map(|row| params.ring().from_signed(row))
            .collect()
    }

    pub fn inf_norm(&self) -> u64 {
        self.digits
            .iter()
            .flatten()
            .map(|d| d.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

/// Balanced digits of one centered value. Exact: sum d_j * b_g^j == c, with
/// every d_j in [-b_g/2, b_g/2). Termination within ell digits is the
/// b_g^ell >= 2q invariant from params validation.
fn balanced_digits(mut c: i64, b_g: u64, ell: usize) -> Vec<i64> {
    let b = b_g as i64;
    let half = b / 2;
    let mut out = vec![0i64; ell];
    for d in out.iter_mut() {
        let mut r = c.rem_euclid(b);
        if r >= half {
            r -= b;
        }
        *d = r;
        c = (c - r) / b;
    }
    assert_eq!(c, 0, "centered value did not fit in {ell} balanced digits");
    out
}

pub fn gadget_decompose(e: &RingElement, params: &Params) -> Result<GadgetDigits> {
    check_element(params, e)?;
    let mut digits = vec![vec![0i64; params.n]; params.ell];
    for i in 0..params.n {
        let ds = balanced_digits(e.centered_coeff(i), params.b_g, params.ell);
        for (j, d) in ds.into_iter().enumerate() {
            digits[j][i] = d;
        }
    }
    Ok(GadgetDigits { digits, b_g: params.b_g })
}

/// The centered evaluation value for a pair of same-flavor ciphertexts:
///   scale * (c0a - c0b)[0] + key-switch of (c1a - c1b), constant coefficient.
/// For honest inputs this is scale^2*(ma - mb) + scale*(delta_a - delta_b)
/// + noise bounded by n_max.
///
/// Only constant coefficients are ever needed, so the key-switch is ell
/// signed dot products against the prepared key tables — O(ell * n) — rather
/// than ell full ring products.
pub fn eval_value(
    cek: &CompareEvalKey,
    a: &Ciphertext,
    b: &Ciphertext,
    params: &Params,
) -> Result<i64> {
    if a.flavor != b.flavor {
        return Err(Error::FlavorMismatch { expected: a.flavor, found: b.flavor });
    }
    for e in [&a.c0, &a.c1, &b.c0, &b.c1] {
        check_element(params, e)?;
    }
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

    let ring = params.ring();
    let q = params.q;
    let d0 = sub_mod(a.c0.coeffs()[0], b.c0.coeffs()[0], q);
    let c1d = ring.sub(&a.c1, &b.c1)?;
    let mut total = (params.scale as u128 * d0 as u128 % q as u128) as u64;
    match cek.mode {
        CekMode::Gadget => {
            let digits = gadget_decompose(&c1d, params)?;
            for (row, rev) in digits.digits.iter().zip(cek.prepared()) {
                // |digit| < b_g/2 <= 2^15 and rev < q < 2^62 over n <= 2^16
                // terms: the i128 accumulator cannot overflow
                let mut acc = 0i128;
                for (&d, &r) in row.iter().zip(rev) {
                    acc += d as i128 * r as i128;
                }
                total = add_mod(total, acc.rem_euclid(q as i128) as u64, q);
            }
        }
        CekMode::Literal => {
            let prod = ring.mul_const_coeff(&c1d, &cek.parts[0])?;
            total = add_mod(total, prod, q);
        }
    }
    Ok(center(total, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// -1, 0, +1 (basic flavor: equality is detectable).
    ThreeWay(i8),
    /// a > b (fae flavor: only strict order is meaningful).
    Strict(bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOutcome {
    pub value: i64,
    pub classification: Classification,
    /// Distance from the decision boundary; small margins mean the noise
    /// budget is nearly spent.
    pub noise_margin: i64,
}

impl EvalOutcome {
    pub fn three_way(value: i64, tau: u64) -> EvalOutcome {
        let tau = tau as i64;
        let (c, margin) = if value.abs() < tau {
            (0, tau - value.abs())
        } else {
            (value.signum() as i8, value.abs() - tau)
        };
        EvalOutcome { value, classification: Classification::ThreeWay(c), noise_margin: margin }
    }

    pub fn strict(value: i64) -> EvalOutcome {
        EvalOutcome {
            value,
            classification: Classification::Strict(value > 0),
            noise_margin: value.abs(),
        }
    }
}

/// Three-way comparison outcome for a same-flavor pair.
pub fn eval_cek(
    cek: &CompareEvalKey,
    a: &Ciphertext,
    b: &Ciphertext,
    params: &Params,
) -> Result<EvalOutcome> {
    let v = eval_value(cek, a, b, params)?;
    Ok(EvalOutcome::three_way(v, params.tau))
}

/// Basic-flavor comparison: -1, 0 or +1.
pub fn cmp_basic(
    cek: &CompareEvalKey,
    a: &Ciphertext,
    b: &Ciphertext,
    params: &Params,
) -> Result<i8> {
    if a.flavor != Flavor::Basic {
        return Err(Error::FlavorMismatch { expected: Flavor::Basic, found: a.flavor });
    }
    match eval_cek(cek, a, b, params)?.classification {
        Classification::ThreeWay(c) => Ok(c),
        Classification::Strict(_) => unreachable!(),
    }
}

/// Fae-flavor comparison: strictly greater or not. Equal plaintexts land on
/// either side with near-even odds by construction.
pub fn cmp_fae(
    cek: &CompareEvalKey,
    a: &Ciphertext,
    b: &Ciphertext,
    params: &Params,
) -> Result<bool> {
    if a.flavor != Flavor::Fae {
        return Err(Error::FlavorMismatch { expected: Flavor::Fae, found: a.flavor });
    }
    Ok(eval_value(cek, a, b, params)? > 0)
}

/// Empirical noise accounting over freshly encrypted fae pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBudgetReport {
    pub mode: CekMode,
    pub samples: usize,
    /// Largest |evaluation value - exact signal| observed.
    pub max_observed: u64,
    pub n_max: u64,
    pub tau: u64,
    pub within_budget: bool,
    /// Literal mode only: fraction of samples whose key-switch noise term
    /// alone reaches scale/2, i.e. would corrupt rounding.
    pub cek_violation_rate: Option<f64>,
}

/// Encrypts `samples` random plaintext pairs, evaluates each, and compares
/// the observed deviation from the exact signal scale^2*dm + scale*ddelta
/// against n_max. Literal mode additionally measures how often its
/// key-switch noise (c1 difference times the key noise polynomial) is big
/// enough to break rounding — the failure the gadget decomposition exists to
/// prevent — and needs the keygen transcript for that.
pub fn noise_budget_report<R: Rng>(
    triple: &KeyTriple,
    samples: usize,
    rng: &mut R,
) -> Result<NoiseBudgetReport> {
    let params = &triple.params;
    let ring = params.ring();
    let mode = triple.cek.mode;
    let e_cek = match mode {
        CekMode::Literal => Some(
            &triple
                .transcript
                .as_ref()
                .ok_or(Error::TranscriptMissing)?
                .cek_noise[0],
        ),
        CekMode::Gadget => None,
    };

    let span = params.m_max as i64;
    let scale = params.scale as i128;
    let mut max_observed = 0u128;
    let mut violations = 0usize;
    for _ in 0..samples {
        let m0 = rng.gen_range(-span..=span);
        let m1 = rng.gen_range(-span..=span);
        let (ct0, t0) = enc_fae_traced(&triple.pk, m0, params, rng)?;
        let (ct1, t1) = enc_fae_traced(&triple.pk, m1, params, rng)?;
        let v = eval_value(&triple.cek, &ct0, &ct1, params)?;
        let signal = scale * scale * (m0 - m1) as i128 + scale * (t0.delta - t1.delta) as i128;
        max_observed = max_observed.max((v as i128 - signal).unsigned_abs());
        if let Some(e) = e_cek {
            let c1d = ring.sub(&ct0.c1, &ct1.c1)?;
            let term = center(ring.mul_const_coeff(&c1d, e)?, params.q);
            if 2 * term.unsigned_abs() >= params.scale {
                violations += 1;
            }
        }
    }

    let max_observed = max_observed.min(u64::MAX as u128) as u64;
    Ok(NoiseBudgetReport {
        mode,
        samples,
        max_observed,
        n_max: params.n_max,
        tau: params.tau,
        within_budget: max_observed <= params.n_max && params.n_max < params.tau,
        cek_violation_rate: e_cek.map(|_| violations as f64 / samples.max(1) as f64),
    })
}
