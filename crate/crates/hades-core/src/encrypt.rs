//! Encryption: plaintexts are integers m with |m| <= m_max, encoded as the
//! constant coefficient m * scale. Basic flavor encrypts the encoding as-is
//! (deterministic relation between equal plaintexts' eval values); fae flavor
//! additionally folds in a uniform perturbation delta and a masking
//! polynomial e_m, so repeated encryptions of the same value are
//! statistically indistinguishable under comparison.

use rand::Rng;

use crate::error::{Error, Result};
use crate::keys::{check_element, PublicKey, SecretKey};
use crate::params::Params;
use crate::ring::RingElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Basic,
    Fae,
}

impl Flavor {
    pub fn tag(self) -> u8 {
        match self {
            Flavor::Basic => 0,
            Flavor::Fae => 1,
        }
    }

    pub fn from_tag(t: u8) -> Result<Flavor> {
        match t {
            0 => Ok(Flavor::Basic),
            1 => Ok(Flavor::Fae),
            other => Err(Error::Format(format!("unknown flavor tag {other}"))),
        }
    }
}

/// (c0, c1) with c0 + c1*s = encoding + noise. Comparisons never mutate
/// ciphertexts and never grow them: this pair is the whole object.
#[derive(Debug, Clone, PartialEq)]
pub struct Ciphertext {
    pub c0: RingElement,
    pub c1: RingElement,
    pub flavor: Flavor,
}

impl Ciphertext {
    /// flavor byte, then c0 and c1. Length depends only on the ring degree.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::byte_len(self.c0.n()));
        out.push(self.flavor.tag());
        out.extend_from_slice(&self.c0.to_bytes());
        out.extend_from_slice(&self.c1.to_bytes());
        out
    }

    pub fn byte_len(n: usize) -> usize {
        1 + 2 * RingElement::byte_len(n)
    }
}

/// Every random draw an encryption makes, in sampling order. Recorded by the
/// `_traced` constructors; `enc_from_transcript` replays one deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTranscript {
    pub u: RingElement,
    pub e1: RingElement,
    pub e2: RingElement,
    /// Perturbation on the constant coefficient; 0 for basic flavor.
    pub delta: i64,
    /// Masking polynomial; fae flavor only.
    pub e_m: Option<RingElement>,
}

/// Constant polynomial m * scale. Errors when |m| > m_max.
pub fn encode_int(m: i64, params: &Params) -> Result<RingElement> {
    if m.unsigned_abs() > params.m_max {
        return Err(Error::PlaintextRange { value: m, m_max: params.m_max });
    }
    let ring = params.ring();
    let residue = (m as i128 * params.scale as i128).rem_euclid(params.q as i128) as u64;
    let mut coeffs = vec![0u64; params.n];
    coeffs[0] = residue;
    ring.from_coeffs(coeffs)
}

/// Fixed-point encoding: round(x * 2^frac_bits) as the integer plaintext.
/// Comparisons through this encoding are faithful for gaps above 2^(1-f).
pub fn encode_real(x: f64, frac_bits: u32, params: &Params) -> Result<RingElement> {
    let scaled = (x * (1u64 << frac_bits) as f64).round();
    if !scaled.is_finite() || scaled.abs() > params.m_max as f64 {
        return Err(Error::RealRange { value: x, frac_bits });
    }
    encode_int(scaled as i64, params)
}

/// Inverse of `encode_real`'s quantization (after decryption).
pub fn real_from_int(m: i64, frac_bits: u32) -> f64 {
    m as f64 / (1u64 << frac_bits) as f64
}

fn enc_encoding<R: Rng>(
    pk: &PublicKey,
    encoding: &RingElement,
    flavor: Flavor,
    params: &Params,
    rng: &mut R,
) -> Result<(Ciphertext, RingElement, RingElement, RingElement)> {
    let ring = params.ring();
    let u = ring.sample_ternary(rng);
    let e1 = ring.sample_bounded(rng, params.b_e)?;
    let e2 = ring.sample_bounded(rng, params.b_e)?;
    let c0 = ring.add(&ring.add(&ring.mul(&pk.p0, &u)?, &e1)?, encoding)?;
    let c1 = ring.add(&ring.mul(&pk.a, &u)?, &e2)?;
    Ok((Ciphertext { c0, c1, flavor }, u, e1, e2))
}

pub fn enc_basic<R: Rng>(
    pk: &PublicKey,
    m: i64,
    params: &Params,
    rng: &mut R,
) -> Result<Ciphertext> {
    enc_basic_traced(pk, m, params, rng).map(|(ct, _)| ct)
}

pub fn enc_basic_traced<R: Rng>(
    pk: &PublicKey,
    m: i64,
    params: &Params,
    rng: &mut R,
) -> Result<(Ciphertext, NoiseTranscript)> {
    check_pk(pk, params)?;
    let encoding = encode_int(m, params)?;
    let (ct, u, e1, e2) = enc_encoding(pk, &encoding, Flavor::Basic, params, rng)?;
    Ok((ct, NoiseTranscript { u, e1, e2, delta: 0, e_m: None }))
}

pub fn enc_fae<R: Rng>(
    pk: &PublicKey,
    m: i64,
    params: &Params,
    rng: &mut R,
) -> Result<Ciphertext> {
    enc_fae_traced(pk, m, params, rng).map(|(ct, _)| ct)
}

/// Perturbation-aware encryption: encodes m*scale + delta + e_m with delta
/// uniform on [-d, d] and e_m uniform noise. Draw order: delta, e_m, u, e1, e2.
pub fn enc_fae_traced<R: Rng>(
    pk: &PublicKey,
    m: i64,
    params: &Params,
    rng: &mut R,
) -> Result<(Ciphertext, NoiseTranscript)> {
    check_pk(pk, params)?;
    let ring = params.ring();
    let base = encode_int(m, params)?;
    let delta = rng.gen_range(-(params.d as i64)..=params.d as i64);
    let e_m = ring.sample_bounded(rng, params.b_e)?;
    let encoding = ring.add(&ring.add(&base, &ring.constant(delta))?, &e_m)?;
    let (ct, u, e1, e2) = enc_encoding(pk, &encoding, Flavor::Fae, params, rng)?;
    Ok((ct, NoiseTranscript { u, e1, e2, delta, e_m: Some(e_m) }))
}

/// Deterministic encryption from explicit randomness. Replays a recorded
/// transcript bit-exactly; also a diagnostics hook (e.g. all-zero noise).
/// Shapes are validated, magnitudes deliberately are not.
pub fn enc_from_transcript(
    pk: &PublicKey,
    m: i64,
    t: &NoiseTranscript,
    flavor: Flavor,
    params: &Params,
) -> Result<Ciphertext> {
    check_pk(pk, params)?;
    for e in [&t.u, &t.e1, &t.e2] {
        check_element(params, e)?;
    }
    let ring = params.ring();
    let mut encoding = encode_int(m, params)?;
    match flavor {
        Flavor::Basic => {
            if t.delta != 0 || t.e_m.is_some() {
                return Err(Error::Format(
                    "basic-flavor transcript must have delta = 0 and no e_m".into(),
                ));
            }
        }
        Flavor::Fae => {
            let e_m = t.e_m.as_ref().ok_or(Error::TranscriptMissing)?;
            check_element(params, e_m)?;
            encoding = ring.add(&ring.add(&encoding, &ring.constant(t.delta))?, e_m)?;
        }
    }
    let c0 = ring.add(&ring.add(&ring.mul(&pk.p0, &t.u)?, &t.e1)?, &encoding)?;
    let c1 = ring.add(&ring.mul(&pk.a, &t.u)?, &t.e2)?;
    Ok(Ciphertext { c0, c1, flavor })
}

/// Recovers m by rounding the centered constant coefficient of c0 + c1*s by
/// scale. A residual of scale/2 means the noise ate the whole rounding
/// margin, so that is an error rather than a silent coin flip.
pub fn decrypt(sk: &SecretKey, ct: &Ciphertext, params: &Params) -> Result<i64> {
    check_element(params, &sk.s)?;
    check_element(params, &ct.c0)?;
    check_element(params, &ct.c1)?;
    let ring = params.ring();
    let c1s = ring.mul_const_coeff(&ct.c1, &sk.s)?;
    let q = params.q;
    let phase = (ct.c0.coeffs()[0] + c1s) % q;
    let v = if phase <= (q - 1) / 2 {
        phase as i64
    } else {
        phase as i64 - q as i64
    };
    let scale = params.scale as i64;
    let m = if v >= 0 {
        (v + scale / 2) / scale
    } else {
        -((-v + scale / 2) / scale)
    };
    let residual = v - m * scale;
    if 2 * residual.abs() >= scale {
        return Err(Error::NoiseOverflow { residual });
    }
    Ok(m)
}

fn check_pk(pk: &PublicKey, params: &Params) -> Result<()> {
    check_element(params, &pk.a)?;
    check_element(params, &pk.p0)
}
