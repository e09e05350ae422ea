//! Key material: ternary secret, RLWE public key, and the compare-eval key
//! (CEK) that lets a server order ciphertexts without decrypting them.

use rand::Rng;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::ntt::mul_mod;
use crate::params::Params;
use crate::ring::RingElement;

#[derive(Debug, Clone, PartialEq)]
pub struct SecretKey {
    pub s: RingElement,
}

/// pk = (a, p0) with p0 = -(a*s + e_pk), so c0 + c1*s cancels a*u terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicKey {
    pub a: RingElement,
    pub p0: RingElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CekMode {
    /// parts[j] = s * scale * b_g^j + e_j. Evaluation pairs each part with a
    /// small gadget digit, so the key noise contributes at most
    /// ell*n*(b_g/2)*b_e — bounded regardless of ciphertext content.
    Gadget,
    /// Single part s * scale + e. Kept as a diagnostic: multiplied by a full
    /// ciphertext difference the noise term blows straight past tau, and the
    /// key itself is scale-rounded secret material. Not for real use.
    Literal,
}

#[derive(Debug, Clone)]
pub struct CompareEvalKey {
    pub mode: CekMode,
    pub parts: Vec<RingElement>,
    // per-part residues rearranged so a constant product coefficient becomes
    // a plain dot product; built once on first evaluation
    prepared: OnceLock<Vec<Vec<u64>>>,
}

impl PartialEq for CompareEvalKey {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode && self.parts == other.parts
    }
}

impl CompareEvalKey {
    pub fn new(mode: CekMode, parts: Vec<RingElement>) -> CompareEvalKey {
        CompareEvalKey { mode, parts, prepared: OnceLock::new() }
    }

    /// rev[0] = g[0], rev[i] = -g[n-i]: with these, (f*g)[0] in the
    /// negacyclic ring is sum_i f[i] * rev[i].
    pub(crate) fn prepared(&self) -> &[Vec<u64>] {
        self.prepared.get_or_init(|| {
            self.parts
                .iter()
                .map(|g| {
                    let c = g.coeffs();
                    let n = c.len();
                    let q = g.q();
                    let mut rev = vec![0u64; n];
                    rev[0] = c[0];
                    for i in 1..n {
                        rev[i] = if c[n - i] == 0 { 0 } else { q - c[n - i] };
                    }
                    rev
                })
                .collect()
        })
    }
}

/// Per-key noise record, kept in memory only (never serialized); lets tests
/// and diagnostics verify key structure exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct KeygenTranscript {
    pub e_pk: RingElement,
    /// One entry per CEK part.
    pub cek_noise: Vec<RingElement>,
}

#[derive(Debug, Clone)]
pub struct KeyTriple {
    pub params: Params,
    pub sk: SecretKey,
    pub pk: PublicKey,
    pub cek: CompareEvalKey,
    /// Present on freshly generated keys; None after deserialization.
    pub transcript: Option<KeygenTranscript>,
}

/// The scalar each CEK part carries: scale * b_g^j mod q.
pub(crate) fn cek_scalars(params: &Params) -> Vec<u64> {
    let q = params.q;
    let mut out = Vec::with_capacity(params.ell);
    let mut pow = 1u64;
    for _ in 0..params.ell {
        out.push(mul_mod(params.scale % q, pow, q));
        pow = mul_mod(pow, params.b_g % q, q);
    }
    out
}

/// Samples a full key triple: ternary secret, uniform a, bounded noise
/// everywhere. Sampling order (s, a, e_pk, then CEK noise) is fixed, so a
/// seeded rng reproduces keys bit-exactly.
pub fn keygen<R: Rng>(params: &Params, mode: CekMode, rng: &mut R) -> Result<KeyTriple> {
    let ring = params.ring();
    let s = ring.sample_ternary(rng);
    let a = ring.sample_uniform(rng);
    let e_pk = ring.sample_bounded(rng, params.b_e)?;
    let p0 = ring.neg(&ring.add(&ring.mul(&a, &s)?, &e_pk)?)?;

    let scalars: Vec<u64> = match mode {
        CekMode::Gadget => cek_scalars(params),
        CekMode::Literal => vec![params.scale % params.q],
    };
    let mut parts = Vec::with_capacity(scalars.len());
    let mut cek_noise = Vec::with_capacity(scalars.len());
    for &k in &scalars {
        let e = ring.sample_bounded(rng, params.b_e)?;
        parts.push(ring.add(&ring.scalar_mul(&s, k)?, &e)?);
        cek_noise.push(e);
    }

    // sanity pass over every sampled noise bound
    for e in cek_noise.iter().chain([&e_pk]) {
        if e.inf_norm() > params.b_e {
            return Err(Error::BadElement(format!(
                "sampled noise norm {} exceeds b_e = {}",
                e.inf_norm(),
                params.b_e
            )));
        }
    }

    Ok(KeyTriple {
        params: params.clone(),
        sk: SecretKey { s },
        pk: PublicKey { a, p0 },
        cek: CompareEvalKey::new(mode, parts),
        transcript: Some(KeygenTranscript { e_pk, cek_noise }),
    })
}

/// Verifies every CEK part equals s * scale * b_g^j + e_j for the recorded
/// noise — i.e. the key really is key-switching material for this secret.
/// Returns false if any part was altered. Needs the keygen transcript.
pub fn cek_identity_check(triple: &KeyTriple) -> Result<bool> {
    let t = triple.transcript.as_ref().ok_or(Error::TranscriptMissing)?;
    let params = &triple.params;
    let ring = params.ring();
    let scalars = match triple.cek.mode {
        CekMode::Gadget => cek_scalars(params),
        CekMode::Literal => vec![params.scale % params.q],
    };
    if triple.cek.parts.len() != scalars.len() || t.cek_noise.len() != scalars.len() {
        return Ok(false);
    }
    for ((part, e), &k) in triple.cek.parts.iter().zip(&t.cek_noise).zip(&scalars) {
        let expect = ring.add(&ring.scalar_mul(&triple.sk.s, k)?, e)?;
        if *part != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rebuilds a triple from separately deserialized components.
pub fn assemble_triple(
    params: Params,
    sk: SecretKey,
    pk: PublicKey,
    cek: CompareEvalKey,
) -> KeyTriple {
    KeyTriple { params, sk, pk, cek, transcript: None }
}

pub(crate) fn expected_parts(params: &Params, mode: CekMode) -> usize {
    match mode {
        CekMode::Gadget => params.ell,
        CekMode::Literal => 1,
    }
}

/// Checks an element belongs to the params ring (degree and modulus).
pub(crate) fn check_element(params: &Params, e: &RingElement) -> Result<()> {
    if e.n() != params.n || e.q() != params.q {
        return Err(Error::RingMismatch {
            ln: params.n,
            lq: params.q,
            rn: e.n(),
            rq: e.q(),
        });
    }
    Ok(())
}
