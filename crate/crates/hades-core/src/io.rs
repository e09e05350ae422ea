//! On-disk formats. Every file starts with the magic, a format version, a
//! one-byte payload tag and the full parameter block, so any reader can
//! validate a file in isolation and no key is ever interpreted under the
//! wrong parameters. All integers are little-endian u64 unless noted.

use std::io::{Read, Write};

use crate::encrypt::{Ciphertext, Flavor};
use crate::error::{Error, Result};
use crate::keys::{check_element, expected_parts, CekMode, CompareEvalKey, PublicKey, SecretKey};
use crate::params::Params;
use crate::ring::{read_u64, MulStrategy, RingElement};

pub const MAGIC: &[u8; 5] = b"HADES";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    SecretKey = 1,
    PublicKey = 2,
    CompareKey = 3,
    Ciphertexts = 4,
}

impl Tag {
    fn name(self) -> &'static str {
        match self {
            Tag::SecretKey => "secret key",
            Tag::PublicKey => "public key",
            Tag::CompareKey => "compare-eval key",
            Tag::Ciphertexts => "ciphertexts",
        }
    }

    fn from_byte(b: u8) -> Result<Tag> {
        match b {
            1 => Ok(Tag::SecretKey),
            2 => Ok(Tag::PublicKey),
            3 => Ok(Tag::CompareKey),
            4 => Ok(Tag::Ciphertexts),
            other => Err(Error::Format(format!("unknown payload tag {other}"))),
        }
    }
}

// magic + version + tag + 12 u64 parameter words + multiplication strategy
const HEADER_LEN: usize = 5 + 1 + 1 + 12 * 8 + 1;

fn write_header<W: Write>(w: &mut W, tag: Tag, p: &Params) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[FORMAT_VERSION, tag as u8])?;
    for v in [
        p.n as u64,
        p.q,
        p.b_e,
        p.b_u,
        p.scale,
        p.epsilon.to_bits(),
        p.d,
        p.tau,
        p.b_g,
        p.ell as u64,
        p.m_max,
        p.n_max,
    ] {
        w.write_all(&v.to_le_bytes())?;
    }
    let mul = match p.mul {
        MulStrategy::Schoolbook => 0u8,
        MulStrategy::Ntt => 1,
    };
    w.write_all(&[mul])?;
    Ok(())
}

/// Reads and fully re-validates the header; a file with tampered parameters
/// is rejected before any payload is touched.
fn read_header<R: Read>(r: &mut R, want: Tag) -> Result<Params> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic: not a key/ciphertext file".into()));
    }
    let mut vt = [0u8; 2];
    r.read_exact(&mut vt)?;
    if vt[0] != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            vt[0]
        )));
    }
    let tag = Tag::from_byte(vt[1])?;
    if tag != want {
        return Err(Error::Format(format!(
            "file contains a {}, expected a {}",
            tag.name(),
            want.name()
        )));
    }
    let mut words = [0u64; 12];
    for w in words.iter_mut() {
        *w = read_u64(r)?;
    }
    let mul = match read_u8(r)? {
        0 => MulStrategy::Schoolbook,
        1 => MulStrategy::Ntt,
        other => return Err(Error::Format(format!("unknown multiplication tag {other}"))),
    };
    let [n, q, b_e, b_u, scale, eps_bits, d, tau, b_g, ell, m_max, n_max] = words;
    if n > (1 << 24) || ell > (1 << 16) {
        return Err(Error::Format(format!("implausible header: n = {n}, ell = {ell}")));
    }
    Params::assemble(
        n as usize,
        q,
        b_e,
        b_u,
        scale,
        f64::from_bits(eps_bits),
        b_g,
        mul,
        d,
        tau,
        ell as usize,
        m_max,
        n_max,
    )
}

fn read_element<R: Read>(r: &mut R, params: &Params) -> Result<RingElement> {
    let e = RingElement::read_from(r)?;
    check_element(params, &e)?;
    Ok(e)
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn write_secret_key<W: Write>(w: &mut W, params: &Params, sk: &SecretKey) -> Result<()> {
    check_element(params, &sk.s)?;
    write_header(w, Tag::SecretKey, params)?;
    sk.s.write_to(w)
}

pub fn read_secret_key<R: Read>(r: &mut R) -> Result<(Params, SecretKey)> {
    let params = read_header(r, Tag::SecretKey)?;
    let s = read_element(r, &params)?;
    Ok((params, SecretKey { s }))
}

pub fn write_public_key<W: Write>(w: &mut W, params: &Params, pk: &PublicKey) -> Result<()> {
    check_element(params, &pk.a)?;
    check_element(params, &pk.p0)?;
    write_header(w, Tag::PublicKey, params)?;
    pk.a.write_to(w)?;
    pk.p0.write_to(w)
}

pub fn read_public_key<R: Read>(r: &mut R) -> Result<(Params, PublicKey)> {
    let params = read_header(r, Tag::PublicKey)?;
    let a = read_element(r, &params)?;
    let p0 = read_element(r, &params)?;
    Ok((params, PublicKey { a, p0 }))
}

pub fn write_cek<W: Write>(w: &mut W, params: &Params, cek: &CompareEvalKey) -> Result<()> {
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
    write_header(w, Tag::CompareKey, params)?;
    let mode = match cek.mode {
        CekMode::Gadget => 0u8,
        CekMode::Literal => 1,
    };
    w.write_all(&[mode])?;
    w.write_all(&(cek.parts.len() as u32).to_le_bytes())?;
    for p in &cek.parts {
        p.write_to(w)?;
    }
    Ok(())
}

pub fn read_cek<R: Read>(r: &mut R) -> Result<(Params, CompareEvalKey)> {
    let params = read_header(r, Tag::CompareKey)?;
    let mode = match read_u8(r)? {
        0 => CekMode::Gadget,
        1 => CekMode::Literal,
        other => return Err(Error::Format(format!("unknown compare-key mode {other}"))),
    };
    let count = read_u32(r)? as usize;
    let want = expected_parts(&params, mode);
    if count != want {
        return Err(Error::Format(format!(
            "compare-eval key part count {count} does not match parameters (expected {want})"
        )));
    }
    let mut parts = Vec::with_capacity(count);
    for _ in 0..count {
        parts.push(read_element(r, &params)?);
    }
    Ok((params, CompareEvalKey::new(mode, parts)))
}

/// One flavor per file; every record is c0 then c1. Mixed-flavor input is an
/// error rather than a silently heterogeneous file.
pub fn write_ciphertexts<W: Write>(
    w: &mut W,
    params: &Params,
    flavor: Flavor,
    cts: &[Ciphertext],
) -> Result<()> {
    for ct in cts {
        if ct.flavor != flavor {
            return Err(Error::FlavorMismatch { expected: flavor, found: ct.flavor });
        }
        check_element(params, &ct.c0)?;
        check_element(params, &ct.c1)?;
    }
    write_header(w, Tag::Ciphertexts, params)?;
    w.write_all(&[flavor.tag()])?;
    w.write_all(&(cts.len() as u64).to_le_bytes())?;
    for ct in cts {
        ct.c0.write_to(w)?;
        ct.c1.write_to(w)?;
    }
    Ok(())
}

pub fn read_ciphertexts<R: Read>(r: &mut R) -> Result<(Params, Flavor, Vec<Ciphertext>)> {
    let params = read_header(r, Tag::Ciphertexts)?;
    let flavor = Flavor::from_tag(read_u8(r)?)?;
    let count = read_u64(r)?;
    if count > 1 << 32 {
        return Err(Error::Format(format!("implausible ciphertext count {count}")));
    }
    let mut cts = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let c0 = read_element(r, &params)?;
        let c1 = read_element(r, &params)?;
        cts.push(Ciphertext { c0, c1, flavor });
    }
    Ok((params, flavor, cts))
}

/// Exact serialized sizes, so tooling can verify nothing grew.
pub fn secret_key_len(params: &Params) -> usize {
    HEADER_LEN + RingElement::byte_len(params.n)
}

pub fn public_key_len(params: &Params) -> usize {
    HEADER_LEN + 2 * RingElement::byte_len(params.n)
}

pub fn cek_len(params: &Params, mode: CekMode) -> usize {
    HEADER_LEN + 1 + 4 + expected_parts(params, mode) * RingElement::byte_len(params.n)
}

pub fn ciphertexts_len(params: &Params, count: usize) -> usize {
    HEADER_LEN + 1 + 8 + count * 2 * RingElement::byte_len(params.n)
}
