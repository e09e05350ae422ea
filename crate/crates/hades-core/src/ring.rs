//! Arithmetic in R_q = Z_q[x]/(x^n + 1): negacyclic polynomials with
//! coefficients stored as canonical residues in [0, q).

use rand::Rng;

use crate::error::{Error, Result};
use crate::ntt::NttTables;
use std::sync::Arc;

/// How ring multiplications are carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MulStrategy {
    /// O(n^2) coefficient convolution. Works for any modulus.
    Schoolbook,
    /// O(n log n) number-theoretic transform. Needs prime q = 1 mod 2n.
    Ntt,
}

/// Largest modulus we accept: keeps u64 add/sub overflow-free and leaves
/// headroom for the Shoup multiplication trick inside the NTT (q < 2^62).
pub const MAX_MODULUS: u64 = 1 << 62;

/// An element of R_q. Immutable once built; operations return new elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    coeffs: Vec<u64>,
    q: u64,
}

/// Evaluation context for one concrete R_q: degree, modulus, multiplication
/// strategy and (for the NTT path) the precomputed twiddle tables.
#[derive(Debug, Clone)]
pub struct Ring {
    n: usize,
    q: u64,
    strategy: MulStrategy,
    ntt: Option<Arc<NttTables>>,
}

impl Ring {
    pub fn new(n: usize, q: u64, strategy: MulStrategy) -> Result<Ring> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::BadElement(format!(
                "ring degree n={n} must be a power of two >= 2"
            )));
        }
        if q < 2 || q >= MAX_MODULUS {
            return Err(Error::BadElement(format!(
                "modulus q={q} out of supported range [2, 2^62)"
            )));
        }
        let ntt = match strategy {
            MulStrategy::Schoolbook => None,
            MulStrategy::Ntt => Some(Arc::new(NttTables::new(n, q)?)),
        };
        Ok(Ring { n, q, strategy, ntt })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn strategy(&self) -> MulStrategy {
        self.strategy
    }

    pub fn zero(&self) -> RingElement {
        RingElement { coeffs: vec![0; self.n], q: self.q }
    }

    /// Constant polynomial with the given centered value.
    pub fn constant(&self, v: i64) -> RingElement {
        let mut e = self.zero();
        e.coeffs[0] = self.residue(v);
        e
    }

    /// Canonical residue of a signed value.
    pub fn residue(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.q as i128) as u64
    }

    pub fn from_coeffs(&self, coeffs: Vec<u64>) -> Result<RingElement> {
        if coeffs.len() != self.n {
            return Err(Error::BadElement(format!(
                "expected {} coefficients, got {}",
                self.n,
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.q) {
            return Err(Error::BadElement(format!(
                "coefficient {c} >= modulus {}",
                self.q
            )));
        }
        Ok(RingElement { coeffs, q: self.q })
    }

    /// Builds an element from signed coefficients, reducing mod q.
    pub fn from_signed(&self, coeffs: &[i64]) -> Result<RingElement> {
        if coeffs.len() != self.n {
            return Err(Error::BadElement(format!(
                "expected {} coefficients, got {}",
                self.n,
                coeffs.len()
            )));
        }
        Ok(RingElement {
            coeffs: coeffs.iter().map(|&v| self.residue(v)).collect(),
            q: self.q,
        })
    }

    fn check(&self, p: &RingElement) -> Result<()> {
        if p.coeffs.len() != self.n || p.q != self.q {
            return Err(Error::RingMismatch {
                ln: self.n,
                lq: self.q,
                rn: p.coeffs.len(),
                rq: p.q,
            });
        }
        Ok(())
    }

    fn check_pair(&self, a: &RingElement, b: &RingElement) -> Result<()> {
        self.check(a)?;
        self.check(b)
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check_pair(a, b)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| {
                let s = x + y; // q < 2^62 so no overflow
                if s >= self.q { s - self.q } else { s }
            })
            .collect();
        Ok(RingElement { coeffs, q: self.q })
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check_pair(a, b)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| if x >= y { x - y } else { x + self.q - y })
            .collect();
        Ok(RingElement { coeffs, q: self.q })
    }

    pub fn neg(&self, a: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.q - x })
            .collect();
        Ok(RingElement { coeffs, q: self.q })
    }

    pub fn scalar_mul(&self, a: &RingElement, k: u64) -> Result<RingElement> {
        self.check(a)?;
        let k = (k % self.q) as u128;
        let q = self.q as u128;
        let coeffs = a.coeffs.iter().map(|&x| (x as u128 * k % q) as u64).collect();
        Ok(RingElement { coeffs, q: self.q })
    }

    /// Negacyclic product via the configured strategy.
    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check_pair(a, b)?;
        match self.strategy {
            MulStrategy::Schoolbook => Ok(self.mul_schoolbook_unchecked(a, b)),
            MulStrategy::Ntt => {
                let tables = self.ntt.as_ref().expect("tables built in Ring::new");
                let mut fa = a.coeffs.clone();
                let mut fb = b.coeffs.clone();
                tables.forward(&mut fa);
                tables.forward(&mut fb);
                for (x, &y) in fa.iter_mut().zip(&fb) {
                    *x = (*x as u128 * y as u128 % self.q as u128) as u64;
                }
                tables.inverse(&mut fa);
                Ok(RingElement { coeffs: fa, q: self.q })
            }
        }
    }

    /// Quadratic reference multiplication, available regardless of strategy.
    pub fn mul_schoolbook(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check_pair(a, b)?;
        Ok(self.mul_schoolbook_unchecked(a, b))
    }

    fn mul_schoolbook_unchecked(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let n = self.n;
        let q = self.q as u128;
        // x^n = -1: terms with i + j >= n flip sign. Products are reduced
        // before accumulation so sums stay far below u128 range.
        let mut pos = vec![0u128; n];
        let mut neg = vec![0u128; n];
        for i in 0..n {
            let ai = a.coeffs[i] as u128;
            if ai == 0 {
                continue;
            }
            for j in 0..n {
                let p = ai * b.coeffs[j] as u128 % q;
                let k = i + j;
                if k < n {
                    pos[k] += p;
                } else {
                    neg[k - n] += p;
                }
            }
        }
        let coeffs = pos
            .iter()
            .zip(&neg)
            .map(|(&p, &m)| ((p % q + q - m % q) % q) as u64)
            .collect();
        RingElement { coeffs, q: self.q }
    }

    /// Constant coefficient of the negacyclic product a*b, without forming
    /// the whole product: (a*b)[0] = a[0]b[0] - sum_{i>=1} a[i]b[n-i].
    pub fn mul_const_coeff(&self, a: &RingElement, b: &RingElement) -> Result<u64> {
        self.check_pair(a, b)?;
        let n = self.n;
        let q = self.q as u128;
        let mut pos = a.coeffs[0] as u128 * b.coeffs[0] as u128 % q;
        let mut neg = 0u128;
        for i in 1..n {
            neg += a.coeffs[i] as u128 * b.coeffs[n - i] as u128 % q;
            if i % 1024 == 0 {
                neg %= q;
            }
        }
        pos %= q;
        neg %= q;
        Ok(((pos + q - neg) % q) as u64)
    }

    /// Uniform element of R_q.
    pub fn sample_uniform<R: Rng>(&self, rng: &mut R) -> RingElement {
        let coeffs = (0..self.n).map(|_| rng.gen_range(0..self.q)).collect();
        RingElement { coeffs, q: self.q }
    }

    /// Coefficients uniform on the integers [-b, b]. Requires 1 <= b and
    /// 2b + 1 <= q so the residues are distinct.
    pub fn sample_bounded<R: Rng>(&self, rng: &mut R, b: u64) -> Result<RingElement> {
        if b < 1 || 2 * b + 1 > self.q {
            return Err(Error::BadElement(format!(
                "noise bound b={b} must satisfy 1 <= b and 2b+1 <= q={}",
                self.q
            )));
        }
        let b = b as i64;
        let coeffs = (0..self.n)
            .map(|_| self.residue(rng.gen_range(-b..=b)))
            .collect();
        Ok(RingElement { coeffs, q: self.q })
    }

    /// Coefficients uniform on {-1, 0, 1}.
    pub fn sample_ternary<R: Rng>(&self, rng: &mut R) -> RingElement {
        let coeffs = (0..self.n)
            .map(|_| self.residue(rng.gen_range(-1..=1)))
            .collect();
        RingElement { coeffs, q: self.q }
    }
}

impl RingElement {
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Centered representative of coefficient i, in (-q/2, q/2] for odd q.
    pub fn centered_coeff(&self, i: usize) -> i64 {
        center(self.coeffs[i], self.q)
    }

    pub fn centered(&self) -> Vec<i64> {
        self.coeffs.iter().map(|&c| center(c, self.q)).collect()
    }

    /// Max |coefficient| over the centered representatives.
    pub fn inf_norm(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|&c| center(c, self.q).unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// n, q, then each coefficient, all little-endian u64.
    pub fn write_to<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.coeffs.len() as u64).to_le_bytes())?;
        w.write_all(&self.q.to_le_bytes())?;
        for &c in &self.coeffs {
            w.write_all(&c.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: std::io::Read>(r: &mut R) -> Result<RingElement> {
        let n = read_u64(r)? as usize;
        if n < 2 || n > (1 << 24) || !n.is_power_of_two() {
            return Err(Error::Format(format!("bad element degree {n}")));
        }
        let q = read_u64(r)?;
        if q < 2 || q >= MAX_MODULUS {
            return Err(Error::Format(format!("bad element modulus {q}")));
        }
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            let c = read_u64(r)?;
            if c >= q {
                return Err(Error::Format(format!("coefficient {c} >= modulus {q}")));
            }
            coeffs.push(c);
        }
        Ok(RingElement { coeffs, q })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.coeffs.len());
        self.write_to(&mut out).expect("vec write");
        out
    }

    /// Serialized length in bytes for a given degree.
    pub fn byte_len(n: usize) -> usize {
        16 + 8 * n
    }
}

pub(crate) fn center(c: u64, q: u64) -> i64 {
    if c <= (q - 1) / 2 {
        c as i64
    } else {
        c as i64 - q as i64
    }
}

pub(crate) fn read_u64<R: std::io::Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy() -> Ring {
        Ring::new(4, 17, MulStrategy::Schoolbook).unwrap()
    }

    fn el(ring: &Ring, c: &[u64]) -> RingElement {
        ring.from_coeffs(c.to_vec()).unwrap()
    }

    #[test]
    fn add_known_values() {
        let r = toy();
        let zero = r.zero();
        let p = el(&r, &[3, 5, 0, 0]);
        assert_eq!(r.add(&p, &zero).unwrap(), p);
        assert_eq!(
            r.add(&p, &el(&r, &[4, 4, 0, 0])).unwrap(),
            el(&r, &[7, 9, 0, 0])
        );
        // additive inverse wraps to zero
        assert_eq!(
            r.add(&el(&r, &[16, 0, 0, 0]), &el(&r, &[1, 0, 0, 0])).unwrap(),
            zero
        );
    }

    #[test]
    fn sub_known_values() {
        let r = toy();
        let p = el(&r, &[5, 9, 0, 0]);
        assert_eq!(r.sub(&p, &p).unwrap(), r.zero());
        assert_eq!(
            r.sub(&el(&r, &[1, 0, 0, 0]), &el(&r, &[2, 0, 0, 0])).unwrap(),
            el(&r, &[16, 0, 0, 0])
        );
        assert_eq!(
            r.sub(&p, &el(&r, &[7, 2, 0, 0])).unwrap(),
            el(&r, &[15, 7, 0, 0])
        );
    }

    #[test]
    fn mul_known_values() {
        let r = toy();
        let one = r.constant(1);
        let p = el(&r, &[2, 11, 3, 7]);
        assert_eq!(r.mul(&p, &one).unwrap(), p);
        // x^2 * x^2 = x^4 = -1
        let x2 = el(&r, &[0, 0, 1, 0]);
        assert_eq!(r.mul(&x2, &x2).unwrap(), el(&r, &[16, 0, 0, 0]));
        // (1 + x) * x^3 = x^3 - 1
        let p = el(&r, &[1, 1, 0, 0]);
        let x3 = el(&r, &[0, 0, 0, 1]);
        assert_eq!(r.mul(&p, &x3).unwrap(), el(&r, &[16, 0, 0, 1]));
    }

    #[test]
    fn scalar_mul_known_values() {
        let r = toy();
        let p = el(&r, &[2, 3, 0, 0]);
        assert_eq!(r.scalar_mul(&p, 1).unwrap(), p);
        assert_eq!(r.scalar_mul(&p, 0).unwrap(), r.zero());
        assert_eq!(r.scalar_mul(&p, 5).unwrap(), el(&r, &[10, 15, 0, 0]));
    }

    #[test]
    fn centered_lift_and_norm() {
        let r = toy();
        let p = el(&r, &[16, 8, 9, 0]);
        assert_eq!(p.centered(), vec![-1, 8, -8, 0]);
        assert_eq!(r.zero().inf_norm(), 0);
        assert_eq!(el(&r, &[16, 0, 0, 0]).inf_norm(), 1);
        assert_eq!(el(&r, &[9, 3, 0, 0]).inf_norm(), 8);
    }

    #[test]
    fn mul_by_x_n_times_negates() {
        let r = toy();
        let x = el(&r, &[0, 1, 0, 0]);
        let p = el(&r, &[3, 14, 6, 9]);
        let mut acc = p.clone();
        for _ in 0..4 {
            acc = r.mul(&acc, &x).unwrap();
        }
        assert_eq!(acc, r.neg(&p).unwrap());
    }

    // Independent convolution oracle: signed i128 accumulation, no tricks.
    fn brute_mul(a: &RingElement, b: &RingElement, q: u64) -> Vec<u64> {
        let n = a.n();
        let mut acc = vec![0i128; n];
        for i in 0..n {
            for j in 0..n {
                let p = a.coeffs()[i] as i128 * b.coeffs()[j] as i128;
                if i + j < n {
                    acc[i + j] += p;
                } else {
                    acc[i + j - n] -= p;
                }
            }
        }
        acc.iter()
            .map(|&v| v.rem_euclid(q as i128) as u64)
            .collect()
    }

    #[test]
    fn schoolbook_matches_brute_force() {
        let r = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = r.sample_uniform(&mut rng);
            let b = r.sample_uniform(&mut rng);
            assert_eq!(r.mul(&a, &b).unwrap().coeffs(), brute_mul(&a, &b, 17));
        }
    }

    #[test]
    fn ntt_agrees_with_schoolbook_toy() {
        // 17 = 2*8 + 1 is NTT-friendly for n = 4
        let sb = toy();
        let nt = Ring::new(4, 17, MulStrategy::Ntt).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for _ in 0..500 {
            let a = sb.sample_uniform(&mut rng);
            let b = sb.sample_uniform(&mut rng);
            assert_eq!(nt.mul(&a, &b).unwrap(), sb.mul(&a, &b).unwrap());
        }
    }

    #[test]
    fn const_coeff_matches_full_product() {
        let r = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..500 {
            let a = r.sample_uniform(&mut rng);
            let b = r.sample_uniform(&mut rng);
            assert_eq!(
                r.mul_const_coeff(&a, &b).unwrap(),
                r.mul(&a, &b).unwrap().coeffs()[0]
            );
        }
    }

    #[test]
    fn sampler_bounds_hold() {
        let r = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        for _ in 0..2_000 {
            assert!(r.sample_bounded(&mut rng, 3).unwrap().inf_norm() <= 3);
            assert!(r.sample_ternary(&mut rng).inf_norm() <= 1);
        }
        assert!(r.sample_bounded(&mut rng, 0).is_err());
        assert!(r.sample_bounded(&mut rng, 9).is_err()); // 2*9+1 > 17
    }

    #[test]
    fn samplers_deterministic_per_seed() {
        let r = toy();
        let mut r1 = ChaCha20Rng::seed_from_u64(99);
        let mut r2 = ChaCha20Rng::seed_from_u64(99);
        for _ in 0..50 {
            assert_eq!(r.sample_uniform(&mut r1), r.sample_uniform(&mut r2));
        }
    }

    #[test]
    fn mismatched_operands_rejected() {
        let r = toy();
        let other = Ring::new(4, 13, MulStrategy::Schoolbook).unwrap();
        let a = r.zero();
        let b = other.zero();
        assert!(matches!(r.add(&a, &b), Err(Error::RingMismatch { .. })));
        let r8 = Ring::new(8, 17, MulStrategy::Schoolbook).unwrap();
        assert!(matches!(
            r.mul(&a, &r8.zero()),
            Err(Error::RingMismatch { .. })
        ));
    }

    #[test]
    fn from_coeffs_validates() {
        let r = toy();
        assert!(r.from_coeffs(vec![0, 1, 2]).is_err());
        assert!(r.from_coeffs(vec![17, 0, 0, 0]).is_err());
        assert!(r.from_coeffs(vec![16, 0, 0, 0]).is_ok());
    }

    #[test]
    fn element_bytes_roundtrip() {
        let r = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let p = r.sample_uniform(&mut rng);
        let bytes = p.to_bytes();
        assert_eq!(bytes.len(), RingElement::byte_len(4));
        let back = RingElement::read_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, p);
    }
}
