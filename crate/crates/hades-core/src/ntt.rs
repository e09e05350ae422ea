//! Negacyclic number-theoretic transform over Z_q, q prime, q = 1 mod 2n.
//!
//! Cooley-Tukey decimation-in-time forward / Gentleman-Sande inverse with the
//! powers of the 2n-th root of unity merged into the twiddles, so no separate
//! pre/post scaling pass is needed. Twiddle multiplications use Shoup
//! precomputation (one u128 high product per butterfly).

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct NttTables {
    n: usize,
    q: u64,
    // psi^bitrev(i) and psi^-bitrev(i), with their Shoup companions
    fwd: Vec<u64>,
    fwd_shoup: Vec<u64>,
    inv: Vec<u64>,
    inv_shoup: Vec<u64>,
    n_inv: u64,
    n_inv_shoup: u64,
}

impl NttTables {
    pub fn new(n: usize, q: u64) -> Result<NttTables> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::NttUnavailable { n, q });
        }
        let two_n = 2 * n as u64;
        if q % two_n != 1 || !is_prime(q) {
            return Err(Error::NttUnavailable { n, q });
        }
        let psi = find_primitive_2n_root(n, q).ok_or(Error::NttUnavailable { n, q })?;
        let psi_inv = mod_pow(psi, q - 2, q);

        let log_n = n.trailing_zeros();
        let mut fwd = vec![0u64; n];
        let mut inv = vec![0u64; n];
        let mut p = 1u64;
        let mut pi = 1u64;
        for i in 0..n {
            let r = bitrev(i, log_n);
            fwd[r] = p;
            inv[r] = pi;
            p = mul_mod(p, psi, q);
            pi = mul_mod(pi, psi_inv, q);
        }
        let n_inv = mod_pow(n as u64, q - 2, q);
        Ok(NttTables {
            n,
            q,
            fwd_shoup: fwd.iter().map(|&w| shoup(w, q)).collect(),
            inv_shoup: inv.iter().map(|&w| shoup(w, q)).collect(),
            fwd,
            inv,
            n_inv,
            n_inv_shoup: shoup(n_inv, q),
        })
    }

    /// In-place forward transform; output is in bit-reversed order (the
    /// inverse consumes exactly that order, callers never see it).
    pub fn forward(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n);
        let q = self.q;
        let mut t = self.n;
        let mut m = 1;
        while m < self.n {
            t /= 2;
            for i in 0..m {
                let w = self.fwd[m + i];
                let ws = self.fwd_shoup[m + i];
                let j1 = 2 * i * t;
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = mul_shoup(a[j + t], w, ws, q);
                    a[j] = add_mod(u, v, q);
                    a[j + t] = sub_mod(u, v, q);
                }
            }
            m *= 2;
        }
    }

    /// In-place inverse transform, including the 1/n scaling.
    pub fn inverse(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n);
        let q = self.q;
        let mut t = 1;
        let mut m = self.n;
        while m > 1 {
            let h = m / 2;
            let mut j1 = 0;
            for i in 0..h {
                let w = self.inv[h + i];
                let ws = self.inv_shoup[h + i];
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = a[j + t];
                    a[j] = add_mod(u, v, q);
                    a[j + t] = mul_shoup(sub_mod(u, v, q), w, ws, q);
                }
                j1 += 2 * t;
            }
            t *= 2;
            m = h;
        }
        for x in a.iter_mut() {
            *x = mul_shoup(*x, self.n_inv, self.n_inv_shoup, q);
        }
    }
}

fn bitrev(i: usize, bits: u32) -> usize {
    i.reverse_bits() >> (usize::BITS - bits)
}

fn shoup(w: u64, q: u64) -> u64 {
    (((w as u128) << 64) / q as u128) as u64
}

/// a * w mod q with w fixed and ws = floor(w * 2^64 / q). Needs q < 2^63.
#[inline]
fn mul_shoup(a: u64, w: u64, ws: u64, q: u64) -> u64 {
    let hi = ((a as u128 * ws as u128) >> 64) as u64;
    let r = a.wrapping_mul(w).wrapping_sub(hi.wrapping_mul(q));
    if r >= q {
        r - q
    } else {
        r
    }
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, q: u64) -> u64 {
    base %= q;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// psi with psi^n = -1 mod q, i.e. a primitive 2n-th root of unity.
/// Candidates r^((q-1)/2n) hit one for roughly half of all r.
fn find_primitive_2n_root(n: usize, q: u64) -> Option<u64> {
    let exp = (q - 1) / (2 * n as u64);
    for r in 2..10_000u64 {
        let psi = mod_pow(r, exp, q);
        if mod_pow(psi, n as u64, q) == q - 1 {
            return Some(psi);
        }
    }
    None
}

/// Deterministic Miller-Rabin; the witness set covers all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest prime q < 2^bits with q = 1 mod 2n.
pub fn find_ntt_prime(bits: u32, n: usize) -> Option<u64> {
    assert!(bits >= 4 && bits <= 62);
    let step = 2 * n as u64;
    let top = 1u64 << bits;
    let mut q = top - step + 1; // largest value = 1 mod 2n below 2^bits
    while q > step {
        if is_prime(q) {
            return Some(q);
        }
        q -= step;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime(2));
        assert!(is_prime(17));
        assert!(is_prime(3329));
        assert!(is_prime((1 << 61) - 1)); // Mersenne
        assert!(!is_prime(1));
        assert!(!is_prime(3331 * 3329));
        assert!(!is_prime(u64::MAX)); // divisible by 3
    }

    #[test]
    fn prime_search_finds_ntt_friendly_modulus() {
        let q = find_ntt_prime(60, 1024).unwrap();
        assert!(is_prime(q));
        assert_eq!(q % 2048, 1);
        assert!(q < (1 << 60) && q > (1 << 59));
        // also usable at smaller degrees
        assert_eq!(q % 512, 1);
    }

    #[test]
    fn transform_roundtrips() {
        for (n, q) in [(4usize, 17u64), (8, 97), (256, find_ntt_prime(60, 256).unwrap())] {
            let t = NttTables::new(n, q).unwrap();
            let mut a: Vec<u64> = (0..n as u64).map(|i| (i * i + 3) % q).collect();
            let orig = a.clone();
            t.forward(&mut a);
            assert_ne!(a, orig);
            t.inverse(&mut a);
            assert_eq!(a, orig);
        }
    }

    #[test]
    fn rejects_unfriendly_modulus() {
        // 13 != 1 mod 8
        assert!(matches!(
            NttTables::new(4, 13),
            Err(Error::NttUnavailable { .. })
        ));
        // composite but = 1 mod 8
        assert!(matches!(
            NttTables::new(4, 33),
            Err(Error::NttUnavailable { .. })
        ));
    }
}
