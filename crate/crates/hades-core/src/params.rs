//! Scheme parameters: the ring, noise bounds, the amplification factor and
//! everything derived from them, plus the feasibility checks that make
//! comparison results trustworthy.
//!
//! The invariant chain that matters: a comparison of encryptions of m0, m1
//! evaluates to scale^2*(m0-m1) + scale*(delta0-delta1) + noise, where
//! |noise| <= n_max (analytic worst case) and |delta| <= d (perturbation,
//! fae flavor only). Every profile must satisfy n_max < tau <= scale^2/2 and
//! scale^2 > n_max + 2*d*scale, so equal plaintexts classify as equal and a
//! gap of one plaintext unit can never flip sign.

use crate::error::{Error, Result};
use crate::ntt::{find_ntt_prime, is_prime};
use crate::ring::{MulStrategy, Ring, MAX_MODULUS};

/// Free choices; everything else is derived by `validate`.
#[derive(Debug, Clone)]
pub struct ParamsConfig {
    /// Ring degree, power of two.
    pub n: usize,
    /// Coefficient modulus, prime.
    pub q: u64,
    /// Noise coefficients are uniform on [-b_e, b_e].
    pub b_e: u64,
    /// Encryption-randomness bound (1 = ternary u).
    pub b_u: u64,
    /// Plaintext amplification factor.
    pub scale: u64,
    /// Perturbation fraction for fae encryption; d = floor(epsilon * scale).
    pub epsilon: f64,
    /// Gadget decomposition base (even).
    pub b_g: u64,
    pub mul: MulStrategy,
    /// Equality threshold; defaults to scale^2 / 2.
    pub tau: Option<u64>,
}

/// Validated parameter set. Fields are public for inspection; after mutating
/// anything call [`Params::validate`] again before trusting it.
#[derive(Debug, Clone)]
pub struct Params {
    pub n: usize,
    pub q: u64,
    pub b_e: u64,
    pub b_u: u64,
    pub scale: u64,
    pub epsilon: f64,
    pub b_g: u64,
    pub mul: MulStrategy,
    /// Perturbation amplitude: fae encryption draws delta uniform on [-d, d].
    pub d: u64,
    /// Equality threshold: |eval| < tau reads as "equal".
    pub tau: u64,
    /// Gadget digits per element: smallest ell with b_g^ell >= q.
    pub ell: usize,
    /// Largest encodable plaintext magnitude.
    pub m_max: u64,
    /// Analytic worst-case evaluation noise (gadget-mode comparisons).
    pub n_max: u64,
    ring: Ring,
}

impl PartialEq for Params {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.q == other.q
            && self.b_e == other.b_e
            && self.b_u == other.b_u
            && self.scale == other.scale
            && self.epsilon == other.epsilon
            && self.b_g == other.b_g
            && self.mul == other.mul
            && self.d == other.d
            && self.tau == other.tau
            && self.ell == other.ell
            && self.m_max == other.m_max
            && self.n_max == other.n_max
    }
}

/// Smallest ell with b_g^ell >= q, i.e. ceil(log_{b_g} q).
pub fn gadget_len(q: u64, b_g: u64) -> usize {
    assert!(b_g >= 2, "gadget base must be >= 2");
    let mut acc: u128 = 1;
    let mut ell = 0;
    while acc < q as u128 {
        acc *= b_g as u128;
        ell += 1;
    }
    ell
}

/// Worst-case |noise| in an evaluation of two ciphertexts:
///   scale * (difference of per-ciphertext decryption noise)
/// + gadget cross-term sum_j digits_j * e_j.
/// Per ciphertext the noise is e1 + e2*s - u*e_pk + e_m with ternary s, so
/// its norm is at most 2*b_e + 2*n*b_e*b_u (e_m only exists for fae; the
/// bound covers both flavors).
fn derive_n_max(n: usize, b_e: u64, b_u: u64, scale: u64, b_g: u64, ell: usize) -> u128 {
    let n = n as u128;
    let b_e = b_e as u128;
    let per_ct = 2 * b_e + 2 * n * b_e * b_u as u128;
    scale as u128 * 2 * per_ct + ell as u128 * n * (b_g as u128 / 2) * b_e
}

impl ParamsConfig {
    pub fn validate(self) -> Result<Params> {
        let ParamsConfig { n, q, b_e, b_u, scale, epsilon, b_g, mul, tau } = self;
        let d = (epsilon * scale as f64).floor() as u64;
        let ell = if b_g >= 2 { gadget_len(q, b_g) } else { 0 };
        let tau = tau.unwrap_or((scale as u128 * scale as u128 / 2).min(u64::MAX as u128) as u64);
        let n_max128 = derive_n_max(n, b_e, b_u, scale, b_g, ell);
        let n_max = n_max128.min(u64::MAX as u128) as u64;
        // Worst evaluation magnitude is a *difference*: up to 2*m_max plaintext
        // units and two opposite perturbations. Solve for m_max so that it
        // stays strictly inside (-q/2, q/2).
        let m_max = {
            let half_q = (q / 2) as u128;
            let overhead = n_max128 + 2 * d as u128 * scale as u128;
            let scale2 = scale as u128 * scale as u128;
            if half_q > overhead && scale2 > 0 {
                ((half_q - overhead - 1) / (2 * scale2)).min(u64::MAX as u128) as u64
            } else {
                0
            }
        };

        let probe = Params {
            n,
            q,
            b_e,
            b_u,
            scale,
            epsilon,
            b_g,
            mul,
            d,
            tau,
            ell,
            m_max,
            n_max,
            // checked ring is built below once the invariants pass
            ring: Ring::new(2, 3, MulStrategy::Schoolbook).expect("placeholder ring"),
        };
        let violations = violations(&probe);
        if !violations.is_empty() {
            return Err(Error::InvalidParams(violations));
        }
        let ring = Ring::new(n, q, mul)?;
        Ok(Params { ring, ..probe })
    }
}

impl Params {
    /// Re-checks every invariant, including that the derived fields still
    /// match their derivations. Idempotent: a validated Params passes.
    pub fn validate(&self) -> Result<()> {
        let v = violations(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// CI profile: small ring, schoolbook multiplication.
    pub fn desk() -> Params {
        ParamsConfig {
            n: 256,
            q: ntt_modulus(),
            b_e: 4,
            b_u: 1,
            scale: 10_000,
            epsilon: 1e-2,
            b_g: 1 << 8,
            mul: MulStrategy::Schoolbook,
            tau: None,
        }
        .validate()
        .expect("desk profile satisfies all invariants")
    }

    /// Full-size profile: n = 1024 with NTT multiplication. The tighter
    /// noise bound (b_e = 1) is what keeps the worst-case evaluation noise
    /// under tau at this degree; see the derivation on `n_max`.
    pub fn default_profile() -> Params {
        ParamsConfig {
            n: 1024,
            q: ntt_modulus(),
            b_e: 1,
            b_u: 1,
            scale: 10_000,
            epsilon: 1e-2,
            b_g: 1 << 8,
            mul: MulStrategy::Ntt,
            tau: None,
        }
        .validate()
        .expect("default profile satisfies all invariants")
    }

    pub fn by_name(name: &str) -> Result<Params> {
        match name {
            "desk" => Ok(Params::desk()),
            "default" => Ok(Params::default_profile()),
            other => Err(Error::Format(format!(
                "unknown profile '{other}' (expected desk or default)"
            ))),
        }
    }

    /// key=value lines, one per field; parses back with `from_profile_text`.
    pub fn to_profile_text(&self) -> String {
        let mul = match self.mul {
            MulStrategy::Schoolbook => "schoolbook",
            MulStrategy::Ntt => "ntt",
        };
        format!(
            "n={}\nq={}\nb_e={}\nb_u={}\nscale={}\nepsilon={}\nb_g={}\nmul={}\nd={}\ntau={}\nell={}\nm_max={}\nn_max={}\n",
            self.n,
            self.q,
            self.b_e,
            self.b_u,
            self.scale,
            self.epsilon,
            self.b_g,
            mul,
            self.d,
            self.tau,
            self.ell,
            self.m_max,
            self.n_max,
        )
    }

    pub fn from_profile_text(text: &str) -> Result<Params> {
        let mut kv = std::collections::HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Format(format!("profile line {}: expected key=value", lineno + 1))
            })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| {
            kv.get(k)
                .ok_or_else(|| Error::Format(format!("profile missing key '{k}'")))
        };
        let int = |k: &str| -> Result<u64> {
            get(k)?
                .parse()
                .map_err(|e| Error::Format(format!("profile key '{k}': {e}")))
        };
        let mul = match get("mul")?.as_str() {
            "schoolbook" => MulStrategy::Schoolbook,
            "ntt" => MulStrategy::Ntt,
            other => return Err(Error::Format(format!("unknown mul strategy '{other}'"))),
        };
        let epsilon: f64 = get("epsilon")?
            .parse()
            .map_err(|e| Error::Format(format!("profile key 'epsilon': {e}")))?;
        let p = Params::assemble(
            int("n")? as usize,
            int("q")?,
            int("b_e")?,
            int("b_u")?,
            int("scale")?,
            epsilon,
            int("b_g")?,
            mul,
            int("d")?,
            int("tau")?,
            int("ell")? as usize,
            int("m_max")?,
            int("n_max")?,
        )?;
        Ok(p)
    }

    /// Rebuilds a Params from stored fields (profile text or binary header),
    /// validating that the derived fields match their derivations.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        n: usize,
        q: u64,
        b_e: u64,
        b_u: u64,
        scale: u64,
        epsilon: f64,
        b_g: u64,
        mul: MulStrategy,
        d: u64,
        tau: u64,
        ell: usize,
        m_max: u64,
        n_max: u64,
    ) -> Result<Params> {
        let rebuilt = ParamsConfig {
            n,
            q,
            b_e,
            b_u,
            scale,
            epsilon,
            b_g,
            mul,
            tau: Some(tau),
        }
        .validate()?;
        let stated = [
            ("d", d, rebuilt.d),
            ("ell", ell as u64, rebuilt.ell as u64),
            ("m_max", m_max, rebuilt.m_max),
            ("n_max", n_max, rebuilt.n_max),
        ];
        for (name, got, want) in stated {
            if got != want {
                return Err(Error::Format(format!(
                    "stored {name}={got} does not match derived {name}={want}"
                )));
            }
        }
        Ok(rebuilt)
    }
}

/// The shared modulus for both built-in profiles: the largest 60-bit prime
/// with q = 1 mod 2048, found by downward search, so the NTT works at any
/// degree up to 1024.
pub fn ntt_modulus() -> u64 {
    find_ntt_prime(60, 1024).expect("a 60-bit NTT-friendly prime exists")
}

fn violations(p: &Params) -> Vec<String> {
    let mut out = Vec::new();
    let mut fail = |msg: String| out.push(msg);

    if !p.n.is_power_of_two() || p.n < 2 {
        fail(format!("n = {} must be a power of two >= 2", p.n));
    }
    if p.q >= MAX_MODULUS {
        fail(format!("q = {} must be < 2^62", p.q));
    }
    if !is_prime(p.q) {
        fail(format!("q = {} must be prime", p.q));
    }
    if p.mul == MulStrategy::Ntt && p.q % (2 * p.n as u64) != 1 {
        fail(format!(
            "NTT strategy needs q = 1 mod 2n: q = {} mod {} = {}",
            p.q,
            2 * p.n,
            p.q % (2 * p.n as u64)
        ));
    }
    if p.b_e < 1 {
        fail(format!("b_e = {} must be >= 1", p.b_e));
    }
    if p.b_u < 1 {
        fail(format!("b_u = {} must be >= 1", p.b_u));
    }
    if 2 * p.b_e + 1 > p.q || 2 * p.b_u + 1 > p.q {
        fail(format!(
            "noise ranges must fit the modulus: 2*max(b_e={}, b_u={}) + 1 > q = {}",
            p.b_e, p.b_u, p.q
        ));
    }
    let noise_floor = (2 * p.b_e).max(1);
    if p.scale <= noise_floor {
        fail(format!(
            "scale = {} must exceed max(2*b_e, 1) = {noise_floor}",
            p.scale
        ));
    }
    if !(100..=10_000).contains(&p.scale) {
        fail(format!("scale = {} outside the supported range [10^2, 10^4]", p.scale));
    }
    if !(p.epsilon >= 1e-3 && p.epsilon <= 1e-2) {
        fail(format!(
            "epsilon = {} outside the supported range [10^-3, 10^-2]",
            p.epsilon
        ));
    }
    let d_expect = (p.epsilon * p.scale as f64).floor() as u64;
    if p.d != d_expect {
        fail(format!(
            "d = {} must equal floor(epsilon * scale) = {d_expect}",
            p.d
        ));
    }
    if p.d < 1 {
        fail(format!("d = floor(epsilon * scale) = {} must be >= 1", p.d));
    }
    if p.b_g < 4 || p.b_g % 2 != 0 {
        fail(format!("b_g = {} must be even and >= 4", p.b_g));
    } else {
        let ell_expect = gadget_len(p.q, p.b_g);
        if p.ell != ell_expect {
            fail(format!(
                "ell = {} must equal ceil(log_b_g q) = {ell_expect}",
                p.ell
            ));
        }
        // balanced digits of a centered value must terminate within ell digits
        let capacity = (p.b_g as u128).pow(p.ell as u32);
        if capacity < 2 * p.q as u128 {
            fail(format!(
                "gadget capacity b_g^ell = {capacity} must be >= 2q = {} so centered values decompose in ell digits",
                2 * p.q as u128
            ));
        }
    }

    let scale2 = p.scale as u128 * p.scale as u128;
    let n_max = derive_n_max(p.n, p.b_e, p.b_u, p.scale, p.b_g, p.ell);
    if p.n_max as u128 != n_max {
        fail(format!(
            "n_max = {} must equal its derivation {n_max}",
            p.n_max
        ));
    }
    if !(n_max < p.tau as u128) {
        fail(format!(
            "evaluation noise bound must stay under the equality threshold: n_max = {n_max} >= tau = {}",
            p.tau
        ));
    }
    if !(p.tau as u128 <= scale2 / 2) {
        fail(format!(
            "tau = {} must be <= scale^2/2 = {}",
            p.tau,
            scale2 / 2
        ));
    }
    if !(scale2 > 2 * n_max) {
        fail(format!(
            "sign-correctness margin: scale^2 = {scale2} must exceed 2*n_max = {}",
            2 * n_max
        ));
    }
    if !(scale2 > n_max + 2 * p.d as u128 * p.scale as u128) {
        fail(format!(
            "perturbed comparisons must preserve unit gaps: scale^2 = {scale2} <= n_max + 2*d*scale = {}",
            n_max + 2 * p.d as u128 * p.scale as u128
        ));
    }
    if p.m_max < 1 {
        fail(format!("m_max = {} must be >= 1", p.m_max));
    }
    let half_q = (p.q / 2) as u128;
    let lhs_two_sided = 2 * p.m_max as u128 * scale2 + n_max + 2 * p.d as u128 * p.scale as u128;
    if !(lhs_two_sided < half_q) {
        fail(format!(
            "wraparound: 2*m_max*scale^2 + n_max + 2*d*scale = {lhs_two_sided} must be < q/2 = {half_q}"
        ));
    }
    let lhs_one_sided = p.m_max as u128 * scale2 + n_max + p.d as u128 * p.scale as u128;
    if !(lhs_one_sided < half_q) {
        fail(format!(
            "wraparound: m_max*scale^2 + n_max + d*scale = {lhs_one_sided} must be < q/2 = {half_q}"
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Frozen result of the modulus search: largest 60-bit prime = 1 mod 2048.
    const Q60: u64 = 1_152_921_504_606_830_593;

    #[test]
    fn modulus_search_is_stable() {
        assert_eq!(ntt_modulus(), Q60);
        assert_eq!(Q60, (1 << 60) - 16383);
    }

    #[test]
    fn desk_profile_derivations() {
        let p = Params::desk();
        assert_eq!(p.q, Q60);
        assert_eq!(p.d, 100);
        assert_eq!(p.tau, 50_000_000);
        assert_eq!(p.ell, 8);
        // scale*2*(2*4 + 2*256*4) + 8*256*128*4
        assert_eq!(p.n_max, 42_168_576);
        assert_eq!(p.m_max, 2_882_303_761);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn default_profile_derivations() {
        let p = Params::default_profile();
        assert_eq!(p.q, Q60);
        assert_eq!(p.n, 1024);
        assert_eq!(p.mul, MulStrategy::Ntt);
        assert_eq!(p.d, 100);
        assert_eq!(p.ell, 8);
        assert_eq!(p.n_max, 42_048_576);
        assert_eq!(p.m_max, 2_882_303_761);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn gadget_len_examples() {
        // a ~2^60 modulus with base 2^16 needs ceil(60/16) = 4 digits
        assert_eq!(gadget_len(Q60, 1 << 16), 4);
        assert_eq!(gadget_len(Q60, 1 << 8), 8);
        assert_eq!(gadget_len(256, 16), 2);
        assert_eq!(gadget_len(257, 16), 3);
    }

    #[test]
    fn undersized_scale_rejected() {
        let err = ParamsConfig {
            scale: 10,
            b_e: 8,
            ..desk_config()
        }
        .validate()
        .unwrap_err();
        let Error::InvalidParams(v) = err else {
            panic!("expected InvalidParams")
        };
        assert!(v.iter().any(|m| m.contains("max(2*b_e, 1)")), "{v:?}");
    }

    #[test]
    fn out_of_range_epsilon_rejected() {
        let err = ParamsConfig { epsilon: 0.5, ..desk_config() }.validate().unwrap_err();
        let Error::InvalidParams(v) = err else {
            panic!("expected InvalidParams")
        };
        assert!(v.iter().any(|m| m.contains("epsilon")), "{v:?}");
    }

    #[test]
    fn heavy_noise_at_full_degree_rejected() {
        // b_e = 8 with b_g = 2^16 at n = 1024 pushes worst-case evaluation
        // noise orders of magnitude past tau; validation must say so.
        let err = ParamsConfig {
            n: 1024,
            b_e: 8,
            b_g: 1 << 16,
            mul: MulStrategy::Ntt,
            ..desk_config()
        }
        .validate()
        .unwrap_err();
        let Error::InvalidParams(v) = err else {
            panic!("expected InvalidParams")
        };
        assert!(v.iter().any(|m| m.contains("n_max") && m.contains("tau")), "{v:?}");
    }

    #[test]
    fn ntt_strategy_needs_friendly_modulus() {
        // 100003 is prime but 100003 mod 512 = 163
        let bad = ParamsConfig { q: 100_003, mul: MulStrategy::Ntt, ..desk_config() };
        let e = bad.validate().unwrap_err();
        let Error::InvalidParams(v) = e else { panic!("expected InvalidParams") };
        assert!(v.iter().any(|m| m.contains("q = 1 mod 2n")), "{v:?}");
    }

    #[test]
    fn nonprime_modulus_rejected() {
        let e = ParamsConfig { q: (1 << 59) + 1, ..desk_config() }.validate().unwrap_err();
        let Error::InvalidParams(v) = e else { panic!("expected InvalidParams") };
        assert!(v.iter().any(|m| m.contains("prime")), "{v:?}");
    }

    #[test]
    fn tau_must_sit_between_noise_and_margin() {
        let e = ParamsConfig { tau: Some(10), ..desk_config() }.validate().unwrap_err();
        let Error::InvalidParams(v) = e else { panic!("expected InvalidParams") };
        assert!(v.iter().any(|m| m.contains("n_max") && m.contains("tau")), "{v:?}");

        let e = ParamsConfig { tau: Some(90_000_000), ..desk_config() }
            .validate()
            .unwrap_err();
        let Error::InvalidParams(v) = e else { panic!("expected InvalidParams") };
        assert!(v.iter().any(|m| m.contains("scale^2/2")), "{v:?}");
    }

    #[test]
    fn profile_text_roundtrip() {
        for p in [Params::desk(), Params::default_profile()] {
            let text = p.to_profile_text();
            let back = Params::from_profile_text(&text).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn profile_text_rejects_tampered_derived_field() {
        let text = Params::desk().to_profile_text().replace("d=100", "d=99");
        assert!(Params::from_profile_text(&text).is_err());
    }

    fn desk_config() -> ParamsConfig {
        ParamsConfig {
            n: 256,
            q: Q60,
            b_e: 4,
            b_u: 1,
            scale: 10_000,
            epsilon: 1e-2,
            b_g: 1 << 8,
            mul: MulStrategy::Schoolbook,
            tau: None,
        }
    }
}
