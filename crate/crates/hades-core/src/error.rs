use crate::encrypt::Flavor;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operands were built over different rings.
    #[error("ring mismatch: left is Z_{lq}[x]/(x^{ln}+1), right is Z_{rq}[x]/(x^{rn}+1)")]
    RingMismatch { ln: usize, lq: u64, rn: usize, rq: u64 },

    /// Element construction rejected (wrong length or coefficient >= q).
    #[error("bad ring element: {0}")]
    BadElement(String),

    /// NTT multiplication requested but q is not NTT-friendly for this degree.
    #[error("no NTT for n={n}, q={q}: need prime q = 1 mod 2n")]
    NttUnavailable { n: usize, q: u64 },

    /// One line per violated parameter invariant, inequality included.
    #[error("invalid parameters:\n{}", .0.join("\n"))]
    InvalidParams(Vec<String>),

    /// Plaintext outside the encodable range [-m_max, m_max].
    #[error("plaintext {value} outside [-{m_max}, {m_max}]")]
    PlaintextRange { value: i64, m_max: u64 },

    /// Real value does not round into the encodable range.
    #[error("real value {value} unencodable at {frac_bits} fractional bits")]
    RealRange { value: f64, frac_bits: u32 },

    /// Operation requires a specific ciphertext flavor.
    #[error("flavor mismatch: expected {expected:?}, found {found:?}")]
    FlavorMismatch { expected: Flavor, found: Flavor },

    /// Decryption landed on a rounding boundary; noise exceeded its budget.
    #[error("noise overflow: residual {residual} is >= scale/2")]
    NoiseOverflow { residual: i64 },

    /// The requested check needs a recorded noise transcript.
    #[error("no noise transcript recorded for this key material")]
    TranscriptMissing,

    /// Malformed serialized data.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
