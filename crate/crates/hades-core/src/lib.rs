//! Order-comparable RLWE encryption. Ciphertexts are pairs over the
//! negacyclic ring Z_q[x]/(x^n + 1); a separate compare-eval key lets an
//! untrusted evaluator recover the *sign* of the plaintext difference of two
//! ciphertexts — never the plaintexts — so encrypted data can be sorted and
//! range-filtered in place. Ciphertexts never grow: comparing is read-only.
//!
//! Two encryption flavors share one ciphertext layout. `Basic` supports full
//! three-way comparison (less / equal / greater). `Fae` adds a bounded
//! random perturbation to the encoding, trading exact equality detection for
//! resistance to frequency analysis: repeated encryptions of one value
//! compare like fresh coin flips.
//!
//! Module map: [`ring`] fixed-modulus polynomial arithmetic, [`ntt`] the
//! transform backing fast multiplication, [`params`] parameter derivation
//! and validation, [`keys`] key generation, [`encrypt`] encoding and the two
//! flavors, [`compare`] gadget decomposition and evaluation, [`batch`]
//! parallel bulk operations, [`io`] serialization.

pub mod batch;
pub mod compare;
pub mod encrypt;
pub mod error;
pub mod io;
pub mod keys;
pub mod ntt;
pub mod params;
pub mod ring;

pub use compare::{
    cmp_basic, cmp_fae, eval_cek, eval_value, gadget_decompose, noise_budget_report,
    Classification, EvalOutcome, NoiseBudgetReport,
};
pub use encrypt::{
    decrypt, enc_basic, enc_basic_traced, enc_fae, enc_fae_traced, enc_from_transcript,
    encode_int, encode_real, real_from_int, Ciphertext, Flavor, NoiseTranscript,
};
pub use error::{Error, Result};
pub use keys::{
    assemble_triple, cek_identity_check, keygen, CekMode, CompareEvalKey, KeyTriple, PublicKey,
    SecretKey,
};
pub use params::{Params, ParamsConfig};
pub use ring::{MulStrategy, Ring, RingElement};
