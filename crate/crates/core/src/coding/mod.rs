//! Alphabets, network codes, end-to-end transmission and the unambiguity
//! check that every solver answer is verified against.

mod alphabet;
mod certificate;
mod channel;
mod code;

use thiserror::Error;

pub use alphabet::{make_alphabet, prime_power, Alphabet, AlphabetSpec, Field, Structure, MAX_Q};
pub use certificate::{Certificate, CertificateError, CertificateFile, CERTIFICATE_FORMAT};
pub use channel::{
    capacity_value, is_linear, is_unambiguous, transmit, CapacityValue, Collision, Transcript,
    Unambiguity,
};
pub use code::{
    index_tuple, index_tuple_into, tuple_count, tuple_index, FunctionTable, NetworkCode, OuterCode,
};

pub(crate) use channel::transmit_unchecked;

/// Alphabet symbols are `0..q`.
pub type Symbol = u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("alphabet size {0} exceeds the supported maximum of {MAX_Q}")]
    AlphabetTooLarge(usize),
    #[error("{0} is not a prime power, so there is no field of that size")]
    NotAPrimePower(usize),
    #[error("the alphabet of size {0} has no field structure")]
    NotAField(usize),
    #[error("modulus {modulus:?} for F_{q} differs from the built-in one")]
    UnsupportedModulus { q: usize, modulus: Vec<usize> },
    #[error("code tables use q={code} but the alphabet has q={alphabet}")]
    AlphabetMismatch { code: usize, alphabet: usize },
    #[error("symbol {symbol} is outside the alphabet of size {q}")]
    SymbolOutOfRange { symbol: usize, q: usize },
    #[error("outer code must be non-empty")]
    EmptyCode,
    #[error("codeword {0:?} appears more than once")]
    RepeatedCodeword(Vec<Symbol>),
    #[error("codeword has length {got}, expected {expected}")]
    CodewordLength { expected: usize, got: usize },
    #[error("vertex `{vertex}` needs a table of arity {expected:?}, got {got:?}")]
    Arity { vertex: String, expected: (usize, usize), got: (usize, usize) },
    #[error("table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },
    #[error("function table is too large to index")]
    TableTooLarge,
    #[error("intermediate vertex `{0}` has no function table")]
    MissingTable(String),
    #[error("`{0}` is not an intermediate vertex")]
    NotIntermediate(String),
    #[error("network code was built for a different network")]
    WrongNetwork,
}
