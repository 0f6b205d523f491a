//! ORBGRAND-AI decoding over correlated Gauss-Markov channels.
//!
//! * [`codes`]: random linear and CRC codes, encoding and membership.
//! * [`channel`]: BPSK, AR(1) complex noise, Eb/N0 calibration, entropy.
//! * [`patterns`]: rank ordering and logistic-weight pattern generation.
//! * [`decoder`]: block partitioning, joint block likelihoods and the
//!   guessing loop.
//! * [`harness`]: seeded parallel Monte Carlo experiments and result files.

pub mod bits;
pub mod channel;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod harness;
pub mod patterns;

pub use bits::{BitMatrix, BitVec};
pub use channel::{
    block_covariance, block_entropy_rate, ebno_to_sigma2, entropy_rate, gm_noise, modulate_bpsk,
    transmit, BlockCovariance, GaussMarkovChannel, Modulation, ReceivedSignal, SymbolVector,
};
pub use codes::{CodeDescriptor, CodeKind, Codeword, CrcPolynomial, InfoWord, LinearCode};
pub use decoder::{
    build_candidate_table, decode, partition_blocks, substitute_and_demap, BlockCandidate,
    BlockModel, CandidateTable, DecodeResult, DecodeStatus, Decoder, Substitution, DEFAULT_TAU,
};
pub use error::{Error, Result};
pub use harness::{
    emit_results, rate_search, run_bler, BlerPoint, ExperimentConfig, OutputFormat,
    RateSearchResult,
};
pub use patterns::{rank_sort, Pattern, PatternEnumerator, RankPermutation};
