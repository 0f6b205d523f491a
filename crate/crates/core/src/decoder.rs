//! ORBGRAND-AI: block-wise joint demodulation with whole-block substitution.
//!
//! The received word is cut into non-overlapping blocks of `b` symbols.
//! Within a block the noise covariance is used in full; across blocks the
//! posterior is treated as a product. Every alternative symbol tuple of every
//! block becomes one candidate whose reliability is its log-likelihood gap to
//! the block's joint hard decision. Candidates are rank-sorted and fed to the
//! ORBGRAND pattern generator; a pattern that picks two candidates of the
//! same block is a substitution conflict and is skipped.
//!
//! Block indices and candidate indices are 0-based; pattern ranks are
//! 1-based. Within a block, the tuple index `t` encodes the bits in
//! transmission order with the first symbol in the most significant
//! position, and `t` ascending is the canonical enumeration used for
//! tie-breaks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bits::BitVec;
use crate::channel::{
    block_covariance, bpsk_level, BlockCovariance, GaussMarkovChannel, Modulation, ReceivedSignal,
};
use crate::codes::{Codeword, LinearCode};
use crate::error::{Error, Result};
use crate::patterns::{rank_sort, PatternEnumerator, RankPermutation};

/// Largest number of tuples evaluated per block.
pub const MAX_BLOCK_CANDIDATES: usize = 1 << 16;

/// Default abandonment threshold, in fetched patterns.
pub const DEFAULT_TAU: u64 = 1_000_000;

/// Penalties below this are treated as exact ties with the hard decision.
pub const PENALTY_FLOOR: f64 = 1e-12;

/// Contiguous non-overlapping blocks of `b` symbols, in transmission order.
pub fn partition_blocks(y: &ReceivedSignal, b: usize) -> Result<Vec<&[Complex64]>> {
    check_block_size(y.len(), b)?;
    Ok(y.values.chunks_exact(b).collect())
}

fn check_block_size(n_s: usize, b: usize) -> Result<()> {
    if b == 0 || n_s == 0 || !n_s.is_multiple_of(b) {
        return Err(Error::BlockSize { b, n_s });
    }
    Ok(())
}

/// Per-block likelihood model for a fixed (b, ρ, σ²): the block precision
/// matrix plus the modulated form of every candidate tuple. Shared by all
/// blocks and all received words on the same channel.
#[derive(Clone, Debug)]
pub struct BlockModel {
    b: usize,
    modulation: Modulation,
    covariance: BlockCovariance,
    /// Candidate signal vectors, `b` entries per tuple.
    levels: Vec<f64>,
    /// `P · s` per tuple, `b` entries each.
    precision_levels: Vec<f64>,
    /// `sᵀ P s` per tuple.
    energies: Vec<f64>,
}

impl BlockModel {
    pub fn new(b: usize, channel: &GaussMarkovChannel, modulation: Modulation) -> Result<Self> {
        if b == 0 {
            return Err(Error::BlockSize { b, n_s: 0 });
        }
        let bits = modulation.bits_per_symbol() * b;
        if bits > 16 {
            return Err(Error::TooManyCandidates {
                b,
                count: usize::MAX,
                limit: MAX_BLOCK_CANDIDATES,
            });
        }
        let count = 1usize << bits;
        if count > MAX_BLOCK_CANDIDATES {
            return Err(Error::TooManyCandidates {
                b,
                count,
                limit: MAX_BLOCK_CANDIDATES,
            });
        }
        let covariance = block_covariance(b, channel)?;
        let p = &covariance.precision;
        let mut levels = Vec::with_capacity(count * b);
        let mut precision_levels = Vec::with_capacity(count * b);
        let mut energies = Vec::with_capacity(count);
        for t in 0..count {
            let s: Vec<f64> = (0..b)
                .map(|j| bpsk_level(tuple_bit(t as u32, j, b)))
                .collect();
            let ps: Vec<f64> = (0..b)
                .map(|i| (0..b).map(|j| p[(i, j)] * s[j]).sum())
                .collect();
            energies.push(s.iter().zip(&ps).map(|(a, c)| a * c).sum());
            levels.extend_from_slice(&s);
            precision_levels.extend_from_slice(&ps);
        }
        Ok(BlockModel {
            b,
            modulation,
            covariance,
            levels,
            precision_levels,
            energies,
        })
    }

    pub fn block_size(&self) -> usize {
        self.b
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn covariance(&self) -> &BlockCovariance {
        &self.covariance
    }

    /// Number of symbol tuples per block, `|χ|^b`.
    pub fn num_tuples(&self) -> usize {
        self.energies.len()
    }

    /// Signal vector of tuple `t`.
    pub fn tuple_levels(&self, t: usize) -> &[f64] {
        &self.levels[t * self.b..(t + 1) * self.b]
    }

    /// Log-likelihood of every tuple, `−½ (y − s)ᵀ P (y − s)`, written to `out`.
    ///
    /// Only the in-phase component enters; the quadrature part adds the same
    /// amount to every BPSK tuple and is dropped along with the Gaussian
    /// normalisation.
    pub fn log_likelihoods_into(&self, y_block: &[Complex64], out: &mut [f64]) -> Result<()> {
        if y_block.len() != self.b {
            return Err(Error::LengthMismatch {
                expected: self.b,
                actual: y_block.len(),
            });
        }
        if out.len() != self.num_tuples() {
            return Err(Error::LengthMismatch {
                expected: self.num_tuples(),
                actual: out.len(),
            });
        }
        let b = self.b;
        let p = &self.covariance.precision;
        let mut y_energy = 0.0;
        for i in 0..b {
            for j in 0..b {
                y_energy += y_block[i].re * p[(i, j)] * y_block[j].re;
            }
        }
        for (t, slot) in out.iter_mut().enumerate() {
            let ps = &self.precision_levels[t * b..(t + 1) * b];
            let cross: f64 = ps.iter().zip(y_block).map(|(a, y)| a * y.re).sum();
            *slot = -0.5 * (y_energy - 2.0 * cross + self.energies[t]);
        }
        Ok(())
    }

    pub fn log_likelihoods(&self, y_block: &[Complex64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.num_tuples()];
        self.log_likelihoods_into(y_block, &mut out)?;
        Ok(out)
    }
}

/// Bit `j` (transmission order) of tuple `t` in a block of `b` bits.
#[inline]
pub fn tuple_bit(t: u32, j: usize, b: usize) -> bool {
    (t >> (b - 1 - j)) & 1 == 1
}

/// Log-likelihood of every tuple in `χ^b` for one received block.
pub fn block_log_likelihoods(
    y_block: &[Complex64],
    cov: &BlockCovariance,
    modulation: Modulation,
) -> Result<Vec<f64>> {
    let b = cov.b;
    if y_block.len() != b {
        return Err(Error::LengthMismatch {
            expected: b,
            actual: y_block.len(),
        });
    }
    let bits = modulation.bits_per_symbol() * b;
    if bits > 16 {
        return Err(Error::TooManyCandidates {
            b,
            count: usize::MAX,
            limit: MAX_BLOCK_CANDIDATES,
        });
    }
    let y: Vec<f64> = y_block.iter().map(|v| v.re).collect();
    Ok((0..1u32 << bits)
        .map(|t| {
            let diff: Vec<f64> = (0..b)
                .map(|j| y[j] - bpsk_level(tuple_bit(t, j, b)))
                .collect();
            -0.5 * quad_form(&cov.precision, &diff)
        })
        .collect())
}

fn quad_form(p: &DMatrix<f64>, v: &[f64]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += v[i] * p[(i, j)] * v[j];
        }
    }
    acc
}

/// Index of the most likely tuple; ties go to the lowest index.
pub fn hard_demod_block(log_likelihoods: &[f64]) -> usize {
    let mut best = 0;
    for (t, &ll) in log_likelihoods.iter().enumerate().skip(1) {
        if ll > log_likelihoods[best] {
            best = t;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockCandidate {
    pub block: usize,
    /// Tuple index of the substitute symbols.
    pub symbols: u32,
    /// `log p(hard) − log p(candidate)`, clamped at zero.
    pub penalty: f64,
}

/// Hard decisions of all blocks and the μ ranked alternatives.
#[derive(Clone, Debug)]
pub struct CandidateTable {
    b: usize,
    bits_per_block: usize,
    hard: Vec<u32>,
    candidates: Vec<BlockCandidate>,
    ranks: RankPermutation,
}

impl CandidateTable {
    pub fn block_size(&self) -> usize {
        self.b
    }

    pub fn num_blocks(&self) -> usize {
        self.hard.len()
    }

    /// Joint hard decision of each block.
    pub fn hard_decisions(&self) -> &[u32] {
        &self.hard
    }

    /// Candidates in canonical (block-major, tuple-ascending) order.
    pub fn candidates(&self) -> &[BlockCandidate] {
        &self.candidates
    }

    pub fn ranks(&self) -> &RankPermutation {
        &self.ranks
    }

    /// μ.
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    #[inline]
    pub fn by_rank(&self, rank: usize) -> &BlockCandidate {
        &self.candidates[self.ranks.candidate(rank)]
    }

    /// Bits of the all-hard-decision word.
    pub fn hard_word(&self) -> Codeword {
        let n = self.hard.len() * self.bits_per_block;
        let mut bits = BitVec::zeros(n);
        for (blk, &t) in self.hard.iter().enumerate() {
            write_tuple(&mut bits, blk, t, self.bits_per_block);
        }
        Codeword::new(bits)
    }
}

fn write_tuple(bits: &mut BitVec, block: usize, t: u32, width: usize) {
    let base = block * width;
    for j in 0..width {
        bits.set(base + j, tuple_bit(t, j, width));
    }
}

/// Outcome of substituting a pattern into the hard decisions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Substitution {
    Word(Codeword),
    Conflict,
}

/// Replace each pattern-selected block by its candidate tuple and demap.
pub fn substitute_and_demap(table: &CandidateTable, ranks: &[usize]) -> Substitution {
    let mut word = table.hard_word().into_bits();
    let mut touched = vec![false; table.num_blocks()];
    for &r in ranks {
        let cand = table.by_rank(r);
        if std::mem::replace(&mut touched[cand.block], true) {
            return Substitution::Conflict;
        }
        write_tuple(&mut word, cand.block, cand.symbols, table.bits_per_block);
    }
    Substitution::Word(Codeword::new(word))
}

/// Build the candidate table for a received word (one-off model).
pub fn build_candidate_table(
    y: &ReceivedSignal,
    b: usize,
    channel: &GaussMarkovChannel,
) -> Result<CandidateTable> {
    let model = BlockModel::new(b, channel, Modulation::Bpsk)?;
    candidate_table(y, &model)
}

/// Build the candidate table with a precomputed block model.
pub fn candidate_table(y: &ReceivedSignal, model: &BlockModel) -> Result<CandidateTable> {
    let b = model.block_size();
    let blocks = partition_blocks(y, b)?;
    let tuples = model.num_tuples();
    let mut hard = Vec::with_capacity(blocks.len());
    let mut candidates = Vec::with_capacity(blocks.len() * (tuples - 1));
    let mut lls = vec![0.0; tuples];
    for (blk, yb) in blocks.iter().enumerate() {
        model.log_likelihoods_into(yb, &mut lls)?;
        let best = hard_demod_block(&lls);
        hard.push(best as u32);
        let top = lls[best];
        for (t, &ll) in lls.iter().enumerate() {
            if t == best {
                continue;
            }
            let mut penalty = top - ll;
            if penalty < PENALTY_FLOOR {
                penalty = 0.0;
            }
            candidates.push(BlockCandidate {
                block: blk,
                symbols: t as u32,
                penalty,
            });
        }
    }
    let weights: Vec<f64> = candidates.iter().map(|c| c.penalty).collect();
    let ranks = rank_sort(&weights)?;
    Ok(CandidateTable {
        b,
        bits_per_block: b * model.modulation().bits_per_symbol(),
        hard,
        candidates,
        ranks,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    Found,
    Abandoned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub codeword: Option<Codeword>,
    /// Patterns fetched, conflicted ones included.
    pub guesses: u64,
    pub status: DecodeStatus,
}

impl DecodeResult {
    pub fn is_found(&self) -> bool {
        self.status == DecodeStatus::Found
    }
}

/// Decoder bound to one code, one channel and one block size.
#[derive(Clone, Debug)]
pub struct Decoder<'a> {
    code: &'a LinearCode,
    model: BlockModel,
    tau: u64,
}

impl<'a> Decoder<'a> {
    pub fn new(
        code: &'a LinearCode,
        channel: &GaussMarkovChannel,
        b: usize,
        tau: u64,
    ) -> Result<Self> {
        let model = BlockModel::new(b, channel, Modulation::Bpsk)?;
        Self::with_model(code, model, tau)
    }

    pub fn with_model(code: &'a LinearCode, model: BlockModel, tau: u64) -> Result<Self> {
        check_block_size(
            code.n() / model.modulation().bits_per_symbol(),
            model.block_size(),
        )?;
        if tau == 0 {
            return Err(Error::Config(
                "abandonment threshold must be at least 1".into(),
            ));
        }
        Ok(Decoder { code, model, tau })
    }

    pub fn code(&self) -> &LinearCode {
        self.code
    }

    pub fn model(&self) -> &BlockModel {
        &self.model
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    /// μ for this code and block size.
    pub fn num_candidates(&self) -> usize {
        let n_s = self.code.n() / self.model.modulation().bits_per_symbol();
        (self.model.num_tuples() - 1) * (n_s / self.model.block_size())
    }

    pub fn decode(&self, y: &ReceivedSignal) -> Result<DecodeResult> {
        self.decode_observed(y, |_, _| {})
    }

    /// Decode, reporting every fetched pattern as `(d, ranks)`.
    pub fn decode_observed<F>(&self, y: &ReceivedSignal, mut observe: F) -> Result<DecodeResult>
    where
        F: FnMut(u64, &[usize]),
    {
        let n_s = self.code.n() / self.model.modulation().bits_per_symbol();
        if y.len() != n_s {
            return Err(Error::LengthMismatch {
                expected: n_s,
                actual: y.len(),
            });
        }
        let table = candidate_table(y, &self.model)?;
        let width = self.model.block_size() * self.model.modulation().bits_per_symbol();
        let hard = table.hard_word();
        let base = self.code.syndrome(hard.bits())?;
        let words = base.words().len();

        // Syndrome change of each candidate, stored in rank order.
        let mu = table.len();
        let mut deltas = vec![0u64; mu * words];
        let mut blocks = Vec::with_capacity(mu);
        for rank in 1..=mu {
            let cand = table.by_rank(rank);
            blocks.push(cand.block);
            let diff = cand.symbols ^ table.hard_decisions()[cand.block];
            let slot = &mut deltas[(rank - 1) * words..rank * words];
            for j in 0..width {
                if tuple_bit(diff, j, width) {
                    let col = self.code.h_column(cand.block * width + j);
                    for (s, w) in slot.iter_mut().zip(col.words()) {
                        *s ^= w;
                    }
                }
            }
        }

        let mut stamp = vec![0u64; table.num_blocks()];
        let mut acc = vec![0u64; words];
        let mut patterns = PatternEnumerator::new(mu);
        let mut d = 0u64;
        while d < self.tau {
            d += 1;
            let Some(ranks) = patterns.advance() else {
                // Every word was tried; only reachable for an empty codebook.
                break;
            };
            observe(d, ranks);
            let mut conflict = false;
            for &r in ranks {
                let blk = blocks[r - 1];
                if stamp[blk] == d {
                    conflict = true;
                    break;
                }
                stamp[blk] = d;
            }
            if conflict {
                continue;
            }
            acc.copy_from_slice(base.words());
            for &r in ranks {
                for (a, w) in acc.iter_mut().zip(&deltas[(r - 1) * words..r * words]) {
                    *a ^= w;
                }
            }
            if acc.iter().all(|&w| w == 0) {
                let Substitution::Word(word) = substitute_and_demap(&table, ranks) else {
                    unreachable!("conflicts are filtered above");
                };
                debug_assert!(self.code.is_codeword(&word)?);
                return Ok(DecodeResult {
                    codeword: Some(word),
                    guesses: d,
                    status: DecodeStatus::Found,
                });
            }
        }
        Ok(DecodeResult {
            codeword: None,
            guesses: d,
            status: DecodeStatus::Abandoned,
        })
    }
}

/// One-shot decode.
pub fn decode(
    y: &ReceivedSignal,
    code: &LinearCode,
    channel: &GaussMarkovChannel,
    b: usize,
    tau: u64,
) -> Result<DecodeResult> {
    Decoder::new(code, channel, b, tau)?.decode(y)
}
