//! Binary linear block codes: random linear codes, CRC codes and the
//! membership check used by the decoder.
//!
//! Every code is held as a systematic generator `G = [I_k | P]` together with
//! the matching parity-check matrix `H = [Pᵀ | I_{n-k}]`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitMatrix, BitVec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Rlc,
    Crc,
    /// Every word of length n is a codeword (k = n). Used for sanity runs.
    Uncoded,
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeKind::Rlc => "rlc",
            CodeKind::Crc => "crc",
            CodeKind::Uncoded => "uncoded",
        })
    }
}

impl FromStr for CodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rlc" => Ok(CodeKind::Rlc),
            "crc" => Ok(CodeKind::Crc),
            "uncoded" => Ok(CodeKind::Uncoded),
            other => Err(Error::Config(format!("unknown code kind `{other}`"))),
        }
    }
}

/// CRC generator polynomial including its leading `x^r` term, so that
/// `x^3 + x + 1` is `0b1011`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CrcPolynomial(pub u64);

impl CrcPolynomial {
    /// Degree-12 CRC used when no polynomial is configured:
    /// `x^12 + x^11 + x^3 + x^2 + x + 1`.
    pub const CRC12: CrcPolynomial = CrcPolynomial(0x180F);

    pub fn degree(self) -> Option<u32> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros())
    }

    /// A standard polynomial of the requested degree, where one is tabulated.
    pub fn standard(degree: usize) -> Option<CrcPolynomial> {
        let poly = match degree {
            3 => 0xB,
            6 => 0x43,
            8 => 0x107,
            11 => 0xE21,
            12 => Self::CRC12.0,
            16 => 0x1_1021,
            24 => 0x186_4CFB,
            _ => return None,
        };
        Some(CrcPolynomial(poly))
    }

    pub fn to_hex(self) -> String {
        format!("{:#x}", self.0)
    }
}

impl FromStr for CrcPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        u64::from_str_radix(digits, 16)
            .map(CrcPolynomial)
            .map_err(|e| Error::Config(format!("bad polynomial `{s}`: {e}")))
    }
}

/// Archival description of a code: `{kind, n, k, seed | polynomial}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDescriptor {
    pub kind: CodeKind,
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Hex string, leading term included.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
}

impl CodeDescriptor {
    pub fn build(&self) -> Result<LinearCode> {
        match self.kind {
            CodeKind::Rlc => LinearCode::rlc(self.n, self.k, self.seed.unwrap_or(0)),
            CodeKind::Crc => {
                let poly = match &self.polynomial {
                    Some(s) => s.parse()?,
                    None => {
                        CrcPolynomial::standard(self.n.saturating_sub(self.k)).ok_or_else(|| {
                            Error::Config(format!(
                                "no default CRC polynomial of degree {}; set `polynomial`",
                                self.n.saturating_sub(self.k)
                            ))
                        })?
                    }
                };
                LinearCode::crc(self.n, self.k, poly)
            }
            CodeKind::Uncoded => {
                if self.k != self.n {
                    return Err(Error::InvalidDimensions {
                        n: self.n,
                        k: self.k,
                    });
                }
                LinearCode::uncoded(self.n)
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("descriptor serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoWord(BitVec);

impl InfoWord {
    pub fn new(bits: BitVec) -> Self {
        InfoWord(bits)
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let mut bits = BitVec::zeros(k);
        for i in 0..k {
            bits.set(i, rng.random());
        }
        InfoWord(bits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword(BitVec);

impl Codeword {
    pub fn new(bits: BitVec) -> Self {
        Codeword(bits)
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }

    pub fn into_bits(self) -> BitVec {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// An `[n, k]` binary linear code. Immutable once built.
#[derive(Clone, Debug)]
pub struct LinearCode {
    n: usize,
    k: usize,
    generator: BitMatrix,
    parity_check: BitMatrix,
    /// Column `j` of `H`, i.e. the syndrome of a single error at bit `j`.
    h_columns: Vec<BitVec>,
    descriptor: CodeDescriptor,
}

impl LinearCode {
    /// Random linear code with a systematic generator `[I_k | P]`, where `P`
    /// is filled row-major with fair coin flips from a ChaCha8 stream seeded
    /// by `seed`.
    pub fn rlc(n: usize, k: usize, seed: u64) -> Result<Self> {
        check_dims(n, k)?;
        let r = n - k;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut parity = BitMatrix::zeros(k, r);
        for i in 0..k {
            for j in 0..r {
                parity.set(i, j, rng.random());
            }
        }
        Ok(Self::systematic(
            parity,
            CodeDescriptor {
                kind: CodeKind::Rlc,
                n,
                k,
                seed: Some(seed),
                polynomial: None,
            },
        ))
    }

    /// Systematic CRC code: codeword `= [data | data·x^{n-k} mod g]`.
    ///
    /// Bit 0 of a codeword is the coefficient of `x^{n-1}`.
    pub fn crc(n: usize, k: usize, poly: CrcPolynomial) -> Result<Self> {
        check_dims(n, k)?;
        let r = n - k;
        let degree = poly.degree().ok_or(Error::ImproperPolynomial(poly.0))?;
        if degree as usize != r {
            return Err(Error::PolynomialDegree {
                poly: poly.0,
                degree,
                expected: r,
            });
        }
        if poly.0 & 1 == 0 {
            return Err(Error::ImproperPolynomial(poly.0));
        }
        // Row i of P holds x^{n-1-i} mod g, coefficient of x^{r-1-j} in column j.
        let mut parity = BitMatrix::zeros(k, r);
        let low_mask = (1u64 << r) - 1;
        let mut rem: u64 = 1;
        let mut powers = Vec::with_capacity(n);
        for _ in 0..n {
            powers.push(rem);
            rem <<= 1;
            if rem >> r & 1 == 1 {
                rem ^= poly.0;
            }
            rem &= low_mask;
        }
        for i in 0..k {
            let p = powers[n - 1 - i];
            for j in 0..r {
                parity.set(i, j, (p >> (r - 1 - j)) & 1 == 1);
            }
        }
        Ok(Self::systematic(
            parity,
            CodeDescriptor {
                kind: CodeKind::Crc,
                n,
                k,
                seed: None,
                polynomial: Some(poly.to_hex()),
            },
        ))
    }

    /// The full space `{0,1}^n`: `k = n` and an empty parity-check matrix.
    pub fn uncoded(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimensions { n, k: n });
        }
        Ok(Self::systematic(
            BitMatrix::zeros(n, 0),
            CodeDescriptor {
                kind: CodeKind::Uncoded,
                n,
                k: n,
                seed: None,
                polynomial: None,
            },
        ))
    }

    fn systematic(parity: BitMatrix, descriptor: CodeDescriptor) -> Self {
        let k = parity.num_rows();
        let r = parity.num_cols();
        let n = k + r;

        let mut generator = BitMatrix::zeros(k, n);
        for i in 0..k {
            generator.set(i, i, true);
            for j in 0..r {
                if parity.get(i, j) {
                    generator.set(i, k + j, true);
                }
            }
        }
        let mut parity_check = BitMatrix::zeros(r, n);
        for j in 0..r {
            for i in 0..k {
                if parity.get(i, j) {
                    parity_check.set(j, i, true);
                }
            }
            parity_check.set(j, k + j, true);
        }
        let h_columns = (0..n).map(|c| parity_check.column(c)).collect();

        let code = LinearCode {
            n,
            k,
            generator,
            parity_check,
            h_columns,
            descriptor,
        };
        debug_assert!(code.generator.mul(&code.parity_check.transpose()).is_zero());
        code
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn kind(&self) -> CodeKind {
        self.descriptor.kind
    }

    pub fn descriptor(&self) -> &CodeDescriptor {
        &self.descriptor
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    /// Syndrome contribution of bit `j`.
    pub fn h_column(&self, j: usize) -> &BitVec {
        &self.h_columns[j]
    }

    pub fn encode(&self, u: &InfoWord) -> Result<Codeword> {
        if u.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: u.len(),
            });
        }
        Ok(Codeword(self.generator.vec_mul(u.bits())))
    }

    /// `H · cᵀ` over GF(2).
    pub fn syndrome(&self, c: &BitVec) -> Result<BitVec> {
        if c.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: c.len(),
            });
        }
        Ok(self.parity_check.mul_vec(c))
    }

    /// Codebook membership: true iff `H · cᵀ = 0`.
    pub fn is_codeword(&self, c: &Codeword) -> Result<bool> {
        if c.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: c.len(),
            });
        }
        Ok(self
            .parity_check
            .rows()
            .iter()
            .all(|row| !row.dot(c.bits())))
    }

    /// Recover the information bits of a codeword (systematic prefix).
    pub fn info_bits(&self, c: &Codeword) -> InfoWord {
        InfoWord(c.bits().slice(0, self.k))
    }
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::InvalidDimensions { n, k });
    }
    Ok(())
}
