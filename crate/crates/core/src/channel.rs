//! BPSK mapping and the complex Gauss-Markov (AR(1)) noise channel.
//!
//! Calibration: symbols have unit energy and the per-real-dimension noise
//! variance at a given Eb/N0 is `1 / (2 · R · m_s · 10^{Eb/N0 / 10})`.
//! Entropy values are in nats per real noise component.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::codes::Codeword;
use crate::error::{Error, Result};

/// Largest correlation accepted from experiment configuration.
pub const MAX_CONFIG_RHO: f64 = 0.999;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    #[default]
    Bpsk,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Bpsk => 1,
        }
    }

    pub fn constellation_size(self) -> usize {
        1 << self.bits_per_symbol()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolVector {
    pub values: Vec<Complex64>,
    pub modulation: Modulation,
}

impl SymbolVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedSignal {
    pub values: Vec<Complex64>,
}

impl ReceivedSignal {
    pub fn new(values: Vec<Complex64>) -> Self {
        ReceivedSignal { values }
    }

    /// Real-valued samples on the in-phase axis.
    pub fn from_real(values: &[f64]) -> Self {
        ReceivedSignal {
            values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// BPSK level for a bit: 0 → +1, 1 → −1.
#[inline]
pub fn bpsk_level(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// Map bit 0 to +1 and bit 1 to −1 on the real axis.
pub fn modulate_bpsk(c: &Codeword) -> SymbolVector {
    SymbolVector {
        values: c
            .bits()
            .iter()
            .map(|b| Complex64::new(bpsk_level(b), 0.0))
            .collect(),
        modulation: Modulation::Bpsk,
    }
}

/// Symbol-wise hard decision: negative real part → bit 1.
pub fn demap_bpsk(values: &[Complex64]) -> Codeword {
    let mut bits = BitVec::zeros(values.len());
    for (i, v) in values.iter().enumerate() {
        if v.re < 0.0 {
            bits.set(i, true);
        }
    }
    Codeword::new(bits)
}

/// Per-real-dimension noise variance for a given Eb/N0 in dB.
pub fn ebno_to_sigma2(ebno_db: f64, rate: f64, bits_per_symbol: usize) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidChannel(format!(
            "code rate must be in (0, 1], got {rate}"
        )));
    }
    if bits_per_symbol == 0 {
        return Err(Error::InvalidChannel("zero bits per symbol".into()));
    }
    if ebno_db.is_nan() || ebno_db == f64::NEG_INFINITY {
        return Err(Error::InvalidChannel(format!("Eb/N0 {ebno_db} dB")));
    }
    let ebno = 10f64.powf(ebno_db / 10.0);
    Ok(1.0 / (2.0 * rate * bits_per_symbol as f64 * ebno))
}

/// Stationary complex AR(1) noise with common correlation on both components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussMarkovChannel {
    rho: f64,
    sigma2_real: f64,
}

impl GaussMarkovChannel {
    pub fn new(rho: f64, sigma2_real: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidChannel(format!(
                "rho must lie in [0, 1), got {rho}"
            )));
        }
        if !(sigma2_real > 0.0 && sigma2_real.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "noise variance must be positive and finite, got {sigma2_real}"
            )));
        }
        Ok(GaussMarkovChannel { rho, sigma2_real })
    }

    pub fn from_ebno(rho: f64, ebno_db: f64, rate: f64, modulation: Modulation) -> Result<Self> {
        Self::new(
            rho,
            ebno_to_sigma2(ebno_db, rate, modulation.bits_per_symbol())?,
        )
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sigma2_real(&self) -> f64 {
        self.sigma2_real
    }

    /// One real AR(1) path of length `n`, started from the stationary law.
    pub fn real_path<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let sigma = self.sigma2_real.sqrt();
        let innovation = (1.0 - self.rho * self.rho).sqrt() * sigma;
        let mut out = Vec::with_capacity(n);
        let mut prev = 0.0;
        for t in 0..n {
            let w: f64 = rng.sample(StandardNormal);
            prev = if t == 0 {
                sigma * w
            } else {
                self.rho * prev + innovation * w
            };
            out.push(prev);
        }
        out
    }
}

/// Complex noise whose real and imaginary parts are independent AR(1) paths.
pub fn gm_noise<R: Rng + ?Sized>(
    n_s: usize,
    channel: &GaussMarkovChannel,
    rng: &mut R,
) -> Vec<Complex64> {
    let re = channel.real_path(n_s, rng);
    let im = channel.real_path(n_s, rng);
    re.into_iter()
        .zip(im)
        .map(|(a, b)| Complex64::new(a, b))
        .collect()
}

/// `Y = x + N` (identity channel matrix).
pub fn transmit<R: Rng + ?Sized>(
    x: &SymbolVector,
    channel: &GaussMarkovChannel,
    rng: &mut R,
) -> ReceivedSignal {
    let noise = gm_noise(x.len(), channel, rng);
    ReceivedSignal {
        values: x.values.iter().zip(noise).map(|(s, n)| s + n).collect(),
    }
}

/// Covariance of `b` consecutive noise samples on one real component.
#[derive(Clone, Debug)]
pub struct BlockCovariance {
    pub b: usize,
    pub matrix: DMatrix<f64>,
    pub precision: DMatrix<f64>,
    pub log_det: f64,
}

pub fn block_covariance(b: usize, channel: &GaussMarkovChannel) -> Result<BlockCovariance> {
    if b < 1 {
        return Err(Error::InvalidChannel(
            "block size must be at least 1".into(),
        ));
    }
    let matrix = DMatrix::from_fn(b, b, |i, j| {
        channel.sigma2_real * channel.rho.powi(i.abs_diff(j) as i32)
    });
    let chol = matrix
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidChannel("block covariance is not positive definite".into()))?;
    let log_det = 2.0
        * chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>();
    let precision = chol.inverse();
    Ok(BlockCovariance {
        b,
        matrix,
        precision,
        log_det,
    })
}

fn entropy_with_multiplier(multiplier: f64, channel: &GaussMarkovChannel) -> f64 {
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    0.5 * two_pi_e.ln()
        + 0.5 * channel.sigma2_real.ln()
        + 0.5 * multiplier * (1.0 - channel.rho * channel.rho).ln()
}

/// Normalised differential entropy rate (nats per sample) of `n` consecutive
/// samples of one real noise component.
pub fn entropy_rate(n: usize, channel: &GaussMarkovChannel) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidChannel("length must be at least 1".into()));
    }
    Ok(entropy_with_multiplier(1.0 - 1.0 / n as f64, channel))
}

/// Entropy rate when the noise is treated as independent across blocks of `b`.
pub fn block_entropy_rate(b: usize, channel: &GaussMarkovChannel) -> Result<f64> {
    if b < 1 {
        return Err(Error::InvalidChannel(
            "block size must be at least 1".into(),
        ));
    }
    Ok(entropy_with_multiplier(1.0 - 1.0 / b as f64, channel))
}

/// Entropy rate of a fully correlated (n → ∞) channel.
pub fn asymptotic_entropy_rate(channel: &GaussMarkovChannel) -> f64 {
    entropy_with_multiplier(1.0, channel)
}
