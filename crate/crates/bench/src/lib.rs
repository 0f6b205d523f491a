//! Shared fixtures for the criterion benchmarks.

use orbai_core::{
    modulate_bpsk, transmit, GaussMarkovChannel, InfoWord, LinearCode, Modulation, ReceivedSignal,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Received words for a fixed code and channel, drawn from a fixed seed.
pub fn received_words(
    code: &LinearCode,
    rho: f64,
    ebno_db: f64,
    count: usize,
    seed: u64,
) -> (GaussMarkovChannel, Vec<ReceivedSignal>) {
    let channel = GaussMarkovChannel::from_ebno(rho, ebno_db, code.rate(), Modulation::Bpsk)
        .expect("valid channel");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = (0..count)
        .map(|_| {
            let c = code
                .encode(&InfoWord::random(code.k(), &mut rng))
                .expect("k-bit word");
            transmit(&modulate_bpsk(&c), &channel, &mut rng)
        })
        .collect();
    (channel, words)
}
