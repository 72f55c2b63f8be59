//! Unknown-system models and excitation / noise generation.
//!
//! Every random stream is drawn from ChaCha8 seeded with `seed_from_u64`
//! and a fixed stream id per purpose, so a `(seed, purpose)` pair always
//! yields the same samples on every platform: input samples use stream
//! [`INPUT_STREAM`], additive noise [`NOISE_STREAM`] and synthetic channels
//! [`CHANNEL_STREAM`].

mod impulse;
mod signal;

pub use impulse::{
    load_impulse_response, pad_and_shift, synth_sparse_channel, write_impulse_response,
    ImpulseResponse,
};
pub use signal::{
    add_noise, convolve, desired_signal, generate_input, pcm_load, sample_variance, Desired,
    NoiseModel, SignalKind, SignalSpec, DEFAULT_WARMUP,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const INPUT_STREAM: u64 = 0;
pub const NOISE_STREAM: u64 = 1;
pub const CHANNEL_STREAM: u64 = 2;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
