//! Seedable random primitives: binomial, multinomial and uniform subset draws.
//!
//! Every stream is a ChaCha8 keystream addressed by `(seed, stream_id)`, so a
//! stream's draws do not depend on which thread consumes it or in what order
//! other streams are consumed. Substreams fold an index into the parent's
//! stream id.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Largest `m * -ln(1 - p)` used in a single inversion run; keeps `(1-p)^m`
/// well above the smallest normal `f64`.
const MAX_LOG_MASS: f64 = 600.0;

const SUM_TOLERANCE: f64 = 1e-9;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream under the same seed, independent of this stream's
    /// position.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream::new(self.seed, splitmix64(splitmix64(self.stream_id) ^ index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-and-reject).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let mut m = u128::from(self.next_u64()) * u128::from(bound);
        if (m as u64) < bound {
            let threshold = bound.wrapping_neg() % bound;
            while (m as u64) < threshold {
                m = u128::from(self.next_u64()) * u128::from(bound);
            }
        }
        (m >> 64) as u64
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!(
            "success probability {p} is not in [0, 1]"
        )));
    }
    Ok(())
}

/// Draws from Binomial(n, p).
///
/// Sequential inverse-CDF search on the smaller tail (`p <= 1/2`, by
/// symmetry). Large `n` is split into chunks whose zero-success probability
/// stays representable, and the chunk results are summed; a sum of
/// independent binomials with a shared `p` is again binomial, so the draw is
/// exact. Cost is O(n * min(p, 1-p)).
pub fn draw_binomial(rng: &mut RngStream, n: u64, p: f64) -> Result<u64> {
    check_probability(p)?;
    if n == 0 || p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(n);
    }
    if p > 0.5 {
        return Ok(n - binomial_lower_half(rng, n, 1.0 - p));
    }
    Ok(binomial_lower_half(rng, n, p))
}

fn binomial_lower_half(rng: &mut RngStream, n: u64, p: f64) -> u64 {
    let log_q = (-p).ln_1p();
    let odds = p / (1.0 - p);
    let chunk = ((MAX_LOG_MASS / -log_q).floor() as u64).max(1);
    let mut remaining = n;
    let mut successes = 0;
    while remaining > 0 {
        let m = remaining.min(chunk);
        remaining -= m;
        let u = rng.uniform();
        let mut pmf = (m as f64 * log_q).exp();
        let mut cdf = pmf;
        let mut k = 0;
        while u >= cdf && k < m {
            pmf *= odds * (m - k) as f64 / (k + 1) as f64;
            k += 1;
            cdf += pmf;
        }
        successes += k;
    }
    successes
}

/// Draws category counts from Multinomial(n, probs) as a chain of
/// conditional binomials. Zero-probability cells always receive 0 and the
/// counts always sum to `n`.
pub fn draw_multinomial(rng: &mut RngStream, n: u64, probs: &[f64]) -> Result<Vec<u64>> {
    if let Some(p) = probs.iter().find(|p| p.is_nan() || **p < 0.0) {
        return Err(Error::Parameter(format!(
            "negative or NaN cell probability {p}"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Parameter(format!(
            "cell probabilities sum to {total}, expected 1"
        )));
    }
    let mut counts = vec![0; probs.len()];
    let Some(last) = probs.iter().rposition(|p| *p > 0.0) else {
        return Ok(counts);
    };
    let mut left = n;
    let mut mass = total;
    for (i, &p) in probs.iter().enumerate().take(last) {
        if left == 0 {
            break;
        }
        if p == 0.0 {
            continue;
        }
        let conditional = (p / mass).clamp(0.0, 1.0);
        let k = draw_binomial(rng, left, conditional)?;
        counts[i] = k;
        left -= k;
        mass -= p;
    }
    counts[last] = left;
    Ok(counts)
}

/// Selects `k` distinct elements of `pool` uniformly without replacement
/// (partial Fisher-Yates). The result is sorted.
pub fn draw_subset(rng: &mut RngStream, pool: &[u32], k: usize) -> Result<Vec<u32>> {
    if k > pool.len() {
        return Err(Error::Parameter(format!(
            "cannot draw {k} items from a pool of {}",
            pool.len()
        )));
    }
    let mut items = pool.to_vec();
    for i in 0..k {
        let j = i + rng.below((items.len() - i) as u64) as usize;
        items.swap(i, j);
    }
    items.truncate(k);
    items.sort_unstable();
    Ok(items)
}
