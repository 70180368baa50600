//! Recoil momentum of an atom absorbing one photon whose direction is
//! uniform over the forward hemisphere.
//!
//! The magnitude `k` is fixed; the direction is drawn uniformly in solid
//! angle over the 2π sr hemisphere about +z, i.e. `cos θ ~ U(0, 1]` and
//! `φ ~ U[0, 2π)`.
//!
//! Samples are generated in fixed-size blocks. Block `b` draws from a
//! ChaCha8 generator seeded with `seed` on stream `b`, and block statistics
//! are merged in block order, so results do not depend on the number of
//! worker threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

/// Samples per RNG stream.
pub const BLOCK_LEN: usize = 1 << 16;

/// Identifies the sampling scheme recorded in [`RecoilStats`].
pub const GENERATOR: &str = "chacha8/stream-per-65536-block";

/// Unit vector in the closed upper hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Direction {
    /// Direction with polar cosine `cos_theta` and azimuth `phi`.
    pub fn from_cos_phi(cos_theta: f64, phi: f64) -> Self {
        let sin_theta = ((1.0 - cos_theta) * (1.0 + cos_theta)).sqrt();
        let (s, c) = phi.sin_cos();
        Self {
            x: sin_theta * c,
            y: sin_theta * s,
            z: cos_theta,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scaled(&self, k: f64) -> [f64; 3] {
        [k * self.x, k * self.y, k * self.z]
    }
}

/// Draws one direction uniformly over the hemisphere's solid angle.
/// `cos θ` lies in `(0, 1]`, so exactly transverse directions never occur.
pub fn sample_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let cos_theta = 1.0 - rng.random::<f64>();
    let phi = TAU * rng.random::<f64>();
    Direction::from_cos_phi(cos_theta, phi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoilStats {
    pub n: u64,
    pub k: f64,
    pub mean_kx: f64,
    pub mean_ky: f64,
    pub mean_kz: f64,
    /// Sample standard deviation of `kz`; 0 when `n = 1`.
    pub std_kz: f64,
    pub seed: u64,
    pub generator: &'static str,
}

impl RecoilStats {
    /// Mean of `cos θ`, which is `mean_kz / k`.
    pub fn mean_cos_theta(&self) -> f64 {
        self.mean_kz / self.k
    }

    /// Sample variance of `cos θ`.
    pub fn var_cos_theta(&self) -> f64 {
        let s = self.std_kz / self.k;
        s * s
    }
}

/// Running mean and centred second moment for one coordinate.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1.0;
        let d = v - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockStats {
    x: Moments,
    y: Moments,
    z: Moments,
}

impl BlockStats {
    fn merge(self, other: Self) -> Self {
        Self {
            x: self.x.merge(other.x),
            y: self.y.merge(other.y),
            z: self.z.merge(other.z),
        }
    }
}

fn check_args(k: f64, n: u64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "wave-vector magnitude must be finite and positive, got {k}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Generator for stream `stream` of `seed`; block `b` of a run uses stream `b`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn block_len(n: u64, block: u64) -> usize {
    let start = block * BLOCK_LEN as u64;
    (n - start).min(BLOCK_LEN as u64) as usize
}

fn block_count(n: u64) -> u64 {
    n.div_ceil(BLOCK_LEN as u64)
}

/// Unit directions for samples `block·BLOCK_LEN ..`, in index order.
fn block_directions(seed: u64, n: u64, block: u64) -> impl Iterator<Item = Direction> {
    let mut rng = stream_rng(seed, block);
    (0..block_len(n, block)).map(move |_| sample_direction(&mut rng))
}

/// Calls `f` with every per-sample momentum `k × direction`, in index order.
pub fn for_each_momentum<F>(k: f64, n: u64, seed: u64, mut f: F) -> Result<()>
where
    F: FnMut([f64; 3]) -> std::io::Result<()>,
{
    check_args(k, n)?;
    for block in 0..block_count(n) {
        for d in block_directions(seed, n, block) {
            f(d.scaled(k)).map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    Ok(())
}

/// All per-sample momenta; the same draws that [`recoil_stats`] summarizes.
pub fn sample_momenta(k: f64, n: u64, seed: u64) -> Result<Vec<[f64; 3]>> {
    check_args(k, n)?;
    let blocks: Vec<Vec<[f64; 3]>> = (0..block_count(n))
        .into_par_iter()
        .map(|b| block_directions(seed, n, b).map(|d| d.scaled(k)).collect())
        .collect();
    Ok(blocks.into_iter().flatten().collect())
}

/// Mean and spread of the recoil momentum over `n` absorbed photons.
pub fn recoil_stats(k: f64, n: u64, seed: u64) -> Result<RecoilStats> {
    check_args(k, n)?;
    let per_block: Vec<BlockStats> = (0..block_count(n))
        .into_par_iter()
        .map(|b| {
            let mut s = BlockStats::default();
            for d in block_directions(seed, n, b) {
                s.x.push(d.x);
                s.y.push(d.y);
                s.z.push(d.z);
            }
            s
        })
        .collect();
    let total = per_block
        .into_iter()
        .fold(BlockStats::default(), BlockStats::merge);

    let std_z = if n > 1 {
        (total.z.m2 / (total.z.count - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(RecoilStats {
        n,
        k,
        mean_kx: k * total.x.mean,
        mean_ky: k * total.y.mean,
        mean_kz: k * total.z.mean,
        std_kz: k * std_z,
        seed,
        generator: GENERATOR,
    })
}
