//! Seeded families of band-limited circle maps used by the test suites and
//! the command-line gallery.

use std::f64::consts::TAU;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle_map::CircleMap;
use crate::error::Result;
use crate::synthesis::ScrewData;

pub const CORPUS_DEGREES: [i64; 5] = [-2, -1, 1, 2, 3];
pub const MAX_HARMONICS: usize = 5;
pub const MAX_FREQUENCY: u32 = 5;
pub const MAX_AMPLITUDE: f64 = 4.0;

/// `amplitude · sin(frequency · z + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub amplitude: f64,
    pub frequency: u32,
    pub phase: f64,
}

/// `θ(z) = degree · z + Σ harmonics`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLimited {
    pub degree: i64,
    pub harmonics: Vec<Harmonic>,
}

impl BandLimited {
    pub fn value(&self, z: f64) -> f64 {
        self.degree as f64 * z
            + self
                .harmonics
                .iter()
                .map(|h| h.amplitude * (h.frequency as f64 * z + h.phase).sin())
                .sum::<f64>()
    }

    pub fn derivative(&self, z: f64) -> f64 {
        self.degree as f64
            + self
                .harmonics
                .iter()
                .map(|h| {
                    h.amplitude * h.frequency as f64 * (h.frequency as f64 * z + h.phase).cos()
                })
                .sum::<f64>()
    }

    /// Periodic samples plus the degree term; exact at the endpoint.
    pub fn sample(&self, n: usize) -> Result<CircleMap> {
        let h = TAU / n as f64;
        let periodic: Vec<f64> = (0..n)
            .map(|j| self.value(h * j as f64) - self.degree as f64 * h * j as f64)
            .collect();
        CircleMap::from_periodic(self.degree, &periodic)
    }

    /// The map written in the `z + c*sin(k*z + p)` expression syntax.
    pub fn expression(&self) -> String {
        let mut s = format!("{}*z", self.degree);
        for h in &self.harmonics {
            let sign = if h.amplitude < 0.0 { '-' } else { '+' };
            let psign = if h.phase < 0.0 { '-' } else { '+' };
            s.push_str(&format!(
                " {sign} {:?}*sin({}*z {psign} {:?})",
                h.amplitude.abs(),
                h.frequency,
                h.phase.abs()
            ));
        }
        s
    }
}

fn random_harmonic<R: Rng>(rng: &mut R, frequencies: &[u32], max_amplitude: f64) -> Harmonic {
    let u: f64 = rng.gen();
    Harmonic {
        amplitude: max_amplitude * u * u,
        frequency: frequencies[rng.gen_range(0..frequencies.len())],
        phase: rng.gen_range(0.0..TAU),
    }
}

/// `count` maps with degrees drawn from [`CORPUS_DEGREES`], up to
/// [`MAX_HARMONICS`] harmonics of frequency `1..=5` and amplitude at most 4.
pub fn random_corpus(seed: u64, count: usize) -> Vec<BandLimited> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frequencies: Vec<u32> = (1..=MAX_FREQUENCY).collect();
    (0..count)
        .map(|_| {
            let degree = CORPUS_DEGREES[rng.gen_range(0..CORPUS_DEGREES.len())];
            let k = rng.gen_range(0..=MAX_HARMONICS);
            BandLimited {
                degree,
                harmonics: (0..k)
                    .map(|_| random_harmonic(&mut rng, &frequencies, MAX_AMPLITUDE))
                    .collect(),
            }
        })
        .collect()
}

/// A map invariant under the screw of order `order` together with that screw.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivariantCase {
    pub theta: BandLimited,
    pub screw: ScrewData,
}

/// Maps whose periodic part only carries frequencies divisible by `order`,
/// paired with the rotation `2π·deg/order` they are equivariant under.
pub fn equivariant_corpus(
    seed: u64,
    order: usize,
    count: usize,
    max_amplitude: f64,
) -> Result<Vec<EquivariantCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((order as u64) << 32));
    let frequencies: Vec<u32> = (1..=2).map(|k| k * order as u32).collect();
    (0..count)
        .map(|_| {
            let degree = CORPUS_DEGREES[rng.gen_range(0..CORPUS_DEGREES.len())];
            let k = rng.gen_range(1..=3);
            let theta = BandLimited {
                degree,
                harmonics: (0..k)
                    .map(|_| random_harmonic(&mut rng, &frequencies, max_amplitude))
                    .collect(),
            };
            let screw = ScrewData::standard(order, TAU * degree as f64 / order as f64)?;
            Ok(EquivariantCase { theta, screw })
        })
        .collect()
}
