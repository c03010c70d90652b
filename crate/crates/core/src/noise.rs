//! Attribute corruption.
//!
//! Populations are corrupted exactly, as the mixture over flip patterns of the
//! clean population with the pattern applied. Samples are corrupted by drawing
//! the flips, one independent RNG stream per point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{BinaryPoint, NoiseSpec, PopulationDistribution, SampleDataset};

/// Largest dimension for which the exact Asy-In mixture (2^n patterns) is built.
pub const MAX_EXACT_ASY_IN_DIM: usize = 20;

/// One way of flipping the attributes of a point, with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipPattern {
    pub mask: Vec<bool>,
    pub weight: f64,
}

/// All flip patterns of `spec` on `n` attributes, including zero-weight ones.
///
/// Sy-De has exactly two: nothing flips (`1 - p`) or everything flips (`p`).
/// Asy-In has `2^n`, weighted by the product of per-attribute marginals.
pub fn flip_patterns(spec: &NoiseSpec, n: usize) -> Result<Vec<FlipPattern>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    spec.check_dim(n)?;
    match spec {
        NoiseSpec::SyDe { p } => Ok(vec![
            FlipPattern { mask: vec![false; n], weight: 1.0 - p },
            FlipPattern { mask: vec![true; n], weight: *p },
        ]),
        NoiseSpec::AsyIn { ps } => {
            if n > MAX_EXACT_ASY_IN_DIM {
                return Err(Error::TooManyAttributes(n));
            }
            let patterns = (0u32..1 << n)
                .map(|bits| {
                    let mask: Vec<bool> = (0..n).map(|j| bits >> j & 1 == 1).collect();
                    let weight = mask
                        .iter()
                        .zip(ps)
                        .map(|(&flip, &p)| if flip { p } else { 1.0 - p })
                        .product();
                    FlipPattern { mask, weight }
                })
                .collect();
            Ok(patterns)
        }
    }
}

/// The corrupted distribution: `sum over patterns of weight(pattern) * (d with
/// pattern applied)`. Labels are never touched; colliding atoms merge.
pub fn corrupt_population(d: &PopulationDistribution, spec: &NoiseSpec) -> Result<PopulationDistribution> {
    let patterns = flip_patterns(spec, d.dim())?;
    let mixture = patterns
        .iter()
        .filter(|pat| pat.weight > 0.0)
        .flat_map(|pat| {
            d.atoms()
                .iter()
                .map(move |a| (a.point.flipped(&pat.mask), pat.weight * a.weight))
        });
    PopulationDistribution::from_weighted_points(mixture)
}

/// Draws a corrupted copy of `s`.
///
/// Point `k` uses its own stream seeded with `seed + k`, so its corruption does
/// not depend on the rest of the dataset.
pub fn corrupt_sample(s: &SampleDataset, spec: &NoiseSpec, seed: u64) -> Result<SampleDataset> {
    spec.check_dim(s.dim())?;
    let points = s
        .points()
        .iter()
        .enumerate()
        .map(|(k, point)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            corrupt_point(point, spec, &mut rng)
        })
        .collect();
    s.with_points(points)
}

fn corrupt_point<R: Rng>(point: &BinaryPoint, spec: &NoiseSpec, rng: &mut R) -> BinaryPoint {
    match spec {
        NoiseSpec::SyDe { p } => {
            if rng.random::<f64>() < *p {
                point.negated()
            } else {
                point.clone()
            }
        }
        NoiseSpec::AsyIn { ps } => {
            let mask: Vec<bool> = ps.iter().map(|p| rng.random::<f64>() < *p).collect();
            point.flipped(&mask)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Provenance;

    fn example_one() -> PopulationDistribution {
        PopulationDistribution::new(vec![(vec![-1], 1, 0.25), (vec![1], -1, 0.75)]).unwrap()
    }

    fn example_two() -> PopulationDistribution {
        PopulationDistribution::new(vec![
            (vec![-1, 1], 1, 0.25),
            (vec![-1, -1], -1, 0.5),
            (vec![1, -1], 1, 0.25),
        ])
        .unwrap()
    }

    #[test]
    fn example_one_sy_de_mixture() {
        // (1 - 0.4) * D + 0.4 * flip(D), worked by hand.
        let noisy = corrupt_population(&example_one(), &NoiseSpec::sy_de(0.4).unwrap()).unwrap();
        assert_eq!(noisy.len(), 4);
        let expect = [([-1], 1, 0.15), ([1], 1, 0.10), ([1], -1, 0.45), ([-1], -1, 0.30)];
        for (x, y, w) in expect {
            assert!((noisy.weight_of(&x, y) - w).abs() < 1e-15, "{x:?},{y}");
        }
    }

    #[test]
    fn zero_noise_is_identity() {
        let d = example_two();
        assert_eq!(corrupt_population(&d, &NoiseSpec::sy_de(0.0).unwrap()).unwrap(), d);
        assert_eq!(corrupt_population(&d, &NoiseSpec::asy_in(vec![0.0, 0.0]).unwrap()).unwrap(), d);
    }

    #[test]
    fn example_two_asy_in_pattern_weights() {
        let pats = flip_patterns(&NoiseSpec::asy_in(vec![0.1, 0.2]).unwrap(), 2).unwrap();
        let w = |m: [bool; 2]| pats.iter().find(|p| p.mask == m).unwrap().weight;
        assert!((w([false, false]) - 0.72).abs() < 1e-15);
        assert!((w([true, true]) - 0.02).abs() < 1e-15);
        assert!((w([false, true]) - 0.18).abs() < 1e-15);
        assert!((w([true, false]) - 0.08).abs() < 1e-15);
        // 3 atoms x 4 patterns, all distinct after flipping since labels differ.
        let noisy = corrupt_population(&example_two(), &NoiseSpec::asy_in(vec![0.1, 0.2]).unwrap()).unwrap();
        assert!(noisy.len() <= 12);
        assert!((noisy.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sy_de_is_an_involution_at_one() {
        let d = example_two();
        let s = NoiseSpec::sy_de(1.0).unwrap();
        let twice = corrupt_population(&corrupt_population(&d, &s).unwrap(), &s).unwrap();
        assert_eq!(twice, d);
    }

    #[test]
    fn asy_in_refuses_large_dimensions() {
        let d = PopulationDistribution::new(vec![(vec![1; 21], 1, 1.0)]).unwrap();
        let spec = NoiseSpec::asy_in(vec![0.1; 21]).unwrap();
        assert!(matches!(corrupt_population(&d, &spec), Err(Error::TooManyAttributes(21))));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let spec = NoiseSpec::asy_in(vec![0.1, 0.2, 0.3]).unwrap();
        assert!(matches!(
            corrupt_population(&example_two(), &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn sample(m: usize, n: usize) -> SampleDataset {
        let points = (0..m)
            .map(|k| {
                let x = (0..n).map(|j| if (k >> j) & 1 == 1 { 1 } else { -1 }).collect();
                BinaryPoint::new(x, if k % 3 == 0 { 1 } else { -1 }).unwrap()
            })
            .collect();
        SampleDataset::new(points, Provenance::new("synthetic", "test")).unwrap()
    }

    #[test]
    fn sample_corruption_extremes() {
        let s = sample(50, 4);
        assert_eq!(corrupt_sample(&s, &NoiseSpec::sy_de(0.0).unwrap(), 7).unwrap(), s);
        let all = corrupt_sample(&s, &NoiseSpec::sy_de(1.0).unwrap(), 7).unwrap();
        for (a, b) in s.points().iter().zip(all.points()) {
            assert_eq!(a.label(), b.label());
            assert!(a.features().iter().zip(b.features()).all(|(u, v)| *u == -*v));
        }
    }

    #[test]
    fn sample_corruption_rate_concentrates() {
        let s = sample(10_000, 3);
        let noisy = corrupt_sample(&s, &NoiseSpec::sy_de(0.3).unwrap(), 12345).unwrap();
        let flipped = s
            .points()
            .iter()
            .zip(noisy.points())
            .filter(|(a, b)| a.features() != b.features())
            .count();
        let frac = flipped as f64 / 10_000.0;
        assert!((0.28..=0.32).contains(&frac), "{frac}");
    }

    #[test]
    fn sample_corruption_is_seeded() {
        let s = sample(200, 5);
        let spec = NoiseSpec::asy_in(vec![0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        let a = corrupt_sample(&s, &spec, 99).unwrap();
        let b = corrupt_sample(&s, &spec, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, corrupt_sample(&s, &spec, 100).unwrap());
    }

    #[test]
    fn point_streams_do_not_depend_on_other_points() {
        let s = sample(20, 3);
        let spec = NoiseSpec::sy_de(0.5).unwrap();
        let full = corrupt_sample(&s, &spec, 5).unwrap();
        // Dropping the first point shifts every stream by one.
        let tail = s.with_points(s.points()[1..].to_vec()).unwrap();
        let shifted = corrupt_sample(&tail, &spec, 6).unwrap();
        assert_eq!(&full.points()[1..], shifted.points());
    }
}
