//! Deterministic, seeded generation of test instances, plus an independent
//! 1-D convex-order oracle.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), which is
//! specified bit-for-bit across platforms. Each generated object reads from
//! its own stream of the configured seed, so a pair and a ρ drawn from the
//! same config never share random state:
//!
//! * stream 0 — the base measure μ,
//! * stream 1 — spread offsets and child weights,
//! * stream 2 — the mean-shift fallback of [`gen_unordered_pair`],
//! * stream 3 — [`gen_rho`].
//!
//! Identical configs therefore yield bit-identical measures; determinism, not
//! the specific generator, is the contract.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{BuildOptions, DiscreteMeasure, Point};
use crate::{Error, Result};

/// Cap on `atoms × spread_children`: generated measures stay desk scale.
pub const ATOM_BUDGET: usize = 10_000;

/// Configuration for the generators. `coordinate_scale` may be zero, which
/// degenerates every draw to the origin.
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub seed: u64,
    pub dimension: usize,
    pub atoms: usize,
    pub coordinate_scale: f64,
    pub spread_children: usize,
}

impl GenConfig {
    fn assert_valid(&self) {
        assert!(self.dimension >= 1, "dimension must be ≥ 1");
        assert!(self.atoms >= 1, "atoms must be ≥ 1");
        assert!(self.spread_children >= 1, "spread_children must be ≥ 1");
        assert!(
            self.coordinate_scale >= 0.0 && self.coordinate_scale.is_finite(),
            "coordinate_scale must be finite and ≥ 0"
        );
        assert!(
            self.atoms * self.spread_children <= ATOM_BUDGET,
            "atoms × spread_children exceeds the {ATOM_BUDGET} budget"
        );
    }

    fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Point {
    let coords = (0..dim)
        .map(|_| {
            if scale == 0.0 {
                0.0
            } else {
                rng.gen_range(-scale..=scale)
            }
        })
        .collect();
    Point::new(coords).expect("generated coordinates are finite")
}

fn random_measure(rng: &mut ChaCha8Rng, dim: usize, atoms: usize, scale: f64) -> DiscreteMeasure {
    let points = (0..atoms).map(|_| random_point(rng, dim, scale)).collect();
    // Weights bounded away from zero keep the downstream LPs well scaled.
    let weights = (0..atoms).map(|_| rng.gen_range(0.2..1.0)).collect();
    DiscreteMeasure::build(
        points,
        weights,
        BuildOptions {
            normalize: true,
            merge_tol: 0.0,
        },
    )
    .expect("generated atoms always form a valid measure")
}

/// Draw a pair `μ ≤c ν` by construction: every atom of μ is split across
/// `spread_children` offsets recentered to conditional mean zero, so ν is a
/// mean-preserving spread of μ and the construction itself is a martingale
/// coupling. With `spread_children = 1` the spread is degenerate and ν = μ.
pub fn gen_ordered_pair(cfg: &GenConfig) -> (DiscreteMeasure, DiscreteMeasure) {
    cfg.assert_valid();
    let mu = random_measure(
        &mut cfg.stream(0),
        cfg.dimension,
        cfg.atoms,
        cfg.coordinate_scale,
    );

    let mut rng = cfg.stream(1);
    let c = cfg.spread_children;
    let d = cfg.dimension;
    let mut points = Vec::with_capacity(mu.len() * c);
    let mut weights = Vec::with_capacity(mu.len() * c);
    for (x, &w) in mu.points().iter().zip(mu.weights()) {
        let mut offsets: Vec<Vec<f64>> = (0..c)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        if cfg.coordinate_scale == 0.0 {
                            0.0
                        } else {
                            rng.gen_range(-0.5 * cfg.coordinate_scale..=0.5 * cfg.coordinate_scale)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut q: Vec<f64> = (0..c).map(|_| rng.gen_range(0.2..1.0)).collect();
        let qs: f64 = q.iter().sum();
        q.iter_mut().for_each(|v| *v /= qs);

        // Exact recentering: subtract the weighted child mean coordinatewise.
        for t in 0..d {
            let mbar: f64 = q.iter().zip(&offsets).map(|(ql, o)| ql * o[t]).sum();
            for o in &mut offsets {
                o[t] -= mbar;
            }
        }
        debug_assert!({
            let residual = (0..d)
                .map(|t| {
                    q.iter()
                        .zip(&offsets)
                        .map(|(ql, o)| ql * o[t])
                        .sum::<f64>()
                        .abs()
                })
                .fold(0.0f64, f64::max);
            residual <= 1e-12 * (1.0 + cfg.coordinate_scale)
        });

        for (o, ql) in offsets.iter().zip(&q) {
            let child: Vec<f64> = x.coords().iter().zip(o).map(|(a, b)| a + b).collect();
            points.push(Point::new(child).expect("child coordinates are finite"));
            weights.push(w * ql);
        }
    }
    let nu = DiscreteMeasure::build(
        points,
        weights,
        BuildOptions {
            normalize: true,
            merge_tol: 0.0,
        },
    )
    .expect("spread atoms always form a valid measure");
    (mu, nu)
}

/// Draw a pair with `μ ≰c ν`.
///
/// Generates an ordered pair and returns it swapped: reversing a strict
/// mean-preserving spread always breaks the order because second moments
/// strictly decrease. When the spread is degenerate (ν = μ) the fallback is a
/// mean-shifted copy, which is incomparable to μ in either direction.
pub fn gen_unordered_pair(cfg: &GenConfig) -> (DiscreteMeasure, DiscreteMeasure) {
    let (mu, nu) = gen_ordered_pair(cfg);
    let strict = nu.second_moment() - mu.second_moment() > 1e-9 * (1.0 + mu.second_moment());
    if strict {
        return (nu, mu);
    }
    let mut rng = cfg.stream(2);
    let step = cfg.coordinate_scale.max(1.0);
    let shift: Vec<f64> = (0..cfg.dimension)
        .map(|_| rng.gen_range(0.5..1.0) * step)
        .collect();
    let shifted_points: Vec<Point> = mu
        .points()
        .iter()
        .map(|p| {
            Point::new(p.coords().iter().zip(&shift).map(|(a, b)| a + b).collect())
                .expect("shifted coordinates are finite")
        })
        .collect();
    let shifted = DiscreteMeasure::new(shifted_points, mu.weights().to_vec())
        .expect("translation preserves measure validity");
    (mu, shifted)
}

/// Draw a random measure with `atoms` atoms in `[−scale, scale]ᵈ`.
pub fn gen_rho(cfg: &GenConfig) -> DiscreteMeasure {
    cfg.assert_valid();
    random_measure(
        &mut cfg.stream(3),
        cfg.dimension,
        cfg.atoms,
        cfg.coordinate_scale,
    )
}

/// Complete 1-D criterion for `μ ≤c ν` on finite support: equal means and
/// pointwise-dominated potential functions `U_θ(t) = ∫|t − x| θ(dx)`.
///
/// `U` is piecewise linear with kinks exactly at the atoms, so comparing on
/// `supp(μ) ∪ supp(ν)` suffices. Independent of the LP route in
/// [`crate::order`]; used to cross-validate it.
pub fn convex_order_1d_oracle(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<bool> {
    for m in [mu, nu] {
        if m.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: m.dim(),
            });
        }
    }
    let mean_gap = (mu.mean().coords()[0] - nu.mean().coords()[0]).abs();
    if mean_gap > 1e-10 {
        return Ok(false);
    }
    let potential = |theta: &DiscreteMeasure, t: f64| -> f64 {
        theta
            .points()
            .iter()
            .zip(theta.weights())
            .map(|(x, w)| w * (t - x.coords()[0]).abs())
            .sum()
    };
    let kinks = mu
        .points()
        .iter()
        .chain(nu.points())
        .map(|p| p.coords()[0]);
    for t in kinks {
        if potential(mu, t) > potential(nu, t) + 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64) -> GenConfig {
        GenConfig {
            seed,
            dimension: 2,
            atoms: 3,
            coordinate_scale: 1.5,
            spread_children: 3,
        }
    }

    #[test]
    fn identical_configs_yield_bit_identical_measures() {
        let a = gen_ordered_pair(&cfg(42));
        let b = gen_ordered_pair(&cfg(42));
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert_eq!(gen_rho(&cfg(42)), gen_rho(&cfg(42)));
        assert_ne!(gen_rho(&cfg(42)), gen_rho(&cfg(43)));
    }

    #[test]
    fn degenerate_spread_returns_mu_itself() {
        let mut c = cfg(7);
        c.spread_children = 1;
        let (mu, nu) = gen_ordered_pair(&c);
        assert_eq!(mu, nu);
    }

    #[test]
    fn spreads_preserve_means_and_grow_second_moments() {
        for seed in 0..20 {
            let (mu, nu) = gen_ordered_pair(&cfg(seed));
            assert!(mu.mean().inf_dist(&nu.mean()) <= 1e-12 * (1.0 + 1.5));
            assert!(mu.second_moment() <= nu.second_moment() + 1e-12);
        }
    }

    #[test]
    fn unordered_pairs_fall_back_to_mean_shift_when_degenerate() {
        let mut c = cfg(9);
        c.spread_children = 1;
        let (mu, other) = gen_unordered_pair(&c);
        assert!(mu.mean().inf_dist(&other.mean()) > 1e-3);
    }

    #[test]
    fn zero_scale_degenerates_to_origin_dirac() {
        let c = GenConfig {
            seed: 1,
            dimension: 3,
            atoms: 4,
            coordinate_scale: 0.0,
            spread_children: 1,
        };
        let rho = gen_rho(&c);
        assert_eq!(rho.len(), 1);
        assert_eq!(rho.point(0).coords(), &[0.0, 0.0, 0.0]);

        let single = GenConfig {
            atoms: 1,
            ..cfg(5)
        };
        assert_eq!(gen_rho(&single).len(), 1);
    }

    #[test]
    #[should_panic(expected = "budget")]
    fn atom_budget_is_enforced() {
        let c = GenConfig {
            seed: 0,
            dimension: 1,
            atoms: 5000,
            coordinate_scale: 1.0,
            spread_children: 3,
        };
        let _ = gen_ordered_pair(&c);
    }

    #[test]
    fn oracle_trivial_cases() {
        let mu = DiscreteMeasure::from_coords(1, &[&[0.0]], &[1.0]).unwrap();
        let nu = DiscreteMeasure::from_coords(1, &[&[-1.0], &[1.0]], &[0.5, 0.5]).unwrap();
        assert!(convex_order_1d_oracle(&mu, &nu).unwrap());
        assert!(!convex_order_1d_oracle(&nu, &mu).unwrap());

        let shifted = DiscreteMeasure::from_coords(1, &[&[1.0]], &[1.0]).unwrap();
        assert!(!convex_order_1d_oracle(&mu, &shifted).unwrap());

        let planar = DiscreteMeasure::from_coords(2, &[&[0.0, 0.0]], &[1.0]).unwrap();
        assert!(convex_order_1d_oracle(&planar, &planar).is_err());
    }

    #[test]
    fn oracle_agrees_with_construction() {
        for seed in 0..30 {
            let c = GenConfig {
                seed,
                dimension: 1,
                atoms: 4,
                coordinate_scale: 2.0,
                spread_children: 2,
            };
            let (mu, nu) = gen_ordered_pair(&c);
            assert!(convex_order_1d_oracle(&mu, &nu).unwrap(), "seed {seed}");
            let (a, b) = gen_unordered_pair(&c);
            assert!(!convex_order_1d_oracle(&a, &b).unwrap(), "seed {seed}");
        }
    }
}
