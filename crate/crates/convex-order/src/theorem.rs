//! Numerical enactment of the W₂ characterisation of convex order.
//!
//! For measures μ, ν with finite second moment, `μ ≤c ν` is equivalent to
//!
//! ```text
//! W₂²(ν, ρ) − W₂²(μ, ρ) ≤ ∫|x|² dν − ∫|x|² dμ     for every ρ.
//! ```
//!
//! [`inequality_gap`] evaluates the inequality for one ρ; its `slack` is
//! nonnegative exactly when the inequality holds there.
//!
//! **Forward direction.** Given a martingale coupling π^M of (μ, ν) and an
//! optimal plan π* ∈ Π*(μ, ρ), the conditionally independent product glues
//! them into a joint law of (X, Y, Z) with (X, Y) ~ π^M and (X, Z) ~ π*. The
//! martingale property makes Y − X orthogonal to X − Z, which yields the
//! Pythagoras identity `E|Y−Z|² = E|X−Y|² + E|X−Z|²`, the moment identity
//! `E|X−Y|² = E|Y|² − E|X|²`, and — since the (Y, Z)-marginal couples ν and
//! ρ — the bound `W₂²(ν,ρ) ≤ E|Y−Z|²`. Chaining them gives `slack ≥ 0`.
//! [`glue_and_verify`] performs the construction and asserts every link.
//!
//! **Reverse direction.** If the order fails, a witness f with gap
//! `∫f dμ − ∫f dν > 0` exists, and pushing μ forward through a subgradient
//! selection ∇f produces the adversarial measure ρ = ∇f♯μ. Because (id, ∇f)♯μ
//! is an optimal plan (Brenier: subgradient couplings of convex functions are
//! cyclically monotone), the inequality chain shows `slack ≤ −2·gap` for this
//! ρ. [`adversarial_rho`] builds it and [`brenier_check`] verifies the
//! optimality step in isolation.

use serde::Serialize;

use crate::genlab::{self, GenConfig};
use crate::measure::{DiscreteMeasure, Point};
use crate::order::{self, MartingaleCertificate, OrderVerdict, WitnessFunction};
use crate::transport;
use crate::{Error, Result};

/// Floor for forward-direction slacks: `slack ≥ −SLACK_TOL` must hold for
/// every ρ when the measures are ordered.
pub const SLACK_TOL: f64 = 1e-7;
/// Relative tolerance on the gluing identities.
pub const IDENTITY_RTOL: f64 = 1e-9;

/// Evaluation of the characterising inequality at one ρ.
///
/// `slack = moment_diff − (w2_nu_rho − w2_mu_rho)`; the inequality holds for
/// this ρ iff `slack ≥ 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapReport {
    pub w2_nu_rho: f64,
    pub w2_mu_rho: f64,
    /// `∫|x|² dν − ∫|x|² dμ`
    pub moment_diff: f64,
    pub slack: f64,
}

/// Compute both transport costs and the moment difference for (μ, ν, ρ).
pub fn inequality_gap(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    rho: &DiscreteMeasure,
) -> Result<GapReport> {
    let w2_nu_rho = transport::solve_w2(nu, rho)?.cost;
    let w2_mu_rho = transport::solve_w2(mu, rho)?.cost;
    let moment_diff = nu.second_moment() - mu.second_moment();
    Ok(GapReport {
        w2_nu_rho,
        w2_mu_rho,
        moment_diff,
        slack: moment_diff - (w2_nu_rho - w2_mu_rho),
    })
}

/// Joint law of (X, Y, Z) over supp(μ) × supp(ν) × supp(ρ) built as the
/// conditionally independent product of π^M and π* over X:
/// `mass(i,j,k) = π^M(i,j) · π*(i,k) / μᵢ`.
#[derive(Debug, Clone)]
pub struct Gluing {
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    rho: DiscreteMeasure,
    triples: Vec<(usize, usize, usize, f64)>,
}

impl Gluing {
    fn conditional_product(
        pim: &crate::measure::Coupling,
        pistar: &crate::measure::Coupling,
    ) -> Result<Self> {
        let mu = pim.left().clone();
        let nu = pim.right().clone();
        let rho = pistar.right().clone();
        let mut triples = Vec::new();
        for (i, &mui) in mu.weights().iter().enumerate() {
            for j in 0..nu.len() {
                let a = pim.mass(i, j);
                if a == 0.0 {
                    continue;
                }
                for k in 0..rho.len() {
                    let b = pistar.mass(i, k);
                    if b == 0.0 {
                        continue;
                    }
                    triples.push((i, j, k, a * b / mui));
                }
            }
        }
        let total: f64 = triples.iter().map(|t| t.3).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::SolverFailure(format!(
                "gluing mass {total} drifted from 1"
            )));
        }
        Ok(Self {
            mu,
            nu,
            rho,
            triples,
        })
    }

    /// `(i, j, k, mass)` atoms of the joint law.
    pub fn triples(&self) -> &[(usize, usize, usize, f64)] {
        &self.triples
    }

    /// Largest entrywise deviation of the (X, Y)-marginal from a plan.
    pub fn xy_marginal_error(&self, pim: &crate::measure::Coupling) -> f64 {
        let (m, n) = (self.mu.len(), self.nu.len());
        let mut marg = vec![0.0; m * n];
        for &(i, j, _, mass) in &self.triples {
            marg[i * n + j] += mass;
        }
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..n {
                worst = worst.max((marg[i * n + j] - pim.mass(i, j)).abs());
            }
        }
        worst
    }

    /// Largest entrywise deviation of the (X, Z)-marginal from a plan.
    pub fn xz_marginal_error(&self, pistar: &crate::measure::Coupling) -> f64 {
        let (m, r) = (self.mu.len(), self.rho.len());
        let mut marg = vec![0.0; m * r];
        for &(i, _, k, mass) in &self.triples {
            marg[i * r + k] += mass;
        }
        let mut worst = 0.0f64;
        for i in 0..m {
            for k in 0..r {
                worst = worst.max((marg[i * r + k] - pistar.mass(i, k)).abs());
            }
        }
        worst
    }

    fn expectations(&self) -> (f64, f64, f64, f64) {
        let mut e_xy = 0.0;
        let mut e_xz = 0.0;
        let mut e_yz = 0.0;
        let mut cross = 0.0;
        for &(i, j, k, mass) in &self.triples {
            let x = self.mu.point(i);
            let y = self.nu.point(j);
            let z = self.rho.point(k);
            e_xy += mass * x.sq_dist(y);
            e_xz += mass * x.sq_dist(z);
            e_yz += mass * y.sq_dist(z);
            // (Y − X)·(X − Z)
            let mut c = 0.0;
            for t in 0..x.dim() {
                c += (y.coords()[t] - x.coords()[t]) * (x.coords()[t] - z.coords()[t]);
            }
            cross += mass * c;
        }
        (e_xy, e_xz, e_yz, cross)
    }
}

/// Every quantity and check of the forward gluing argument.
#[derive(Debug, Clone, Serialize)]
pub struct GluingReport {
    pub e_xy: f64,
    pub e_xz: f64,
    pub e_yz: f64,
    pub cross_term: f64,
    /// `1 + E|X|² + E|Y|² + E|Z|²`, the scale for the cross-term bound
    pub cross_scale: f64,
    pub gap: GapReport,
    /// (a) `|E[(Y−X)·(X−Z)]| ≤ 1e-9 · cross_scale`
    pub cross_ok: bool,
    /// (b) `E|Y−Z|² = E|X−Y|² + E|X−Z|²` within 1e-9 relative
    pub pythagoras_ok: bool,
    /// (c) `E|X−Y|² = E|Y|² − E|X|²` within 1e-9 relative
    pub moment_identity_ok: bool,
    /// (d) `W₂²(ν, ρ) ≤ E|Y−Z|² + 1e-9`
    pub feasibility_ok: bool,
    /// (e) `slack ≥ −1e-7` for this ρ
    pub slack_ok: bool,
}

impl GluingReport {
    pub fn all_pass(&self) -> bool {
        self.cross_ok
            && self.pythagoras_ok
            && self.moment_identity_ok
            && self.feasibility_ok
            && self.slack_ok
    }
}

/// Run the forward construction for one ρ: compute π* ∈ Π*(μ, ρ), glue it to
/// the given martingale coupling, and verify the identity chain (a)–(e).
pub fn glue_and_verify(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    rho: &DiscreteMeasure,
    pim: &MartingaleCertificate,
) -> Result<GluingReport> {
    if pim.plan().left() != mu || pim.plan().right() != nu {
        return Err(Error::InvalidCertificate(
            "certificate does not couple the given (μ, ν)".to_string(),
        ));
    }
    let pistar = transport::solve_w2(mu, rho)?;
    let w2_nu_rho = transport::solve_w2(nu, rho)?.cost;

    let gluing = Gluing::conditional_product(pim.plan(), &pistar.plan)?;
    let (e_xy, e_xz, e_yz, cross_term) = gluing.expectations();

    let m_x = mu.second_moment();
    let m_y = nu.second_moment();
    let m_z = rho.second_moment();
    let cross_scale = 1.0 + m_x + m_y + m_z;
    let moment_diff = m_y - m_x;
    let gap = GapReport {
        w2_nu_rho,
        w2_mu_rho: pistar.cost,
        moment_diff,
        slack: moment_diff - (w2_nu_rho - pistar.cost),
    };

    Ok(GluingReport {
        e_xy,
        e_xz,
        e_yz,
        cross_term,
        cross_scale,
        gap,
        cross_ok: cross_term.abs() <= IDENTITY_RTOL * cross_scale,
        pythagoras_ok: (e_yz - (e_xy + e_xz)).abs() <= IDENTITY_RTOL * (1.0 + e_yz.abs()),
        moment_identity_ok: (e_xy - (m_y - m_x)).abs() <= IDENTITY_RTOL * (1.0 + e_xy.abs()),
        feasibility_ok: w2_nu_rho <= e_yz + IDENTITY_RTOL,
        slack_ok: gap.slack >= -SLACK_TOL,
    })
}

/// Build the adversarial measure of the reverse direction: ρ = ∇f♯μ for the
/// subgradient selection of a violating witness.
///
/// Contract (tested, not assumed): the returned report satisfies
/// `slack ≤ −2·gap + SLACK_TOL` — the inequality chain of the construction
/// yields a violation margin of at least twice the witness gap.
pub fn adversarial_rho(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    witness: &WitnessFunction,
) -> Result<(DiscreteMeasure, GapReport)> {
    if witness.gap() <= 0.0 {
        return Err(Error::InvalidWitness(format!(
            "adversarial construction needs gap > 0, got {}",
            witness.gap()
        )));
    }
    if witness.anchors() != mu.points() {
        return Err(Error::InvalidWitness(
            "witness anchors do not match supp(μ)".to_string(),
        ));
    }
    let selection = witness.subgradient_selection();
    let rho = mu.pushforward(&selection)?;
    let report = inequality_gap(mu, nu, &rho)?;
    Ok((rho, report))
}

/// Outcome of [`brenier_check`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BrenierReport {
    /// cost of the pushforward plan `(xᵢ, ∇f(xᵢ))` with mass μᵢ
    pub map_cost: f64,
    /// solved `W₂²(μ, ∇f♯μ)`
    pub solved_cost: f64,
    /// equality within 1e-9 relative
    pub pass: bool,
}

/// Verify the optimality step of the reverse direction: the subgradient map
/// of a convex witness is an optimal transport map, so the plan `(id, ∇f)♯μ`
/// attains `W₂²(μ, ∇f♯μ)` exactly.
pub fn brenier_check(mu: &DiscreteMeasure, witness: &WitnessFunction) -> Result<BrenierReport> {
    if witness.anchors() != mu.points() {
        return Err(Error::InvalidWitness(
            "witness anchors do not match supp(μ)".to_string(),
        ));
    }
    let selection = witness.subgradient_selection();
    let map_cost: f64 = mu
        .points()
        .iter()
        .zip(mu.weights())
        .zip(&selection)
        .map(|((x, w), g)| w * x.sq_dist(g))
        .sum();
    let rho = mu.pushforward(&selection)?;
    let solved_cost = transport::solve_w2(mu, &rho)?.cost;
    Ok(BrenierReport {
        map_cost,
        solved_cost,
        pass: (map_cost - solved_cost).abs() <= IDENTITY_RTOL * (1.0 + map_cost.abs()),
    })
}

/// One forward trial of [`equivalence_report`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ForwardTrial {
    pub rho_seed: u64,
    pub slack: f64,
    pub cross_ok: bool,
    pub pythagoras_ok: bool,
    pub moment_identity_ok: bool,
    pub feasibility_ok: bool,
}

/// Reverse-direction record of [`equivalence_report`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdversarialRecord {
    pub witness_gap: f64,
    pub slack: f64,
    /// required violation margin, `−2·gap + SLACK_TOL`
    pub required_bound: f64,
}

/// Structured outcome of the top-level equivalence run.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub ordered: bool,
    /// forward trials (empty when not ordered)
    pub trials: Vec<ForwardTrial>,
    /// reverse record (present when not ordered)
    pub adversarial: Option<AdversarialRecord>,
}

impl EquivalenceReport {
    /// Smallest slack over the forward trials, +∞ if there were none.
    pub fn min_slack(&self) -> f64 {
        self.trials
            .iter()
            .map(|t| t.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Top-level theorem run on one pair.
///
/// Decides the order; if ordered, samples `n_rho` random ρ (one generator
/// stream per trial, seeds `seed + t`) and asserts `slack ≥ −SLACK_TOL` plus
/// all gluing checks for each; if not ordered, runs the adversarial
/// construction and asserts `slack ≤ −2·gap + SLACK_TOL`. Any failed
/// assertion is a [`Error::NumericalInconsistency`].
pub fn equivalence_report(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    n_rho: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    assert!(n_rho >= 1, "n_rho must be ≥ 1");
    let verdict = order::check(mu, nu)?;
    match verdict {
        OrderVerdict::Ordered(cert) => {
            // ρ samples cover the region the supports occupy.
            let spread = mu
                .points()
                .iter()
                .chain(nu.points())
                .map(Point::inf_norm)
                .fold(0.0f64, f64::max);
            let cfg_for = |t: usize| GenConfig {
                seed: seed.wrapping_add(t as u64),
                dimension: mu.dim(),
                atoms: mu.len().max(nu.len()).min(12),
                coordinate_scale: 1.0 + spread,
                spread_children: 1,
            };
            let mut trials = Vec::with_capacity(n_rho);
            for t in 0..n_rho {
                let cfg = cfg_for(t);
                let rho = genlab::gen_rho(&cfg);
                let report = glue_and_verify(mu, nu, &rho, &cert)?;
                if !report.all_pass() {
                    return Err(Error::NumericalInconsistency(format!(
                        "forward trial {t} (seed {}) failed: slack {:.3e}, cross {:.3e}, \
                         checks [{} {} {} {}]",
                        cfg.seed,
                        report.gap.slack,
                        report.cross_term,
                        report.cross_ok,
                        report.pythagoras_ok,
                        report.moment_identity_ok,
                        report.feasibility_ok,
                    )));
                }
                trials.push(ForwardTrial {
                    rho_seed: cfg.seed,
                    slack: report.gap.slack,
                    cross_ok: report.cross_ok,
                    pythagoras_ok: report.pythagoras_ok,
                    moment_identity_ok: report.moment_identity_ok,
                    feasibility_ok: report.feasibility_ok,
                });
            }
            Ok(EquivalenceReport {
                ordered: true,
                trials,
                adversarial: None,
            })
        }
        OrderVerdict::NotOrdered(witness) => {
            let (_, report) = adversarial_rho(mu, nu, &witness)?;
            let required_bound = -2.0 * witness.gap() + SLACK_TOL;
            if report.slack > required_bound {
                return Err(Error::NumericalInconsistency(format!(
                    "adversarial slack {:.12e} above required bound {:.12e}",
                    report.slack, required_bound
                )));
            }
            Ok(EquivalenceReport {
                ordered: false,
                trials: Vec::new(),
                adversarial: Some(AdversarialRecord {
                    witness_gap: witness.gap(),
                    slack: report.slack,
                    required_bound,
                }),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::MartingaleSolution;

    fn m1(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        let pts: Vec<&[f64]> = points.chunks(1).collect();
        DiscreteMeasure::from_coords(1, &pts, weights).unwrap()
    }

    fn martingale(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> MartingaleCertificate {
        match order::solve_martingale_lp(mu, nu).unwrap() {
            MartingaleSolution::Feasible(cert) => cert,
            MartingaleSolution::Infeasible(_) => panic!("expected feasible pair"),
        }
    }

    #[test]
    fn identical_triple_has_zero_slack() {
        let mu = m1(&[-1.0, 1.0], &[0.5, 0.5]);
        let report = inequality_gap(&mu, &mu, &mu).unwrap();
        assert_eq!(report.slack, 0.0);
    }

    #[test]
    fn dirac_spread_triple_hand_values() {
        let mu = m1(&[0.0], &[1.0]);
        let nu = m1(&[-1.0, 1.0], &[0.5, 0.5]);
        let rho = m1(&[0.0], &[1.0]);
        let r = inequality_gap(&mu, &nu, &rho).unwrap();
        assert!((r.w2_nu_rho - 1.0).abs() <= 1e-12);
        assert!(r.w2_mu_rho.abs() <= 1e-12);
        assert!((r.moment_diff - 1.0).abs() <= 1e-12);
        assert!(r.slack.abs() <= 1e-12);
    }

    #[test]
    fn violated_triple_hand_values() {
        // μ = ½δ₋₁ + ½δ₁, ν = δ₀, ρ = μ: slack −2, twice the witness gap.
        let mu = m1(&[-1.0, 1.0], &[0.5, 0.5]);
        let nu = m1(&[0.0], &[1.0]);
        let r = inequality_gap(&mu, &nu, &mu).unwrap();
        assert!((r.w2_nu_rho - 1.0).abs() <= 1e-12);
        assert!(r.w2_mu_rho.abs() <= 1e-12);
        assert!((r.moment_diff + 1.0).abs() <= 1e-12);
        assert!((r.slack + 2.0).abs() <= 1e-12);
    }

    #[test]
    fn gluing_hand_example() {
        // μ = δ₀, ν = ½δ₋₁ + ½δ₁, ρ = δ₂.
        let mu = m1(&[0.0], &[1.0]);
        let nu = m1(&[-1.0, 1.0], &[0.5, 0.5]);
        let rho = m1(&[2.0], &[1.0]);
        let cert = martingale(&mu, &nu);
        let r = glue_and_verify(&mu, &nu, &rho, &cert).unwrap();
        assert!((r.e_yz - 5.0).abs() <= 1e-12);
        assert!((r.e_xy - 1.0).abs() <= 1e-12);
        assert!((r.e_xz - 4.0).abs() <= 1e-12);
        assert!(r.cross_term.abs() <= 1e-12);
        assert!((r.gap.w2_nu_rho - 5.0).abs() <= 1e-12);
        assert!(r.all_pass());
    }

    #[test]
    fn rho_equal_mu_forces_diagonal_transport() {
        let mu = m1(&[0.0, 4.0], &[0.5, 0.5]);
        let nu = m1(&[-2.0, 2.0, 4.0], &[0.25, 0.25, 0.5]);
        let cert = martingale(&mu, &nu);
        let r = glue_and_verify(&mu, &nu, &mu, &cert).unwrap();
        // Z = X a.s.: E|Y−Z|² collapses onto E|X−Y|².
        assert!((r.e_yz - r.e_xy).abs() <= 1e-12);
        assert!(r.e_xz.abs() <= 1e-12);
        assert!(r.all_pass());
    }

    #[test]
    fn certificate_for_other_measures_is_rejected() {
        let mu = m1(&[0.0], &[1.0]);
        let nu = m1(&[-1.0, 1.0], &[0.5, 0.5]);
        let cert = martingale(&mu, &nu);
        let other = m1(&[0.5], &[1.0]);
        assert!(matches!(
            glue_and_verify(&other, &nu, &mu, &cert).unwrap_err(),
            Error::InvalidCertificate(_)
        ));
    }

    #[test]
    fn adversarial_hand_examples() {
        // μ = ½δ₋₁ + ½δ₁, ν = δ₀: witness |x|, ρ = μ, slack −2 = −2·gap.
        let mu = m1(&[-1.0, 1.0], &[0.5, 0.5]);
        let nu = m1(&[0.0], &[1.0]);
        let w = order::solve_witness_lp(&mu, &nu).unwrap();
        let (rho, report) = adversarial_rho(&mu, &nu, &w).unwrap();
        assert_eq!(rho, mu);
        assert!((report.slack + 2.0 * w.gap()).abs() <= 1e-9);

        // μ = δ₀, ν = δ₁: witness −x, ρ = δ₋₁, slack 1 − 3 = −2.
        let mu = m1(&[0.0], &[1.0]);
        let nu = m1(&[1.0], &[1.0]);
        let w = order::solve_witness_lp(&mu, &nu).unwrap();
        let (rho, report) = adversarial_rho(&mu, &nu, &w).unwrap();
        assert_eq!(rho.point(0).coords(), &[-1.0]);
        assert!((report.w2_nu_rho - 4.0).abs() <= 1e-9);
        assert!((report.w2_mu_rho - 1.0).abs() <= 1e-9);
        assert!((report.moment_diff - 1.0).abs() <= 1e-12);
        assert!((report.slack + 2.0).abs() <= 1e-9);
    }

    #[test]
    fn adversarial_requires_positive_gap() {
        let mu = m1(&[0.0], &[1.0]);
        let w = order::solve_witness_lp(&mu, &mu).unwrap();
        assert!(matches!(
            adversarial_rho(&mu, &mu, &w).unwrap_err(),
            Error::InvalidWitness(_)
        ));
    }

    #[test]
    fn brenier_check_examples() {
        // f ≡ 0 pushes everything to δ₀; transport to a Dirac is unique, so
        // the map cost is the second moment.
        let mu = m1(&[-1.0, 2.0], &[0.5, 0.5]);
        let zero = WitnessFunction::new(
            mu.points().to_vec(),
            vec![0.0, 0.0],
            vec![
                Point::new(vec![0.0]).unwrap(),
                Point::new(vec![0.0]).unwrap(),
            ],
            0.0,
        )
        .unwrap();
        let r = brenier_check(&mu, &zero).unwrap();
        assert!((r.map_cost - mu.second_moment()).abs() <= 1e-12);
        assert!(r.pass);

        // |x| witness on ½δ₋₁ + ½δ₁: the selection is the identity map.
        let mu = m1(&[-1.0, 1.0], &[0.5, 0.5]);
        let nu = m1(&[0.0], &[1.0]);
        let w = order::solve_witness_lp(&mu, &nu).unwrap();
        let r = brenier_check(&mu, &w).unwrap();
        assert!(r.map_cost.abs() <= 1e-9);
        assert!(r.pass);
    }

    #[test]
    fn slack_is_antisymmetric_in_mu_nu() {
        let mu = m1(&[-1.0, 1.0, 2.5], &[0.25, 0.5, 0.25]);
        let nu = m1(&[0.0, 3.0], &[0.5, 0.5]);
        let rho = m1(&[1.0, -2.0], &[0.75, 0.25]);
        let a = inequality_gap(&mu, &nu, &rho).unwrap();
        let b = inequality_gap(&nu, &mu, &rho).unwrap();
        assert!((a.slack + b.slack).abs() <= 1e-9);
    }

    #[test]
    fn equivalence_report_both_branches() {
        let mu = m1(&[0.0], &[1.0]);
        let nu = m1(&[-1.0, 1.0], &[0.5, 0.5]);

        let fwd = equivalence_report(&mu, &nu, 5, 123).unwrap();
        assert!(fwd.ordered);
        assert_eq!(fwd.trials.len(), 5);
        assert!(fwd.min_slack() >= -SLACK_TOL);

        let rev = equivalence_report(&nu, &mu, 5, 123).unwrap();
        assert!(!rev.ordered);
        let adv = rev.adversarial.unwrap();
        assert!(adv.slack <= adv.required_bound);
    }

    #[test]
    fn equal_measures_have_zero_slack_for_all_sampled_rho() {
        let mu = m1(&[-1.0, 0.5, 2.0], &[0.25, 0.5, 0.25]);
        let report = equivalence_report(&mu, &mu, 10, 7).unwrap();
        assert!(report.ordered);
        for trial in &report.trials {
            assert!(trial.slack.abs() <= 1e-9);
        }
    }
}
