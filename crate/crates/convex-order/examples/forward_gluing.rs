//! The forward direction, step by step: glue a martingale coupling of (μ, ν)
//! to an optimal transport plan of (μ, ρ) and watch the identity chain that
//! proves `slack ≥ 0`.
//!
//! Conditioning on X makes Y − X and X − Z independent, and the martingale
//! property kills the cross term, so
//!
//!   W₂²(ν, ρ) ≤ E|Y−Z|² = E|X−Y|² + E|X−Z|² = (E|Y|² − E|X|²) + W₂²(μ, ρ).
//!
//! ```bash
//! cargo run --example forward_gluing
//! ```

use convex_order::genlab::{self, GenConfig};
use convex_order::order::{self, MartingaleSolution};
use convex_order::theorem;

fn main() {
    // A generated mean-preserving spread in ℝ²: ordered by construction.
    let cfg = GenConfig {
        seed: 2024,
        dimension: 2,
        atoms: 3,
        coordinate_scale: 1.5,
        spread_children: 2,
    };
    let (mu, nu) = genlab::gen_ordered_pair(&cfg);
    println!("μ has {} atoms, ν has {} atoms in ℝ²", mu.len(), nu.len());

    let cert = match order::solve_martingale_lp(&mu, &nu).unwrap() {
        MartingaleSolution::Feasible(cert) => cert,
        MartingaleSolution::Infeasible(_) => unreachable!("spreads are ordered"),
    };
    println!("martingale coupling found, barycenter defect {:.2e}", cert.barycenter_error());

    // Glue against a few random ρ and verify every link of the chain.
    for trial in 0..3 {
        let rho = genlab::gen_rho(&GenConfig {
            seed: 900 + trial,
            dimension: 2,
            atoms: 4,
            coordinate_scale: 2.0,
            spread_children: 1,
        });
        let report = theorem::glue_and_verify(&mu, &nu, &rho, &cert).unwrap();
        println!(
            "\nρ #{trial}: E|X−Y|² = {:.6}, E|X−Z|² = {:.6}, E|Y−Z|² = {:.6}",
            report.e_xy, report.e_xz, report.e_yz
        );
        println!("  cross term E[(Y−X)·(X−Z)] = {:+.3e} (orthogonality)", report.cross_term);
        println!(
            "  Pythagoras: {:.6} ≈ {:.6} + {:.6}",
            report.e_yz, report.e_xy, report.e_xz
        );
        println!(
            "  moment identity: E|X−Y|² = {:.6} vs E|Y|² − E|X|² = {:.6}",
            report.e_xy, report.gap.moment_diff
        );
        println!(
            "  feasibility: W2²(ν,ρ) = {:.6} ≤ E|Y−Z|² = {:.6}",
            report.gap.w2_nu_rho, report.e_yz
        );
        println!("  conclusion: slack = {:+.6e} ≥ 0", report.gap.slack);
        assert!(report.all_pass());
    }
}
