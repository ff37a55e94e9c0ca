//! Evaluate the W₂ inequality that characterises convex order:
//!
//!   W₂²(ν, ρ) − W₂²(μ, ρ) ≤ ∫|x|² dν − ∫|x|² dμ    for every ρ
//!
//! `slack ≥ 0` means the inequality holds at that ρ. For an ordered pair it
//! holds everywhere; for an unordered pair some ρ breaks it.
//!
//! ```bash
//! cargo run --example inequality_gap
//! ```

use convex_order::measure::DiscreteMeasure;
use convex_order::theorem;

fn main() {
    let dirac0 = DiscreteMeasure::from_coords(1, &[&[0.0]], &[1.0]).unwrap();
    let spread = DiscreteMeasure::from_coords(1, &[&[-1.0], &[1.0]], &[0.5, 0.5]).unwrap();
    let dirac2 = DiscreteMeasure::from_coords(1, &[&[2.0]], &[1.0]).unwrap();

    // Ordered pair (δ₀, spread): slack stays nonnegative for any ρ.
    for (name, rho) in [("δ₀", &dirac0), ("δ₂", &dirac2), ("spread", &spread)] {
        let r = theorem::inequality_gap(&dirac0, &spread, rho).unwrap();
        println!(
            "ordered pair, ρ = {name}: W2²(ν,ρ) = {}, W2²(μ,ρ) = {}, moment diff = {}, slack = {}",
            r.w2_nu_rho, r.w2_mu_rho, r.moment_diff, r.slack
        );
        assert!(r.slack >= -theorem::SLACK_TOL);
    }

    // Swapped pair (spread, δ₀): ρ = spread exposes the violation with
    // slack −2, exactly twice the normalized witness gap.
    let r = theorem::inequality_gap(&spread, &dirac0, &spread).unwrap();
    println!(
        "\nunordered pair, ρ = spread: slack = {} (inequality violated)",
        r.slack
    );
    assert!(r.slack < 0.0);

    // Antisymmetry: swapping μ and ν negates the slack at every ρ.
    let forward = theorem::inequality_gap(&dirac0, &spread, &dirac2).unwrap();
    let backward = theorem::inequality_gap(&spread, &dirac0, &dirac2).unwrap();
    println!(
        "\nantisymmetry at ρ = δ₂: slack(μ,ν) = {}, slack(ν,μ) = {}",
        forward.slack, backward.slack
    );
    assert!((forward.slack + backward.slack).abs() <= 1e-9);
}
