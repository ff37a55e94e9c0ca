//! The reverse direction: when the order fails, the witness does not just
//! certify the failure, it *constructs* a measure breaking the W₂ inequality.
//!
//! Pushing μ through a subgradient selection ∇f of the witness gives
//! ρ = ∇f♯μ with slack ≤ −2·gap. The key optimality step — the subgradient
//! map is an optimal transport map for (μ, ρ) — is checked in isolation.
//!
//! ```bash
//! cargo run --example adversarial_rho
//! ```

use convex_order::genlab::{self, GenConfig};
use convex_order::order::{self, OrderVerdict};
use convex_order::theorem;

fn main() {
    // An unordered pair: a spread swapped back to front.
    let cfg = GenConfig {
        seed: 99,
        dimension: 2,
        atoms: 3,
        coordinate_scale: 1.0,
        spread_children: 2,
    };
    let (mu, nu) = genlab::gen_unordered_pair(&cfg);

    let witness = match order::check(&mu, &nu).unwrap() {
        OrderVerdict::NotOrdered(w) => w,
        OrderVerdict::Ordered(_) => unreachable!("swapped spreads are unordered"),
    };
    println!("μ ≰c ν with witness gap {}", witness.gap());

    // Brenier step: the plan (x, ∇f(x)) attains W₂²(μ, ∇f♯μ) exactly.
    let brenier = theorem::brenier_check(&mu, &witness).unwrap();
    println!(
        "subgradient map optimality: plan cost {} = solved W2² {} -> {}",
        brenier.map_cost,
        brenier.solved_cost,
        if brenier.pass { "optimal" } else { "NOT optimal" }
    );

    // The adversarial measure and its violation margin.
    let (rho, report) = theorem::adversarial_rho(&mu, &nu, &witness).unwrap();
    println!("\nadversarial ρ = ∇f♯μ has {} atoms:", rho.len());
    for (p, w) in rho.points().iter().zip(rho.weights()) {
        println!("  {:?} with mass {w}", p.coords());
    }
    println!(
        "\nslack = {:+.6} ≤ −2·gap = {:+.6}",
        report.slack,
        -2.0 * witness.gap()
    );
    assert!(report.slack <= -2.0 * witness.gap() + theorem::SLACK_TOL);
}
