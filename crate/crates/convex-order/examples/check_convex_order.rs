//! Decide μ ≤c ν in both directions of a mean-preserving spread and print
//! the certificate produced for each verdict.
//!
//! ```bash
//! cargo run --example check_convex_order
//! ```

use convex_order::measure::DiscreteMeasure;
use convex_order::order::{self, OrderVerdict};

fn main() {
    // δ₀ spread into ½δ₋₁ + ½δ₁ keeps the mean: the classic ordered pair.
    let mu = DiscreteMeasure::from_coords(1, &[&[0.0]], &[1.0]).unwrap();
    let nu = DiscreteMeasure::from_coords(1, &[&[-1.0], &[1.0]], &[0.5, 0.5]).unwrap();

    match order::check(&mu, &nu).unwrap() {
        OrderVerdict::Ordered(cert) => {
            println!("μ ≤c ν holds; martingale coupling:");
            for (i, j, mass) in cert.plan().support() {
                println!(
                    "  {:?} -> {:?} carries {mass}",
                    mu.point(i).coords(),
                    nu.point(j).coords()
                );
            }
            println!(
                "barycenter defect = {:.2e} (each row of the plan keeps its atom's mean)",
                cert.barycenter_error()
            );
        }
        OrderVerdict::NotOrdered(_) => unreachable!("a spread is always dominated"),
    }

    // Swapped, the order fails and the dual certificate appears: a max-affine
    // convex witness (here a normalized form of f(x) = |x|).
    match order::check(&nu, &mu).unwrap() {
        OrderVerdict::Ordered(_) => unreachable!("second moments strictly decrease"),
        OrderVerdict::NotOrdered(witness) => {
            println!("\nν ≤c μ fails; witness gap ∫f dν − ∫f dμ = {}", witness.gap());
            for (k, anchor) in witness.anchors().iter().enumerate() {
                println!(
                    "  piece {k}: anchor {:?}, value {}, slope {:?}",
                    anchor.coords(),
                    witness.values()[k],
                    witness.slopes()[k].coords()
                );
            }
            let kink = convex_order::measure::Point::new(vec![0.0]).unwrap();
            let (value, active) = witness.evaluate(&kink).unwrap();
            println!("  f(0) = {value}, active piece {active} (ties break to the lowest index)");
        }
    }
}
