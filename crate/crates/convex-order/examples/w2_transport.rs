//! Exact discrete W₂²: solve a small transport problem and inspect the plan.
//!
//! ```bash
//! cargo run --example w2_transport
//! ```

use convex_order::measure::DiscreteMeasure;
use convex_order::transport;

fn main() {
    // Two measures on the line: μ = ½δ₀ + ½δ₂ and ν = ½δ₁ + ½δ₃.
    // The monotone matching (0→1, 2→3) costs 1; the crossing one costs 5.
    let mu = DiscreteMeasure::from_coords(1, &[&[0.0], &[2.0]], &[0.5, 0.5]).unwrap();
    let nu = DiscreteMeasure::from_coords(1, &[&[1.0], &[3.0]], &[0.5, 0.5]).unwrap();

    let result = transport::solve_w2(&mu, &nu).unwrap();
    println!("W2²(μ, ν) = {}", result.cost);

    println!("optimal plan (row atom, column atom, mass):");
    for (i, j, mass) in result.plan.support() {
        println!(
            "  {:?} -> {:?} carries {mass}",
            mu.point(i).coords(),
            nu.point(j).coords()
        );
    }

    // The plan is basic: at most m + n − 1 cells carry mass.
    assert!(result.plan.support().count() < mu.len() + nu.len());

    // Dual potentials certify optimality: u_i + v_j ≤ |x_i − y_j|², with
    // equality summing exactly to the primal cost.
    let (u, v) = result.dual.as_ref().unwrap();
    let dual_value: f64 = u
        .iter()
        .zip(mu.weights())
        .chain(v.iter().zip(nu.weights()))
        .map(|(p, w)| p * w)
        .sum();
    println!("dual value = {dual_value} (strong duality gap ≈ 0)");

    let report = transport::validate_coupling(&result.plan);
    println!(
        "marginal errors: rows {:.2e}, columns {:.2e}",
        report.max_row_error, report.max_col_error
    );
}
