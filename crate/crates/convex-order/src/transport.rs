//! Exact discrete quadratic optimal transport.
//!
//! [`solve_w2`] computes `W₂²(μ, ν) = min_{π ∈ Π(μ,ν)} Σᵢⱼ πᵢⱼ |xᵢ − yⱼ|²`
//! together with an optimal basic plan (an element of the optimizer set
//! `Π*(μ,ν)`, at most `m + n − 1` positive entries) and dual potentials.
//!
//! The solver is a network simplex on the bipartite transportation graph in
//! double precision: northwest-corner start, Dantzig pricing, and Bland's
//! rule as an anti-cycling fallback after a run of degenerate pivots. When
//! `Π*` is not a singleton the first optimal basis found is returned; callers
//! must not rely on which optimizer they get.

use crate::measure::{Coupling, CouplingReport, DiscreteMeasure};
use crate::{Error, Result};

/// Optimality threshold: terminate when all reduced costs are ≥ −RC_TOL.
pub const RC_TOL: f64 = 1e-10;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERACY_SWITCH: usize = 40;

/// Outcome of [`solve_w2`].
#[derive(Debug, Clone)]
pub struct TransportResult {
    /// The optimal value W₂²(μ, ν), in squared Euclidean units.
    pub cost: f64,
    /// An optimal basic plan π* ∈ Π*(μ, ν).
    pub plan: Coupling,
    /// Dual potentials (one per atom of each marginal) satisfying
    /// `uᵢ + vⱼ ≤ |xᵢ − yⱼ|²` up to [`RC_TOL`] with
    /// `Σᵢ μᵢuᵢ + Σⱼ νⱼvⱼ = cost` (strong duality).
    pub dual: Option<(Vec<f64>, Vec<f64>)>,
}

/// Solve the m×n transportation LP with cost `|xᵢ − yⱼ|²` exactly.
pub fn solve_w2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<TransportResult> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: nu.dim(),
        });
    }
    let (m, n) = (mu.len(), nu.len());
    let mut cost = vec![0.0; m * n];
    for (i, x) in mu.points().iter().enumerate() {
        for (j, y) in nu.points().iter().enumerate() {
            cost[i * n + j] = x.sq_dist(y);
        }
    }

    let solved = transportation_simplex(mu.weights(), nu.weights(), &cost)?;
    let total: f64 = solved
        .flow
        .iter()
        .zip(&cost)
        .map(|(f, c)| f * c)
        .sum();
    let plan = Coupling::new(mu.clone(), nu.clone(), solved.flow)?;
    Ok(TransportResult {
        cost: total,
        plan,
        dual: Some((solved.u, solved.v)),
    })
}

/// Transport cost `Σᵢⱼ massᵢⱼ |xᵢ − yⱼ|²` of an arbitrary coupling.
pub fn coupling_cost(plan: &Coupling) -> f64 {
    plan.support()
        .map(|(i, j, mass)| mass * plan.left().point(i).sq_dist(plan.right().point(j)))
        .sum()
}

/// Diagnostic marginal check; passes iff the plan is within the coupling
/// tolerances ([`crate::measure::MARGINAL_TOL`]).
pub fn validate_coupling(plan: &Coupling) -> CouplingReport {
    plan.marginal_report()
}

struct Solved {
    flow: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Node {
    Row(usize),
    Col(usize),
}

/// Primal network simplex on the dense m×n transportation tableau.
fn transportation_simplex(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<Solved> {
    let (m, n) = (supply.len(), demand.len());
    debug_assert_eq!(cost.len(), m * n);

    let mut flow = vec![0.0; m * n];
    let mut basic = vec![false; m * n];
    let mut row_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut col_adj: Vec<Vec<usize>> = vec![Vec::new(); n];

    let add_basic = |i: usize,
                         j: usize,
                         basic: &mut Vec<bool>,
                         row_adj: &mut Vec<Vec<usize>>,
                         col_adj: &mut Vec<Vec<usize>>| {
        basic[i * n + j] = true;
        row_adj[i].push(j);
        col_adj[j].push(i);
    };

    // Northwest-corner start: a staircase spanning tree with m+n−1 cells.
    {
        let mut rem_a = supply.to_vec();
        let mut rem_b = demand.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            add_basic(i, j, &mut basic, &mut row_adj, &mut col_adj);
            if i == m - 1 && j == n - 1 {
                flow[i * n + j] = rem_a[i].max(0.0);
                break;
            }
            let f = rem_a[i].min(rem_b[j]).max(0.0);
            flow[i * n + j] = f;
            rem_a[i] -= f;
            rem_b[j] -= f;
            // advance into the exhausted direction, never off the last row
            let advance_row = i < m - 1 && (j == n - 1 || rem_a[i] <= rem_b[j]);
            if advance_row {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let max_iters = 2000 + 200 * (m + n) * (m + n);
    let mut bland = false;
    let mut degenerate_run = 0usize;

    for _ in 0..max_iters {
        compute_potentials(m, n, cost, &row_adj, &col_adj, &mut u, &mut v)?;

        // Entering cell.
        let mut entering: Option<(usize, usize)> = None;
        let mut best = -RC_TOL;
        'scan: for i in 0..m {
            for j in 0..n {
                if basic[i * n + j] {
                    continue;
                }
                let r = cost[i * n + j] - u[i] - v[j];
                if r < best {
                    entering = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = r;
                }
            }
        }
        let Some((ei, ej)) = entering else {
            return Ok(Solved { flow, u, v });
        };

        // Unique tree path from Row(ei) to Col(ej); closing it with the
        // entering cell forms the pivot cycle.
        let path = tree_path(m, n, &row_adj, &col_adj, ei, ej)?;
        // Cells along the path; even positions lose θ, odd positions gain θ.
        let mut minus_cells: Vec<(usize, usize)> = Vec::new();
        let mut plus_cells: Vec<(usize, usize)> = Vec::new();
        for (t, pair) in path.windows(2).enumerate() {
            let cell = match (pair[0], pair[1]) {
                (Node::Row(i), Node::Col(j)) | (Node::Col(j), Node::Row(i)) => (i, j),
                _ => unreachable!("tree path alternates row and column nodes"),
            };
            if t % 2 == 0 {
                minus_cells.push(cell);
            } else {
                plus_cells.push(cell);
            }
        }

        let mut theta = f64::INFINITY;
        let mut leaving = minus_cells[0];
        for &(i, j) in &minus_cells {
            let f = flow[i * n + j];
            if f < theta - 1e-15 || (f <= theta + 1e-15 && (i, j) < leaving) {
                theta = theta.min(f);
                leaving = (i, j);
            }
        }
        let theta = theta.max(0.0);

        for &(i, j) in &minus_cells {
            flow[i * n + j] -= theta;
        }
        for &(i, j) in &plus_cells {
            flow[i * n + j] += theta;
        }
        flow[ei * n + ej] = theta;
        flow[leaving.0 * n + leaving.1] = 0.0;

        // Swap basis membership.
        basic[leaving.0 * n + leaving.1] = false;
        row_adj[leaving.0].retain(|&j| j != leaving.1);
        col_adj[leaving.1].retain(|&i| i != leaving.0);
        add_basic(ei, ej, &mut basic, &mut row_adj, &mut col_adj);

        if theta <= 1e-15 {
            degenerate_run += 1;
            if degenerate_run >= DEGENERACY_SWITCH {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
    }
    Err(Error::SolverFailure(format!(
        "network simplex iteration cap exceeded on {m}×{n} instance"
    )))
}

/// Solve `uᵢ + vⱼ = cᵢⱼ` over the basis tree, rooted at row 0 with `u₀ = 0`.
fn compute_potentials(
    m: usize,
    n: usize,
    cost: &[f64],
    row_adj: &[Vec<usize>],
    col_adj: &[Vec<usize>],
    u: &mut [f64],
    v: &mut [f64],
) -> Result<()> {
    u.fill(f64::NAN);
    v.fill(f64::NAN);
    u[0] = 0.0;
    let mut stack = vec![Node::Row(0)];
    while let Some(node) = stack.pop() {
        match node {
            Node::Row(i) => {
                for &j in &row_adj[i] {
                    if v[j].is_nan() {
                        v[j] = cost[i * n + j] - u[i];
                        stack.push(Node::Col(j));
                    }
                }
            }
            Node::Col(j) => {
                for &i in &col_adj[j] {
                    if u[i].is_nan() {
                        u[i] = cost[i * n + j] - v[j];
                        stack.push(Node::Row(i));
                    }
                }
            }
        }
    }
    if u.iter().any(|x| x.is_nan()) || v.iter().any(|x| x.is_nan()) {
        return Err(Error::SolverFailure(
            "basis tree disconnected while computing potentials".to_string(),
        ));
    }
    debug_assert_eq!(m, u.len());
    Ok(())
}

/// BFS through the basis tree from `Row(start)` to `Col(target)`.
fn tree_path(
    m: usize,
    n: usize,
    row_adj: &[Vec<usize>],
    col_adj: &[Vec<usize>],
    start: usize,
    target: usize,
) -> Result<Vec<Node>> {
    // Node indexing: rows 0..m, columns m..m+n.
    let idx = |node: Node| match node {
        Node::Row(i) => i,
        Node::Col(j) => m + j,
    };
    let mut parent: Vec<Option<Node>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([Node::Row(start)]);
    while let Some(node) = queue.pop_front() {
        if node == Node::Col(target) {
            let mut path = vec![node];
            let mut cur = node;
            while let Some(p) = parent[idx(cur)] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Ok(path);
        }
        let neighbors: Vec<Node> = match node {
            Node::Row(i) => row_adj[i].iter().map(|&j| Node::Col(j)).collect(),
            Node::Col(j) => col_adj[j].iter().map(|&i| Node::Row(i)).collect(),
        };
        for next in neighbors {
            let k = idx(next);
            if !seen[k] {
                seen[k] = true;
                parent[k] = Some(node);
                queue.push_back(next);
            }
        }
    }
    Err(Error::SolverFailure(
        "entering cell not connected to basis tree".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Point;

    fn m1(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        let pts: Vec<&[f64]> = points.chunks(1).collect();
        DiscreteMeasure::from_coords(1, &pts, weights).unwrap()
    }

    #[test]
    fn dirac_to_dirac() {
        let a = DiscreteMeasure::from_coords(2, &[&[0.0, 0.0]], &[1.0]).unwrap();
        let b = DiscreteMeasure::from_coords(2, &[&[3.0, 4.0]], &[1.0]).unwrap();
        let r = solve_w2(&a, &b).unwrap();
        assert_eq!(r.cost, 25.0);
        assert_eq!(r.plan.mass(0, 0), 1.0);
    }

    #[test]
    fn monotone_matching_beats_crossing() {
        // Brute force over the two matchings gives 1 vs 5.
        let a = m1(&[0.0, 2.0], &[0.5, 0.5]);
        let b = m1(&[1.0, 3.0], &[0.5, 0.5]);
        let r = solve_w2(&a, &b).unwrap();
        assert!((r.cost - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_measures_cost_zero_diagonal_plan() {
        let a = m1(&[0.25, 1.5, -3.0], &[0.2, 0.3, 0.5]);
        let r = solve_w2(&a, &a).unwrap();
        assert!(r.cost.abs() <= 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { a.weight(i) } else { 0.0 };
                assert!((r.plan.mass(i, j) - expect).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let a = DiscreteMeasure::from_coords(1, &[&[0.0]], &[1.0]).unwrap();
        let b = DiscreteMeasure::from_coords(2, &[&[0.0, 0.0]], &[1.0]).unwrap();
        assert!(matches!(
            solve_w2(&a, &b).unwrap_err(),
            Error::DimensionMismatch { expected: 1, found: 2 }
        ));
    }

    #[test]
    fn coupling_cost_examples() {
        let a = m1(&[0.0, 2.0], &[0.5, 0.5]);
        assert_eq!(coupling_cost(&Coupling::diagonal(a.clone())), 0.0);

        let dirac = m1(&[0.0], &[1.0]);
        let pm = m1(&[-1.0, 1.0], &[0.5, 0.5]);
        assert_eq!(coupling_cost(&Coupling::product(dirac, pm)), 1.0);

        // anti-monotone coupling of {0,2} with {1,3}: ½·9 + ½·1 = 5
        let b = m1(&[1.0, 3.0], &[0.5, 0.5]);
        let anti = Coupling::new(a, b, vec![0.0, 0.5, 0.5, 0.0]).unwrap();
        assert_eq!(coupling_cost(&anti), 5.0);
    }

    #[test]
    fn validate_reports_constructed_defect() {
        let a = m1(&[0.0], &[1.0]);
        let b = m1(&[1.0], &[1.0]);
        let bad = Coupling::new_unchecked(a, b, vec![1.0 - 1e-3]);
        let report = validate_coupling(&bad);
        assert!(!report.pass);
        assert!((report.max_row_error - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn solver_output_passes_validation_and_duality() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let m = rng.gen_range(1..=6);
            let n = rng.gen_range(1..=6);
            let d = rng.gen_range(1..=3);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng, k: usize| {
                let pts: Vec<Point> = (0..k)
                    .map(|_| {
                        Point::new((0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
                    })
                    .collect();
                let mut w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
                let s: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= s);
                DiscreteMeasure::build(
                    pts,
                    w,
                    crate::measure::BuildOptions {
                        normalize: true,
                        merge_tol: 0.0,
                    },
                )
                .unwrap()
            };
            let a = mk(&mut rng, m);
            let b = mk(&mut rng, n);
            let r = solve_w2(&a, &b).unwrap();

            let report = validate_coupling(&r.plan);
            assert!(report.pass, "solver plan must satisfy marginals");

            // basic solution: at most m+n−1 strictly positive entries
            assert!(r.plan.support().count() < a.len() + b.len());

            // plan cost equals reported cost
            let recomputed = coupling_cost(&r.plan);
            assert!((recomputed - r.cost).abs() <= 1e-9 * (1.0 + r.cost));

            // weak and strong duality
            let (u, v) = r.dual.as_ref().unwrap();
            for (i, x) in a.points().iter().enumerate() {
                for (j, y) in b.points().iter().enumerate() {
                    assert!(u[i] + v[j] <= x.sq_dist(y) + 1e-9);
                }
            }
            let dual_value: f64 = u
                .iter()
                .zip(a.weights())
                .map(|(ui, wi)| ui * wi)
                .sum::<f64>()
                + v.iter().zip(b.weights()).map(|(vj, wj)| vj * wj).sum::<f64>();
            assert!((dual_value - r.cost).abs() <= 1e-9 * (1.0 + r.cost.abs()));

            // symmetry
            let rt = solve_w2(&b, &a).unwrap();
            assert!((rt.cost - r.cost).abs() <= 1e-12 * (1.0 + r.cost.abs()));
        }
    }

    #[test]
    fn triangle_inequality_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..15 {
            let d = rng.gen_range(1..=3);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.gen_range(1..=5);
                let pts: Vec<Point> = (0..k)
                    .map(|_| {
                        Point::new((0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap()
                    })
                    .collect();
                let w = vec![1.0 / k as f64; k];
                DiscreteMeasure::new(pts, w).unwrap()
            };
            let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let ab = solve_w2(&a, &b).unwrap().cost.sqrt();
            let bc = solve_w2(&b, &c).unwrap().cost.sqrt();
            let ac = solve_w2(&a, &c).unwrap().cost.sqrt();
            assert!(ac <= ab + bc + 1e-7);
        }
    }
}
