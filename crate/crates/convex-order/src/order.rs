//! Convex-order decision with explicit certificates.
//!
//! `μ ≤c ν` (that is, `∫f dμ ≤ ∫f dν` for every convex `f`) holds for
//! finitely supported measures iff a martingale coupling of `(μ, ν)` exists:
//! a plan `π ∈ Π(μ,ν)` with `Σⱼ πᵢⱼ(yⱼ − xᵢ) = 0` for every atom `i` of `μ`.
//! That existence question is a feasibility LP, and its Farkas dual is
//! exactly an LP over max-affine convex functions anchored at `supp(μ)`:
//!
//! ```text
//! maximize   Σᵢ μᵢvᵢ − Σⱼ νⱼwⱼ
//! subject to wⱼ ≥ vᵢ + gᵢ·(yⱼ − xᵢ)   for all i, j
//!            vₖ ≥ vᵢ + gᵢ·(xₖ − xᵢ)   for all i, k
//!            ‖gᵢ‖∞ ≤ 1,  Σᵢ μᵢvᵢ = 0
//! ```
//!
//! The optimum is the witness gap `∫f dμ − ∫f dν` of the best normalized
//! max-affine violator `f(z) = maxᵢ (vᵢ + gᵢ·(z − xᵢ))`. It is zero iff the
//! martingale LP is feasible, so [`check`] decides the order by solving the
//! witness LP first and produces one of two self-validating certificates:
//! a [`MartingaleCertificate`] or a [`WitnessFunction`] with positive gap.
//!
//! Because the slope bound and the value anchor normalize the witness, the
//! gap is a normalized violation measure, not a canonical quantity; only its
//! sign carries the verdict.

use crate::measure::{Coupling, DiscreteMeasure, Point};
use crate::simplex::{LpBuilder, LpOutcome, Rel};
use crate::{Error, Result};

/// Default decision tolerance on the witness gap.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Relative barycenter tolerance for martingale certificates.
pub const BARYCENTER_TOL: f64 = 1e-9;
/// Slack allowed in the max-affine self-consistency inequalities.
pub const CONSISTENCY_TOL: f64 = 1e-9;
/// Slack allowed on the witness slope bound ‖gᵢ‖∞ ≤ 1.
pub const SLOPE_CAP_TOL: f64 = 1e-12;

/// A coupling of `(μ, ν)` satisfying the barycenter condition: for every atom
/// `i` of `μ`, `‖Σⱼ massᵢⱼ (yⱼ − xᵢ)‖∞ ≤ BARYCENTER_TOL · (1 + ‖xᵢ‖∞)`.
///
/// Positive certificate of `μ ≤c ν` (Strassen).
#[derive(Debug, Clone)]
pub struct MartingaleCertificate {
    plan: Coupling,
}

impl MartingaleCertificate {
    /// Validate marginals and the barycenter condition.
    pub fn new(plan: Coupling) -> Result<Self> {
        let report = plan.marginal_report();
        if !report.pass {
            return Err(Error::InvalidCertificate(format!(
                "marginal error {:.3e}",
                report.max_row_error.max(report.max_col_error)
            )));
        }
        let cert = Self { plan };
        let err = cert.barycenter_error();
        if err > BARYCENTER_TOL {
            return Err(Error::InvalidCertificate(format!(
                "barycenter error {err:.3e} exceeds {BARYCENTER_TOL:.0e}"
            )));
        }
        Ok(cert)
    }

    pub fn plan(&self) -> &Coupling {
        &self.plan
    }

    /// Worst relative barycenter defect,
    /// `maxᵢ ‖Σⱼ massᵢⱼ (yⱼ − xᵢ)‖∞ / (1 + ‖xᵢ‖∞)`.
    pub fn barycenter_error(&self) -> f64 {
        let (mu, nu) = (self.plan.left(), self.plan.right());
        let d = mu.dim();
        let mut worst = 0.0f64;
        for (i, x) in mu.points().iter().enumerate() {
            let mut drift = vec![0.0; d];
            for (j, y) in nu.points().iter().enumerate() {
                let mass = self.plan.mass(i, j);
                if mass != 0.0 {
                    for (acc, (yc, xc)) in
                        drift.iter_mut().zip(y.coords().iter().zip(x.coords()))
                    {
                        *acc += mass * (yc - xc);
                    }
                }
            }
            let inf = drift.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            worst = worst.max(inf / (1.0 + x.inf_norm()));
        }
        worst
    }
}

/// A max-affine convex function `f(z) = maxᵢ (vᵢ + gᵢ·(z − xᵢ))` anchored at
/// the support of `μ`, with `f(xᵢ) = vᵢ` (self-consistency) and normalized by
/// `‖gᵢ‖∞ ≤ 1` and `Σᵢ μᵢvᵢ = 0`.
///
/// `gap = ∫f dμ − ∫f dν`; a positive gap certifies `μ ≰c ν`.
#[derive(Debug, Clone)]
pub struct WitnessFunction {
    anchors: Vec<Point>,
    values: Vec<f64>,
    slopes: Vec<Point>,
    gap: f64,
}

impl WitnessFunction {
    /// Validate self-consistency and the slope bound.
    pub fn new(
        anchors: Vec<Point>,
        values: Vec<f64>,
        slopes: Vec<Point>,
        gap: f64,
    ) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::InvalidWitness("no anchors".to_string()));
        }
        if anchors.len() != values.len() || anchors.len() != slopes.len() {
            return Err(Error::LengthMismatch {
                expected: anchors.len(),
                found: values.len().min(slopes.len()),
            });
        }
        let d = anchors[0].dim();
        for p in anchors.iter().chain(&slopes) {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
        }
        for g in &slopes {
            if g.inf_norm() > 1.0 + SLOPE_CAP_TOL {
                return Err(Error::InvalidWitness(format!(
                    "slope ∞-norm {} exceeds 1",
                    g.inf_norm()
                )));
            }
        }
        for i in 0..anchors.len() {
            for k in 0..anchors.len() {
                let minorant = values[i] + slopes[i].dot_diff(&anchors[k], &anchors[i]);
                if values[k] < minorant - CONSISTENCY_TOL {
                    return Err(Error::InvalidWitness(format!(
                        "piece {i} exceeds value at anchor {k} by {:.3e}",
                        minorant - values[k]
                    )));
                }
            }
        }
        Ok(Self {
            anchors,
            values,
            slopes,
            gap,
        })
    }

    pub fn dim(&self) -> usize {
        self.anchors[0].dim()
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[Point] {
        &self.slopes
    }

    /// `∫f dμ − ∫f dν` for the pair the witness was produced on.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Evaluate `f(z) = maxᵢ (vᵢ + gᵢ·(z − xᵢ))`, returning the value and the
    /// smallest index attaining the max (deterministic tie-break).
    pub fn evaluate(&self, z: &Point) -> Result<(f64, usize)> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.dim(),
            });
        }
        let mut best = f64::NEG_INFINITY;
        let mut active = 0usize;
        for (i, (v, g)) in self.values.iter().zip(&self.slopes).enumerate() {
            let val = v + g.dot_diff(z, &self.anchors[i]);
            if val > best {
                best = val;
                active = i;
            }
        }
        Ok((best, active))
    }

    /// A subgradient selection `∇f`: for each anchor `xᵢ`, the slope of the
    /// piece active at `xᵢ` under the [`WitnessFunction::evaluate`] tie-break.
    ///
    /// The active piece minorizes `f` everywhere and touches it at `xᵢ`, so
    /// the selected slope is a genuine element of `∂f(xᵢ)`.
    pub fn subgradient_selection(&self) -> Vec<Point> {
        self.anchors
            .iter()
            .map(|x| {
                let (_, idx) = self.evaluate(x).expect("anchor dimension always matches");
                self.slopes[idx].clone()
            })
            .collect()
    }

    /// `∫f dθ` for an arbitrary measure θ of matching dimension.
    pub fn integrate(&self, theta: &DiscreteMeasure) -> Result<f64> {
        let mut total = 0.0;
        for (p, w) in theta.points().iter().zip(theta.weights()) {
            total += w * self.evaluate(p)?.0;
        }
        Ok(total)
    }
}

/// Farkas ray certifying infeasibility of the martingale LP: multipliers
/// `(aᵢ, bⱼ, cᵢ)` with `aᵢ + bⱼ + cᵢ·(yⱼ − xᵢ) ≤ 0` for all `(i, j)` and
/// `Σᵢ aᵢμᵢ + Σⱼ bⱼνⱼ > 0`.
#[derive(Debug, Clone)]
pub struct FarkasRay {
    pub mu_multipliers: Vec<f64>,
    pub nu_multipliers: Vec<f64>,
    pub barycenter_multipliers: Vec<Point>,
}

impl FarkasRay {
    /// Largest value of `aᵢ + bⱼ + cᵢ·(yⱼ − xᵢ)` over all cells; a valid ray
    /// keeps this ≤ 0 up to solver tolerance.
    pub fn max_combination(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (i, x) in mu.points().iter().enumerate() {
            for (j, y) in nu.points().iter().enumerate() {
                let v = self.mu_multipliers[i]
                    + self.nu_multipliers[j]
                    + self.barycenter_multipliers[i].dot_diff(y, x);
                worst = worst.max(v);
            }
        }
        worst
    }

    /// `Σᵢ aᵢμᵢ + Σⱼ bⱼνⱼ`; strictly positive for a valid ray.
    pub fn objective(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let a: f64 = self
            .mu_multipliers
            .iter()
            .zip(mu.weights())
            .map(|(a, w)| a * w)
            .sum();
        let b: f64 = self
            .nu_multipliers
            .iter()
            .zip(nu.weights())
            .map(|(b, w)| b * w)
            .sum();
        a + b
    }
}

/// Outcome of the martingale feasibility LP.
#[derive(Debug)]
pub enum MartingaleSolution {
    Feasible(MartingaleCertificate),
    Infeasible(FarkasRay),
}

/// Decision of [`check`]: exactly one certificate, matching the verdict.
#[derive(Debug)]
pub enum OrderVerdict {
    Ordered(MartingaleCertificate),
    NotOrdered(WitnessFunction),
}

impl OrderVerdict {
    pub fn is_ordered(&self) -> bool {
        matches!(self, OrderVerdict::Ordered(_))
    }

    pub fn certificate(&self) -> Option<&MartingaleCertificate> {
        match self {
            OrderVerdict::Ordered(c) => Some(c),
            OrderVerdict::NotOrdered(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&WitnessFunction> {
        match self {
            OrderVerdict::Ordered(_) => None,
            OrderVerdict::NotOrdered(w) => Some(w),
        }
    }
}

fn require_same_dim(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: nu.dim(),
        });
    }
    Ok(())
}

/// Solve the feasibility LP `{π ≥ 0, row sums = μ, column sums = ν,
/// Σⱼ πᵢⱼ(yⱼ − xᵢ) = 0 ∀i}`.
///
/// Returns a feasible basic coupling or a Farkas ray proving there is none.
pub fn solve_martingale_lp(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<MartingaleSolution> {
    require_same_dim(mu, nu)?;
    let (m, n, d) = (mu.len(), nu.len(), mu.dim());

    let mut lp = LpBuilder::new();
    for _ in 0..m * n {
        lp.add_var(0.0);
    }
    let var = |i: usize, j: usize| i * n + j;

    // Row marginals, column marginals, then barycenter rows (i-major).
    for (i, &w) in mu.weights().iter().enumerate() {
        let coeffs = (0..n).map(|j| (var(i, j), 1.0)).collect();
        lp.add_constraint(coeffs, Rel::Eq, w);
    }
    for (j, &w) in nu.weights().iter().enumerate() {
        let coeffs = (0..m).map(|i| (var(i, j), 1.0)).collect();
        lp.add_constraint(coeffs, Rel::Eq, w);
    }
    for (i, x) in mu.points().iter().enumerate() {
        for t in 0..d {
            let coeffs = (0..n)
                .map(|j| (var(i, j), nu.point(j).coords()[t] - x.coords()[t]))
                .collect();
            lp.add_constraint(coeffs, Rel::Eq, 0.0);
        }
    }

    match lp.solve()? {
        LpOutcome::Optimal { x, .. } => {
            let plan = Coupling::new(mu.clone(), nu.clone(), x)?;
            Ok(MartingaleSolution::Feasible(MartingaleCertificate::new(
                plan,
            )?))
        }
        LpOutcome::Infeasible { farkas, .. } => {
            let mu_multipliers = farkas[..m].to_vec();
            let nu_multipliers = farkas[m..m + n].to_vec();
            let barycenter_multipliers = (0..m)
                .map(|i| {
                    Point::new(
                        (0..d)
                            .map(|t| {
                                let raw = farkas[m + n + i * d + t];
                                if raw.is_finite() { raw } else { 0.0 }
                            })
                            .collect(),
                    )
                    .expect("multiplier coordinates are finite")
                })
                .collect();
            Ok(MartingaleSolution::Infeasible(FarkasRay {
                mu_multipliers,
                nu_multipliers,
                barycenter_multipliers,
            }))
        }
        LpOutcome::Unbounded => Err(Error::SolverFailure(
            "feasibility LP reported unbounded".to_string(),
        )),
    }
}

/// Solve the witness LP and return the optimal normalized max-affine witness.
///
/// The gap is always ≥ 0 (`f ≡ 0` is feasible); `gap > tol` certifies
/// `μ ≰c ν`. The convex self-consistency constraints are not carried in the
/// LP: the returned function is rebuilt as the max-affine envelope of the
/// optimal pieces, which attains the same objective and satisfies them by
/// construction.
pub fn solve_witness_lp(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<WitnessFunction> {
    require_same_dim(mu, nu)?;
    let (m, d) = (mu.len(), mu.dim());

    // Variable layout: v = vp − vm, g = gp − gm, w = wp − wm.
    let mut lp = LpBuilder::new();
    let vp: Vec<usize> = mu.weights().iter().map(|&w| lp.add_var(-w)).collect();
    let vm: Vec<usize> = mu.weights().iter().map(|&w| lp.add_var(w)).collect();
    let gp: Vec<usize> = (0..m * d).map(|_| lp.add_var(0.0)).collect();
    let gm: Vec<usize> = (0..m * d).map(|_| lp.add_var(0.0)).collect();
    let wp: Vec<usize> = nu.weights().iter().map(|&w| lp.add_var(w)).collect();
    let wm: Vec<usize> = nu.weights().iter().map(|&w| lp.add_var(-w)).collect();

    // Domination: wⱼ − vᵢ − gᵢ·(yⱼ − xᵢ) ≥ 0.
    for (i, x) in mu.points().iter().enumerate() {
        for (j, y) in nu.points().iter().enumerate() {
            let mut coeffs = vec![
                (wp[j], 1.0),
                (wm[j], -1.0),
                (vp[i], -1.0),
                (vm[i], 1.0),
            ];
            for t in 0..d {
                let delta = y.coords()[t] - x.coords()[t];
                if delta != 0.0 {
                    coeffs.push((gp[i * d + t], -delta));
                    coeffs.push((gm[i * d + t], delta));
                }
            }
            lp.add_constraint(coeffs, Rel::Ge, 0.0);
        }
    }
    // Slope box: |g| ≤ 1 componentwise via gp + gm ≤ 1.
    for k in 0..m * d {
        lp.add_constraint(vec![(gp[k], 1.0), (gm[k], 1.0)], Rel::Le, 1.0);
    }
    // Translation anchor: Σᵢ μᵢvᵢ = 0.
    let anchor = mu
        .weights()
        .iter()
        .enumerate()
        .flat_map(|(i, &w)| [(vp[i], w), (vm[i], -w)])
        .collect();
    lp.add_constraint(anchor, Rel::Eq, 0.0);

    let (x, value) = match lp.solve()? {
        LpOutcome::Optimal { x, value } => (x, value),
        LpOutcome::Infeasible { residual, .. } => {
            return Err(Error::SolverFailure(format!(
                "witness LP reported infeasible (residual {residual:.3e}) but f ≡ 0 is feasible"
            )))
        }
        LpOutcome::Unbounded => {
            return Err(Error::SolverFailure(
                "witness LP reported unbounded despite slope caps".to_string(),
            ))
        }
    };
    let lp_gap = -value;

    let raw_values: Vec<f64> = (0..m).map(|i| x[vp[i]] - x[vm[i]]).collect();
    // Tableau dust can push |g| past 1 by ~1e-10; the clamped slopes still
    // describe a feasible witness, so the optimum is unaffected.
    let raw_slopes: Vec<Point> = (0..m)
        .map(|i| {
            Point::new(
                (0..d)
                    .map(|t| (x[gp[i * d + t]] - x[gm[i * d + t]]).clamp(-1.0, 1.0))
                    .collect(),
            )
            .expect("slopes are finite")
        })
        .collect();

    // Max-affine envelope of the optimal pieces: values become f(xₖ), and the
    // slope at xₖ is the slope of the (lowest-index) active piece, a genuine
    // subgradient there. This cannot change the objective at the optimum.
    let mut values = Vec::with_capacity(m);
    let mut slopes = Vec::with_capacity(m);
    for xk in mu.points() {
        let mut best = f64::NEG_INFINITY;
        let mut active = 0usize;
        for i in 0..m {
            let val = raw_values[i] + raw_slopes[i].dot_diff(xk, mu.point(i));
            if val > best {
                best = val;
                active = i;
            }
        }
        values.push(best);
        slopes.push(raw_slopes[active].clone());
    }
    let shift: f64 = values
        .iter()
        .zip(mu.weights())
        .map(|(v, w)| v * w)
        .sum();
    for v in &mut values {
        *v -= shift;
    }

    let mut witness = WitnessFunction::new(mu.points().to_vec(), values, slopes, 0.0)?;
    let gap = witness.integrate(mu)? - witness.integrate(nu)?;
    if (gap - lp_gap).abs() > 1e-9 * (1.0 + lp_gap.abs()) {
        return Err(Error::SolverFailure(format!(
            "witness envelope gap {gap:.12e} drifted from LP optimum {lp_gap:.12e}"
        )));
    }
    // The exact optimum is ≥ 0 (f ≡ 0 is feasible); suppress fp dust.
    witness.gap = if gap < 0.0 { 0.0 } else { gap };
    Ok(witness)
}

/// Decide `μ ≤c ν` at the default tolerance [`DEFAULT_TOL`].
pub fn check(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<OrderVerdict> {
    check_with_tol(mu, nu, DEFAULT_TOL)
}

/// Decide `μ ≤c ν` with an explicit gap tolerance.
///
/// Runs the witness LP first (always feasible and bounded). A gap above `tol`
/// settles the question negatively with the witness as certificate; otherwise
/// the martingale LP must be feasible, and its basic solution is the positive
/// certificate. If the two LPs disagree — the instance sits inside the
/// tolerance band — the conflict is reported as
/// [`Error::NumericalInconsistency`], never silently resolved.
pub fn check_with_tol(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    tol: f64,
) -> Result<OrderVerdict> {
    let witness = solve_witness_lp(mu, nu)?;
    if witness.gap() > tol {
        return Ok(OrderVerdict::NotOrdered(witness));
    }
    match solve_martingale_lp(mu, nu)? {
        MartingaleSolution::Feasible(cert) => Ok(OrderVerdict::Ordered(cert)),
        MartingaleSolution::Infeasible(ray) => Err(Error::NumericalInconsistency(format!(
            "witness gap {:.3e} ≤ tol {:.1e} but martingale LP infeasible (ray objective {:.3e})",
            witness.gap(),
            tol,
            ray.objective(mu, nu)
        ))),
    }
}
