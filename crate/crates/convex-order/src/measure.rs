//! Finitely supported probability measures on ℝᵈ and couplings between them.
//!
//! A [`DiscreteMeasure`] is a list of pairwise distinct support points with
//! strictly positive weights summing to 1. Measures are immutable after
//! construction and every operation here is a pure function, so values can be
//! shared freely across threads.
//!
//! The module also owns the measure file format consumed and produced by the
//! CLI: a JSON object
//!
//! ```json
//! {"dimension": 2, "points": [[0.0, 0.0], [1.0, 2.0]], "weights": [0.5, 0.5]}
//! ```
//!
//! where `weights` may be omitted for the uniform distribution on `points`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance on the total mass of a measure.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Absolute tolerance on coupling marginals.
pub const MARGINAL_TOL: f64 = 1e-9;
/// Entries of a coupling may undershoot zero by at most this much; anything
/// in `(-NEGATIVE_MASS_TOL, 0)` is clamped to zero on construction.
pub const NEGATIVE_MASS_TOL: f64 = 1e-12;

/// A point of ℝᵈ with finite coordinates, `d ≥ 1`.
///
/// Used for support points of measures, pushforward images, and witness
/// subgradients alike.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "point coordinate",
            });
        }
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Squared Euclidean norm |x|².
    pub fn sq_norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    /// ∞-norm.
    pub fn inf_norm(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Squared Euclidean distance |x − y|².
    pub fn sq_dist(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Inner product x·y.
    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    /// Inner product with a difference, self·(a − b), without allocating.
    pub fn dot_diff(&self, a: &Point, b: &Point) -> f64 {
        debug_assert_eq!(self.dim(), a.dim());
        debug_assert_eq!(self.dim(), b.dim());
        self.coords
            .iter()
            .zip(a.coords.iter().zip(&b.coords))
            .map(|(g, (x, y))| g * (x - y))
            .sum()
    }

    /// ∞-distance max_k |x_k − y_k|.
    pub fn inf_dist(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Options for [`DiscreteMeasure::build`].
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    /// Rescale weights by their total mass instead of requiring it to be 1.
    /// Normalization is opt-in, never silent.
    pub normalize: bool,
    /// Points within this ∞-distance of an earlier point are merged into it,
    /// weights summed. The default `0.0` merges exact duplicates only.
    pub merge_tol: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            normalize: false,
            merge_tol: 0.0,
        }
    }
}

/// A finitely supported probability measure on ℝᵈ.
///
/// Invariants, guaranteed by every constructor:
/// * all weights are strictly positive (zero-mass atoms are dropped),
/// * weights sum to 1 within [`WEIGHT_SUM_TOL`],
/// * support points are pairwise distinct (duplicates merged, weights summed),
/// * every point has length equal to [`DiscreteMeasure::dim`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Build a measure from raw atoms, applying merge / drop / normalization
    /// rules from `opts`.
    pub fn build(points: Vec<Point>, weights: Vec<f64>, opts: BuildOptions) -> Result<Self> {
        if points.is_empty() || weights.is_empty() {
            return Err(Error::Empty);
        }
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: weights.len(),
            });
        }
        let dim = points[0].dim();
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { what: "weight" });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { index, weight: w });
            }
        }

        // Merge duplicates into the first occurrence; drop zero-mass atoms.
        let mut merged_points: Vec<Point> = Vec::new();
        let mut merged_weights: Vec<f64> = Vec::new();
        for (p, w) in points.into_iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            match merged_points
                .iter()
                .position(|q| q.inf_dist(&p) <= opts.merge_tol)
            {
                Some(k) => merged_weights[k] += w,
                None => {
                    merged_points.push(p);
                    merged_weights.push(w);
                }
            }
        }
        if merged_points.is_empty() {
            return Err(Error::Empty);
        }

        let total: f64 = merged_weights.iter().sum();
        if opts.normalize {
            if total <= 0.0 {
                return Err(Error::Empty);
            }
            for w in &mut merged_weights {
                *w /= total;
            }
        } else if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::NotNormalized { sum: total });
        }

        Ok(Self {
            dim,
            points: merged_points,
            weights: merged_weights,
        })
    }

    /// Build with default options: exact-duplicate merge, no normalization.
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        Self::build(points, weights, BuildOptions::default())
    }

    /// Convenience constructor from coordinate slices.
    pub fn from_coords(dim: usize, points: &[&[f64]], weights: &[f64]) -> Result<Self> {
        let pts = points
            .iter()
            .map(|c| {
                if c.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: c.len(),
                    });
                }
                Point::new(c.to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts, weights.to_vec())
    }

    /// The Dirac mass at `point`.
    pub fn dirac(point: Point) -> Self {
        Self {
            dim: point.dim(),
            points: vec![point],
            weights: vec![1.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least one atom
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Second moment ∫|x|² dμ = Σᵢ wᵢ|xᵢ|². Zero exactly for δ₀.
    pub fn second_moment(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * p.sq_norm())
            .sum()
    }

    /// Barycenter Σᵢ wᵢ xᵢ.
    pub fn mean(&self) -> Point {
        let mut m = vec![0.0; self.dim];
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (acc, c) in m.iter_mut().zip(p.coords()) {
                *acc += w * c;
            }
        }
        Point { coords: m }
    }

    /// Image measure under an atomwise map: mass `wᵢ` moves to `images[i]`,
    /// coincident images are merged exactly. The image dimension may differ
    /// from the source dimension but must be internally consistent.
    pub fn pushforward(&self, images: &[Point]) -> Result<DiscreteMeasure> {
        if images.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: images.len(),
            });
        }
        DiscreteMeasure::build(
            images.to_vec(),
            self.weights.clone(),
            BuildOptions::default(),
        )
    }

    /// Parse the measure file format. Omitted weights mean uniform.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: MeasureFile = serde_json::from_str(text)?;
        file.into_measure()
    }

    /// Serialize to the measure file format (weights always written).
    pub fn to_json_string(&self) -> String {
        let file = MeasureFile {
            dimension: self.dim,
            points: self.points.iter().map(|p| p.coords().to_vec()).collect(),
            weights: Some(self.weights.clone()),
        };
        serde_json::to_string(&file).expect("measure serialization cannot fail")
    }
}

/// On-disk measure schema. `weights` defaults to uniform when absent.
#[derive(Debug, Serialize, Deserialize)]
struct MeasureFile {
    dimension: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

impl MeasureFile {
    fn into_measure(self) -> Result<DiscreteMeasure> {
        if self.points.is_empty() {
            return Err(Error::Empty);
        }
        let pts = self
            .points
            .into_iter()
            .map(|c| {
                if c.len() != self.dimension {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension,
                        found: c.len(),
                    });
                }
                Point::new(c)
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = match self.weights {
            Some(w) => w,
            None => vec![1.0 / pts.len() as f64; pts.len()],
        };
        DiscreteMeasure::new(pts, weights)
    }
}

/// Marginal diagnostics for a coupling; see [`crate::transport::validate_coupling`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CouplingReport {
    /// max over rows i of |Σⱼ massᵢⱼ − left.weight(i)|
    pub max_row_error: f64,
    /// max over columns j of |Σᵢ massᵢⱼ − right.weight(j)|
    pub max_col_error: f64,
    /// smallest entry of the mass matrix
    pub min_entry: f64,
    /// true iff both marginal errors are within [`MARGINAL_TOL`] and
    /// `min_entry ≥ −NEGATIVE_MASS_TOL`
    pub pass: bool,
}

/// A joint probability matrix over two support sets with prescribed marginals:
/// an element of Π(left, right).
#[derive(Debug, Clone)]
pub struct Coupling {
    left: DiscreteMeasure,
    right: DiscreteMeasure,
    /// row-major, `left.len() × right.len()`
    mass: Vec<f64>,
}

impl Coupling {
    /// Validated constructor: marginals must match within [`MARGINAL_TOL`] and
    /// entries must be ≥ −[`NEGATIVE_MASS_TOL`]. Tiny negative entries are
    /// clamped to zero.
    pub fn new(left: DiscreteMeasure, right: DiscreteMeasure, mass: Vec<f64>) -> Result<Self> {
        let c = Self::new_unchecked(left, right, mass);
        let report = c.marginal_report();
        if !report.pass {
            return Err(Error::InvalidCoupling(format!(
                "row error {:.3e}, column error {:.3e}, min entry {:.3e}",
                report.max_row_error, report.max_col_error, report.min_entry
            )));
        }
        Ok(c.clamped())
    }

    /// Unvalidated constructor, for diagnostics and tests of defective plans.
    /// Panics if the matrix shape does not match the marginals.
    pub fn new_unchecked(left: DiscreteMeasure, right: DiscreteMeasure, mass: Vec<f64>) -> Self {
        assert_eq!(
            mass.len(),
            left.len() * right.len(),
            "coupling matrix must be m×n row-major"
        );
        Self { left, right, mass }
    }

    /// The product coupling left ⊗ right.
    pub fn product(left: DiscreteMeasure, right: DiscreteMeasure) -> Self {
        let mut mass = Vec::with_capacity(left.len() * right.len());
        for &a in left.weights() {
            for &b in right.weights() {
                mass.push(a * b);
            }
        }
        Self { left, right, mass }
    }

    /// The identity coupling of a measure with itself.
    pub fn diagonal(m: DiscreteMeasure) -> Self {
        let n = m.len();
        let mut mass = vec![0.0; n * n];
        for (i, &w) in m.weights().iter().enumerate() {
            mass[i * n + i] = w;
        }
        Self {
            left: m.clone(),
            right: m,
            mass,
        }
    }

    pub fn left(&self) -> &DiscreteMeasure {
        &self.left
    }

    pub fn right(&self) -> &DiscreteMeasure {
        &self.right
    }

    pub fn rows(&self) -> usize {
        self.left.len()
    }

    pub fn cols(&self) -> usize {
        self.right.len()
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.right.len() + j]
    }

    /// Iterator over strictly positive entries as `(i, j, mass)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.right.len();
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(move |(k, &m)| (k / n, k % n, m))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let (m, n) = (self.rows(), self.cols());
        (0..m)
            .map(|i| (0..n).map(|j| self.mass[i * n + j]).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let (m, n) = (self.rows(), self.cols());
        (0..n)
            .map(|j| (0..m).map(|i| self.mass[i * n + j]).sum())
            .collect()
    }

    /// Marginal and nonnegativity diagnostics.
    pub fn marginal_report(&self) -> CouplingReport {
        let max_row_error = self
            .row_sums()
            .iter()
            .zip(self.left.weights())
            .fold(0.0f64, |m, (s, w)| m.max((s - w).abs()));
        let max_col_error = self
            .col_sums()
            .iter()
            .zip(self.right.weights())
            .fold(0.0f64, |m, (s, w)| m.max((s - w).abs()));
        let min_entry = self.mass.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        CouplingReport {
            max_row_error,
            max_col_error,
            min_entry,
            pass: max_row_error <= MARGINAL_TOL
                && max_col_error <= MARGINAL_TOL
                && min_entry >= -NEGATIVE_MASS_TOL,
        }
    }

    fn clamped(mut self) -> Self {
        for m in &mut self.mass {
            if *m < 0.0 {
                *m = 0.0;
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn single_dirac() {
        let m = DiscreteMeasure::from_coords(2, &[&[0.0, 0.0]], &[1.0]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn duplicate_atoms_merge() {
        let m = DiscreteMeasure::from_coords(1, &[&[1.0], &[1.0]], &[0.5, 0.5]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.weight(0), 1.0);
        assert_eq!(m.point(0).coords(), &[1.0]);
    }

    #[test]
    fn normalize_rescales_total_mass() {
        let m = DiscreteMeasure::build(
            vec![pt(&[0.0]), pt(&[2.0])],
            vec![2.0, 2.0],
            BuildOptions {
                normalize: true,
                merge_tol: 0.0,
            },
        )
        .unwrap();
        assert_eq!(m.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn unnormalized_sum_is_rejected() {
        let err = DiscreteMeasure::from_coords(1, &[&[0.0], &[2.0]], &[2.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { sum } if (sum - 4.0).abs() < 1e-15));
    }

    #[test]
    fn negative_weight_is_rejected() {
        let err = DiscreteMeasure::from_coords(1, &[&[0.0], &[1.0]], &[1.5, -0.5]).unwrap_err();
        assert!(matches!(err, Error::NegativeWeight { index: 1, .. }));
    }

    #[test]
    fn ragged_points_are_rejected() {
        let err = DiscreteMeasure::new(
            vec![pt(&[0.0, 0.0]), pt(&[1.0])],
            vec![0.5, 0.5],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn zero_weight_atoms_are_dropped() {
        let m = DiscreteMeasure::from_coords(1, &[&[0.0], &[5.0]], &[1.0, 0.0]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.point(0).coords(), &[0.0]);
    }

    #[test]
    fn all_mass_removed_is_empty() {
        let err = DiscreteMeasure::from_coords(1, &[&[0.0]], &[0.0]).unwrap_err();
        assert!(matches!(err, Error::Empty));
    }

    #[test]
    fn merge_tol_clusters_noisy_atoms() {
        let m = DiscreteMeasure::build(
            vec![pt(&[1.0]), pt(&[1.0 + 1e-7]), pt(&[2.0])],
            vec![0.25, 0.25, 0.5],
            BuildOptions {
                normalize: false,
                merge_tol: 1e-6,
            },
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        // first occurrence is the representative
        assert_eq!(m.point(0).coords(), &[1.0]);
        assert!((m.weight(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nan_coordinates_are_rejected() {
        assert!(matches!(
            Point::new(vec![f64::NAN]).unwrap_err(),
            Error::NonFinite { .. }
        ));
        assert!(matches!(
            Point::new(vec![f64::INFINITY]).unwrap_err(),
            Error::NonFinite { .. }
        ));
    }

    #[test]
    fn second_moment_examples() {
        let dirac = DiscreteMeasure::from_coords(2, &[&[3.0, 4.0]], &[1.0]).unwrap();
        assert_eq!(dirac.second_moment(), 25.0);

        let sym = DiscreteMeasure::from_coords(1, &[&[-1.0], &[1.0]], &[0.5, 0.5]).unwrap();
        assert_eq!(sym.second_moment(), 1.0);

        let zero = DiscreteMeasure::from_coords(2, &[&[0.0, 0.0]], &[1.0]).unwrap();
        assert_eq!(zero.second_moment(), 0.0);
    }

    #[test]
    fn mean_examples() {
        let dirac = DiscreteMeasure::from_coords(2, &[&[3.0, 4.0]], &[1.0]).unwrap();
        assert_eq!(dirac.mean().coords(), &[3.0, 4.0]);

        let sym = DiscreteMeasure::from_coords(1, &[&[-1.0], &[1.0]], &[0.5, 0.5]).unwrap();
        assert_eq!(sym.mean().coords(), &[0.0]);

        let weighted = DiscreteMeasure::from_coords(1, &[&[0.0], &[4.0]], &[0.25, 0.75]).unwrap();
        assert_eq!(weighted.mean().coords(), &[3.0]);
    }

    #[test]
    fn pushforward_examples() {
        let sym = DiscreteMeasure::from_coords(1, &[&[-1.0], &[1.0]], &[0.5, 0.5]).unwrap();

        // identity map
        let id = sym.pushforward(&[pt(&[-1.0]), pt(&[1.0])]).unwrap();
        assert_eq!(id, sym);

        // constant map merges atoms
        let collapsed = sym.pushforward(&[pt(&[0.0]), pt(&[0.0])]).unwrap();
        assert_eq!(collapsed.len(), 1);
        assert_eq!(collapsed.weight(0), 1.0);

        let weighted = DiscreteMeasure::from_coords(1, &[&[0.0], &[4.0]], &[0.25, 0.75]).unwrap();
        let one = weighted.pushforward(&[pt(&[1.0]), pt(&[1.0])]).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.point(0).coords(), &[1.0]);
    }

    #[test]
    fn pushforward_length_mismatch() {
        let sym = DiscreteMeasure::from_coords(1, &[&[-1.0], &[1.0]], &[0.5, 0.5]).unwrap();
        assert!(sym.pushforward(&[pt(&[0.0])]).is_err());
    }

    #[test]
    fn json_roundtrip_and_uniform_default() {
        let m = DiscreteMeasure::from_coords(2, &[&[0.5, -1.25], &[3.0, 0.1]], &[0.3, 0.7]).unwrap();
        let text = m.to_json_string();
        let back = DiscreteMeasure::from_json_str(&text).unwrap();
        assert_eq!(m, back);

        let uniform =
            DiscreteMeasure::from_json_str(r#"{"dimension":1,"points":[[0.0],[1.0]]}"#).unwrap();
        assert_eq!(uniform.weights(), &[0.5, 0.5]);

        assert!(DiscreteMeasure::from_json_str(
            r#"{"dimension":2,"points":[[0.0],[1.0]]}"#
        )
        .is_err());
    }

    #[test]
    fn product_coupling_marginals_are_exact() {
        let a = DiscreteMeasure::from_coords(1, &[&[0.0], &[1.0]], &[0.25, 0.75]).unwrap();
        let b = DiscreteMeasure::from_coords(1, &[&[-1.0], &[2.0]], &[0.5, 0.5]).unwrap();
        let c = Coupling::product(a, b);
        let report = c.marginal_report();
        assert!(report.pass);
        assert_eq!(report.max_row_error, 0.0);
        assert_eq!(report.max_col_error, 0.0);
    }

    #[test]
    fn defective_coupling_is_rejected_by_new() {
        let a = DiscreteMeasure::from_coords(1, &[&[0.0]], &[1.0]).unwrap();
        let b = DiscreteMeasure::from_coords(1, &[&[1.0]], &[1.0]).unwrap();
        let err = Coupling::new(a, b, vec![1.0 - 1e-3]).unwrap_err();
        assert!(matches!(err, Error::InvalidCoupling(_)));
    }
}
