//! ℓ₂-minimal numerical differentiation formulas on scattered stencils.
//!
//! For a linear differential operator `D` of order `k` and a stencil
//! `{x_j}` around `z`, a formula `D̂f(z) = Σ_j w_j f(x_j) + w_c f(z)` is
//! required to be exact for all bivariate polynomials of total degree
//! `≤ q - 1`. Among all such formulas the weights minimizing
//!
//! ```text
//! Σ_j w_j² ‖x_j - z‖^(2μ)
//! ```
//!
//! are selected. The constant polynomial is handled by the center weight
//! `w_c = D[1](z) - Σ_j w_j`, which leaves a strictly convex problem in the
//! neighbour weights with one equality constraint per monomial
//! `(x - z)^α`, `1 ≤ |α| ≤ q - 1`. Its solution is
//! `w = Ω⁻¹ Pᵀ (P Ω⁻¹ Pᵀ)⁻¹ b` with `Ω = diag(‖x_j - z‖^(2μ))`.
//!
//! For homogeneous operators the weights scale like `h^-k` under
//! `x_j ↦ z + v + h (x_j - z)` and are unaffected by the translation `v`.

use crate::error::{Error, Result};
use crate::geometry::{Point2, Stencil};
use crate::linalg;
use crate::scalar::Real;

/// Exponent `α = (α₁, α₂)` of `∂^α = ∂^{α₁}_x ∂^{α₂}_y` or of `(x-z)^α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub dx: u32,
    pub dy: u32,
}

impl MultiIndex {
    pub const fn new(dx: u32, dy: u32) -> Self {
        Self { dx, dy }
    }

    pub const fn order(self) -> u32 {
        self.dx + self.dy
    }

    /// `α! = α₁! α₂!`
    pub fn factorial(self) -> f64 {
        let f = |n: u32| (1..=n).fold(1.0, |acc, i| acc * i as f64);
        f(self.dx) * f(self.dy)
    }

    /// `(x, y)^α`
    pub fn eval<T: Real>(self, p: Point2<T>) -> T {
        p.x.powi(self.dx as i32) * p.y.powi(self.dy as i32)
    }
}

/// Monomial exponents of total degree `1..=q-1`, ordered by degree then by
/// descending `x` power.
pub fn exactness_monomials(q: u32) -> Vec<MultiIndex> {
    (1..q)
        .flat_map(|deg| (0..=deg).rev().map(move |dx| MultiIndex::new(dx, deg - dx)))
        .collect()
}

/// A linear differential operator with constant coefficients,
/// `D = Σ_α c_α ∂^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec<T> {
    terms: Vec<(MultiIndex, T)>,
    order: u32,
}

impl<T: Real> OperatorSpec<T> {
    /// Builds an operator from `(α, c_α)` pairs. Repeated exponents are
    /// summed and zero coefficients dropped. The operator must have order at
    /// least one.
    pub fn new(terms: impl IntoIterator<Item = (MultiIndex, T)>) -> Result<Self> {
        let mut merged: Vec<(MultiIndex, T)> = Vec::new();
        for (alpha, c) in terms {
            if !c.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite coefficient for {alpha:?}")));
            }
            match merged.iter_mut().find(|(a, _)| *a == alpha) {
                Some((_, acc)) => *acc = *acc + c,
                None => merged.push((alpha, c)),
            }
        }
        merged.retain(|(_, c)| *c != T::zero());
        merged.sort_by_key(|(a, _)| *a);
        let order = merged.iter().map(|(a, _)| a.order()).max().unwrap_or(0);
        if order == 0 {
            return Err(Error::InvalidConfig("operator must have order >= 1".into()));
        }
        Ok(Self { terms: merged, order })
    }

    pub fn partial_x() -> Self {
        Self {
            terms: vec![(MultiIndex::new(1, 0), T::one())],
            order: 1,
        }
    }

    pub fn partial_y() -> Self {
        Self {
            terms: vec![(MultiIndex::new(0, 1), T::one())],
            order: 1,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &[(MultiIndex, T)] {
        &self.terms
    }

    pub fn coefficient(&self, alpha: MultiIndex) -> T {
        self.terms
            .iter()
            .find(|(a, _)| *a == alpha)
            .map_or(T::zero(), |(_, c)| *c)
    }

    /// True when only top-order derivatives appear.
    pub fn is_homogeneous(&self) -> bool {
        self.terms.iter().all(|(a, _)| a.order() == self.order)
    }

    /// `D[(x - z)^α](z) = c_α α!`; every other derivative of the centered
    /// monomial vanishes at `z`.
    pub fn on_centered_monomial(&self, alpha: MultiIndex) -> T {
        self.coefficient(alpha) * T::lit(alpha.factorial())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MndfConfig<T> {
    /// Formulas are exact for polynomials of total degree `< exactness_q`.
    pub exactness_q: u32,
    /// Distance exponent `μ` in the minimized seminorm.
    pub exponent_mu: T,
}

impl<T: Real> Default for MndfConfig<T> {
    fn default() -> Self {
        Self {
            exactness_q: 2,
            exponent_mu: T::one(),
        }
    }
}

impl<T: Real> MndfConfig<T> {
    pub fn validate(&self, order_k: u32) -> Result<()> {
        if self.exactness_q <= order_k {
            return Err(Error::InvalidConfig(format!(
                "exactness order q = {} must exceed operator order {order_k}",
                self.exactness_q
            )));
        }
        if !(self.exponent_mu > T::zero()) || !self.exponent_mu.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "seminorm exponent must be positive, got {}",
                self.exponent_mu
            )));
        }
        Ok(())
    }

    /// Dimension of the polynomial space of total degree `< q`.
    pub fn polynomial_dim(&self) -> usize {
        let q = self.exactness_q as usize;
        q * (q + 1) / 2
    }
}

/// Weights of one scalar formula, aligned with the stencil's neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarWeights<T> {
    pub weights: Vec<T>,
    /// Implicit weight of the center value.
    pub center_weight: T,
    /// Achieved `sqrt(Σ_j w_j² d_j^(2μ))`.
    pub seminorm: T,
}

impl<T: Real> ScalarWeights<T> {
    /// `Σ_j w_j f(x_j) + w_c f(z)`
    pub fn apply(&self, center_value: T, neighbor_values: &[T]) -> T {
        debug_assert_eq!(neighbor_values.len(), self.weights.len());
        self.weights
            .iter()
            .zip(neighbor_values)
            .fold(self.center_weight * center_value, |acc, (&w, &f)| acc + w * f)
    }
}

/// Vector weights `w_j = (w_{j,1}, w_{j,2})` of a gradient formula.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientWeights<T> {
    pub dx: ScalarWeights<T>,
    pub dy: ScalarWeights<T>,
}

impl<T: Real> GradientWeights<T> {
    pub fn apply(&self, center_value: T, neighbor_values: &[T]) -> Point2<T> {
        Point2::new(
            self.dx.apply(center_value, neighbor_values),
            self.dy.apply(center_value, neighbor_values),
        )
    }

    pub fn len(&self) -> usize {
        self.dx.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dx.weights.is_empty()
    }
}

/// Minimal formula for `op` on `stencil`.
///
/// Internally the offsets are divided by the stencil radius so the normal
/// matrix is O(1) regardless of the sampling density; the returned weights
/// refer to the unscaled stencil.
pub fn solve_mndf<T: Real>(
    stencil: &Stencil<T>,
    op: &OperatorSpec<T>,
    cfg: &MndfConfig<T>,
) -> Result<ScalarWeights<T>> {
    cfg.validate(op.order())?;
    let monomials = exactness_monomials(cfg.exactness_q);
    let m = monomials.len();
    let n = stencil.len();
    if n < m {
        return Err(Error::SingularConstraints);
    }

    let scale = stencil.radius();
    let two_mu = cfg.exponent_mu + cfg.exponent_mu;
    let inv_omega: Vec<T> = stencil
        .distances()
        .iter()
        .map(|&d| (d / scale).powf(two_mu).recip())
        .collect();

    // Row a of P: monomial a evaluated at the scaled offsets.
    let mut p = vec![T::zero(); m * n];
    for (a, alpha) in monomials.iter().enumerate() {
        for (j, &o) in stencil.offsets().iter().enumerate() {
            p[a * n + j] = alpha.eval(o * scale.recip());
        }
    }
    let mut rhs: Vec<T> = monomials
        .iter()
        .map(|&alpha| op.on_centered_monomial(alpha) / scale.powi(alpha.order() as i32))
        .collect();

    let mut gram = vec![T::zero(); m * m];
    for a in 0..m {
        for b in a..m {
            let v = (0..n).fold(T::zero(), |acc, j| acc + p[a * n + j] * inv_omega[j] * p[b * n + j]);
            gram[a * m + b] = v;
            gram[b * m + a] = v;
        }
    }
    linalg::solve_in_place(&mut gram, &mut rhs, m).map_err(|_| Error::SingularConstraints)?;
    let lambda = rhs;

    let weights: Vec<T> = (0..n)
        .map(|j| inv_omega[j] * (0..m).fold(T::zero(), |acc, a| acc + p[a * n + j] * lambda[a]))
        .collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::SingularConstraints);
    }
    let sum = weights.iter().fold(T::zero(), |acc, &w| acc + w);
    let center_weight = op.coefficient(MultiIndex::new(0, 0)) - sum;
    let seminorm = weights
        .iter()
        .zip(stencil.distances())
        .fold(T::zero(), |acc, (&w, &d)| acc + w * w * d.powf(two_mu))
        .sqrt();
    Ok(ScalarWeights {
        weights,
        center_weight,
        seminorm,
    })
}

/// Minimal formulas for `∂/∂x` and `∂/∂y`.
pub fn solve_gradient<T: Real>(stencil: &Stencil<T>, cfg: &MndfConfig<T>) -> Result<GradientWeights<T>> {
    Ok(GradientWeights {
        dx: solve_mndf(stencil, &OperatorSpec::partial_x(), cfg)?,
        dy: solve_mndf(stencil, &OperatorSpec::partial_y(), cfg)?,
    })
}

/// Local sample `{z + v + h (x_j - z)}`; see [`Stencil::scaled`].
pub fn scale_stencil<T: Real>(stencil: &Stencil<T>, h: T, translation: Point2<T>) -> Result<Stencil<T>> {
    stencil.scaled(h, translation)
}

/// Growth factor `h^(k - e) Σ_j |w_j| ‖x_j - z‖^e` for exponent `e = r + γ`.
pub fn growth_factor<T: Real>(stencil: &Stencil<T>, weights: &ScalarWeights<T>, order_k: u32, exponent: T) -> T {
    let h = stencil.radius();
    let sum = weights
        .weights
        .iter()
        .zip(stencil.distances())
        .fold(T::zero(), |acc, (&w, &d)| acc + w.abs() * d.powf(exponent));
    h.powf(T::from_u32(order_k).expect("small integer") - exponent) * sum
}

/// Residuals `Σ_j w_j p(x_j) + w_c p(z) - Dp(z)` for `p = (x - z)^α`, over
/// the constant monomial followed by [`exactness_monomials`].
pub fn exactness_residuals<T: Real>(
    stencil: &Stencil<T>,
    op: &OperatorSpec<T>,
    exactness_q: u32,
    weights: &ScalarWeights<T>,
) -> Vec<T> {
    std::iter::once(MultiIndex::new(0, 0))
        .chain(exactness_monomials(exactness_q))
        .map(|alpha| {
            let at_center = if alpha.order() == 0 {
                weights.center_weight
            } else {
                T::zero()
            };
            let sum = weights
                .weights
                .iter()
                .zip(stencil.offsets())
                .fold(at_center, |acc, (&w, &o)| acc + w * alpha.eval(o));
            sum - op.on_centered_monomial(alpha)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    fn cross(h: f64) -> Stencil<f64> {
        Stencil::from_points(p(0., 0.), &[p(h, 0.), p(-h, 0.), p(0., h), p(0., -h)]).unwrap()
    }

    #[test]
    fn monomials_for_q3() {
        let m = exactness_monomials(3);
        assert_eq!(
            m,
            vec![
                MultiIndex::new(1, 0),
                MultiIndex::new(0, 1),
                MultiIndex::new(2, 0),
                MultiIndex::new(1, 1),
                MultiIndex::new(0, 2)
            ]
        );
        assert!(exactness_monomials(1).is_empty());
    }

    #[test]
    fn cross_stencil_gives_central_differences() {
        let st = cross(0.1);
        let w = solve_mndf(&st, &OperatorSpec::partial_x(), &MndfConfig::default()).unwrap();
        let want = [5.0, -5.0, 0.0, 0.0];
        for (a, b) in w.weights.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{:?}", w.weights);
        }
        assert!(w.center_weight.abs() < 1e-12);

        let g = solve_gradient(&st, &MndfConfig::default()).unwrap();
        let want_y = [0.0, 0.0, 5.0, -5.0];
        for (a, b) in g.dy.weights.iter().zip(want_y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_function_gradient_is_exact() {
        let st = Stencil::from_points(
            p(0.2, 0.3),
            &[
                p(0.25, 0.31),
                p(0.18, 0.35),
                p(0.22, 0.24),
                p(0.15, 0.28),
                p(0.27, 0.36),
                p(0.21, 0.33),
            ],
        )
        .unwrap();
        let g = solve_gradient(&st, &MndfConfig::default()).unwrap();
        let f = |q: Point2<f64>| 3.0 * q.x + 4.0 * q.y + 7.0;
        let vals: Vec<f64> = st.neighbors().map(f).collect();
        let grad = g.apply(f(st.center()), &vals);
        assert!((grad.x - 3.0).abs() < 1e-9 && (grad.y - 4.0).abs() < 1e-9, "{grad:?}");
    }

    #[test]
    fn symmetric_quadratic_cancels() {
        let st = cross(0.1);
        let g = solve_gradient(&st, &MndfConfig::default()).unwrap();
        let vals: Vec<f64> = st.neighbors().map(|q| q.x * q.x).collect();
        assert!(g.apply(0.0, &vals).x.abs() < 1e-12);
    }

    #[test]
    fn collinear_stencil_is_singular() {
        let st = Stencil::from_points(p(0., 0.), &[p(1., 0.), p(2., 0.), p(-1., 0.), p(3., 0.)]).unwrap();
        assert_eq!(
            solve_mndf(&st, &OperatorSpec::partial_x(), &MndfConfig::default()).unwrap_err(),
            Error::SingularConstraints
        );
        let tiny = Stencil::from_points(p(0., 0.), &[p(1., 0.)]).unwrap();
        assert_eq!(
            solve_gradient(&tiny, &MndfConfig::default()).unwrap_err(),
            Error::SingularConstraints
        );
    }

    #[test]
    fn config_validation() {
        let st = cross(1.0);
        let bad_q = MndfConfig {
            exactness_q: 1,
            exponent_mu: 1.0,
        };
        assert!(matches!(solve_gradient(&st, &bad_q), Err(Error::InvalidConfig(_))));
        let bad_mu = MndfConfig {
            exactness_q: 2,
            exponent_mu: 0.0,
        };
        assert!(matches!(solve_gradient(&st, &bad_mu), Err(Error::InvalidConfig(_))));
        assert!(OperatorSpec::<f64>::new([(MultiIndex::new(0, 0), 1.0)]).is_err());
    }

    #[test]
    fn operator_with_lower_order_term() {
        // D = ∂x + 2·id: exact on constants through the center weight.
        let op = OperatorSpec::new([(MultiIndex::new(1, 0), 1.0), (MultiIndex::new(0, 0), 2.0)]).unwrap();
        assert_eq!(op.order(), 1);
        assert!(!op.is_homogeneous());
        let st = cross(0.5);
        let w = solve_mndf(&st, &op, &MndfConfig::default()).unwrap();
        for r in exactness_residuals(&st, &op, 2, &w) {
            assert!(r.abs() < 1e-12);
        }
        assert!((w.center_weight - 2.0).abs() < 1e-12);
    }

    #[test]
    fn growth_factor_of_central_difference_is_one() {
        for h in [1.0, 0.1, 0.003] {
            let st = cross(h);
            let w = solve_mndf(&st, &OperatorSpec::partial_x(), &MndfConfig::default()).unwrap();
            assert!((growth_factor(&st, &w, 1, 2.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seminorm_matches_definition() {
        let st = cross(0.1);
        let w = solve_mndf(&st, &OperatorSpec::partial_x(), &MndfConfig::default()).unwrap();
        // 2 · 5² · 0.1²
        assert!((w.seminorm - (0.5f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_precision_works() {
        let st = Stencil::from_points(
            Point2::new(0.0f32, 0.0),
            &[
                Point2::new(0.1, 0.0),
                Point2::new(-0.1, 0.0),
                Point2::new(0.0, 0.1),
                Point2::new(0.0, -0.1),
            ],
        )
        .unwrap();
        let w = solve_mndf(&st, &OperatorSpec::partial_x(), &MndfConfig::default()).unwrap();
        assert!((w.weights[0] - 5.0).abs() < 1e-4);
    }
}
