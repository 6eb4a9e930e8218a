//! Natural C² parametric cubic spline interpolation with chord-length
//! parameterization.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::narrower::FaultPolyline;
use crate::scalar::Real;

/// Default number of samples drawn from a reconstructed curve.
pub const DEFAULT_SAMPLES: usize = 500;
pub const MIN_SPLINE_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndCondition {
    /// Zero second derivative at both ends.
    Natural,
}

/// `a + b u + c u² + d u³` in the local parameter `u = t - t_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cubic<T> {
    a: T,
    b: T,
    c: T,
    d: T,
}

impl<T: Real> Cubic<T> {
    fn value(&self, u: T) -> T {
        self.a + u * (self.b + u * (self.c + u * self.d))
    }

    fn first(&self, u: T) -> T {
        self.b + u * (T::lit(2.0) * self.c + u * T::lit(3.0) * self.d)
    }

    fn second(&self, u: T) -> T {
        T::lit(2.0) * self.c + T::lit(6.0) * self.d * u
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineCurve<T> {
    knots: Vec<T>,
    x: Vec<Cubic<T>>,
    y: Vec<Cubic<T>>,
    end_condition: EndCondition,
}

/// Natural spline through `values` at nondecreasing `knots` (`h_i > 0`).
fn natural_coefficients<T: Real>(knots: &[T], values: &[T]) -> Vec<Cubic<T>> {
    let n = knots.len() - 1;
    let h: Vec<T> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<T> = (0..n).map(|i| (values[i + 1] - values[i]) / h[i]).collect();

    // Second derivatives M_1..M_{n-1}; M_0 = M_n = 0. Thomas algorithm on the
    // diagonally dominant tridiagonal system.
    let mut m = vec![T::zero(); n + 1];
    if n >= 2 {
        let six = T::lit(6.0);
        let two = T::lit(2.0);
        let k = n - 1;
        let mut diag: Vec<T> = (1..n).map(|i| two * (h[i - 1] + h[i])).collect();
        let mut rhs: Vec<T> = (1..n).map(|i| six * (slope[i] - slope[i - 1])).collect();
        for r in 1..k {
            let f = h[r] / diag[r - 1];
            diag[r] = diag[r] - f * h[r];
            rhs[r] = rhs[r] - f * rhs[r - 1];
        }
        m[k] = rhs[k - 1] / diag[k - 1];
        for r in (0..k - 1).rev() {
            m[r + 1] = (rhs[r] - h[r + 1] * m[r + 2]) / diag[r];
        }
    }

    (0..n)
        .map(|i| Cubic {
            a: values[i],
            b: slope[i] - h[i] * (T::lit(2.0) * m[i] + m[i + 1]) / T::lit(6.0),
            c: m[i] / T::lit(2.0),
            d: (m[i + 1] - m[i]) / (T::lit(6.0) * h[i]),
        })
        .collect()
}

impl<T: Real> SplineCurve<T> {
    /// Interpolates `points` with `t_0 = 0` and `t_{i+1} - t_i = ‖p_{i+1} - p_i‖`.
    pub fn fit(points: &[Point2<T>]) -> Result<Self> {
        if points.len() < MIN_SPLINE_POINTS {
            return Err(Error::TooFewPoints {
                needed: MIN_SPLINE_POINTS,
                got: points.len(),
            });
        }
        if let Some(index) = points.windows(2).position(|w| !(w[0].distance(w[1]) > T::zero())) {
            return Err(Error::CoincidentPoints { index });
        }
        let mut knots = Vec::with_capacity(points.len());
        knots.push(T::zero());
        for w in points.windows(2) {
            let last = *knots.last().expect("nonempty");
            knots.push(last + w[0].distance(w[1]));
        }
        let xs: Vec<T> = points.iter().map(|p| p.x).collect();
        let ys: Vec<T> = points.iter().map(|p| p.y).collect();
        Ok(Self {
            x: natural_coefficients(&knots, &xs),
            y: natural_coefficients(&knots, &ys),
            knots,
            end_condition: EndCondition::Natural,
        })
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn end_condition(&self) -> EndCondition {
        self.end_condition
    }

    pub fn parameter_range(&self) -> (T, T) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Segment containing `t` (clamped to the parameter range) and the local
    /// parameter within it.
    fn locate(&self, t: T) -> (usize, T) {
        let (lo, hi) = self.parameter_range();
        let t = t.max(lo).min(hi);
        let seg = self
            .knots
            .partition_point(|&k| k <= t)
            .saturating_sub(1)
            .min(self.x.len() - 1);
        (seg, t - self.knots[seg])
    }

    pub fn eval(&self, t: T) -> Point2<T> {
        let (s, u) = self.locate(t);
        Point2::new(self.x[s].value(u), self.y[s].value(u))
    }

    pub fn derivative(&self, t: T) -> Point2<T> {
        let (s, u) = self.locate(t);
        Point2::new(self.x[s].first(u), self.y[s].first(u))
    }

    pub fn second_derivative(&self, t: T) -> Point2<T> {
        let (s, u) = self.locate(t);
        Point2::new(self.x[s].second(u), self.y[s].second(u))
    }

    /// Second derivative at interior knot `i` from the left and right pieces.
    pub fn second_derivative_jump(&self, i: usize) -> Option<(Point2<T>, Point2<T>)> {
        if i == 0 || i + 1 >= self.knots.len() {
            return None;
        }
        let h = self.knots[i] - self.knots[i - 1];
        let left = Point2::new(self.x[i - 1].second(h), self.y[i - 1].second(h));
        let right = Point2::new(self.x[i].second(T::zero()), self.y[i].second(T::zero()));
        Some((left, right))
    }

    /// `m` points at uniformly spaced parameters, both ends included.
    pub fn sample(&self, m: usize) -> Result<Vec<Point2<T>>> {
        if m < 2 {
            return Err(Error::TooFewPoints { needed: 2, got: m });
        }
        let (lo, hi) = self.parameter_range();
        let last = T::from_usize_lossy(m - 1);
        Ok((0..m)
            .map(|i| {
                if i == m - 1 {
                    self.eval(hi)
                } else {
                    self.eval(lo + (hi - lo) * T::from_usize_lossy(i) / last)
                }
            })
            .collect())
    }
}

pub fn fit_spline<T: Real>(polyline: &FaultPolyline<T>) -> Result<SplineCurve<T>> {
    SplineCurve::fit(&polyline.positions())
}

pub fn sample_curve<T: Real>(spline: &SplineCurve<T>, m: usize) -> Result<Vec<Point2<T>>> {
    spline.sample(m)
}
