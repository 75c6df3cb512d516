//! Empirical CDFs, Kolmogorov-Smirnov distances and monotone interpolation.

/// One-sample Kolmogorov-Smirnov statistic `sup |F_n - F|` for a sample
/// that is already sorted ascending.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    })
}

pub fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs
}

/// Right-continuous step CDF of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    sorted: Vec<f64>,
}

impl StepCdf {
    pub fn new(sample: Vec<f64>) -> Self {
        Self { sorted: sorted(sample) }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sample(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of the sample `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Monotone data yields a monotone interpolant; outside the knots the end
/// values are held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `points` must be sorted by `x` with strictly increasing abscissae.
    pub fn new(points: &[(f64, f64)]) -> Self {
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        let n = xs.len();
        let mut slopes = vec![0.0; n];
        if n >= 2 {
            let secant: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
            slopes[0] = secant[0];
            slopes[n - 1] = secant[n - 2];
            for i in 1..n - 1 {
                slopes[i] = if secant[i - 1] * secant[i] <= 0.0 {
                    0.0
                } else {
                    // weighted harmonic mean
                    let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
                    let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                    (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i])
                };
            }
            for i in 0..n - 1 {
                if secant[i] == 0.0 {
                    slopes[i] = 0.0;
                    slopes[i + 1] = 0.0;
                    continue;
                }
                let a = slopes[i] / secant[i];
                let b = slopes[i + 1] / secant[i];
                let s = a * a + b * b;
                if s > 9.0 {
                    let t = 3.0 / s.sqrt();
                    slopes[i] = t * a * secant[i];
                    slopes[i + 1] = t * b * secant[i];
                }
            }
        }
        Self { xs, ys, slopes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 {
            return 0.0;
        }
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ks_of_uniform_grid() {
        // Midpoints of n cells are at KS distance 1/(2n) from U(0,1).
        let n = 10;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.05).abs() < 1e-15);
    }

    #[test]
    fn step_cdf_counts_ties() {
        let c = StepCdf::new(vec![0.0, 0.0, 1.0]);
        assert!((c.eval(0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.eval(1.0), 1.0);
        assert_eq!(c.eval(-0.1), 0.0);
    }

    proptest! {
        #[test]
        fn monotone_cubic_preserves_monotonicity(mut ys in prop::collection::vec(0.0f64..1.0, 3..40)) {
            ys.sort_by(f64::total_cmp);
            let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect();
            let f = MonotoneCubic::new(&pts);
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=(10 * pts.len()) {
                let v = f.eval(k as f64 / 10.0);
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
            for &(x, y) in &pts {
                prop_assert!((f.eval(x) - y).abs() < 1e-12);
            }
        }
    }
}
