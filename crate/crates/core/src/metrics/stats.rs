//! Small statistics toolkit: Pearson correlation with its t-test, ordinary
//! least squares, trailing moving averages and the special functions they
//! need.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos approximation).
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        let pi = T::lit(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_count(k));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

pub fn ln_beta<T: Scalar>(a: T, b: T) -> T {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction<T: Scalar>(a: T, b: T, x: T) -> T {
    let tiny = T::lit(1e-300).max(T::min_positive_value());
    let eps = T::epsilon();
    let one = T::one();
    let two = T::lit(2.0);
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..=10_000usize {
        let m = T::from_count(m);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let delta = d * c;
        h = h * delta;
        if (delta - one).abs() <= eps {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta<T: Scalar>(x: T, a: T, b: T) -> T {
    let one = T::one();
    if x <= T::zero() {
        return T::zero();
    }
    if x >= one {
        return one;
    }
    let front = (a * x.ln() + b * (one - x).ln() - ln_beta(a, b)).exp();
    if x < (a + one) / (a + b + T::lit(2.0)) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        one - front * beta_continued_fraction(b, a, one - x) / b
    }
}

/// Two-sided tail probability `P(|T| >= |t|)` of Student's t distribution.
pub fn student_t_two_sided<T: Scalar>(t: T, df: T) -> T {
    if t.is_infinite() {
        return T::zero();
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, df / T::lit(2.0), T::lit(0.5))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult<T> {
    pub rho: T,
    pub p_value: T,
    pub n: usize,
}

/// Pearson correlation with the two-sided t-test on `n - 2` degrees of freedom.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<CorrelationResult<T>> {
    if x.len() != y.len() {
        return Err(Error::Undefined(format!("correlation of vectors of lengths {} and {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Undefined(format!("correlation needs at least 3 points, got {n}")));
    }
    let nf = T::from_count(n);
    let mx = x.iter().copied().sum::<T>() / nf;
    let my = y.iter().copied().sum::<T>() / nf;
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
        sxy = sxy + dx * dy;
    }
    if !(sxx > T::zero()) || !(syy > T::zero()) {
        return Err(Error::Undefined("correlation with a constant vector".into()));
    }
    let rho = (sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one());
    let df = T::from_count(n - 2);
    let p_value = if rho.abs() == T::one() {
        T::zero()
    } else {
        let t = rho * (df / (T::one() - rho * rho)).sqrt();
        student_t_two_sided(t, df)
    };
    Ok(CorrelationResult { rho, p_value, n })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line<T> {
    pub slope: T,
    pub intercept: T,
    /// Standard error of the slope; NaN when `n < 3`.
    pub slope_stderr: T,
    pub n: usize,
}

impl<T: Scalar> Line<T> {
    pub fn at(&self, x: T) -> T {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares fit `y = intercept + slope * x`.
pub fn ols<T: Scalar>(x: &[T], y: &[T]) -> Result<Line<T>> {
    if x.len() != y.len() {
        return Err(Error::Undefined("regression inputs differ in length".into()));
    }
    let n = x.len();
    let distinct = x.iter().any(|&v| x.first().is_some_and(|&f| v != f));
    if !distinct {
        return Err(Error::Undefined("regression needs at least two distinct x values".into()));
    }
    let nf = T::from_count(n);
    let mx = x.iter().copied().sum::<T>() / nf;
    let my = y.iter().copied().sum::<T>() / nf;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxx = sxx + (a - mx) * (a - mx);
        sxy = sxy + (a - mx) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let sse = x
            .iter()
            .zip(y)
            .map(|(&a, &b)| {
                let r = b - (intercept + slope * a);
                r * r
            })
            .sum::<T>();
        (sse / T::from_count(n - 2) / sxx).sqrt()
    } else {
        T::nan()
    };
    Ok(Line { slope, intercept, slope_stderr, n })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanTest<T> {
    pub mean: T,
    pub t: T,
    pub p_value: T,
    pub n: usize,
}

/// One-sample two-sided t-test of `mean == 0`.
pub fn one_sample_t_test<T: Scalar>(values: &[T]) -> Result<MeanTest<T>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Undefined(format!("t-test needs at least 2 values, got {n}")));
    }
    let nf = T::from_count(n);
    let mean = values.iter().copied().sum::<T>() / nf;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / T::from_count(n - 1);
    if !(var > T::zero()) {
        return Err(Error::Undefined("t-test on constant values".into()));
    }
    let t = mean / (var / nf).sqrt();
    Ok(MeanTest { mean, t, p_value: student_t_two_sided(t, T::from_count(n - 1)), n })
}

/// Trailing mean over the last `min(window, defined so far)` defined values.
/// Undefined input points stay undefined and do not enter any window.
pub fn moving_average<T: Scalar>(series: &[Option<T>], window: usize) -> Vec<Option<T>> {
    assert!(window >= 1, "moving-average window must be positive");
    let mut seen: Vec<T> = Vec::new();
    series
        .iter()
        .map(|v| {
            v.map(|v| {
                seen.push(v);
                let tail = &seen[seen.len().saturating_sub(window)..];
                tail.iter().copied().sum::<T>() / T::from_count(tail.len())
            })
        })
        .collect()
}

pub fn mean<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().copied().sum::<T>() / T::from_count(values.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ln_gamma_known_values() {
        assert_abs_diff_eq!(ln_gamma(1.0f64), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(5.0f64), 24.0f64.ln(), epsilon = 1e-13);
        assert_abs_diff_eq!(ln_gamma(0.5f64), std::f64::consts::PI.sqrt().ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(0.1f64), 2.252_712_651_734_206, epsilon = 1e-13);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x and I_x(a, 1) = x^a.
        for x in [0.1, 0.35, 0.5, 0.9] {
            assert_abs_diff_eq!(regularized_incomplete_beta(x, 1.0f64, 1.0), x, epsilon = 1e-14);
            assert_abs_diff_eq!(regularized_incomplete_beta(x, 3.0f64, 1.0), x * x * x, epsilon = 1e-14);
        }
        assert_eq!(regularized_incomplete_beta(0.0f64, 2.0, 3.0), 0.0);
        assert_eq!(regularized_incomplete_beta(1.0f64, 2.0, 3.0), 1.0);
    }

    #[test]
    fn pearson_examples() {
        let r = pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((r.rho, r.p_value, r.n), (1.0, 0.0, 3));
        let r = pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.rho, -1.0);
        let r = pearson(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(r.rho, 0.8, epsilon = 1e-12);
        // t = 0.8 sqrt(3 / 0.36), df = 3; tail evaluated with 50-digit arithmetic.
        assert_abs_diff_eq!(r.p_value, 0.104_088_038_661_827_86, epsilon = 1e-12);
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ols_examples() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let line = ols(&x, &y).unwrap();
        assert_abs_diff_eq!(line.slope, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(line.intercept, 1.0, epsilon = 1e-9);
        assert!(ols(&[3.0, 3.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(ols::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn moving_average_examples() {
        let s = [Some(1.0), Some(3.0), Some(5.0)];
        assert_eq!(moving_average(&s, 1), s.to_vec());
        assert_eq!(moving_average(&s, 2), vec![Some(1.0), Some(2.0), Some(4.0)]);
        let gaps = [Some(1.0), None, Some(3.0), None, Some(5.0)];
        assert_eq!(moving_average(&gaps, 2), vec![Some(1.0), None, Some(2.0), None, Some(4.0)]);
        assert_eq!(moving_average::<f64>(&[None, None], 3), vec![None, None]);
    }

    #[test]
    fn one_sample_test_signs() {
        let r = one_sample_t_test(&[-1.0, -1.2, -0.9, -1.1, -0.8]).unwrap();
        assert!(r.mean < 0.0 && r.p_value < 0.001);
        let r = one_sample_t_test(&[-1.0, 1.0, -0.5, 0.5]).unwrap();
        assert!(r.p_value > 0.5);
    }

    proptest! {
        #[test]
        fn pearson_affine_invariance(
            pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..50),
            a in 0.1f64..10.0, b in -5.0f64..5.0, c in 0.1f64..10.0, d in -5.0f64..5.0,
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let Ok(base) = pearson(&x, &y) else { return Ok(()); };
            prop_assume!(base.rho.abs() < 0.999);
            let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let ys: Vec<f64> = y.iter().map(|v| c * v + d).collect();
            let moved = pearson(&xs, &ys).unwrap();
            prop_assert!((moved.rho - base.rho).abs() < 1e-12);
            let flipped: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
            prop_assert!((pearson(&flipped, &y).unwrap().rho + base.rho).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&base.p_value));
        }

        #[test]
        fn moving_average_window_one_is_identity(v in prop::collection::vec(prop::option::of(-5.0f64..5.0), 0..50)) {
            prop_assert_eq!(moving_average(&v, 1), v);
        }
    }
}
