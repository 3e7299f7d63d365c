use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Descriptive statistics of one metric. Quartiles interpolate linearly
/// between order statistics; the standard deviation divides by `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricSummary {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Most extreme values inside the 1.5 IQR fences.
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    pub outliers: Vec<f64>,
}

impl MetricSummary {
    /// `None` for an empty slice or one holding NaN.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() || values.iter().any(|v| v.is_nan()) {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let (q1, median, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
        let iqr = q3 - q1;
        let (lo, hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let inside = || v.iter().copied().filter(|&x| x >= lo && x <= hi);
        Some(Self {
            n,
            mean,
            std_dev: var.sqrt(),
            min: v[0],
            q1,
            median,
            q3,
            max: v[n - 1],
            lower_whisker: inside().next().unwrap_or(v[0]),
            upper_whisker: inside().next_back().unwrap_or(v[n - 1]),
            outliers: v.iter().copied().filter(|&x| x < lo || x > hi).collect(),
        })
    }
}

/// Linear interpolation at rank `p * (n - 1)` of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    /// Probability of a statistic this low under equal means.
    pub p_value: f64,
}

impl WelchTest {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// One-sided Welch t-test of `mean(a) < mean(b)`. Needs two values per side.
pub fn welch_less(a: &[f64], b: &[f64]) -> Option<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let moments = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let s2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        (n, m, s2)
    };
    let (na, ma, va) = moments(a);
    let (nb, mb, vb) = moments(b);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let p_value = if ma < mb { 0.0 } else { 1.0 };
        let t = if ma == mb { 0.0 } else { (ma - mb).signum() * f64::INFINITY };
        return Some(WelchTest { t, df: na + nb - 2.0, p_value });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    Some(WelchTest { t, df, p_value: dist.cdf(t) })
}

/// Welch test of `mean(ln a) < mean(ln(factor * b))`; every value must be
/// positive.
pub fn welch_less_log(a: &[f64], b: &[f64], factor: f64) -> Option<WelchTest> {
    if a.iter().chain(b).any(|&v| v <= 0.0) || factor <= 0.0 {
        return None;
    }
    let la: Vec<f64> = a.iter().map(|v| v.ln()).collect();
    let lb: Vec<f64> = b.iter().map(|v| v.ln() + factor.ln()).collect();
    welch_less(&la, &lb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn single_value() {
        let s = MetricSummary::from_values(&[4.5]).unwrap();
        assert_eq!((s.mean, s.std_dev, s.median, s.q1, s.q3), (4.5, 0.0, 4.5, 4.5, 4.5));
        assert!(s.outliers.is_empty());
        assert!(MetricSummary::from_values(&[]).is_none());
        assert!(MetricSummary::from_values(&[1.0, f64::NAN]).is_none());
    }

    #[test]
    fn population_std_of_one_two_three() {
        let s = MetricSummary::from_values(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert!(close(s.std_dev, (2.0f64 / 3.0).sqrt(), 1e-15));
        assert_eq!((s.q1, s.median, s.q3), (1.5, 2.0, 2.5));
    }

    #[test]
    fn order_does_not_matter() {
        let v = [0.3, 9.1, 2.2, 0.1, 5.5, 5.5, 100.0, 0.7];
        let mut w = v;
        w.reverse();
        w.swap(1, 5);
        assert_eq!(MetricSummary::from_values(&v), MetricSummary::from_values(&w));
    }

    #[test]
    fn tukey_fences() {
        let s = MetricSummary::from_values(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 50.0]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (3.0, 5.0, 7.0));
        assert_eq!(s.outliers, vec![50.0]);
        assert_eq!((s.lower_whisker, s.upper_whisker), (1.0, 8.0));
        assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
    }

    #[test]
    fn quantile_interpolates() {
        let v = [10.0, 20.0, 30.0, 40.0];
        assert_eq!(quantile(&v, 0.0), 10.0);
        assert_eq!(quantile(&v, 1.0), 40.0);
        assert_eq!(quantile(&v, 0.5), 25.0);
        assert!(close(quantile(&v, 0.25), 17.5, 1e-12));
    }

    #[test]
    fn welch_against_hand_computation() {
        // means 2 and 5, sample variances 1 and 2.5, n = 3 and 5
        let a = [1.0, 2.0, 3.0];
        let b = [3.0, 4.0, 5.0, 6.0, 7.0];
        let w = welch_less(&a, &b).unwrap();
        let (sa, sb): (f64, f64) = (1.0 / 3.0, 2.5 / 5.0);
        let t = -3.0 / (sa + sb).sqrt();
        let df = (sa + sb) * (sa + sb) / (sa * sa / 2.0 + sb * sb / 4.0);
        assert!(close(w.t, t, 1e-12));
        assert!(close(w.df, df, 1e-12));
        let p = StudentsT::new(0.0, 1.0, df).unwrap().cdf(t);
        assert!(close(w.p_value, p, 1e-15));
        assert!(w.p_value < 0.01);
        let rev = welch_less(&b, &a).unwrap();
        assert!(close(rev.p_value, 1.0 - w.p_value, 1e-12));
    }

    #[test]
    fn welch_large_df_approaches_normal() {
        let a: Vec<f64> = (0..4000).map(|i| (i % 7) as f64).collect();
        let b: Vec<f64> = (0..4000).map(|i| (i % 7) as f64 + 0.1).collect();
        let w = welch_less(&a, &b).unwrap();
        let z = statrs::distribution::Normal::new(0.0, 1.0).unwrap().cdf(w.t);
        assert!(close(w.p_value, z, 1e-3));
    }

    #[test]
    fn welch_degenerate_inputs() {
        assert!(welch_less(&[1.0], &[2.0, 3.0]).is_none());
        assert_eq!(welch_less(&[1.0, 1.0], &[2.0, 2.0]).unwrap().p_value, 0.0);
        assert_eq!(welch_less(&[2.0, 2.0], &[2.0, 2.0]).unwrap().p_value, 1.0);
        assert!(welch_less_log(&[0.0, 1.0], &[1.0, 2.0], 1.0).is_none());
    }

    #[test]
    fn log_welch_factor_shifts_comparison() {
        let a = [10.0, 11.0, 9.0, 10.5, 9.5];
        let b = [30.0, 33.0, 27.0, 31.0, 29.0];
        assert!(welch_less_log(&a, &b, 0.5).unwrap().significant(0.01));
        assert!(!welch_less_log(&a, &b, 0.3).unwrap().significant(0.01));
    }
}
