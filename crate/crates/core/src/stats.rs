//! Small statistics helpers shared by the experiment drivers and validation.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Mean and sample standard deviation (`n - 1` denominator; 0 for fewer than
/// two values). Values are accumulated in slice order.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `observed` counts against equal cell
/// probabilities.
pub fn chi_square_uniform(observed: &[u64]) -> ChiSquareTest {
    let cells = observed.len();
    let total: u64 = observed.iter().sum();
    let expected = total as f64 / cells as f64;
    let statistic: f64 = observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let degrees_of_freedom = cells.saturating_sub(1);
    let p_value = if degrees_of_freedom == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(degrees_of_freedom as f64).expect("positive dof");
        1.0 - dist.cdf(statistic)
    };
    ChiSquareTest {
        statistic,
        degrees_of_freedom,
        p_value,
    }
}

/// `(1/2) sum |p_i - q_i|` over aligned probability vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    0.5 * (0..len)
        .map(|i| (p.get(i).unwrap_or(&0.0) - q.get(i).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_sd() {
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_sd(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn chi_square() {
        let t = chi_square_uniform(&[100, 100, 100]);
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        let t = chi_square_uniform(&[300, 0, 0]);
        assert!(t.p_value < 1e-10);
        let t = chi_square_uniform(&[10_000 + 98, 10_000 - 98]);
        assert!((t.statistic - 1.9208).abs() < 1e-9);
        // 1 dof: P(X > 3.841459) = 0.05
        let t = chi_square_uniform(&[10_000 + 98 * 141 / 100, 10_000 - 98 * 141 / 100]);
        assert!((t.p_value - 0.05).abs() < 0.002);
    }

    #[test]
    fn tv_distance() {
        assert_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert_eq!(total_variation(&[1.0], &[0.0, 1.0]), 1.0);
    }
}
