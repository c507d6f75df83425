use rand::Rng;
use rand_distr::{Binomial, Distribution};
use stoq_core::ensembles::SeededRng;

/// Sample mean and its standard error `s/√n`.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Standard deviation of the resampled means.
pub fn bootstrap_sigma(values: &[f64], resamples: usize, rng: &mut SeededRng) -> f64 {
    let n = values.len();
    if n == 0 || resamples < 2 {
        return f64::NAN;
    }
    let means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    sample_std(&means)
}

/// Bootstrap of a success fraction. Resampling `n` indicators with `k`
/// successes draws `Binomial(n, k/n)` successes, so the resampled means are
/// drawn from that directly.
pub fn bootstrap_fraction_sigma(hits: usize, n: usize, resamples: usize, rng: &mut SeededRng) -> f64 {
    if n == 0 || resamples < 2 {
        return f64::NAN;
    }
    let p = hits as f64 / n as f64;
    let binom = Binomial::new(n as u64, p).expect("p in [0, 1]");
    let means: Vec<f64> = (0..resamples).map(|_| binom.sample(rng) as f64 / n as f64).collect();
    sample_std(&means)
}

/// `√(p(1−p)/n)`.
pub fn fraction_stderr(hits: usize, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    let p = hits as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

fn sample_std(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        assert_eq!(mean_and_stderr(&[2.0; 5]), (2.0, 0.0));
        let (m, se) = mean_and_stderr(&[0.0, 1.0]);
        assert_eq!(m, 0.5);
        assert!((se - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fraction_bootstrap_tracks_binomial_error() {
        let mut rng = SeededRng::new(1, 0);
        let s = bootstrap_fraction_sigma(300, 1000, 4000, &mut rng);
        let exact = fraction_stderr(300, 1000);
        assert!((s / exact - 1.0).abs() < 0.05);
        let again = bootstrap_fraction_sigma(300, 1000, 4000, &mut SeededRng::new(1, 0));
        assert_eq!(s, again);
        assert_eq!(bootstrap_fraction_sigma(0, 50, 1000, &mut rng), 0.0);
    }

    #[test]
    fn resampling_bootstrap_matches_binomial_shortcut() {
        let values: Vec<f64> = (0..400).map(|i| if i % 5 == 0 { 1.0 } else { 0.0 }).collect();
        let a = bootstrap_sigma(&values, 4000, &mut SeededRng::new(2, 0));
        let b = bootstrap_fraction_sigma(80, 400, 4000, &mut SeededRng::new(3, 0));
        assert!((a / b - 1.0).abs() < 0.08);
    }
}
