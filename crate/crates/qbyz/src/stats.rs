//! Small statistical helpers used by experiments and acceptance checks.

/// Standard deviation of a binomial proportion estimate over `n` samples.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// True when an observed rate is within `k` binomial standard deviations of
/// the expected probability.
pub fn within_k_sigma(observed: f64, expected: f64, n: usize, k: f64) -> bool {
    let sigma = binomial_sigma(expected, n);
    (observed - expected).abs() <= k * sigma
}

/// Pearson chi-square statistic for observed counts against expected counts.
///
/// Categories with expected count zero must have observed zero; they are
/// skipped (they carry no information).
pub fn chi_square_statistic(observed: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            if e == 0.0 {
                assert_eq!(o, 0.0, "observed count in a zero-probability category");
                0.0
            } else {
                (o - e) * (o - e) / e
            }
        })
        .sum()
}

/// Two-sample homogeneity chi-square: do two count vectors over the same
/// categories come from one distribution? Returns (statistic, degrees of freedom).
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> (f64, usize) {
    assert_eq!(a.len(), b.len());
    let total_a: u64 = a.iter().sum();
    let total_b: u64 = b.iter().sum();
    let grand = (total_a + total_b) as f64;
    let mut stat = 0.0;
    let mut used = 0usize;
    for (&oa, &ob) in a.iter().zip(b) {
        let pooled = (oa + ob) as f64 / grand;
        if pooled == 0.0 {
            continue;
        }
        used += 1;
        let ea = pooled * total_a as f64;
        let eb = pooled * total_b as f64;
        stat += (oa as f64 - ea).powi(2) / ea + (ob as f64 - eb).powi(2) / eb;
    }
    (stat, used.saturating_sub(1))
}

/// Goodness-of-fit chi-square of counts against category probabilities.
/// Returns (statistic, degrees of freedom).
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> (f64, usize) {
    assert_eq!(observed.len(), probs.len());
    let n: u64 = observed.iter().sum();
    let expected: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
    let obs: Vec<f64> = observed.iter().map(|&o| o as f64).collect();
    (chi_square_statistic(&obs, &expected), observed.len() - 1)
}

/// Upper 1% critical value of the chi-square distribution (significance 0.01).
///
/// Exact tabulated values for df <= 30; Wilson-Hilferty approximation beyond
/// (relative error < 1e-3 there).
pub fn chi_square_critical_001(df: usize) -> f64 {
    const TABLE: [f64; 30] = [
        6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090, 21.666, 23.209, 24.725,
        26.217, 27.688, 29.141, 30.578, 32.000, 33.409, 34.805, 36.191, 37.566, 38.932, 40.289,
        41.638, 42.980, 44.314, 45.642, 46.963, 48.278, 49.588, 50.892,
    ];
    assert!(df >= 1, "chi-square needs at least one degree of freedom");
    if df <= TABLE.len() {
        TABLE[df - 1]
    } else {
        // Wilson-Hilferty: chi2_p(df) ~ df * (1 - 2/(9 df) + z_p sqrt(2/(9 df)))^3
        let z99 = 2.326_347_874_040_841;
        let d = df as f64;
        let t = 1.0 - 2.0 / (9.0 * d) + z99 * (2.0 / (9.0 * d)).sqrt();
        d * t * t * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_matches_hand_value() {
        // p=1/9, n=10^4: sqrt((1/9)(8/9)/1e4) = 0.0031426...
        let s = binomial_sigma(1.0 / 9.0, 10_000);
        assert!((s - 0.003_142_696).abs() < 1e-8);
    }

    #[test]
    fn chi_square_zero_for_exact_fit() {
        let obs = [25.0, 25.0, 50.0];
        let exp = [25.0, 25.0, 50.0];
        assert_eq!(chi_square_statistic(&obs, &exp), 0.0);
    }

    #[test]
    fn critical_values_are_tabulated() {
        assert_eq!(chi_square_critical_001(1), 6.635);
        assert_eq!(chi_square_critical_001(7), 18.475);
        // Wilson-Hilferty region stays close to the exact value (df=40: 63.691).
        assert!((chi_square_critical_001(40) - 63.691).abs() < 0.1);
    }

    #[test]
    fn homogeneity_detects_identical_samples() {
        let a = [100u64, 200, 300];
        let (stat, df) = chi_square_homogeneity(&a, &a);
        assert_eq!(df, 2);
        assert!(stat < 1e-12);
    }
}
