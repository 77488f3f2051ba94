use crate::error::{Error, Result};

/// Median of `k` contiguous group means. Trailing values that do not fill a
/// whole group are dropped.
pub fn median_of_means(values: &[f64], k: usize) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "median of means needs at least one value".into(),
        ));
    }
    if k == 0 || k > values.len() {
        return Err(Error::InvalidArgument(format!(
            "group count {k} must lie in 1..={}",
            values.len()
        )));
    }
    let size = values.len() / k;
    let mut means: Vec<f64> = values
        .chunks_exact(size)
        .take(k)
        .map(|g| g.iter().sum::<f64>() / size as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    Ok(if k % 2 == 1 {
        means[k / 2]
    } else {
        (means[k / 2 - 1] + means[k / 2]) / 2.0
    })
}

/// `ceil(2 ln(2L/δ))` groups for `L` simultaneously estimated observables.
pub fn default_group_count(observables: usize, delta: f64) -> Result<usize> {
    if observables == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "group count needs observables >= 1 and delta in (0, 1), got {observables} and {delta}"
        )));
    }
    Ok((2.0 * (2.0 * observables as f64 / delta).ln())
        .ceil()
        .max(1.0) as usize)
}
