use super::IterationRow;

/// Trailing mean over the last `window` entries; early entries average what is
/// available.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be at least 1");
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (i, &v) in series.iter().enumerate() {
        sum += v;
        if i >= window {
            sum -= series[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

/// Cumulative share of simulated scenarios after each iteration.
pub fn simulated_fraction(rows: &[IterationRow]) -> Vec<f64> {
    let mut sims = 0u64;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            sims += u64::from(r.simulated);
            sims as f64 / (i + 1) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moving_average_cases() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(moving_average(&s, 1), s.to_vec());
        assert_eq!(moving_average(&s, 2), vec![1.0, 1.5, 2.5, 3.5]);
        assert!(moving_average(&[0.3; 6], 4).iter().all(|v| (v - 0.3).abs() < 1e-15));
        assert_eq!(moving_average(&[], 3), Vec::<f64>::new());
    }
}
