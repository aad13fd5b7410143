//! Estimators applied to sampled trajectories.

/// Estimate the angular frequency of an oscillatory signal on a uniform
/// time grid.
///
/// Interior local minima are refined by fitting a parabola through the
/// three bracketing samples, and the period is the least-squares slope
/// of refined minimum time against minimum index. Returns None when the
/// signal is constant to within 1e-12 of its scale or has fewer than two
/// local minima in the window.
pub fn fit_oscillation_frequency(times: &[f64], signal: &[f64]) -> Option<f64> {
    assert_eq!(times.len(), signal.len(), "grid and signal lengths differ");
    if times.len() < 3 {
        return None;
    }
    let lo = signal.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = signal.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return None;
    }

    let mut minima = Vec::new();
    for k in 1..signal.len() - 1 {
        let (a, b, c) = (signal[k - 1], signal[k], signal[k + 1]);
        // Strict on the left so a flat valley is counted once.
        if b < a && b <= c {
            minima.push(refine_extremum(times, signal, k));
        }
    }
    if minima.len() < 2 {
        return None;
    }

    // Least-squares slope of minimum time over index = one period.
    let n = minima.len() as f64;
    let mean_i = (minima.len() - 1) as f64 / 2.0;
    let mean_t = minima.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &t) in minima.iter().enumerate() {
        let di = i as f64 - mean_i;
        num += di * (t - mean_t);
        den += di * di;
    }
    let period = num / den;
    if period > 0.0 && period.is_finite() {
        Some(std::f64::consts::TAU / period)
    } else {
        None
    }
}

/// Vertex abscissa of the parabola through the three samples around k.
fn refine_extremum(times: &[f64], signal: &[f64], k: usize) -> f64 {
    let dt = times[k] - times[k - 1];
    let (a, b, c) = (signal[k - 1], signal[k], signal[k + 1]);
    let denom = a - 2.0 * b + c;
    if denom.abs() < 1e-300 {
        times[k]
    } else {
        times[k] + 0.5 * dt * (a - c) / denom
    }
}

/// Index of the farthest pair site whose population exceeds the
/// threshold; 0 when the excitation has not left the donor.
///
/// `pair_populations[n]` holds the population of the pair state n + 1.
pub fn wavefront_position(pair_populations: &[f64], threshold: f64) -> usize {
    pair_populations
        .iter()
        .rposition(|&p| p > threshold)
        .map_or(0, |idx| idx + 1)
}
