//! Least-squares fits of convergence data.

/// Slope `b` of `ln y ≈ a + b ln x`. `None` with fewer than two usable points.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Result of fitting `ε ≈ C exp(−n^s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    pub c: f64,
    pub s: f64,
    /// Root mean square of the residual in `ln ε`.
    pub rms: f64,
    /// `rms` relative to the spread `max ln ε − min ln ε` of the data.
    pub relative: f64,
}

fn exp_residual(n: &[f64], lne: &[f64], s: f64) -> (f64, f64) {
    let m = n.len() as f64;
    let lnc = n.iter().zip(lne).map(|(n, e)| e + n.powf(s)).sum::<f64>() / m;
    let rss: f64 = n
        .iter()
        .zip(lne)
        .map(|(n, e)| (e - lnc + n.powf(s)).powi(2))
        .sum();
    (lnc, (rss / m).sqrt())
}

/// Fits `ln ε = ln C − n^s` by least squares: a grid search over `s`
/// followed by golden-section refinement. For fixed `s` the optimal `ln C`
/// is the mean of `ln ε + n^s`.
pub fn exponential_fit(n: &[f64], err: &[f64]) -> Option<ExpFit> {
    let (n, lne): (Vec<f64>, Vec<f64>) = n
        .iter()
        .zip(err)
        .filter(|(n, e)| **n > 0.0 && **e > 0.0 && e.is_finite())
        .map(|(n, e)| (*n, e.ln()))
        .unzip();
    if n.len() < 2 {
        return None;
    }
    let f = |s: f64| exp_residual(&n, &lne, s).1;
    let step = 1e-3;
    let (mut best, mut best_r) = (step, f64::INFINITY);
    let mut s = step;
    while s <= 2.0 {
        let r = f(s);
        if r < best_r {
            best = s;
            best_r = r;
        }
        s += step;
    }
    let (mut a, mut b) = ((best - step).max(1e-6), best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let s = 0.5 * (a + b);
    let (lnc, rms) = exp_residual(&n, &lne, s);
    let hi = lne.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = lne.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = hi - lo;
    Some(ExpFit {
        c: lnc.exp(),
        s,
        rms,
        relative: if spread > 0.0 { rms / spread } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_power_law() {
        let h = [0.5, 0.25, 0.125, 0.0625];
        let e: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powf(2.7)).collect();
        assert_abs_diff_eq!(loglog_slope(&h, &e).unwrap(), 2.7, epsilon = 1e-12);
        assert!(loglog_slope(&h[..1], &e[..1]).is_none());
    }

    #[test]
    fn recovers_exponential_model() {
        let n = [40.0, 60.0, 80.0, 100.0, 120.0, 140.0];
        let e: Vec<f64> = n.iter().map(|n: &f64| 50.0 * (-n.powf(0.55)).exp()).collect();
        let fit = exponential_fit(&n, &e).unwrap();
        assert_abs_diff_eq!(fit.s, 0.55, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.c, 50.0, epsilon = 1e-3);
        assert!(fit.relative < 1e-6);
    }
}
