//! Cross-run aggregation: unbiased mean/deviation estimators with
//! Student-t confidence intervals, sized for the small seed counts the
//! experiment driver uses.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std_dev: f64,
    pub count: usize,
    pub ci99_half_width: f64,
}

#[derive(Debug, thiserror::Error)]
#[error("cannot aggregate an empty series")]
pub struct EmptySeries;

/// Two-sided 99% Student-t critical value for the given degrees of freedom.
pub fn t_critical_99(df: u64) -> f64 {
    const TABLE: [(u64, f64); 38] = [
        (1, 63.657), (2, 9.925), (3, 5.841), (4, 4.604), (5, 4.032), (6, 3.707), (7, 3.499),
        (8, 3.355), (9, 3.250), (10, 3.169), (11, 3.106), (12, 3.055), (13, 3.012), (14, 2.977),
        (15, 2.947), (16, 2.921), (17, 2.898), (18, 2.878), (19, 2.861), (20, 2.845), (21, 2.831),
        (22, 2.819), (23, 2.807), (24, 2.797), (25, 2.787), (26, 2.779), (27, 2.771), (28, 2.763),
        (29, 2.756), (30, 2.750), (40, 2.704), (60, 2.660), (120, 2.617), (200, 2.601),
        (500, 2.586), (1000, 2.581), (5000, 2.577), (u64::MAX, 2.576),
    ];
    if df == 0 {
        return f64::INFINITY;
    }
    // next lower tabulated df is conservative (wider interval)
    let mut value = TABLE[0].1;
    for (d, t) in TABLE {
        if d <= df {
            value = t;
        } else {
            break;
        }
    }
    value
}

/// Mean, unbiased sample deviation and Student-t 99% CI of a series.
pub fn aggregate(series: &[f64]) -> Result<SummaryStats, EmptySeries> {
    if series.is_empty() {
        return Err(EmptySeries);
    }
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(SummaryStats { mean, std_dev: 0.0, count: 1, ci99_half_width: 0.0 });
    }
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std_dev = var.sqrt();
    let ci = t_critical_99((n - 1) as u64) * std_dev / (n as f64).sqrt();
    Ok(SummaryStats { mean, std_dev, count: n, ci99_half_width: ci })
}
