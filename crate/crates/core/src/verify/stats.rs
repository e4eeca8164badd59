use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

pub fn mean_se(samples: &[f64]) -> Estimate {
    let n = samples.len();
    if n == 0 {
        return Estimate {
            mean: f64::NAN,
            se: f64::NAN,
            count: 0,
        };
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let se = if n > 1 {
        (sample_variance(samples) / n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Estimate { mean, se, count: n }
}

/// Unbiased sample variance.
pub fn sample_variance(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

pub fn moment_estimate(samples: &[f64], r: f64) -> Estimate {
    let powered: Vec<f64> = samples.iter().map(|x| x.powf(r)).collect();
    mean_se(&powered)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom for chi-square; absent for Kolmogorov–Smirnov.
    pub dof: Option<usize>,
    pub bins: Option<usize>,
}

/// Pearson chi-square test of integer samples against a mass function.
/// Cells run over `0..=max(sample)` plus an upper tail, and adjacent cells are
/// merged from the left until each expected count reaches 5.
pub fn chi_square(samples: &[u64], pmf: impl Fn(u64) -> f64) -> GoodnessOfFit {
    let n = samples.len() as f64;
    let top = samples.iter().copied().max().unwrap_or(0);
    let mut observed = vec![0f64; top as usize + 2];
    for &s in samples {
        observed[s as usize] += 1.0;
    }
    let mut expected: Vec<f64> = (0..=top).map(|k| n * pmf(k)).collect();
    let head: f64 = expected.iter().sum();
    expected.push((n - head).max(0.0));

    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (ok, ek) in observed.iter().zip(&expected) {
        o += ok;
        e += ek;
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map(|c| c.sf(statistic)).unwrap_or(f64::NAN)
    };
    GoodnessOfFit {
        statistic,
        p_value,
        dof: Some(dof),
        bins: Some(cells.len()),
    }
}

/// One-sample Kolmogorov–Smirnov test, with Stephens' small-sample correction
/// applied to the asymptotic Kolmogorov tail.
pub fn kolmogorov_smirnov(samples: &[f64], cdf: impl Fn(f64) -> f64) -> GoodnessOfFit {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (f - k as f64 / n).max((k as f64 + 1.0) / n - f)
        })
        .fold(0.0f64, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    GoodnessOfFit {
        statistic: d,
        p_value: kolmogorov_tail(lambda),
        dof: None,
        bins: None,
    }
}

/// `P(K > λ)` for the Kolmogorov distribution.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
