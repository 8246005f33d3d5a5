//! Nearest-neighbour spacing statistics of unfolded spectra.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DVector;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Fewest levels accepted by [`spacing_statistics`].
pub const MIN_LEVELS: usize = 50;

/// Search interval for the Brody parameter.
pub const BRODY_RANGE: (f64, f64) = (-0.1, 1.5);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnfoldingOptions {
    /// Degree of the polynomial fitted to the level staircase.
    pub degree: usize,
    /// Fraction of levels dropped at each end of the spectrum.
    pub edge_fraction: f64,
}

impl Default for UnfoldingOptions {
    fn default() -> Self {
        Self {
            degree: 7,
            edge_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpacingStatistics {
    /// Unfolded nearest-neighbour spacings, mean 1.
    pub spacings: Vec<f64>,
    /// Kolmogorov-Smirnov distance to `exp(-s)`.
    pub ks_poisson: f64,
    /// Kolmogorov-Smirnov distance to `(π/2) s exp(-π s²/4)`.
    pub ks_wigner: f64,
    /// Maximum-likelihood Brody parameter.
    pub brody_beta: f64,
}

/// Unfolded spacings of an ascending spectrum: the staircase `N(E)` on the
/// retained (non-edge) levels is fitted by a polynomial, levels are mapped
/// through the fit and the resulting spacings rescaled to mean 1.
pub fn unfold_spacings(eigenvalues: &[f64], options: &UnfoldingOptions) -> Result<Vec<f64>> {
    if let Some(w) = eigenvalues.windows(2).find(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues must be ascending ({} then {})",
            w[0], w[1]
        )));
    }
    if !(0.0..0.5).contains(&options.edge_fraction) {
        return Err(Error::InvalidArgument(format!(
            "edge fraction {} outside [0, 0.5)",
            options.edge_fraction
        )));
    }
    let n = eigenvalues.len();
    let drop = (options.edge_fraction * n as f64).floor() as usize;
    let kept = &eigenvalues[drop..n - drop];
    if kept.len() < options.degree + 2 {
        return Err(Error::InsufficientData {
            got: n,
            required: 2 * drop + options.degree + 2,
        });
    }
    let lo = kept[0];
    let hi = kept[kept.len() - 1];
    if !(hi > lo) {
        return Err(Error::Degenerate("all retained levels coincide".into()));
    }
    let centre = 0.5 * (hi + lo);
    let half = 0.5 * (hi - lo);
    let scaled: Vec<f64> = kept.iter().map(|e| (e - centre) / half).collect();

    let cols = options.degree + 1;
    let vander = Mat::from_fn(kept.len(), cols, |i, j| scaled[i].powi(j as i32));
    let staircase = DVector::from_iterator(kept.len(), (0..kept.len()).map(|i| (drop + i + 1) as f64));
    let coeffs = vander
        .svd(true, true)
        .solve(&staircase, 1e-14)
        .map_err(|e| Error::Degenerate(format!("staircase fit failed: {e}")))?;
    let unfolded: Vec<f64> = scaled
        .iter()
        .map(|&x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c))
        .collect();
    let raw: Vec<f64> = unfolded.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::Degenerate("non-positive mean unfolded spacing".into()));
    }
    Ok(raw.into_iter().map(|s| s / mean).collect())
}

pub fn spacing_statistics(eigenvalues: &[f64], degree: usize) -> Result<SpacingStatistics> {
    spacing_statistics_with(
        eigenvalues,
        &UnfoldingOptions {
            degree,
            ..UnfoldingOptions::default()
        },
    )
}

/// Spacing diagnostics of a single-sector spectrum. Mixing independent
/// sectors superposes level sequences and biases the result towards
/// Poisson; callers must pass one symmetry sector at a time.
pub fn spacing_statistics_with(
    eigenvalues: &[f64],
    options: &UnfoldingOptions,
) -> Result<SpacingStatistics> {
    if eigenvalues.len() < MIN_LEVELS {
        return Err(Error::InsufficientData {
            got: eigenvalues.len(),
            required: MIN_LEVELS,
        });
    }
    let spacings = unfold_spacings(eigenvalues, options)?;
    Ok(SpacingStatistics {
        ks_poisson: ks_distance(&spacings, poisson_cdf),
        ks_wigner: ks_distance(&spacings, wigner_cdf),
        brody_beta: brody_fit(&spacings)?,
        spacings,
    })
}

pub fn poisson_density(s: f64) -> f64 {
    (-s).exp()
}

pub fn poisson_cdf(s: f64) -> f64 {
    1.0 - (-s).exp()
}

pub fn wigner_density(s: f64) -> f64 {
    0.5 * PI * s * (-0.25 * PI * s * s).exp()
}

pub fn wigner_cdf(s: f64) -> f64 {
    1.0 - (-0.25 * PI * s * s).exp()
}

/// One-sample Kolmogorov-Smirnov distance to a continuous CDF.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let f = cdf(s);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Brody density `a s^β exp(-b s^{β+1})` with unit norm and unit mean.
pub fn brody_density(s: f64, beta: f64) -> f64 {
    let (a, b) = brody_constants(beta);
    a * s.powf(beta) * (-b * s.powf(beta + 1.0)).exp()
}

fn brody_constants(beta: f64) -> (f64, f64) {
    let b = gamma((beta + 2.0) / (beta + 1.0)).powf(beta + 1.0);
    ((beta + 1.0) * b, b)
}

fn brody_log_likelihood(spacings: &[f64], beta: f64) -> f64 {
    let (a, b) = brody_constants(beta);
    let ln_a = a.ln();
    spacings
        .iter()
        .map(|&s| {
            let s = s.max(1e-300);
            ln_a + beta * s.ln() - b * s.powf(beta + 1.0)
        })
        .sum()
}

/// Maximum-likelihood Brody parameter by golden-section search over
/// [`BRODY_RANGE`]; the result is clamped to the range.
pub fn brody_fit(spacings: &[f64]) -> Result<f64> {
    if spacings.len() < 2 {
        return Err(Error::InsufficientData {
            got: spacings.len(),
            required: 2,
        });
    }
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let var = spacings.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / spacings.len() as f64;
    if var <= 1e-20 {
        return Err(Error::Degenerate(
            "spacings have zero variance; the Brody fit is undefined".into(),
        ));
    }
    let f = |beta: f64| -brody_log_likelihood(spacings, beta);
    let (mut a, mut b) = BRODY_RANGE;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-9 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    Ok((0.5 * (a + b)).clamp(BRODY_RANGE.0, BRODY_RANGE.1))
}

/// Histogram row for external plotting.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HistogramRow {
    pub s: f64,
    pub empirical: f64,
    pub poisson: f64,
    pub wigner: f64,
}

/// Normalized spacing histogram on `bins` equal bins over `[0, s_max]`;
/// `s` is the bin centre.
pub fn spacing_histogram(spacings: &[f64], bins: usize, s_max: f64) -> Vec<HistogramRow> {
    let width = s_max / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in spacings {
        if s >= 0.0 && s < s_max {
            counts[((s / width) as usize).min(bins - 1)] += 1;
        }
    }
    let total = spacings.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let s = (k as f64 + 0.5) * width;
            HistogramRow {
                s,
                empirical: c as f64 / (total * width),
                poisson: poisson_density(s),
                wigner: wigner_density(s),
            }
        })
        .collect()
}

/// Empirical CDF at each sorted spacing next to the reference CDFs.
pub fn spacing_ecdf(spacings: &[f64]) -> Vec<HistogramRow> {
    let mut sorted = spacings.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| HistogramRow {
            s,
            empirical: (i + 1) as f64 / n,
            poisson: poisson_cdf(s),
            wigner: wigner_cdf(s),
        })
        .collect()
}

pub fn write_rows_csv(rows: &[HistogramRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "s,empirical,poisson,wigner")?;
    for r in rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            r.s, r.empirical, r.poisson, r.wigner
        )?;
    }
    Ok(())
}
