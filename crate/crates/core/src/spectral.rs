//! Frequency-domain containers and periodogram estimates.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::columns::{Column, ColumnTable};
use crate::error::{Error, Result};

/// Values on a frequency grid. Real spectra keep a zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub omega: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SpectralDensity {
    pub fn new(omega: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if omega.len() != values.len() {
            return Err(Error::LengthMismatch(format!(
                "{} frequencies for {} values",
                omega.len(),
                values.len()
            )));
        }
        Ok(Self { omega, values })
    }

    pub fn from_real(omega: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let values = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        Self::new(omega, values)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.im).collect()
    }

    /// `omega, re, im` columns; `name` prefixes the value columns.
    pub fn to_table(&self, name: &str, unit: &str) -> ColumnTable {
        ColumnTable::new(vec![
            Column::new("omega", "1/time", self.omega.clone()),
            Column::new(format!("re_{name}"), unit, self.re()),
            Column::new(format!("im_{name}"), unit, self.im()),
        ])
        .expect("spectrum columns share one frequency axis")
    }
}

/// Two-sided periodogram `(dt / N) |sum_n x_n e^{i w t_n}|^2`, whose
/// expectation for white noise with `<x(t) x*(t')> = S delta(t - t')` is `S`.
///
/// Frequencies run over `[-pi/dt, pi/dt)` in increasing order.
pub fn periodogram(samples: &[Complex64], dt: f64) -> Result<SpectralDensity> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "periodogram of an empty series".into(),
        ));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sample spacing {dt} must be positive"
        )));
    }
    // e^{+i w t} transform via conjugation around a forward FFT
    let mut buf: Vec<Complex64> = samples.iter().map(|x| x.conj()).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = dt / n as f64;
    let mut pairs: Vec<(f64, f64)> = buf
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let k = if k >= n.div_ceil(2) {
                k as f64 - n as f64
            } else {
                k as f64
            };
            (2.0 * PI * k / (n as f64 * dt), x.norm_sqr() * scale)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (omega, power) = pairs.into_iter().unzip();
    SpectralDensity::from_real(omega, power)
}

/// Average of periodograms over consecutive non-overlapping segments of
/// `segment_len` samples (rectangular window). Trailing samples that do not
/// fill a segment are dropped.
pub fn welch(samples: &[Complex64], dt: f64, segment_len: usize) -> Result<SpectralDensity> {
    if segment_len == 0 || segment_len > samples.len() {
        return Err(Error::InvalidParameter(format!(
            "segment length {segment_len} does not fit {} samples",
            samples.len()
        )));
    }
    let segments = samples.len() / segment_len;
    let mut avg: Option<SpectralDensity> = None;
    for s in samples.chunks_exact(segment_len) {
        let p = periodogram(s, dt)?;
        avg = Some(match avg {
            None => p,
            Some(mut acc) => {
                for (a, v) in acc.values.iter_mut().zip(p.values) {
                    *a += v;
                }
                acc
            }
        });
    }
    let mut avg = avg.expect("at least one segment");
    for v in &mut avg.values {
        *v /= segments as f64;
    }
    Ok(avg)
}
