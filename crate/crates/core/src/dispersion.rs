//! Closed-form response of a single-species Lorentz medium.
//!
//! Two permittivity models are provided. The low-loss form is the classical
//! damped-oscillator (Drude–Lorentz–Sommerfeld) susceptibility
//!
//! ```text
//! eps(w) = 1 + wp^2 / (w0^2 - w^2 - i w gamma)
//! ```
//!
//! and the high-loss form is what the bath-coupled oscillator actually
//! produces once the damping acts on both quadratures:
//!
//! ```text
//! eps(w) = 1 + wp^2 / ((eta - i w)^2 + w0^2),   eta = gamma / 2
//! ```
//!
//! The two denominators differ by exactly `gamma^2 / 4`. Time dependence is
//! `exp(-i w t)` throughout, so passive media have `Im eps > 0` for `w > 0`.
//! Units are natural (`c = eps0 = mu0 = 1`).

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Material constants of one Lorentz oscillator species.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionParams {
    omega_p: f64,
    omega_0: f64,
    gamma: f64,
}

impl DispersionParams {
    pub fn new(omega_p: f64, omega_0: f64, gamma: f64) -> Result<Self> {
        if !(omega_p.is_finite() && omega_p >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega_p must be finite and >= 0, got {omega_p}"
            )));
        }
        if !(omega_0.is_finite() && omega_0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega_0 must be finite and > 0, got {omega_0}"
            )));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and >= 0, got {gamma}"
            )));
        }
        Ok(Self {
            omega_p,
            omega_0,
            gamma,
        })
    }

    /// Empty space: no oscillators.
    pub fn vacuum() -> Self {
        Self {
            omega_p: 0.0,
            omega_0: 1.0,
            gamma: 0.0,
        }
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    pub fn omega_0(&self) -> f64 {
        self.omega_0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Amplitude decay rate, always `gamma / 2`.
    pub fn eta(&self) -> f64 {
        self.gamma / 2.0
    }

    pub fn is_vacuum(&self) -> bool {
        self.omega_p == 0.0
    }

    /// Inertia of the polarization, `1 / omega_p^2`. Infinite in vacuum.
    pub fn beta(&self) -> f64 {
        1.0 / (self.omega_p * self.omega_p)
    }

    /// Restoring stiffness of the polarization, `omega_0^2 / omega_p^2`.
    pub fn stiffness(&self) -> f64 {
        (self.omega_0 * self.omega_0) / (self.omega_p * self.omega_p)
    }

    fn check_pole(&self, omega: f64) -> Result<()> {
        if self.gamma == 0.0 && omega.abs() == self.omega_0 && !self.is_vacuum() {
            return Err(Error::LosslessResonance { omega });
        }
        Ok(())
    }
}

/// Which closed form to use for the medium response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossRegime {
    LowLoss,
    HighLoss,
}

impl LossRegime {
    pub const ALL: [LossRegime; 2] = [LossRegime::LowLoss, LossRegime::HighLoss];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPermittivity {
    pub omega: f64,
    pub value: Complex64,
}

/// `w0^2 - w^2 - i w gamma`.
pub fn low_loss_denominator(p: &DispersionParams, omega: f64) -> Complex64 {
    Complex64::new(p.omega_0 * p.omega_0 - omega * omega, -omega * p.gamma)
}

/// `(eta - i w)^2 + w0^2`, expanded from the complex square.
pub fn high_loss_denominator(p: &DispersionParams, omega: f64) -> Complex64 {
    let s = Complex64::new(p.eta(), -omega);
    s * s + p.omega_0 * p.omega_0
}

pub fn permittivity_low_loss(p: &DispersionParams, omega: f64) -> Result<ComplexPermittivity> {
    permittivity(p, omega, LossRegime::LowLoss)
}

pub fn permittivity_high_loss(p: &DispersionParams, omega: f64) -> Result<ComplexPermittivity> {
    permittivity(p, omega, LossRegime::HighLoss)
}

pub fn permittivity(
    p: &DispersionParams,
    omega: f64,
    regime: LossRegime,
) -> Result<ComplexPermittivity> {
    if p.is_vacuum() {
        return Ok(ComplexPermittivity {
            omega,
            value: Complex64::new(1.0, 0.0),
        });
    }
    p.check_pole(omega)?;
    let denom = match regime {
        LossRegime::LowLoss => low_loss_denominator(p, omega),
        LossRegime::HighLoss => high_loss_denominator(p, omega),
    };
    Ok(ComplexPermittivity {
        omega,
        value: 1.0 + p.omega_p * p.omega_p / denom,
    })
}

/// Susceptibility `eps - 1` of the chosen form.
pub fn susceptibility(p: &DispersionParams, omega: f64, regime: LossRegime) -> Result<Complex64> {
    Ok(permittivity(p, omega, regime)?.value - 1.0)
}

/// `sigma(w) = w Im eps(w)`.
pub fn conductivity(p: &DispersionParams, omega: f64, regime: LossRegime) -> Result<f64> {
    Ok(omega * permittivity(p, omega, regime)?.value.im)
}

/// Coefficient of `delta(w - w')` in the noise-current commutator, evaluated
/// from the expanded rational forms (not from `sigma`), so comparing it with
/// `(hbar w / pi) sigma(w)` is a genuine identity check.
pub fn fdt_noise_weight(p: &DispersionParams, omega: f64, hbar: f64, regime: LossRegime) -> f64 {
    if p.gamma == 0.0 || p.is_vacuum() {
        return 0.0;
    }
    let wp2 = p.omega_p * p.omega_p;
    let w02 = p.omega_0 * p.omega_0;
    let w2 = omega * omega;
    match regime {
        LossRegime::LowLoss => {
            let detune = w02 - w2;
            hbar * w2 / PI * (wp2 * omega * p.gamma) / (detune * detune + w2 * p.gamma * p.gamma)
        }
        LossRegime::HighLoss => {
            let eta = p.eta();
            let detune = w02 + eta * eta - w2;
            2.0 * hbar * eta * w2 * omega * wp2 / PI / (detune * detune + 4.0 * eta * eta * w2)
        }
    }
}

/// Largest violation of `Re eps(w) - 1 = H[Im eps](w)` over the interior of a
/// uniform, symmetric frequency grid.
///
/// The Hilbert transform is a principal-value trapezoid rule evaluated by FFT
/// convolution; see [`hilbert_transform_uniform`]. The two endpoints carry a
/// logarithmic truncation singularity and are not scored.
pub fn kramers_kronig_check(
    p: &DispersionParams,
    omega_grid: &[f64],
    regime: LossRegime,
) -> Result<f64> {
    if omega_grid.len() < 3 {
        return Err(Error::InvalidParameter(
            "frequency grid needs at least 3 points".into(),
        ));
    }
    let step = uniform_step(omega_grid)?;
    let first = omega_grid[0];
    let last = omega_grid[omega_grid.len() - 1];
    if ((first + last) / step).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "frequency grid must be symmetric about 0, got [{first}, {last}]"
        )));
    }
    if p.is_vacuum() {
        return Ok(0.0);
    }
    const MIN_POINTS_PER_WIDTH: usize = 20;
    let points = p.gamma / step;
    if points < MIN_POINTS_PER_WIDTH as f64 {
        return Err(Error::GridTooCoarse {
            points,
            required: MIN_POINTS_PER_WIDTH,
        });
    }

    let eps = omega_grid
        .iter()
        .map(|&w| permittivity(p, w, regime).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    let imag: Vec<f64> = eps.iter().map(|e| e.im).collect();
    let transformed = hilbert_transform_uniform(&imag, first, step);

    let n = omega_grid.len();
    Ok((1..n - 1)
        .map(|k| (eps[k].re - 1.0 - transformed[k]).abs())
        .fold(0.0, f64::max))
}

fn uniform_step(grid: &[f64]) -> Result<f64> {
    let n = grid.len();
    let step = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(
            "frequency grid must increase".into(),
        ));
    }
    for (k, &w) in grid.iter().enumerate() {
        let expected = grid[0] + k as f64 * step;
        if (w - expected).abs() > 1e-6 * step {
            return Err(Error::InvalidParameter(format!(
                "frequency grid is not uniform at index {k}"
            )));
        }
    }
    Ok(step)
}

/// `(1/pi) PV int f(w') / (w' - w_k) dw'` on a uniform grid `w_j = start + j h`.
///
/// Uses the subtraction form
/// `PV int f/(w'-w_k) = int (f(w') - f_k)/(w' - w_k) + f_k ln((b - w_k)/(w_k - a))`,
/// integrating the regular part with the trapezoid rule. At the singular node
/// the integrand is replaced by its two-sided limit `f'(w_k)`, estimated by a
/// central difference. Both sums over `j != k` are discrete convolutions with
/// the kernel `1/(j - k)` and run through one zero-padded FFT each.
///
/// Endpoint entries are returned as `NaN` (the log term diverges there).
pub fn hilbert_transform_uniform(values: &[f64], start: f64, h: f64) -> Vec<f64> {
    let n = values.len();
    if n < 3 {
        return vec![f64::NAN; n];
    }
    let weights: Vec<f64> = (0..n)
        .map(|j| if j == 0 || j == n - 1 { 0.5 } else { 1.0 })
        .collect();
    let weighted: Vec<f64> = values.iter().zip(&weights).map(|(v, w)| v * w).collect();

    let conv_values = inverse_distance_convolution(&weighted);
    let conv_weights = inverse_distance_convolution(&weights);

    let a = start;
    let b = start + (n - 1) as f64 * h;
    let mut out = vec![f64::NAN; n];
    for k in 1..n - 1 {
        let w_k = start + k as f64 * h;
        let derivative = (values[k + 1] - values[k - 1]) / (2.0 * h);
        let regular = conv_values[k] - values[k] * conv_weights[k] + weights[k] * h * derivative;
        let log_term = values[k] * ((b - w_k) / (w_k - a)).ln();
        out[k] = (regular + log_term) / PI;
    }
    out
}

/// `out_k = sum_{j != k} a_j / (j - k)` via circular convolution of length `2n`.
fn inverse_distance_convolution(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let m = 2 * n;
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);

    let mut signal: Vec<Complex64> = a
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(std::iter::repeat_n(Complex64::new(0.0, 0.0), m - n))
        .collect();
    // out_k = sum_j a_j d_{k-j} with d_s = -1/s.
    let mut kernel = vec![Complex64::new(0.0, 0.0); m];
    for s in 1..n {
        kernel[s] = Complex64::new(-1.0 / s as f64, 0.0);
        kernel[m - s] = Complex64::new(1.0 / s as f64, 0.0);
    }
    forward.process(&mut signal);
    forward.process(&mut kernel);
    for (x, k) in signal.iter_mut().zip(&kernel) {
        *x *= k;
    }
    inverse.process(&mut signal);
    signal[..n].iter().map(|z| z.re / m as f64).collect()
}
