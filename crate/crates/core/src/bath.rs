//! One complex oscillator amplitude coupled to a discrete bath in the
//! rotating-wave form
//!
//! ```text
//! da/dt   = -i (w0 a + sum_j g_j b_j)
//! db_j/dt = -i (w_j b_j + g_j a)
//! ```
//!
//! With flat coupling `g_j^2 = eta dw / pi` the amplitude of `a` decays at
//! rate `eta` until the recurrence time `2 pi / dw`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::stats::{trajectory_rng, Trajectory};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct BathSystem {
    pub omega_0: f64,
    pub a: Complex64,
    pub omega_j: Vec<f64>,
    pub gamma_j: Vec<f64>,
    pub b: Vec<Complex64>,
    pub eta_target: f64,
}

impl BathSystem {
    /// Flat coupling over `n` bath modes at the midpoints of `n` equal bins
    /// spanning `band`. Starts with `a = 1`, `b = 0`.
    pub fn flat(omega_0: f64, eta: f64, band: (f64, f64), n: usize) -> Result<Self> {
        Self::with_profile(omega_0, eta, band, n, |_| 1.0)
    }

    /// Like [`BathSystem::flat`] with couplings scaled by `profile(w_j)`.
    pub fn with_profile<F: Fn(f64) -> f64>(
        omega_0: f64,
        eta: f64,
        band: (f64, f64),
        n: usize,
        profile: F,
    ) -> Result<Self> {
        let (lo, hi) = band;
        if n == 0 {
            return Err(Error::InvalidParameter(
                "bath needs at least one mode".into(),
            ));
        }
        if !(lo < omega_0 && omega_0 < hi) {
            return Err(Error::InvalidParameter(format!(
                "resonance {omega_0} must lie inside the band ({lo}, {hi})"
            )));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "decay rate {eta} must be >= 0"
            )));
        }
        let dw = (hi - lo) / n as f64;
        let g0 = (eta * dw / PI).sqrt();
        let omega_j: Vec<f64> = (0..n).map(|j| lo + (j as f64 + 0.5) * dw).collect();
        let gamma_j = omega_j.iter().map(|&w| g0 * profile(w)).collect();
        Ok(Self {
            omega_0,
            a: Complex64::new(1.0, 0.0),
            omega_j,
            gamma_j,
            b: vec![Complex64::new(0.0, 0.0); n],
            eta_target: eta,
        })
    }

    /// A single bath mode, mainly for tests.
    pub fn single(omega_0: f64, omega_1: f64, gamma_1: f64) -> Self {
        Self {
            omega_0,
            a: Complex64::new(1.0, 0.0),
            omega_j: vec![omega_1],
            gamma_j: vec![gamma_1],
            b: vec![Complex64::new(0.0, 0.0)],
            eta_target: 0.0,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.omega_j.len()
    }

    /// Mode spacing, or 0 for a single mode.
    pub fn delta_omega(&self) -> f64 {
        match self.omega_j.as_slice() {
            [first, second, ..] => second - first,
            _ => 0.0,
        }
    }

    /// `2 pi / dw`: when the discrete bath starts returning energy.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.delta_omega()
    }

    pub fn band(&self) -> (f64, f64) {
        let half = 0.5 * self.delta_omega();
        (
            self.omega_j.first().copied().unwrap_or(0.0) - half,
            self.omega_j.last().copied().unwrap_or(0.0) + half,
        )
    }

    pub fn coupling_sum(&self) -> f64 {
        self.gamma_j.iter().map(|g| g * g).sum()
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_j
            .iter()
            .copied()
            .fold(self.omega_0.abs(), |m, w| m.max(w.abs()))
    }

    fn check(&self) -> Result<()> {
        let n = self.omega_j.len();
        if n == 0 || self.gamma_j.len() != n || self.b.len() != n {
            return Err(Error::LengthMismatch(format!(
                "bath has {} frequencies, {} couplings, {} amplitudes",
                n,
                self.gamma_j.len(),
                self.b.len()
            )));
        }
        Ok(())
    }
}

/// Right-hand side in the frame rotating at `w_c`; `dw_j = w_j - w_c`.
fn rhs(
    a: Complex64,
    b: &[Complex64],
    dw0: f64,
    dw_j: &[f64],
    g: &[f64],
    db: &mut [Complex64],
) -> Complex64 {
    let mut drive = Complex64::new(0.0, 0.0);
    for j in 0..b.len() {
        drive += g[j] * b[j];
        db[j] = -I * (dw_j[j] * b[j] + g[j] * a);
    }
    -I * (dw0 * a + drive)
}

/// Integrate the coupled system with classical RK4 and sample every step.
///
/// The bath amplitudes start as circular complex Gaussians with
/// `<|b_j|^2> = b0_scale^2` drawn from `rng_seed` (no draws for a cold bath),
/// the primary amplitude starts at `sys.a`. The equations are integrated in a
/// frame rotating at the band center, which is an exact change of variables
/// that leaves `|a|` and `|b_j|` unchanged but shrinks the phase rate RK4 has
/// to resolve.
pub fn simulate_bath(
    sys: &BathSystem,
    t_end: f64,
    dt: f64,
    rng_seed: u64,
    b0_scale: f64,
) -> Result<Trajectory> {
    simulate_bath_sampled(sys, t_end, dt, rng_seed, b0_scale, 1)
}

/// [`simulate_bath`] keeping every `sample_every`-th step.
pub fn simulate_bath_sampled(
    sys: &BathSystem,
    t_end: f64,
    dt: f64,
    rng_seed: u64,
    b0_scale: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    sys.check()?;
    if !(dt > 0.0) || !(t_end >= 0.0) || sample_every == 0 {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0, t_end >= 0, sample_every >= 1 (got {dt}, {t_end}, {sample_every})"
        )));
    }
    let w_max = sys.omega_max();
    if dt > 0.05 / w_max {
        return Err(Error::StepSize(format!(
            "dt = {dt} exceeds 0.05 / omega_max = {}",
            0.05 / w_max
        )));
    }
    let mut b = sys.b.clone();
    if b0_scale > 0.0 {
        let mut rng = trajectory_rng(rng_seed, 0);
        let s = b0_scale * std::f64::consts::FRAC_1_SQRT_2;
        for bj in &mut b {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *bj += s * Complex64::new(re, im);
        }
    }
    let (lo, hi) = sys.band();
    let wc = 0.5 * (lo + hi);
    let dw0 = sys.omega_0 - wc;
    let dw_j: Vec<f64> = sys.omega_j.iter().map(|w| w - wc).collect();
    let g = &sys.gamma_j;
    let n = b.len();
    let steps = (t_end / dt).round() as usize;

    let mut a = sys.a;
    let mut k1 = vec![Complex64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let mut traj = Trajectory::default();
    let invariant0 = a.norm_sqr() + b.iter().map(|x| x.norm_sqr()).sum::<f64>();

    let record = |step: usize, a: Complex64, b: &[Complex64], traj: &mut Trajectory| {
        let t = step as f64 * dt;
        let bath: f64 = b.iter().map(|x| x.norm_sqr()).sum();
        // back to the lab frame
        traj.t.push(t);
        traj.a.push(a * Complex64::from_polar(1.0, -wc * t));
        traj.bath_energy.push(bath);
        a.norm_sqr() + bath
    };
    record(0, a, &b, &mut traj);

    for step in 1..=steps {
        let ka1 = rhs(a, &b, dw0, &dw_j, g, &mut k1);
        for j in 0..n {
            tmp[j] = b[j] + 0.5 * dt * k1[j];
        }
        let ka2 = rhs(a + 0.5 * dt * ka1, &tmp, dw0, &dw_j, g, &mut k2);
        for j in 0..n {
            tmp[j] = b[j] + 0.5 * dt * k2[j];
        }
        let ka3 = rhs(a + 0.5 * dt * ka2, &tmp, dw0, &dw_j, g, &mut k3);
        for j in 0..n {
            tmp[j] = b[j] + dt * k3[j];
        }
        let ka4 = rhs(a + dt * ka3, &tmp, dw0, &dw_j, g, &mut k4);
        a += dt / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        for j in 0..n {
            b[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if step % sample_every == 0 || step == steps {
            let inv = record(step, a, &b, &mut traj);
            if !inv.is_finite() || inv > invariant0 * (1.0 + 1e-6) {
                return Err(Error::StepSize(format!(
                    "quadratic invariant grew from {invariant0:e} to {inv:e} by t = {}",
                    step as f64 * dt
                )));
            }
        }
    }
    Ok(traj)
}

/// `B(tau) = sum_j g_j^2 e^{-i w_j tau}`.
pub fn memory_kernel(sys: &BathSystem, tau_grid: &[f64]) -> Vec<Complex64> {
    tau_grid
        .iter()
        .map(|&tau| {
            sys.omega_j
                .iter()
                .zip(&sys.gamma_j)
                .map(|(w, g)| g * g * Complex64::from_polar(1.0, -w * tau))
                .sum()
        })
        .collect()
}

/// Trapezoid integrals of the kernel seen by a slowly varying amplitude,
/// `B(tau) e^{i w0 tau}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelIntegral {
    /// `int_0^T`; its real part is the decay rate.
    pub causal: Complex64,
    /// `int_{-T}^T`, the weight of the delta function.
    pub two_sided: Complex64,
    pub t_max: f64,
}

pub fn kernel_integral(sys: &BathSystem, t_max: f64, n_steps: usize) -> Result<KernelIntegral> {
    if !(t_max > 0.0) || n_steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "need t_max > 0 and at least two intervals (got {t_max}, {n_steps})"
        )));
    }
    let h = t_max / n_steps as f64;
    let taus: Vec<f64> = (0..=n_steps).map(|k| k as f64 * h).collect();
    let kernel = memory_kernel(sys, &taus);
    let mut causal = Complex64::new(0.0, 0.0);
    for (k, (b, tau)) in kernel.iter().zip(&taus).enumerate() {
        let w = if k == 0 || k == n_steps { 0.5 } else { 1.0 };
        causal += w * h * b * Complex64::from_polar(1.0, sys.omega_0 * tau);
    }
    // B(-tau) e^{-i w0 tau} = conj(B(tau) e^{i w0 tau}) for real couplings
    Ok(KernelIntegral {
        causal,
        two_sided: Complex64::new(2.0 * causal.re, 0.0),
        t_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub eta_measured: f64,
    pub r_squared: f64,
    pub t_window: (f64, f64),
    /// Set when the window spans less than three decay times.
    pub short_window: bool,
}

/// Least-squares line through `ln|a(t)|` on `window`; `eta_measured` is
/// minus the slope.
pub fn fit_decay(traj: &Trajectory, window: (f64, f64)) -> Result<DecayFit> {
    let (t0, t1) = window;
    let first = traj.t.first().copied().unwrap_or(f64::NAN);
    let last = traj.t.last().copied().unwrap_or(f64::NAN);
    if !(t0 < t1) || t0 < first || t1 > last {
        return Err(Error::InvalidParameter(format!(
            "window ({t0}, {t1}) is not inside the trajectory span ({first}, {last})"
        )));
    }
    let mut pts = Vec::new();
    for (t, a) in traj.t.iter().zip(&traj.a) {
        if *t >= t0 && *t <= t1 {
            let r = a.norm();
            if r <= 1e-12 {
                return Err(Error::InvalidParameter(format!("|a| = {r:e} at t = {t}")));
            }
            pts.push((*t, r.ln()));
        }
    }
    if pts.len() < 3 {
        return Err(Error::InvalidParameter(
            "fewer than three samples in window".into(),
        ));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sty / stt;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sty * sty / (stt * syy)).clamp(0.0, 1.0)
    };
    let eta = -slope;
    Ok(DecayFit {
        eta_measured: eta,
        r_squared,
        t_window: window,
        short_window: (t1 - t0) * eta.abs() < 3.0,
    })
}

/// Laplace-domain pole `s = -i w0 - eta` of the reduced amplitude.
pub fn laplace_pole(omega_0: f64, eta: f64) -> Complex64 {
    Complex64::new(-eta, -omega_0)
}

/// `I(s) = sum_j g_j^2 / (s + i w_j)`.
pub fn laplace_self_energy(sys: &BathSystem, s: Complex64) -> Complex64 {
    sys.omega_j
        .iter()
        .zip(&sys.gamma_j)
        .map(|(w, g)| g * g / (s + I * w))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn band_and_spacing() {
        let s = BathSystem::flat(1.0, 0.05, (0.2, 1.8), 2000).unwrap();
        assert_relative_eq!(s.delta_omega(), 0.0008, max_relative = 1e-9);
        let (lo, hi) = s.band();
        assert_relative_eq!(lo, 0.2, max_relative = 1e-9);
        assert_relative_eq!(hi, 1.8, max_relative = 1e-9);
        assert_relative_eq!(s.coupling_sum(), 0.05 * 1.6 / PI, max_relative = 1e-9);
    }

    #[test]
    fn resonance_outside_band_rejected() {
        assert!(BathSystem::flat(2.0, 0.05, (0.2, 1.8), 10).is_err());
        assert!(BathSystem::flat(1.0, 0.05, (0.2, 1.8), 0).is_err());
    }

    #[test]
    fn decoupled_rotation() {
        let mut s = BathSystem::flat(1.0, 0.0, (0.5, 1.5), 4).unwrap();
        s.gamma_j = vec![0.0; 4];
        let tr = simulate_bath(&s, 10.0, 0.02, 0, 0.0).unwrap();
        for (t, a) in tr.t.iter().zip(&tr.a) {
            assert!((a - Complex64::from_polar(1.0, -t)).norm() < 1e-9);
        }
    }

    #[test]
    fn coarse_step_rejected() {
        let s = BathSystem::flat(1.0, 0.05, (0.2, 1.8), 10).unwrap();
        assert!(matches!(
            simulate_bath(&s, 1.0, 0.1, 0, 0.0),
            Err(Error::StepSize(_))
        ));
    }

    #[test]
    fn single_mode_kernel_has_constant_modulus() {
        let s = BathSystem::single(1.0, 1.3, 0.2);
        for b in memory_kernel(&s, &[0.0, 0.7, 5.0, -3.0]) {
            assert_relative_eq!(b.norm(), 0.04, max_relative = 1e-12);
        }
    }

    #[test]
    fn two_mode_exchange() {
        // resonant pair: a = cos(g t) e^{-i w t}
        let s = BathSystem::single(1.0, 1.0, 0.1);
        let tr = simulate_bath(&s, 20.0, 0.01, 0, 0.0).unwrap();
        for (t, a) in tr.t.iter().zip(&tr.a) {
            let exact = (0.1 * t).cos() * Complex64::from_polar(1.0, -t);
            assert!((a - exact).norm() < 1e-9);
        }
    }

    #[test]
    fn synthetic_exponential_fit() {
        let t: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        let a = t
            .iter()
            .map(|&t| Complex64::new(-0.1 * t, -2.0 * t).exp())
            .collect();
        let tr = Trajectory {
            t,
            a,
            bath_energy: Vec::new(),
        };
        let fit = fit_decay(&tr, (0.0, 19.9)).unwrap();
        assert_relative_eq!(fit.eta_measured, 0.1, max_relative = 1e-10);
        assert_relative_eq!(fit.r_squared, 1.0, max_relative = 1e-10);
        assert!(fit.short_window);
        assert!(fit_decay(&tr, (0.0, 50.0)).is_err());
    }

    #[test]
    fn pole() {
        assert_eq!(laplace_pole(1.0, 0.05), Complex64::new(-0.05, -1.0));
        assert_eq!(laplace_pole(1.0, 0.0), Complex64::new(0.0, -1.0));
    }
}
