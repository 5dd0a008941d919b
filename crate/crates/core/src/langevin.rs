//! Reduced stochastic model: a damped oscillator amplitude driven by white
//! Langevin noise,
//!
//! ```text
//! da/dt = (-i w0 - eta) a + F(t),      <F(t) F*(t')> = 2 D delta(t - t')
//! ```
//!
//! and its macroscopic two-quadrature form for `P` and `Pi`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::bath::{fit_decay, simulate_bath_sampled, BathSystem};
use crate::dispersion::LossRegime;
use crate::error::{Error, Result};
use crate::spectral::SpectralDensity;
use crate::stats::{run_ensemble, trajectory_rng, EnsembleStats, StationaryMoment, Trajectory};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// External field driving the macroscopic polarization.
#[derive(Debug, Clone, PartialEq)]
pub enum Drive {
    /// `E(t) = amplitude cos(omega t)`.
    Harmonic { amplitude: f64, omega: f64 },
    /// Samples `values[k]` at `t0 + k dt`, linearly interpolated, zero outside.
    Series { t0: f64, dt: f64, values: Vec<f64> },
}

impl Drive {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Drive::Harmonic { amplitude, omega } => amplitude * (omega * t).cos(),
            Drive::Series { t0, dt, values } => {
                let x = (t - t0) / dt;
                if x < 0.0 || values.is_empty() {
                    return 0.0;
                }
                let k = x.floor() as usize;
                match (values.get(k), values.get(k + 1)) {
                    (Some(a), Some(b)) => a + (x - k as f64) * (b - a),
                    (Some(a), None) if x == k as f64 => *a,
                    _ => 0.0,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangevinParams {
    pub omega_0: f64,
    /// Amplitude decay rate, `gamma / 2`.
    pub eta: f64,
    /// `D` in `<F F*> = 2 D delta`.
    pub noise_power: f64,
    pub omega_p: f64,
    pub hbar: f64,
    /// Only used by [`integrate_macroscopic`].
    pub drive: Option<Drive>,
}

impl LangevinParams {
    /// `D = eta`, `omega_p = hbar = 1`, no drive.
    pub fn new(omega_0: f64, eta: f64) -> Result<Self> {
        let p = Self {
            omega_0,
            eta,
            noise_power: eta,
            omega_p: 1.0,
            hbar: 1.0,
            drive: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_noise_power(mut self, d: f64) -> Result<Self> {
        self.noise_power = d;
        self.validate()?;
        Ok(self)
    }

    pub fn with_omega_p(mut self, omega_p: f64) -> Result<Self> {
        self.omega_p = omega_p;
        self.validate()?;
        Ok(self)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn with_drive(mut self, drive: Drive) -> Self {
        self.drive = Some(drive);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega_0,
            self.eta,
            self.noise_power,
            self.omega_p,
            self.hbar,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(
                "Langevin parameters must be finite".into(),
            ));
        }
        if self.omega_0 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega_0 = {} must be positive",
                self.omega_0
            )));
        }
        if self.eta < 0.0 || self.noise_power < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eta = {} and noise power = {} must be >= 0",
                self.eta, self.noise_power
            )));
        }
        if self.omega_p < 0.0 || self.hbar <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega_p = {} must be >= 0 and hbar = {} positive",
                self.omega_p, self.hbar
            )));
        }
        Ok(())
    }

    /// Stationary `<|a|^2>` of the continuous model, `D / eta`.
    pub fn stationary_power(&self) -> f64 {
        self.noise_power / self.eta
    }

    /// Per-quadrature strength `S` of the macroscopic noises,
    /// `<F_X(t) F_X(t')> = 2 S delta(t - t')` with `S = D hbar w_p^2 / w0`.
    pub fn macroscopic_noise_strength(&self) -> f64 {
        self.noise_power * self.hbar * self.omega_p * self.omega_p / self.omega_0
    }

    fn generator(&self) -> Complex64 {
        Complex64::new(-self.eta, -self.omega_0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Exact `e^{(-i w0 - eta) dt}` between noise kicks applied at mid-step.
    #[default]
    ExactPropagator,
    EulerMaruyama,
}

fn check_step(p: &LangevinParams, t_end: f64, dt: f64) -> Result<usize> {
    p.validate()?;
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and t_end >= 0 (got {dt}, {t_end})"
        )));
    }
    if dt * p.omega_0 >= 0.1 || dt * p.eta >= 0.1 {
        return Err(Error::StepSize(format!(
            "dt = {dt} must satisfy dt w0 < 0.1 and dt eta < 0.1 (w0 = {}, eta = {})",
            p.omega_0, p.eta
        )));
    }
    Ok((t_end / dt).round() as usize)
}

fn circular<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    FRAC_1_SQRT_2 * Complex64::new(re, im)
}

/// `n` samples of the discretized noise `F_k = sqrt(2 D / dt) xi_k`, whose
/// periodogram has expectation `2 D` at every frequency.
pub fn noise_samples<R: Rng + ?Sized>(d: f64, dt: f64, n: usize, rng: &mut R) -> Vec<Complex64> {
    let s = (2.0 * d / dt).sqrt();
    (0..n).map(|_| s * circular(rng)).collect()
}

/// One trajectory sampled every `sample_every` steps (the last step is always
/// kept).
pub fn langevin_path<R: Rng + ?Sized>(
    p: &LangevinParams,
    a0: Complex64,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
    sample_every: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    let steps = check_step(p, t_end, dt)?;
    if sample_every == 0 {
        return Err(Error::InvalidParameter("sample_every must be >= 1".into()));
    }
    let l = p.generator();
    let prop = (l * dt).exp();
    let half = (l * 0.5 * dt).exp();
    let kick = (2.0 * p.noise_power * dt).sqrt();
    let noisy = p.noise_power > 0.0;
    let mut a = a0;
    let mut traj = Trajectory::default();
    traj.t.push(0.0);
    traj.a.push(a);
    for step in 1..=steps {
        let f = if noisy {
            kick * circular(rng)
        } else {
            Complex64::new(0.0, 0.0)
        };
        a = match scheme {
            Scheme::ExactPropagator => prop * a + half * f,
            Scheme::EulerMaruyama => a + dt * l * a + f,
        };
        if step % sample_every == 0 || step == steps {
            traj.t.push(step as f64 * dt);
            traj.a.push(a);
        }
    }
    if !a.is_finite() {
        return Err(Error::BlowUp { step: steps });
    }
    Ok(traj)
}

/// Default-scheme trajectory sampled every step, seeded by `seed`.
pub fn integrate_langevin(
    p: &LangevinParams,
    a0: Complex64,
    t_end: f64,
    dt: f64,
    seed: u64,
) -> Result<Trajectory> {
    let mut rng = trajectory_rng(seed, 0);
    langevin_path(p, a0, t_end, dt, Scheme::ExactPropagator, 1, &mut rng)
}

/// Ensemble of default-scheme trajectories; see [`run_ensemble`].
#[allow(clippy::too_many_arguments)]
pub fn langevin_ensemble(
    p: &LangevinParams,
    a0: Complex64,
    t_end: f64,
    dt: f64,
    sample_every: usize,
    n_traj: usize,
    seed: u64,
    window: Option<(f64, f64)>,
) -> Result<EnsembleStats> {
    run_ensemble(n_traj, seed, window, |rng| {
        langevin_path(p, a0, t_end, dt, Scheme::ExactPropagator, sample_every, rng)
    })
}

/// Macroscopic polarization quadratures as `a = P + i Pi`:
///
/// ```text
/// dP/dt  =  w0 Pi - eta P + F_R
/// dPi/dt = -w0 P  - eta Pi + F_I + (w_p^2 / w0) E(t)
/// ```
///
/// `F_R`, `F_I` are independent real white noises of strength
/// [`LangevinParams::macroscopic_noise_strength`]. The drive enters through
/// its mid-step value.
pub fn macroscopic_path<R: Rng + ?Sized>(
    p: &LangevinParams,
    p0: f64,
    pi0: f64,
    t_end: f64,
    dt: f64,
    sample_every: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    let steps = check_step(p, t_end, dt)?;
    if sample_every == 0 {
        return Err(Error::InvalidParameter("sample_every must be >= 1".into()));
    }
    let l = p.generator();
    let prop = (l * dt).exp();
    let half = (l * 0.5 * dt).exp();
    let s = p.macroscopic_noise_strength();
    let kick = (2.0 * s * dt).sqrt();
    let coupling = p.omega_p * p.omega_p / p.omega_0;
    let mut z = Complex64::new(p0, pi0);
    let mut traj = Trajectory::default();
    traj.t.push(0.0);
    traj.a.push(z);
    for step in 1..=steps {
        let t_mid = (step as f64 - 0.5) * dt;
        let mut f = match &p.drive {
            Some(d) => I * (coupling * d.at(t_mid) * dt),
            None => Complex64::new(0.0, 0.0),
        };
        if s > 0.0 {
            let fr: f64 = rng.sample(StandardNormal);
            let fi: f64 = rng.sample(StandardNormal);
            f += kick * Complex64::new(fr, fi);
        }
        z = prop * z + half * f;
        if step % sample_every == 0 || step == steps {
            traj.t.push(step as f64 * dt);
            traj.a.push(z);
        }
    }
    if !z.is_finite() {
        return Err(Error::BlowUp { step: steps });
    }
    Ok(traj)
}

pub fn integrate_macroscopic(
    p: &LangevinParams,
    p0: f64,
    pi0: f64,
    t_end: f64,
    dt: f64,
    seed: u64,
) -> Result<Trajectory> {
    let mut rng = trajectory_rng(seed, 0);
    macroscopic_path(p, p0, pi0, t_end, dt, 1, &mut rng)
}

/// Noise-free steady-state susceptibility `P(w) / E(w)` at drive frequency
/// `omega`, measured by lock-in over `periods` whole periods after a settling
/// time of `settle_decays / eta`.
pub fn measure_susceptibility(
    p: &LangevinParams,
    omega: f64,
    dt: f64,
    settle_decays: f64,
    periods: usize,
) -> Result<Complex64> {
    if !(omega > 0.0) || periods == 0 || !(p.eta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need omega > 0, eta > 0 and periods >= 1 (got {omega}, {}, {periods})",
            p.eta
        )));
    }
    let period = 2.0 * PI / omega;
    // whole number of steps per period keeps the lock-in sum exact
    let per_period = (period / dt).ceil() as usize;
    let dt = period / per_period as f64;
    let settle_periods = (settle_decays / p.eta / period).ceil() as usize;
    let t_end = (settle_periods + periods) as f64 * period;
    let mut q = p.clone();
    q.noise_power = 0.0;
    q.drive = Some(Drive::Harmonic {
        amplitude: 1.0,
        omega,
    });
    let mut rng = trajectory_rng(0, 0);
    let tr = macroscopic_path(&q, 0.0, 0.0, t_end, dt, 1, &mut rng)?;
    let start = settle_periods * per_period;
    let n = periods * per_period;
    let sum: Complex64 = (start..start + n)
        .map(|k| tr.a[k].re * Complex64::from_polar(1.0, omega * tr.t[k]))
        .sum();
    Ok(2.0 * sum / n as f64)
}

/// Noise-current spectral weight built from the stochastic model: the
/// response of `j = dP/dt` to `F_R`, `F_I` combined with their
/// cross-commutator `[F_R, F_I^dag] = i C` with `C = gamma w_p^2 hbar /
/// (2 pi w0)`.
///
/// For `LowLoss` the source is the reduced combination
/// `N = w0 F_I - i w F_R` over `w0^2 - w^2 - i w gamma`; for `HighLoss` the
/// quadrature responses `-i w w0 / D` and `-i w (eta - i w) / D` with
/// `D = (eta - i w)^2 + w0^2` are kept exactly.
pub fn noise_current_spectrum(
    p: &LangevinParams,
    regime: LossRegime,
    omega: &[f64],
) -> SpectralDensity {
    let gamma = 2.0 * p.eta;
    let c = gamma * p.omega_p * p.omega_p * p.hbar / (2.0 * PI * p.omega_0);
    let w0 = p.omega_0;
    let values = omega
        .iter()
        .map(|&w| {
            let weight = match regime {
                LossRegime::LowLoss => {
                    let d = Complex64::new(w0 * w0 - w * w, -w * gamma);
                    // [N, N^dag] = w0 (i w)[F_I, F_R^dag] - i w w0 [F_R, F_I^dag]
                    let nn = (I * w * w0 * Complex64::new(0.0, -c)
                        - I * w * w0 * Complex64::new(0.0, c))
                    .re;
                    w * w / d.norm_sqr() * nn
                }
                LossRegime::HighLoss => {
                    let d = Complex64::new(p.eta, -w).powi(2) + w0 * w0;
                    let t_i = -I * w * w0 / d;
                    let t_r = -I * w * Complex64::new(p.eta, -w) / d;
                    // [j, j^dag] = t_R t_I^* (i C) + t_I t_R^* (-i C)
                    (t_r * t_i.conj() * I * c - t_i * t_r.conj() * I * c).re
                }
            };
            Complex64::new(weight, 0.0)
        })
        .collect();
    SpectralDensity::new(omega.to_vec(), values).expect("one value per frequency")
}

/// Settings for [`compare_bath_vs_langevin`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    pub seed: u64,
    pub bath_dt: f64,
    pub langevin_dt: f64,
    /// Spacing of the compared samples; a multiple of both steps.
    pub sample_dt: f64,
    /// End of the cold-bath comparison (clipped to the recurrence time).
    pub cold_t_end: f64,
    pub warm_t_end: f64,
    pub window: (f64, f64),
    pub n_bath: usize,
    pub n_langevin: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathLangevinReport {
    /// `max |P_bath - P_langevin| / P_langevin` of `|a|^2` over the cold run.
    pub cold_max_rel_dev: f64,
    pub cold_t_end: f64,
    pub eta_bath: f64,
    pub eta_langevin: f64,
    pub warm_bath: StationaryMoment,
    pub warm_langevin: StationaryMoment,
    /// Warm-moment difference in combined standard errors.
    pub warm_z: f64,
    pub cold_bath: Trajectory,
    pub cold_langevin: Trajectory,
}

fn stride(sample_dt: f64, dt: f64) -> Result<usize> {
    let k = (sample_dt / dt).round();
    if k < 1.0 || ((k * dt) - sample_dt).abs() > 1e-9 * sample_dt {
        return Err(Error::InvalidParameter(format!(
            "sample spacing {sample_dt} is not a multiple of step {dt}"
        )));
    }
    Ok(k as usize)
}

/// Run matched cold and warm ensembles of the microscopic bath and the
/// reduced Langevin model. The warm bath starts with
/// `<|b_j|^2> = D / eta`, which gives the bath force the correlation
/// `2 D delta` of the Langevin source; both start from `a = 0`.
pub fn compare_bath_vs_langevin(
    bath: &BathSystem,
    lp: &LangevinParams,
    cfg: &ComparisonConfig,
) -> Result<BathLangevinReport> {
    let scale = bath.eta_target.abs().max(lp.eta.abs()).max(1e-300);
    if (bath.eta_target - lp.eta).abs() > 1e-9 * scale {
        return Err(Error::Mismatch(format!(
            "bath eta {} differs from Langevin eta {}",
            bath.eta_target, lp.eta
        )));
    }
    if (bath.omega_0 - lp.omega_0).abs() > 1e-9 * lp.omega_0 {
        return Err(Error::Mismatch(format!(
            "bath omega_0 {} differs from Langevin omega_0 {}",
            bath.omega_0, lp.omega_0
        )));
    }
    let bath_every = stride(cfg.sample_dt, cfg.bath_dt)?;
    let lang_every = stride(cfg.sample_dt, cfg.langevin_dt)?;

    // cold: deterministic decay from a = 1
    let cold_t_end = cfg.cold_t_end.min(bath.recurrence_time());
    let mut cold = bath.clone();
    cold.a = Complex64::new(1.0, 0.0);
    cold.b
        .iter_mut()
        .for_each(|b| *b = Complex64::new(0.0, 0.0));
    let cold_bath =
        simulate_bath_sampled(&cold, cold_t_end, cfg.bath_dt, cfg.seed, 0.0, bath_every)?;
    let quiet = lp.clone().with_noise_power(0.0)?;
    let mut rng = trajectory_rng(cfg.seed, 0);
    let cold_langevin = langevin_path(
        &quiet,
        Complex64::new(1.0, 0.0),
        cold_t_end,
        cfg.langevin_dt,
        Scheme::ExactPropagator,
        lang_every,
        &mut rng,
    )?;
    if cold_bath.len() != cold_langevin.len() {
        return Err(Error::LengthMismatch(
            "cold runs sampled differently".into(),
        ));
    }
    let cold_max_rel_dev = cold_bath
        .a
        .iter()
        .zip(&cold_langevin.a)
        .map(|(b, l)| (b.norm_sqr() - l.norm_sqr()).abs() / l.norm_sqr())
        .fold(0.0, f64::max);
    let fit_window = (0.0, cold_t_end);
    let eta_bath = fit_decay(&cold_bath, fit_window)?.eta_measured;
    let eta_langevin = fit_decay(&cold_langevin, fit_window)?.eta_measured;

    // warm: stationary second moment
    if cfg.warm_t_end > bath.recurrence_time() {
        return Err(Error::InvalidParameter(format!(
            "warm run length {} exceeds the bath recurrence time {}",
            cfg.warm_t_end,
            bath.recurrence_time()
        )));
    }
    let mut warm = cold;
    warm.a = Complex64::new(0.0, 0.0);
    let b0 = lp.stationary_power().sqrt();
    let bath_stats = run_ensemble(cfg.n_bath, cfg.seed, Some(cfg.window), |rng| {
        simulate_bath_sampled(
            &warm,
            cfg.warm_t_end,
            cfg.bath_dt,
            rng.gen(),
            b0,
            bath_every,
        )
    })?;
    let lang_stats = langevin_ensemble(
        lp,
        Complex64::new(0.0, 0.0),
        cfg.warm_t_end,
        cfg.langevin_dt,
        lang_every,
        cfg.n_langevin,
        cfg.seed.wrapping_add(1),
        Some(cfg.window),
    )?;
    let need_two =
        || Error::InvalidParameter("warm ensembles need at least two trajectories".into());
    let warm_bath = bath_stats.stationary().ok_or_else(need_two)?;
    let warm_langevin = lang_stats.stationary().ok_or_else(need_two)?;
    Ok(BathLangevinReport {
        cold_max_rel_dev,
        cold_t_end,
        eta_bath,
        eta_langevin,
        warm_bath,
        warm_langevin,
        warm_z: warm_bath.z_score(&warm_langevin),
        cold_bath,
        cold_langevin,
    })
}
