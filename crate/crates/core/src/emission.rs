//! Two-level emitter driven by a field spectral density: first-order
//! population, golden-rule rate, and the 1-D Green function that supplies the
//! spectral density.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::dispersion::{permittivity, DispersionParams, LossRegime};
use crate::error::{Error, Result};
use crate::maxwell::{Boundary, FieldState1D, Grid1D};
use crate::spectral::SpectralDensity;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelAtom {
    pub omega_eg: f64,
    pub mu_eg: f64,
    pub position: f64,
    pub hbar: f64,
}

impl TwoLevelAtom {
    /// `hbar = 1`.
    pub fn new(omega_eg: f64, mu_eg: f64, position: f64) -> Result<Self> {
        if !(omega_eg > 0.0) || !omega_eg.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "transition frequency {omega_eg} must be positive"
            )));
        }
        Ok(Self {
            omega_eg,
            mu_eg,
            position,
            hbar: 1.0,
        })
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar = {hbar} must be positive"
            )));
        }
        self.hbar = hbar;
        Ok(self)
    }

    fn coupling(&self) -> f64 {
        self.mu_eg * self.mu_eg / (self.hbar * self.hbar)
    }
}

/// Nonnegative field spectral density on an increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpectralDensity {
    omega: Vec<f64>,
    s: Vec<f64>,
}

impl FieldSpectralDensity {
    pub fn new(omega: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if omega.len() != s.len() {
            return Err(Error::LengthMismatch(format!(
                "{} frequencies for {} values",
                omega.len(),
                s.len()
            )));
        }
        if omega.len() < 2 || omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "frequency grid must have at least two strictly increasing points".into(),
            ));
        }
        if let Some(bad) = s.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "spectral density value {bad} < 0"
            )));
        }
        Ok(Self { omega, s })
    }

    /// Sample `f` on `n` uniform points over `[lo, hi]`.
    pub fn sampled<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, f: F) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let omega: Vec<f64> = (0..n).map(|k| lo + k as f64 * h).collect();
        let s = omega.iter().map(|&w| f(w)).collect();
        Self::new(omega, s)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.s
    }
}

/// `|K|^2 = 4 sin^2(x t / 2) / x^2` with `x = w_eg - w`; equals
/// `t^2 sinc^2(x t / 2)` and tends to `t^2` at `x = 0`.
pub fn sinc_kernel(x: f64, t: f64) -> f64 {
    if (x * t).abs() < 1e-6 {
        // series: t^2 (1 - (x t)^2 / 12)
        return t * t * (1.0 - (x * t).powi(2) / 12.0);
    }
    let s = (0.5 * x * t).sin();
    4.0 * s * s / (x * x)
}

/// First-order excited-state population
/// `(mu^2 / hbar^2) int |K(w, t)|^2 S(w) dw`, trapezoid rule on the grid of
/// `s`.
///
/// The grid must cover `w_eg +- 50 / t` with spacing at most `2 pi / (10 t)`
/// (ten points per kernel lobe).
pub fn population(atom: &TwoLevelAtom, s: &FieldSpectralDensity, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time {t} must be >= 0")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = (s.omega[0], s.omega[s.omega.len() - 1]);
    let need = 50.0 / t;
    if lo > atom.omega_eg - need || hi < atom.omega_eg + need {
        return Err(Error::GridCoverage(format!(
            "grid [{lo}, {hi}] must span w_eg +- {need}"
        )));
    }
    let max_step = 2.0 * PI / (10.0 * t);
    if let Some(w) = s
        .omega
        .windows(2)
        .find(|w| w[1] - w[0] > max_step * (1.0 + 1e-9))
    {
        return Err(Error::GridCoverage(format!(
            "spacing {} at w = {} exceeds {max_step}",
            w[1] - w[0],
            w[0]
        )));
    }
    let f: Vec<f64> = s
        .omega
        .iter()
        .zip(&s.s)
        .map(|(w, v)| sinc_kernel(atom.omega_eg - w, t) * v)
        .collect();
    let integral: f64 = s
        .omega
        .windows(2)
        .zip(f.windows(2))
        .map(|(w, y)| 0.5 * (w[1] - w[0]) * (y[0] + y[1]))
        .sum();
    Ok(atom.coupling() * integral)
}

/// Golden-rule rate `2 pi (mu^2 / hbar^2) S(w_eg)`.
pub fn emission_rate(atom: &TwoLevelAtom, s_at_omega_eg: f64) -> Result<f64> {
    if !(s_at_omega_eg >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spectral density {s_at_omega_eg} must be >= 0"
        )));
    }
    Ok(2.0 * PI * atom.coupling() * s_at_omega_eg)
}

/// `S = (hbar w^2 / pi) (nbar + 1) Im G`.
pub fn spectral_density_from_green(im_g: f64, omega_eg: f64, nbar: f64, hbar: f64) -> f64 {
    hbar * omega_eg * omega_eg / PI * (nbar + 1.0) * im_g
}

/// Bose-Einstein occupation with `k_B = 1`; zero at zero temperature.
pub fn bose_einstein(omega: f64, temperature: f64, hbar: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (hbar * omega / temperature).exp_m1()
}

/// Gaussian-modulated carrier `exp(-(t - delay)^2 / (2 width^2)) sin(carrier t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenSource {
    pub carrier: f64,
    pub width: f64,
    pub delay: f64,
}

impl GreenSource {
    /// Delay of six widths so the pulse starts from numerically zero.
    pub fn new(carrier: f64, width: f64) -> Self {
        Self {
            carrier,
            width,
            delay: 6.0 * width,
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        let u = (t - self.delay) / self.width;
        (-0.5 * u * u).exp() * (self.carrier * t).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenOptions {
    pub source: GreenSource,
    pub t_end: f64,
    /// Taper the last 30% of the record with a half cosine instead of
    /// requiring the field to have decayed.
    pub window: bool,
    /// Largest allowed `max|E|` over the last 10% of the record relative to
    /// the overall maximum (ignored when windowing).
    pub decay_tolerance: f64,
}

/// `G(x0, x0, w) = E(x0, w) / (i w I(w))` from one time-domain run with a
/// soft current source of total strength `I(t)` at the node nearest `x0`.
///
/// Transforms use `int f(t) e^{i w t} dt` with `E` sampled at integer and the
/// current at half-integer time levels. The continuum 1-D vacuum value is
/// `Im G = 1 / (2 w)`.
pub fn green_function_1d(
    grid: &Grid1D,
    medium: &[DispersionParams],
    x0: f64,
    omega_probe: &[f64],
    opts: &GreenOptions,
) -> Result<SpectralDensity> {
    let node = grid.node_index(x0).ok_or_else(|| {
        Error::InvalidParameter(format!("source position {x0} is outside the grid"))
    })?;
    if omega_probe.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidParameter(
            "probe frequencies must be positive".into(),
        ));
    }
    check_resolution(grid, medium, omega_probe)?;
    let mut state = FieldState1D::new(grid, medium.to_vec())?;
    let dt = grid.dt();
    let steps = (opts.t_end / dt).round() as usize;
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "run length {} is too short",
            opts.t_end
        )));
    }
    let j_scale = 1.0 / grid.dx();
    let mut e_rec = Vec::with_capacity(steps);
    let mut i_rec = Vec::with_capacity(steps);
    for _ in 0..steps {
        let t_half = state.t + 0.5 * dt;
        let current = opts.source.at(t_half);
        state.step_with_current(grid, node, current * j_scale)?;
        i_rec.push((t_half, current));
        e_rec.push((state.t, state.e[node]));
    }

    let peak = e_rec.iter().map(|(_, e)| e.abs()).fold(0.0, f64::max);
    if opts.window {
        let t_end = e_rec.last().map_or(0.0, |(t, _)| *t);
        let start = 0.7 * t_end;
        for (t, e) in &mut e_rec {
            if *t > start {
                *e *= 0.5 * (1.0 + (PI * (*t - start) / (t_end - start)).cos());
            }
        }
    } else {
        let tail = &e_rec[(0.9 * steps as f64) as usize..];
        let residual = tail.iter().map(|(_, e)| e.abs()).fold(0.0, f64::max) / peak.max(1e-300);
        if residual > opts.decay_tolerance {
            return Err(Error::InsufficientDecay { residual });
        }
    }

    let transform = |rec: &[(f64, f64)], w: f64| -> Complex64 {
        rec.iter()
            .map(|(t, v)| v * Complex64::from_polar(dt, w * t))
            .sum()
    };
    let values = omega_probe
        .iter()
        .map(|&w| transform(&e_rec, w) / (Complex64::new(0.0, w) * transform(&i_rec, w)))
        .collect();
    SpectralDensity::new(omega_probe.to_vec(), values)
}

fn check_resolution(grid: &Grid1D, medium: &[DispersionParams], omega: &[f64]) -> Result<()> {
    const CELLS_PER_WAVELENGTH: usize = 20;
    let mut worst = f64::INFINITY;
    for &w in omega {
        for m in medium {
            let n = permittivity(m, w, LossRegime::LowLoss)?.value.sqrt().norm();
            worst = worst.min(2.0 * PI / (w * n.max(1.0)) / grid.dx());
        }
    }
    if worst < CELLS_PER_WAVELENGTH as f64 {
        return Err(Error::GridTooCoarse {
            points: worst,
            required: CELLS_PER_WAVELENGTH,
        });
    }
    Ok(())
}

/// `Im G_cavity / Im G_reference` frequency by frequency.
pub fn purcell_factors(cavity: &SpectralDensity, reference: &SpectralDensity) -> Result<Vec<f64>> {
    if cavity.omega != reference.omega {
        return Err(Error::Mismatch(
            "Green functions sampled at different frequencies".into(),
        ));
    }
    Ok(cavity
        .values
        .iter()
        .zip(&reference.values)
        .map(|(c, r)| c.im / r.im)
        .collect())
}

/// Vacuum reference run on a Mur-terminated line of `n_cells` with the same
/// cell size and time step as the structure being calibrated.
pub fn vacuum_reference(
    dx: f64,
    dt: f64,
    n_cells: usize,
    omega_probe: &[f64],
    opts: &GreenOptions,
) -> Result<SpectralDensity> {
    let grid = Grid1D::new(n_cells, dx, dt, Boundary::Mur)?;
    let medium = vec![DispersionParams::vacuum(); n_cells];
    green_function_1d(&grid, &medium, 0.5 * grid.length(), omega_probe, opts)
}

/// How a layered stack is terminated on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Perfect electric conductor (`E = 0`).
    Pec,
    /// Semi-infinite vacuum with outgoing waves only.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub thickness: f64,
    pub eps: Complex64,
}

fn propagate(psi: (Complex64, Complex64), k: Complex64, d: f64) -> (Complex64, Complex64) {
    let kd = k * d;
    let (c, s) = (kd.cos(), kd.sin());
    let s_over_k = if k.norm() < 1e-12 {
        Complex64::new(d, 0.0)
    } else {
        s / k
    };
    (c * psi.0 + s_over_k * psi.1, -k * s * psi.0 + c * psi.1)
}

/// Propagate `psi` through `layers` from `from` to `to` (either direction).
fn march(
    layers: &[Layer],
    omega: f64,
    mut psi: (Complex64, Complex64),
    from: f64,
    to: f64,
) -> (Complex64, Complex64) {
    let mut edges = Vec::with_capacity(layers.len() + 1);
    let mut x = 0.0;
    edges.push(x);
    for l in layers {
        x += l.thickness;
        edges.push(x);
    }
    let forward = to >= from;
    let mut pos = from;
    let order: Vec<usize> = if forward {
        (0..layers.len()).collect()
    } else {
        (0..layers.len()).rev().collect()
    };
    for i in order {
        let (a, b) = (edges[i], edges[i + 1]);
        let (lo, hi) = if forward {
            (pos.max(a), to.min(b))
        } else {
            (to.max(a), pos.min(b))
        };
        if hi <= lo {
            continue;
        }
        let k = omega * layers[i].eps.sqrt();
        let d = if forward { hi - lo } else { lo - hi };
        psi = propagate(psi, k, d);
        pos = if forward { hi } else { lo };
    }
    psi
}

/// Coincident-point Green function of `psi'' + w^2 eps(x) psi = -delta(x - x0)`
/// for a layered stack occupying `[0, sum thickness]`, from the Wronskian of
/// the left and right homogeneous solutions.
pub fn transfer_matrix_green(
    layers: &[Layer],
    x0: f64,
    omega: f64,
    left: Termination,
    right: Termination,
) -> Result<Complex64> {
    let length: f64 = layers.iter().map(|l| l.thickness).sum();
    if layers.is_empty() || !(x0 > 0.0 && x0 < length) {
        return Err(Error::InvalidParameter(format!(
            "source position {x0} must lie inside the stack (0, {length})"
        )));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "omega = {omega} must be positive"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let ik0 = Complex64::new(0.0, omega);
    let start_left = match left {
        Termination::Pec => (zero, one),
        Termination::Open => (one, -ik0),
    };
    let start_right = match right {
        Termination::Pec => (zero, one),
        Termination::Open => (one, ik0),
    };
    let l = march(layers, omega, start_left, 0.0, x0);
    let r = march(layers, omega, start_right, length, x0);
    let wronskian = l.0 * r.1 - l.1 * r.0;
    Ok(-l.0 * r.0 / wronskian)
}

/// One layer per grid node: node `i` owns `[x_i - dx/2, x_i + dx/2]` clipped
/// to `[0, n dx]`, with the last node also owning the final half cell. This
/// matches a PEC-walled grid whose walls sit at `x = 0` and `x = n dx`.
pub fn layers_from_grid(
    grid: &Grid1D,
    medium: &[DispersionParams],
    omega: f64,
) -> Result<Vec<Layer>> {
    let n = grid.n_cells();
    if medium.len() != n {
        return Err(Error::LengthMismatch(format!(
            "medium has {} entries for {n} cells",
            medium.len()
        )));
    }
    let dx = grid.dx();
    medium
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let thickness = match i {
                0 => 0.5 * dx,
                i if i == n - 1 => 1.5 * dx,
                _ => dx,
            };
            Ok(Layer {
                thickness,
                eps: permittivity(m, omega, LossRegime::LowLoss)?.value,
            })
        })
        .collect()
}
