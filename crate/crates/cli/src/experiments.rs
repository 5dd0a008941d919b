//! Experiment parameter sets, runners and built-in tolerances.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use dissem_core::bath::{
    fit_decay, kernel_integral, memory_kernel, simulate_bath_sampled, BathSystem,
};
use dissem_core::columns::{Column, ColumnTable};
use dissem_core::dispersion::{
    conductivity, fdt_noise_weight, high_loss_denominator, hilbert_transform_uniform,
    kramers_kronig_check, low_loss_denominator, permittivity, susceptibility, DispersionParams,
    LossRegime,
};
use dissem_core::emission::{
    emission_rate, green_function_1d, layers_from_grid, population, purcell_factors,
    transfer_matrix_green, vacuum_reference, FieldSpectralDensity, GreenOptions, GreenSource,
    Termination, TwoLevelAtom,
};
use dissem_core::langevin::{
    compare_bath_vs_langevin, langevin_ensemble, measure_susceptibility, ComparisonConfig,
    LangevinParams,
};
use dissem_core::maxwell::{
    step_fields, step_potentials, total_energy, Boundary, FieldState1D, Grid1D, PotentialState1D,
};
use dissem_core::stats::trajectory_rng;
use rand::Rng;

use crate::catalog::Experiment;
use crate::{CliError, CliResult};

/// One built-in tolerance: passes when `value < limit`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub tables: Vec<(String, ColumnTable)>,
}

impl Outcome {
    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    fn below(&mut self, name: &str, value: f64, limit: f64) {
        self.metric(name, value);
        self.checks.push(Check {
            name: name.into(),
            value,
            limit,
            pass: value < limit,
        });
    }

    fn table(&mut self, name: impl Into<String>, table: ColumnTable) {
        self.tables.push((name.into(), table));
    }
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation(msg()))
    }
}

fn table(columns: Vec<Column>) -> CliResult<ColumnTable> {
    Ok(ColumnTable::new(columns)?)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1).max(1) as f64)
        .collect()
}

fn gaussian(n: usize, center: f64, width: f64) -> Vec<f64> {
    (0..n)
        .map(|i| (-0.5 * ((i as f64 - center) / width).powi(2)).exp())
        .collect()
}

macro_rules! param_set {
    ($(#[$doc:meta])* $name:ident { $($field:ident : $ty:ty = $default:expr),* $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            $(pub $field: $ty),*
        }

        impl Default for $name {
            fn default() -> Self {
                Self { $($field: $default),* }
            }
        }
    };
}

param_set!(DispersionSweep {
    omega_p: f64 = 1.0,
    omega_0: f64 = 1.0,
    gamma: f64 = 0.2,
    omega_min: f64 = 0.01,
    omega_max: f64 = 5.0,
    n_points: usize = 1000,
});

param_set!(FdtSweep {
    n_sets: usize = 100,
    n_points: usize = 10_000,
    omega_min_factor: f64 = 0.01,
    omega_max_factor: f64 = 10.0,
    hbar: f64 = 1.0,
    omega_p_range: [f64; 2] = [0.1, 5.0],
    omega_0_range: [f64; 2] = [0.1, 5.0],
    gamma_range: [f64; 2] = [1e-3, 3.0],
});

param_set!(KramersKronigGrid {
    omega_p: f64 = 1.0,
    omega_0: f64 = 1.0,
    gamma: f64 = 0.2,
    half_span: f64 = 20.0,
    n_points: usize = 200_001,
    output_stride: usize = 100,
});

param_set!(
    /// `pulse_width` is in cells. Without `dt` the step is `courant * dx`;
    /// without `t_end` the run lasts one transit of the periodic line.
    PropagationRun {
        n_cells: usize = 256,
        dx: f64 = 1.0,
        dt: Option<f64> = None,
        courant: f64 = 0.8,
        pulse_width: f64 = 20.0,
        t_end: Option<f64> = None,
    }
);

param_set!(EnergyRun {
    n_cells: usize = 512,
    dx: f64 = 0.1,
    courant: f64 = 0.5,
    steps: usize = 10_000,
    omega_p: f64 = 1.0,
    omega_0: f64 = 2.0,
    gamma: f64 = 0.0,
    pulse_center: f64 = 128.0,
    pulse_width: f64 = 16.0,
    sample_every: usize = 10,
});

param_set!(PotentialRun {
    n_cells: usize = 256,
    dx: f64 = 0.05,
    courant: f64 = 0.8,
    steps: usize = 1000,
    omega_p: f64 = 2.0,
    omega_0: f64 = 3.0,
    gamma: f64 = 0.4,
    slab: [usize; 2] = [80, 180],
    pulse_center: f64 = 40.0,
    pulse_width: f64 = 8.0,
});

param_set!(BathDecayRun {
    omega_0: f64 = 1.0,
    eta: f64 = 0.05,
    band: [f64; 2] = [0.2, 1.8],
    n_modes: usize = 2000,
    t_end: f64 = 80.0,
    dt: f64 = 0.02,
    sample_every: usize = 10,
    fit_window: [f64; 2] = [5.0, 75.0],
    b0_scale: f64 = 0.0,
});

param_set!(KernelRun {
    omega_0: f64 = 1.0,
    eta: f64 = 0.05,
    band: [f64; 2] = [0.2, 1.8],
    n_modes: usize = 2000,
    t_max: f64 = 200.0,
    n_steps: usize = 8000,
    output_points: usize = 2001,
});

param_set!(LangevinRun {
    omega_0: f64 = 1.0,
    eta: f64 = 0.05,
    noise_power: Option<f64> = None,
    a0: [f64; 2] = [1.0, 0.0],
    dt: f64 = 0.05,
    t_end: f64 = 800.0,
    window: [f64; 2] = [400.0, 800.0],
    n_traj: usize = 10_000,
    sample_every: usize = 20,
});

param_set!(ComparisonRun {
    omega_0: f64 = 1.0,
    eta: f64 = 0.02,
    band: [f64; 2] = [0.2, 1.8],
    n_modes: usize = 2000,
    bath_dt: f64 = 0.025,
    langevin_dt: f64 = 0.05,
    sample_dt: f64 = 0.5,
    cold_t_end: f64 = 100.0,
    warm_t_end: f64 = 300.0,
    window: [f64; 2] = [150.0, 300.0],
    n_bath: usize = 64,
    n_langevin: usize = 4000,
});

param_set!(DrivenRun {
    omega_0: f64 = 1.0,
    eta: f64 = 0.3,
    omega_p: f64 = 0.8,
    omegas: Vec<f64> = vec![0.5, 0.8, 1.0, 1.2, 1.5],
    dt: f64 = 0.01,
    settle_decays: f64 = 14.0,
    periods: usize = 10,
});

param_set!(EmissionRun {
    omega_eg: f64 = 3.0,
    mu_eg: f64 = 0.7,
    hbar: f64 = 1.0,
    s0: f64 = 0.2,
    half_span: f64 = 5.0,
    t_min: f64 = 10.0,
    t_max: f64 = 60.0,
    fit_times: [f64; 2] = [40.0, 60.0],
    points_per_period: f64 = 20.0,
    n_times: usize = 61,
});

param_set!(PurcellRun {
    omega_p: f64 = 3.0,
    omega_0: f64 = 6.0,
    gamma: f64 = 2.0,
    n_cells: usize = 100,
    length: f64 = 1.39,
    courant: f64 = 0.5,
    t_end: f64 = 800.0,
    reference_cells: usize = 600,
    reference_t_end: f64 = 60.0,
    carrier: f64 = 2.0,
    width: f64 = 3.0,
    decay_tolerance: f64 = 1e-4,
    scan: [f64; 2] = [1.5, 2.5],
    scan_step: f64 = 5e-4,
    probe_offsets: Vec<f64> = vec![-0.1, 0.0, 0.1],
});

/// Resolved parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Dispersion(DispersionSweep),
    FdtIdentity(FdtSweep),
    KramersKronig(KramersKronigGrid),
    Propagation(PropagationRun),
    EnergyConservation(EnergyRun),
    PotentialEquivalence(PotentialRun),
    BathDecay(BathDecayRun),
    KernelCheck(KernelRun),
    LangevinStationary(LangevinRun),
    BathVsLangevin(ComparisonRun),
    DrivenSusceptibility(DrivenRun),
    EmissionRate(EmissionRun),
    Purcell(PurcellRun),
}

fn typed<T: DeserializeOwned>(table: toml::Table) -> CliResult<T> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| CliError::Parse(format!("[params]: {e}")))
}

impl Params {
    pub fn from_table(e: Experiment, t: toml::Table) -> CliResult<Self> {
        Ok(match e {
            Experiment::Dispersion => Params::Dispersion(typed(t)?),
            Experiment::FdtIdentity => Params::FdtIdentity(typed(t)?),
            Experiment::KramersKronig => Params::KramersKronig(typed(t)?),
            Experiment::Propagation => Params::Propagation(typed(t)?),
            Experiment::EnergyConservation => Params::EnergyConservation(typed(t)?),
            Experiment::PotentialEquivalence => Params::PotentialEquivalence(typed(t)?),
            Experiment::BathDecay => Params::BathDecay(typed(t)?),
            Experiment::KernelCheck => Params::KernelCheck(typed(t)?),
            Experiment::LangevinStationary => Params::LangevinStationary(typed(t)?),
            Experiment::BathVsLangevin => Params::BathVsLangevin(typed(t)?),
            Experiment::DrivenSusceptibility => Params::DrivenSusceptibility(typed(t)?),
            Experiment::EmissionRate => Params::EmissionRate(typed(t)?),
            Experiment::Purcell => Params::Purcell(typed(t)?),
        })
    }
}

pub fn execute(params: &Params, seed: u64) -> CliResult<Outcome> {
    match params {
        Params::Dispersion(p) => dispersion(p),
        Params::FdtIdentity(p) => fdt_identity(p, seed),
        Params::KramersKronig(p) => kramers_kronig(p),
        Params::Propagation(p) => propagation(p),
        Params::EnergyConservation(p) => energy_conservation(p),
        Params::PotentialEquivalence(p) => potential_equivalence(p),
        Params::BathDecay(p) => bath_decay(p, seed),
        Params::KernelCheck(p) => kernel_check(p),
        Params::LangevinStationary(p) => langevin_stationary(p, seed),
        Params::BathVsLangevin(p) => bath_vs_langevin(p, seed),
        Params::DrivenSusceptibility(p) => driven_susceptibility(p),
        Params::EmissionRate(p) => emission(p),
        Params::Purcell(p) => purcell(p),
    }
}

fn dispersion(p: &DispersionSweep) -> CliResult<Outcome> {
    require(p.n_points >= 2, || "n_points must be at least 2".into())?;
    require(p.omega_min > 0.0 && p.omega_max > p.omega_min, || {
        format!(
            "need 0 < omega_min < omega_max (got {}, {})",
            p.omega_min, p.omega_max
        )
    })?;
    let m = DispersionParams::new(p.omega_p, p.omega_0, p.gamma)?;
    let omega = linspace(p.omega_min, p.omega_max, p.n_points);
    let mut cols = vec![Column::new("omega", "1/time", omega.clone())];
    let mut out = Outcome::default();
    for (regime, tag) in [(LossRegime::LowLoss, "low"), (LossRegime::HighLoss, "high")] {
        let eps = omega
            .iter()
            .map(|&w| permittivity(&m, w, regime).map(|e| e.value))
            .collect::<Result<Vec<_>, _>>()?;
        let sigma = omega
            .iter()
            .map(|&w| conductivity(&m, w, regime))
            .collect::<Result<Vec<_>, _>>()?;
        let min_im = eps.iter().map(|e| e.im).fold(f64::INFINITY, f64::min);
        out.metric(&format!("min_im_eps_{tag}"), min_im);
        cols.push(Column::new(
            format!("re_eps_{tag}"),
            "1",
            eps.iter().map(|e| e.re).collect(),
        ));
        cols.push(Column::new(
            format!("im_eps_{tag}"),
            "1",
            eps.iter().map(|e| e.im).collect(),
        ));
        cols.push(Column::new(format!("sigma_{tag}"), "1/time", sigma));
    }
    let shift = Complex64::new(p.gamma * p.gamma / 4.0, 0.0);
    let shift_err = omega
        .iter()
        .map(|&w| {
            let low = low_loss_denominator(&m, w);
            let diff = high_loss_denominator(&m, w) - low;
            (diff - shift).norm() / low.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    out.below("denominator_shift_error", shift_err, 1e-12);
    out.table("dispersion", table(cols)?);
    Ok(out)
}

fn fdt_identity(p: &FdtSweep, seed: u64) -> CliResult<Outcome> {
    require(p.n_sets >= 1 && p.n_points >= 2, || {
        "need n_sets >= 1 and n_points >= 2".into()
    })?;
    require(
        p.omega_min_factor > 0.0 && p.omega_max_factor > p.omega_min_factor,
        || "need 0 < omega_min_factor < omega_max_factor".into(),
    )?;
    for (name, r) in [
        ("omega_p_range", p.omega_p_range),
        ("omega_0_range", p.omega_0_range),
        ("gamma_range", p.gamma_range),
    ] {
        require(r[0] > 0.0 && r[1] > r[0], || {
            format!("{name} must satisfy 0 < lo < hi")
        })?;
    }
    let rows = (0..p.n_sets)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i as u64);
            let m = DispersionParams::new(
                rng.gen_range(p.omega_p_range[0]..p.omega_p_range[1]),
                rng.gen_range(p.omega_0_range[0]..p.omega_0_range[1]),
                rng.gen_range(p.gamma_range[0]..p.gamma_range[1]),
            )?;
            let w0 = m.omega_0();
            let grid = linspace(p.omega_min_factor * w0, p.omega_max_factor * w0, p.n_points);
            let mut worst = [0.0f64; 2];
            for (slot, regime) in LossRegime::ALL.into_iter().enumerate() {
                for &w in &grid {
                    let reference = p.hbar * w / PI * conductivity(&m, w, regime)?;
                    let weight = fdt_noise_weight(&m, w, p.hbar, regime);
                    worst[slot] = worst[slot].max((weight - reference).abs() / reference.abs());
                }
            }
            Ok((m, worst))
        })
        .collect::<Result<Vec<_>, dissem_core::Error>>()?;
    type Row = (DispersionParams, [f64; 2]);
    let col = |f: &dyn Fn(&Row) -> f64| rows.iter().map(f).collect();
    let mut out = Outcome::default();
    let worst = rows.iter().flat_map(|r| r.1).fold(0.0, f64::max);
    out.below("max_relative_error", worst, 1e-12);
    out.table(
        "fdt_identity",
        table(vec![
            Column::new("set", "1", (0..rows.len()).map(|i| i as f64).collect()),
            Column::new("omega_p", "1/time", col(&|r| r.0.omega_p())),
            Column::new("omega_0", "1/time", col(&|r| r.0.omega_0())),
            Column::new("gamma", "1/time", col(&|r| r.0.gamma())),
            Column::new("max_rel_error_low", "1", col(&|r| r.1[0])),
            Column::new("max_rel_error_high", "1", col(&|r| r.1[1])),
        ])?,
    );
    Ok(out)
}

fn kramers_kronig(p: &KramersKronigGrid) -> CliResult<Outcome> {
    require(
        p.n_points >= 3 && p.half_span > 0.0 && p.output_stride >= 1,
        || "need n_points >= 3, half_span > 0 and output_stride >= 1".into(),
    )?;
    let m = DispersionParams::new(p.omega_p, p.omega_0, p.gamma)?;
    let grid = linspace(-p.half_span, p.half_span, p.n_points);
    let h = grid[1] - grid[0];
    let keep: Vec<usize> = (1..p.n_points - 1).step_by(p.output_stride).collect();
    let mut cols = vec![Column::new(
        "omega",
        "1/time",
        keep.iter().map(|&k| grid[k]).collect(),
    )];
    let mut out = Outcome::default();
    for (regime, tag) in [(LossRegime::LowLoss, "low"), (LossRegime::HighLoss, "high")] {
        let residual = kramers_kronig_check(&m, &grid, regime)?;
        out.below(&format!("residual_{tag}"), residual, 1e-3);
        let eps = grid
            .iter()
            .map(|&w| permittivity(&m, w, regime).map(|e| e.value))
            .collect::<Result<Vec<_>, _>>()?;
        let im: Vec<f64> = eps.iter().map(|e| e.im).collect();
        let hilbert = hilbert_transform_uniform(&im, grid[0], h);
        cols.push(Column::new(
            format!("im_eps_{tag}"),
            "1",
            keep.iter().map(|&k| im[k]).collect(),
        ));
        cols.push(Column::new(
            format!("re_eps_minus_1_{tag}"),
            "1",
            keep.iter().map(|&k| eps[k].re - 1.0).collect(),
        ));
        cols.push(Column::new(
            format!("hilbert_im_eps_{tag}"),
            "1",
            keep.iter().map(|&k| hilbert[k]).collect(),
        ));
    }
    out.table("kramers_kronig", table(cols)?);
    Ok(out)
}

fn propagation(p: &PropagationRun) -> CliResult<Outcome> {
    let grid = match p.dt {
        Some(dt) => Grid1D::new(p.n_cells, p.dx, dt, Boundary::Periodic)?,
        None => Grid1D::with_courant(p.n_cells, p.dx, p.courant, Boundary::Periodic)?,
    };
    let n = p.n_cells;
    let t_end = p.t_end.unwrap_or(grid.length());
    require(t_end >= 0.0, || {
        format!("t_end {t_end} must be non-negative")
    })?;
    let c = n as f64 / 2.0;
    let e0 = gaussian(n, c, p.pulse_width);
    // right-moving pair: H sits half a cell and half a step behind E
    let h0 = gaussian(n, c - 0.5 - 0.5 * grid.courant(), p.pulse_width);
    let mut s = FieldState1D::vacuum(&grid).with_fields(e0, h0)?;
    let steps = (t_end / grid.dt()).round() as usize;
    for _ in 0..steps {
        step_fields(&mut s, &grid)?;
    }
    let shift = steps as f64 * grid.dt() / grid.dx();
    let exact: Vec<f64> = (0..n)
        .map(|i| {
            let d = (i as f64 - c - shift).rem_euclid(n as f64);
            let d = if d > n as f64 / 2.0 { d - n as f64 } else { d };
            (-0.5 * (d / p.pulse_width).powi(2)).exp()
        })
        .collect();
    let err =
        s.e.iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
    let norm = exact.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut out = Outcome::default();
    out.metric("steps", steps as f64);
    out.metric("courant", grid.courant());
    out.below("relative_l2_error", err / norm, 1e-3);
    out.table(
        "propagation",
        table(vec![
            Column::new("x", "length", grid.node_positions()),
            Column::new("E", "field", s.e.clone()),
            Column::new("E_exact", "field", exact),
            Column::new("H", "field", s.h.clone()),
        ])?,
    );
    Ok(out)
}

fn energy_conservation(p: &EnergyRun) -> CliResult<Outcome> {
    require(p.sample_every >= 1 && p.steps >= 2, || {
        "need steps >= 2 and sample_every >= 1".into()
    })?;
    let grid = Grid1D::with_courant(p.n_cells, p.dx, p.courant, Boundary::Periodic)?;
    let m = DispersionParams::new(p.omega_p, p.omega_0, p.gamma)?;
    let n = p.n_cells;
    let medium = (0..n)
        .map(|i| {
            if i >= n / 2 {
                m
            } else {
                DispersionParams::vacuum()
            }
        })
        .collect();
    let e = gaussian(n, p.pulse_center, p.pulse_width);
    let mut s = FieldState1D::new(&grid, medium)?.with_fields(e.clone(), e)?;
    step_fields(&mut s, &grid)?;
    let w0 = total_energy(&s, &grid);
    let (mut t, mut w) = (vec![s.t], vec![w0]);
    let mut prev = w0;
    let mut drift = 0.0f64;
    let mut rise = f64::NEG_INFINITY;
    for k in 1..p.steps {
        step_fields(&mut s, &grid)?;
        let now = total_energy(&s, &grid);
        drift = drift.max((now - w0).abs() / w0);
        rise = rise.max((now - prev) / prev);
        prev = now;
        if k % p.sample_every == 0 || k + 1 == p.steps {
            t.push(s.t);
            w.push(now);
        }
    }
    let mut out = Outcome::default();
    if p.gamma == 0.0 {
        out.below("relative_drift", drift, 1e-6);
        out.metric("largest_step_change", rise);
    } else {
        out.metric("relative_drift", drift);
        // non-increasing up to round-off
        out.below("largest_step_change", rise, 1e-12);
    }
    out.table(
        "energy",
        table(vec![
            Column::new("t", "time", t),
            Column::new("energy", "energy", w),
        ])?,
    );
    Ok(out)
}

fn potential_equivalence(p: &PotentialRun) -> CliResult<Outcome> {
    let grid = Grid1D::with_courant(p.n_cells, p.dx, p.courant, Boundary::Periodic)?;
    let m = DispersionParams::new(p.omega_p, p.omega_0, p.gamma)?;
    let n = p.n_cells;
    require(p.slab[0] <= p.slab[1] && p.slab[1] <= n, || {
        format!("slab {:?} outside 0..={n}", p.slab)
    })?;
    let medium: Vec<_> = (0..n)
        .map(|i| {
            if (p.slab[0]..p.slab[1]).contains(&i) {
                m
            } else {
                DispersionParams::vacuum()
            }
        })
        .collect();
    let e = gaussian(n, p.pulse_center, p.pulse_width);
    let mut h = gaussian(n, p.pulse_center, p.pulse_width);
    // a periodic vector potential needs zero-mean B
    let mean = h.iter().sum::<f64>() / n as f64;
    h.iter_mut().for_each(|x| *x -= mean);
    let mut fields = FieldState1D::new(&grid, medium.clone())?.with_fields(e.clone(), h.clone())?;
    let mut pots = PotentialState1D::from_transverse_fields(&grid, medium, &e, &h)?;
    let (mut t, mut diff, mut gauge) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..p.steps {
        step_fields(&mut fields, &grid)?;
        step_potentials(&mut pots, &grid)?;
        let d = fields
            .e
            .iter()
            .zip(pots.electric_field())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        t.push(fields.t);
        diff.push(d);
        gauge.push(
            pots.gauge_residual(&grid)
                .iter()
                .map(|r| r.abs())
                .fold(0.0, f64::max),
        );
    }
    let mut out = Outcome::default();
    out.below(
        "max_field_difference",
        diff.iter().copied().fold(0.0, f64::max),
        1e-10,
    );
    out.metric(
        "max_gauge_residual",
        gauge.iter().copied().fold(0.0, f64::max),
    );
    out.table(
        "potential_equivalence",
        table(vec![
            Column::new("t", "time", t),
            Column::new("max_abs_dE", "field", diff),
            Column::new("max_gauge_residual", "field/length", gauge),
        ])?,
    );
    Ok(out)
}

fn flat_bath(omega_0: f64, eta: f64, band: [f64; 2], n: usize) -> CliResult<BathSystem> {
    Ok(BathSystem::flat(omega_0, eta, (band[0], band[1]), n)?)
}

fn bath_decay(p: &BathDecayRun, seed: u64) -> CliResult<Outcome> {
    let sys = flat_bath(p.omega_0, p.eta, p.band, p.n_modes)?;
    require(p.t_end < sys.recurrence_time(), || {
        format!(
            "t_end {} reaches the recurrence time {}",
            p.t_end,
            sys.recurrence_time()
        )
    })?;
    let tr = simulate_bath_sampled(&sys, p.t_end, p.dt, seed, p.b0_scale, p.sample_every)?;
    let fit = fit_decay(&tr, (p.fit_window[0], p.fit_window[1]))?;
    let inv = tr.invariant();
    let drift = inv.iter().map(|x| (x - inv[0]).abs()).fold(0.0, f64::max) / inv[0];
    let mut out = Outcome::default();
    out.metric("eta_measured", fit.eta_measured);
    out.metric("fit_r_squared", fit.r_squared);
    out.metric("recurrence_time", sys.recurrence_time());
    out.below(
        "eta_relative_error",
        (fit.eta_measured - p.eta).abs() / p.eta,
        0.05,
    );
    out.below("invariant_drift", drift, 1e-8);
    out.table("bath_decay", tr.to_table());
    Ok(out)
}

fn kernel_check(p: &KernelRun) -> CliResult<Outcome> {
    require(p.output_points >= 2, || {
        "output_points must be at least 2".into()
    })?;
    let sys = flat_bath(p.omega_0, p.eta, p.band, p.n_modes)?;
    let k = kernel_integral(&sys, p.t_max, p.n_steps)?;
    let taus = linspace(0.0, p.t_max, p.output_points);
    let b = memory_kernel(&sys, &taus);
    let mut out = Outcome::default();
    out.metric("causal_integral_re", k.causal.re);
    out.metric("causal_integral_im", k.causal.im);
    out.metric("two_sided_integral", k.two_sided.re);
    out.below(
        "eta_relative_error",
        (k.causal.re - p.eta).abs() / p.eta,
        0.02,
    );
    out.table(
        "memory_kernel",
        table(vec![
            Column::new("tau", "time", taus),
            Column::new("re_B", "1/time^2", b.iter().map(|z| z.re).collect()),
            Column::new("im_B", "1/time^2", b.iter().map(|z| z.im).collect()),
        ])?,
    );
    Ok(out)
}

fn langevin_stationary(p: &LangevinRun, seed: u64) -> CliResult<Outcome> {
    let mut lp = LangevinParams::new(p.omega_0, p.eta)?;
    if let Some(d) = p.noise_power {
        lp = lp.with_noise_power(d)?;
    }
    let a0 = Complex64::new(p.a0[0], p.a0[1]);
    let stats = langevin_ensemble(
        &lp,
        a0,
        p.t_end,
        p.dt,
        p.sample_every,
        p.n_traj,
        seed,
        Some((p.window[0], p.window[1])),
    )?;
    let st = stats
        .stationary()
        .ok_or_else(|| CliError::Validation("need at least two trajectories".into()))?;
    let expected = lp.stationary_power();
    let pole = Complex64::new(-p.eta, -p.omega_0);
    let mean_z = stats
        .t
        .iter()
        .enumerate()
        .map(|(k, t)| (stats.mean_a[k] - a0 * (pole * t).exp()).norm() / stats.mean_stderr[k])
        .fold(0.0, f64::max);
    let mut out = Outcome::default();
    out.metric("stationary_mean", st.mean);
    out.metric("stationary_stderr", st.stderr);
    out.metric("stationary_expected", expected);
    out.below("stationary_z", (st.mean - expected).abs() / st.stderr, 3.0);
    out.below("worst_mean_amplitude_z", mean_z, 3.0);
    out.table("langevin_ensemble", stats.to_table());
    Ok(out)
}

fn bath_vs_langevin(p: &ComparisonRun, seed: u64) -> CliResult<Outcome> {
    let bath = flat_bath(p.omega_0, p.eta, p.band, p.n_modes)?;
    let lp = LangevinParams::new(p.omega_0, p.eta)?;
    let cfg = ComparisonConfig {
        seed,
        bath_dt: p.bath_dt,
        langevin_dt: p.langevin_dt,
        sample_dt: p.sample_dt,
        cold_t_end: p.cold_t_end,
        warm_t_end: p.warm_t_end,
        window: (p.window[0], p.window[1]),
        n_bath: p.n_bath,
        n_langevin: p.n_langevin,
    };
    let r = compare_bath_vs_langevin(&bath, &lp, &cfg)?;
    let mut out = Outcome::default();
    out.metric("cold_t_end", r.cold_t_end);
    out.metric("eta_bath", r.eta_bath);
    out.metric("eta_langevin", r.eta_langevin);
    out.metric("warm_bath_mean", r.warm_bath.mean);
    out.metric("warm_bath_stderr", r.warm_bath.stderr);
    out.metric("warm_langevin_mean", r.warm_langevin.mean);
    out.metric("warm_langevin_stderr", r.warm_langevin.stderr);
    out.below("cold_max_relative_deviation", r.cold_max_rel_dev, 0.05);
    out.below("warm_z", r.warm_z, 3.0);
    let abs2 = |a: &[Complex64]| a.iter().map(|z| z.norm_sqr()).collect();
    out.table(
        "cold_decay",
        table(vec![
            Column::new("t", "time", r.cold_bath.t.clone()),
            Column::new("abs2_bath", "amplitude^2", abs2(&r.cold_bath.a)),
            Column::new("abs2_langevin", "amplitude^2", abs2(&r.cold_langevin.a)),
        ])?,
    );
    Ok(out)
}

fn driven_susceptibility(p: &DrivenRun) -> CliResult<Outcome> {
    require(!p.omegas.is_empty(), || "omegas must not be empty".into())?;
    let lp = LangevinParams::new(p.omega_0, p.eta)?.with_omega_p(p.omega_p)?;
    let m = DispersionParams::new(p.omega_p, p.omega_0, 2.0 * p.eta)?;
    let rows = p
        .omegas
        .par_iter()
        .map(|&w| {
            let chi = measure_susceptibility(&lp, w, p.dt, p.settle_decays, p.periods)?;
            let high = susceptibility(&m, w, LossRegime::HighLoss)?;
            let low = susceptibility(&m, w, LossRegime::LowLoss)?;
            Ok((chi, high, low))
        })
        .collect::<Result<Vec<_>, dissem_core::Error>>()?;
    let high_err = rows
        .iter()
        .map(|(c, h, _)| (c - h).norm() / h.norm())
        .fold(0.0, f64::max);
    let low_err = rows
        .iter()
        .map(|(c, _, l)| (c - l).norm() / l.norm())
        .fold(0.0, f64::max);
    let mut out = Outcome::default();
    out.below("high_loss_relative_error", high_err, 0.01);
    out.metric("low_loss_relative_error", low_err);
    let part = |f: &dyn Fn(&(Complex64, Complex64, Complex64)) -> f64| rows.iter().map(f).collect();
    out.table(
        "susceptibility",
        table(vec![
            Column::new("omega", "1/time", p.omegas.clone()),
            Column::new("re_chi_measured", "1", part(&|r| r.0.re)),
            Column::new("im_chi_measured", "1", part(&|r| r.0.im)),
            Column::new("re_chi_high_loss", "1", part(&|r| r.1.re)),
            Column::new("im_chi_high_loss", "1", part(&|r| r.1.im)),
            Column::new("re_chi_low_loss", "1", part(&|r| r.2.re)),
            Column::new("im_chi_low_loss", "1", part(&|r| r.2.im)),
        ])?,
    );
    Ok(out)
}

fn emission(p: &EmissionRun) -> CliResult<Outcome> {
    require(p.n_times >= 2 && p.points_per_period > 0.0, || {
        "need n_times >= 2 and points_per_period > 0".into()
    })?;
    require(p.t_min > 0.0 && p.t_max > p.t_min, || {
        "need 0 < t_min < t_max".into()
    })?;
    require(
        p.fit_times[1] > p.fit_times[0] && p.fit_times[1] <= p.t_max,
        || {
            format!(
                "fit_times {:?} must be increasing and within t_max",
                p.fit_times
            )
        },
    )?;
    let atom = TwoLevelAtom::new(p.omega_eg, p.mu_eg, 0.0)?.with_hbar(p.hbar)?;
    let h = 2.0 * PI / (p.points_per_period * p.t_max);
    let n = (2.0 * p.half_span / h).ceil() as usize + 1;
    let s = FieldSpectralDensity::sampled(
        p.omega_eg - p.half_span,
        p.omega_eg + p.half_span,
        n,
        |_| p.s0,
    )?;
    let rate = emission_rate(&atom, p.s0)?;
    let times = linspace(p.t_min, p.t_max, p.n_times);
    let pops = times
        .par_iter()
        .map(|&t| population(&atom, &s, t))
        .collect::<Result<Vec<_>, _>>()?;
    let slope = (population(&atom, &s, p.fit_times[1])? - population(&atom, &s, p.fit_times[0])?)
        / (p.fit_times[1] - p.fit_times[0]);
    let mut out = Outcome::default();
    out.metric("rate_expected", rate);
    out.metric("rate_measured", slope);
    out.metric("t_times_span", p.fit_times[0] * 2.0 * p.half_span);
    out.below("rate_relative_error", (slope - rate).abs() / rate, 0.02);
    out.table(
        "population",
        table(vec![
            Column::new("t", "time", times.clone()),
            Column::new("population", "1", pops),
            Column::new(
                "rate_times_t",
                "1",
                times.iter().map(|t| rate * t).collect(),
            ),
        ])?,
    );
    Ok(out)
}

fn purcell(p: &PurcellRun) -> CliResult<Outcome> {
    require(
        p.scan[1] > p.scan[0] && p.scan_step > 0.0 && !p.probe_offsets.is_empty(),
        || "need an increasing scan, scan_step > 0 and at least one probe".into(),
    )?;
    let fill = DispersionParams::new(p.omega_p, p.omega_0, p.gamma)?;
    let grid = Grid1D::with_courant(
        p.n_cells,
        p.length / p.n_cells as f64,
        p.courant,
        Boundary::Pec,
    )?;
    let medium = vec![fill; p.n_cells];
    let x0 = 0.5 * grid.length();
    let oracle = |w: f64| -> CliResult<f64> {
        let layers = layers_from_grid(&grid, &medium, w)?;
        Ok(transfer_matrix_green(&layers, x0, w, Termination::Pec, Termination::Pec)?.im * 2.0 * w)
    };
    let n_scan = ((p.scan[1] - p.scan[0]) / p.scan_step).floor() as usize + 1;
    let scan = (0..n_scan)
        .into_par_iter()
        .map(|k| {
            let w = p.scan[0] + k as f64 * p.scan_step;
            oracle(w).map(|f| (w, f))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let resonance = scan
        .iter()
        .copied()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .map(|(w, _)| w)
        .expect("scan has at least one point");
    let probes: Vec<f64> = p.probe_offsets.iter().map(|d| resonance + d).collect();
    let opts = |t_end| GreenOptions {
        source: GreenSource::new(p.carrier, p.width),
        t_end,
        window: false,
        decay_tolerance: p.decay_tolerance,
    };
    let cavity = green_function_1d(&grid, &medium, x0, &probes, &opts(p.t_end))?;
    let reference = vacuum_reference(
        grid.dx(),
        grid.dt(),
        p.reference_cells,
        &probes,
        &opts(p.reference_t_end),
    )?;
    let factors = purcell_factors(&cavity, &reference)?;
    let expected = probes
        .iter()
        .map(|&w| oracle(w))
        .collect::<CliResult<Vec<_>>>()?;
    let purcell_err = factors
        .iter()
        .zip(&expected)
        .map(|(f, o)| (f - o).abs() / o)
        .fold(0.0, f64::max);
    let vacuum_err = probes
        .iter()
        .zip(&reference.values)
        .map(|(w, g)| (g.im * 2.0 * w - 1.0).abs())
        .fold(0.0, f64::max);
    let mut out = Outcome::default();
    out.metric("resonance_omega", resonance);
    let peak = probes
        .iter()
        .position(|&w| w == resonance)
        .map_or(f64::NAN, |i| factors[i]);
    out.metric("purcell_at_resonance", peak);
    out.below("vacuum_im_g_relative_error", vacuum_err, 0.03);
    out.below("purcell_relative_error", purcell_err, 0.05);
    out.table(
        "purcell",
        table(vec![
            Column::new("omega", "1/time", probes.clone()),
            Column::new("im_G", "length", cavity.im()),
            Column::new("im_G_vacuum", "length", reference.im()),
            Column::new("purcell", "1", factors),
            Column::new("purcell_oracle", "1", expected),
        ])?,
    );
    out.table(
        "purcell_oracle_scan",
        table(vec![
            Column::new("omega", "1/time", scan.iter().map(|s| s.0).collect()),
            Column::new("purcell_oracle", "1", scan.iter().map(|s| s.1).collect()),
        ])?,
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_experiment_resolves_empty_params() {
        for e in Experiment::ALL {
            Params::from_table(e, toml::Table::new()).unwrap();
        }
    }

    #[test]
    fn dispersion_defaults_pass() {
        let out = dispersion(&DispersionSweep::default()).unwrap();
        assert!(out.checks.iter().all(|c| c.pass));
        assert!(out.metrics["min_im_eps_low"] >= 0.0);
    }

    #[test]
    fn propagation_cfl_is_a_validation_error() {
        let p = PropagationRun {
            dt: Some(1.5),
            ..Default::default()
        };
        let err = propagation(&p).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("CFL"));
    }
}
