//! Sampled trajectories and ensemble reductions.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::columns::{Column, ColumnTable};
use crate::error::{Error, Result};

/// Trajectories per reduction chunk. Fixed so that the floating-point
/// summation order never depends on the thread count.
const CHUNK: usize = 32;

/// Time series of one complex amplitude. `bath_energy` holds `sum |b_j|^2`
/// for bath runs and is empty otherwise.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub a: Vec<Complex64>,
    pub bath_energy: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `|a|^2 + sum |b_j|^2`, or just `|a|^2` without bath data.
    pub fn invariant(&self) -> Vec<f64> {
        if self.bath_energy.is_empty() {
            return self.a.iter().map(|a| a.norm_sqr()).collect();
        }
        self.a
            .iter()
            .zip(&self.bath_energy)
            .map(|(a, b)| a.norm_sqr() + b)
            .collect()
    }

    /// Mean of `|a|^2` over samples with `t0 <= t <= t1`.
    pub fn window_mean_power(&self, (t0, t1): (f64, f64)) -> Option<f64> {
        let (sum, n) = self
            .t
            .iter()
            .zip(&self.a)
            .filter(|(t, _)| **t >= t0 && **t <= t1)
            .fold((0.0, 0usize), |(s, n), (_, a)| (s + a.norm_sqr(), n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    pub fn to_table(&self) -> ColumnTable {
        let mut cols = vec![
            Column::new("t", "time", self.t.clone()),
            Column::new("re_a", "amplitude", self.a.iter().map(|a| a.re).collect()),
            Column::new("im_a", "amplitude", self.a.iter().map(|a| a.im).collect()),
            Column::new(
                "abs_a",
                "amplitude",
                self.a.iter().map(|a| a.norm()).collect(),
            ),
        ];
        if !self.bath_energy.is_empty() {
            cols.push(Column::new(
                "bath_energy",
                "amplitude^2",
                self.bath_energy.clone(),
            ));
            cols.push(Column::new("invariant", "amplitude^2", self.invariant()));
        }
        ColumnTable::new(cols).expect("trajectory columns share one time axis")
    }
}

/// RNG for trajectory `index` of an ensemble seeded with `master_seed`.
/// Each index gets its own ChaCha stream, so results do not depend on which
/// thread runs which trajectory.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub n_traj: usize,
    pub t: Vec<f64>,
    pub mean_a: Vec<Complex64>,
    /// `<|a|^2>(t)`.
    pub second_moment: Vec<f64>,
    /// Standard error of `second_moment`.
    pub stderr: Vec<f64>,
    /// Standard error of the complex mean, `sqrt(<|a - <a>|^2> / n)`.
    pub mean_stderr: Vec<f64>,
    /// Per-trajectory time average of `|a|^2` over `window`, if one was given.
    pub window_means: Vec<f64>,
    pub window: Option<(f64, f64)>,
}

/// Ensemble estimate of a stationary `<|a|^2>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryMoment {
    pub mean: f64,
    pub stderr: f64,
}

impl StationaryMoment {
    /// Difference in units of the combined standard error.
    pub fn z_score(&self, other: &StationaryMoment) -> f64 {
        (self.mean - other.mean).abs() / self.stderr.hypot(other.stderr)
    }
}

impl EnsembleStats {
    /// Trajectory-to-trajectory mean and standard error of the window means.
    pub fn stationary(&self) -> Option<StationaryMoment> {
        let n = self.window_means.len();
        if n < 2 {
            return None;
        }
        let mean = self.window_means.iter().sum::<f64>() / n as f64;
        let var = self
            .window_means
            .iter()
            .map(|x| (x - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64;
        Some(StationaryMoment {
            mean,
            stderr: (var / n as f64).sqrt(),
        })
    }

    pub fn to_table(&self) -> ColumnTable {
        ColumnTable::new(vec![
            Column::new("t", "time", self.t.clone()),
            Column::new(
                "re_mean_a",
                "amplitude",
                self.mean_a.iter().map(|a| a.re).collect(),
            ),
            Column::new(
                "im_mean_a",
                "amplitude",
                self.mean_a.iter().map(|a| a.im).collect(),
            ),
            Column::new("mean_abs2", "amplitude^2", self.second_moment.clone()),
            Column::new("stderr", "amplitude^2", self.stderr.clone()),
        ])
        .expect("ensemble columns share one time axis")
    }
}

#[derive(Debug, Clone)]
struct Accumulator {
    n: usize,
    t: Vec<f64>,
    sum_a: Vec<Complex64>,
    sum_abs2: Vec<f64>,
    sum_abs4: Vec<f64>,
    window_means: Vec<f64>,
}

impl Accumulator {
    fn empty() -> Self {
        Self {
            n: 0,
            t: Vec::new(),
            sum_a: Vec::new(),
            sum_abs2: Vec::new(),
            sum_abs4: Vec::new(),
            window_means: Vec::new(),
        }
    }

    fn push(&mut self, traj: &Trajectory, window: Option<(f64, f64)>) -> Result<()> {
        if self.n == 0 {
            let m = traj.len();
            self.t = traj.t.clone();
            self.sum_a = vec![Complex64::new(0.0, 0.0); m];
            self.sum_abs2 = vec![0.0; m];
            self.sum_abs4 = vec![0.0; m];
        } else if traj.t != self.t {
            return Err(Error::LengthMismatch(
                "ensemble trajectories are sampled on different time grids".into(),
            ));
        }
        for (i, a) in traj.a.iter().enumerate() {
            let p = a.norm_sqr();
            self.sum_a[i] += a;
            self.sum_abs2[i] += p;
            self.sum_abs4[i] += p * p;
        }
        if let Some(w) = window {
            let m = traj.window_mean_power(w).ok_or_else(|| {
                Error::InvalidParameter(format!("no samples inside window {w:?}"))
            })?;
            self.window_means.push(m);
        }
        self.n += 1;
        Ok(())
    }

    fn merge(mut self, other: Accumulator) -> Result<Self> {
        if other.n == 0 {
            return Ok(self);
        }
        if self.n == 0 {
            return Ok(other);
        }
        if self.t != other.t {
            return Err(Error::LengthMismatch(
                "ensemble trajectories are sampled on different time grids".into(),
            ));
        }
        for i in 0..self.t.len() {
            self.sum_a[i] += other.sum_a[i];
            self.sum_abs2[i] += other.sum_abs2[i];
            self.sum_abs4[i] += other.sum_abs4[i];
        }
        self.window_means.extend(other.window_means);
        self.n += other.n;
        Ok(self)
    }

    fn finish(self, window: Option<(f64, f64)>) -> EnsembleStats {
        let n = self.n as f64;
        let mean_a: Vec<Complex64> = self.sum_a.iter().map(|s| s / n).collect();
        let second: Vec<f64> = self.sum_abs2.iter().map(|s| s / n).collect();
        let bessel = if self.n > 1 { n / (n - 1.0) } else { 0.0 };
        let stderr = self
            .sum_abs4
            .iter()
            .zip(&second)
            .map(|(s4, m2)| ((s4 / n - m2 * m2).max(0.0) * bessel / n).sqrt())
            .collect();
        let mean_stderr = second
            .iter()
            .zip(&mean_a)
            .map(|(m2, m)| ((m2 - m.norm_sqr()).max(0.0) * bessel / n).sqrt())
            .collect();
        EnsembleStats {
            n_traj: self.n,
            t: self.t,
            mean_a,
            second_moment: second,
            stderr,
            mean_stderr,
            window_means: self.window_means,
            window,
        }
    }
}

/// Run `n_traj` independent trajectories and reduce them.
///
/// Trajectory `i` receives `trajectory_rng(master_seed, i)`. Work is split
/// into fixed-size chunks that run in parallel on the current rayon pool;
/// chunk results are merged in index order, so the statistics are bitwise
/// identical for any thread count.
pub fn run_ensemble<F>(
    n_traj: usize,
    master_seed: u64,
    window: Option<(f64, f64)>,
    path: F,
) -> Result<EnsembleStats>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Trajectory> + Sync,
{
    if n_traj == 0 {
        return Err(Error::InvalidParameter(
            "ensemble needs at least one trajectory".into(),
        ));
    }
    let n_chunks = n_traj.div_ceil(CHUNK);
    let chunks: Vec<Result<Accumulator>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Accumulator::empty();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_traj) {
                let mut rng = trajectory_rng(master_seed, i as u64);
                acc.push(&path(&mut rng)?, window)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = Accumulator::empty();
    for chunk in chunks {
        total = total.merge(chunk?)?;
    }
    Ok(total.finish(window))
}
