//! Leapfrog solver for E_y, H_z coupled to a Lorentz polarization.
//!
//! Time layout within one step `n -> n+1`:
//!
//! ```text
//! H^{n+1/2} = H^{n-1/2} - dt dE^n/dx
//! V^{n+1/2} (1 + g dt/2) = V^{n-1/2} (1 - g dt/2) + dt (wp^2 E^n - w0^2 P^n)
//! P^{n+1}   = P^n + dt V^{n+1/2}
//! E^{n+1}   = E^n - dt dH^{n+1/2}/dx - dt V^{n+1/2} - dt J^{n+1/2}
//! ```
//!
//! With `g = 0` and periodic walls the quadratic form returned by
//! [`total_energy`] is conserved to round-off.

use super::grid::{Boundary, Grid1D};
use crate::dispersion::DispersionParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FieldState1D {
    pub e: Vec<f64>,
    pub h: Vec<f64>,
    pub p: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
    medium: Vec<DispersionParams>,
    e_prev: Vec<f64>,
    p_prev: Vec<f64>,
    steps: usize,
}

impl FieldState1D {
    /// Zero fields over the given per-node medium.
    pub fn new(grid: &Grid1D, medium: Vec<DispersionParams>) -> Result<Self> {
        let n = grid.n_cells();
        if medium.len() != n {
            return Err(Error::LengthMismatch(format!(
                "medium has {} entries for {n} cells",
                medium.len()
            )));
        }
        Ok(Self {
            e: vec![0.0; n],
            h: vec![0.0; n],
            p: vec![0.0; n],
            v: vec![0.0; n],
            t: 0.0,
            medium,
            e_prev: vec![0.0; n],
            p_prev: vec![0.0; n],
            steps: 0,
        })
    }

    pub fn vacuum(grid: &Grid1D) -> Self {
        Self::new(grid, vec![DispersionParams::vacuum(); grid.n_cells()])
            .expect("medium length matches grid")
    }

    pub fn uniform(grid: &Grid1D, medium: DispersionParams) -> Self {
        Self::new(grid, vec![medium; grid.n_cells()]).expect("medium length matches grid")
    }

    /// Replace E and H (taken as `E^0` and `H^{-1/2}`); P and V are zeroed.
    pub fn with_fields(mut self, e: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        let n = self.e.len();
        if e.len() != n || h.len() != n {
            return Err(Error::LengthMismatch(format!(
                "expected {n} samples, got E: {}, H: {}",
                e.len(),
                h.len()
            )));
        }
        self.e_prev.clone_from(&e);
        self.e = e;
        self.h = h;
        self.p.fill(0.0);
        self.p_prev.fill(0.0);
        self.v.fill(0.0);
        Ok(self)
    }

    pub fn medium(&self) -> &[DispersionParams] {
        &self.medium
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    /// Advance one step with an additive current density `j` at node `node`
    /// (applied at the half step).
    pub fn step_with_current(&mut self, grid: &Grid1D, node: usize, j: f64) -> Result<()> {
        self.advance(grid, Some((node, j)))
    }

    fn advance(&mut self, grid: &Grid1D, source: Option<(usize, f64)>) -> Result<()> {
        let n = self.e.len();
        if grid.n_cells() != n {
            return Err(Error::LengthMismatch(format!(
                "state has {n} cells, grid has {}",
                grid.n_cells()
            )));
        }
        let dt = grid.dt();
        let r = dt / grid.dx();
        let boundary = grid.boundary();

        self.e_prev.copy_from_slice(&self.e);
        self.p_prev.copy_from_slice(&self.p);

        // H from curl E. The ghost node past the right end is E_0 when
        // periodic and 0 otherwise (PEC wall; unused under Mur).
        for i in 0..n - 1 {
            self.h[i] -= r * (self.e[i + 1] - self.e[i]);
        }
        let ghost = match boundary {
            Boundary::Periodic => self.e[0],
            Boundary::Pec | Boundary::Mur => 0.0,
        };
        self.h[n - 1] -= r * (ghost - self.e[n - 1]);

        for i in 0..n {
            let m = &self.medium[i];
            if m.is_vacuum() {
                continue;
            }
            let half_loss = 0.5 * m.gamma() * dt;
            let wp2 = m.omega_p() * m.omega_p();
            let w02 = m.omega_0() * m.omega_0();
            self.v[i] = ((1.0 - half_loss) * self.v[i] + dt * (wp2 * self.e[i] - w02 * self.p[i]))
                / (1.0 + half_loss);
            self.p[i] += dt * self.v[i];
        }

        let (e_left_old, e_left_inner, e_right_old, e_right_inner) =
            (self.e[0], self.e[1], self.e[n - 1], self.e[n - 2]);
        for i in 0..n {
            let h_left = if i == 0 {
                match boundary {
                    Boundary::Periodic => self.h[n - 1],
                    Boundary::Pec | Boundary::Mur => 0.0,
                }
            } else {
                self.h[i - 1]
            };
            self.e[i] -= r * (self.h[i] - h_left) + dt * self.v[i];
        }
        if let Some((node, j)) = source {
            if node >= n {
                return Err(Error::InvalidParameter(format!(
                    "source node {node} outside grid of {n} cells"
                )));
            }
            self.e[node] -= dt * j;
        }
        match boundary {
            Boundary::Periodic => {}
            Boundary::Pec => self.e[0] = 0.0,
            Boundary::Mur => {
                let k = (dt - grid.dx()) / (dt + grid.dx());
                self.e[0] = e_left_inner + k * (self.e[1] - e_left_old);
                self.e[n - 1] = e_right_inner + k * (self.e[n - 2] - e_right_old);
            }
        }

        self.steps += 1;
        self.t += dt;
        if !self.e[..].iter().chain(&self.h).all(|x| x.is_finite()) {
            return Err(Error::BlowUp { step: self.steps });
        }
        Ok(())
    }
}

/// Advance the source-free system by one leapfrog step.
pub fn step_fields(state: &mut FieldState1D, grid: &Grid1D) -> Result<()> {
    state.advance(grid, None)
}

/// Step-centered energy of the most recent step:
///
/// ```text
/// W = 1/2 sum dx [E^n E^{n+1} + (H^{n+1/2})^2 + beta (V^{n+1/2})^2 + f P^n P^{n+1}]
/// ```
///
/// The integer-time quantities are synchronized to the half step by the
/// product of their two neighbours, which makes `W` an exact invariant of the
/// lossless periodic scheme and exactly non-increasing when `gamma > 0`.
/// Before the first step this is the plain quadratic form. Vacuum nodes
/// contribute only `E` and `H`.
pub fn total_energy(state: &FieldState1D, grid: &Grid1D) -> f64 {
    let mut sum = 0.0;
    for i in 0..state.len() {
        sum += state.e_prev[i] * state.e[i] + state.h[i] * state.h[i];
        let m = &state.medium[i];
        if !m.is_vacuum() {
            sum +=
                m.beta() * state.v[i] * state.v[i] + m.stiffness() * state.p_prev[i] * state.p[i];
        }
    }
    0.5 * grid.dx() * sum
}
