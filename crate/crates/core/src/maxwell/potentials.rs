//! Lorenz-gauge potential formulation on the same staggered grid.
//!
//! The 1-D reduction carries two sectors:
//!
//! * transverse (`y`): `A`, its momentum `Pi_AP = dA/dt - P`, and the
//!   polarization `P`, `V` on the E nodes. `H = dA/dx`, `E = -Pi_AP - P`.
//! * longitudinal (`x`): `A_x`, `Pi_Ax`, `P_x`, `V_x` on half nodes and the
//!   scalar potential `Phi`, `Pi_Phi` on nodes, sourced by the polarization
//!   charge `rho_P = dP_x/dx`.
//!
//! Equations of motion:
//!
//! ```text
//! dA/dt = Pi_AP + P          dPi_AP/dt  = d2A/dx2
//! dPhi/dt = Pi_Phi           dPi_Phi/dt = d2Phi/dx2 - rho_P
//! dP/dt = Pi_P / beta = V    beta dV/dt = -f P + E - beta gamma V
//! ```
//!
//! `A` and `Pi_Phi` are stored at half-integer times, the momenta `Pi_AP`,
//! `Pi_Ax` and `Phi` at integer times. With this layout the transverse update
//! is algebraically identical to [`super::fields`] and the discrete gauge
//! residual `dA_x/dx + Pi_Phi` obeys its own leapfrog wave equation, so it
//! stays at round-off when it starts there.
//!
//! Only periodic grids are supported.

use super::grid::Grid1D;
use crate::dispersion::DispersionParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PotentialState1D {
    /// Transverse vector potential at `t - dt/2`.
    pub a: Vec<f64>,
    pub pi_ap: Vec<f64>,
    pub p: Vec<f64>,
    /// Transverse polarization current at `t - dt/2`.
    pub v: Vec<f64>,
    /// Longitudinal vector potential (half nodes) at `t - dt/2`.
    pub a_long: Vec<f64>,
    pub pi_a_long: Vec<f64>,
    pub p_long: Vec<f64>,
    pub v_long: Vec<f64>,
    pub phi: Vec<f64>,
    /// Scalar-potential momentum at `t - dt/2`.
    pub pi_phi: Vec<f64>,
    pub t: f64,
    medium: Vec<DispersionParams>,
    steps: usize,
}

fn forward_diff(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    (0..n).map(|i| (u[(i + 1) % n] - u[i]) / dx).collect()
}

fn backward_diff(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    (0..n).map(|i| (u[i] - u[(i + n - 1) % n]) / dx).collect()
}

/// Advance one Lorentz oscillator array by the time-centered ADE update.
fn advance_polarization(
    medium: &[DispersionParams],
    e: &[f64],
    p: &mut [f64],
    v: &mut [f64],
    dt: f64,
) {
    for i in 0..p.len() {
        let m = &medium[i];
        if m.is_vacuum() {
            continue;
        }
        let half_loss = 0.5 * m.gamma() * dt;
        let wp2 = m.omega_p() * m.omega_p();
        let w02 = m.omega_0() * m.omega_0();
        v[i] = ((1.0 - half_loss) * v[i] + dt * (wp2 * e[i] - w02 * p[i])) / (1.0 + half_loss);
        p[i] += dt * v[i];
    }
}

impl PotentialState1D {
    /// All potentials zero. `medium[i]` applies to node `i` and to the half
    /// node `i + 1/2`.
    pub fn new(grid: &Grid1D, medium: Vec<DispersionParams>) -> Result<Self> {
        grid.require_periodic()?;
        let n = grid.n_cells();
        if medium.len() != n {
            return Err(Error::LengthMismatch(format!(
                "medium has {} entries for {n} cells",
                medium.len()
            )));
        }
        let z = vec![0.0; n];
        Ok(Self {
            a: z.clone(),
            pi_ap: z.clone(),
            p: z.clone(),
            v: z.clone(),
            a_long: z.clone(),
            pi_a_long: z.clone(),
            p_long: z.clone(),
            v_long: z.clone(),
            phi: z.clone(),
            pi_phi: z,
            t: 0.0,
            medium,
            steps: 0,
        })
    }

    /// Transverse state equivalent to a field state with `E^0 = e`,
    /// `H^{-1/2} = h` and no polarization. `h` must have zero mean (a periodic
    /// `H = dA/dx` cannot carry a uniform component).
    pub fn from_transverse_fields(
        grid: &Grid1D,
        medium: Vec<DispersionParams>,
        e: &[f64],
        h: &[f64],
    ) -> Result<Self> {
        let mut s = Self::new(grid, medium)?;
        let n = grid.n_cells();
        if e.len() != n || h.len() != n {
            return Err(Error::LengthMismatch(format!(
                "expected {n} samples, got E: {}, H: {}",
                e.len(),
                h.len()
            )));
        }
        let mean = h.iter().sum::<f64>() / n as f64;
        let scale = h.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
        if mean.abs() > 1e-12 * scale {
            return Err(Error::InvalidParameter(format!(
                "H has nonzero mean {mean:e}; no periodic vector potential reproduces it"
            )));
        }
        let dx = grid.dx();
        for i in 1..n {
            s.a[i] = s.a[i - 1] + dx * h[i - 1];
        }
        for i in 0..n {
            s.pi_ap[i] = -e[i];
        }
        Ok(s)
    }

    pub fn medium(&self) -> &[DispersionParams] {
        &self.medium
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `Pi_P = beta V` for the transverse polarization (zero in vacuum).
    pub fn pi_p(&self) -> Vec<f64> {
        self.v
            .iter()
            .zip(&self.medium)
            .map(|(v, m)| if m.is_vacuum() { 0.0 } else { m.beta() * v })
            .collect()
    }

    /// Transverse `E = -dA/dt = -(Pi_AP + P)` at time `t`.
    pub fn electric_field(&self) -> Vec<f64> {
        self.pi_ap
            .iter()
            .zip(&self.p)
            .map(|(pi, p)| -(pi + p))
            .collect()
    }

    /// `H = dA/dx` at `t - dt/2`.
    pub fn magnetic_field(&self, grid: &Grid1D) -> Vec<f64> {
        forward_diff(&self.a, grid.dx())
    }

    /// Longitudinal `E_x = -Pi_Ax - P_x - dPhi/dx` on half nodes at time `t`.
    pub fn longitudinal_field(&self, grid: &Grid1D) -> Vec<f64> {
        let grad_phi = forward_diff(&self.phi, grid.dx());
        (0..self.phi.len())
            .map(|i| -self.pi_a_long[i] - self.p_long[i] - grad_phi[i])
            .collect()
    }

    /// Polarization charge `rho_P = dP_x/dx` on nodes at time `t`.
    pub fn polarization_charge(&self, grid: &Grid1D) -> Vec<f64> {
        backward_diff(&self.p_long, grid.dx())
    }

    /// Lorenz-gauge residual `dA_x/dx + dPhi/dt` on nodes at `t - dt/2`.
    pub fn gauge_residual(&self, grid: &Grid1D) -> Vec<f64> {
        backward_diff(&self.a_long, grid.dx())
            .into_iter()
            .zip(&self.pi_phi)
            .map(|(div_a, pi)| div_a + pi)
            .collect()
    }
}

/// Advance both sectors by one time-centered step.
pub fn step_potentials(s: &mut PotentialState1D, grid: &Grid1D) -> Result<()> {
    grid.require_periodic()?;
    let n = s.a.len();
    if grid.n_cells() != n {
        return Err(Error::LengthMismatch(format!(
            "state has {n} cells, grid has {}",
            grid.n_cells()
        )));
    }
    let dt = grid.dt();
    let dx = grid.dx();

    // transverse
    let e = s.electric_field();
    for i in 0..n {
        s.a[i] += dt * (s.pi_ap[i] + s.p[i]);
    }
    advance_polarization(&s.medium, &e, &mut s.p, &mut s.v, dt);
    let curl_curl = backward_diff(&forward_diff(&s.a, dx), dx);
    for i in 0..n {
        s.pi_ap[i] += dt * curl_curl[i];
    }

    // longitudinal
    let e_long = s.longitudinal_field(grid);
    let rho = s.polarization_charge(grid);
    let lap_phi = backward_diff(&forward_diff(&s.phi, dx), dx);
    for i in 0..n {
        s.a_long[i] += dt * (s.pi_a_long[i] + s.p_long[i]);
        s.pi_phi[i] += dt * (lap_phi[i] - rho[i]);
    }
    advance_polarization(&s.medium, &e_long, &mut s.p_long, &mut s.v_long, dt);
    let grad_div = forward_diff(&backward_diff(&s.a_long, dx), dx);
    for i in 0..n {
        s.pi_a_long[i] += dt * grad_div[i];
        s.phi[i] += dt * s.pi_phi[i];
    }

    s.steps += 1;
    s.t += dt;
    let finite =
        s.a.iter()
            .chain(&s.pi_ap)
            .chain(&s.phi)
            .chain(&s.a_long)
            .all(|x| x.is_finite());
    if !finite {
        return Err(Error::BlowUp { step: s.steps });
    }
    Ok(())
}
