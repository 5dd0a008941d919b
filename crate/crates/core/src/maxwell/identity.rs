//! Discrete version of the field-energy identity
//! `E^2 + B^2 = H_A0 - H_Phi0 - 2 rho Phi` under summation over a periodic
//! grid.
//!
//! Layout matches [`super::potentials`]: `Phi`, `Pi_Phi` and `rho` on nodes,
//! `E`, `A` and `Pi_A` (longitudinal) on half nodes, `B` anywhere. The
//! identity holds exactly (up to round-off) when the inputs satisfy
//!
//! ```text
//! E = -Pi_A - dPhi/dx                      (potential definition)
//! dA/dx = -Pi_Phi                          (Lorenz gauge)
//! -dPi_A/dx = d2Phi/dt2 = d2Phi/dx2 - rho  (scalar wave equation)
//! ```
//!
//! `rho` is the polarization charge with `div E = -rho`.

use super::grid::Grid1D;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct PotentialSnapshot<'a> {
    pub e: &'a [f64],
    pub b: &'a [f64],
    pub a: &'a [f64],
    pub phi: &'a [f64],
    pub pi_a: &'a [f64],
    pub pi_phi: &'a [f64],
    pub rho: &'a [f64],
}

/// Returns `(sum dx (E^2 + B^2), sum dx (H_A0 - H_Phi0 - 2 rho Phi))` with
/// `H_A0 = Pi_A^2 + B^2 + (dA/dx)^2` and `H_Phi0 = Pi_Phi^2 + (dPhi/dx)^2`.
pub fn appendix_a_identity(fields: &PotentialSnapshot<'_>, grid: &Grid1D) -> Result<(f64, f64)> {
    grid.require_periodic()?;
    let n = grid.n_cells();
    let arrays = [
        ("E", fields.e),
        ("B", fields.b),
        ("A", fields.a),
        ("Phi", fields.phi),
        ("Pi_A", fields.pi_a),
        ("Pi_Phi", fields.pi_phi),
        ("rho", fields.rho),
    ];
    for (name, arr) in arrays {
        if arr.len() != n {
            return Err(Error::LengthMismatch(format!(
                "{name} has {} samples for {n} cells",
                arr.len()
            )));
        }
    }
    let dx = grid.dx();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..n {
        let next = (i + 1) % n;
        let prev = (i + n - 1) % n;
        let grad_phi = (fields.phi[next] - fields.phi[i]) / dx;
        let div_a = (fields.a[i] - fields.a[prev]) / dx;
        lhs += fields.e[i] * fields.e[i] + fields.b[i] * fields.b[i];
        let h_a = fields.pi_a[i] * fields.pi_a[i] + fields.b[i] * fields.b[i] + div_a * div_a;
        let h_phi = fields.pi_phi[i] * fields.pi_phi[i] + grad_phi * grad_phi;
        rhs += h_a - h_phi - 2.0 * fields.rho[i] * fields.phi[i];
    }
    Ok((lhs * dx, rhs * dx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxwell::grid::Boundary;

    #[test]
    fn zero_fields() {
        let g = Grid1D::new(8, 0.5, 0.25, Boundary::Periodic).unwrap();
        let z = [0.0; 8];
        let snap = PotentialSnapshot {
            e: &z,
            b: &z,
            a: &z,
            phi: &z,
            pi_a: &z,
            pi_phi: &z,
            rho: &z,
        };
        assert_eq!(appendix_a_identity(&snap, &g).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn no_scalar_potential_reduces_to_pi_a() {
        let g = Grid1D::new(5, 1.0, 0.5, Boundary::Periodic).unwrap();
        let pi_a = [0.3, -1.2, 0.5, 2.0, 0.1];
        let e: Vec<f64> = pi_a.iter().map(|x| -x).collect();
        let b = [1.0, 0.0, -0.5, 0.25, 3.0];
        let z = [0.0; 5];
        let snap = PotentialSnapshot {
            e: &e,
            b: &b,
            a: &z,
            phi: &z,
            pi_a: &pi_a,
            pi_phi: &z,
            rho: &z,
        };
        let (lhs, rhs) = appendix_a_identity(&snap, &g).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rejects_non_periodic_and_bad_lengths() {
        let z = [0.0; 4];
        let snap = PotentialSnapshot {
            e: &z,
            b: &z,
            a: &z,
            phi: &z,
            pi_a: &z,
            pi_phi: &z,
            rho: &z,
        };
        let pec = Grid1D::new(4, 1.0, 0.5, Boundary::Pec).unwrap();
        assert_eq!(appendix_a_identity(&snap, &pec), Err(Error::NotPeriodic));
        let wrong = Grid1D::new(5, 1.0, 0.5, Boundary::Periodic).unwrap();
        assert!(matches!(
            appendix_a_identity(&snap, &wrong),
            Err(Error::LengthMismatch(_))
        ));
    }
}
