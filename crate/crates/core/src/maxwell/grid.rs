use crate::error::{Error, Result};

/// Outer boundary treatment of the 1-D grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    /// Perfect electric conductor: `E = 0` at `x = 0` and at `x = n_cells * dx`.
    Pec,
    /// First-order Mur absorbing boundary at both ends.
    Mur,
}

/// Uniform staggered grid. E, P and V live on nodes `x_i = i dx`; H lives on
/// `x_{i+1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_cells: usize,
    dx: f64,
    dt: f64,
    boundary: Boundary,
}

impl Grid1D {
    pub fn new(n_cells: usize, dx: f64, dt: f64, boundary: Boundary) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 cells, got {n_cells}"
            )));
        }
        if !(dx.is_finite() && dx > 0.0) || !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dx and dt must be positive, got dx = {dx}, dt = {dt}"
            )));
        }
        if dt > dx {
            return Err(Error::Cfl { dt, dx });
        }
        Ok(Self {
            n_cells,
            dx,
            dt,
            boundary,
        })
    }

    /// Grid with `dt = courant * dx`.
    pub fn with_courant(n_cells: usize, dx: f64, courant: f64, boundary: Boundary) -> Result<Self> {
        Self::new(n_cells, dx, courant * dx, boundary)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn courant(&self) -> f64 {
        self.dt / self.dx
    }

    pub fn length(&self) -> f64 {
        self.n_cells as f64 * self.dx
    }

    /// Node coordinates `i dx`.
    pub fn node_positions(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| i as f64 * self.dx).collect()
    }

    /// Nearest node index to `x`.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let i = (x / self.dx).round();
        (i >= 0.0 && (i as usize) < self.n_cells).then_some(i as usize)
    }

    pub(crate) fn require_periodic(&self) -> Result<()> {
        if self.boundary != Boundary::Periodic {
            return Err(Error::NotPeriodic);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cfl_is_enforced() {
        assert_eq!(
            Grid1D::new(10, 0.1, 0.2, Boundary::Periodic),
            Err(Error::Cfl { dt: 0.2, dx: 0.1 })
        );
        assert!(Grid1D::new(10, 0.1, 0.1, Boundary::Periodic).is_ok());
    }

    #[test]
    fn node_lookup() {
        let g = Grid1D::new(10, 0.5, 0.25, Boundary::Pec).unwrap();
        assert_eq!(g.node_index(2.4), Some(5));
        assert_eq!(g.node_index(-1.0), None);
        assert_eq!(g.node_index(5.0), None);
        assert_eq!(g.length(), 5.0);
    }
}
