//! 1-D transverse Maxwell–Lorentz solver: E_y, H_z along x.

mod fields;
mod grid;
mod identity;
mod potentials;

pub use fields::{step_fields, total_energy, FieldState1D};
pub use grid::{Boundary, Grid1D};
pub use identity::{appendix_a_identity, PotentialSnapshot};
pub use potentials::{step_potentials, PotentialState1D};

use crate::columns::{Column, ColumnTable};

/// Columnar snapshot `x, E, H, P, V` of a field state.
pub fn snapshot_table(state: &FieldState1D, grid: &Grid1D) -> ColumnTable {
    let x = grid.node_positions();
    ColumnTable::new(vec![
        Column::new("x", "length", x),
        Column::new("E", "field", state.e.clone()),
        Column::new("H", "field", state.h.clone()),
        Column::new("P", "field", state.p.clone()),
        Column::new("V", "field/time", state.v.clone()),
    ])
    .expect("snapshot columns share the grid length")
}
