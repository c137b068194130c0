//! Set descriptions, line traces, Monte-Carlo volumes, fractional perimeter
//! and grid normalisation.

pub mod graph;
pub mod grid;
pub mod lines;
pub mod measure;
pub mod set;
pub mod tail;

pub use graph::{GraphFn, GraphTerm, GrowthBound};
pub use grid::{normalize_representative, CellClass, ClassifiedGrid, IndicatorGrid};
pub use lines::{line_intervals, Intervals, LineOpts};
pub use measure::{fractional_perimeter, mc_volume, PerimeterConfig, VolumeEstimate, Window};
pub use set::{ConeSign, GeomDocument, GeomSet, SCHEMA_VERSION};
pub use tail::TailRegistration;

/// Membership test (free-function form).
pub fn contains(set: &GeomSet, x: &[f64]) -> bool {
    set.contains(x)
}
