//! Bus embeddings of colored point sets: exact, restricted and
//! reduction-based solvers.

pub mod coord;
pub mod diagonal;
pub mod exact;
pub mod experiment;
pub mod flow;
pub mod gadget;
pub mod halfbus;
pub mod ilp;
pub mod io;
pub mod model;
pub mod order;
pub mod rangetree;
pub mod svg;
pub mod sweep;
pub mod twosat;

pub use coord::Coord;
pub use exact::{enumerate_orders_oracle, minimize_ink, solve_bep, BepVerdict};
pub use io::{InstanceFile, IoError};
pub use model::{
    column_bounds, compute_spans, conflicting_pairs, ink, validate_planarity, BusLayout, ColorId, ColoredPointSet,
    ColumnBounds, ConflictMatrix, EpsilonPolicy, ModelError, Point, Span, Violation,
};
pub use order::{solve_with_order, BusOrder, CrossingWitness, OrderError, OrderOutcome, PlacementGrid};
