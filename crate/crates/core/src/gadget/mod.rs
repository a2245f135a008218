//! Reduction from planar 3-SAT to bus embedding with separation.
//!
//! A chain link is a pair of same-colored points on one horizontal line.
//! With a positive separation its bus lies strictly above both points (true)
//! or strictly below (false). Links interleaved on a line take opposite
//! types; links stacked in shared columns at most `2 * eps` apart pass a
//! top bus upwards. A clause gadget lets its two main points be joined only
//! through one of three gaps, and the last link of every literal chain
//! closes its gap when the literal is false.

mod build;
mod formula;
mod shift;

pub use build::{build_instance, build_instance_with, simulate_segment, BuildOptions, GadgetInstance, Role, Segment};
pub use formula::{clause_family, formula_family, Literal, PlanarFormulaLayout, Side};
pub use shift::dedupe_coordinates;

use crate::model::{BusLayout, ColoredPointSet};
use crate::sweep::{classify, BusType};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("clause {clause} has {got} literals, expected 3")]
    ClauseWidth { clause: usize, got: usize },
    #[error("literal refers to variable {var} but the formula has {num_vars}")]
    UnknownVariable { var: usize, num_vars: usize },
    #[error("variable order is not a permutation of the variables")]
    BadOrder,
    #[error("{got} clause sides given for {expected} clauses")]
    SideCount { expected: usize, got: usize },
    #[error("layout is not planar: chains of clauses {a} and {b} cross")]
    NonPlanar { a: usize, b: usize },
    #[error("clause {inner} is nested inside clause {outer}; nested clauses are not supported")]
    Nested { outer: usize, inner: usize },
    #[error("DIMACS line {line}: {reason}")]
    Dimacs { line: usize, reason: String },
    #[error("layout sidecar: {0}")]
    Sidecar(String),
    #[error("gadget metadata: {0}")]
    Metadata(String),
    #[error("variable {var} has a bus through its points ({kind:?})")]
    Undecodable { var: usize, kind: BusType },
}

/// Reads the variable values off a layout: a bus above the two points of a
/// variable gadget means true, below means false.
pub fn decode_assignment(
    instance: &ColoredPointSet,
    metadata: &serde_json::Value,
    layout: &BusLayout,
) -> Result<Vec<bool>, GadgetError> {
    let names = metadata
        .get("variables")
        .and_then(|v| v.as_array())
        .ok_or_else(|| GadgetError::Metadata("no variables list".into()))?;
    names
        .iter()
        .enumerate()
        .map(|(var, name)| {
            let name = name.as_str().ok_or_else(|| GadgetError::Metadata("variable color is not a string".into()))?;
            let color =
                instance.color_id(name).ok_or_else(|| GadgetError::Metadata(format!("unknown color {name:?}")))?;
            match classify(instance, layout, color) {
                BusType::Sqcap => Ok(true),
                BusType::Sqcup => Ok(false),
                kind => Err(GadgetError::Undecodable { var, kind }),
            }
        })
        .collect()
}
