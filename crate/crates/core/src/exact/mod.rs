//! Exact decision for unrestricted bus embedding.
//!
//! Small color counts go through the subset table in [`dp`]; larger ones
//! through the clause encoding in [`sat`]. [`enumerate_orders_oracle`] is the
//! brute-force reference both are checked against.

pub mod dp;
pub mod ink;
pub mod sat;

use crate::model::{validate_planarity, BusLayout, ColoredPointSet, EpsilonPolicy};
use crate::order::{BusOrder, OrderPlacer, PlacementRule};

pub use dp::{build_table, DpTable, DP_MAX_COLORS};
pub use ink::{minimize_ink, minimize_ink_global, InkError};

/// Which exact procedure produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    SubsetTable,
    Clauses,
    OrderEnumeration,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SolveStats {
    pub backend: Backend,
    pub states_visited: u64,
}

/// Verdict of an exact solver. `layout` and `order` are present exactly when
/// the instance is feasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BepVerdict {
    pub layout: Option<BusLayout>,
    pub order: Option<BusOrder>,
    pub stats: SolveStats,
}

impl BepVerdict {
    pub fn feasible(&self) -> bool {
        self.layout.is_some()
    }
}

/// Colors above which the subset table is not used.
pub const SUBSET_TABLE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("order enumeration is capped at {cap} colors, instance has {k}")]
    CapExceeded { cap: usize, k: usize },
}

/// Decides feasibility and, on success, returns the bottommost layout of
/// the recovered order.
///
/// The subset table summarizes a prefix by its topmost bus, which stacks
/// buses with disjoint spans as well. That loses nothing when points may
/// touch their own bus, but with a positive epsilon a bus can be pinned to
/// a single height, so those instances go to the clause encoding.
pub fn solve_bep(instance: &ColoredPointSet, eps: EpsilonPolicy) -> BepVerdict {
    if eps.is_zero() && instance.k() <= SUBSET_TABLE_LIMIT {
        solve_with_table(instance, eps)
    } else {
        sat::solve_clauses(instance, eps)
    }
}

pub fn solve_with_table(instance: &ColoredPointSet, eps: EpsilonPolicy) -> BepVerdict {
    let placer = OrderPlacer::new(instance, eps);
    let table = build_table(instance, &placer);
    let stats = SolveStats { backend: Backend::SubsetTable, states_visited: table.states_visited };
    let Some(order) = table.order() else {
        return BepVerdict { layout: None, order: None, stats };
    };
    let positions = placer.place(&order).expect("orders recovered from the table are feasible");
    let layout = placer.materialize(&positions);
    debug_assert!(validate_planarity(instance, &layout, eps).unwrap().is_empty());
    BepVerdict { layout: Some(layout), order: Some(order), stats }
}

pub const DEFAULT_ORACLE_CAP: usize = 8;

/// Tries every bus order.
pub fn enumerate_orders_oracle(
    instance: &ColoredPointSet,
    eps: EpsilonPolicy,
    cap: usize,
) -> Result<BepVerdict, ExactError> {
    enumerate_orders_with_rule(instance, eps, cap, PlacementRule::Free)
}

/// Order enumeration with an additional bus-type rule.
pub fn enumerate_orders_with_rule(
    instance: &ColoredPointSet,
    eps: EpsilonPolicy,
    cap: usize,
    rule: PlacementRule,
) -> Result<BepVerdict, ExactError> {
    let k = instance.k();
    if k > cap {
        return Err(ExactError::CapExceeded { cap, k });
    }
    let placer = OrderPlacer::with_rule(instance, eps, rule);
    let mut perm: Vec<usize> = (0..k).collect();
    let mut tried = 0u64;
    loop {
        tried += 1;
        let order = BusOrder(perm.iter().copied().map(crate::model::ColorId).collect());
        if let Ok(pos) = placer.place(&order) {
            return Ok(BepVerdict {
                layout: Some(placer.materialize(&pos)),
                order: Some(order),
                stats: SolveStats { backend: Backend::OrderEnumeration, states_visited: tried },
            });
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(BepVerdict {
        layout: None,
        order: None,
        stats: SolveStats { backend: Backend::OrderEnumeration, states_visited: tried },
    })
}

/// Advances to the next permutation in lexicographic order.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
