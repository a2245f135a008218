//! Ink-minimal layouts for a fixed bus order.
//!
//! Once the order is fixed, every conflicting pair becomes a one-sided bound
//! and every pair of overlapping buses a strict precedence. Each bus picks a
//! height from a finite candidate grid (critical values shifted by up to `k`
//! stacking units either way); minimizing a separable cost under
//! precedences on a common label set is a minimum cut.

use std::collections::HashSet;

use crate::coord::{common_denominator, Coord};
use crate::flow::FlowNetwork;
use crate::model::{
    column_bounds, compute_spans, conflicting_pairs, ink, BusLayout, ColorId, ColoredPointSet, EpsilonPolicy,
};
use crate::order::{BusOrder, CrossingWitness, OrderError, OrderPlacer, PlacementGrid};

use super::{next_permutation, ExactError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InkError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("order is infeasible: point {} of color {} crosses bus {}", .0.point, .0.color, .0.blocking)]
    Infeasible(CrossingWitness),
}

/// Candidate heights for ink minimization, sorted.
pub fn candidate_heights(grid: &PlacementGrid, k: usize) -> Vec<Coord> {
    let k = k as i64;
    let mut out: Vec<Coord> =
        grid.values().iter().flat_map(|&v| (-k..=k).map(move |s| v + grid.unit() * Coord::from_int(s))).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Per-order constraint system: open bounds from conflicting pairs and
/// precedences between overlapping buses.
#[derive(Debug, Clone)]
pub struct OrderConstraints {
    /// Exclusive lower / upper bound per color.
    pub lower: Vec<Option<Coord>>,
    pub upper: Vec<Option<Coord>>,
    /// `(below, above)` pairs of overlapping buses.
    pub precedences: Vec<(ColorId, ColorId)>,
}

impl OrderConstraints {
    pub fn new(instance: &ColoredPointSet, order: &BusOrder) -> Self {
        let k = instance.k();
        let mut rank = vec![0; k];
        for (r, c) in order.0.iter().enumerate() {
            rank[c.0] = r;
        }
        let mut lower: Vec<Option<Coord>> = vec![None; k];
        let mut upper: Vec<Option<Coord>> = vec![None; k];
        for &(i, c) in conflicting_pairs(instance).pairs() {
            let p = instance.points()[i];
            if rank[p.color.0] < rank[c.0] {
                lower[c.0] = Some(lower[c.0].map_or(p.y, |v| v.max(p.y)));
            } else {
                upper[c.0] = Some(upper[c.0].map_or(p.y, |v| v.min(p.y)));
            }
        }
        let columns = column_bounds(instance);
        for c in 0..k {
            if let Some((y, _)) = columns.lower[c] {
                lower[c] = Some(lower[c].map_or(y, |v| v.max(y)));
            }
            if let Some((y, _)) = columns.upper[c] {
                upper[c] = Some(upper[c].map_or(y, |v| v.min(y)));
            }
        }
        let spans = compute_spans(instance);
        let mut precedences = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                if spans[a].overlaps(&spans[b]) {
                    let (lo, hi) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
                    precedences.push((ColorId(lo), ColorId(hi)));
                }
            }
        }
        OrderConstraints { lower, upper, precedences }
    }

    fn allows(&self, c: usize, y: Coord, own: &[Coord], eps: EpsilonPolicy) -> bool {
        self.lower[c].is_none_or(|l| y > l)
            && self.upper[c].is_none_or(|u| y < u)
            && (eps.is_zero() || own.iter().all(|&py| (y - py).abs() >= eps.value()))
    }
}

/// Minimal-ink layout among those keeping the relative order of every pair
/// of overlapping buses, with heights on the candidate grid.
pub fn minimize_ink(instance: &ColoredPointSet, order: &BusOrder, eps: EpsilonPolicy) -> Result<BusLayout, InkError> {
    order.check(instance)?;
    let placer = OrderPlacer::new(instance, eps);
    if let Err(w) = placer.place(order) {
        return Err(InkError::Infeasible(w));
    }
    let labels = candidate_heights(&placer.grid, instance.k());
    let constraints = OrderConstraints::new(instance, order);
    Ok(solve_labels(instance, eps, &labels, &constraints).expect("bottommost layout lies on the candidate grid"))
}

fn solve_labels(
    instance: &ColoredPointSet,
    eps: EpsilonPolicy,
    labels: &[Coord],
    cons: &OrderConstraints,
) -> Option<BusLayout> {
    let k = instance.k();
    let nl = labels.len();
    let own_ys: Vec<Vec<Coord>> =
        instance.points_by_color().iter().map(|idx| idx.iter().map(|&i| instance.points()[i].y).collect()).collect();
    let scale = common_denominator(labels.iter().copied().chain(own_ys.iter().flatten().copied()));
    let to_int = |v: Coord| (v * Coord::new(scale, 1)).numer();

    let mut costs: Vec<Vec<Option<i128>>> = Vec::with_capacity(k);
    let mut budget: i128 = 1;
    for (c, own) in own_ys.iter().enumerate() {
        let row: Vec<Option<i128>> = labels
            .iter()
            .map(|&y| cons.allows(c, y, own, eps).then(|| own.iter().map(|&py| to_int((y - py).abs())).sum()))
            .collect();
        budget += row.iter().flatten().copied().max().unwrap_or(0);
        costs.push(row);
    }
    let huge = budget;

    // Node (c, i) for 1 <= i < nl means "label of c >= i".
    let s = 0;
    let t = 1;
    let node = |c: usize, i: usize| -> usize {
        if i == 0 {
            s
        } else if i == nl {
            t
        } else {
            2 + c * (nl - 1) + (i - 1)
        }
    };
    let mut g = FlowNetwork::new(2 + k * (nl - 1));
    for (c, row) in costs.iter().enumerate() {
        for (i, cost) in row.iter().enumerate() {
            g.add_edge(node(c, i), node(c, i + 1), cost.unwrap_or(huge));
            if i >= 1 && i + 1 < nl {
                g.add_edge(node(c, i + 1), node(c, i), huge);
            }
        }
    }
    for &(lo, hi) in &cons.precedences {
        for i in 0..nl {
            g.add_edge(node(lo.0, i), node(hi.0, i + 1), huge);
        }
    }
    if g.max_flow(s, t) >= huge {
        return None;
    }
    let side = g.source_side(s);
    let ys = (0..k)
        .map(|c| {
            let label = (1..nl).rev().find(|&i| side[node(c, i)]).unwrap_or(0);
            labels[label]
        })
        .collect();
    Some(BusLayout::new(ys))
}

/// Minimal ink over every feasible order, for `k <= cap`.
pub fn minimize_ink_global(
    instance: &ColoredPointSet,
    eps: EpsilonPolicy,
    cap: usize,
) -> Result<Option<(BusLayout, BusOrder)>, ExactError> {
    let k = instance.k();
    if k > cap {
        return Err(ExactError::CapExceeded { cap, k });
    }
    let placer = OrderPlacer::new(instance, eps);
    let labels = candidate_heights(&placer.grid, k);
    let mut seen: HashSet<Vec<(ColorId, ColorId)>> = HashSet::new();
    let mut best: Option<(Coord, BusLayout, BusOrder)> = None;
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let order = BusOrder(perm.iter().copied().map(ColorId).collect());
        if placer.place(&order).is_ok() {
            let cons = OrderConstraints::new(instance, &order);
            if seen.insert(cons.precedences.clone()) {
                if let Some(layout) = solve_labels(instance, eps, &labels, &cons) {
                    let value = ink(instance, &layout);
                    if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
                        best = Some((value, layout, order));
                    }
                }
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.map(|(_, l, o)| (l, o)))
}
