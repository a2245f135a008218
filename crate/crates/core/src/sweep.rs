//! Buses strictly above (or strictly below) all of their points.
//!
//! Points are swept bottom to top and kept in x-order. A color whose points
//! have all been seen and sit next to each other in that order can take its
//! bus right away; removing it may make its neighbours contiguous in turn.

use std::collections::BTreeSet;

use crate::coord::Coord;
use crate::model::{BusLayout, ColorId, ColoredPointSet};
use crate::order::PlacementGrid;
use crate::rangetree::Fenwick;

/// Shape of a placed bus relative to its own points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BusType {
    /// Strictly above every own point.
    Sqcap,
    /// Strictly below every own point.
    Sqcup,
    /// Through the topmost own point.
    Halfcap,
    /// Through the bottommost own point.
    Halfcup,
    Center,
}

pub fn classify(instance: &ColoredPointSet, layout: &BusLayout, color: ColorId) -> BusType {
    let y = layout.y(color);
    let own = instance.points().iter().filter(|p| p.color == color).map(|p| p.y);
    let (lo, hi) = own.fold((None::<Coord>, None::<Coord>), |(lo, hi), v| {
        (Some(lo.map_or(v, |l| l.min(v))), Some(hi.map_or(v, |h| h.max(v))))
    });
    let (lo, hi) = (lo.expect("non-empty color"), hi.expect("non-empty color"));
    if y > hi {
        BusType::Sqcap
    } else if y < lo {
        BusType::Sqcup
    } else if y == hi {
        BusType::Halfcap
    } else if y == lo {
        BusType::Halfcup
    } else {
        BusType::Center
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub insertions: usize,
    pub removals: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepOutcome {
    Feasible(BusLayout),
    /// Colors still waiting for a bus when the sweep ended, in x-order of
    /// their leftmost remaining point.
    Infeasible {
        residue: Vec<ColorId>,
    },
}

impl SweepOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SweepOutcome::Feasible(_))
    }

    pub fn layout(&self) -> Option<&BusLayout> {
        match self {
            SweepOutcome::Feasible(l) => Some(l),
            SweepOutcome::Infeasible { .. } => None,
        }
    }
}

/// Decides whether all buses can lie strictly above their points.
pub fn solve_sqcap(instance: &ColoredPointSet) -> (SweepOutcome, SweepStats) {
    let pts = instance.points();
    let n = pts.len();
    let k = instance.k();
    let unit = PlacementGrid::new(instance, crate::model::EpsilonPolicy::ZERO).unit();

    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by_key(|&i| (pts[i].x, i));
    let mut slot = vec![0; n];
    for (s, &i) in by_x.iter().enumerate() {
        slot[i] = s;
    }
    let mut first_slot = vec![usize::MAX; k];
    let mut last_slot = vec![0; k];
    let mut total = vec![0usize; k];
    for (i, p) in pts.iter().enumerate() {
        let c = p.color.0;
        first_slot[c] = first_slot[c].min(slot[i]);
        last_slot[c] = last_slot[c].max(slot[i]);
        total[c] += 1;
    }

    let own = instance.points_by_color();
    let mut by_y: Vec<usize> = (0..n).collect();
    by_y.sort_by_key(|&i| (pts[i].y, pts[i].x));
    let mut active: BTreeSet<usize> = BTreeSet::new();
    let mut counts = Fenwick::new(n);
    let mut seen = vec![0usize; k];
    let mut bus_y: Vec<Option<Coord>> = vec![None; k];
    let mut stats = SweepStats::default();

    let mut next = 0;
    while next < n {
        // Points sharing a height enter together.
        let y = pts[by_y[next]].y;
        let mut candidates: Vec<usize> = Vec::new();
        while next < n && pts[by_y[next]].y == y {
            let i = by_y[next];
            active.insert(slot[i]);
            counts.add(slot[i], 1);
            seen[pts[i].color.0] += 1;
            candidates.push(pts[i].color.0);
            stats.insertions += 1;
            next += 1;
        }
        let mut cascade = 0i64;
        while let Some(c) = candidates.pop() {
            if bus_y[c].is_some() || seen[c] < total[c] {
                continue;
            }
            let (lo, hi) = (first_slot[c], last_slot[c]);
            if counts.sum(lo, hi + 1) != total[c] as i64 {
                continue;
            }
            cascade += 1;
            bus_y[c] = Some(y + unit * Coord::from_int(cascade));
            for &i in &own[c] {
                active.remove(&slot[i]);
                counts.add(slot[i], -1);
                stats.removals += 1;
            }
            if let Some(&s) = active.range(..lo).next_back() {
                candidates.push(pts[by_x[s]].color.0);
            }
            if let Some(&s) = active.range(hi + 1..).next() {
                candidates.push(pts[by_x[s]].color.0);
            }
        }
    }

    if active.is_empty() {
        let ys = bus_y.into_iter().map(|y| y.expect("every color was removed")).collect();
        (SweepOutcome::Feasible(BusLayout::new(ys)), stats)
    } else {
        let mut residue: Vec<ColorId> = Vec::new();
        for &s in &active {
            let c = pts[by_x[s]].color;
            if !residue.contains(&c) {
                residue.push(c);
            }
        }
        (SweepOutcome::Infeasible { residue }, stats)
    }
}

/// Decides whether all buses can lie strictly below their points.
pub fn solve_sqcup(instance: &ColoredPointSet) -> (SweepOutcome, SweepStats) {
    let (outcome, stats) = solve_sqcap(&instance.reflect_vertically());
    let outcome = match outcome {
        SweepOutcome::Feasible(layout) => SweepOutcome::Feasible(layout.reflect_vertically()),
        other => other,
    };
    (outcome, stats)
}
