//! Subset dynamic program over bottom prefixes of the bus order.
//!
//! A prefix `B` (set of colors placed below all others) is summarized by the
//! lowest grid height its topmost bus can reach. Placing one more color `c`
//! on top is valid if its lowest height stays strictly below every point of
//! a not-yet-placed color inside its span; those points would otherwise have
//! to cross it on the way up to their own bus.

use crate::model::{ColorId, ColoredPointSet};
use crate::order::{BusOrder, OrderPlacer, Position};

/// Levels of foreign points inside a color's span, per (span color, point color).
#[derive(Debug, Clone)]
struct InSpanLevels {
    k: usize,
    highest: Vec<Option<u32>>,
    lowest: Vec<Option<u32>>,
}

impl InSpanLevels {
    fn new(instance: &ColoredPointSet, placer: &OrderPlacer) -> Self {
        let k = instance.k();
        let mut highest = vec![None; k * k];
        let mut lowest = vec![None; k * k];
        for (c, span) in placer.spans().iter().enumerate() {
            for p in instance.points() {
                let d = p.color.0;
                if d == c || !span.contains(p.x) {
                    continue;
                }
                let lvl = placer.grid.level_of(p.y);
                let h: &mut Option<u32> = &mut highest[c * k + d];
                *h = Some(h.map_or(lvl, |v| v.max(lvl)));
                let l: &mut Option<u32> = &mut lowest[c * k + d];
                *l = Some(l.map_or(lvl, |v| v.min(lvl)));
            }
        }
        InSpanLevels { k, highest, lowest }
    }
}

/// Best reachable top height per subset of colors (bit `i` = color `i`).
#[derive(Debug, Clone)]
pub struct DpTable {
    k: usize,
    best: Vec<Option<Position>>,
    choice: Vec<u8>,
    pub states_visited: u64,
}

const EMPTY_TOP: Position = Position { level: 0, stack: 0 };

impl DpTable {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Lowest top-bus height over all valid orderings of `mask` below the
    /// remaining colors, or `None` if no ordering is valid.
    pub fn best(&self, mask: usize) -> Option<Position> {
        self.best[mask]
    }

    /// `F(h, B)`: a valid realization of `B` exists whose topmost bus lies
    /// below critical level `h + 1`.
    pub fn feasible_at(&self, h: u32, mask: usize) -> bool {
        match self.best[mask] {
            Some(pos) => mask == 0 || pos.level <= h,
            None => false,
        }
    }

    pub fn feasible(&self) -> bool {
        self.best[(1usize << self.k) - 1].is_some()
    }

    /// Order recovered from the back-pointers, bottom to top.
    pub fn order(&self) -> Option<BusOrder> {
        let full = (1usize << self.k) - 1;
        self.best[full]?;
        let mut mask = full;
        let mut top_down = Vec::with_capacity(self.k);
        while mask != 0 {
            let c = self.choice[mask] as usize;
            top_down.push(ColorId(c));
            mask &= !(1 << c);
        }
        top_down.reverse();
        Some(BusOrder(top_down))
    }
}

/// Largest `k` the table is built for.
pub const DP_MAX_COLORS: usize = 20;

pub fn build_table(instance: &ColoredPointSet, placer: &OrderPlacer) -> DpTable {
    let k = instance.k();
    assert!(k <= DP_MAX_COLORS, "subset table limited to {DP_MAX_COLORS} colors");
    let levels = InSpanLevels::new(instance, placer);
    let full = (1usize << k) - 1;
    let mut best: Vec<Option<Position>> = vec![None; 1 << k];
    let mut choice = vec![0u8; 1 << k];
    best[0] = Some(EMPTY_TOP);
    let mut states_visited = 1u64;
    for mask in 1..=full {
        let mut winner: Option<(Position, usize)> = None;
        let mut bits = mask;
        while bits != 0 {
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = mask & !(1 << c);
            let Some(top) = best[rest] else { continue };
            let pos = place_on_top(&levels, placer, c, rest, full, top, rest == 0);
            if let Some(pos) = pos {
                if winner.is_none_or(|(w, _)| pos < w) {
                    winner = Some((pos, c));
                }
            }
        }
        if let Some((pos, c)) = winner {
            best[mask] = Some(pos);
            choice[mask] = c as u8;
            states_visited += 1;
        }
    }
    DpTable { k, best, choice, states_visited }
}

#[allow(clippy::too_many_arguments)]
fn place_on_top(
    levels: &InSpanLevels,
    placer: &OrderPlacer,
    c: usize,
    below: usize,
    full: usize,
    top: Position,
    first: bool,
) -> Option<Position> {
    let k = levels.k;
    let mut cand = placer.grid.base();
    if !first {
        cand = cand.max(top.above());
    }
    let mut bits = below;
    while bits != 0 {
        let d = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        if let Some(l) = levels.highest[c * k + d] {
            cand = cand.max(Position::at(l).above());
        }
    }
    let cand = placer.settle(ColorId(c), cand).ok()?;
    let mut above = full & !below & !(1 << c);
    while above != 0 {
        let d = above.trailing_zeros() as usize;
        above &= above - 1;
        if let Some(l) = levels.lowest[c * k + d] {
            if cand >= Position::at(l) {
                return None;
            }
        }
    }
    Some(cand)
}
