//! Feasibility for a prescribed bottom-to-top bus order.
//!
//! Buses are placed one after another at their lowest valid height. Heights
//! live on a discrete grid: a set of critical values (point heights, and
//! point heights shifted by epsilon) plus a small number of stacking units
//! above each of them.

use crate::coord::{decimal_at_least, Coord};
use crate::model::{column_bounds, compute_spans, BusLayout, ColorId, ColoredPointSet, EpsilonPolicy, Span};
use crate::rangetree::{RangeMaxTree, StabbingMaxTree};

/// A grid height: critical value `level` raised by `stack` units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub level: u32,
    pub stack: u32,
}

impl Position {
    pub const fn at(level: u32) -> Self {
        Position { level, stack: 0 }
    }

    /// The next grid height above `self`.
    pub fn above(self) -> Self {
        Position { level: self.level, stack: self.stack + 1 }
    }
}

/// Critical heights of an instance and the stacking unit between them.
#[derive(Debug, Clone)]
pub struct PlacementGrid {
    values: Vec<Coord>,
    unit: Coord,
}

impl PlacementGrid {
    /// Level 0 is a virtual height one gap below everything else.
    pub fn new(instance: &ColoredPointSet, eps: EpsilonPolicy) -> Self {
        let mut values: Vec<Coord> = Vec::with_capacity(instance.n() * 3 + 1);
        for p in instance.points() {
            values.push(p.y);
            if !eps.is_zero() {
                values.push(p.y - eps.value());
                values.push(p.y + eps.value());
            }
        }
        values.sort_unstable();
        values.dedup();
        let gap = values.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(Coord::ONE);
        let base = values.first().copied().unwrap_or(Coord::ZERO) - gap;
        values.insert(0, base);
        // Decimal unit, small enough that k stacked buses stay inside one gap.
        PlacementGrid { values, unit: gap / Coord::new(decimal_at_least(instance.k() + 2), 1) }
    }

    pub fn unit(&self) -> Coord {
        self.unit
    }

    pub fn values(&self) -> &[Coord] {
        &self.values
    }

    pub fn level_of(&self, y: Coord) -> u32 {
        self.values.binary_search(&y).expect("critical value") as u32
    }

    pub fn value(&self, pos: Position) -> Coord {
        self.values[pos.level as usize] + self.unit * Coord::from_int(pos.stack as i64)
    }

    pub fn base(&self) -> Position {
        Position::at(0)
    }
}

/// Bottom-to-top bus order: a permutation of the colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BusOrder(pub Vec<ColorId>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("order has {got} entries but the instance has {expected} colors")]
    WrongLength { expected: usize, got: usize },
    #[error("color {0} appears more than once or is out of range")]
    NotAPermutation(ColorId),
    #[error("unknown color name {0:?}")]
    UnknownColor(String),
}

impl BusOrder {
    pub fn identity(k: usize) -> Self {
        BusOrder((0..k).map(ColorId).collect())
    }

    pub fn from_names(instance: &ColoredPointSet, names: &[&str]) -> Result<Self, OrderError> {
        let ids = names
            .iter()
            .map(|n| instance.color_id(n).ok_or_else(|| OrderError::UnknownColor(n.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let order = BusOrder(ids);
        order.check(instance)?;
        Ok(order)
    }

    pub fn check(&self, instance: &ColoredPointSet) -> Result<(), OrderError> {
        if self.0.len() != instance.k() {
            return Err(OrderError::WrongLength { expected: instance.k(), got: self.0.len() });
        }
        let mut seen = vec![false; instance.k()];
        for &c in &self.0 {
            match seen.get_mut(c.0) {
                Some(s) if !*s => *s = true,
                _ => return Err(OrderError::NotAPermutation(c)),
            }
        }
        Ok(())
    }
}

/// A point whose connection must cross an already placed lower bus, or a
/// foreign point in the column of an own point that caps the bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingWitness {
    pub point: usize,
    pub color: ColorId,
    pub blocking: ColorId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderOutcome {
    Feasible(BusLayout),
    Infeasible(CrossingWitness),
}

impl OrderOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, OrderOutcome::Feasible(_))
    }

    pub fn layout(&self) -> Option<&BusLayout> {
        match self {
            OrderOutcome::Feasible(l) => Some(l),
            OrderOutcome::Infeasible(_) => None,
        }
    }
}

/// Additional constraint on the bus type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlacementRule {
    #[default]
    Free,
    /// Every bus strictly above all of its own points.
    AboveOwnPoints,
}

/// Per-instance tables reused across many orders.
#[derive(Debug, Clone)]
pub struct OrderPlacer {
    pub grid: PlacementGrid,
    spans: Vec<Span>,
    /// Slot range (half-open, in x-sorted order) covered by each span.
    span_slots: Vec<(usize, usize)>,
    point_slot: Vec<usize>,
    point_level: Vec<u32>,
    point_color: Vec<ColorId>,
    own_points: Vec<Vec<usize>>,
    /// Own-point forbidden bands `(lower level, upper level)`, sorted.
    bands: Vec<Vec<(u32, u32)>>,
    top_own_level: Vec<u32>,
    /// Exclusive column bounds as levels, with the foreign point behind each.
    column_lower: Vec<Option<(u32, usize)>>,
    column_upper: Vec<Option<(u32, usize)>>,
    /// A foreign point coinciding with an own point.
    coincident: Vec<Option<usize>>,
    rule: PlacementRule,
}

impl OrderPlacer {
    pub fn new(instance: &ColoredPointSet, eps: EpsilonPolicy) -> Self {
        Self::with_rule(instance, eps, PlacementRule::Free)
    }

    pub fn with_rule(instance: &ColoredPointSet, eps: EpsilonPolicy, rule: PlacementRule) -> Self {
        let grid = PlacementGrid::new(instance, eps);
        let pts = instance.points();
        let mut by_x: Vec<usize> = (0..pts.len()).collect();
        by_x.sort_by_key(|&i| (pts[i].x, i));
        let xs: Vec<Coord> = by_x.iter().map(|&i| pts[i].x).collect();
        let mut point_slot = vec![0; pts.len()];
        for (slot, &i) in by_x.iter().enumerate() {
            point_slot[i] = slot;
        }
        let spans = compute_spans(instance);
        let span_slots = spans
            .iter()
            .map(|s| (xs.partition_point(|&x| x < s.x_left), xs.partition_point(|&x| x <= s.x_right)))
            .collect();
        let point_level: Vec<u32> = pts.iter().map(|p| grid.level_of(p.y)).collect();
        let own_points = instance.points_by_color();
        let bands = own_points
            .iter()
            .map(|own| {
                if eps.is_zero() {
                    return Vec::new();
                }
                let mut b: Vec<(u32, u32)> = own
                    .iter()
                    .map(|&i| (grid.level_of(pts[i].y - eps.value()), grid.level_of(pts[i].y + eps.value())))
                    .collect();
                b.sort_unstable();
                b
            })
            .collect();
        let top_own_level =
            own_points.iter().map(|own| own.iter().map(|&i| point_level[i]).max().unwrap_or(0)).collect();
        let columns = column_bounds(instance);
        let as_level = |b: Option<(Coord, usize)>| b.map(|(y, p)| (grid.level_of(y), p));
        let column_lower = columns.lower.iter().map(|&b| as_level(b)).collect();
        let column_upper = columns.upper.iter().map(|&b| as_level(b)).collect();
        let mut coincident = vec![None; instance.k()];
        if let Some((a, b)) = columns.coincident {
            coincident[pts[a].color.0] = Some(b);
            coincident[pts[b].color.0] = Some(a);
        }
        OrderPlacer {
            grid,
            spans,
            span_slots,
            point_slot,
            point_level,
            point_color: pts.iter().map(|p| p.color).collect(),
            own_points,
            bands,
            top_own_level,
            column_lower,
            column_upper,
            coincident,
            rule,
        }
    }

    /// Demands a bus strictly above (`Some(true)`) or strictly below
    /// (`Some(false)`) all own points of a color. Violating placements are
    /// reported with an own point as witness.
    pub fn require_sides(mut self, above: &[Option<bool>]) -> Self {
        for (c, want) in above.iter().enumerate() {
            let own = &self.own_points[c];
            match want {
                Some(true) => {
                    let &i = own.iter().max_by_key(|&&i| self.point_level[i]).expect("non-empty color");
                    let l = self.point_level[i];
                    if self.column_lower[c].is_none_or(|(v, _)| v < l) {
                        self.column_lower[c] = Some((l, i));
                    }
                }
                Some(false) => {
                    let &i = own.iter().min_by_key(|&&i| self.point_level[i]).expect("non-empty color");
                    let l = self.point_level[i];
                    if self.column_upper[c].is_none_or(|(v, _)| v > l) {
                        self.column_upper[c] = Some((l, i));
                    }
                }
                None => {}
            }
        }
        self
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    /// Raises a candidate height until it satisfies the bus-type rule, the
    /// column bounds and the own-point bands. Fails with the foreign point
    /// whose column caps the bus below that height.
    pub(crate) fn settle(&self, color: ColorId, mut cand: Position) -> Result<Position, usize> {
        if let Some(p) = self.coincident[color.0] {
            return Err(p);
        }
        if let Some((l, _)) = self.column_lower[color.0] {
            cand = cand.max(Position::at(l).above());
        }
        if self.rule == PlacementRule::AboveOwnPoints {
            cand = cand.max(Position::at(self.top_own_level[color.0]).above());
        }
        cand = skip_bands(&self.bands[color.0], cand);
        match self.column_upper[color.0] {
            Some((u, p)) if cand >= Position::at(u) => Err(p),
            _ => Ok(cand),
        }
    }

    /// Lowest valid height for `color` given the processed points and the
    /// highest earlier bus whose span overlaps it. `Err` names a foreign point
    /// sharing a column with an own point that caps the bus lower than that.
    pub fn lowest_feasible(
        &self,
        processed: &RangeMaxTree<Option<Position>>,
        color: ColorId,
        floor: Option<Position>,
    ) -> Result<Position, usize> {
        let (lo, hi) = self.span_slots[color.0];
        let mut cand = self.grid.base();
        if let Some(top) = processed.max(lo, hi) {
            cand = cand.max(top.above());
        }
        if let Some(f) = floor {
            cand = cand.max(f.above());
        }
        self.settle(color, cand)
    }

    /// Places the buses in `order`, returning grid positions per color or the
    /// first unavoidable crossing.
    pub fn place(&self, order: &BusOrder) -> Result<Vec<Position>, CrossingWitness> {
        let n = self.point_slot.len();
        let mut processed: RangeMaxTree<Option<Position>> = RangeMaxTree::new(n, None);
        let mut buses: StabbingMaxTree<Option<(Position, usize)>> = StabbingMaxTree::new(n, None);
        let mut positions = vec![Position::at(0); order.0.len()];
        for &c in &order.0 {
            let (lo, hi) = self.span_slots[c.0];
            let floor = buses.max(lo, hi).map(|(p, _)| p);
            let pos = self.lowest_feasible(&processed, c, floor).map_err(|p| CrossingWitness {
                point: p,
                color: c,
                blocking: self.point_color[p],
            })?;
            for &i in &self.own_points[c.0] {
                let point_pos = Position::at(self.point_level[i]);
                if point_pos >= pos {
                    continue;
                }
                if let Some((below, blocking)) = buses.query(self.point_slot[i]) {
                    if below >= point_pos {
                        return Err(CrossingWitness { point: i, color: c, blocking: ColorId(blocking) });
                    }
                }
            }
            buses.raise_range(lo, hi, Some((pos, c.0)));
            for &i in &self.own_points[c.0] {
                processed.raise(self.point_slot[i], Some(Position::at(self.point_level[i])));
            }
            positions[c.0] = pos;
        }
        Ok(positions)
    }

    pub fn materialize(&self, positions: &[Position]) -> BusLayout {
        BusLayout::new(positions.iter().map(|&p| self.grid.value(p)).collect())
    }
}

/// Moves a candidate past every own-point band it falls into.
pub(crate) fn skip_bands(bands: &[(u32, u32)], mut cand: Position) -> Position {
    for &(lower, upper) in bands {
        if Position::at(lower) < cand && cand < Position::at(upper) {
            cand = Position::at(upper);
        }
    }
    cand
}

/// Decides whether a layout respecting `order` exists and builds the
/// bottommost one.
pub fn solve_with_order(
    instance: &ColoredPointSet,
    order: &BusOrder,
    eps: EpsilonPolicy,
) -> Result<OrderOutcome, OrderError> {
    solve_with_order_rule(instance, order, eps, PlacementRule::Free)
}

pub fn solve_with_order_rule(
    instance: &ColoredPointSet,
    order: &BusOrder,
    eps: EpsilonPolicy,
    rule: PlacementRule,
) -> Result<OrderOutcome, OrderError> {
    order.check(instance)?;
    let placer = OrderPlacer::with_rule(instance, eps, rule);
    Ok(match placer.place(order) {
        Ok(pos) => OrderOutcome::Feasible(placer.materialize(&pos)),
        Err(w) => OrderOutcome::Infeasible(w),
    })
}
