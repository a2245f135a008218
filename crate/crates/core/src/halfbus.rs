//! Half-buses: every bus passes through its topmost or its bottommost point.
//!
//! Each color has two candidate heights, so one Boolean per color suffices
//! (`true` = through the topmost point). Crossings only ever involve two
//! colors, so trying the four type combinations of every pair yields a
//! 2-SAT formula whose models are exactly the planar half-bus layouts.

use crate::coord::Coord;
use crate::model::{compute_spans, validate_planarity, BusLayout, ColorId, ColoredPointSet, EpsilonPolicy, Span};
use crate::twosat::{solve_2sat, Lit, TwoSatFormula, TwoSatResult};

/// Candidate heights per color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfBusCandidates {
    pub y_top: Vec<Coord>,
    pub y_bottom: Vec<Coord>,
}

impl HalfBusCandidates {
    pub fn new(instance: &ColoredPointSet) -> Self {
        let k = instance.k();
        let mut y_top: Vec<Option<Coord>> = vec![None; k];
        let mut y_bottom: Vec<Option<Coord>> = vec![None; k];
        for p in instance.points() {
            let c = p.color.0;
            y_top[c] = Some(y_top[c].map_or(p.y, |v| v.max(p.y)));
            y_bottom[c] = Some(y_bottom[c].map_or(p.y, |v| v.min(p.y)));
        }
        HalfBusCandidates {
            y_top: y_top.into_iter().map(|v| v.expect("non-empty color")).collect(),
            y_bottom: y_bottom.into_iter().map(|v| v.expect("non-empty color")).collect(),
        }
    }

    pub fn y(&self, c: ColorId, top: bool) -> Coord {
        if top {
            self.y_top[c.0]
        } else {
            self.y_bottom[c.0]
        }
    }

    pub fn layout(&self, assignment: &[bool]) -> BusLayout {
        BusLayout::new(assignment.iter().enumerate().map(|(c, &t)| self.y(ColorId(c), t)).collect())
    }
}

struct PairContext<'a> {
    instance: &'a ColoredPointSet,
    spans: Vec<Span>,
    own: Vec<Vec<usize>>,
    cand: HalfBusCandidates,
}

impl PairContext<'_> {
    /// Do points of `d`, connected to a bus at `yd`, cross bus `c` at `yc`?
    fn one_sided(&self, c: usize, yc: Coord, d: usize, yd: Coord) -> bool {
        let span = &self.spans[c];
        self.own[d].iter().any(|&i| {
            let p = self.instance.points()[i];
            span.contains(p.x) && p.y.min(yd) <= yc && yc <= p.y.max(yd)
        })
    }

    fn crosses(&self, c: usize, tc: bool, d: usize, td: bool) -> bool {
        let yc = self.cand.y(ColorId(c), tc);
        let yd = self.cand.y(ColorId(d), td);
        (yc == yd && self.spans[c].overlaps(&self.spans[d]))
            || self.one_sided(c, yc, d, yd)
            || self.one_sided(d, yd, c, yc)
    }
}

/// Type combinations `(x_c, x_d)` that produce a crossing, indexed by
/// `2 * x_c + x_d`.
pub fn forbidden_combinations(instance: &ColoredPointSet, c: ColorId, d: ColorId) -> [bool; 4] {
    forbidden_in(&context(instance), c.0, d.0)
}

fn context(instance: &ColoredPointSet) -> PairContext<'_> {
    PairContext {
        instance,
        spans: compute_spans(instance),
        own: instance.points_by_color(),
        cand: HalfBusCandidates::new(instance),
    }
}

fn forbidden_in(ctx: &PairContext, c: usize, d: usize) -> [bool; 4] {
    let mut out = [false; 4];
    for tc in [false, true] {
        for td in [false, true] {
            out[2 * usize::from(tc) + usize::from(td)] = ctx.crosses(c, tc, d, td);
        }
    }
    out
}

/// Clauses excluding every crossing type combination. A value of one
/// variable that crosses for both values of the other becomes a unit clause.
fn emit_pair(f: &mut TwoSatFormula, c: usize, d: usize, bad: [bool; 4]) {
    let at = |tc: bool, td: bool| bad[2 * usize::from(tc) + usize::from(td)];
    let lit = |v: usize, value: bool| Lit { var: v, positive: value };
    let mut covered = [false; 4];
    for tc in [false, true] {
        if at(tc, false) && at(tc, true) {
            f.add_unit(lit(c, !tc));
            covered[2 * usize::from(tc)] = true;
            covered[2 * usize::from(tc) + 1] = true;
        }
    }
    for td in [false, true] {
        if at(false, td) && at(true, td) {
            f.add_unit(lit(d, !td));
            covered[usize::from(td)] = true;
            covered[2 + usize::from(td)] = true;
        }
    }
    for tc in [false, true] {
        for td in [false, true] {
            let idx = 2 * usize::from(tc) + usize::from(td);
            if bad[idx] && !covered[idx] {
                f.add_clause(lit(c, !tc), lit(d, !td));
            }
        }
    }
}

pub fn build_clauses(instance: &ColoredPointSet) -> TwoSatFormula {
    let ctx = context(instance);
    let k = instance.k();
    let mut f = TwoSatFormula::new(k);
    for c in 0..k {
        // A single bus only meets its own points, which is always allowed.
        for d in c + 1..k {
            if !ctx.spans[c].overlaps(&ctx.spans[d]) {
                continue;
            }
            emit_pair(&mut f, c, d, forbidden_in(&ctx, c, d));
        }
    }
    f
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HalfBusOutcome {
    Feasible {
        layout: BusLayout,
        assignment: Vec<bool>,
    },
    /// The formula forces both values of this color's variable.
    Infeasible {
        color: ColorId,
    },
}

impl HalfBusOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, HalfBusOutcome::Feasible { .. })
    }
}

pub fn solve_halfbep(instance: &ColoredPointSet) -> HalfBusOutcome {
    let formula = build_clauses(instance);
    match solve_2sat(&formula) {
        TwoSatResult::Satisfiable(assignment) => {
            let layout = HalfBusCandidates::new(instance).layout(&assignment);
            debug_assert!(validate_planarity(instance, &layout, EpsilonPolicy::ZERO).unwrap().is_empty());
            HalfBusOutcome::Feasible { layout, assignment }
        }
        TwoSatResult::Unsatisfiable { var } => HalfBusOutcome::Infeasible { color: ColorId(var) },
    }
}

/// Reference decision trying all `2^k` type assignments with the planarity
/// validator. Returns the first planar assignment in binary counting order.
pub fn enumerate_halfbus_oracle(instance: &ColoredPointSet) -> Option<Vec<bool>> {
    let k = instance.k();
    assert!(k < 31, "enumeration is limited to 30 colors");
    let cand = HalfBusCandidates::new(instance);
    (0..1u32 << k).find_map(|mask| {
        let a: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
        validate_planarity(instance, &cand.layout(&a), EpsilonPolicy::ZERO)
            .expect("layout covers every color")
            .is_empty()
            .then_some(a)
    })
}

/// The case analysis for two colors with two points each, as a reference.
pub mod table {
    use super::*;

    /// Placement of the second color's points in its bounding box.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
    pub enum Configuration {
        /// Top-left and bottom-right corners.
        AntiDiagonal,
        /// Bottom-left and top-right corners.
        Diagonal,
    }

    /// How the second box meets the first one.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
    pub enum Case {
        OnlyTop,
        OnlyBottom,
        OnlyRight,
        OnlyLeft,
        TopRightCorner,
        BottomRightCorner,
        TopLeftCorner,
        BottomLeftCorner,
    }

    pub const CASES: [Case; 8] = [
        Case::OnlyTop,
        Case::OnlyBottom,
        Case::OnlyRight,
        Case::OnlyLeft,
        Case::TopRightCorner,
        Case::BottomRightCorner,
        Case::TopLeftCorner,
        Case::BottomLeftCorner,
    ];

    struct Rect {
        x1: Coord,
        x2: Coord,
        y1: Coord,
        y2: Coord,
    }

    fn two_points(instance: &ColoredPointSet, c: ColorId, mirror: bool) -> Option<((Coord, Coord), (Coord, Coord))> {
        let pts: Vec<(Coord, Coord)> =
            instance.points().iter().filter(|p| p.color == c).map(|p| (if mirror { -p.x } else { p.x }, p.y)).collect();
        let [a, b] = pts.as_slice() else { return None };
        Some(if a.0 < b.0 { (*a, *b) } else { (*b, *a) })
    }

    fn rect(((ax, ay), (bx, by)): ((Coord, Coord), (Coord, Coord))) -> Rect {
        Rect { x1: ax, x2: bx, y1: ay.min(by), y2: ay.max(by) }
    }

    fn inside(v: Coord, lo: Coord, hi: Coord) -> bool {
        lo < v && v < hi
    }

    /// Classifies the ordered pair `(c, d)`; `None` when the boxes do not
    /// meet in one of the eight tabulated ways.
    pub fn classify(instance: &ColoredPointSet, c: ColorId, d: ColorId) -> Option<(Configuration, Case)> {
        let (left, right) = two_points(instance, c, false)?;
        // Mirror horizontally so that c's points are bottom-left / top-right.
        let mirror = left.1 > right.1;
        let r = rect(two_points(instance, c, mirror)?);
        let (dl, dr) = two_points(instance, d, mirror)?;
        let config = if dl.1 < dr.1 { Configuration::Diagonal } else { Configuration::AntiDiagonal };
        let s = rect((dl, dr));
        let x_in = s.x1 > r.x1 && s.x2 < r.x2;
        let y_in = s.y1 > r.y1 && s.y2 < r.y2;
        let crosses_top = inside(s.y1, r.y1, r.y2) && s.y2 > r.y2;
        let crosses_bottom = s.y1 < r.y1 && inside(s.y2, r.y1, r.y2);
        let crosses_right = inside(s.x1, r.x1, r.x2) && s.x2 > r.x2;
        let crosses_left = s.x1 < r.x1 && inside(s.x2, r.x1, r.x2);
        let case = if x_in && crosses_top {
            Case::OnlyTop
        } else if x_in && crosses_bottom {
            Case::OnlyBottom
        } else if y_in && crosses_right {
            Case::OnlyRight
        } else if y_in && crosses_left {
            Case::OnlyLeft
        } else if crosses_right && crosses_top {
            Case::TopRightCorner
        } else if crosses_right && crosses_bottom {
            Case::BottomRightCorner
        } else if crosses_left && crosses_top {
            Case::TopLeftCorner
        } else if crosses_left && crosses_bottom {
            Case::BottomLeftCorner
        } else {
            return None;
        };
        Some((config, case))
    }

    /// Clauses the table prescribes for `(c, d)` in the given cell.
    pub fn clauses(config: Configuration, case: Case, c: usize, d: usize) -> Vec<(Lit, Lit)> {
        let unit = |l: Lit| vec![(l, l)];
        let xor = vec![(Lit::pos(c), Lit::pos(d)), (Lit::neg(c), Lit::neg(d))];
        match (config, case) {
            (_, Case::OnlyTop) | (_, Case::OnlyLeft) => unit(Lit::neg(c)),
            (_, Case::OnlyBottom) | (_, Case::OnlyRight) => unit(Lit::pos(c)),
            (Configuration::AntiDiagonal, Case::TopRightCorner) => unit(Lit::pos(d)),
            (Configuration::AntiDiagonal, Case::BottomRightCorner) => unit(Lit::pos(c)),
            (Configuration::AntiDiagonal, Case::TopLeftCorner) => unit(Lit::neg(c)),
            (Configuration::AntiDiagonal, Case::BottomLeftCorner) => unit(Lit::neg(d)),
            (Configuration::Diagonal, Case::TopRightCorner) => xor,
            // x_d implies x_c.
            (Configuration::Diagonal, Case::BottomRightCorner) => vec![(Lit::neg(d), Lit::pos(c))],
            // not x_d implies not x_c.
            (Configuration::Diagonal, Case::TopLeftCorner) => vec![(Lit::pos(d), Lit::neg(c))],
            (Configuration::Diagonal, Case::BottomLeftCorner) => xor,
        }
    }

    /// Table clauses for a two-color instance, combining both orderings of
    /// the pair. `None` if neither ordering falls into a tabulated cell.
    pub fn pair_formula(instance: &ColoredPointSet) -> Option<(TwoSatFormula, Vec<(Configuration, Case)>)> {
        assert_eq!(instance.k(), 2);
        let mut f = TwoSatFormula::new(2);
        let mut cells = Vec::new();
        for (c, d) in [(0, 1), (1, 0)] {
            if let Some((config, case)) = classify(instance, ColorId(c), ColorId(d)) {
                f.clauses.extend(clauses(config, case, c, d));
                cells.push((config, case));
            }
        }
        (!cells.is_empty()).then_some((f, cells))
    }
}

#[cfg(test)]
mod tests {
    use super::table::{Case, Configuration};
    use super::*;

    fn solutions(f: &TwoSatFormula) -> Vec<[bool; 2]> {
        [[false, false], [false, true], [true, false], [true, true]].into_iter().filter(|a| f.evaluate(a)).collect()
    }

    #[test]
    fn only_top_anti_diagonal_forces_c_down() {
        let inst = ColoredPointSet::from_int_triples(&[(0, 0, "c"), (10, 10, "c"), (3, 15, "d"), (6, 5, "d")]);
        assert_eq!(table::classify(&inst, ColorId(0), ColorId(1)), Some((Configuration::AntiDiagonal, Case::OnlyTop)));
        let f = build_clauses(&inst);
        assert_eq!(f.clauses, vec![(Lit::neg(0), Lit::neg(0))]);
    }

    #[test]
    fn bottom_right_diagonal_is_an_implication() {
        let inst = ColoredPointSet::from_int_triples(&[(0, 0, "c"), (10, 10, "c"), (5, -5, "d"), (15, 5, "d")]);
        let (tf, cells) = table::pair_formula(&inst).unwrap();
        assert!(cells.contains(&(Configuration::Diagonal, Case::BottomRightCorner)));
        assert_eq!(solutions(&tf), solutions(&build_clauses(&inst)));
    }

    #[test]
    fn top_right_diagonal_is_exclusive_or() {
        let inst = ColoredPointSet::from_int_triples(&[(0, 0, "c"), (10, 10, "c"), (5, 5, "d"), (15, 15, "d")]);
        let f = build_clauses(&inst);
        assert_eq!(solutions(&f), vec![[false, true], [true, false]]);
    }

    #[test]
    fn disjoint_spans_are_free() {
        let inst = ColoredPointSet::from_int_triples(&[(0, 0, "c"), (1, 5, "c"), (3, 2, "d"), (4, 7, "d")]);
        assert!(build_clauses(&inst).clauses.is_empty());
        assert!(solve_halfbep(&inst).is_feasible());
    }

    #[test]
    fn agrees_with_enumeration() {
        use crate::experiment::{generate_random, Area};
        for seed in 0..120 {
            let k = 2 + seed as usize % 5;
            let inst = generate_random(k, 2 + seed as usize % 3, seed, Area { width: 60, height: 60 }).unwrap();
            let fast = solve_halfbep(&inst);
            assert_eq!(fast.is_feasible(), enumerate_halfbus_oracle(&inst).is_some(), "seed {seed}");
            if let HalfBusOutcome::Feasible { layout, .. } = fast {
                assert!(validate_planarity(&inst, &layout, EpsilonPolicy::ZERO).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn table_cells_match_geometry() {
        use crate::experiment::{generate_random, Area};
        use std::collections::HashSet;
        let mut seen = HashSet::new();
        for seed in 0..4000 {
            let inst = generate_random(2, 2, seed, Area { width: 12, height: 12 }).unwrap();
            let Some((tf, cells)) = table::pair_formula(&inst) else { continue };
            let geo = build_clauses(&inst);
            assert_eq!(solutions(&tf), solutions(&geo), "seed {seed}, cells {cells:?}");
            seen.extend(cells);
        }
        assert_eq!(seen.len(), 16, "{seen:?}");
    }
}
