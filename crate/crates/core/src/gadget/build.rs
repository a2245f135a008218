use serde::Serialize;

use crate::coord::Coord;
use crate::model::{ColorId, ColoredPointSet, EpsilonPolicy};

use super::formula::{PlanarFormulaLayout, Side};

// Geometry in grid units of eps / 2, so eps spans two units.

/// Horizontal chains: link `t` has its points at `4t` and `4t + 6`.
const LINK_STEP: i64 = 4;
const LINK_WIDTH: i64 = 6;
/// Links between two attachments on one variable chain.
const ATTACH_SPACING: usize = 4;
/// Free columns between consecutive variable chains.
const VARIABLE_GAP: i64 = 16;
/// Vertical chains step by 4 units (2 eps); a step of 3 fixes the parity.
const CHAIN_STEP: i64 = 4;
/// Row of the main points.
const MAIN_ROW: i64 = 12;
/// Bottom edges of the three gaps; each gap is one eps high.
const GAPS: [i64; 3] = [20, 30, 40];
const GAP_HEIGHT: i64 = 2;
/// Lower end of the segment capping the main points.
const CAP_ROW: i64 = 44;
const WALL_TOP: i64 = 50;
/// Length of the pin and cap segments in the main columns.
const BOUND_LEN: i64 = 4;

pub fn unit() -> Coord {
    Coord::new(1, 2)
}

/// Part a color plays in the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "kebab-case")]
pub enum Role {
    /// Leftmost link of a variable chain; its bus type is the value.
    Variable {
        var: usize,
    },
    /// Link `index` of the horizontal chain of `var` (index 0 is the variable).
    VariableChain {
        var: usize,
        index: usize,
    },
    /// Vertical chain carrying literal `literal` of `clause`; `index` counts
    /// from the variable line.
    LiteralChain {
        clause: usize,
        literal: usize,
        index: usize,
    },
    Main {
        clause: usize,
    },
    /// Pin below or cap above a main point.
    Bound {
        clause: usize,
    },
    Wall {
        clause: usize,
    },
}

/// Axis-parallel segment to be replaced by points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub x1: Coord,
    pub y1: Coord,
    pub x2: Coord,
    pub y2: Coord,
}

/// Two same-colored points at the segment ends. For a horizontal segment
/// they form a chain link whose bus plays the segment; for a vertical one
/// the connections of the pair cover the whole segment whatever the height
/// of their (zero-length) bus, so no bus can pass through it.
pub fn simulate_segment(segment: Segment) -> [(Coord, Coord); 2] {
    assert!(segment.x1 == segment.x2 || segment.y1 == segment.y2, "segment must be axis-parallel");
    [(segment.x1, segment.y1), (segment.x2, segment.y2)]
}

#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub instance: ColoredPointSet,
    pub epsilon: EpsilonPolicy,
    /// Role of every color.
    pub roles: Vec<Role>,
    /// Color of each variable gadget.
    pub variables: Vec<ColorId>,
    /// Color of the main bus of each clause.
    pub mains: Vec<ColorId>,
    pub layout: PlanarFormulaLayout,
}

impl GadgetInstance {
    /// Points belonging to the gadget of `clause`: main points, bounds,
    /// walls and the literal chain links from the main row upwards.
    pub fn clause_points(&self, clause: usize) -> usize {
        let mut count = 0;
        for p in self.instance.points() {
            count += match self.roles[p.color.0] {
                Role::Main { clause: c } | Role::Bound { clause: c } | Role::Wall { clause: c } => {
                    usize::from(c == clause)
                }
                Role::LiteralChain { clause: c, .. } => {
                    usize::from(c == clause && p.y.abs() >= unit() * Coord::from_int(MAIN_ROW))
                }
                _ => 0,
            };
        }
        count
    }

    /// Metadata block for the instance file.
    pub fn metadata(&self) -> serde_json::Value {
        let names = self.instance.color_names();
        let roles: serde_json::Map<String, serde_json::Value> = self
            .roles
            .iter()
            .enumerate()
            .map(|(c, r)| (names[c].clone(), serde_json::to_value(r).expect("role serializes")))
            .collect();
        serde_json::json!({
            "reduction": "planar-3sat",
            "formula": self.layout.to_dimacs(),
            "layout": serde_json::from_str::<serde_json::Value>(&self.layout.sidecar_json()).expect("sidecar is JSON"),
            "variables": self.variables.iter().map(|&c| names[c.0].clone()).collect::<Vec<_>>(),
            "mains": self.mains.iter().map(|&c| names[c.0].clone()).collect::<Vec<_>>(),
            "roles": roles,
        })
    }
}

#[derive(Default)]
struct Builder {
    points: Vec<(i64, i64, usize)>,
    names: Vec<String>,
    roles: Vec<Role>,
}

impl Builder {
    fn color(&mut self, name: String, role: Role) -> usize {
        self.names.push(name);
        self.roles.push(role);
        self.names.len() - 1
    }

    fn link(&mut self, name: String, role: Role, x1: i64, x2: i64, y: i64) -> usize {
        let c = self.color(name, role);
        self.points.push((x1, y, c));
        self.points.push((x2, y, c));
        c
    }

    fn vertical(&mut self, name: String, role: Role, x: i64, y1: i64, y2: i64) {
        let c = self.color(name, role);
        let s = Segment {
            x1: Coord::from_int(x),
            y1: Coord::from_int(y1),
            x2: Coord::from_int(x),
            y2: Coord::from_int(y2),
        };
        for (px, py) in simulate_segment(s) {
            self.points.push((px.numer() as i64, py.numer() as i64, c));
        }
    }

    fn finish(self) -> (ColoredPointSet, Vec<Role>) {
        let u = unit();
        let names = &self.names;
        let inst = ColoredPointSet::from_named(
            self.points.iter().map(|&(x, y, c)| (Coord::from_int(x) * u, Coord::from_int(y) * u, names[c].as_str())),
        );
        debug_assert_eq!(inst.color_names(), self.names.as_slice());
        (inst, self.roles)
    }
}

/// Heights after `from` up to and including `to`, steps of 4 then 3.
fn chain_heights(from: i64, to: i64) -> Vec<i64> {
    let diff = to - from;
    let threes = (4 - diff % 4) % 4;
    let fours = (diff - 3 * threes) / CHAIN_STEP;
    assert!(fours >= 0, "chain target too close");
    let mut out = Vec::new();
    let mut h = from;
    for step in std::iter::repeat_n(CHAIN_STEP, fours as usize).chain(std::iter::repeat_n(3, threes as usize)) {
        h += step;
        out.push(h);
    }
    out
}

/// One literal occurrence waiting for a link on its variable chain.
struct Attachment {
    clause: usize,
    literal: usize,
    /// Needs a link at an odd index.
    odd: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Lift the right main point above the gaps, so the main bus has to run
    /// between its two points.
    pub center_main: bool,
}

/// Builds the point set. The formula is satisfiable exactly when the point
/// set has a planar bus embedding with separation `eps = 1`.
pub fn build_instance(layout: &PlanarFormulaLayout) -> GadgetInstance {
    build_instance_with(layout, BuildOptions::default())
}

pub fn build_instance_with(layout: &PlanarFormulaLayout, options: BuildOptions) -> GadgetInstance {
    let n = layout.num_vars;
    let pos = layout.positions();

    // A false literal must hand a top bus (bottom bus, for clauses below
    // the line) to its vertical chain. Link t has the variable's type when
    // t is even and the opposite one when t is odd.
    let mut attach: Vec<Vec<Attachment>> = (0..n).map(|_| Vec::new()).collect();
    for side in [Side::Top, Side::Bottom] {
        for clause in layout.side_clauses(side) {
            let mut lits: Vec<usize> = (0..3).collect();
            lits.sort_by_key(|&l| (pos[layout.clauses[clause][l].var], l));
            for l in lits {
                let lit = layout.clauses[clause][l];
                let odd = (side == Side::Top) == lit.positive;
                attach[lit.var].push(Attachment { clause, literal: l, odd });
            }
        }
    }

    let mut b = Builder::default();
    let mut variables = vec![ColorId(0); n];
    // Right column of the attachment link, per (clause, literal).
    let mut column = vec![[0i64; 3]; layout.clauses.len()];
    let mut base = 0i64;
    for &var in &layout.order {
        let mut t = 1usize;
        let mut chosen = Vec::new();
        for a in &attach[var] {
            t += 1;
            if (t % 2 == 1) != a.odd {
                t += 1;
            }
            chosen.push(t);
            column[a.clause][a.literal] = base + LINK_STEP * t as i64 + LINK_WIDTH;
            t += ATTACH_SPACING - 1;
        }
        let links = chosen.last().map_or(1, |&t| t + 3);
        for i in 0..links {
            let x = base + LINK_STEP * i as i64;
            let (name, role) = if i == 0 {
                (format!("x{}", var + 1), Role::Variable { var })
            } else {
                (format!("x{}.h{i}", var + 1), Role::VariableChain { var, index: i })
            };
            let c = b.link(name, role, x, x + LINK_WIDTH, 0);
            if i == 0 {
                variables[var] = ColorId(c);
            }
        }
        let right = base + LINK_STEP * (links as i64 - 1) + LINK_WIDTH;
        base = (right + VARIABLE_GAP).div_euclid(4) * 4 + 4;
    }

    let mut mains = vec![ColorId(0); layout.clauses.len()];
    for k in 0..layout.clauses.len() {
        let dir = match layout.sides[k] {
            Side::Top => 1,
            Side::Bottom => -1,
        };
        let mut by_x: Vec<usize> = (0..3).collect();
        by_x.sort_by_key(|&l| (column[k][l], l));
        for (gap, &l) in by_x.iter().enumerate() {
            let c = column[k][l];
            let mut targets: Vec<i64> = GAPS[..gap].iter().map(|g| g + GAP_HEIGHT).collect();
            targets.push(GAPS[gap]);
            let mut heights = Vec::new();
            let mut from = 0;
            for t in targets {
                heights.extend(chain_heights(from, t));
                from = t;
            }
            for (i, h) in heights.into_iter().enumerate() {
                let role = Role::LiteralChain { clause: k, literal: l, index: i + 1 };
                b.link(format!("c{}.l{}.v{}", k + 1, l + 1, i + 1), role, c, c + 1, dir * h);
            }
        }
        let (first, last) = (column[k][by_x[0]], column[k][by_x[2]]);
        let (xl, wl, wr, xr) = (first - 5, first - 1, last + 3, last + 7);
        let main = b.color(format!("c{}.main", k + 1), Role::Main { clause: k });
        mains[k] = ColorId(main);
        let right_row = if options.center_main { CAP_ROW } else { MAIN_ROW };
        b.points.push((xl, dir * MAIN_ROW, main));
        b.points.push((xr, dir * right_row, main));
        let bound = |b: &mut Builder, name: &str, x: i64, from: i64| {
            let to = from + BOUND_LEN * (from - MAIN_ROW).signum();
            b.vertical(format!("c{}.{name}", k + 1), Role::Bound { clause: k }, x, dir * from, dir * to);
        };
        bound(&mut b, "pin.l", xl, MAIN_ROW - 1);
        bound(&mut b, "cap.l", xl, CAP_ROW);
        if options.center_main {
            // The right point sits on the cap row; a pin just above keeps
            // its bus below it.
            bound(&mut b, "cap.r", xr, CAP_ROW + 1);
        } else {
            bound(&mut b, "pin.r", xr, MAIN_ROW - 1);
            bound(&mut b, "cap.r", xr, CAP_ROW);
        }
        let mut bounds = vec![MAIN_ROW];
        for g in GAPS {
            bounds.push(g);
            bounds.push(g + GAP_HEIGHT);
        }
        bounds.push(WALL_TOP);
        for (x, tag) in [(wl, "l"), (wr, "r")] {
            for (i, seg) in bounds.chunks(2).enumerate() {
                let role = Role::Wall { clause: k };
                b.vertical(format!("c{}.wall.{tag}{}", k + 1, i + 1), role, x, dir * seg[0], dir * seg[1]);
            }
        }
    }

    let (instance, roles) = b.finish();
    GadgetInstance {
        instance,
        epsilon: EpsilonPolicy::new(unit() * Coord::from_int(2)).expect("positive"),
        roles,
        variables,
        mains,
        layout: layout.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::next_permutation;
    use crate::gadget::{decode_assignment, dedupe_coordinates, GadgetError, Literal};
    use crate::io::InstanceFile;
    use crate::model::{validate_planarity, BusLayout};
    use crate::order::{BusOrder, OrderPlacer};
    use crate::solve_bep;
    use crate::sweep::{classify, BusType};

    fn lits(c: &[i64]) -> Vec<Literal> {
        c.iter().map(|&v| if v > 0 { Literal::pos(v as usize - 1) } else { Literal::neg((-v) as usize - 1) }).collect()
    }

    fn links(triples: &[(i64, i64, i64)]) -> ColoredPointSet {
        let half = |v: i64| Coord::new(v as i128, 2);
        ColoredPointSet::from_named(
            triples.iter().enumerate().flat_map(|(i, &(x1, x2, y))| {
                [(half(x1), half(y), format!("L{i}")), (half(x2), half(y), format!("L{i}"))]
            }),
        )
    }

    /// Whether some bus order places every link on its requested side.
    fn feasible_with_sides(inst: &ColoredPointSet, sides: &[Option<bool>]) -> bool {
        let eps = EpsilonPolicy::new(Coord::from_int(1)).unwrap();
        let placer = OrderPlacer::new(inst, eps).require_sides(sides);
        let mut order: Vec<ColorId> = inst.colors().collect();
        loop {
            if let Ok(pos) = placer.place(&BusOrder(order.clone())) {
                let layout = placer.materialize(&pos);
                assert!(validate_planarity(inst, &layout, eps).unwrap().is_empty());
                for (c, want) in sides.iter().enumerate() {
                    let kind = classify(inst, &layout, ColorId(c));
                    match want {
                        Some(true) => assert_eq!(kind, BusType::Sqcap),
                        Some(false) => assert_eq!(kind, BusType::Sqcup),
                        None => {}
                    }
                }
                return true;
            }
            if !next_permutation(&mut order) {
                return false;
            }
        }
    }

    #[test]
    fn chain_heights_land_on_target() {
        assert_eq!(chain_heights(0, 20), vec![4, 8, 12, 16, 20]);
        assert_eq!(chain_heights(0, 22), vec![4, 8, 12, 16, 19, 22]);
        assert_eq!(chain_heights(22, 32), vec![26, 29, 32]);
        assert_eq!(chain_heights(0, 6), vec![3, 6]);
    }

    #[test]
    fn horizontal_chain_alternates() {
        let chain = links(&[(0, 6, 0), (4, 10, 0), (8, 14, 0)]);
        assert!(feasible_with_sides(&chain, &[Some(true), None, Some(true)]));
        assert!(feasible_with_sides(&chain, &[Some(false), None, Some(false)]));
        assert!(!feasible_with_sides(&chain, &[Some(true), None, Some(false)]));
        assert!(!feasible_with_sides(&chain, &[Some(false), None, Some(true)]));
        assert!(!feasible_with_sides(&chain, &[Some(true), Some(true), None]));
        // Every link takes one of the two side types.
        let layout = solve_bep(&chain, EpsilonPolicy::new(Coord::from_int(1)).unwrap()).layout.unwrap();
        let kinds: Vec<BusType> = chain.colors().map(|c| classify(&chain, &layout, c)).collect();
        assert_eq!(kinds[0], kinds[2]);
        assert_ne!(kinds[0], kinds[1]);
    }

    #[test]
    fn vertical_chain_passes_top_bus_up_and_bottom_bus_down() {
        let chain = links(&[(0, 1, 0), (0, 1, 4), (0, 1, 8)]);
        for first in [true, false] {
            for second in [true, false] {
                let ok = feasible_with_sides(&chain, &[Some(first), Some(second), None]);
                // Only a top bus below a bottom bus is ruled out.
                assert_eq!(ok, !(first && !second), "{first} {second}");
            }
        }
        assert!(!feasible_with_sides(&chain, &[Some(true), None, Some(false)]));
        assert!(!feasible_with_sides(&chain, &[None, Some(true), Some(false)]));
        // Three units apart (1.5 eps) the chain still propagates.
        let short = links(&[(0, 1, 0), (0, 1, 3)]);
        assert!(!feasible_with_sides(&short, &[Some(true), Some(false)]));
    }

    #[test]
    fn single_clause_point_counts() {
        let layout = PlanarFormulaLayout::alternating(3, vec![lits(&[1, 2, 3])]).unwrap();
        let g = build_instance(&layout);
        assert_eq!(g.clause_points(0), 62);
        assert_eq!(g.variables.len(), 3);
        for &v in &g.variables {
            assert_eq!(g.instance.points_by_color()[v.0].len(), 2);
        }
        let (n, m) = (3, 1);
        assert!(g.instance.n() <= 120 * (n * m + m * m));
    }

    #[test]
    fn size_bound_holds_across_family() {
        for layout in crate::gadget::formula_family(3).iter().step_by(37) {
            let g = build_instance(layout);
            let (n, m) = (layout.num_vars, layout.clauses.len());
            assert!(g.instance.n() <= 120 * (n * m + m * m), "{} points", g.instance.n());
        }
    }

    #[test]
    fn example_formula_is_feasible_and_decodes() {
        let layout = PlanarFormulaLayout::alternating(4, vec![lits(&[1, -2, 3]), lits(&[2, -3, 4])]).unwrap();
        let g = build_instance(&layout);
        let verdict = solve_bep(&g.instance, g.epsilon);
        let bus = verdict.layout.expect("satisfiable formula gives a feasible instance");
        assert!(validate_planarity(&g.instance, &bus, g.epsilon).unwrap().is_empty());
        let values = decode_assignment(&g.instance, &g.metadata(), &bus).unwrap();
        assert!(layout.satisfied_by(&values));
    }

    #[test]
    fn contradiction_is_infeasible() {
        let layout = PlanarFormulaLayout::alternating(1, vec![lits(&[1, 1, 1]), lits(&[-1, -1, -1])]).unwrap();
        let g = build_instance(&layout);
        assert!(!solve_bep(&g.instance, g.epsilon).feasible());
    }

    #[test]
    fn centered_main_bus() {
        let layout = PlanarFormulaLayout::alternating(3, vec![lits(&[1, -2, 3])]).unwrap();
        let g = build_instance_with(&layout, BuildOptions { center_main: true });
        let bus = solve_bep(&g.instance, g.epsilon).layout.unwrap();
        assert_eq!(classify(&g.instance, &bus, g.mains[0]), BusType::Center);
    }

    #[test]
    fn dedupe_gives_general_position() {
        let layout = PlanarFormulaLayout::alternating(3, vec![lits(&[1, -2, 3])]).unwrap();
        let g = build_instance(&layout);
        let moved = dedupe_coordinates(&g.instance, unit());
        let mut xs: Vec<Coord> = moved.points().iter().map(|p| p.x).collect();
        let mut ys: Vec<Coord> = moved.points().iter().map(|p| p.y).collect();
        xs.sort();
        ys.sort();
        xs.dedup();
        ys.dedup();
        assert_eq!(xs.len(), moved.n());
        assert_eq!(ys.len(), moved.n());
    }

    #[test]
    fn decode_rejects_a_bus_through_the_points() {
        let layout = PlanarFormulaLayout::alternating(3, vec![lits(&[1, 2, 3])]).unwrap();
        let g = build_instance(&layout);
        let mut ys: Vec<Coord> = solve_bep(&g.instance, g.epsilon).layout.unwrap().ys().to_vec();
        ys[g.variables[1].0] = Coord::from_int(0);
        let err = decode_assignment(&g.instance, &g.metadata(), &BusLayout::new(ys)).unwrap_err();
        assert!(matches!(err, GadgetError::Undecodable { var: 1, .. }));
        assert!(matches!(
            decode_assignment(&g.instance, &serde_json::json!({}), &BusLayout::new(vec![])),
            Err(GadgetError::Metadata(_))
        ));
    }

    #[test]
    fn metadata_survives_the_instance_file() {
        let layout = PlanarFormulaLayout::alternating(3, vec![lits(&[1, -2, 3])]).unwrap();
        let g = build_instance(&layout);
        let mut file = InstanceFile::new(g.instance.clone(), g.epsilon);
        file.metadata = Some(g.metadata());
        let back = InstanceFile::from_json(&file.to_json()).unwrap();
        let (inst, meta) = (back.instance, back.metadata.unwrap());
        assert_eq!(meta["variables"], serde_json::json!(["x1", "x2", "x3"]));
        let bus = solve_bep(&inst, g.epsilon).layout.unwrap();
        assert!(layout.satisfied_by(&decode_assignment(&inst, &meta, &bus).unwrap()));
    }
}
