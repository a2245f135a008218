//! Clause encoding of unrestricted bus embedding for many colors.
//!
//! Heights are abstracted to slots: every critical value of the placement
//! grid is a slot, and so is every open interval between two consecutive
//! values. Each bus gets a slot (order encoding) and every pair of
//! overlapping buses a relative-order variable. Two buses sharing an open
//! slot are ordered only by that variable; interval graphs are chordal, so
//! forbidding cyclic triangles is enough to make the relation acyclic.
//!
//! A model is turned into a bus order and handed to the order placer, which
//! produces the actual bottommost layout.

use varisat::{CnfFormula, ExtendFormula, Lit, Solver, Var};

use crate::coord::Coord;
use crate::model::{column_bounds, compute_spans, validate_planarity, ColorId, ColoredPointSet, EpsilonPolicy};
use crate::order::{BusOrder, OrderPlacer};

use super::{Backend, BepVerdict, SolveStats};

struct Encoding {
    formula: CnfFormula,
    /// `slot_vars[c][s]` holds "slot of c is greater than s".
    slot_vars: Vec<Vec<Var>>,
    /// Overlapping pairs `(a, b)` with `a < b` and their "a below b" variable.
    relations: Vec<(usize, usize, Var)>,
}

fn encode(instance: &ColoredPointSet, placer: &OrderPlacer, eps: EpsilonPolicy) -> Encoding {
    let k = instance.k();
    let values = placer.grid.values();
    let slots = 2 * values.len() + 1;
    let pts = instance.points();
    let spans = compute_spans(instance);
    let mut f = CnfFormula::new();
    let slot_vars: Vec<Vec<Var>> = (0..k).map(|_| f.new_var_iter(slots - 1).collect()).collect();
    let above = |c: usize, s: usize| slot_vars[c][s].positive();

    let value_slot = |y: Coord| 2 * values.binary_search(&y).expect("critical value") + 1;
    let forbid = |f: &mut CnfFormula, c: usize, s: usize| {
        let mut clause = Vec::with_capacity(2);
        if s > 0 {
            clause.push(!above(c, s - 1));
        }
        if s + 1 < slots {
            clause.push(above(c, s));
        }
        f.add_clause(&clause);
    };

    let by_color = instance.points_by_color();
    for (c, members) in by_color.iter().enumerate() {
        for s in 0..slots - 2 {
            f.add_clause(&[!above(c, s + 1), above(c, s)]);
        }
        if !eps.is_zero() {
            let own: Vec<Coord> = members.iter().map(|&i| pts[i].y).collect();
            let too_close = |y: Coord| own.iter().any(|&py| (y - py).abs() < eps.value());
            for s in 0..slots {
                // Open slots are represented by their midpoint; band edges are
                // critical values, so the verdict is uniform across the slot.
                let probe = if s % 2 == 1 {
                    values[s / 2]
                } else if s == 0 || s == slots - 1 {
                    continue;
                } else {
                    values[s / 2 - 1].midpoint(values[s / 2])
                };
                if too_close(probe) {
                    forbid(&mut f, c, s);
                }
            }
        }
    }

    let mut relations = Vec::new();
    let mut rel_index = vec![None; k * k];
    for a in 0..k {
        for b in a + 1..k {
            if !spans[a].overlaps(&spans[b]) {
                continue;
            }
            let r = f.new_var();
            rel_index[a * k + b] = Some(relations.len());
            relations.push((a, b, r));
            for s in 0..slots - 1 {
                // slot(a) <= s < slot(b) implies a below b, and symmetrically.
                f.add_clause(&[above(a, s), !above(b, s), r.positive()]);
                f.add_clause(&[above(b, s), !above(a, s), r.negative()]);
            }
            for s in (1..slots).step_by(2) {
                let mut clause = vec![!above(a, s - 1), !above(b, s - 1)];
                if s + 1 < slots {
                    clause.push(above(a, s));
                    clause.push(above(b, s));
                }
                f.add_clause(&clause);
            }
        }
    }
    let below_lit = |lo: usize, hi: usize| -> Lit {
        let (a, b) = (lo.min(hi), lo.max(hi));
        let r = relations[rel_index[a * k + b].expect("overlapping pair")].2;
        if lo < hi {
            r.positive()
        } else {
            r.negative()
        }
    };

    for (c, span) in spans.iter().enumerate() {
        for p in pts {
            let d = p.color.0;
            if d == c || !span.contains(p.x) {
                continue;
            }
            let sp = value_slot(p.y);
            forbid(&mut f, c, sp);
            // Bus c above p exactly when it is above p's own bus.
            let a = above(c, sp);
            let d_below_c = below_lit(d, c);
            f.add_clause(&[!a, d_below_c]);
            f.add_clause(&[a, !d_below_c]);
        }
    }

    let columns = column_bounds(instance);
    if columns.coincident.is_some() {
        f.add_clause(&[above(0, 0)]);
        f.add_clause(&[!above(0, 0)]);
    }
    for c in 0..k {
        if let Some((y, _)) = columns.lower[c] {
            f.add_clause(&[above(c, value_slot(y))]);
        }
        if let Some((y, _)) = columns.upper[c] {
            f.add_clause(&[!above(c, value_slot(y) - 1)]);
        }
    }

    // No cyclic triangle among pairwise overlapping buses.
    for a in 0..k {
        for b in a + 1..k {
            let Some(ab) = rel_index[a * k + b] else { continue };
            for c in b + 1..k {
                let (Some(bc), Some(ac)) = (rel_index[b * k + c], rel_index[a * k + c]) else {
                    continue;
                };
                let (ab, bc, ac) = (relations[ab].2, relations[bc].2, relations[ac].2);
                f.add_clause(&[ab.negative(), bc.negative(), ac.positive()]);
                f.add_clause(&[ab.positive(), bc.positive(), ac.negative()]);
            }
        }
    }

    Encoding { formula: f, slot_vars, relations }
}

fn decode_order(enc: &Encoding, model: &[bool], k: usize) -> BusOrder {
    let slot_of = |c: usize| enc.slot_vars[c].iter().take_while(|v| model[v.index()]).count();
    let slot: Vec<usize> = (0..k).map(slot_of).collect();
    // Kahn's algorithm on the combined relation, smallest slot first.
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut indeg = vec![0usize; k];
    for &(a, b, r) in &enc.relations {
        let (lo, hi) = if model[r.index()] { (a, b) } else { (b, a) };
        succ[lo].push(hi);
        indeg[hi] += 1;
    }
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<(usize, usize)>> =
        (0..k).filter(|&c| indeg[c] == 0).map(|c| std::cmp::Reverse((slot[c], c))).collect();
    let mut order = Vec::with_capacity(k);
    while let Some(std::cmp::Reverse((_, c))) = ready.pop() {
        order.push(ColorId(c));
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.push(std::cmp::Reverse((slot[d], d)));
            }
        }
    }
    assert_eq!(order.len(), k, "relation of a model is acyclic");
    BusOrder(order)
}

/// Exact decision through a SAT solver; any number of colors.
pub fn solve_clauses(instance: &ColoredPointSet, eps: EpsilonPolicy) -> BepVerdict {
    let k = instance.k();
    let placer = OrderPlacer::new(instance, eps);
    let enc = encode(instance, &placer, eps);
    let mut solver = Solver::new();
    solver.add_formula(&enc.formula);
    let feasible = solver.solve().expect("in-memory solving does not fail");
    let stats = SolveStats { backend: Backend::Clauses, states_visited: enc.formula.len() as u64 };
    if !feasible {
        return BepVerdict { layout: None, order: None, stats };
    }
    let mut model = vec![false; enc.formula.var_count()];
    for lit in solver.model().expect("model after SAT") {
        model[lit.index()] = lit.is_positive();
    }
    let order = decode_order(&enc, &model, k);
    let positions = placer.place(&order).expect("orders decoded from a model are feasible");
    let layout = placer.materialize(&positions);
    debug_assert!(validate_planarity(instance, &layout, eps).unwrap().is_empty());
    BepVerdict { layout: Some(layout), order: Some(order), stats }
}
