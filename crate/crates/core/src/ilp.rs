//! Ink-minimizing integer program in CPLEX LP format.
//!
//! Every point gets a slack `e_i >= |y(c) - y(p)|`. Every conflicting pair
//! `(p, c)` with `d = color(p)` asks for `p` and bus `d` on the same side of
//! bus `c`, written as two disjunctions with one binary each:
//!
//! * `b_j_1 = 0` forces `y(p) < y(c)`, `b_j_1 = 1` forces `y(c) < y(d)`;
//! * `b_j_2 = 0` forces `y(c) < y(p)`, `b_j_2 = 1` forces `y(d) < y(c)`.
//!
//! Strict inequalities hold with margin `delta`, chosen so that `k` buses fit
//! between any two neighbouring point heights.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::coord::{common_denominator, decimal_at_least, Coord};
use crate::model::{column_bounds, conflicting_pairs, ColorId, ColoredPointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(Coord, usize)>,
    pub sense: Sense,
    pub rhs: Coord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Row(Row),
    Bound { var: usize, lower: Option<Coord>, upper: Option<Coord> },
    Binary { var: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub variables: Vec<Variable>,
    pub objective: Vec<(Coord, usize)>,
    pub constraints: Vec<Constraint>,
    pub delta: Coord,
    pub big_m: Coord,
    pub lower: Coord,
    pub upper: Coord,
    /// Closed bounds per bus: the global box, tightened by foreign points
    /// sharing a column with an own point.
    pub y_bounds: Vec<(Coord, Coord)>,
    pub pairs: Vec<(usize, ColorId)>,
    point_y: Vec<Coord>,
    point_color: Vec<ColorId>,
    k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IlpError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
}

fn y_var(c: usize) -> usize {
    c
}

impl IlpModel {
    pub fn n(&self) -> usize {
        self.point_y.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    fn e_var(&self, i: usize) -> usize {
        self.k + i
    }

    fn rows(&self) -> impl Iterator<Item = &Row> {
        self.constraints.iter().filter_map(|c| match c {
            Constraint::Row(r) => Some(r),
            _ => None,
        })
    }

    /// Objective value at bus heights `ys` with the slacks set tight, or
    /// `None` when no choice of binaries satisfies the model.
    pub fn evaluate(&self, ys: &[Coord]) -> Option<Coord> {
        assert_eq!(ys.len(), self.k, "one height per color");
        let mut vals = vec![Coord::ZERO; self.variables.len()];
        vals[..self.k].copy_from_slice(ys);
        for i in 0..self.n() {
            vals[self.e_var(i)] = (ys[self.point_color[i].0] - self.point_y[i]).abs();
        }
        let mut by_binary: Vec<Vec<&Row>> = vec![Vec::new(); self.variables.len()];
        for row in self.rows() {
            match row.terms.iter().find(|&&(_, v)| self.variables[v].kind == VarKind::Binary) {
                Some(&(_, b)) => by_binary[b].push(row),
                None if !row_holds(row, &vals) => return None,
                None => {}
            }
        }
        for b in (0..self.variables.len()).filter(|&v| self.variables[v].kind == VarKind::Binary) {
            let ok = [Coord::ZERO, Coord::ONE].into_iter().any(|value| {
                vals[b] = value;
                by_binary[b].iter().all(|r| row_holds(r, &vals))
            });
            if !ok {
                return None;
            }
        }
        for c in &self.constraints {
            if let Constraint::Bound { var, lower, upper } = c {
                if lower.is_some_and(|l| vals[*var] < l) || upper.is_some_and(|u| vals[*var] > u) {
                    return None;
                }
            }
        }
        Some(self.objective.iter().map(|&(a, v)| a * vals[v]).sum())
    }

    /// Heights that suffice for an optimal solution: up to `k` values
    /// `delta` apart just above and just below each point height.
    pub fn grid(&self) -> Vec<Coord> {
        let mut out = BTreeSet::new();
        for j in 1..=self.k as i64 {
            let step = self.delta * Coord::from_int(j);
            for &v in &self.point_y {
                out.insert(v - step);
                out.insert(v + step);
            }
        }
        out.into_iter().collect()
    }

    /// Pair disjunction `(p, c)` holds at the given heights.
    fn pair_holds(&self, j: usize, ys: &[Coord]) -> bool {
        let (p, c) = self.pairs[j];
        let (yp, yc, yd) = (self.point_y[p], ys[c.0], ys[self.point_color[p].0]);
        let d = self.delta;
        (yp + d <= yc && yd + d <= yc) || (yc + d <= yp && yc + d <= yd)
    }

    /// Pairs indexed by the later of their two buses, so a search that
    /// fixes buses in color order can check each pair once.
    fn pairs_by_last_bus(&self) -> Vec<Vec<usize>> {
        let mut ready: Vec<Vec<usize>> = vec![Vec::new(); self.k];
        for (j, &(p, c)) in self.pairs.iter().enumerate() {
            ready[c.0.max(self.point_color[p].0)].push(j);
        }
        ready
    }

    /// Cheapest heights on [`IlpModel::grid`], by exhaustive search. Meant
    /// for tiny models.
    pub fn grid_optimum(&self) -> Option<(Vec<Coord>, Coord)> {
        let grid = self.grid();
        let ready = self.pairs_by_last_bus();
        let mut own: Vec<Vec<Coord>> = vec![Vec::new(); self.k];
        for (i, &c) in self.point_color.iter().enumerate() {
            own[c.0].push(self.point_y[i]);
        }
        let mut best = None;
        let mut ys = vec![Coord::ZERO; self.k];
        self.optimum_rec(0, &mut ys, Coord::ZERO, &grid, &ready, &own, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn optimum_rec(
        &self,
        c: usize,
        ys: &mut Vec<Coord>,
        cost: Coord,
        grid: &[Coord],
        ready: &[Vec<usize>],
        own: &[Vec<Coord>],
        best: &mut Option<(Vec<Coord>, Coord)>,
    ) {
        if c == self.k {
            *best = Some((ys.clone(), cost));
            return;
        }
        for &y in grid {
            ys[c] = y;
            let cost = cost + own[c].iter().map(|&v| (y - v).abs()).sum::<Coord>();
            if best.as_ref().is_some_and(|(_, b)| cost >= *b) {
                continue;
            }
            if ready[c].iter().all(|&j| self.pair_holds(j, ys)) {
                self.optimum_rec(c + 1, ys, cost, grid, ready, own, best);
            }
        }
    }

    /// Decides feasibility by searching over the order type of the heights:
    /// which gap between point heights each bus occupies and its rank among
    /// the buses in that gap. Any solution of that shape maps back to
    /// heights `delta` apart.
    pub fn feasible_heights(&self) -> Option<Vec<Coord>> {
        let levels: Vec<Coord> = self.point_y.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let point_level: Vec<usize> =
            self.point_y.iter().map(|y| levels.binary_search(y).expect("own level")).collect();
        let mut search = OrdinalSearch {
            model: self,
            gaps: levels.len() + 1,
            levels: levels.clone(),
            point_level,
            ready: self.pairs_by_last_bus(),
            place: vec![(0, Coord::ZERO); self.k],
        };
        if !search.descend(0) {
            return None;
        }
        // Gap g lies below level g; the last gap lies above the top level.
        let mut ys = vec![Coord::ZERO; self.k];
        for g in 0..search.gaps {
            let mut members: Vec<usize> = (0..self.k).filter(|&c| search.place[c].0 == g).collect();
            members.sort_by_key(|&c| search.place[c].1);
            let m = members.len() as i64;
            for (idx, &c) in members.iter().enumerate() {
                let idx = idx as i64;
                ys[c] = if g < levels.len() {
                    levels[g] - self.delta * Coord::from_int(m - idx)
                } else {
                    levels[g - 1] + self.delta * Coord::from_int(idx + 1)
                };
            }
        }
        Some(ys)
    }
}

struct OrdinalSearch<'a> {
    model: &'a IlpModel,
    gaps: usize,
    levels: Vec<Coord>,
    point_level: Vec<usize>,
    ready: Vec<Vec<usize>>,
    /// Gap and position inside the gap of every bus fixed so far.
    place: Vec<(usize, Coord)>,
}

impl OrdinalSearch<'_> {
    fn descend(&mut self, c: usize) -> bool {
        if c == self.model.k {
            return true;
        }
        for g in 0..self.gaps {
            if !self.gap_allowed(c, g) {
                continue;
            }
            let mut taken: Vec<Coord> = (0..c).filter(|&d| self.place[d].0 == g).map(|d| self.place[d].1).collect();
            taken.sort_unstable();
            let mut slots = Vec::with_capacity(taken.len() + 1);
            match (taken.first(), taken.last()) {
                (Some(&lo), Some(&hi)) => {
                    slots.push(lo - Coord::ONE);
                    slots.extend(taken.windows(2).map(|w| w[0].midpoint(w[1])));
                    slots.push(hi + Coord::ONE);
                }
                _ => slots.push(Coord::ZERO),
            }
            for pos in slots {
                self.place[c] = (g, pos);
                if self.ready[c].iter().all(|&j| self.pair_holds(j)) && self.descend(c + 1) {
                    return true;
                }
            }
        }
        false
    }

    /// Whether heights placed inside gap `g` respect the bounds of bus `c`.
    fn gap_allowed(&self, c: usize, g: usize) -> bool {
        let m = self.model;
        let (lo, hi) = m.y_bounds[c];
        let below = if g == 0 { m.lower - m.delta } else { self.levels[g - 1] };
        let above = if g == self.levels.len() { m.upper + m.delta } else { self.levels[g] };
        below + m.delta >= lo && above - m.delta <= hi
    }

    fn pair_holds(&self, j: usize) -> bool {
        let (p, c) = self.model.pairs[j];
        let d = self.model.point_color[p].0;
        let (bus_c, bus_d) = (self.place[c.0], self.place[d]);
        let point_below = self.point_level[p] < bus_c.0;
        let own_below = bus_d < bus_c;
        let point_above = self.point_level[p] >= bus_c.0;
        let own_above = bus_d > bus_c;
        (point_below && own_below) || (point_above && own_above)
    }
}

fn row_holds(row: &Row, vals: &[Coord]) -> bool {
    let lhs: Coord = row.terms.iter().map(|&(a, v)| a * vals[v]).sum();
    match row.sense {
        Sense::Le => lhs <= row.rhs,
        Sense::Ge => lhs >= row.rhs,
    }
}

/// Margin for strict inequalities: a decimal fraction of the smallest gap
/// between distinct point heights (at most 1), small enough for `k + 1`
/// steps to fit in one gap.
pub fn margin(instance: &ColoredPointSet) -> Coord {
    let levels = instance.distinct_ys();
    let gap = levels.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(Coord::ONE).min(Coord::ONE);
    gap / Coord::new(decimal_at_least(instance.k() + 2), 1)
}

/// LP-safe variable suffixes for the color names; colliding names get the
/// color index appended.
fn color_suffixes(instance: &ColoredPointSet) -> Vec<String> {
    let clean: Vec<String> = instance
        .color_names()
        .iter()
        .map(|s| s.chars().map(|ch| if ch.is_ascii_alphanumeric() { ch } else { '_' }).collect())
        .collect();
    clean
        .iter()
        .enumerate()
        .map(|(i, s)| if clean.iter().filter(|t| *t == s).count() > 1 { format!("{s}_{i}") } else { s.clone() })
        .collect()
}

pub fn build_model(instance: &ColoredPointSet) -> IlpModel {
    let (n, k) = (instance.n(), instance.k());
    let pts = instance.points();
    let pairs = conflicting_pairs(instance).pairs().to_vec();
    let levels = instance.distinct_ys();
    let (min_y, max_y) = (levels[0], *levels.last().expect("non-empty instance"));
    let lower = Coord::ZERO.min(min_y - Coord::ONE);
    let upper = max_y + Coord::ONE;
    let big_m = upper - lower + Coord::ONE;
    let delta = margin(instance);

    let mut variables: Vec<Variable> = color_suffixes(instance)
        .into_iter()
        .map(|s| Variable { name: format!("y_{s}"), kind: VarKind::Continuous })
        .collect();
    variables.extend((0..n).map(|i| Variable { name: format!("e_{i}"), kind: VarKind::Continuous }));
    for j in 0..pairs.len() {
        for side in 1..=2 {
            variables.push(Variable { name: format!("b_{j}_{side}"), kind: VarKind::Binary });
        }
    }
    let e_var = |i: usize| k + i;
    let b_var = |j: usize, side: usize| k + n + 2 * j + side - 1;
    let one = Coord::ONE;

    let mut constraints = Vec::with_capacity(3 * n + k + 6 * pairs.len());
    for (i, p) in pts.iter().enumerate() {
        let (e, y) = (e_var(i), y_var(p.color.0));
        constraints.push(Constraint::Row(Row {
            name: format!("abs_{i}_a"),
            terms: vec![(one, e), (-one, y)],
            sense: Sense::Ge,
            rhs: -p.y,
        }));
        constraints.push(Constraint::Row(Row {
            name: format!("abs_{i}_b"),
            terms: vec![(one, e), (one, y)],
            sense: Sense::Ge,
            rhs: p.y,
        }));
    }
    for (j, &(p, c)) in pairs.iter().enumerate() {
        let (yp, yc, yd) = (pts[p].y, y_var(c.0), y_var(pts[p].color.0));
        let (u, v) = (b_var(j, 1), b_var(j, 2));
        // y(p) + delta <= y(c) + M u
        constraints.push(Constraint::Row(Row {
            name: format!("pair_{j}_1a"),
            terms: vec![(-one, yc), (-big_m, u)],
            sense: Sense::Le,
            rhs: -yp - delta,
        }));
        // y(c) + delta <= y(d) + M (1 - u)
        constraints.push(Constraint::Row(Row {
            name: format!("pair_{j}_1b"),
            terms: vec![(one, yc), (-one, yd), (big_m, u)],
            sense: Sense::Le,
            rhs: big_m - delta,
        }));
        // y(c) + delta <= y(p) + M v
        constraints.push(Constraint::Row(Row {
            name: format!("pair_{j}_2a"),
            terms: vec![(one, yc), (-big_m, v)],
            sense: Sense::Le,
            rhs: yp - delta,
        }));
        // y(d) + delta <= y(c) + M (1 - v)
        constraints.push(Constraint::Row(Row {
            name: format!("pair_{j}_2b"),
            terms: vec![(one, yd), (-one, yc), (big_m, v)],
            sense: Sense::Le,
            rhs: big_m - delta,
        }));
    }
    for i in 0..n {
        constraints.push(Constraint::Bound { var: e_var(i), lower: Some(Coord::ZERO), upper: None });
    }
    let columns = column_bounds(instance);
    let mut y_bounds: Vec<(Coord, Coord)> = (0..k)
        .map(|c| {
            let lo = columns.lower[c].map_or(lower, |(y, _)| lower.max(y + delta));
            let hi = columns.upper[c].map_or(upper, |(y, _)| upper.min(y - delta));
            (lo, hi)
        })
        .collect();
    if let Some((a, b)) = columns.coincident {
        // No height works; an empty box keeps the model infeasible.
        for p in [a, b] {
            y_bounds[pts[p].color.0] = (upper, lower);
        }
    }
    for (c, &(lo, hi)) in y_bounds.iter().enumerate() {
        constraints.push(Constraint::Bound { var: y_var(c), lower: Some(lo), upper: Some(hi) });
    }
    for j in 0..pairs.len() {
        constraints.push(Constraint::Binary { var: b_var(j, 1) });
        constraints.push(Constraint::Binary { var: b_var(j, 2) });
    }

    IlpModel {
        variables,
        objective: (0..n).map(|i| (one, e_var(i))).collect(),
        constraints,
        delta,
        big_m,
        lower,
        upper,
        y_bounds,
        pairs,
        point_y: pts.iter().map(|p| p.y).collect(),
        point_color: pts.iter().map(|p| p.color).collect(),
        k,
    }
}

/// Scale factor that makes every constant a terminating decimal. Heights
/// are in units of `1 / scale` in the written file.
fn scale_of(model: &IlpModel) -> Coord {
    let mut constants: Vec<Coord> = vec![model.delta, model.big_m, model.lower, model.upper];
    for c in &model.constraints {
        if let Constraint::Row(r) = c {
            constants.push(r.rhs);
            constants.extend(r.terms.iter().map(|&(a, _)| a));
        }
    }
    if constants.iter().all(|c| c.is_terminating()) {
        Coord::ONE
    } else {
        Coord::new(common_denominator(constants), 1)
    }
}

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, model: &IlpModel, terms: &[(Coord, usize)]) {
    for (t, &(a, v)) in terms.iter().enumerate() {
        if t > 0 && t % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if a.is_negative() { "-" } else { "+" };
        let mag = a.abs();
        let name = &model.variables[v].name;
        match (t, mag == Coord::ONE) {
            (0, true) if !a.is_negative() => write!(out, " {name}"),
            (0, false) if !a.is_negative() => write!(out, " {mag} {name}"),
            (_, true) => write!(out, " {sign} {name}"),
            (_, false) => write!(out, " {sign} {mag} {name}"),
        }
        .expect("writing to a String");
    }
}

pub fn write_lp(model: &IlpModel) -> String {
    let scale = scale_of(model);
    let binary = |v: usize| model.variables[v].kind == VarKind::Binary;
    let (n, k, j) = (model.n(), model.k(), model.pairs.len());
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "\\ busembed ink model").unwrap();
    writeln!(w, "\\ n = {n} points, k = {k} colors, |J| = {j} conflicting pairs").unwrap();
    writeln!(w, "\\ variables n + k + 2|J| = {}", model.variable_count()).unwrap();
    writeln!(w, "\\ constraints 3n + k + 6|J| = {}", model.constraint_count()).unwrap();
    writeln!(w, "\\ strict inequalities use margin delta = {}, big M = {}", model.delta * scale, model.big_m * scale)
        .unwrap();
    if scale != Coord::ONE {
        writeln!(w, "\\ heights are scaled by {scale}").unwrap();
    }
    writeln!(w, "\\ pair j = (point p, bus c), d = color of p:").unwrap();
    writeln!(w, "\\   b_j_1 = 0 forces y(p) < y(c), b_j_1 = 1 forces y(c) < y(d)").unwrap();
    writeln!(w, "\\   b_j_2 = 0 forces y(c) < y(p), b_j_2 = 1 forces y(d) < y(c)").unwrap();
    for (idx, &(p, c)) in model.pairs.iter().enumerate() {
        writeln!(w, "\\ pair {idx}: point {p} in span of {}", model.variables[y_var(c.0)].name).unwrap();
    }
    w.push_str("Minimize\n obj:");
    write_terms(w, model, &model.objective);
    w.push_str("\nSubject To\n");
    for row in model.rows() {
        // Binary coefficients carry heights; continuous coefficients are
        // plain multipliers of scaled variables.
        let terms: Vec<(Coord, usize)> =
            row.terms.iter().map(|&(a, v)| if binary(v) { (a * scale, v) } else { (a, v) }).collect();
        write!(w, " {}:", row.name).unwrap();
        write_terms(w, model, &terms);
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
        };
        writeln!(w, " {op} {}", row.rhs * scale).unwrap();
    }
    w.push_str("Bounds\n");
    for c in &model.constraints {
        if let Constraint::Bound { var, lower, upper } = c {
            let name = &model.variables[*var].name;
            match (lower, upper) {
                (Some(l), Some(u)) => writeln!(w, " {} <= {name} <= {}", *l * scale, *u * scale),
                (Some(l), None) => writeln!(w, " {name} >= {}", *l * scale),
                (None, Some(u)) => writeln!(w, " {name} <= {}", *u * scale),
                (None, None) => writeln!(w, " {name} free"),
            }
            .unwrap();
        }
    }
    w.push_str("Binaries\n");
    for c in &model.constraints {
        if let Constraint::Binary { var } = c {
            writeln!(w, " {}", model.variables[*var].name).unwrap();
        }
    }
    w.push_str("End\n");
    out
}

/// Counts read back from LP text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LpSummary {
    pub variables: usize,
    pub rows: usize,
    pub bounds: usize,
    pub binaries: usize,
}

impl LpSummary {
    pub fn constraints(&self) -> usize {
        self.rows + self.bounds + self.binaries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Start,
    Objective,
    Rows,
    Bounds,
    Binaries,
    End,
}

fn is_name(tok: &str) -> bool {
    let mut chars = tok.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_number(tok: &str) -> bool {
    tok.parse::<Coord>().is_ok()
}

/// Label, terms and (for rows) operator and right-hand side of one
/// statement; records the variable names it mentions.
fn check_statement(stmt: &[String], row: bool, names: &mut BTreeSet<String>) -> Result<(), &'static str> {
    let label = stmt.first().and_then(|t| t.strip_suffix(':'));
    if !label.is_some_and(is_name) {
        return Err("missing label");
    }
    let mut rest = &stmt[1..];
    if row {
        let (rhs, head) = rest.split_last().ok_or("missing right-hand side")?;
        let (op, terms) = head.split_last().ok_or("missing operator")?;
        if !matches!(op.as_str(), "<=" | ">=" | "=") || !is_number(rhs) {
            return Err("malformed right-hand side");
        }
        rest = terms;
    }
    for t in rest {
        if is_name(t) {
            names.insert(t.clone());
        } else if !(matches!(t.as_str(), "+" | "-") || is_number(t)) {
            return Err("unexpected token in expression");
        }
    }
    Ok(())
}

/// Checks the subset of the LP grammar produced by [`write_lp`] and counts
/// its variables and constraints. Statements may continue over several
/// lines; the objective ends at the next section keyword.
pub fn lp_summary(text: &str) -> Result<LpSummary, IlpError> {
    let mut section = Section::Start;
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut summary = LpSummary::default();
    let mut pending: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |reason: &str| IlpError::Syntax { line, reason: reason.to_string() };
        let body = raw.split('\\').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let next = match body.to_ascii_lowercase().as_str() {
            "minimize" => Some(Section::Objective),
            "subject to" => Some(Section::Rows),
            "bounds" => Some(Section::Bounds),
            "binaries" => Some(Section::Binaries),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            if s <= section || !pending.is_empty() && section == Section::Rows {
                return Err(err("section out of order"));
            }
            if section == Section::Objective {
                check_statement(&std::mem::take(&mut pending), false, &mut names).map_err(err)?;
            }
            section = s;
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match section {
            Section::Start | Section::End => return Err(err("text outside a section")),
            Section::Objective => pending.extend(tokens.iter().map(|t| t.to_string())),
            Section::Rows => {
                pending.extend(tokens.iter().map(|t| t.to_string()));
                if tokens.iter().any(|t| matches!(*t, "<=" | ">=" | "=")) {
                    check_statement(&std::mem::take(&mut pending), true, &mut names).map_err(err)?;
                    summary.rows += 1;
                }
            }
            Section::Bounds => {
                let ok = match tokens.as_slice() {
                    [l, "<=", v, "<=", u] => is_number(l) && is_name(v) && is_number(u),
                    [v, ">=" | "<=", b] => is_name(v) && is_number(b),
                    [v, "free"] => is_name(v),
                    _ => false,
                };
                if !ok {
                    return Err(err("malformed bound"));
                }
                names.insert(tokens.iter().find(|t| is_name(t)).expect("checked").to_string());
                summary.bounds += 1;
            }
            Section::Binaries => {
                for t in tokens {
                    if !is_name(t) {
                        return Err(err("malformed binary name"));
                    }
                    names.insert(t.to_string());
                    summary.binaries += 1;
                }
            }
        }
    }
    if section != Section::End {
        return Err(IlpError::Syntax { line: text.lines().count(), reason: "missing End".into() });
    }
    summary.variables = names.len();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_bep;
    use crate::experiment::{generate_random, Area};
    use crate::model::EpsilonPolicy;

    #[test]
    fn disjoint_spans_count() {
        let inst = ColoredPointSet::from_int_triples(&[(0, 1, "A"), (1, 2, "A"), (5, 1, "B"), (6, 3, "B")]);
        let model = build_model(&inst);
        assert_eq!((model.variable_count(), model.constraint_count()), (6, 14));
        let s = lp_summary(&write_lp(&model)).unwrap();
        assert_eq!((s.variables, s.constraints()), (6, 14));
    }

    #[test]
    fn two_pairs_count() {
        // B's points both lie inside A's span: two conflicting pairs.
        let inst = ColoredPointSet::from_int_triples(&[(0, 1, "A"), (9, 2, "A"), (3, 5, "B"), (4, 6, "B")]);
        let model = build_model(&inst);
        assert_eq!(model.pairs.len(), 2);
        assert_eq!((model.variable_count(), model.constraint_count()), (10, 26));
        let text = write_lp(&model);
        assert_eq!(text, write_lp(&build_model(&inst)));
        let s = lp_summary(&text).unwrap();
        assert_eq!((s.variables, s.rows, s.bounds, s.binaries), (10, 16, 6, 4));
    }

    #[test]
    fn names_are_sanitized() {
        let inst = ColoredPointSet::from_int_triples(&[(0, 1, "a-b"), (1, 2, "a b"), (5, 1, "c")]);
        let text = write_lp(&build_model(&inst));
        assert!(text.contains("y_a_b_0") && text.contains("y_a_b_1") && text.contains("y_c"));
        lp_summary(&text).unwrap();
    }

    #[test]
    fn thirds_are_scaled() {
        let third = |a: i128| Coord::new(a, 3);
        let inst = ColoredPointSet::from_named([
            (third(0), third(1), "A"),
            (third(3), third(2), "A"),
            (third(6), third(3), "B"),
        ]);
        let text = write_lp(&build_model(&inst));
        assert!(text.contains("heights are scaled by"));
        lp_summary(&text).unwrap();
    }

    #[test]
    fn summary_rejects_garbage() {
        assert!(lp_summary("Minimize\n obj: x\nSubject To\n c1: x >= \nEnd\n").is_err());
        assert!(lp_summary("Subject To\nMinimize\nEnd\n").is_err());
        assert!(lp_summary("Minimize\n obj: x\n").is_err());
        assert!(lp_summary("Minimize\n x + y\nEnd\n").is_err());
    }

    #[test]
    fn objective_may_wrap() {
        let text = "Minimize\n obj: a + b\n    + c\nSubject To\n r1: a + b\n  - c >= 1\nEnd\n";
        let s = lp_summary(text).unwrap();
        assert_eq!((s.variables, s.rows), (3, 1));
        let model =
            build_model(&crate::experiment::generate_random(3, 3, 1, Area { width: 100, height: 100 }).unwrap());
        lp_summary(&write_lp(&model)).unwrap();
    }

    #[test]
    fn grid_feasibility_matches_exact_solver() {
        let area = Area { width: 40, height: 40 };
        for seed in 0..200 {
            let k = 2 + (seed % 4) as usize;
            let l = 2 + (seed % 2) as usize;
            let inst = generate_random(k, l, seed, area).unwrap();
            let model = build_model(&inst);
            let exact = solve_bep(&inst, EpsilonPolicy::ZERO);
            let found = model.feasible_heights();
            assert_eq!(found.is_some(), exact.feasible(), "seed {seed}");
            if let Some(ys) = found {
                assert!(model.evaluate(&ys).is_some());
                let layout = crate::model::BusLayout::new(ys);
                assert!(crate::model::validate_planarity(&inst, &layout, EpsilonPolicy::ZERO).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn shared_columns_bound_the_buses() {
        use rand::{RngExt, SeedableRng};
        for seed in 0..150u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = 2 + (seed % 2) as usize;
            let inst = ColoredPointSet::from_named((0..k + 3).map(|i| {
                let name = if i < k { i } else { rng.random_range(0..k) };
                let (x, y) = (rng.random_range(0..4), rng.random_range(0..6));
                (Coord::from_int(x), Coord::from_int(y), ["A", "B", "C"][name])
            }));
            let model = build_model(&inst);
            let found = model.feasible_heights();
            assert_eq!(found.is_some(), solve_bep(&inst, EpsilonPolicy::ZERO).feasible(), "seed {seed}");
            if let Some(ys) = found {
                assert!(model.evaluate(&ys).is_some(), "seed {seed}");
                let layout = crate::model::BusLayout::new(ys);
                assert!(crate::model::validate_planarity(&inst, &layout, EpsilonPolicy::ZERO).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn grid_optimum_is_close_to_exact_ink() {
        let area = Area { width: 30, height: 30 };
        for seed in 0..25 {
            let inst = generate_random(3, 2, seed, area).unwrap();
            let model = build_model(&inst);
            let exact = crate::exact::minimize_ink_global(&inst, EpsilonPolicy::ZERO, 8).unwrap();
            let grid = model.grid_optimum();
            assert_eq!(grid.is_some(), exact.is_some(), "seed {seed}");
            if let (Some((_, obj)), Some((layout, _))) = (grid, exact) {
                let ink = crate::model::ink(&inst, &layout);
                let unit = crate::order::PlacementGrid::new(&inst, EpsilonPolicy::ZERO).unit();
                let slack = Coord::from_int((inst.n() * inst.k()) as i64) * (model.delta + unit);
                assert!((obj - ink).abs() <= slack, "seed {seed}: {obj} vs {ink}");
            }
        }
    }
}
