use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::GadgetError;

/// Variable index (0-based) with polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }

    fn dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Top,
    Bottom,
}

/// A 3-CNF formula drawn with its variables on a horizontal line and every
/// clause above or below that line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarFormulaLayout {
    pub num_vars: usize,
    pub clauses: Vec<[Literal; 3]>,
    /// Variables from left to right.
    pub order: Vec<usize>,
    pub sides: Vec<Side>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    /// 1-based variable numbers, left to right.
    variable_order: Vec<usize>,
    sides: Vec<Side>,
}

impl PlanarFormulaLayout {
    pub fn new(
        num_vars: usize,
        clauses: Vec<Vec<Literal>>,
        order: Vec<usize>,
        sides: Vec<Side>,
    ) -> Result<Self, GadgetError> {
        let clauses = clauses
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                if let Some(l) = c.iter().find(|l| l.var >= num_vars) {
                    return Err(GadgetError::UnknownVariable { var: l.var, num_vars });
                }
                <[Literal; 3]>::try_from(c.as_slice()).map_err(|_| GadgetError::ClauseWidth { clause: i, got: c.len() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut seen = vec![false; num_vars];
        for &v in &order {
            match seen.get_mut(v) {
                Some(s) if !*s => *s = true,
                _ => return Err(GadgetError::BadOrder),
            }
        }
        if order.len() != num_vars {
            return Err(GadgetError::BadOrder);
        }
        if sides.len() != clauses.len() {
            return Err(GadgetError::SideCount { expected: clauses.len(), got: sides.len() });
        }
        let layout = PlanarFormulaLayout { num_vars, clauses, order, sides };
        layout.check_planar()?;
        Ok(layout)
    }

    /// Variables in index order; clauses alternate top, bottom, top, ...
    pub fn alternating(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, GadgetError> {
        let sides = (0..clauses.len()).map(|i| if i % 2 == 0 { Side::Top } else { Side::Bottom }).collect();
        Self::new(num_vars, clauses, (0..num_vars).collect(), sides)
    }

    /// Parses DIMACS CNF together with the JSON layout sidecar.
    pub fn from_dimacs(cnf: &str, sidecar: &str) -> Result<Self, GadgetError> {
        let (num_vars, clauses) = parse_dimacs(cnf)?;
        let side: Sidecar = serde_json::from_str(sidecar).map_err(|e| GadgetError::Sidecar(e.to_string()))?;
        let order = side
            .variable_order
            .iter()
            .map(|&v| v.checked_sub(1).ok_or(GadgetError::BadOrder))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(num_vars, clauses, order, side.sides)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            writeln!(out, "{} {} {} 0", c[0].dimacs(), c[1].dimacs(), c[2].dimacs()).unwrap();
        }
        out
    }

    pub fn sidecar_json(&self) -> String {
        let side = Sidecar { variable_order: self.order.iter().map(|v| v + 1).collect(), sides: self.sides.clone() };
        serde_json::to_string_pretty(&side).expect("sidecar serializes")
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(assignment)))
    }

    /// Truth-table search.
    pub fn satisfiable(&self) -> bool {
        assert!(self.num_vars < 24, "truth table too large");
        (0..1u32 << self.num_vars).any(|m| {
            let a: Vec<bool> = (0..self.num_vars).map(|i| m >> i & 1 == 1).collect();
            self.satisfied_by(&a)
        })
    }

    /// Position of every variable on the line.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.num_vars];
        for (p, &v) in self.order.iter().enumerate() {
            pos[v] = p;
        }
        pos
    }

    /// Leftmost and rightmost variable position of a clause.
    pub fn interval(&self, clause: usize) -> (usize, usize) {
        let pos = self.positions();
        let ps = self.clauses[clause].map(|l| pos[l.var]);
        (*ps.iter().min().unwrap(), *ps.iter().max().unwrap())
    }

    /// Clauses of one side sorted left to right.
    pub fn side_clauses(&self, side: Side) -> Vec<usize> {
        let mut cs: Vec<usize> = (0..self.clauses.len()).filter(|&c| self.sides[c] == side).collect();
        cs.sort_by_key(|&c| (self.interval(c), c));
        cs
    }

    /// Clauses on one side must sit next to each other. Interleaved
    /// intervals force two chains to cross; strictly nested ones would need
    /// chains routed around a clause gadget.
    pub fn check_planar(&self) -> Result<(), GadgetError> {
        for side in [Side::Top, Side::Bottom] {
            let cs = self.side_clauses(side);
            for (i, &a) in cs.iter().enumerate() {
                for &b in &cs[i + 1..] {
                    let ((la, ha), (lb, hb)) = (self.interval(a), self.interval(b));
                    if ha <= lb {
                        continue;
                    }
                    // Sorted by left end, so la <= lb < ha.
                    if hb > ha && lb > la {
                        return Err(GadgetError::NonPlanar { a, b });
                    }
                    let (outer, inner) = if hb > ha { (b, a) } else { (a, b) };
                    return Err(GadgetError::Nested { outer, inner });
                }
            }
        }
        Ok(())
    }
}

/// Every clause over `num_vars` variables up to repeated literals: each
/// non-empty set of at most three distinct literals, padded to width three
/// by repeating its last literal.
pub fn clause_family(num_vars: usize) -> Vec<[Literal; 3]> {
    let lits: Vec<Literal> = (0..num_vars).flat_map(|v| [Literal::pos(v), Literal::neg(v)]).collect();
    let m = lits.len();
    let mut out = Vec::new();
    for a in 0..m {
        out.push([lits[a]; 3]);
        for b in a + 1..m {
            out.push([lits[a], lits[b], lits[b]]);
            for c in b + 1..m {
                out.push([lits[a], lits[b], lits[c]]);
            }
        }
    }
    out
}

/// Formulas with one clause, and with two clauses (first above the line,
/// second below), over variables in index order.
pub fn formula_family(num_vars: usize) -> Vec<PlanarFormulaLayout> {
    let clauses = clause_family(num_vars);
    let mut out = Vec::new();
    for (i, a) in clauses.iter().enumerate() {
        out.push(PlanarFormulaLayout::alternating(num_vars, vec![a.to_vec()]).expect("one clause is planar"));
        for b in &clauses[i..] {
            out.push(
                PlanarFormulaLayout::alternating(num_vars, vec![a.to_vec(), b.to_vec()])
                    .expect("one clause per side is planar"),
            );
        }
    }
    out
}

fn parse_dimacs(text: &str) -> Result<(usize, Vec<Vec<Literal>>), GadgetError> {
    let err = |line: usize, reason: &str| GadgetError::Dimacs { line, reason: reason.to_string() };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if let Some(rest) = t.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if header.is_some() || f.len() != 3 || f[0] != "cnf" {
                return Err(err(line, "expected `p cnf <vars> <clauses>`"));
            }
            let v = f[1].parse().map_err(|_| err(line, "bad variable count"))?;
            let c = f[2].parse().map_err(|_| err(line, "bad clause count"))?;
            header = Some((v, c));
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| err(line, "clause before header"))?;
        for tok in t.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| err(line, "bad literal"))?;
            if v == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = v.unsigned_abs() as usize - 1;
            if var >= num_vars {
                return Err(err(line, "literal exceeds variable count"));
            }
            current.push(Literal { var, positive: v > 0 });
        }
    }
    let (num_vars, count) = header.ok_or_else(|| err(0, "missing header"))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        return Err(err(0, &format!("header announces {count} clauses, found {}", clauses.len())));
    }
    Ok((num_vars, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3(a: i64, b: i64, c: i64) -> Vec<Literal> {
        [a, b, c].iter().map(|&v| Literal { var: v.unsigned_abs() as usize - 1, positive: v > 0 }).collect()
    }

    #[test]
    fn dimacs_round_trip() {
        let layout = PlanarFormulaLayout::alternating(4, vec![c3(1, -2, 3), c3(2, -3, 4)]).unwrap();
        let again = PlanarFormulaLayout::from_dimacs(&layout.to_dimacs(), &layout.sidecar_json()).unwrap();
        assert_eq!(again, layout);
        assert!(layout.satisfied_by(&[true, true, false, false]));
    }

    #[test]
    fn crossing_and_nesting_are_rejected() {
        let top = vec![Side::Top, Side::Top];
        let crossing = PlanarFormulaLayout::new(4, vec![c3(1, 1, 3), c3(2, 2, 4)], (0..4).collect(), top.clone());
        assert_eq!(crossing, Err(GadgetError::NonPlanar { a: 0, b: 1 }));
        let nested = PlanarFormulaLayout::new(4, vec![c3(1, 1, 4), c3(2, 3, 3)], (0..4).collect(), top.clone());
        assert_eq!(nested, Err(GadgetError::Nested { outer: 0, inner: 1 }));
        let touching = PlanarFormulaLayout::new(4, vec![c3(1, 2, 2), c3(2, 3, 4)], (0..4).collect(), top);
        assert!(touching.is_ok());
    }

    #[test]
    fn family_sizes() {
        assert_eq!(clause_family(4).len(), 8 + 28 + 56);
        assert_eq!(formula_family(1).len(), 3 + 6);
        let fam = formula_family(2);
        assert!(fam.iter().any(|f| !f.satisfiable()));
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse_dimacs("1 2 0\n"), Err(GadgetError::Dimacs { line: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 3 0\n"), Err(GadgetError::Dimacs { line: 2, .. })));
        assert!(matches!(
            PlanarFormulaLayout::alternating(3, vec![c3(1, 2, 3)[..2].to_vec()]),
            Err(GadgetError::ClauseWidth { clause: 0, got: 2 })
        ));
    }
}
