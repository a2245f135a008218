//! 2-SAT via strongly connected components of the implication graph.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Lit { var, positive: false }
    }

    pub fn negate(self) -> Self {
        Lit { var: self.var, positive: !self.positive }
    }

    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }

    fn node(self) -> usize {
        2 * self.var + usize::from(!self.positive)
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

/// Conjunction of clauses with at most two literals. A unit clause is
/// stored with the same literal twice.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TwoSatFormula {
    pub num_vars: usize,
    pub clauses: Vec<(Lit, Lit)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoSatResult {
    Satisfiable(Vec<bool>),
    /// `var` and its negation lie in one strongly connected component.
    Unsatisfiable {
        var: usize,
    },
}

impl TwoSatFormula {
    pub fn new(num_vars: usize) -> Self {
        TwoSatFormula { num_vars, clauses: Vec::new() }
    }

    pub fn add_clause(&mut self, a: Lit, b: Lit) {
        assert!(a.var < self.num_vars && b.var < self.num_vars, "literal out of range");
        self.clauses.push((a, b));
    }

    pub fn add_unit(&mut self, a: Lit) {
        self.add_clause(a, a);
    }

    /// `a` implies `b`.
    pub fn add_implication(&mut self, a: Lit, b: Lit) {
        self.add_clause(a.negate(), b);
    }

    /// Exactly one of `a`, `b`.
    pub fn add_xor(&mut self, a: Lit, b: Lit) {
        self.add_clause(a, b);
        self.add_clause(a.negate(), b.negate());
    }

    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|&(a, b)| a.holds(assignment) || b.holds(assignment))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for &(a, b) in &self.clauses {
            if a == b {
                writeln!(out, "{} 0", a.dimacs()).unwrap();
            } else {
                writeln!(out, "{} {} 0", a.dimacs(), b.dimacs()).unwrap();
            }
        }
        out
    }
}

/// Linear-time decision. The assignment sets each variable to true when its
/// positive literal comes later in topological order of the condensation.
pub fn solve_2sat(formula: &TwoSatFormula) -> TwoSatResult {
    let nodes = 2 * formula.num_vars;
    assert!(nodes < u32::MAX as usize && 2 * formula.clauses.len() < u32::MAX as usize, "formula too large");
    // Compressed adjacency: clause (a or b) gives !a -> b and !b -> a.
    // Indices are u32 to halve the working set, which keeps large graphs in cache.
    let node = |l: Lit| l.node() as u32;
    let mut start = vec![0u32; nodes + 1];
    for &(a, b) in &formula.clauses {
        start[a.negate().node() + 1] += 1;
        start[b.negate().node() + 1] += 1;
    }
    for v in 0..nodes {
        start[v + 1] += start[v];
    }
    let mut fill = start.clone();
    let mut targets = vec![0u32; start[nodes] as usize];
    for &(a, b) in &formula.clauses {
        for (from, to) in [(a.negate(), b), (b.negate(), a)] {
            let slot = &mut fill[from.node()];
            targets[*slot as usize] = node(to);
            *slot += 1;
        }
    }
    let comp = tarjan(nodes, &start, &targets);
    let mut assignment = vec![false; formula.num_vars];
    for (v, value) in assignment.iter_mut().enumerate() {
        let (p, n) = (comp[2 * v], comp[2 * v + 1]);
        if p == n {
            return TwoSatResult::Unsatisfiable { var: v };
        }
        // Tarjan numbers components in reverse topological order.
        *value = p < n;
    }
    TwoSatResult::Satisfiable(assignment)
}

/// Per-node Tarjan state in one record, so visiting a node costs one cache
/// line instead of one per array.
#[derive(Clone, Copy)]
struct NodeState {
    index: u32,
    low: u32,
    /// Component, or `OPEN` while the node is on the stack.
    comp: u32,
    first_edge: u32,
}

const UNSEEN: u32 = u32::MAX;
const OPEN: u32 = u32::MAX;

/// Iterative Tarjan; returns the component index of every node.
fn tarjan(nodes: usize, start: &[u32], targets: &[u32]) -> Vec<u32> {
    let mut state: Vec<NodeState> =
        (0..nodes).map(|v| NodeState { index: UNSEEN, low: 0, comp: OPEN, first_edge: start[v] }).collect();
    let mut stack: Vec<u32> = Vec::new();
    // Frames hold the node, its next edge and its end of edges.
    let mut call: Vec<(u32, u32, u32)> = Vec::new();
    let mut counter = 0;
    let mut comps = 0;
    for root in 0..nodes {
        if state[root].index != UNSEEN {
            continue;
        }
        let open = |s: &mut NodeState, counter: &mut u32| {
            s.index = *counter;
            s.low = *counter;
            *counter += 1;
        };
        open(&mut state[root], &mut counter);
        call.push((root as u32, start[root], start[root + 1]));
        stack.push(root as u32);
        while let Some(&mut (v, ref mut edge, end)) = call.last_mut() {
            let v = v as usize;
            if *edge < end {
                let w = targets[*edge as usize];
                *edge += 1;
                let ws = &mut state[w as usize];
                if ws.index == UNSEEN {
                    open(ws, &mut counter);
                    let first = ws.first_edge;
                    let last = if (w as usize) + 1 < nodes { state[w as usize + 1].first_edge } else { start[nodes] };
                    call.push((w, first, last));
                    stack.push(w);
                } else if ws.comp == OPEN {
                    let idx = ws.index;
                    let vs = &mut state[v];
                    vs.low = vs.low.min(idx);
                }
                continue;
            }
            call.pop();
            let low = state[v].low;
            if let Some(&(parent, _, _)) = call.last() {
                let ps = &mut state[parent as usize];
                ps.low = ps.low.min(low);
            }
            if low == state[v].index {
                loop {
                    let w = stack.pop().expect("component root is on the stack") as usize;
                    state[w].comp = comps;
                    if w == v {
                        break;
                    }
                }
                comps += 1;
            }
        }
    }
    state.into_iter().map(|s| s.comp).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(f: &TwoSatFormula) -> bool {
        (0..1u32 << f.num_vars).any(|m| {
            let a: Vec<bool> = (0..f.num_vars).map(|i| m >> i & 1 == 1).collect();
            f.evaluate(&a)
        })
    }

    #[test]
    fn empty_formula_is_all_true() {
        assert_eq!(solve_2sat(&TwoSatFormula::new(3)), TwoSatResult::Satisfiable(vec![true; 3]));
    }

    #[test]
    fn four_clauses_over_two_vars_are_unsat() {
        let mut f = TwoSatFormula::new(2);
        f.add_clause(Lit::pos(0), Lit::pos(1));
        f.add_clause(Lit::neg(0), Lit::pos(1));
        f.add_clause(Lit::pos(0), Lit::neg(1));
        f.add_clause(Lit::neg(0), Lit::neg(1));
        assert!(matches!(solve_2sat(&f), TwoSatResult::Unsatisfiable { .. }));
    }

    #[test]
    fn units_and_implications() {
        let mut f = TwoSatFormula::new(3);
        f.add_unit(Lit::pos(0));
        f.add_implication(Lit::pos(0), Lit::neg(1));
        f.add_xor(Lit::pos(1), Lit::pos(2));
        assert_eq!(solve_2sat(&f), TwoSatResult::Satisfiable(vec![true, false, true]));
        assert_eq!(f.to_dimacs().lines().next(), Some("p cnf 3 4"));
        assert!(f.to_dimacs().contains("\n1 0\n"));
    }

    #[test]
    fn small_random_formulas_match_truth_table() {
        let mut state = 12345u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..300 {
            let v = 1 + (next() % 6) as usize;
            let mut f = TwoSatFormula::new(v);
            for _ in 0..next() % 12 {
                let a = Lit { var: (next() % v as u64) as usize, positive: next() % 2 == 0 };
                let b = Lit { var: (next() % v as u64) as usize, positive: next() % 2 == 0 };
                f.add_clause(a, b);
            }
            match solve_2sat(&f) {
                TwoSatResult::Satisfiable(a) => assert!(f.evaluate(&a)),
                TwoSatResult::Unsatisfiable { .. } => assert!(!brute_force(&f)),
            }
        }
    }
}
