//! Diagonal instances and sorting with two stacks in series.
//!
//! A permutation `pi` of `1..=k` describes `2k` points on the line `y = x`:
//! first the colors in the order `pi`, then again in the order `1..=k`. A
//! planar layout with buses crossing the diagonal corresponds to a run of
//! two-stack sorting where `a` (input to first stack), `b` (first to second
//! stack) and `g` (second stack to output) are the left point, the bus and
//! the right point of a color.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::coord::{decimal_at_least, Coord};
use crate::model::{validate_planarity, BusLayout, ColorId, ColoredPointSet, EpsilonPolicy, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Alpha,
    Beta,
    Gamma,
}

/// One operation on element `elem` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub op: Op,
    pub elem: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SortingWord(pub Vec<Letter>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("cannot parse letter {0:?}")]
    Parse(String),
    #[error("not a permutation of 1..=k: {0:?}")]
    NotPermutation(Vec<usize>),
    #[error("letter {position}: {reason}")]
    Invalid { position: usize, reason: String },
    #[error("word is incomplete: {0}")]
    Incomplete(String),
    #[error("layout is not planar")]
    NotPlanar,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.op {
            Op::Alpha => 'a',
            Op::Beta => 'b',
            Op::Gamma => 'g',
        };
        write!(f, "{c}{}", self.elem)
    }
}

impl fmt::Display for SortingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for SortingWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace()
            .map(|tok| {
                let bad = || WordError::Parse(tok.to_string());
                let mut chars = tok.chars();
                let op = match chars.next().ok_or_else(bad)? {
                    'a' => Op::Alpha,
                    'b' => Op::Beta,
                    'g' => Op::Gamma,
                    _ => return Err(bad()),
                };
                let elem: usize = chars.as_str().parse().map_err(|_| bad())?;
                if elem == 0 {
                    return Err(bad());
                }
                Ok(Letter { op, elem })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SortingWord)
    }
}

impl SortingWord {
    /// Subscripts of the `a` and `g` letters, in order.
    pub fn input_output_sequence(&self) -> Vec<usize> {
        self.0.iter().filter(|l| l.op != Op::Beta).map(|l| l.elem).collect()
    }
}

pub fn check_permutation(pi: &[usize]) -> Result<(), WordError> {
    let mut seen = vec![false; pi.len() + 1];
    for &v in pi {
        if v == 0 || v > pi.len() || seen[v] {
            return Err(WordError::NotPermutation(pi.to_vec()));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Replays `word` on `pi` with two stacks; returns the printed output.
pub fn replay(word: &SortingWord, pi: &[usize]) -> Result<Vec<usize>, WordError> {
    check_permutation(pi)?;
    let k = pi.len();
    let mut next = 0;
    let mut s1: Vec<usize> = Vec::new();
    let mut s2: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for (position, l) in word.0.iter().enumerate() {
        let fail = |reason: String| Err(WordError::Invalid { position, reason });
        match l.op {
            Op::Alpha => {
                if next >= k || pi[next] != l.elem {
                    return fail(format!("{l} does not read the next input element"));
                }
                s1.push(l.elem);
                next += 1;
            }
            Op::Beta => {
                if s1.last() != Some(&l.elem) {
                    return fail(format!("{l} is not on top of the first stack"));
                }
                s2.push(s1.pop().expect("checked"));
            }
            Op::Gamma => {
                if s2.last() != Some(&l.elem) {
                    return fail(format!("{l} is not on top of the second stack"));
                }
                if l.elem != out.len() + 1 {
                    return fail(format!("{l} would print out of order"));
                }
                out.push(s2.pop().expect("checked"));
            }
        }
    }
    if out.len() != k {
        return Err(WordError::Incomplete(format!("printed {} of {k} elements", out.len())));
    }
    Ok(out)
}

/// A complete valid sorting word whose input/output subscripts read `pi`
/// followed by `1..=k`.
pub fn is_pushall_word(word: &SortingWord, pi: &[usize]) -> Result<bool, WordError> {
    replay(word, pi)?;
    let expected: Vec<usize> = pi.iter().copied().chain(1..=pi.len()).collect();
    Ok(word.input_output_sequence() == expected)
}

type State = (usize, Vec<usize>, Vec<usize>);

/// Lexicographically first pushall sorting word (`a` before `b` before `g`),
/// by memoized depth-first search over stack states.
pub fn pushall_sort(pi: &[usize]) -> Result<Option<SortingWord>, WordError> {
    check_permutation(pi)?;
    let mut dead: HashSet<State> = HashSet::new();
    let mut word = Vec::with_capacity(3 * pi.len());
    let found = search(pi, 0, &mut Vec::new(), &mut Vec::new(), 0, &mut word, &mut dead);
    Ok(found.then_some(SortingWord(word)))
}

fn search(
    pi: &[usize],
    next: usize,
    s1: &mut Vec<usize>,
    s2: &mut Vec<usize>,
    printed: usize,
    word: &mut Vec<Letter>,
    dead: &mut HashSet<State>,
) -> bool {
    let k = pi.len();
    if printed == k {
        return true;
    }
    let key = (next, s1.clone(), s2.clone());
    if dead.contains(&key) {
        return false;
    }
    if next < k {
        let e = pi[next];
        s1.push(e);
        word.push(Letter { op: Op::Alpha, elem: e });
        if search(pi, next + 1, s1, s2, printed, word, dead) {
            return true;
        }
        word.pop();
        s1.pop();
    }
    // The second stack must stay increasing from the top, or its top can
    // never be printed in order.
    if let Some(&e) = s1.last() {
        if s2.last().is_none_or(|&t| e < t) {
            s1.pop();
            s2.push(e);
            word.push(Letter { op: Op::Beta, elem: e });
            if search(pi, next, s1, s2, printed, word, dead) {
                return true;
            }
            word.pop();
            s2.pop();
            s1.push(e);
        }
    }
    // Pushall: nothing is printed before the whole input was read.
    if next == k && s2.last() == Some(&(printed + 1)) {
        let e = s2.pop().expect("checked");
        word.push(Letter { op: Op::Gamma, elem: e });
        if search(pi, next, s1, s2, printed + 1, word, dead) {
            return true;
        }
        word.pop();
        s2.push(e);
    }
    dead.insert(key);
    false
}

/// Points `(t, t)` for `t = 1..=2k`: colors `pi` then `1..=k`. Color `i` is
/// named `"i"` and has id `i - 1`.
pub fn materialize(pi: &[usize]) -> Result<ColoredPointSet, WordError> {
    check_permutation(pi)?;
    let k = pi.len();
    let points = pi
        .iter()
        .copied()
        .chain(1..=k)
        .enumerate()
        .map(|(t, c)| {
            let v = Coord::from_int(t as i64 + 1);
            Point { x: v, y: v, color: ColorId(c - 1) }
        })
        .collect();
    let names = (1..=k).map(|i| i.to_string()).collect();
    Ok(ColoredPointSet::new(points, names).expect("every color appears twice"))
}

/// Layout on [`materialize`]`(pi)` following the slot rules, without
/// checking stack discipline. Each bus crosses the diagonal between the
/// points that surround its `b` letter.
pub fn slot_layout(word: &SortingWord, pi: &[usize]) -> Result<BusLayout, WordError> {
    check_permutation(pi)?;
    let k = pi.len();
    let expected: Vec<usize> = pi.iter().copied().chain(1..=k).collect();
    if word.input_output_sequence() != expected {
        return Err(WordError::Incomplete("input/output letters do not read pi then 1..=k".into()));
    }
    let mut stage = vec![0u8; k + 1];
    let mut points_seen = 0usize;
    let mut run: Vec<usize> = Vec::new();
    let mut runs: Vec<(usize, Vec<usize>)> = Vec::new();
    for (position, l) in word.0.iter().enumerate() {
        if l.elem > k {
            return Err(WordError::Invalid { position, reason: format!("{l} is out of range") });
        }
        let want = match l.op {
            Op::Alpha => 0,
            Op::Beta => 1,
            Op::Gamma => 2,
        };
        if stage[l.elem] != want {
            return Err(WordError::Invalid { position, reason: format!("{l} is out of a, b, g order") });
        }
        stage[l.elem] += 1;
        if l.op == Op::Beta {
            run.push(l.elem);
        } else {
            if !run.is_empty() {
                runs.push((points_seen, std::mem::take(&mut run)));
            }
            points_seen += 1;
        }
    }
    // A run of b letters after `seen` points shares the open interval
    // between the points at heights `seen` and `seen + 1`.
    let mut ys = vec![Coord::ZERO; k];
    for (seen, r) in runs {
        let parts = decimal_at_least(r.len() + 1);
        for (j, e) in r.into_iter().enumerate() {
            ys[e - 1] = Coord::from_int(seen as i64) + Coord::new(j as i128 + 1, parts);
        }
    }
    Ok(BusLayout::new(ys))
}

/// Layout of a valid pushall word.
pub fn word_to_layout(word: &SortingWord, pi: &[usize]) -> Result<BusLayout, WordError> {
    if !is_pushall_word(word, pi)? {
        return Err(WordError::Incomplete("not a pushall word".into()));
    }
    slot_layout(word, pi)
}

/// Moves buses above (below) both of their points to just below (above)
/// the upper (lower) point. On diagonal instances no foreign point lies in
/// a span beyond its color's extreme points, so planarity is preserved.
pub fn to_center_buses(instance: &ColoredPointSet, layout: &BusLayout) -> BusLayout {
    let mut heights: Vec<Coord> = instance.points().iter().map(|p| p.y).chain(layout.ys().iter().copied()).collect();
    heights.sort_unstable();
    heights.dedup();
    let gap = heights.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(Coord::ONE);
    let delta = gap / Coord::new(decimal_at_least(2 * instance.k() + 2), 1);
    let own = instance.points_by_color();
    let mut out = layout.clone();
    for c in instance.colors() {
        let ys: Vec<Coord> = own[c.0].iter().map(|&i| instance.points()[i].y).collect();
        let lo = ys.iter().copied().min().expect("non-empty color");
        let hi = ys.iter().copied().max().expect("non-empty color");
        let y = layout.y(c);
        // Distinct offsets keep the relative order of buses sharing a target.
        let step = delta * Coord::new(c.0 as i128 + 1, decimal_at_least(instance.k() + 1));
        if y >= hi {
            out.set_y(c, hi - step);
        } else if y <= lo {
            out.set_y(c, lo + step);
        }
    }
    out
}

/// Reads the sorting word off a planar layout of [`materialize`]`(pi)`.
pub fn layout_to_word(pi: &[usize], layout: &BusLayout) -> Result<SortingWord, WordError> {
    let instance = materialize(pi)?;
    let clean = validate_planarity(&instance, layout, EpsilonPolicy::ZERO).map_err(|_| WordError::NotPlanar)?;
    if !clean.is_empty() {
        return Err(WordError::NotPlanar);
    }
    let layout = to_center_buses(&instance, layout);
    // Events along the diagonal; a point and a bus never share a height in
    // a planar center-bus layout.
    let mut events: Vec<(Coord, Letter)> = Vec::with_capacity(3 * pi.len());
    let mut first = vec![true; pi.len()];
    for p in instance.points() {
        let c = p.color.0;
        let op = if first[c] { Op::Alpha } else { Op::Gamma };
        first[c] = false;
        events.push((p.y, Letter { op, elem: c + 1 }));
    }
    for c in instance.colors() {
        events.push((layout.y(c), Letter { op: Op::Beta, elem: c.0 + 1 }));
    }
    events.sort_by_key(|&(y, l)| (y, l.op == Op::Beta));
    Ok(SortingWord(events.into_iter().map(|(_, l)| l).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagonalOutcome {
    Sortable { word: SortingWord, instance: ColoredPointSet, layout: BusLayout },
    Unsortable,
}

impl DiagonalOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, DiagonalOutcome::Sortable { .. })
    }
}

pub fn solve_diagonal(pi: &[usize]) -> Result<DiagonalOutcome, WordError> {
    Ok(match pushall_sort(pi)? {
        Some(word) => {
            let layout = word_to_layout(&word, pi)?;
            DiagonalOutcome::Sortable { word, instance: materialize(pi)?, layout }
        }
        None => DiagonalOutcome::Unsortable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE_WORD: &str = "a3 a2 a1 a4 b4 b1 g1 b2 g2 b3 g3 g4";
    const NOT_PUSHALL: &str = "a3 a2 a1 b1 g1 a4 b4 b2 g2 b3 g3 g4";

    fn w(s: &str) -> SortingWord {
        s.parse().unwrap()
    }

    #[test]
    fn word_text_round_trip() {
        assert_eq!(w(TABLE_WORD).to_string(), TABLE_WORD);
        assert!("a3 x2".parse::<SortingWord>().is_err());
        assert!("a0".parse::<SortingWord>().is_err());
    }

    #[test]
    fn table_word_is_pushall() {
        let pi = [3, 2, 1, 4];
        assert_eq!(replay(&w(TABLE_WORD), &pi).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(w(TABLE_WORD).input_output_sequence(), vec![3, 2, 1, 4, 1, 2, 3, 4]);
        assert!(is_pushall_word(&w(TABLE_WORD), &pi).unwrap());
        assert_eq!(w(NOT_PUSHALL).input_output_sequence(), vec![3, 2, 1, 1, 4, 2, 3, 4]);
        assert!(!is_pushall_word(&w(NOT_PUSHALL), &pi).unwrap());
        assert!(is_pushall_word(&w("a1 b1 g1"), &[1]).unwrap());
    }

    #[test]
    fn invalid_word_reports_position() {
        let err = replay(&w("a3 a2 b3"), &[3, 2, 1]).unwrap_err();
        assert!(matches!(err, WordError::Invalid { position: 2, .. }));
    }

    #[test]
    fn search_finds_table_word() {
        assert_eq!(pushall_sort(&[3, 2, 1, 4]).unwrap(), Some(w(TABLE_WORD)));
        assert!(pushall_sort(&[1, 2, 3]).unwrap().is_some());
        assert!(pushall_sort(&[1, 1]).is_err());
    }

    #[test]
    fn table_word_layout_round_trips() {
        let pi = [3, 2, 1, 4];
        let layout = word_to_layout(&w(TABLE_WORD), &pi).unwrap();
        let inst = materialize(&pi).unwrap();
        assert!(validate_planarity(&inst, &layout, EpsilonPolicy::ZERO).unwrap().is_empty());
        let mut by_height: Vec<usize> = (1..=4).collect();
        by_height.sort_by_key(|&e| layout.y(ColorId(e - 1)));
        assert_eq!(by_height, vec![4, 1, 2, 3]);
        assert!(layout.ys().iter().all(|y| y.is_terminating()));
        assert_eq!(layout_to_word(&pi, &layout).unwrap(), w(TABLE_WORD));
    }

    #[test]
    fn single_element() {
        let layout = word_to_layout(&w("a1 b1 g1"), &[1]).unwrap();
        assert_eq!(layout.y(ColorId(0)), Coord::new(11, 10));
        assert_eq!(layout_to_word(&[1], &layout).unwrap(), w("a1 b1 g1"));
    }

    fn permutations(k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=k).collect();
        heap(k, &mut cur, &mut out);
        out.sort();
        out
    }

    fn heap(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            heap(n - 1, cur, out);
            let j = if n.is_multiple_of(2) { i } else { 0 };
            cur.swap(j, n - 1);
        }
    }

    #[test]
    fn sortability_matches_exact_solver_up_to_six() {
        let mut first_unsortable = None;
        for k in 1..=6 {
            for pi in permutations(k) {
                let inst = materialize(&pi).unwrap();
                let verdict = crate::exact::solve_bep(&inst, EpsilonPolicy::ZERO);
                let outcome = solve_diagonal(&pi).unwrap();
                assert_eq!(outcome.is_feasible(), verdict.feasible(), "pi = {pi:?}");
                if let DiagonalOutcome::Sortable { word, layout, .. } = &outcome {
                    assert!(validate_planarity(&inst, layout, EpsilonPolicy::ZERO).unwrap().is_empty());
                    assert_eq!(&layout_to_word(&pi, layout).unwrap(), word);
                } else if first_unsortable.is_none() {
                    first_unsortable = Some(pi.clone());
                }
                if let Some(layout) = &verdict.layout {
                    let centered = to_center_buses(&inst, layout);
                    assert!(validate_planarity(&inst, &centered, EpsilonPolicy::ZERO).unwrap().is_empty());
                    for c in inst.colors() {
                        assert_eq!(crate::sweep::classify(&inst, &centered, c), crate::sweep::BusType::Center);
                    }
                    let word = layout_to_word(&pi, layout).unwrap();
                    assert!(is_pushall_word(&word, &pi).unwrap(), "pi = {pi:?}");
                }
            }
        }
        assert!(first_unsortable.is_some());
    }

    #[test]
    fn moved_b_letters_break_planarity_exactly_when_stacks_break() {
        for pi in permutations(5) {
            let Some(word) = pushall_sort(&pi).unwrap() else { continue };
            for from in 0..word.0.len() {
                if word.0[from].op != Op::Beta {
                    continue;
                }
                for to in 0..word.0.len() {
                    let mut letters = word.0.clone();
                    let l = letters.remove(from);
                    letters.insert(to, l);
                    let moved = SortingWord(letters);
                    let Ok(layout) = slot_layout(&moved, &pi) else { continue };
                    let inst = materialize(&pi).unwrap();
                    let planar = validate_planarity(&inst, &layout, EpsilonPolicy::ZERO).unwrap().is_empty();
                    assert_eq!(planar, replay(&moved, &pi).is_ok(), "{moved}");
                }
            }
        }
    }
}
