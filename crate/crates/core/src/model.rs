//! Instances, layouts and the planarity predicate shared by every solver.

use std::collections::HashMap;
use std::fmt;

use crate::coord::Coord;

/// Dense color index into [`ColoredPointSet::color_names`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorId(pub usize);

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Coord,
    pub y: Coord,
    pub color: ColorId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("color {0:?} has no points")]
    EmptyColor(String),
    #[error("point {point} references unknown color {color}")]
    UnknownColor { point: usize, color: ColorId },
    #[error("layout has no bus for color {0:?}")]
    MissingBus(String),
    #[error("layout has {got} buses but the instance has {expected} colors")]
    LayoutSize { expected: usize, got: usize },
    #[error("layout names unknown color {0:?}")]
    UnknownBus(String),
    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(Coord),
}

/// Colored points in the plane. Colors are numbered in order of first
/// appearance; every color has at least one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredPointSet {
    points: Vec<Point>,
    color_names: Vec<String>,
    general_position: bool,
}

impl ColoredPointSet {
    pub fn new(points: Vec<Point>, color_names: Vec<String>) -> Result<Self, ModelError> {
        let mut seen = vec![false; color_names.len()];
        for (i, p) in points.iter().enumerate() {
            match seen.get_mut(p.color.0) {
                Some(s) => *s = true,
                None => return Err(ModelError::UnknownColor { point: i, color: p.color }),
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(ModelError::EmptyColor(color_names[i].clone()));
        }
        let general_position = in_general_position(&points);
        Ok(ColoredPointSet { points, color_names, general_position })
    }

    /// Builds an instance from `(x, y, color name)` triples.
    pub fn from_named<S: AsRef<str>>(triples: impl IntoIterator<Item = (Coord, Coord, S)>) -> Self {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let points = triples
            .into_iter()
            .map(|(x, y, name)| {
                let name = name.as_ref();
                let id = *index.entry(name.to_string()).or_insert_with(|| {
                    names.push(name.to_string());
                    names.len() - 1
                });
                Point { x, y, color: ColorId(id) }
            })
            .collect();
        ColoredPointSet::new(points, names).expect("every named color has a point")
    }

    /// Convenience constructor over integer coordinates.
    pub fn from_int_triples<S: AsRef<str>>(triples: &[(i64, i64, S)]) -> Self {
        Self::from_named(triples.iter().map(|(x, y, c)| (Coord::from_int(*x), Coord::from_int(*y), c.as_ref())))
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.color_names.len()
    }

    pub fn color_names(&self) -> &[String] {
        &self.color_names
    }

    pub fn color_name(&self, c: ColorId) -> &str {
        &self.color_names[c.0]
    }

    pub fn color_id(&self, name: &str) -> Option<ColorId> {
        self.color_names.iter().position(|n| n == name).map(ColorId)
    }

    pub fn colors(&self) -> impl Iterator<Item = ColorId> + '_ {
        (0..self.k()).map(ColorId)
    }

    pub fn general_position(&self) -> bool {
        self.general_position
    }

    /// Point indices of every color, in input order.
    pub fn points_by_color(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (i, p) in self.points.iter().enumerate() {
            out[p.color.0].push(i);
        }
        out
    }

    /// Same colors, transformed coordinates.
    pub fn map_points(&self, mut f: impl FnMut(&Point) -> (Coord, Coord)) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| {
                let (x, y) = f(p);
                Point { x, y, color: p.color }
            })
            .collect();
        ColoredPointSet::new(points, self.color_names.clone()).expect("colors unchanged")
    }

    /// Mirror image under `y -> -y`.
    pub fn reflect_vertically(&self) -> Self {
        self.map_points(|p| (p.x, -p.y))
    }

    /// Keeps only the listed colors, renumbering them densely in the given order.
    pub fn restrict_colors(&self, keep: &[ColorId]) -> Self {
        let mut remap = vec![None; self.k()];
        for (new, c) in keep.iter().enumerate() {
            remap[c.0] = Some(ColorId(new));
        }
        let points = self.points.iter().filter_map(|p| remap[p.color.0].map(|color| Point { color, ..*p })).collect();
        let names = keep.iter().map(|c| self.color_names[c.0].clone()).collect();
        ColoredPointSet::new(points, names).expect("kept colors keep their points")
    }

    /// Appends one point; the color is created if it does not exist yet.
    pub fn with_point(&self, x: Coord, y: Coord, color: &str) -> Self {
        let mut names = self.color_names.clone();
        let id = match self.color_id(color) {
            Some(id) => id,
            None => {
                names.push(color.to_string());
                ColorId(names.len() - 1)
            }
        };
        let mut points = self.points.clone();
        points.push(Point { x, y, color: id });
        ColoredPointSet::new(points, names).expect("new point carries its color")
    }

    /// Distinct y-values in increasing order.
    pub fn distinct_ys(&self) -> Vec<Coord> {
        let mut ys: Vec<Coord> = self.points.iter().map(|p| p.y).collect();
        ys.sort_unstable();
        ys.dedup();
        ys
    }
}

fn in_general_position(points: &[Point]) -> bool {
    let mut xs: Vec<Coord> = points.iter().map(|p| p.x).collect();
    let mut ys: Vec<Coord> = points.iter().map(|p| p.y).collect();
    xs.sort_unstable();
    ys.sort_unstable();
    xs.windows(2).all(|w| w[0] != w[1]) && ys.windows(2).all(|w| w[0] != w[1])
}

/// Minimum distance between a point and its own bus. Zero lets a bus pass
/// through its own points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EpsilonPolicy(Coord);

impl EpsilonPolicy {
    pub const ZERO: EpsilonPolicy = EpsilonPolicy(Coord::ZERO);

    pub fn new(epsilon: Coord) -> Result<Self, ModelError> {
        if epsilon.is_negative() {
            Err(ModelError::NegativeEpsilon(epsilon))
        } else {
            Ok(EpsilonPolicy(epsilon))
        }
    }

    pub fn value(self) -> Coord {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub color: ColorId,
    pub x_left: Coord,
    pub x_right: Coord,
}

impl Span {
    pub fn contains(&self, x: Coord) -> bool {
        self.x_left <= x && x <= self.x_right
    }

    /// Closed-interval overlap.
    pub fn overlaps(&self, other: &Span) -> bool {
        self.x_left <= other.x_right && other.x_left <= self.x_right
    }
}

/// Per-color span, indexed by color.
pub fn compute_spans(instance: &ColoredPointSet) -> Vec<Span> {
    let mut spans: Vec<Option<Span>> = vec![None; instance.k()];
    for p in instance.points() {
        let slot = &mut spans[p.color.0];
        match slot {
            Some(s) => {
                s.x_left = s.x_left.min(p.x);
                s.x_right = s.x_right.max(p.x);
            }
            None => *slot = Some(Span { color: p.color, x_left: p.x, x_right: p.x }),
        }
    }
    spans.into_iter().map(|s| s.expect("constructor guarantees a point per color")).collect()
}

/// The set of `(point, color)` pairs where a point lies inside a foreign span.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConflictMatrix {
    pairs: Vec<(usize, ColorId)>,
}

impl ConflictMatrix {
    pub fn pairs(&self) -> &[(usize, ColorId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, point: usize, color: ColorId) -> bool {
        self.pairs.binary_search(&(point, color)).is_ok()
    }
}

pub fn conflicting_pairs(instance: &ColoredPointSet) -> ConflictMatrix {
    let spans = compute_spans(instance);
    let mut pairs = Vec::new();
    for (i, p) in instance.points().iter().enumerate() {
        for s in &spans {
            if s.color != p.color && s.contains(p.x) {
                pairs.push((i, s.color));
            }
        }
    }
    pairs.sort_unstable();
    ConflictMatrix { pairs }
}

/// Bounds forced by points of different colors sharing an x-coordinate.
/// Their connections run along one vertical line and must stay disjoint, so
/// a bus may not reach past a foreign point in the column of an own point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnBounds {
    /// Tightest exclusive lower bound per color, with the foreign point
    /// imposing it.
    pub lower: Vec<Option<(Coord, usize)>>,
    pub upper: Vec<Option<(Coord, usize)>>,
    /// Two points of different colors at one location: nothing is planar.
    pub coincident: Option<(usize, usize)>,
}

impl ColumnBounds {
    /// Whether `y` respects the bounds of color `c`.
    pub fn allows(&self, c: ColorId, y: Coord) -> bool {
        self.coincident.is_none()
            && self.lower[c.0].is_none_or(|(l, _)| y > l)
            && self.upper[c.0].is_none_or(|(u, _)| y < u)
    }
}

pub fn column_bounds(instance: &ColoredPointSet) -> ColumnBounds {
    let pts = instance.points();
    let mut lower: Vec<Option<(Coord, usize)>> = vec![None; instance.k()];
    let mut upper: Vec<Option<(Coord, usize)>> = vec![None; instance.k()];
    let mut coincident = None;
    let mut by_x: Vec<usize> = (0..pts.len()).collect();
    by_x.sort_by_key(|&i| (pts[i].x, i));
    for column in by_x.chunk_by(|&a, &b| pts[a].x == pts[b].x) {
        for &q in column {
            let c = pts[q].color.0;
            for &p in column {
                if pts[p].color.0 == c {
                    continue;
                }
                let y = pts[p].y;
                if y > pts[q].y {
                    if upper[c].is_none_or(|(u, _)| y < u) {
                        upper[c] = Some((y, p));
                    }
                } else if y < pts[q].y {
                    if lower[c].is_none_or(|(l, _)| y > l) {
                        lower[c] = Some((y, p));
                    }
                } else if coincident.is_none() {
                    coincident = Some((q.min(p), q.max(p)));
                }
            }
        }
    }
    ColumnBounds { lower, upper, coincident }
}

/// One y-coordinate per color, indexed by color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BusLayout {
    bus_y: Vec<Coord>,
}

impl BusLayout {
    pub fn new(bus_y: Vec<Coord>) -> Self {
        BusLayout { bus_y }
    }

    pub fn y(&self, c: ColorId) -> Coord {
        self.bus_y[c.0]
    }

    pub fn set_y(&mut self, c: ColorId, y: Coord) {
        self.bus_y[c.0] = y;
    }

    pub fn ys(&self) -> &[Coord] {
        &self.bus_y
    }

    pub fn len(&self) -> usize {
        self.bus_y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bus_y.is_empty()
    }

    pub fn check_covers(&self, instance: &ColoredPointSet) -> Result<(), ModelError> {
        if self.bus_y.len() == instance.k() {
            Ok(())
        } else if self.bus_y.len() < instance.k() {
            Err(ModelError::MissingBus(instance.color_name(ColorId(self.bus_y.len())).to_string()))
        } else {
            Err(ModelError::LayoutSize { expected: instance.k(), got: self.bus_y.len() })
        }
    }

    pub fn reflect_vertically(&self) -> Self {
        BusLayout { bus_y: self.bus_y.iter().map(|&y| -y).collect() }
    }
}

/// A single planarity defect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// The connection of `point` crosses or touches bus `bus`.
    ConnectionCrossing { point: usize, bus: ColorId },
    /// A foreign `point` lies exactly on bus `bus`.
    PointOnBus { point: usize, bus: ColorId },
    /// Two buses with overlapping spans at the same height.
    BusOverlap { a: ColorId, b: ColorId },
    /// An own point closer to its bus than epsilon.
    TooClose { point: usize, bus: ColorId },
    /// Two connections of different colors overlap on a shared vertical line.
    ConnectionOverlap { a: usize, b: usize },
}

/// Reports every violation of the layout. An empty report means the layout
/// is a planar bus realization.
pub fn validate_planarity(
    instance: &ColoredPointSet,
    layout: &BusLayout,
    eps: EpsilonPolicy,
) -> Result<Vec<Violation>, ModelError> {
    layout.check_covers(instance)?;
    let spans = compute_spans(instance);
    let mut order: Vec<usize> = (0..instance.n()).collect();
    let pts = instance.points();
    order.sort_by_key(|&i| pts[i].x);
    let xs: Vec<Coord> = order.iter().map(|&i| pts[i].x).collect();

    let mut report = Vec::new();
    for span in &spans {
        let c = span.color;
        let yc = layout.y(c);
        let lo = xs.partition_point(|&x| x < span.x_left);
        let hi = xs.partition_point(|&x| x <= span.x_right);
        for &i in &order[lo..hi] {
            let p = &pts[i];
            if p.color == c {
                continue;
            }
            let yd = layout.y(p.color);
            if p.y == yc {
                report.push(Violation::PointOnBus { point: i, bus: c });
            } else if p.y.min(yd) <= yc && yc <= p.y.max(yd) {
                report.push(Violation::ConnectionCrossing { point: i, bus: c });
            }
        }
    }
    // Connections sharing a vertical line: closed segments must be disjoint.
    for column in order.chunk_by(|&a, &b| pts[a].x == pts[b].x) {
        for (j, &a) in column.iter().enumerate() {
            for &b in &column[j + 1..] {
                let (pa, pb) = (&pts[a], &pts[b]);
                if pa.color == pb.color {
                    continue;
                }
                let (ya, yb) = (layout.y(pa.color), layout.y(pb.color));
                if pa.y.min(ya).max(pb.y.min(yb)) <= pa.y.max(ya).min(pb.y.max(yb)) {
                    report.push(Violation::ConnectionOverlap { a: a.min(b), b: a.max(b) });
                }
            }
        }
    }
    // Bus pairs: sort by height, compare equal-height groups.
    let mut by_y: Vec<ColorId> = instance.colors().collect();
    by_y.sort_by_key(|&c| (layout.y(c), c));
    for group in by_y.chunk_by(|a, b| layout.y(*a) == layout.y(*b)) {
        for (i, &a) in group.iter().enumerate() {
            for &b in &group[i + 1..] {
                if spans[a.0].overlaps(&spans[b.0]) {
                    report.push(Violation::BusOverlap { a: a.min(b), b: a.max(b) });
                }
            }
        }
    }
    if !eps.is_zero() {
        for (i, p) in pts.iter().enumerate() {
            if (layout.y(p.color) - p.y).abs() < eps.value() {
                report.push(Violation::TooClose { point: i, bus: p.color });
            }
        }
    }
    Ok(report)
}

/// Total connection length.
pub fn ink(instance: &ColoredPointSet, layout: &BusLayout) -> Coord {
    instance.points().iter().map(|p| (layout.y(p.color) - p.y).abs()).sum()
}
