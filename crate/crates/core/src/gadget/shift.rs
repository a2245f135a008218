use crate::coord::Coord;
use crate::model::ColoredPointSet;

/// Removes shared coordinates by stretching: walking the points in order of
/// x (ties by y), every point that repeats the x-coordinate of its
/// predecessor moves one grid step right together with all later points.
/// The same pass then runs on y. Relative order of distinct coordinates is
/// kept. `step` is the grid unit.
pub fn dedupe_coordinates(instance: &ColoredPointSet, step: Coord) -> ColoredPointSet {
    let pts = instance.points();
    let n = pts.len();
    let mut xs: Vec<Coord> = pts.iter().map(|p| p.x).collect();
    let mut ys: Vec<Coord> = pts.iter().map(|p| p.y).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (pts[i].x, pts[i].y, i));
    stretch(&order, &mut xs, step);
    order.sort_by_key(|&i| (pts[i].y, pts[i].x, i));
    stretch(&order, &mut ys, step);
    let mut i = 0;
    instance.map_points(|_| {
        i += 1;
        (xs[i - 1], ys[i - 1])
    })
}

fn stretch(order: &[usize], values: &mut [Coord], step: Coord) {
    let mut shift = Coord::ZERO;
    let mut prev: Option<Coord> = None;
    for &i in order {
        let original = values[i];
        if prev == Some(original) {
            shift = shift + step;
        }
        prev = Some(original);
        values[i] = original + shift;
    }
}
