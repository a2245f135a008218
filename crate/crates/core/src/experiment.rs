//! Random instances and the feasibility-rate experiment.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coord::Coord;
use crate::exact::solve_bep;
use crate::model::{ColorId, ColoredPointSet, EpsilonPolicy, Point};
use crate::order::BusOrder;

/// Identifier of the generator, written into every CSV.
pub const PRNG_ID: &str = "ChaCha8 (rand_chacha 0.10, seed_from_u64)";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExperimentError {
    #[error("{n} points cannot have distinct coordinates in a {width}x{height} area")]
    AreaTooSmall { n: usize, width: u32, height: u32 },
    #[error("invalid experiment configuration: {0}")]
    Config(String),
}

/// Integer drawing area `[0, width) x [0, height)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Area {
    pub width: u32,
    pub height: u32,
}

impl Default for Area {
    fn default() -> Self {
        Area { width: 1024, height: 768 }
    }
}

/// `k` colors with `l` points each at uniform integer coordinates, no two
/// sharing an x- or a y-coordinate. Colliding draws are resampled.
pub fn generate_random(k: usize, l: usize, seed: u64, area: Area) -> Result<ColoredPointSet, ExperimentError> {
    let n = k * l;
    if n > area.width.min(area.height) as usize {
        return Err(ExperimentError::AreaTooSmall { n, width: area.width, height: area.height });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used_x = vec![false; area.width as usize];
    let mut used_y = vec![false; area.height as usize];
    let mut points = Vec::with_capacity(n);
    for c in 0..k {
        for _ in 0..l {
            let x = draw_unused(&mut rng, &mut used_x);
            let y = draw_unused(&mut rng, &mut used_y);
            points.push(Point { x: Coord::from_int(x as i64), y: Coord::from_int(y as i64), color: ColorId(c) });
        }
    }
    let names = (0..k).map(|c| format!("c{c}")).collect();
    Ok(ColoredPointSet::new(points, names).expect("every color has l >= 1 points"))
}

fn draw_unused(rng: &mut ChaCha8Rng, used: &mut [bool]) -> usize {
    loop {
        let v = rng.random_range(0..used.len());
        if !used[v] {
            used[v] = true;
            return v;
        }
    }
}

/// Large feasible workload: `n` points at x = 0..n with shuffled heights,
/// grouped into colors whose spans form a laminar family. Every point of a
/// color lies outside the spans of the colors nested in it, so placing
/// inner colors first (the returned order) always succeeds.
pub fn generate_nested(n: usize, seed: u64) -> (ColoredPointSet, BusOrder) {
    assert!(n >= 2, "need at least two points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ys: Vec<i64> = (0..n as i64).collect();
    ys.shuffle(&mut rng);
    let mut stack: Vec<usize> = Vec::new();
    let mut colors = 0;
    let mut order = Vec::new();
    let mut points = Vec::with_capacity(n);
    for (t, &y) in ys.iter().enumerate() {
        let left = n - t;
        let open = stack.len();
        // Every open color still needs its closing point, and closing the
        // last open color must not strand a single point.
        let can_open = left >= open + 2;
        let can_add = open > 0 && left > open;
        let can_close = open > 0 && !(open == 1 && left == 2);
        let roll = rng.random_range(0..10u8);
        let color = if open == 0 || (can_open && roll < 4) {
            stack.push(colors);
            colors += 1;
            colors - 1
        } else if can_add && (roll < 6 || !can_close) {
            stack[open - 1]
        } else {
            let c = stack.pop().expect("non-empty stack");
            order.push(ColorId(c));
            c
        };
        points.push(Point { x: Coord::from_int(t as i64), y: Coord::from_int(y), color: ColorId(color) });
    }
    debug_assert!(stack.is_empty());
    let names = (0..colors).map(|c| format!("c{c}")).collect();
    (ColoredPointSet::new(points, names).expect("every color has two points"), BusOrder(order))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub points_per_color: Vec<usize>,
    pub trials: usize,
    pub area: Area,
    pub seed: u64,
    /// Cells with more colors than this are reported incomplete.
    pub solver_cap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k_min: 3,
            k_max: 20,
            points_per_color: vec![2, 3, 4],
            trials: 100,
            area: Area::default(),
            seed: 0,
            solver_cap: 12,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials < 1 {
            return Err(ExperimentError::Config("trials must be at least 1".into()));
        }
        if self.k_min < 3 || self.k_max < self.k_min {
            return Err(ExperimentError::Config("need 3 <= k_min <= k_max".into()));
        }
        if self.points_per_color.is_empty() || self.points_per_color.iter().any(|&l| l < 2) {
            return Err(ExperimentError::Config("points per color must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateCell {
    pub k: usize,
    pub l: usize,
    /// `None` when the cell exceeded the solver cap.
    pub feasible: Option<usize>,
    pub trials: usize,
}

impl RateCell {
    pub fn rate(&self) -> Option<f64> {
        self.feasible.map(|f| f as f64 / self.trials as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub seed: u64,
    pub cells: Vec<RateCell>,
}

impl RateTable {
    pub fn cell(&self, k: usize, l: usize) -> Option<&RateCell> {
        self.cells.iter().find(|c| c.k == k && c.l == l)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# prng: {PRNG_ID}\nk,l,feasible,trials,rate,seed\n");
        for c in &self.cells {
            let (feasible, rate) = match c.feasible {
                Some(f) => (f.to_string(), format!("{:.4}", f as f64 / c.trials as f64)),
                None => (String::new(), String::new()),
            };
            writeln!(out, "{},{},{},{},{},{}", c.k, c.l, feasible, c.trials, rate, self.seed).unwrap();
        }
        out
    }
}

/// Seed of one trial, mixed with SplitMix64 so neighbouring cells are
/// uncorrelated.
pub fn trial_seed(seed: u64, k: usize, l: usize, trial: usize) -> u64 {
    let mut z = seed ^ ((k as u64) << 48) ^ ((l as u64) << 40) ^ trial as u64;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RateTable, ExperimentError> {
    cfg.validate()?;
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for k in cfg.k_min..=cfg.k_max {
        for &l in &cfg.points_per_color {
            cells.push((k, l));
        }
    }
    let jobs: Vec<(usize, usize, usize)> = cells
        .iter()
        .filter(|&&(k, _)| k <= cfg.solver_cap)
        .flat_map(|&(k, l)| (0..cfg.trials).map(move |t| (k, l, t)))
        .collect();
    let verdicts: Vec<Result<bool, ExperimentError>> = jobs
        .par_iter()
        .map(|&(k, l, t)| {
            let inst = generate_random(k, l, trial_seed(cfg.seed, k, l, t), cfg.area)?;
            Ok(solve_bep(&inst, EpsilonPolicy::ZERO).feasible())
        })
        .collect();
    let mut counts = std::collections::HashMap::new();
    for (&(k, l, _), v) in jobs.iter().zip(verdicts) {
        *counts.entry((k, l)).or_insert(0usize) += v? as usize;
    }
    let cells = cells
        .into_iter()
        .map(|(k, l)| RateCell {
            k,
            l,
            feasible: (k <= cfg.solver_cap).then(|| counts.get(&(k, l)).copied().unwrap_or(0)),
            trials: cfg.trials,
        })
        .collect();
    Ok(RateTable { seed: cfg.seed, cells })
}

/// Spearman rank correlation, ties ranked by their average position.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &t in &idx[i..=j] {
            out[t] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}
