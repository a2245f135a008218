//! End-to-end acceptance checks. Runs sequentially (timings matter) and
//! prints one PASS/FAIL line per criterion; any failure fails the target.

use std::collections::HashSet;
use std::hint::black_box;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use busembed_core::diagonal::{is_pushall_word, materialize, replay, solve_diagonal, DiagonalOutcome, SortingWord};
use busembed_core::exact::enumerate_orders_with_rule;
use busembed_core::experiment::{
    generate_nested, generate_random, run_experiment, spearman_rho, Area, ExperimentConfig,
};
use busembed_core::gadget::{build_instance, decode_assignment, formula_family, Literal, PlanarFormulaLayout};
use busembed_core::halfbus::{build_clauses, enumerate_halfbus_oracle, solve_halfbep, table, HalfBusOutcome};
use busembed_core::ilp::{build_model, lp_summary, write_lp};
use busembed_core::order::PlacementRule;
use busembed_core::sweep::{solve_sqcap, SweepOutcome};
use busembed_core::twosat::{solve_2sat, Lit, TwoSatFormula, TwoSatResult};
use busembed_core::{
    conflicting_pairs, enumerate_orders_oracle, solve_bep, solve_with_order, validate_planarity, BusLayout, ColorId,
    ColoredPointSet, EpsilonPolicy,
};

const ZERO: EpsilonPolicy = EpsilonPolicy::ZERO;

/// Every layout produced in the suites goes through the validator.
#[derive(Default)]
struct Soundness {
    checked: usize,
    failures: Vec<String>,
}

impl Soundness {
    fn check(&mut self, what: &str, instance: &ColoredPointSet, layout: &BusLayout, eps: EpsilonPolicy) {
        self.checked += 1;
        match validate_planarity(instance, layout, eps) {
            Ok(v) if v.is_empty() => {}
            Ok(v) => self.failures.push(format!("{what}: {} violations", v.len())),
            Err(e) => self.failures.push(format!("{what}: {e}")),
        }
    }
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass_if(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let ok = out.ok && took <= budget;
    let verdict = if ok { "PASS" } else { "FAIL" };
    let limit = if budget == Duration::MAX { String::new() } else { format!(" of {budget:?}") };
    println!("criterion {id:>2} {verdict}  {name}: {} [{took:.2?}{limit}]", out.detail);
    ok
}

/// Best times of two workloads, alternating between them so drift in
/// machine load affects both alike.
fn best_of_pair<A, B>(rounds: usize, mut a: impl FnMut() -> A, mut b: impl FnMut() -> B) -> (Duration, Duration, B) {
    let (mut ta, mut tb) = (Duration::MAX, Duration::MAX);
    let mut last = None;
    for _ in 0..rounds {
        let t = Instant::now();
        black_box(a());
        ta = ta.min(t.elapsed());
        let t = Instant::now();
        let v = b();
        tb = tb.min(t.elapsed());
        last = Some(v);
    }
    (ta, tb, last.expect("at least one round"))
}

fn stack_word(sound: &mut Soundness) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_busembed"))
        .args(["diagonal", "--pi", "3,2,1,4"])
        .output()
        .expect("binary runs");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("diagonal prints JSON");
    let pi = [3, 2, 1, 4];
    let word: SortingWord = v["word"].as_str().unwrap_or_default().parse().expect("word parses");
    let sorted = replay(&word, &pi).ok() == Some(vec![1, 2, 3, 4]);
    let sortable = out.status.code() == Some(0) && v["sortable"] == true;
    if let Ok(DiagonalOutcome::Sortable { instance, layout, .. }) = solve_diagonal(&pi) {
        sound.check("diagonal 3214", &instance, &layout, ZERO);
    }
    let good: SortingWord = "a3 a2 a1 a4 b4 b1 g1 b2 g2 b3 g3 g4".parse().unwrap();
    let bad: SortingWord = "a3 a2 a1 b1 g1 a4 b4 b2 g2 b3 g3 g4".parse().unwrap();
    let seq = |w: &SortingWord| w.input_output_sequence().iter().map(|d| d.to_string()).collect::<String>();
    let accepted = is_pushall_word(&good, &pi) == Ok(true) && seq(&good) == "32141234";
    let rejected = is_pushall_word(&bad, &pi) == Ok(false) && seq(&bad) == "32114234";
    pass_if(
        sortable && sorted && accepted && rejected,
        format!("cli sortable={sortable}, replay sorts={sorted}, word accepted={accepted}, w' rejected={rejected}"),
    )
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k);
            out.push(q);
        }
    }
    out
}

fn diagonal_equivalence(sound: &mut Soundness) -> Outcome {
    let mut perms: Vec<Vec<usize>> = (1..=6).flat_map(all_permutations).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..200 {
        let mut p: Vec<usize> = (1..=7 + i % 2).collect();
        p.shuffle(&mut rng);
        perms.push(p);
    }
    let (mut agree, mut sortable) = (0, 0);
    for pi in &perms {
        let fast = solve_diagonal(pi).expect("valid permutation");
        let inst = materialize(pi).unwrap();
        let exact = solve_bep(&inst, ZERO);
        if let DiagonalOutcome::Sortable { instance, layout, .. } = &fast {
            sound.check("diagonal", instance, layout, ZERO);
            sortable += 1;
        }
        if let Some(l) = &exact.layout {
            sound.check("diagonal exact", &inst, l, ZERO);
        }
        agree += usize::from(fast.is_feasible() == exact.feasible());
    }
    pass_if(agree == perms.len(), format!("{agree}/{} agree, {sortable} sortable", perms.len()))
}

fn random_instance(rng: &mut ChaCha8Rng, max_k: usize, max_l: usize) -> ColoredPointSet {
    let k = rng.random_range(1..=max_k);
    let l = rng.random_range(1..=max_l);
    generate_random(k, l, rng.random(), Area::default()).unwrap()
}

fn table_vs_oracle(sound: &mut Soundness) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut agree, mut feasible) = (0, 0);
    for _ in 0..500 {
        let inst = random_instance(&mut rng, 6, 4);
        let fast = solve_bep(&inst, ZERO);
        let slow = enumerate_orders_oracle(&inst, ZERO, 8).unwrap();
        for v in [&fast, &slow] {
            if let Some(l) = &v.layout {
                sound.check("exact", &inst, l, ZERO);
            }
        }
        feasible += usize::from(fast.feasible());
        agree += usize::from(fast.feasible() == slow.feasible());
    }
    pass_if(agree == 500, format!("{agree}/500 agree, {feasible} feasible"))
}

fn sweep_completeness(sound: &mut Soundness) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut agree, mut feasible) = (0, 0);
    for _ in 0..300 {
        let inst = random_instance(&mut rng, 5, 4);
        let (sweep, _) = solve_sqcap(&inst);
        let brute = enumerate_orders_with_rule(&inst, ZERO, 8, PlacementRule::AboveOwnPoints).unwrap();
        if let SweepOutcome::Feasible(l) = &sweep {
            sound.check("sweep", &inst, l, ZERO);
        }
        feasible += usize::from(sweep.is_feasible());
        agree += usize::from(sweep.is_feasible() == brute.feasible());
    }
    let pattern = ColoredPointSet::from_int_triples(&[
        (4, 2, "R"),
        (2, 5, "R"),
        (7, 1, "G"),
        (1, 6, "G"),
        (0, 3, "B"),
        (6, 0, "B"),
        (3, 7, "W"),
        (5, 4, "W"),
    ]);
    let whole_blocked = !solve_sqcap(&pattern).0.is_feasible();
    let parts_ok = (0..4).all(|skip| {
        let keep: Vec<ColorId> = (0..4).filter(|&c| c != skip).map(ColorId).collect();
        let sub = pattern.restrict_colors(&keep);
        match solve_sqcap(&sub).0 {
            SweepOutcome::Feasible(l) => {
                sound.check("sweep pattern", &sub, &l, ZERO);
                true
            }
            SweepOutcome::Infeasible { .. } => false,
        }
    });
    pass_if(
        agree == 300 && whole_blocked && parts_ok,
        format!("{agree}/300 agree ({feasible} feasible); 4-color pattern blocked={whole_blocked}, 3-color parts feasible={parts_ok}"),
    )
}

fn solutions(f: &TwoSatFormula) -> Vec<[bool; 2]> {
    [[false, false], [false, true], [true, false], [true, true]].into_iter().filter(|a| f.evaluate(a)).collect()
}

fn halfbus(sound: &mut Soundness) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut agree, mut feasible) = (0, 0);
    for _ in 0..300 {
        let inst = random_instance(&mut rng, 10, 4);
        let fast = solve_halfbep(&inst);
        if let HalfBusOutcome::Feasible { layout, .. } = &fast {
            sound.check("halfbus", &inst, layout, ZERO);
        }
        feasible += usize::from(fast.is_feasible());
        agree += usize::from(fast.is_feasible() == enumerate_halfbus_oracle(&inst).is_some());
    }
    let mut cells = HashSet::new();
    let mut mismatches = 0;
    for seed in 0..4000 {
        let inst = generate_random(2, 2, seed, Area { width: 12, height: 12 }).unwrap();
        let Some((reference, found)) = table::pair_formula(&inst) else { continue };
        mismatches += usize::from(solutions(&reference) != solutions(&build_clauses(&inst)));
        cells.extend(found);
    }
    pass_if(
        agree == 300 && cells.len() == 16 && mismatches == 0,
        format!(
            "{agree}/300 agree ({feasible} feasible); {} of 16 table cells seen, {mismatches} clause mismatches",
            cells.len()
        ),
    )
}

fn two_sat() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut agree = 0;
    for _ in 0..200 {
        let vars = rng.random_range(1..=15usize);
        let mut f = TwoSatFormula::new(vars);
        for _ in 0..rng.random_range(0..=3 * vars) {
            let mut lit = || Lit { var: rng.random_range(0..vars), positive: rng.random() };
            let (a, b) = (lit(), lit());
            f.add_clause(a, b);
        }
        let brute = (0..1u32 << vars).any(|m| f.evaluate(&(0..vars).map(|i| m >> i & 1 == 1).collect::<Vec<_>>()));
        let ok = match solve_2sat(&f) {
            TwoSatResult::Satisfiable(a) => brute && f.evaluate(&a),
            TwoSatResult::Unsatisfiable { .. } => !brute,
        };
        agree += usize::from(ok);
    }
    let chain = |m: usize| {
        let vars = m / 2;
        let mut f = TwoSatFormula::new(vars);
        for i in 0..m {
            f.add_implication(Lit::pos(i % vars), Lit::pos((i * 7 + 1) % vars));
        }
        f
    };
    let (half, full) = (chain(500_000), chain(1_000_000));
    let (t1, t2, _) = best_of_pair(5, || solve_2sat(&half), || solve_2sat(&full));
    let ratio = t2.as_secs_f64() / t1.as_secs_f64();
    pass_if(
        agree == 200 && ratio <= 2.5,
        format!("{agree}/200 agree; 5e5 -> 1e6 clauses {t1:.2?} -> {t2:.2?}, ratio {ratio:.2}"),
    )
}

fn ilp_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut exact = 0;
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 8, 4);
        let (n, k, j) = (inst.n(), inst.k(), conflicting_pairs(&inst).len());
        let model = build_model(&inst);
        let read = lp_summary(&write_lp(&model)).expect("LP output parses");
        let ok = model.variable_count() == n + k + 2 * j
            && model.constraint_count() == 3 * n + k + 6 * j
            && read.variables == n + k + 2 * j
            && read.constraints() == 3 * n + k + 6 * j;
        exact += usize::from(ok);
    }
    pass_if(exact == 100, format!("{exact}/100 models with n+k+2|J| variables and 3n+k+6|J| constraints"))
}

fn lits(c: &[i64]) -> Vec<Literal> {
    c.iter().map(|&v| if v > 0 { Literal::pos(v as usize - 1) } else { Literal::neg((-v) as usize - 1) }).collect()
}

fn gadgets(sound: &mut Soundness) -> Outcome {
    let family = formula_family(4);
    let (mut agree, mut unsat, mut decoded) = (0, 0, 0);
    for layout in &family {
        let g = build_instance(layout);
        let verdict = solve_bep(&g.instance, g.epsilon);
        let sat = layout.satisfiable();
        unsat += usize::from(!sat);
        match &verdict.layout {
            Some(bus) => {
                sound.check("gadget", &g.instance, bus, g.epsilon);
                let ok = decode_assignment(&g.instance, &g.metadata(), bus).is_ok_and(|a| layout.satisfied_by(&a));
                decoded += usize::from(ok);
                agree += usize::from(sat && ok);
            }
            None => agree += usize::from(!sat),
        }
    }
    let example = PlanarFormulaLayout::alternating(4, vec![lits(&[1, -2, 3]), lits(&[2, -3, 4])]).unwrap();
    let g = build_instance(&example);
    let example_ok = match solve_bep(&g.instance, g.epsilon).layout {
        Some(bus) => {
            sound.check("gadget example", &g.instance, &bus, g.epsilon);
            decode_assignment(&g.instance, &g.metadata(), &bus).is_ok_and(|a| example.satisfied_by(&a))
        }
        None => false,
    };
    pass_if(
        agree == family.len() && example_ok,
        format!(
            "{agree}/{} formulas agree ({unsat} unsatisfiable, {decoded} decoded); example formula feasible and decoded={example_ok}",
            family.len()
        ),
    )
}

fn rate_trend() -> Outcome {
    let cfg = ExperimentConfig { k_min: 3, k_max: 12, trials: 100, seed: 9, ..ExperimentConfig::default() };
    let table = run_experiment(&cfg).expect("valid configuration");
    let rate = |k, l| table.cell(k, l).and_then(|c| c.rate()).expect("cell within the cap");
    let ks: Vec<f64> = (3..=12).map(|k| k as f64).collect();
    let rates: Vec<f64> = (3..=12).map(|k| rate(k, 2)).collect();
    let rho = spearman_rho(&ks, &rates);
    let n = ks.len() as f64;
    let p = if rho <= -1.0 {
        0.0
    } else {
        let t = rho * ((n - 2.0) / (1.0 - rho * rho)).sqrt();
        StudentsT::new(0.0, 1.0, n - 2.0).unwrap().cdf(t)
    };
    let ordered = (3..=12).filter(|&k| rate(k, 2) >= rate(k, 3) && rate(k, 3) >= rate(k, 4)).count();
    let row: Vec<String> = rates.iter().map(|r| format!("{r:.2}")).collect();
    pass_if(
        rho < 0.0 && p < 0.01 && ordered >= 9,
        format!(
            "l=2 rates [{}], spearman {rho:.3} (p {p:.1e}); l ordering holds in {ordered}/10 k cells",
            row.join(" ")
        ),
    )
}

fn performance(sound: &mut Soundness) -> Outcome {
    let (small, small_order) = generate_nested(100_000, 11);
    let (big, big_order) = generate_nested(200_000, 11);
    let (o1, o2, placed) = best_of_pair(
        5,
        || solve_with_order(&small, &small_order, ZERO).unwrap(),
        || solve_with_order(&big, &big_order, ZERO).unwrap(),
    );
    let (s1, s2, (swept, _)) = best_of_pair(5, || solve_sqcap(&small), || solve_sqcap(&big));
    let mut feasible = true;
    match (placed.layout(), swept.layout()) {
        (Some(a), Some(b)) => {
            sound.check("order 2e5", &big, a, ZERO);
            sound.check("sweep 2e5", &big, b, ZERO);
        }
        _ => feasible = false,
    }
    let limit = Duration::from_secs(2);
    let (ro, rs) = (o2.as_secs_f64() / o1.as_secs_f64(), s2.as_secs_f64() / s1.as_secs_f64());
    pass_if(
        feasible && o2 < limit && s2 < limit && ro <= 2.5 && rs <= 2.5,
        format!("n=2e5: order {o2:.2?} (ratio {ro:.2}), sweep {s2:.2?} (ratio {rs:.2}), k={}", big.k()),
    )
}

fn main() {
    let mut sound = Soundness::default();
    let mins = |m: u64| Duration::from_secs(60 * m);
    let results = [
        run(1, "diagonal word for 3,2,1,4", Duration::from_secs(1), || stack_word(&mut sound)),
        run(2, "diagonal solver equals exact solver", mins(5), || diagonal_equivalence(&mut sound)),
        run(3, "subset table equals order enumeration", mins(2), || table_vs_oracle(&mut sound)),
        run(4, "above-bus sweep is complete", mins(2), || sweep_completeness(&mut sound)),
        run(5, "half-bus solver and case table", mins(2), || halfbus(&mut sound)),
        run(6, "2-SAT engine", mins(2), two_sat),
        run(7, "ILP model size", Duration::from_secs(10), ilp_counts),
        run(8, "3-SAT gadgets are equisatisfiable", mins(10), || gadgets(&mut sound)),
        run(9, "feasibility rate falls with k and l", mins(30), rate_trend),
        run(11, "large instances", mins(2), || performance(&mut sound)),
    ];
    let sound_ok = run(10, "every emitted layout validates", Duration::MAX, || {
        let detail = match sound.failures.first() {
            None => format!("{} layouts, 0 with violations", sound.checked),
            Some(first) => format!("{} of {} layouts rejected, first: {first}", sound.failures.len(), sound.checked),
        };
        pass_if(sound.failures.is_empty() && sound.checked > 0, detail)
    });
    if !(sound_ok && results.iter().all(|&ok| ok)) {
        std::process::exit(1);
    }
}
