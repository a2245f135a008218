use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use busembed_core::diagonal::{replay, solve_diagonal, DiagonalOutcome, WordError};
use busembed_core::exact::{ExactError, InkError, DEFAULT_ORACLE_CAP};
use busembed_core::experiment::{run_experiment, Area, ExperimentConfig, ExperimentError};
use busembed_core::gadget::{build_instance_with, decode_assignment, BuildOptions, GadgetError, PlanarFormulaLayout};
use busembed_core::halfbus::{build_clauses, solve_halfbep, HalfBusOutcome};
use busembed_core::ilp::{build_model, write_lp};
use busembed_core::io::layout_to_value;
use busembed_core::order::{BusOrder, OrderError, OrderOutcome};
use busembed_core::svg::{render_svg, SvgOptions};
use busembed_core::sweep::{solve_sqcap, solve_sqcup, SweepOutcome};
use busembed_core::{
    enumerate_orders_oracle, minimize_ink, solve_bep, solve_with_order, validate_planarity, BepVerdict, BusLayout,
    ColoredPointSet, Coord, EpsilonPolicy, InstanceFile, IoError, ModelError, Violation,
};

#[derive(Parser)]
#[command(name = "busembed", version, about = "Bus embeddings of colored point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    /// Any bus type (exact solver).
    Exact,
    /// Every bus above its points.
    Sqcap,
    /// Every bus below its points.
    Sqcup,
    /// Every bus through its topmost or bottommost point.
    Halfbus,
}

#[derive(Subcommand)]
enum Command {
    /// Decide feasibility and print a layout
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Overrides the separation stored in the instance
        #[arg(long)]
        epsilon: Option<Coord>,
        #[arg(long, value_enum, default_value = "exact")]
        variant: Variant,
        /// Lower the total ink of the found order
        #[arg(long)]
        minimize_ink: bool,
        /// Use plain order enumeration instead of the subset table
        #[arg(long)]
        oracle: bool,
        /// Color limit for --oracle
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
        /// Write the half-bus clauses in DIMACS format
        #[arg(long)]
        dump_cnf: Option<PathBuf>,
    },
    /// Place buses bottom to top in a given order
    SolveOrder {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated color names, lowest bus first
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<String>,
        #[arg(long)]
        epsilon: Option<Coord>,
    },
    /// Sort a permutation with a push-all stack and build the diagonal layout
    Diagonal {
        #[arg(long, value_delimiter = ',', required = true)]
        pi: Vec<usize>,
        /// Print only the sorting word
        #[arg(long)]
        emit_word: bool,
        #[arg(long)]
        emit_svg: Option<PathBuf>,
    },
    /// Write the mixed integer program in LP format
    ExportIlp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a bus embedding instance from a planar 3-CNF formula
    Gadget {
        /// Formula in DIMACS CNF
        #[arg(long)]
        cnf: PathBuf,
        /// JSON sidecar: {"variable_order": [...], "sides": ["top", ...]}
        #[arg(long)]
        layout: PathBuf,
        /// Move one main point per clause up so the main bus must be a center bus
        #[arg(long)]
        center_main: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Solve the instance and print the decoded assignment
        #[arg(long)]
        check: bool,
    },
    /// Feasibility rates of random instances
    Experiment {
        #[arg(long, default_value_t = 3)]
        k_min: usize,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
        /// Points per color
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        l: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, env = "BUSEMBED_SEED", default_value_t = 0)]
        seed: u64,
        /// Cells with more colors are reported incomplete
        #[arg(long, default_value_t = 12)]
        solver_cap: usize,
        #[arg(long, default_value_t = 1024)]
        width: u32,
        #[arg(long, default_value_t = 768)]
        height: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw an instance and layout as SVG
    Render {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Draw violations in the class colors
        #[arg(long)]
        no_highlight: bool,
    },
    /// Check a layout for crossings
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        epsilon: Option<Coord>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: IoError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Ink(#[from] InkError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{0}")]
    Usage(String),
}

/// Feasible runs exit 0, infeasible ones 1.
enum Verdict {
    Yes,
    No,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write { path: path.to_owned(), source })
}

fn load(path: &Path, epsilon: Option<Coord>) -> Result<InstanceFile, CliError> {
    let mut file =
        InstanceFile::from_json(&read(path)?).map_err(|source| CliError::Input { path: path.to_owned(), source })?;
    if let Some(e) = epsilon {
        file.epsilon = EpsilonPolicy::new(e)?;
    }
    Ok(file)
}

fn load_layout(path: &Path, instance: &ColoredPointSet) -> Result<BusLayout, CliError> {
    busembed_core::io::layout_from_json(instance, &read(path)?)
        .map_err(|source| CliError::Input { path: path.to_owned(), source })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON value serializes"));
}

fn names(instance: &ColoredPointSet, order: &BusOrder) -> Vec<String> {
    order.0.iter().map(|&c| instance.color_name(c).to_string()).collect()
}

fn with_layout(instance: &ColoredPointSet, layout: &BusLayout, extra: Value) -> Value {
    let mut v = layout_to_value(instance, layout);
    v["feasible"] = json!(true);
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn violation_json(instance: &ColoredPointSet, v: &Violation) -> Value {
    let name = |c| instance.color_name(c);
    match *v {
        Violation::ConnectionCrossing { point, bus } => {
            json!({"kind": "connection-crossing", "point": point, "bus": name(bus)})
        }
        Violation::PointOnBus { point, bus } => json!({"kind": "point-on-bus", "point": point, "bus": name(bus)}),
        Violation::BusOverlap { a, b } => json!({"kind": "bus-overlap", "buses": [name(a), name(b)]}),
        Violation::TooClose { point, bus } => json!({"kind": "too-close", "point": point, "bus": name(bus)}),
        Violation::ConnectionOverlap { a, b } => json!({"kind": "connection-overlap", "points": [a, b]}),
    }
}

fn solve_exact(file: &InstanceFile, ink: bool, oracle: bool, cap: usize) -> Result<Verdict, CliError> {
    let inst = &file.instance;
    let verdict: BepVerdict =
        if oracle { enumerate_orders_oracle(inst, file.epsilon, cap)? } else { solve_bep(inst, file.epsilon) };
    let stats = json!({
        "backend": verdict.stats.backend,
        "states_visited": verdict.stats.states_visited,
        "order": verdict.order.as_ref().map(|o| names(inst, o)),
    });
    match (verdict.layout, verdict.order) {
        (Some(layout), Some(order)) => {
            let layout = if ink { minimize_ink(inst, &order, file.epsilon)? } else { layout };
            print_json(&with_layout(inst, &layout, json!({"stats": stats})));
            Ok(Verdict::Yes)
        }
        _ => {
            print_json(&json!({"feasible": false, "stats": stats}));
            Ok(Verdict::No)
        }
    }
}

fn run(cli: Cli) -> Result<Verdict, CliError> {
    match cli.command {
        Command::Solve { instance, epsilon, variant, minimize_ink, oracle, cap, dump_cnf } => {
            let file = load(&instance, epsilon)?;
            let inst = &file.instance;
            if variant != Variant::Exact && !file.epsilon.is_zero() {
                return Err(CliError::Usage("restricted variants support only epsilon = 0".into()));
            }
            if dump_cnf.is_some() && variant != Variant::Halfbus {
                return Err(CliError::Usage("--dump-cnf needs --variant halfbus".into()));
            }
            match variant {
                Variant::Exact => solve_exact(&file, minimize_ink, oracle, cap),
                Variant::Sqcap | Variant::Sqcup => {
                    let (outcome, stats) =
                        if variant == Variant::Sqcap { solve_sqcap(inst) } else { solve_sqcup(inst) };
                    let stats = json!({"insertions": stats.insertions, "removals": stats.removals});
                    match outcome {
                        SweepOutcome::Feasible(layout) => {
                            print_json(&with_layout(inst, &layout, json!({"stats": stats})));
                            Ok(Verdict::Yes)
                        }
                        SweepOutcome::Infeasible { residue } => {
                            let residue: Vec<&str> = residue.iter().map(|&c| inst.color_name(c)).collect();
                            print_json(&json!({"feasible": false, "residue": residue, "stats": stats}));
                            Ok(Verdict::No)
                        }
                    }
                }
                Variant::Halfbus => {
                    if let Some(path) = dump_cnf {
                        write(&path, &build_clauses(inst).to_dimacs())?;
                    }
                    match solve_halfbep(inst) {
                        HalfBusOutcome::Feasible { layout, assignment } => {
                            let tops: Vec<&str> =
                                inst.colors().filter(|c| assignment[c.0]).map(|c| inst.color_name(c)).collect();
                            print_json(&with_layout(inst, &layout, json!({"top": tops})));
                            Ok(Verdict::Yes)
                        }
                        HalfBusOutcome::Infeasible { color } => {
                            print_json(&json!({"feasible": false, "conflict": inst.color_name(color)}));
                            Ok(Verdict::No)
                        }
                    }
                }
            }
        }
        Command::SolveOrder { instance, order, epsilon } => {
            let file = load(&instance, epsilon)?;
            let inst = &file.instance;
            let refs: Vec<&str> = order.iter().map(String::as_str).collect();
            let order = BusOrder::from_names(inst, &refs)?;
            match solve_with_order(inst, &order, file.epsilon)? {
                OrderOutcome::Feasible(layout) => {
                    print_json(&with_layout(inst, &layout, json!({})));
                    Ok(Verdict::Yes)
                }
                OrderOutcome::Infeasible(w) => {
                    let p = &inst.points()[w.point];
                    print_json(&json!({
                        "feasible": false,
                        "witness": {
                            "point": w.point,
                            "x": p.x,
                            "y": p.y,
                            "point_color": inst.color_name(p.color),
                            "bus": inst.color_name(w.color),
                            "blocking": inst.color_name(w.blocking),
                        }
                    }));
                    Ok(Verdict::No)
                }
            }
        }
        Command::Diagonal { pi, emit_word, emit_svg } => match solve_diagonal(&pi)? {
            DiagonalOutcome::Sortable { word, instance, layout } => {
                if let Some(path) = emit_svg {
                    let options = SvgOptions { scale: 40.0, ..SvgOptions::default() };
                    write(&path, &render_svg(&instance, &layout, &options))?;
                }
                if emit_word {
                    println!("{word}");
                } else {
                    print_json(&with_layout(
                        &instance,
                        &layout,
                        json!({"pi": pi, "sortable": true, "word": word.to_string(), "output": replay(&word, &pi)?}),
                    ));
                }
                Ok(Verdict::Yes)
            }
            DiagonalOutcome::Unsortable => {
                if !emit_word {
                    print_json(&json!({"pi": pi, "sortable": false, "feasible": false}));
                }
                Ok(Verdict::No)
            }
        },
        Command::ExportIlp { instance, out } => {
            let file = load(&instance, None)?;
            let model = build_model(&file.instance);
            emit(out.as_deref(), &write_lp(&model))?;
            eprintln!("{} variables, {} constraints", model.variable_count(), model.constraint_count());
            Ok(Verdict::Yes)
        }
        Command::Gadget { cnf, layout, center_main, out, check } => {
            let formula = PlanarFormulaLayout::from_dimacs(&read(&cnf)?, &read(&layout)?)?;
            let g = build_instance_with(&formula, BuildOptions { center_main });
            let mut file = InstanceFile::new(g.instance.clone(), g.epsilon);
            file.metadata = Some(g.metadata());
            let mut text = file.to_json();
            text.push('\n');
            emit(out.as_deref(), &text)?;
            if !check {
                return Ok(Verdict::Yes);
            }
            match solve_bep(&g.instance, g.epsilon).layout {
                Some(bus) => {
                    let values = decode_assignment(&g.instance, &g.metadata(), &bus)?;
                    let assignment: Vec<i64> = values
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| if v { i as i64 + 1 } else { -(i as i64 + 1) })
                        .collect();
                    eprintln!("feasible; assignment {assignment:?}");
                    Ok(Verdict::Yes)
                }
                None => {
                    eprintln!("infeasible");
                    Ok(Verdict::No)
                }
            }
        }
        Command::Experiment { k_min, k_max, l, trials, seed, solver_cap, width, height, out } => {
            let cfg = ExperimentConfig {
                k_min,
                k_max,
                points_per_color: l,
                trials,
                area: Area { width, height },
                seed,
                solver_cap,
            };
            let table = run_experiment(&cfg)?;
            emit(out.as_deref(), &table.to_csv())?;
            Ok(Verdict::Yes)
        }
        Command::Render { instance, layout, out, scale, no_highlight } => {
            let file = load(&instance, None)?;
            let bus = load_layout(&layout, &file.instance)?;
            let options = SvgOptions {
                scale,
                epsilon: file.epsilon,
                highlight_violations: !no_highlight,
                ..SvgOptions::default()
            };
            emit(out.as_deref(), &render_svg(&file.instance, &bus, &options))?;
            Ok(Verdict::Yes)
        }
        Command::Validate { instance, layout, epsilon } => {
            let file = load(&instance, epsilon)?;
            let bus = load_layout(&layout, &file.instance)?;
            let report = validate_planarity(&file.instance, &bus, file.epsilon)?;
            let list: Vec<Value> = report.iter().map(|v| violation_json(&file.instance, v)).collect();
            print_json(&json!({"planar": report.is_empty(), "violations": list}));
            Ok(if report.is_empty() { Verdict::Yes } else { Verdict::No })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Yes) => ExitCode::SUCCESS,
        Ok(Verdict::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
