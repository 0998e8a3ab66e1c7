use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use rulelab_core::dataset::{build_with_workers, verify, DatasetSpec, Split};
use rulelab_core::engine::{step, PackedGrid, Stepper};
use rulelab_core::eval::{evaluate, score_prediction_file, EvalOptions, PerRule};
use rulelab_core::inference::{infer_from_sequences, infer_smallest_radius, InferError};
use rulelab_core::io::{
    self, read_predictions, read_split, render_pbm, write_cads, write_dataset, write_rules, CadsFile,
    PbmMode, PredictionFile,
};
use rulelab_core::rules::{max_count_for, sample_rules};
use rulelab_core::{simulate, Grid, Rule, RuleSet};

use crate::{
    BenchArgs, BuildDatasetArgs, Command, EngineKind, EvalArgs, GenRulesArgs, InferArgs, RenderArgs,
    SimulateArgs, WORKERS_ENV,
};

/// An error paired with the process exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

const USAGE: u8 = 1;
const DATA: u8 = 2;
const INCONSISTENT: u8 = 3;

type CmdResult<T = ()> = Result<T, Failure>;

trait ExitCodeExt<T> {
    fn code(self, code: u8) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> ExitCodeExt<T> for Result<T, E> {
    fn code(self, code: u8) -> CmdResult<T> {
        self.map_err(|e| Failure {
            code,
            error: e.into(),
        })
    }
}

fn fail<T>(code: u8, msg: impl Display) -> CmdResult<T> {
    Err(Failure {
        code,
        error: anyhow!("{msg}"),
    })
}

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::GenRules(a) => gen_rules(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::BuildDataset(a) => build_dataset(a),
        Command::Eval(a) => eval(a),
        Command::Infer(a) => infer(a),
        Command::Render(a) => render(a),
        Command::Bench(a) => bench(a),
    }
}

fn workers(flag: Option<usize>) -> CmdResult<usize> {
    if let Some(n) = flag {
        if n == 0 {
            return fail(USAGE, "--workers must be at least 1");
        }
        return Ok(n);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => fail(USAGE, format!("{WORKERS_ENV}={v:?} is not a positive integer")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn pool(workers: usize) -> CmdResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .code(DATA)
}

fn write_text(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .code(DATA)
}

fn gen_rules(a: GenRulesArgs) -> CmdResult {
    let radius = (a.neighborhood - 1) / 2;
    let set = sample_rules(a.count, radius, a.seed).code(USAGE)?;
    let set = RuleSet::new(
        format!("generated n={} seed={}", a.neighborhood, a.seed),
        set.rules,
    );
    match a.out {
        Some(path) => {
            write_rules(&path, &set).code(DATA)?;
            println!("wrote {} rules to {}", set.len(), path.display());
        }
        None => print!("{}", io::format_rules(&set)),
    }
    Ok(())
}

fn parse_rule_flag(text: &str) -> CmdResult<Rule> {
    let rule: Rule = text.parse().code(USAGE)?;
    if rule.is_trivial() {
        eprintln!(
            "warning: {} has empty born and stay sets; every cell dies",
            rule.notation()
        );
    }
    Ok(rule)
}

fn simulate_cmd(a: SimulateArgs) -> CmdResult {
    if a.width == 0 || a.height == 0 {
        return fail(USAGE, "--width and --height must be positive");
    }
    let rule = parse_rule_flag(&a.rule)?;
    let initial = Grid::random(a.height, a.width, a.density, a.seed);
    let trajectory = simulate(&rule, &initial, a.steps as usize, a.boundary);
    let file = CadsFile::from_trajectory(&trajectory).code(DATA)?;
    write_cads(&a.out, &file).code(DATA)?;

    println!("rule {}", rule.notation());
    println!("boundary {}", a.boundary);
    println!("step  live");
    for (t, state) in trajectory.states.iter().enumerate() {
        println!("{t:>4}  {}", state.live_count());
    }
    Ok(())
}

fn build_dataset(a: BuildDatasetArgs) -> CmdResult {
    let mut spec = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .code(DATA)?;
            DatasetSpec::from_config_str(&text)
                .with_context(|| path.display().to_string())
                .code(DATA)?
        }
        None => DatasetSpec::default(),
    };
    if let Some(level) = a.level {
        spec.level = level;
    }
    spec.validate().code(USAGE)?;
    let rule_seed = a.rule_seed.unwrap_or(spec.master_seed);
    let config_seed = a.config_seed.unwrap_or(spec.master_seed);
    let n = workers(a.workers)?;

    let (dataset, stats) = build_with_workers(&spec, rule_seed, config_seed, n).code(DATA)?;
    let report = pool(n)?.install(|| verify(&dataset));
    write_dataset(&a.out, &dataset).code(DATA)?;

    println!("level {}", spec.level);
    println!("rule seed {rule_seed}, config seed {config_seed}");
    println!(
        "rules: {} train, {} test",
        dataset.train_rules.len(),
        dataset.test_rules.len()
    );
    for split in Split::ALL {
        println!("{split:<5} {} samples", dataset.samples(split).len());
    }
    println!(
        "uniform by t=k: {} of {} trajectories ({:.2}%)",
        stats.uniform_by_k,
        stats.trajectories,
        100.0 * stats.uniform_fraction()
    );
    println!("{report}");
    if !report.is_ok() {
        return fail(DATA, "dataset verification failed");
    }
    println!("wrote {}", a.out.display());
    Ok(())
}

fn eval(a: EvalArgs) -> CmdResult {
    let file = read_split(&a.dataset, a.split).code(DATA)?;
    let rules = file.rule_set(a.split.as_str());
    let samples = &file.samples;
    let options = EvalOptions {
        baselines: true,
        error_maps: a.error_maps.is_some(),
    };
    let n = workers(a.workers)?;

    let report = pool(n)?
        .install(|| -> anyhow::Result<_> {
            match (&a.predictor, &a.predictions) {
                (Some(kind), _) => {
                    let live = live_fraction(samples.iter().map(|s| &s.target));
                    let source = PerRule::new(*kind, &rules, file.boundary, live);
                    Ok(evaluate(&source, samples, &rules, options)?)
                }
                (None, Some(path)) => {
                    let predictions = read_predictions(path)?;
                    Ok(score_prediction_file(&predictions, samples, &rules, options)?)
                }
                (None, None) => unreachable!("clap requires one of --predictor/--predictions"),
            }
        })
        .code(DATA)?;

    print!("{}", report.to_table(a.per_rule, Some(&rules)));

    if let Some(dir) = &a.error_maps {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .code(DATA)?;
        for (i, map) in report.error_maps.iter().flatten().enumerate() {
            render_pbm(map, &dir.join(format!("{i:06}.pbm")), PbmMode::Binary).code(DATA)?;
        }
    }
    if let Some(path) = &a.report {
        let text = if path.extension().is_some_and(|e| e == "csv") {
            report.to_csv(Some(&rules))
        } else {
            report.to_key_values(a.per_rule)
        };
        write_text(path, &text)?;
    }
    Ok(())
}

fn live_fraction<'a>(grids: impl Iterator<Item = &'a Grid>) -> f64 {
    let (live, total) = grids.fold((0usize, 0usize), |(l, t), g| (l + g.live_count(), t + g.len()));
    if total == 0 {
        0.0
    } else {
        live as f64 / total as f64
    }
}

fn infer(a: InferArgs) -> CmdResult {
    let file = io::read_cads(&a.trajectory).code(DATA)?;
    let sequences = file.sequences();
    let slices: Vec<&[Grid]> = sequences.iter().map(Vec::as_slice).collect();
    let result = if a.auto_radius {
        infer_smallest_radius(&slices, a.radius, file.boundary)
    } else {
        infer_from_sequences(slices.iter().copied(), a.radius, file.boundary)
    };
    let (rule, report) = match result {
        Ok(found) => found,
        Err(
            e @ (InferError::Inconsistent { .. }
            | InferError::SpontaneousBirth
            | InferError::NoConsistentRadius { .. }),
        ) => return fail(INCONSISTENT, e),
        Err(e) => return fail(DATA, e),
    };

    println!("{}", rule.notation());
    println!("{report}");
    if let Some(path) = &a.out {
        let set = RuleSet::new(format!("inferred from {}", a.trajectory.display()), vec![rule]);
        write_rules(path, &set).code(DATA)?;
    }
    Ok(())
}

fn render(a: RenderArgs) -> CmdResult {
    let bytes = fs::read(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))
        .code(DATA)?;
    let grid = if bytes.starts_with(b"CAPR") {
        let file = PredictionFile::decode(&bytes).code(DATA)?;
        let mut grids = file.to_grids();
        if a.frame >= grids.len() {
            return fail(
                DATA,
                format!("frame {} out of range; file has {}", a.frame, grids.len()),
            );
        }
        grids.swap_remove(a.frame)
    } else {
        let file = CadsFile::decode(&bytes).code(DATA)?;
        let Some(sample) = file.samples.get(a.sample) else {
            return fail(
                DATA,
                format!(
                    "sample {} out of range; file has {}",
                    a.sample,
                    file.samples.len()
                ),
            );
        };
        let Some(frame) = sample.frames().nth(a.frame) else {
            return fail(
                DATA,
                format!("frame {} out of range; samples have {}", a.frame, file.k + 1),
            );
        };
        frame.clone()
    };
    let mode = if a.ascii { PbmMode::Ascii } else { PbmMode::Binary };
    render_pbm(&grid, &a.out, mode).code(DATA)?;
    println!(
        "wrote {}x{} frame ({} live) to {}",
        grid.height(),
        grid.width(),
        grid.live_count(),
        a.out.display()
    );
    Ok(())
}

fn bench(a: BenchArgs) -> CmdResult {
    let (h, w) = a.size;
    let rule = if a.radius == 1 {
        Rule::game_of_life()
    } else {
        sample_rules(1, a.radius, a.seed).code(USAGE)?.rules.remove(0)
    };
    let initial = Grid::random(h, w, 0.5, a.seed);

    let run_once = || -> (Duration, usize) {
        let start = Instant::now();
        let live = match a.engine {
            EngineKind::Naive => {
                let mut g = initial.clone();
                for _ in 0..a.steps {
                    g = step(&rule, &g, a.boundary);
                }
                g.live_count()
            }
            EngineKind::Packed => {
                let stepper = Stepper::new(&rule, a.boundary);
                let mut g = PackedGrid::from_grid(&initial);
                for _ in 0..a.steps {
                    g = stepper.step(&g);
                }
                g.live_count()
            }
        };
        (start.elapsed(), live)
    };

    let (_, warm_live) = run_once();
    let mut samples = Vec::with_capacity(a.reps as usize);
    for _ in 0..a.reps {
        let (elapsed, live) = run_once();
        assert_eq!(live, warm_live, "stepping is deterministic");
        samples.push(elapsed.as_secs_f64());
    }
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let updates = (h * w * a.steps) as f64;
    let engine = match a.engine {
        EngineKind::Naive => "naive",
        EngineKind::Packed => "packed",
    };

    println!(
        "rule      {} (max count {})",
        rule.notation(),
        max_count_for(a.radius)
    );
    println!(
        "{:<8} {:>6} {:>11} {:>6} {:>12} {:>16}",
        "engine", "radius", "size", "steps", "median_s", "cell_updates/s"
    );
    println!(
        "{:<8} {:>6} {:>11} {:>6} {:>12.6} {:>16.4e}",
        engine,
        a.radius,
        format!("{h}x{w}"),
        a.steps,
        median,
        if median > 0.0 {
            updates / median
        } else {
            f64::INFINITY
        }
    );
    let raw: Vec<String> = samples.iter().map(|s| format!("{s:.6}")).collect();
    println!("samples_s {}", raw.join(" "));
    Ok(())
}
