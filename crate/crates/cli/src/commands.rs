use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use econ_entropy::ca::{evolve_1d, rule_table, Boundary1D, Boundary2D, Row1D};
use econ_entropy::consumer::{run_consumer, ConsumerConfig};
use econ_entropy::exchange::{run_exchange, ExchangeConfig, InitialCondition, TraceSchedule};
use econ_entropy::macro_entropy::analyze_series;
use econ_entropy::{render, rng, schelling};
use rand::Rng;
use rayon::prelude::*;

use crate::manifest::RunManifest;
use crate::output::write_atomic;
use crate::{
    ingest, Boundary1, Boundary2, Ca1dArgs, Cli, CliError, Command, ConsumerArgs, ExchangeArgs,
    MacroArgs, SchellingArgs, SeedPattern, SweepArgs,
};

const MANIFEST_FILE: &str = "manifest.toml";

type Params = BTreeMap<String, String>;

fn params<const N: usize>(pairs: [(&str, String); N]) -> Params {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

fn enum_name(v: impl ValueEnum) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_owned()
}

fn absolute(path: &Path) -> Result<PathBuf, CliError> {
    std::path::absolute(path).map_err(|e| CliError::io(path, e))
}

/// Write `files` into `dir`, then the manifest listing them.
fn emit(
    dir: &Path,
    manifest_name: &str,
    mut manifest: RunManifest,
    files: Vec<(String, Vec<u8>)>,
) -> Result<(), CliError> {
    for (name, bytes) in &files {
        let path = dir.join(name);
        write_atomic(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    }
    manifest.outputs = files.into_iter().map(|(name, _)| name).collect();
    let path = dir.join(manifest_name);
    write_atomic(&path, manifest.to_toml().as_bytes()).map_err(|e| CliError::io(&path, e))
}

fn new_manifest(
    subcommand: &str,
    seed: Option<u64>,
    output: &Path,
    params: Params,
) -> Result<RunManifest, CliError> {
    Ok(RunManifest {
        subcommand: subcommand.to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        seed,
        output: absolute(output)?,
        outputs: Vec::new(),
        params,
    })
}

fn resolve_seed(seed: Option<u64>, out: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::rng().random::<u64>();
        let _ = writeln!(out, "seed: {s}");
        s
    })
}

pub(crate) fn run(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Macro(a) => run_macro(&a, out),
        Command::Ca1d(a) => run_ca1d(&a, out),
        Command::Schelling(a) => {
            let seed = resolve_seed(a.seed, out);
            sweep(&a.sweep, seed, &a.out_dir, out, |s, d| {
                schelling_job(&a, s, d)
            })
        }
        Command::Exchange(a) => {
            let seed = resolve_seed(a.seed, out);
            sweep(&a.sweep, seed, &a.out_dir, out, |s, d| {
                exchange_job(&a, s, d)
            })
        }
        Command::Consumer(a) => {
            let seed = resolve_seed(a.seed, out);
            sweep(&a.sweep, seed, &a.out_dir, out, |s, d| {
                consumer_job(&a, s, d)
            })
        }
    }
}

pub(crate) fn replay(
    path: &Path,
    dir: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let manifest = RunManifest::from_toml(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if manifest.version != env!("CARGO_PKG_VERSION") {
        let _ = writeln!(
            err,
            "warning: manifest was written by version {}, replaying with {}",
            manifest.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let argv = std::iter::once("econ-entropy".to_owned()).chain(manifest.to_argv(dir));
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| CliError::Data(format!("{}: unusable manifest: {e}", path.display())))?;
    let command = cli.command.ok_or_else(|| {
        CliError::Data(format!("{}: manifest names no subcommand", path.display()))
    })?;
    run(command, out)
}

/// Run `job` once, or once per replica seed into `seed-<s>` subdirectories.
fn sweep<F>(
    sweep: &SweepArgs,
    seed: u64,
    out_dir: &Path,
    out: &mut dyn Write,
    job: F,
) -> Result<(), CliError>
where
    F: Fn(u64, &Path) -> Result<Vec<String>, CliError> + Sync,
{
    let results = if sweep.replicas == 1 {
        vec![job(seed, out_dir)]
    } else {
        let seeds: Vec<u64> = (0..sweep.replicas).map(|k| seed.wrapping_add(k)).collect();
        let run_all = || {
            seeds
                .par_iter()
                .map(|&s| job(s, &out_dir.join(format!("seed-{s}"))))
                .collect::<Vec<_>>()
        };
        match sweep.jobs {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n as usize)
                .build()
                .map_err(CliError::usage)?
                .install(run_all),
            None => run_all(),
        }
    };
    for lines in results {
        for line in lines? {
            let _ = writeln!(out, "{line}");
        }
    }
    Ok(())
}

fn run_macro(a: &MacroArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let series = ingest::parse_macro_csv(&a.input)?;
    let reports = analyze_series(&series).map_err(|e| CliError::Data(e.to_string()))?;
    let input = absolute(&a.input)?;
    let manifest = new_manifest(
        "macro",
        None,
        &a.output,
        params([("input", input.display().to_string())]),
    )?;
    let name = a
        .output
        .file_name()
        .ok_or_else(|| {
            CliError::Usage(format!(
                "--output {} is not a file path",
                a.output.display()
            ))
        })?
        .to_string_lossy()
        .into_owned();
    let stem = a.output.file_stem().unwrap_or_default().to_string_lossy();
    let dir = a.output.parent().unwrap_or(Path::new(""));
    emit(
        dir,
        &format!("{stem}.manifest.toml"),
        manifest,
        vec![(name, ingest::report_csv(&reports).into_bytes())],
    )?;
    let _ = writeln!(out, "{} periods -> {}", reports.len(), a.output.display());
    Ok(())
}

fn run_ca1d(a: &Ca1dArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let rule = rule_table(a.rule).map_err(CliError::usage)?;
    let boundary = match a.boundary {
        Boundary1::Toroidal => Boundary1D::Toroidal,
        Boundary1::FixedZero => Boundary1D::FixedZero,
    };
    let (row, seed) = match a.seed_pattern {
        SeedPattern::Single => (Row1D::single_seed(a.width, boundary), None),
        SeedPattern::Random => {
            let seed = resolve_seed(a.seed, out);
            let mut r = rng::stream(seed, rng::STREAM_PLACEMENT);
            let cells = (0..a.width).map(|_| r.random::<bool>()).collect();
            (Row1D::new(cells, boundary), Some(seed))
        }
    };
    let rows = evolve_1d(&row.map_err(CliError::usage)?, &rule, a.steps);
    let manifest = new_manifest(
        "ca1d",
        seed,
        &a.out_dir,
        params([
            ("rule", a.rule.to_string()),
            ("width", a.width.to_string()),
            ("steps", a.steps.to_string()),
            ("seed-pattern", enum_name(a.seed_pattern)),
            ("boundary", enum_name(a.boundary)),
        ]),
    )?;
    let stem = format!("rule{}", a.rule);
    emit(
        &a.out_dir,
        MANIFEST_FILE,
        manifest,
        vec![
            (
                format!("{stem}.txt"),
                render::spacetime_text(&rows).into_bytes(),
            ),
            (format!("{stem}.pgm"), render::spacetime_pgm(&rows)),
        ],
    )?;
    let _ = writeln!(
        out,
        "rule {} x {} rows -> {}",
        a.rule,
        rows.len(),
        a.out_dir.display()
    );
    Ok(())
}

fn boundary_2d(b: Boundary2) -> Boundary2D {
    match b {
        Boundary2::Toroidal => Boundary2D::Toroidal,
        Boundary2::Bounded => Boundary2D::Bounded,
    }
}

fn schelling_job(a: &SchellingArgs, seed: u64, dir: &Path) -> Result<Vec<String>, CliError> {
    let config = schelling::SchellingConfig {
        width: a.width,
        height: a.height,
        radius: a.radius,
        tolerance: a.tolerance,
        density: a.density,
        type_split: a.split,
        seed,
        max_sweeps: a.max_sweeps,
        boundary: boundary_2d(a.boundary),
    };
    config.validate().map_err(CliError::usage)?;
    let mut snapshots = Vec::new();
    let run = schelling::run_observed(&config, |s| {
        if s.step() == 0 || (a.snapshot_every > 0 && s.step() % a.snapshot_every == 0) {
            snapshots.push((s.step(), s.grid().clone()));
        }
    })
    .map_err(CliError::usage)?;
    let last = run.final_state.step();
    if snapshots.last().map(|s| s.0) != Some(last) {
        snapshots.push((last, run.final_state.grid().clone()));
    }

    let mut trace = String::from("step,unsatisfied,entropy\n");
    for s in &run.samples {
        trace.push_str(&format!("{},{},{}\n", s.step, s.unsatisfied, s.entropy));
    }
    let mut files = vec![("trace.csv".to_owned(), trace.into_bytes())];
    for (step, grid) in &snapshots {
        files.push((
            format!("snapshot-{step:05}.txt"),
            render::grid_text(grid).into_bytes(),
        ));
        files.push((format!("snapshot-{step:05}.pgm"), render::grid_pgm(grid)));
    }
    let manifest = new_manifest(
        "schelling",
        Some(seed),
        dir,
        params([
            ("width", a.width.to_string()),
            ("height", a.height.to_string()),
            ("density", a.density.to_string()),
            ("split", a.split.to_string()),
            ("tolerance", a.tolerance.to_string()),
            ("radius", a.radius.to_string()),
            ("max-sweeps", a.max_sweeps.to_string()),
            ("snapshot-every", a.snapshot_every.to_string()),
            ("boundary", enum_name(a.boundary)),
        ]),
    )?;
    emit(dir, MANIFEST_FILE, manifest, files)?;
    Ok(vec![format!(
        "seed {seed}: {} after {} sweeps, {} unsatisfied -> {}",
        if run.converged {
            "converged"
        } else {
            "stopped"
        },
        last,
        run.final_state.unsatisfied_count(),
        dir.display()
    )])
}

fn exchange_job(a: &ExchangeArgs, seed: u64, dir: &Path) -> Result<Vec<String>, CliError> {
    let config = ExchangeConfig {
        players: a.players,
        initial_money: a.initial,
        delta_m: a.delta_m,
        steps: a.steps,
        seed,
        bins: a.bins,
        schedule: a
            .trace_stride
            .map_or(TraceSchedule::Logarithmic, TraceSchedule::Stride),
        initial: if a.concentrated {
            InitialCondition::Concentrated
        } else {
            InitialCondition::Uniform
        },
    };
    config.validate().map_err(CliError::usage)?;
    let outcome = run_exchange(&config).map_err(|e| CliError::Data(e.to_string()))?;

    let mut histogram = String::from("bin_lo,bin_hi,count\n");
    for b in &outcome.histogram {
        histogram.push_str(&format!("{},{},{}\n", b.lo, b.hi, b.count));
    }
    let mut trace = String::from("step,entropy\n");
    for s in outcome.trace.samples() {
        trace.push_str(&format!("{},{}\n", s.step, s.entropy));
    }
    let f = &outcome.fit;
    let fit = format!(
        "T,beta,A,fit_error,log_slope,log_total_money\n{},{},{},{},{},{}\n",
        f.temperature,
        f.beta,
        f.amplitude,
        f.fit_error,
        f.log_slope.map(|s| s.to_string()).unwrap_or_default(),
        f.log_total_money
    );

    let mut p = params([
        ("players", a.players.to_string()),
        ("initial", a.initial.to_string()),
        ("delta-m", a.delta_m.to_string()),
        ("steps", a.steps.to_string()),
        ("bins", a.bins.to_string()),
        ("concentrated", a.concentrated.to_string()),
    ]);
    if let Some(stride) = a.trace_stride {
        p.insert("trace-stride".into(), stride.to_string());
    }
    let manifest = new_manifest("exchange", Some(seed), dir, p)?;
    emit(
        dir,
        MANIFEST_FILE,
        manifest,
        vec![
            ("histogram.csv".into(), histogram.into_bytes()),
            ("trace.csv".into(), trace.into_bytes()),
            ("fit.csv".into(), fit.into_bytes()),
        ],
    )?;
    let slope = f.log_slope.map_or("n/a".to_owned(), |s| format!("{s:.5}"));
    Ok(vec![format!(
        "seed {seed}: T = {}, log slope = {slope} (expected {:.5}), {} plays canceled -> {}",
        f.temperature,
        -f.beta,
        outcome.canceled,
        dir.display()
    )])
}

fn consumer_job(a: &ConsumerArgs, seed: u64, dir: &Path) -> Result<Vec<String>, CliError> {
    let config = ConsumerConfig {
        price_levels: a.price_levels,
        good_levels: a.good_levels,
        tolerance: a.tolerance,
        radius: a.radius,
        density: a.density,
        type_split: a.split,
        steps: a.steps,
        seed,
        initial_rent_cell: (a.rent_x, a.rent_y),
        gibbs_delta_m: a.gibbs_delta_m,
        gibbs_initial_money: a.gibbs_initial,
        lottery: !a.no_lottery,
        snapshot_steps: a.snapshot_steps.clone(),
        boundary: boundary_2d(a.boundary),
    };
    let run = run_consumer(&config).map_err(CliError::usage)?;

    let mut trace = String::from("step,satisfied,unsatisfied,entropy\n");
    for s in &run.samples {
        trace.push_str(&format!(
            "{},{},{},{}\n",
            s.step, s.satisfied, s.unsatisfied, s.entropy
        ));
    }
    let mut files = vec![("trace.csv".to_owned(), trace.into_bytes())];
    for (step, grid) in &run.snapshots {
        files.push((
            format!("snapshot-{step:04}.ppm"),
            render::grid_ppm(grid, |c| c.color()),
        ));
    }
    let steps_list: Vec<String> = a.snapshot_steps.iter().map(u64::to_string).collect();
    let manifest = new_manifest(
        "consumer",
        Some(seed),
        dir,
        params([
            ("price-levels", a.price_levels.to_string()),
            ("good-levels", a.good_levels.to_string()),
            ("tolerance", a.tolerance.to_string()),
            ("radius", a.radius.to_string()),
            ("density", a.density.to_string()),
            ("split", a.split.to_string()),
            ("steps", a.steps.to_string()),
            ("snapshot-steps", steps_list.join(",")),
            ("rent-x", a.rent_x.to_string()),
            ("rent-y", a.rent_y.to_string()),
            ("gibbs-delta-m", a.gibbs_delta_m.to_string()),
            ("gibbs-initial", a.gibbs_initial.to_string()),
            ("no-lottery", a.no_lottery.to_string()),
            ("boundary", enum_name(a.boundary)),
        ]),
    )?;
    emit(dir, MANIFEST_FILE, manifest, files)?;
    Ok(vec![format!(
        "seed {seed}: {} Preferred cells after {} steps -> {}",
        run.final_state.preferred_count(),
        run.final_state.step(),
        dir.display()
    )])
}
