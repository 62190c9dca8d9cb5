use std::path::Path;
use std::time::Instant;

use clap::Args;
use medcomp_core::duality::{
    balanced_gray_code, bv_shattered_family, fat_shattering_search, lipschitz_shattered_family,
    matrix_variation, FunctionTable, DEFAULT_SUBSET_BUDGET,
};
use medcomp_core::experiment::weak_trial;
use medcomp_core::rng::{seeded, sub_seed};
use medcomp_core::synth::{labeled_sample, random_target};
use medcomp_core::{
    compress_with_details, deserialize, erm_from_id, reconstruct, serialize, CompressionDetails,
    Erm, Error, LabeledSample, Point,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{resolve, ExperimentConfig, Overrides};
use crate::samplefile;
use crate::table::{cell, config_cells, OutputArgs, Row, Table};
use crate::CliError;

fn elapsed_ms(start: Instant) -> Value {
    json!(start.elapsed().as_secs_f64() * 1e3)
}

/// Size and fit columns shared by `compress` and `sweep`.
fn run_cells(
    cfg: &ExperimentConfig,
    sample: &LabeledSample,
    d: &CompressionDetails,
    erm: &dyn Erm,
) -> Result<Row, CliError> {
    let h = reconstruct(&d.set, erm)?;
    let bytes = serialize(&d.set)?;
    Ok(vec![
        cell("examples", sample.len()),
        cell(
            "rounds_planned",
            cfg.boost_config().rounds_for(sample.len()),
        ),
        cell("rounds_run", d.trace.rounds.len()),
        cell("early_exit", d.trace.early_exit),
        cell("n", d.set.n()),
        cell(
            "group_size",
            d.set.groups().iter().map(Vec::len).max().unwrap_or(0),
        ),
        cell("stored_examples", d.set.stored_examples()),
        cell("side_bits", d.set.side_info().len()),
        cell("bytes", bytes.len()),
        cell("max_error", h.max_error(sample)),
    ])
}

pub fn compress(
    file: Option<&Path>,
    overrides: &Overrides,
    output: &OutputArgs,
    compressed: &Path,
    sample_in: Option<&Path>,
    sample_out: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = resolve(file, overrides)?;
    let erm = cfg.erm()?;
    let mut rng = seeded(cfg.seed);
    let sample = match sample_in {
        Some(path) => samplefile::read(path, cfg.task_kind())?,
        None => {
            let target = random_target(cfg.family(), cfg.dim, &mut rng)?;
            labeled_sample(target.as_ref(), cfg.m, cfg.dim, cfg.task_kind(), &mut rng)?
        }
    };
    if let Some(path) = sample_out {
        samplefile::write(path, &sample)?;
    }
    let start = Instant::now();
    let d = compress_with_details(
        &sample,
        &erm,
        &cfg.boost_config(),
        &cfg.weak_config(&erm),
        &cfg.sparsify_config(),
        &mut rng,
    )?;
    let wall = elapsed_ms(start);
    std::fs::write(compressed, serialize(&d.set)?).map_err(CliError::io)?;

    let mut row = config_cells(&cfg, &[]);
    row.extend(run_cells(&cfg, &sample, &d, erm.as_ref())?);
    if output.timing {
        row.push(cell("wall_ms", wall));
    }
    let mut table = Table::default();
    table.push(row);
    table.write(output)
}

/// Reports the error whether or not it is within η; only unreadable or
/// inconsistent inputs fail.
pub fn verify(compressed: &Path, sample: &Path, output: &OutputArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(compressed).map_err(CliError::io)?;
    let start = Instant::now();
    let cs = deserialize(&bytes)?;
    let erm = erm_from_id(&cs.meta().erm_id)?;
    let data = samplefile::read(sample, cs.meta().task)?;
    if data.dim() != cs.dim() {
        return Err(CliError::usage(format!(
            "sample has dimension {}, compression set {}",
            data.dim(),
            cs.dim()
        )));
    }
    let h = reconstruct(&cs, erm.as_ref())?;
    let max_error = h.max_error(&data);
    let mut row = vec![
        cell("compressed", compressed.display().to_string()),
        cell("sample", sample.display().to_string()),
        cell("erm", cs.meta().erm_id.clone()),
        cell("task", cs.meta().task.to_string()),
        cell("eta", cs.meta().eta),
        cell("gamma", cs.meta().gamma),
        cell("n", cs.n()),
        cell("stored_examples", cs.stored_examples()),
        cell("examples", data.len()),
        cell("max_error", max_error),
        cell("pass", max_error <= cs.meta().eta),
    ];
    if output.timing {
        row.push(cell("wall_ms", elapsed_ms(start)));
    }
    let mut table = Table::default();
    table.push(row);
    table.write(output)
}

pub fn weakstudy(
    file: Option<&Path>,
    overrides: &Overrides,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let cfg = resolve(file, overrides)?;
    let erm = cfg.erm()?;
    let weak = cfg.weak_config(&erm);
    let start = Instant::now();
    let trials = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = sub_seed(cfg.seed, i);
            weak_trial(&erm, cfg.family(), cfg.m, cfg.dim, &weak, seed).map(|t| (seed, t))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let base = config_cells(&cfg, &[]);
    let mut table = Table::default();
    for (i, (seed, t)) in trials.iter().enumerate() {
        let mut row = base.clone();
        row.extend([
            cell("trial", i.to_string()),
            cell("trial_seed", *seed),
            cell("subsample_size", t.subsample_size),
            cell("first_draw_success", t.first_draw_success),
            cell("retries", t.attempts - 1),
            cell("succeeded", t.succeeded),
            cell("fail_mass", t.fail_mass),
        ]);
        table.push(row);
    }
    let n = trials.len() as f64;
    let first_fail = trials.iter().filter(|(_, t)| !t.first_draw_success).count() as f64 / n;
    let fail = trials.iter().filter(|(_, t)| !t.succeeded).count() as f64 / n;
    let mut summary = base;
    summary.extend([
        cell("trial", "summary"),
        cell("subsample_size", trials[0].1.subsample_size),
        cell("first_draw_failure_rate", first_fail),
        cell("failure_rate", fail),
    ]);
    if output.timing {
        summary.push(cell("wall_ms", elapsed_ms(start)));
    }
    table.push(summary);
    table.write(output)
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Sample sizes to sweep.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub ms: Vec<usize>,
}

/// Failed runs become rows with a `status` other than `ok`.
pub fn sweep(file: Option<&Path>, args: &SweepArgs) -> Result<(), CliError> {
    let cfg = resolve(file, &args.overrides)?;
    if args.ms.contains(&0) {
        return Err(CliError::usage("sample sizes must be positive"));
    }
    let erm = cfg.erm()?;
    let jobs: Vec<(usize, u64)> = args
        .ms
        .iter()
        .flat_map(|&m| (0..cfg.trials as u64).map(move |t| (m, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(m, trial)| -> Result<Row, CliError> {
            let seed = sub_seed(cfg.seed, trial);
            let mut rng = seeded(seed);
            let mut row = vec![cell("m", m), cell("trial", trial), cell("trial_seed", seed)];
            let start = Instant::now();
            let target = random_target(cfg.family(), cfg.dim, &mut rng)?;
            let sample = labeled_sample(target.as_ref(), m, cfg.dim, cfg.task_kind(), &mut rng)?;
            let run = compress_with_details(
                &sample,
                &erm,
                &cfg.boost_config(),
                &cfg.weak_config(&erm),
                &cfg.sparsify_config(),
                &mut rng,
            );
            match run {
                Ok(d) => {
                    row.push(cell("status", "ok"));
                    row.extend(run_cells(&cfg, &sample, &d, erm.as_ref())?);
                }
                Err(e @ (Error::WeakLearningFailure { .. } | Error::SparsifyFailure { .. })) => {
                    row.push(cell("status", CliError::from(e).category));
                }
                Err(e) => return Err(e.into()),
            }
            if args.output.timing {
                row.push(cell("wall_ms", elapsed_ms(start)));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let base = config_cells(&cfg, &["m"]);
    let mut table = Table::default();
    for r in rows {
        let mut row = base.clone();
        row.extend(r);
        table.push(row);
    }
    table.write(&args.output)
}

#[derive(Debug, Clone, Args)]
pub struct DualityArgs {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Ratios v/t for BV rows.
    #[arg(long, value_delimiter = ',')]
    pub bv_ratios: Vec<f64>,
    /// Ratios L/t for Lipschitz rows, on a grid packing of `[0,1]^dim`.
    #[arg(long, value_delimiter = ',')]
    pub lipschitz_ratios: Vec<f64>,
    /// Gray-code widths.
    #[arg(long, value_delimiter = ',')]
    pub gray: Vec<usize>,
    #[arg(long, default_value_t = 7)]
    pub k_max: usize,
    /// Subsets examined before a row gives up.
    #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
    pub budget: u64,
}

/// Largest number of grid points used for a Lipschitz row.
const MAX_GRID_POINTS: usize = 4096;

/// Points `sep·j` per axis, all inside `[0,1]^dim`.
fn grid_packing(sep: f64, dim: usize) -> Result<Vec<Point>, CliError> {
    let per_axis = (1.0 / sep + 1e-9).floor() as usize + 1;
    let total = (per_axis as u128)
        .checked_pow(dim as u32)
        .unwrap_or(u128::MAX);
    if total > MAX_GRID_POINTS as u128 {
        return Err(CliError::usage(format!(
            "grid of {per_axis}^{dim} points exceeds {MAX_GRID_POINTS}"
        )));
    }
    let mut points = Vec::with_capacity(total as usize);
    for mut code in 0..total as usize {
        let coords = (0..dim)
            .map(|_| {
                let j = code % per_axis;
                code /= per_axis;
                (j as f64 * sep).min(1.0)
            })
            .collect();
        points.push(Point::new(coords)?);
    }
    Ok(points)
}

/// Brute-force dual dimension; a budget overrun is reported, not raised.
fn dual_dimension(
    table: &FunctionTable,
    t: f64,
    args: &DualityArgs,
) -> Result<(usize, &'static str), CliError> {
    match fat_shattering_search(&table.dual(), t, args.k_max, args.budget) {
        Ok((k, _)) => Ok((k, "ok")),
        Err(Error::Budget { best, .. }) => Ok((best, "budget")),
        Err(e) => Err(e.into()),
    }
}

pub fn duality(file: Option<&Path>, args: &DualityArgs) -> Result<(), CliError> {
    if args.bv_ratios.is_empty() && args.lipschitz_ratios.is_empty() && args.gray.is_empty() {
        return Err(CliError::usage(
            "nothing to measure: give --bv-ratios, --lipschitz-ratios or --gray",
        ));
    }
    let cfg = resolve(file, &args.overrides)?;
    let mut base = config_cells(&cfg, &[]);
    base.extend([cell("k_max", args.k_max), cell("budget", args.budget)]);
    let mut table = Table::default();
    let mut push = |cells: Vec<(String, Value)>, start: Instant| {
        let mut row = base.clone();
        row.extend(cells);
        if args.output.timing {
            row.push(cell("wall_ms", elapsed_ms(start)));
        }
        table.push(row);
    };

    for &ratio in &args.bv_ratios {
        let start = Instant::now();
        let t = cfg.v / ratio;
        let fam = bv_shattered_family(cfg.v, t)?;
        let (measured, status) = dual_dimension(&fam.family.table, t, args)?;
        let lower = ratio.log2().floor();
        let upper = 2.0 * ratio.log2();
        push(
            sandwich_cells(
                "bv",
                ratio,
                t,
                &fam.family.table,
                lower,
                measured,
                upper,
                status,
            ),
            start,
        );
    }
    for &ratio in &args.lipschitz_ratios {
        let start = Instant::now();
        let t = cfg.l / ratio;
        let points = grid_packing(2.0 * t / cfg.l, cfg.dim)?;
        let fam = lipschitz_shattered_family(&points, cfg.l, t)?;
        let (measured, status) = dual_dimension(&fam.family.table, t, args)?;
        let m = points.len() as f64;
        push(
            sandwich_cells(
                "lipschitz",
                ratio,
                t,
                &fam.family.table,
                m.log2().floor(),
                measured,
                m.log2().ceil(),
                status,
            ),
            start,
        );
    }
    for &n in &args.gray {
        let start = Instant::now();
        let code = balanced_gray_code(n)?;
        let v = matrix_variation(&code);
        let size = 1usize << n;
        let lower = (size - 1) as f64 / n as f64;
        let upper = size.div_ceil(n);
        push(
            vec![
                cell("kind", "gray"),
                cell("param", n as f64),
                cell("rows", code.n_rows()),
                cell("columns", code.n_cols()),
                cell("lower", lower),
                cell("measured", v.max),
                cell("upper", upper as f64),
                cell("holds", lower <= v.max as f64 && v.max <= upper),
                cell("status", "ok"),
            ],
            start,
        );
    }
    table.write(&args.output)
}

#[allow(clippy::too_many_arguments)]
fn sandwich_cells(
    kind: &str,
    ratio: f64,
    t: f64,
    table: &FunctionTable,
    lower: f64,
    measured: usize,
    upper: f64,
    status: &str,
) -> Row {
    vec![
        cell("kind", kind),
        cell("param", ratio),
        cell("t", t),
        cell("rows", table.n_rows()),
        cell("columns", table.n_cols()),
        cell("lower", lower),
        cell("measured", measured),
        cell("upper", upper),
        cell(
            "holds",
            lower <= measured as f64 && measured as f64 <= upper,
        ),
        cell("status", status),
    ]
}
