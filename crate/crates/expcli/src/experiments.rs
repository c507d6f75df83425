//! The five experiment families. Each instance is a pure function of the
//! config and its stream id; sizes run one after another, instances of a
//! size run on the worker pool and are written in stream order.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use stoq_core::anneal::{log_time_grid, tts_optimize_with, EvolveOptions, InterpolationPath};
use stoq_core::ensembles::{
    sample_catalyst, sample_complex_hermitian, sample_maxcut, sample_wigner, sample_x_diagonal, CatalystMode,
    SeededRng,
};
use stoq_core::signed_graph::{audit_inequalities, sample_signed_graph};
use stoq_core::spectra::{gap_with, min_gap_sweep, EigenOptions};
use stoq_core::stoquastize::{design_matrix, shift_matrix, stoquastize_catalyst};
use stoq_core::ParitySector;

use crate::config::{DenseEnsemble, ExperimentConfig, Family, Variant};
use crate::error::{ExpError, Result};
use crate::record::{classify, ExperimentRecord, Outcome, RecordWriter, VariantResult};
use crate::stats::{bootstrap_fraction_sigma, fraction_stderr, median};
use crate::summary::{Summary, SummaryRow};

/// Absolute slack for the X-diagonal gap theorem.
pub const XDIAG_TOL: f64 = 1e-10;

fn stream_id(size: usize, group: u64, index: usize) -> u64 {
    ((size as u64) << 40) | (group << 32) | index as u64
}

fn stream_index(stream: u64) -> usize {
    (stream & 0xffff_ffff) as usize
}

fn catalyst_group(mode: CatalystMode) -> &'static str {
    match mode {
        CatalystMode::Uniform => "uniform",
        CatalystMode::Pm1 => "pm1",
    }
}

fn timed(start: Instant, mut r: ExperimentRecord) -> ExperimentRecord {
    r.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    r
}

fn ensemble_index(e: DenseEnsemble) -> u64 {
    match e {
        DenseEnsemble::Real => 0,
        DenseEnsemble::Complex => 1,
    }
}

/// Gaps of one dense sample and of its stoquastizations. The shifted
/// variant applies to real samples only.
pub fn dense_instance(cfg: &ExperimentConfig, n: usize, ensemble: DenseEnsemble, index: usize) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let stream = stream_id(n, ensemble_index(ensemble), index);
    let mut rng = SeededRng::new(cfg.master_seed, stream);
    let m = match ensemble {
        DenseEnsemble::Real => sample_wigner(n, &mut rng)?,
        DenseEnsemble::Complex => sample_complex_hermitian(n, &mut rng)?,
    };
    let opts = EigenOptions::dense();
    let g = gap_with(&m, &opts)?;
    let mut rec = ExperimentRecord::new(Family::DenseWins, n, cfg.master_seed, stream);
    rec.group = Some(ensemble.name().into());
    rec.baseline = Some(g);
    for &v in &cfg.stoquastizations {
        let stoq = match (v, ensemble) {
            (Variant::Designed, _) => design_matrix(&m),
            (Variant::Shifted, DenseEnsemble::Real) => shift_matrix(&m, None)?,
            (Variant::Shifted, DenseEnsemble::Complex) => continue,
        };
        let gv = gap_with(&stoq, &opts)?;
        rec.variants.push(VariantResult {
            variant: v,
            value: gv,
            outcome: classify(g, gv, true),
        });
    }
    Ok(timed(start, rec))
}

/// The Max-Cut path of one realization and its stoquasticized variants.
pub fn maxcut_paths(
    cfg: &ExperimentConfig,
    n: usize,
    index: usize,
    draw: usize,
) -> Result<(InterpolationPath, Vec<(Variant, InterpolationPath)>)> {
    let stream = stream_id(n, 0, index);
    let rng = SeededRng::new(cfg.master_seed, stream);
    let inst = sample_maxcut(n, &mut rng.substream(0), cfg.max_retries)?;
    let alphas = sample_catalyst(&inst.edges, cfg.catalyst_mode, &mut rng.substream(1 + draw as u64))?;
    let base = InterpolationPath::maxcut(&inst, &alphas)?;
    let variants = cfg
        .stoquastizations
        .iter()
        .map(|&v| Ok((v, InterpolationPath::maxcut(&inst, &stoquastize_catalyst(&alphas, v.catalyst_kind()))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((base, variants))
}

fn maxcut_record(cfg: &ExperimentConfig, family: Family, n: usize, index: usize, draw: usize) -> ExperimentRecord {
    let mut rec = ExperimentRecord::new(family, n, cfg.master_seed, stream_id(n, 0, index));
    rec.group = Some(catalyst_group(cfg.catalyst_mode).into());
    rec.catalyst_draw = Some(draw);
    rec
}

/// Sector minimum gaps of one realization.
pub fn maxcut_mingap_instance(cfg: &ExperimentConfig, n: usize, index: usize, draw: usize) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let sector = ParitySector::even(n)?;
    let (base, variants) = maxcut_paths(cfg, n, index, draw)?;
    let r = min_gap_sweep(&base, Some(&sector))?;
    let mut rec = maxcut_record(cfg, Family::MaxcutMingap, n, index, draw);
    rec.baseline = Some(r.gap_min);
    rec.s_star = Some(r.s_star);
    rec.global_flag = Some(r.global_flag);
    if r.multiple_minima {
        rec.metrics.insert("multiple_minima".into(), 1.0);
    }
    for (v, path) in variants {
        let rv = min_gap_sweep(&path, Some(&sector))?;
        rec.variants.push(VariantResult {
            variant: v,
            value: rv.gap_min,
            outcome: classify(r.gap_min, rv.gap_min, true),
        });
        rec.metrics.insert(format!("s_star_{v}"), rv.s_star);
    }
    Ok(timed(start, rec))
}

/// Optimized time to solution of one realization, with the sector gaps
/// recorded for comparison.
pub fn maxcut_tts_instance(cfg: &ExperimentConfig, n: usize, index: usize, draw: usize) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let sector = ParitySector::even(n)?;
    let grid = log_time_grid(cfg.t_grid.lo, cfg.t_grid.hi, cfg.t_grid.per_octave);
    let opts = EvolveOptions::default();
    let (base, variants) = maxcut_paths(cfg, n, index, draw)?;
    let mut rec = maxcut_record(cfg, Family::MaxcutTts, n, index, draw);
    let tts = tts_optimize_with(&base, &grid, Some(&sector), &opts)?;
    let gap = min_gap_sweep(&base, Some(&sector))?;
    rec.baseline = Some(tts.tts);
    rec.s_star = Some(gap.s_star);
    rec.global_flag = Some(gap.global_flag);
    rec.metrics.insert("t_best".into(), tts.t_best);
    rec.metrics.insert("gap".into(), gap.gap_min);
    let mut drift = tts.max_norm_drift;
    let mut floor_hits = tts.floor_hits;
    for (v, path) in variants {
        let tv = tts_optimize_with(&path, &grid, Some(&sector), &opts)?;
        let gv = min_gap_sweep(&path, Some(&sector))?;
        drift = drift.max(tv.max_norm_drift);
        floor_hits += tv.floor_hits;
        rec.metrics.insert(format!("t_best_{v}"), tv.t_best);
        rec.metrics.insert(format!("gap_{v}"), gv.gap_min);
        rec.variants.push(VariantResult {
            variant: v,
            value: tv.tts,
            outcome: classify(tts.tts, tv.tts, false),
        });
    }
    rec.metrics.insert("max_norm_drift".into(), drift);
    rec.metrics.insert("floor_hits".into(), floor_hits as f64);
    if drift > opts.max_norm_drift {
        rec.hard_failures.push("norm_drift".into());
    }
    Ok(timed(start, rec))
}

/// Inequality audit of one random signed graph.
pub fn cheeger_instance(cfg: &ExperimentConfig, vertices: usize, index: usize) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let stream = stream_id(vertices, 0, index);
    let mut rng = SeededRng::new(cfg.master_seed, stream);
    let g = sample_signed_graph(vertices, cfg.edge_probability, cfg.negative_probability, &mut rng)?;
    let report = audit_inequalities(&g, cfg.k_max)?;
    let mut rec = ExperimentRecord::new(Family::CheegerAudit, vertices, cfg.master_seed, stream);
    let h1 = report.cheeger.iter().find(|c| c.k == 1 && c.signed).map(|c| c.h);
    rec.metrics.insert("balanced".into(), f64::from(u8::from(report.balanced)));
    rec.metrics.insert("d_max".into(), report.d_max);
    rec.metrics.insert("lambda1_signed".into(), report.signed_spectrum[0]);
    if let Some(h) = h1 {
        rec.metrics.insert("h1_signed".into(), h);
    }
    rec.metrics.insert("edges".into(), g.edges().len() as f64);
    if report.degenerate_witness {
        rec.metrics.insert("degenerate_witness".into(), 1.0);
    }
    rec.hard_failures = report.hard_failures().iter().map(|c| c.name.clone()).collect();
    if report.balanced {
        let zero = h1.is_some_and(|h| h.abs() < 1e-12) && report.signed_spectrum[0].abs() < 1e-10;
        if !zero {
            rec.hard_failures.push("balanced_zero".into());
        }
    }
    rec.hard_failures.sort();
    rec.hard_failures.dedup();
    rec.checks = report.checks;
    Ok(timed(start, rec))
}

/// Gap of a random X-diagonal Hamiltonian against its de-signed form.
pub fn xdiag_instance(cfg: &ExperimentConfig, n: usize, index: usize) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let stream = stream_id(n, 0, index);
    let mut rng = SeededRng::new(cfg.master_seed, stream);
    let available = (1usize << n) - 1;
    let terms = {
        use rand::Rng;
        rng.random_range(1..=(cfg.terms_per_qubit * n).min(available))
    };
    let h = sample_x_diagonal(n, terms, &mut rng)?;
    let mut rec = ExperimentRecord::new(Family::XdiagGaps, n, cfg.master_seed, stream);
    rec.metrics.insert("terms".into(), terms as f64);
    let m = h.build_matrix()?;
    if m.dim() < 2 {
        return Err(ExpError::Config("X-diagonal Hamiltonians need at least one qubit".into()));
    }
    let opts = EigenOptions::dense();
    let g = gap_with(&m, &opts)?;
    let gd = gap_with(&design_matrix(&m), &opts)?;
    rec.baseline = Some(g);
    rec.variants.push(VariantResult {
        variant: Variant::Designed,
        value: gd,
        outcome: classify(g, gd, true),
    });
    if gd < g - XDIAG_TOL {
        rec.hard_failures.push("designed_gap_not_smaller".into());
    }
    Ok(timed(start, rec))
}

/// Recomputes a record from its seed metadata.
pub fn replay(cfg: &ExperimentConfig, rec: &ExperimentRecord) -> Result<ExperimentRecord> {
    let mut cfg = cfg.clone();
    cfg.master_seed = rec.master_seed;
    let index = stream_index(rec.stream_id);
    let draw = rec.catalyst_draw.unwrap_or(0);
    match rec.family {
        Family::DenseWins => {
            let ensemble = match rec.group.as_deref() {
                Some("complex") => DenseEnsemble::Complex,
                _ => DenseEnsemble::Real,
            };
            dense_instance(&cfg, rec.size, ensemble, index)
        }
        Family::MaxcutMingap | Family::MaxcutTts => {
            cfg.catalyst_mode = match rec.group.as_deref() {
                Some("pm1") => CatalystMode::Pm1,
                _ => CatalystMode::Uniform,
            };
            if rec.family == Family::MaxcutMingap {
                maxcut_mingap_instance(&cfg, rec.size, index, draw)
            } else {
                maxcut_tts_instance(&cfg, rec.size, index, draw)
            }
        }
        Family::CheegerAudit => cheeger_instance(&cfg, rec.size, index),
        Family::XdiagGaps => xdiag_instance(&cfg, rec.size, index),
    }
}

/// Runs the family named in the config, writing `<family>.jsonl` and
/// `<family>.csv` under `cfg.output` when set.
pub fn run(cfg: &ExperimentConfig) -> Result<Summary> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    let mut writer = match &cfg.output {
        Some(dir) => Some(RecordWriter::create(&dir.join(format!("{}.jsonl", cfg.family)))?),
        None => None,
    };
    let mut summary = Summary::new(cfg.family);
    let mut stat_rng = SeededRng::new(cfg.master_seed, u64::MAX).substream(0xb007);
    let mut tts_gap_compare = Vec::new();
    for &size in &cfg.sizes {
        let batches: Vec<(Option<DenseEnsemble>, Vec<ExperimentRecord>)> = match cfg.family {
            Family::DenseWins => cfg
                .ensembles
                .iter()
                .map(|&e| {
                    let recs = par_map(&pool, cfg.instances_per_size, |k| dense_instance(cfg, size, e, k))?;
                    Ok((Some(e), recs))
                })
                .collect::<Result<_>>()?,
            Family::MaxcutMingap | Family::MaxcutTts => {
                let per = cfg.catalysts_per_instance;
                let recs = par_map(&pool, cfg.instances_per_size * per, |k| {
                    if cfg.family == Family::MaxcutMingap {
                        maxcut_mingap_instance(cfg, size, k / per, k % per)
                    } else {
                        maxcut_tts_instance(cfg, size, k / per, k % per)
                    }
                })?;
                vec![(None, recs)]
            }
            Family::CheegerAudit => vec![(
                None,
                par_map(&pool, cfg.instances_per_size, |k| cheeger_instance(cfg, size, k))?,
            )],
            Family::XdiagGaps => vec![(
                None,
                par_map(&pool, cfg.instances_per_size, |k| xdiag_instance(cfg, size, k))?,
            )],
        };
        for (ensemble, recs) in batches {
            if let Some(w) = writer.as_mut() {
                for r in &recs {
                    w.append(r)?;
                }
            }
            summary.records += recs.len();
            summary.hard_failures += recs.iter().filter(|r| !r.hard_failures.is_empty()).count();
            let group = match (ensemble, cfg.family) {
                (Some(e), _) => e.name().to_string(),
                (None, Family::MaxcutMingap | Family::MaxcutTts) => catalyst_group(cfg.catalyst_mode).to_string(),
                _ => "all".to_string(),
            };
            match cfg.family {
                Family::DenseWins | Family::XdiagGaps => {
                    for &v in &cfg.stoquastizations {
                        summary.rows.extend(win_row(cfg, size, &group, v, "all", "win_fraction", &recs, &mut stat_rng));
                    }
                    if cfg.family == Family::XdiagGaps {
                        summary.rows.push(pass_row(
                            cfg,
                            size,
                            "designed_gap_not_smaller",
                            "hard",
                            recs.iter().map(|r| r.hard_failures.is_empty()),
                            &mut stat_rng,
                        ));
                    }
                }
                Family::MaxcutMingap => {
                    summarize_classes(cfg, size, &group, &recs, "win_fraction", &mut summary, &mut stat_rng);
                }
                Family::MaxcutTts => {
                    summarize_classes(cfg, size, &group, &recs, "tts_win_fraction", &mut summary, &mut stat_rng);
                    for &v in &cfg.stoquastizations {
                        let gap_recs: Vec<ExperimentRecord> = recs.iter().map(|r| gap_view(r, v)).collect();
                        summary
                            .rows
                            .extend(win_row(cfg, size, &group, v, "all", "gap_win_fraction", &gap_recs, &mut stat_rng));
                        let tts = summary.find(size, v.name(), "all", "tts_win_fraction").map(|r| r.value);
                        let gap = summary.find(size, v.name(), "all", "gap_win_fraction").map(|r| r.value);
                        if let (Some(t), Some(g)) = (tts, gap) {
                            tts_gap_compare.push((size, v, t, g));
                        }
                    }
                }
                Family::CheegerAudit => summarize_audit(cfg, size, &recs, &mut summary, &mut stat_rng),
            }
        }
    }
    for (size, v, t, g) in tts_gap_compare {
        let trend = if t <= g { "no increase" } else { "increase" };
        summary
            .notes
            .push(format!("n={size} {v}: TTS win fraction {t:.4} vs gap win fraction {g:.4} ({trend})"));
    }
    if let Some(w) = writer {
        w.finish()?;
    }
    if let Some(dir) = &cfg.output {
        summary.write_csv(&dir.join(format!("{}.csv", cfg.family)))?;
    }
    Ok(summary)
}

fn par_map<F>(pool: &rayon::ThreadPool, count: usize, f: F) -> Result<Vec<ExperimentRecord>>
where
    F: Fn(usize) -> Result<ExperimentRecord> + Sync,
{
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

/// The record with TTS values replaced by the recorded sector gaps.
fn gap_view(r: &ExperimentRecord, v: Variant) -> ExperimentRecord {
    let mut out = r.clone();
    let base = r.metrics.get("gap").copied().unwrap_or(f64::NAN);
    out.baseline = Some(base);
    out.variants = r
        .variants
        .iter()
        .filter(|x| x.variant == v)
        .map(|_| {
            let value = r.metrics.get(&format!("gap_{v}")).copied().unwrap_or(f64::NAN);
            VariantResult {
                variant: v,
                value,
                outcome: classify(base, value, true),
            }
        })
        .collect();
    out
}

#[allow(clippy::too_many_arguments)]
fn win_row(
    cfg: &ExperimentConfig,
    size: usize,
    group: &str,
    v: Variant,
    class: &str,
    metric: &str,
    recs: &[ExperimentRecord],
    rng: &mut SeededRng,
) -> Option<SummaryRow> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut baseline = Vec::new();
    let mut values = Vec::new();
    for r in recs {
        if let Some(x) = r.variant(v) {
            let key = match x.outcome {
                Outcome::Win => "win",
                Outcome::Loss => "loss",
                Outcome::Tie => "tie",
            };
            *counts.entry(key).or_default() += 1;
            baseline.extend(r.baseline);
            values.push(x.value);
        }
    }
    let count = values.len();
    if count == 0 && class == "all" {
        return None;
    }
    let wins = counts.get("win").copied().unwrap_or(0);
    let ties = counts.get("tie").copied().unwrap_or(0);
    Some(SummaryRow {
        family: cfg.family,
        size,
        group: group.to_string(),
        variant: v.name().to_string(),
        class: class.to_string(),
        metric: metric.to_string(),
        count,
        hits: wins,
        ties,
        value: if count == 0 { f64::NAN } else { wins as f64 / count as f64 },
        std_error: fraction_stderr(wins, count),
        bootstrap_2sigma: 2.0 * bootstrap_fraction_sigma(wins, count, cfg.bootstrap_resamples, rng),
        median_baseline: (!baseline.is_empty()).then(|| median(&baseline)),
        median_variant: (!values.is_empty()).then(|| median(&values)),
    })
}

fn pass_row(
    cfg: &ExperimentConfig,
    size: usize,
    name: &str,
    kind: &str,
    passes: impl Iterator<Item = bool>,
    rng: &mut SeededRng,
) -> SummaryRow {
    let flags: Vec<bool> = passes.collect();
    let count = flags.len();
    let hits = flags.iter().filter(|&&b| b).count();
    SummaryRow {
        family: cfg.family,
        size,
        group: "all".into(),
        variant: name.to_string(),
        class: kind.to_string(),
        metric: "pass_rate".into(),
        count,
        hits,
        ties: 0,
        value: if count == 0 { f64::NAN } else { hits as f64 / count as f64 },
        std_error: fraction_stderr(hits, count),
        bootstrap_2sigma: 2.0 * bootstrap_fraction_sigma(hits, count, cfg.bootstrap_resamples, rng),
        median_baseline: None,
        median_variant: None,
    }
}

/// Win fractions split by whether the sector ground state is the global
/// one, plus the fraction of flagged instances.
fn summarize_classes(
    cfg: &ExperimentConfig,
    size: usize,
    group: &str,
    recs: &[ExperimentRecord],
    metric: &str,
    summary: &mut Summary,
    rng: &mut SeededRng,
) {
    let lower: Vec<ExperimentRecord> = recs.iter().filter(|r| r.global_flag == Some(true)).cloned().collect();
    let equal: Vec<ExperimentRecord> = recs.iter().filter(|r| r.global_flag != Some(true)).cloned().collect();
    for &v in &cfg.stoquastizations {
        for (class, subset) in [("all", recs), ("equal", &equal[..]), ("lower", &lower[..])] {
            summary.rows.extend(win_row(cfg, size, group, v, class, metric, subset, rng));
        }
    }
    let flagged = lower.len();
    let count = recs.len();
    summary.rows.push(SummaryRow {
        family: cfg.family,
        size,
        group: group.to_string(),
        variant: "none".into(),
        class: "all".into(),
        metric: "global_flag_fraction".into(),
        count,
        hits: flagged,
        ties: 0,
        value: flagged as f64 / count as f64,
        std_error: fraction_stderr(flagged, count),
        bootstrap_2sigma: 2.0 * bootstrap_fraction_sigma(flagged, count, cfg.bootstrap_resamples, rng),
        median_baseline: None,
        median_variant: None,
    });
}

fn summarize_audit(
    cfg: &ExperimentConfig,
    size: usize,
    recs: &[ExperimentRecord],
    summary: &mut Summary,
    rng: &mut SeededRng,
) {
    // check name -> (hard, per-record pass flags, lhs/rhs ratios)
    let mut by_name: BTreeMap<String, (bool, Vec<bool>, Vec<f64>)> = BTreeMap::new();
    for r in recs {
        let mut per_record: BTreeMap<&str, (bool, bool)> = BTreeMap::new();
        for c in &r.checks {
            let e = per_record.entry(&c.name).or_insert((c.hard, true));
            e.1 &= c.holds;
            if c.rhs > 0.0 {
                by_name.entry(c.name.clone()).or_insert((c.hard, vec![], vec![])).2.push(c.lhs / c.rhs);
            }
        }
        for (name, (hard, holds)) in per_record {
            by_name.entry(name.to_string()).or_insert((hard, vec![], vec![])).1.push(holds);
        }
    }
    let balanced: Vec<bool> = recs
        .iter()
        .filter(|r| r.metrics.get("balanced") == Some(&1.0))
        .map(|r| !r.hard_failures.iter().any(|f| f == "balanced_zero"))
        .collect();
    for (name, (hard, passes, ratios)) in by_name {
        let mut row = pass_row(cfg, size, &name, if hard { "hard" } else { "diagnostic" }, passes.into_iter(), rng);
        row.median_variant = (!ratios.is_empty()).then(|| median(&ratios));
        summary.rows.push(row);
    }
    summary
        .rows
        .push(pass_row(cfg, size, "balanced_zero", "hard", balanced.into_iter(), rng));
}
