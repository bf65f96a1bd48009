//! CSV rows and the JSON summary of an experiment run.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::experiment::{Experiment, ExperimentConfig, ExperimentRun, PairRow, Status, Timings};

/// How pairs are drawn; echoed in every summary.
pub const PROTOCOL_NOTE: &str =
    "pairs drawn uniformly over ordered node pairs, screened by a stopping-rule estimate against pmax_floor";

/// Header plus one line per record.
pub fn write_csv<W: Write, T: Serialize>(rows: impl IntoIterator<Item = T>, out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Mean over pairs; `half_width` combines per-pair half-widths as
/// `sqrt(Σ hw²) / count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mean {
    pub mean: f64,
    pub half_width: Option<f64>,
    pub count: usize,
}

fn mean_of(values: impl Iterator<Item = (f64, Option<f64>)>) -> Option<Mean> {
    let (mut sum, mut sq, mut count, mut all_hw) = (0.0, 0.0, 0usize, true);
    for (v, hw) in values {
        sum += v;
        match hw {
            Some(h) => sq += h * h,
            None => all_hw = false,
        }
        count += 1;
    }
    (count > 0).then(|| Mean {
        mean: sum / count as f64,
        half_width: all_hw.then(|| sq.sqrt() / count as f64),
        count,
    })
}

fn mean_field(rows: &[&PairRow], get: impl Fn(&PairRow) -> Option<f64>) -> Option<Mean> {
    mean_of(rows.iter().filter_map(|r| get(r).map(|v| (v, None))))
}

fn mean_estimate(rows: &[&PairRow], get: impl Fn(&PairRow) -> (Option<f64>, Option<f64>)) -> Option<Mean> {
    mean_of(rows.iter().filter_map(|r| {
        let (f, hw) = get(r);
        f.map(|f| (f, hw))
    }))
}

/// One of five equal `f`-ratio intervals over `[0, 1]`; ratios above 1 land
/// in the last one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bucket {
    pub lo: f64,
    pub hi: f64,
    pub pairs: usize,
    pub mean_size_ratio: Option<f64>,
}

fn buckets(rows: &[&PairRow], f_ratio: impl Fn(&PairRow) -> Option<f64>, size_ratio: impl Fn(&PairRow) -> Option<f64>) -> Vec<Bucket> {
    let mut acc = vec![(0usize, 0.0, 0usize); 5];
    for r in rows {
        if let Some(fr) = f_ratio(r) {
            let b = ((fr * 5.0).floor().max(0.0) as usize).min(4);
            acc[b].0 += 1;
            if let Some(sr) = size_ratio(r) {
                acc[b].1 += sr;
                acc[b].2 += 1;
            }
        }
    }
    acc.into_iter()
        .enumerate()
        .map(|(i, (pairs, sum, n))| Bucket {
            lo: i as f64 / 5.0,
            hi: (i + 1) as f64 / 5.0,
            pairs,
            mean_size_ratio: (n > 0).then(|| sum / n as f64),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Aggregates {
    pub rows: usize,
    pub rows_ok: usize,
    pub size_raf: Option<Mean>,
    pub f_raf: Option<Mean>,
    pub size_hd: Option<Mean>,
    pub f_hd: Option<Mean>,
    pub size_sp: Option<Mean>,
    pub f_sp: Option<Mean>,
    pub size_vmax: Option<Mean>,
    pub ratio_hd: Option<Mean>,
    pub ratio_sp: Option<Mean>,
    pub ratio_vmax: Option<Mean>,
    pub reached_hd: Option<usize>,
    pub reached_sp: Option<usize>,
    /// Size ratio bucketed by `f(baseline at |I_RAF|) / f(I_RAF)`.
    pub buckets_hd: Option<Vec<Bucket>>,
    pub buckets_sp: Option<Vec<Bucket>>,
    /// Realization sweep: mean `f(I*)` per `l`.
    pub sweep_f: Option<BTreeMap<u64, Mean>>,
    pub sweep_size: Option<BTreeMap<u64, Mean>>,
}

impl Aggregates {
    /// Averages over rows with status `ok` only.
    pub fn from_rows<'a>(experiment: Experiment, all: impl IntoIterator<Item = &'a PairRow>) -> Self {
        let all: Vec<&PairRow> = all.into_iter().collect();
        let ok: Vec<&PairRow> = all.iter().copied().filter(|r| r.status == Some(Status::Ok)).collect();
        let mut agg = Aggregates { rows: all.len(), rows_ok: ok.len(), ..Default::default() };
        if experiment == Experiment::RealizationSweep {
            let mut by_l: BTreeMap<u64, Vec<&PairRow>> = BTreeMap::new();
            for r in &ok {
                by_l.entry(r.l.unwrap_or(0)).or_default().push(r);
            }
            agg.sweep_f = Some(
                by_l.iter().filter_map(|(&l, rs)| Some((l, mean_estimate(rs, |r| (r.f_raf, r.hw_raf))?))).collect(),
            );
            agg.sweep_size = Some(
                by_l.iter()
                    .filter_map(|(&l, rs)| Some((l, mean_field(rs, |r| r.size_raf.map(|v| v as f64))?)))
                    .collect(),
            );
            return agg;
        }
        let size = |get: fn(&PairRow) -> Option<usize>| mean_field(&ok, move |r| get(r).map(|v| v as f64));
        agg.size_raf = size(|r| r.size_raf);
        agg.size_hd = size(|r| r.size_hd);
        agg.size_sp = size(|r| r.size_sp);
        agg.size_vmax = size(|r| r.size_vmax);
        agg.f_raf = mean_estimate(&ok, |r| (r.f_raf, r.hw_raf));
        agg.f_hd = mean_estimate(&ok, |r| (r.f_hd, r.hw_hd));
        agg.f_sp = mean_estimate(&ok, |r| (r.f_sp, r.hw_sp));
        agg.ratio_hd = mean_field(&ok, |r| r.ratio_hd);
        agg.ratio_sp = mean_field(&ok, |r| r.ratio_sp);
        agg.ratio_vmax = mean_field(&ok, |r| r.ratio_vmax);
        let reached = |get: fn(&PairRow) -> Option<bool>| {
            let flags: Vec<bool> = ok.iter().filter_map(|r| get(r)).collect();
            (!flags.is_empty()).then(|| flags.iter().filter(|&&b| b).count())
        };
        agg.reached_hd = reached(|r| r.reached_hd);
        agg.reached_sp = reached(|r| r.reached_sp);
        match experiment {
            Experiment::MatchHd => agg.buckets_hd = Some(buckets(&ok, |r| r.f_ratio_hd, |r| r.ratio_hd)),
            Experiment::MatchSp => agg.buckets_sp = Some(buckets(&ok, |r| r.f_ratio_sp, |r| r.ratio_sp)),
            _ => {}
        }
        agg
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Seeds {
    pub master: u64,
    pub per_pair: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEntry<'a> {
    #[serde(flatten)]
    pub row: &'a PairRow,
    pub timings: &'a Timings,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub friending_cli: &'static str,
    pub friending_core: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub config: &'a ExperimentConfig,
    pub protocol: &'static str,
    pub pair_attempts: u64,
    pub pair_shortfall: bool,
    pub seeds: Seeds,
    pub per_pair: Vec<PairEntry<'a>>,
    pub aggregates: Aggregates,
    pub versions: Versions,
}

impl<'a> Summary<'a> {
    pub fn new(run: &'a ExperimentRun) -> Self {
        let per_pair = run
            .outcomes
            .iter()
            .flat_map(|o| o.rows.iter().map(move |row| PairEntry { row, timings: &o.timings }))
            .collect();
        Summary {
            config: &run.config,
            protocol: PROTOCOL_NOTE,
            pair_attempts: run.pair_attempts,
            pair_shortfall: run.shortfall,
            seeds: Seeds { master: run.config.seed, per_pair: run.outcomes.iter().map(|o| o.seed).collect() },
            per_pair,
            aggregates: Aggregates::from_rows(run.config.experiment, run.rows()),
            versions: Versions {
                friending_cli: env!("CARGO_PKG_VERSION"),
                friending_core: friending_core::VERSION,
            },
        }
    }
}
