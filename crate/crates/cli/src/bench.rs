//! Batch runs: one engine per (instance, k) job, jobs spread over a thread
//! pool, rows written in input order followed by one average row per k.

use std::io::Write;

use anyhow::Result;
use kvcut_core::engine::{solve, EngineOptions, SolveReport, SolveStatus};
use kvcut_core::instance::Instance;
use log::warn;
use rayon::prelude::*;

pub const HEADER: [&str; 14] = [
    "instance",
    "n",
    "m",
    "k",
    "status",
    "objective",
    "root_bound",
    "gap%",
    "nodes",
    "depth",
    "cols_total",
    "cols_root",
    "time_total",
    "time_pricing",
];

pub struct Job {
    pub name: String,
    pub k: usize,
    /// The instance, or the reason it could not be built.
    pub instance: std::result::Result<Instance, String>,
}

pub enum JobResult {
    Solved(SolveReport),
    Failed { name: String, k: usize, error: String },
}

pub fn run(jobs: Vec<Job>, opts: &EngineOptions, threads: Option<usize>) -> Result<Vec<JobResult>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build()?;
    Ok(pool.install(|| {
        jobs.into_par_iter()
            .map(|job| match job.instance {
                Ok(inst) => match solve(&inst, opts) {
                    Ok(r) => JobResult::Solved(r),
                    Err(e) => {
                        warn!("{} k={}: {e}", job.name, job.k);
                        JobResult::Failed {
                            name: job.name,
                            k: job.k,
                            error: e.to_string(),
                        }
                    }
                },
                Err(error) => JobResult::Failed {
                    name: job.name,
                    k: job.k,
                    error,
                },
            })
            .collect()
    }))
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x}"))
}

fn mean(values: impl Iterator<Item = f64>) -> String {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        String::new()
    } else {
        format!("{:.3}", sum / count as f64)
    }
}

pub fn write_csv<W: Write>(out: W, results: &[JobResult], ks: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for res in results {
        match res {
            JobResult::Solved(r) => w.write_record([
                r.instance.clone(),
                r.n.to_string(),
                r.m.to_string(),
                r.k.to_string(),
                r.status.as_str().to_string(),
                opt(r.objective),
                opt(r.root_lp_bound),
                opt(r.gap_percent),
                r.nodes.to_string(),
                r.max_depth.to_string(),
                r.cols_total.to_string(),
                r.cols_root.to_string(),
                format!("{:.3}", r.total_seconds),
                format!("{:.3}", r.pricing_seconds),
            ])?,
            JobResult::Failed { name, k, error } => {
                let status = format!("error: {error}");
                let mut row = vec![name.clone(), String::new(), String::new(), k.to_string(), status];
                row.resize(HEADER.len(), String::new());
                w.write_record(&row)?;
            }
        }
    }
    for &k in ks {
        let group: Vec<&SolveReport> = results
            .iter()
            .filter_map(|r| match r {
                JobResult::Solved(r) if r.k == k => Some(r),
                _ => None,
            })
            .collect();
        let total = results
            .iter()
            .filter(|r| match r {
                JobResult::Solved(r) => r.k == k,
                JobResult::Failed { k: fk, .. } => *fk == k,
            })
            .count();
        let solved = group
            .iter()
            .filter(|r| matches!(r.status, SolveStatus::Optimal | SolveStatus::Trivial | SolveStatus::Infeasible))
            .count();
        w.write_record([
            "average".to_string(),
            mean(group.iter().map(|r| r.n as f64)),
            mean(group.iter().map(|r| r.m as f64)),
            k.to_string(),
            format!("{solved}/{total} solved"),
            mean(group.iter().filter_map(|r| r.objective)),
            mean(group.iter().filter_map(|r| r.root_lp_bound)),
            mean(group.iter().filter_map(|r| r.gap_percent)),
            mean(group.iter().map(|r| r.nodes as f64)),
            mean(group.iter().map(|r| r.max_depth as f64)),
            mean(group.iter().map(|r| r.cols_total as f64)),
            mean(group.iter().map(|r| r.cols_root as f64)),
            mean(group.iter().map(|r| r.total_seconds)),
            mean(group.iter().map(|r| r.pricing_seconds)),
        ])?;
    }
    w.flush()?;
    Ok(())
}
