//! Experiment harness: measurement synthesis, figure-style experiment runs
//! with CSV/SVG emission, the circle line-vs-ring suite, and the verify
//! report backing the CLI.

pub mod config;
pub mod svg;
pub mod verify;

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::consensus::{self, RunTrace, StepSizePolicy};
use crate::error::{Error, Result};
use crate::geometry::{ManifoldHandle, Point};
use crate::network::{make_topology, TopologySpec};

pub use config::{parse_manifold, parse_policy, parse_topology, ExperimentConfig, RawConfig};

/// Draws the node measurements: `u_i = exp_{x0}(v_i)` with i.i.d. Gaussian
/// tangent coordinates of standard deviation `sigma` at the manifold's fixed
/// base point. Deterministic in the seed.
pub fn generate_measurements(cfg: &ExperimentConfig) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base = cfg.manifold.base_point();
    (0..cfg.n)
        .map(|_| cfg.manifold.exp(&cfg.manifold.random_tangent(&base, cfg.sigma, &mut rng)))
        .collect()
}

/// Extended single-row summary: the shared schema plus the tube and basin
/// certificates evaluated at iteration 0, so each run records which
/// convergence hypotheses it started under.
fn summary_with_certificates(trace: &RunTrace, seed: u64) -> String {
    let (in_s0, in_s_conv0) = trace
        .records
        .first()
        .map(|r| (r.in_s as u8, r.in_s_conv as u8))
        .unwrap_or((0, 0));
    let base = trace.summary_csv(seed);
    let mut lines = base.lines();
    let header = lines.next().unwrap_or_default();
    let row = lines.next().unwrap_or_default();
    format!("{header},in_S_0,in_S_conv_0\n{row},{in_s0},{in_s_conv0}\n")
}

fn write_trace_files(dir: &Path, trace: &RunTrace, seed: u64) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("trace.csv"), trace.trace_csv())?;
    fs::write(dir.join("summary.csv"), summary_with_certificates(trace, seed))?;

    let n = trace.final_state.n_nodes();
    let node_series: Vec<svg::Series> = (0..n)
        .map(|i| svg::Series {
            label: format!("node {}", i + 1),
            values: trace
                .records
                .iter()
                .map(|r| r.dist_to_measurement_mean[i])
                .collect(),
        })
        .collect();
    fs::write(
        dir.join("node_distances.svg"),
        svg::line_chart(
            "Per-node distance to the measurement mean",
            "iteration",
            "distance",
            &node_series,
            true,
        ),
    )?;
    let gap_series = [svg::Series {
        label: "mean gap".into(),
        values: trace.records.iter().map(|r| r.state_mean_gap).collect(),
    }];
    fs::write(
        dir.join("mean_gap.svg"),
        svg::line_chart(
            "State mean vs measurement mean",
            "iteration",
            "distance",
            &gap_series,
            true,
        ),
    )?;
    Ok(())
}

/// Generates measurements, runs consensus for the configured number of
/// iterations, and writes `trace.csv`, `summary.csv`, the per-node distance
/// chart and the mean-gap chart under `<out>/<name>/`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunTrace> {
    let measurements = generate_measurements(cfg);
    let state = consensus::NetworkState::from_measurements(cfg.manifold, measurements)?;
    // fixed iteration budget: the gradient threshold is disabled
    let trace = consensus::run(&cfg.graph, &state, &cfg.policy, cfg.iterations, 0.0)?;
    let dir = cfg.out_dir.join(&cfg.name);
    write_trace_files(&dir, &trace, cfg.seed)?;
    fs::write(dir.join("graph.txt"), cfg.graph.to_edge_list())?;
    if let Some(err) = &trace.summary.error {
        return Err(Error::Contract(format!("run aborted: {err}")));
    }
    Ok(trace)
}

/// The two circle runs: same five measurements, different topology.
#[derive(Debug)]
pub struct CircleReport {
    pub line: RunTrace,
    pub ring: RunTrace,
}

/// Measurements on the unit circle at 0, 80, 170, 230 and 300 degrees,
/// averaged once over a linear and once over a ring topology. The linear
/// run reaches consensus; the ring run stalls in a spread-out stationary
/// configuration. Traces, summaries and a combined chart go to `out_dir`.
pub fn run_circle_suite(out_dir: &Path) -> Result<CircleReport> {
    let m = ManifoldHandle::sphere(1);
    let measurements: Vec<Point> = [0.0f64, 80.0, 170.0, 230.0, 300.0]
        .iter()
        .map(|deg| {
            let theta = deg.to_radians();
            Point::new(
                m,
                nalgebra::DMatrix::from_column_slice(2, 1, &[theta.cos(), theta.sin()]),
            )
        })
        .collect::<Result<_>>()?;
    let policy = StepSizePolicy::auto_descent();

    let run_one = |topo: TopologySpec, name: &str| -> Result<RunTrace> {
        let g = make_topology(&topo)?;
        let state = consensus::NetworkState::from_measurements(m, measurements.clone())?;
        let trace = consensus::run(&g, &state, &policy, 5000, 1e-10)?;
        write_trace_files(&out_dir.join(name), &trace, 0)?;
        Ok(trace)
    };
    let line = run_one(TopologySpec::Line(5), "line")?;
    let ring = run_one(TopologySpec::Ring(5), "ring")?;

    let combined = [
        svg::Series {
            label: "line topology".into(),
            values: line.records.iter().map(|r| r.max_pair_dist).collect(),
        },
        svg::Series {
            label: "ring topology".into(),
            values: ring.records.iter().map(|r| r.max_pair_dist).collect(),
        },
    ];
    fs::create_dir_all(out_dir)?;
    fs::write(
        out_dir.join("circle_dichotomy.svg"),
        svg::line_chart(
            "Circle consensus: line vs ring topology",
            "iteration",
            "max pairwise distance",
            &combined,
            true,
        ),
    )?;
    Ok(CircleReport { line, ring })
}

/// The full figure suite: SO(7), the 6-sphere and Grass(7,3) under the
/// default 15-node 4-regular setup, plus the circle dichotomy. Returns the
/// experiment names paired with their traces.
pub fn run_figures(seed: u64, out_dir: &Path) -> Result<Vec<(String, RunTrace)>> {
    let mut results = Vec::new();
    for spec in ["so:7", "sphere:6", "grassmann:7:3"] {
        let mut raw = RawConfig::default();
        raw.set("manifold", spec);
        raw.set("seed", seed.to_string());
        raw.set("out", out_dir.to_string_lossy());
        let cfg = raw.resolve()?;
        let name = cfg.name.clone();
        results.push((name, run_experiment(&cfg)?));
    }
    let circle = run_circle_suite(&out_dir.join("circle"))?;
    results.push(("circle_line".into(), circle.line));
    results.push(("circle_ring".into(), circle.ring));
    Ok(results)
}

/// Parses the point-file format of the `frechet` subcommand: `#` comments,
/// first data line a manifold spec (`sphere:2`, `so:3`, ...), then one point
/// per line as whitespace-separated row-major entries.
pub fn parse_point_file(text: &str) -> Result<(ManifoldHandle, Vec<Point>)> {
    let mut lines = text
        .lines()
        .map(|l| match l.find('#') {
            Some(idx) => l[..idx].trim(),
            None => l.trim(),
        })
        .filter(|l| !l.is_empty());
    let spec = lines
        .next()
        .ok_or_else(|| Error::Parse("empty point file".into()))?;
    let m = parse_manifold(spec)?;
    let (rows, cols) = m.point_shape();
    let mut points = Vec::new();
    for (idx, line) in lines.enumerate() {
        let entries: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("point {}: bad number {t:?}", idx + 1)))
            })
            .collect::<Result<_>>()?;
        if entries.len() != rows * cols {
            return Err(Error::Parse(format!(
                "point {}: expected {} entries, got {}",
                idx + 1,
                rows * cols,
                entries.len()
            )));
        }
        let value = nalgebra::DMatrix::from_row_slice(rows, cols, &entries);
        points.push(Point::new(m, value)?);
    }
    if points.is_empty() {
        return Err(Error::Parse("point file has no points".into()));
    }
    Ok((m, points))
}
