use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifold_consensus::frechet::{frechet_mean, FrechetConfig};
use manifold_consensus::harness::{self, RawConfig};

/// Consensus experiments on curved manifolds.
#[derive(Parser)]
#[command(name = "mconsensus", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its trace, summary and charts.
    Run(RunArgs),
    /// Run the full figure suite: SO(7), the 6-sphere, Grass(7,3) and the
    /// circle line-vs-ring dichotomy.
    Figures {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Run the numerical cross-checks and print a pass/fail report.
    Verify {
        /// Where to write the violations CSV.
        #[arg(long, default_value = "verify_violations.csv")]
        out: PathBuf,
    },
    /// Compute the Fréchet mean of the points in a file. The file starts
    /// with a manifold spec line (e.g. `sphere:2`), then one point per line
    /// as whitespace-separated row-major entries; `#` comments.
    Frechet { file: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Manifold spec: euclidean:N, sphere:N, so:N or grassmann:N:P.
    #[arg(long)]
    manifold: Option<String>,
    /// Topology spec: line:N, ring:N, circulant:N:o1,o2, complete:N,
    /// tree:N:seed, regular:N:k:seed or file:<path>.
    #[arg(long)]
    topology: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iters: Option<usize>,
    /// Step-size policy: auto-descent, auto-point or eps:<value>.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
}

fn merge_config(args: &RunArgs) -> Result<RawConfig, manifold_consensus::Error> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::parse(&std::fs::read_to_string(path)?)?,
        None => RawConfig::default(),
    };
    let mut set_opt = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            raw.set(key, v);
        }
    };
    set_opt("manifold", args.manifold.clone());
    set_opt("topology", args.topology.clone());
    set_opt("n", args.n.map(|v| v.to_string()));
    set_opt("sigma", args.sigma.map(|v| v.to_string()));
    set_opt("seed", args.seed.map(|v| v.to_string()));
    set_opt("iterations", args.iters.map(|v| v.to_string()));
    set_opt("policy", args.policy.clone());
    set_opt("out", args.out.as_ref().map(|p| p.display().to_string()));
    set_opt("name", args.name.clone());
    Ok(raw)
}

fn cmd_run(args: &RunArgs) -> Result<bool, manifold_consensus::Error> {
    let cfg = merge_config(args)?.resolve()?;
    let dir = cfg.out_dir.join(&cfg.name);
    let trace = harness::run_experiment(&cfg)?;
    let s = &trace.summary;
    println!(
        "{}: {} after {} iterations (epsilon {:.4e}, frechet gap {:.3e}) -> {}",
        cfg.name,
        if s.converged { "consensus" } else { "no consensus" },
        s.iterations,
        s.epsilon,
        s.frechet_gap,
        dir.display()
    );
    Ok(true)
}

fn cmd_figures(seed: u64, out: &PathBuf) -> Result<bool, manifold_consensus::Error> {
    let results = harness::run_figures(seed, out)?;
    let mut ok = true;
    for (name, trace) in &results {
        let s = &trace.summary;
        let expected = name != "circle_ring";
        let status = if s.converged == expected { "ok" } else { "UNEXPECTED" };
        ok &= s.converged == expected;
        println!(
            "{name}: converged={} iterations={} frechet_gap={:.3e} [{status}]",
            s.converged, s.iterations, s.frechet_gap
        );
    }
    println!("wrote {}", out.display());
    Ok(ok)
}

fn cmd_verify(out: &PathBuf) -> Result<bool, manifold_consensus::Error> {
    let results = harness::verify::report();
    let mut ok = true;
    for r in &results {
        let status = if r.passed() { "pass" } else { "FAIL" };
        println!(
            "{status}  {} ({} cases, {} violations)",
            r.name,
            r.cases,
            r.violations.len()
        );
        ok &= r.passed();
    }
    std::fs::write(out, harness::verify::violations_csv(&results))?;
    println!("violations report: {}", out.display());
    Ok(ok)
}

fn cmd_frechet(file: &PathBuf) -> Result<bool, manifold_consensus::Error> {
    let text = std::fs::read_to_string(file)?;
    let (m, points) = harness::parse_point_file(&text)?;
    let out = frechet_mean(&points, &FrechetConfig::default())?;
    let (rows, cols) = m.point_shape();
    for r in 0..rows {
        let row: Vec<String> = (0..cols)
            .map(|c| format!("{:.15e}", out.mean.value[(r, c)]))
            .collect();
        println!("{}", row.join(" "));
    }
    eprintln!(
        "# {} points, grad norm {:.3e}, {} iterations, certified: {}",
        points.len(),
        out.grad_norm,
        out.iterations,
        out.certified
    );
    Ok(out.converged)
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits with code 2 on usage errors
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Figures { seed, out } => cmd_figures(*seed, out),
        Command::Verify { out } => cmd_verify(out),
        Command::Frechet { file } => cmd_frechet(file),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
