use std::time::Instant;

use anyhow::Result;
use clap::Parser;

use cpnray_cli::Cli;
use cpnray_core::experiment::{run_experiment, write_outputs};

fn main() -> Result<()> {
    let cli = Cli::parse();
    let plan = cli.plan()?;
    let points = plan.points().len();
    eprintln!(
        "running {} points x {} replications (seed {})",
        points, plan.replications, plan.base_seed
    );
    let started = Instant::now();
    let result = run_experiment(&plan)?;
    let files = write_outputs(&result, &cli.out)?;

    println!("{:<12} {:<6} {:>5} {:>12} {:>12} {:>6} {:>8}", "scene", "case", "nodes", "mean_s", "std_s", "reps", "fails");
    for p in &result.points {
        println!(
            "{:<12} {:<6} {:>5} {:>12.1} {:>12.1} {:>6} {:>8.2}",
            p.scene,
            p.scenario,
            p.nodes,
            p.mean_ms / 1000.0,
            p.std_ms / 1000.0,
            p.replications,
            p.mean_failures
        );
    }
    eprintln!(
        "done in {:.1?}; wrote {} and {} plot series under {}",
        started.elapsed(),
        files.summary.display(),
        files.plots.len(),
        cli.out.display()
    );
    if !result.aborted.is_empty() {
        eprintln!(
            "warning: {} replication(s) aborted and excluded, see {}",
            result.aborted.len(),
            files.aborted.display()
        );
        for a in &result.aborted {
            eprintln!(
                "  {} {} nodes={} rep={} seed={}: {}",
                a.scene, a.scenario, a.nodes, a.replication, a.seed, a.error
            );
        }
    }
    Ok(())
}
