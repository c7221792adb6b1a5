//! Command-line prover.
//!
//! Exit codes: 0 proved, 1 proof failed (certificate still written),
//! 2 planning failure, 3 cover gap.

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use boundstate::orchestrator::{self, ProverConfig};
use boundstate::planner::{self, ProofPlan};

#[derive(Parser, Debug)]
#[command(
    name = "prove",
    about = "Prove uniqueness of the first N excited states of y'' + (2/t) y' + y^3 - y = 0"
)]
struct Args {
    /// Number of excited states beyond the ground state (N = 0 proves the
    /// ground state only)
    #[arg(long)]
    n: usize,
    /// Write the (non-rigorous) plan to this file and continue
    #[arg(long)]
    plan_out: Option<String>,
    /// Read the plan from this file instead of planning
    #[arg(long)]
    plan_in: Option<String>,
    /// Write the proof certificate to this file
    #[arg(long)]
    cert_out: Option<String>,
    /// Print the per-segment result table
    #[arg(long)]
    table: bool,
    /// Write non-rigorous plot data (b, limit sign) as CSV to this file
    #[arg(long)]
    plot_data: Option<String>,
    /// Taylor order of the validated integrator
    #[arg(long, default_value_t = 15)]
    taylor_order: usize,
    /// Preferred seed time (shrunk automatically when too large)
    #[arg(long, default_value_t = 0.1)]
    t0: f64,
    /// Worker threads for segment execution
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Bisection depth budget per segment
    #[arg(long, default_value_t = 60)]
    max_depth: usize,
    /// Use parallelepiped wrapping control instead of QR
    #[arg(long)]
    parallelepiped: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = ProverConfig {
        n_states: args.n,
        taylor_order: args.taylor_order,
        t0: args.t0,
        threads: args.threads,
        max_depth: args.max_depth,
        parallelepiped: args.parallelepiped,
        ..ProverConfig::default()
    };

    let plan: ProofPlan = if let Some(path) = &args.plan_in {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("cannot read plan {path}: {e}");
                return ExitCode::from(2);
            }
        };
        match ProofPlan::from_json(&text) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("cannot parse plan {path}: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        match planner::build_plan(config.n_states, config.max_bsg_width, &config.method_config()) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("planning failed: {e}");
                return ExitCode::from(2);
            }
        }
    };

    if let Some(path) = &args.plan_out {
        if let Err(e) = fs::write(path, plan.to_json()) {
            eprintln!("cannot write plan {path}: {e}");
            return ExitCode::from(2);
        }
    }

    let cover = match orchestrator::verify_cover(&plan) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cover verification failed: {e}");
            return ExitCode::from(3);
        }
    };

    let cert = orchestrator::execute(&plan, cover, &config);

    if let Some(path) = &args.cert_out {
        if let Err(e) = fs::write(path, cert.to_json()) {
            eprintln!("cannot write certificate {path}: {e}");
            return ExitCode::FAILURE;
        }
    }
    if let Some(path) = &args.plot_data {
        if let Err(e) = fs::write(path, orchestrator::emit_plot_data(&cert)) {
            eprintln!("cannot write plot data {path}: {e}");
            return ExitCode::FAILURE;
        }
    }
    if args.table {
        print!("{}", orchestrator::emit_table(&cert));
    }
    for c in &cert.conclusions {
        println!(
            "state {}: unique in [{:.6}, {:.6}] — {}",
            c.state_index,
            c.interval.lo(),
            c.interval.hi(),
            if c.unique { "proved" } else { "not proved" }
        );
    }
    if cert.proved {
        println!("PROVED: first {} state(s) unique", cert.n_states + 1);
        ExitCode::SUCCESS
    } else {
        println!("NOT PROVED");
        ExitCode::FAILURE
    }
}
