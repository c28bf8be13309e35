//! The JSON documents behind the command-line tool: write a problem file,
//! realize it, then verify the report against the problem.
//!
//! cargo run --example problem_files

use spectra_forge::cli::{cmd_realize, cmd_verify, render, Problem, ProblemFile};
use spectra_forge::SolverConfig;

fn main() {
    let problem = ProblemFile::new(
        Problem::Scalar { omegas: vec![1.0, 2f64.sqrt()] },
        SolverConfig { tol: 1e-11, ..SolverConfig::default() },
    );
    println!("{}", serde_json::to_string_pretty(&problem).unwrap());

    let realized = cmd_realize(&problem);
    println!("realize exit {}", realized.code);
    let verified = cmd_verify(&realized.report, &problem);
    println!("verify exit {}", verified.code);
    print!("{}", render(&verified.report["report"]["targets"][0]));
}
