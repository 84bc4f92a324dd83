//! Time-grid sweep with the analytic-vs-Monte-Carlo gate, written as CSV.

use std::io;

use qkd_thermal::cli::write_csv;
use qkd_thermal::harness::{compare, run_sweep, SweepConfig, SweepProtocol};

fn main() -> qkd_thermal::Result<()> {
    let cfg = SweepConfig {
        protocol: SweepProtocol::E91PhiPlus,
        steps: 8,
        shots: 50_000,
        seed: 42,
        observables: vec!["success".into(), "p01".into()],
        ..SweepConfig::default()
    };
    let res = run_sweep(&cfg)?;
    write_csv(&res.rows, &mut io::stdout().lock()).expect("stdout");
    eprint!("{}", compare(&res, 4.0));
    Ok(())
}
