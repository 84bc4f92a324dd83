//! X/Y-basis BB84: every state decays alike, so it beats the Z/X protocol at
//! every finite time.

use qkd_thermal::analytics::{bb84_state_survival, bb84_success, bb84_xy_success};
use qkd_thermal::noise::{Lambda, RelaxationParams, DEFAULT_T1_NS};
use qkd_thermal::protocols::{bb84_run, sift, Bb84Variant};
use qkd_thermal::quantum::StateLabel;

fn main() -> qkd_thermal::Result<()> {
    let lambda = Lambda::new(0.6)?;
    for s in [
        StateLabel::S0,
        StateLabel::S1,
        StateLabel::Plus,
        StateLabel::Minus,
        StateLabel::PlusI,
        StateLabel::MinusI,
    ] {
        println!(
            "survival of |{s}⟩ at λ = 0.6: {:.6}",
            bb84_state_survival(lambda, s).unwrap()
        );
    }

    println!("\n{:>6} {:>9} {:>9} {:>10}", "t/T1", "ZX", "XY", "XY (MC)");
    for frac in [0.0, 0.25, 0.5, 1.0, 2.0, 5.0] {
        let params = RelaxationParams::new(frac * DEFAULT_T1_NS, DEFAULT_T1_NS)?;
        let kept = sift(&bb84_run(40_000, Bb84Variant::XY, params, 3)?)?;
        let mc = kept.iter().filter(|r| r.is_success()).count() as f64 / kept.len() as f64;
        let l = params.lambda();
        println!(
            "{frac:>6.2} {:>9.5} {:>9.5} {mc:>10.5}",
            bb84_success(l),
            bb84_xy_success(l)
        );
    }
    Ok(())
}
