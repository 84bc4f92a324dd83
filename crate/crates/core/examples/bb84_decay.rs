//! BB84 over a decaying channel: sifting, check bits and the success rate
//! against the closed form.

use qkd_thermal::analytics::bb84_success;
use qkd_thermal::noise::{RelaxationParams, DEFAULT_T1_NS};
use qkd_thermal::protocols::{
    bb84_key, bb84_run, check_bits, sift, Bb84Variant, DEFAULT_QBER_THRESHOLD,
};

fn main() -> qkd_thermal::Result<()> {
    println!(
        "{:>10} {:>8} {:>9} {:>9} {:>8} {:>6}",
        "t/T1", "λ", "analytic", "sifted", "qber", "abort"
    );
    for frac in [0.0, 0.1, 0.5, 1.0, 3.0] {
        let params = RelaxationParams::new(frac * DEFAULT_T1_NS, DEFAULT_T1_NS)?;
        let mut tr = bb84_run(40_000, Bb84Variant::ZX, params, 7)?;
        let kept = sift(&tr)?;
        let rate = kept.iter().filter(|r| r.is_success()).count() as f64 / kept.len() as f64;
        let report = check_bits(&mut tr, 0.5, DEFAULT_QBER_THRESHOLD, 7)?;
        println!(
            "{frac:>10.1} {:>8.4} {:>9.5} {rate:>9.5} {:>8.4} {:>6}",
            params.lambda().value(),
            bb84_success(params.lambda()),
            report.qber,
            report.abort
        );
        if frac == 0.0 {
            let (alice, bob) = bb84_key(&tr)?;
            println!(
                "{:>10} noiseless key: {} bits, identical: {}",
                "",
                alice.len(),
                alice == bob
            );
        }
    }
    Ok(())
}
