//! E91 key agreement over decaying φ⁺ and ψ⁺ pairs, and the φ⁺ minimum at
//! t = T1·ln 2.

use qkd_thermal::analytics::{
    e91_phiplus_joint, e91_phiplus_min_time, e91_phiplus_success, e91_psiplus_success,
};
use qkd_thermal::noise::{Lambda, RelaxationParams, DEFAULT_T1_NS};
use qkd_thermal::protocols::e91_run;
use qkd_thermal::quantum::StateLabel;

fn main() -> qkd_thermal::Result<()> {
    let t_min = e91_phiplus_min_time(DEFAULT_T1_NS)?;
    println!("φ⁺ success is lowest at t = T1·ln2 = {t_min:.3} ns\n");

    println!(
        "{:>12} {:>8} {:>10} {:>10} {:>10} {:>10}",
        "t (ns)", "λ", "φ⁺", "P01", "ψ⁺", "φ⁺ (MC)"
    );
    for t in [0.0, 50_000.0, t_min, 300_000.0, 600_000.0, 1_500_000.0] {
        let l = Lambda::from_time(t, DEFAULT_T1_NS)?;
        let tr = e91_run(
            60_000,
            StateLabel::PhiPlus,
            RelaxationParams::new(t, DEFAULT_T1_NS)?,
            5,
        )?;
        // key rounds where both sides measured Z
        let zz: Vec<_> = tr
            .e91_rounds()?
            .iter()
            .filter(|r| r.alice_setting == 1 && r.bob_setting == 1)
            .collect();
        let agree = zz
            .iter()
            .filter(|r| r.alice_outcome == r.bob_outcome)
            .count() as f64
            / zz.len() as f64;
        println!(
            "{t:>12.1} {:>8.4} {:>10.5} {:>10.5} {:>10.5} {agree:>10.5}",
            l.value(),
            e91_phiplus_success(l),
            e91_phiplus_joint(l)[1],
            e91_psiplus_success(l)
        );
    }
    Ok(())
}
