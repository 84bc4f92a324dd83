//! Thermal relaxation channel: completeness, and numeric evolution against
//! the closed-form matrices.

use qkd_thermal::noise::{
    evolve, evolved_analytic, KrausChannel, Lambda, RelaxationParams, DEFAULT_T1_NS,
};
use qkd_thermal::quantum::StateLabel;

fn main() -> qkd_thermal::Result<()> {
    let params = RelaxationParams::new(DEFAULT_T1_NS, DEFAULT_T1_NS)?;
    let channel = KrausChannel::from_params(&params);
    println!("t = T1 → λ = {:.6}", params.lambda().value());
    for (k, e) in channel.operators().iter().enumerate() {
        println!("E{} =\n{e:?}", k + 1);
    }
    println!(
        "completeness residual: {:.2e}",
        channel.completeness_residual()?
    );
    println!(
        "two-qubit lift residual: {:.2e}\n",
        channel.lift_two_qubit()?.completeness_residual()?
    );

    println!("{:>6} {:>8} {:>12}", "state", "λ", "max |Δ|");
    for label in [
        StateLabel::S1,
        StateLabel::Plus,
        StateLabel::PlusI,
        StateLabel::PhiPlus,
        StateLabel::PsiPlus,
    ] {
        for l in [0.1, 0.5, 0.9] {
            let lambda = Lambda::new(l)?;
            let d = evolve(label, lambda)?
                .matrix()
                .max_abs_diff(evolved_analytic(label, lambda)?.matrix())?;
            println!("{:>6} {l:>8.2} {d:>12.2e}", label.to_string());
        }
    }
    println!(
        "\nφ⁺ at λ = 0.5:\n{:?}",
        evolve(StateLabel::PhiPlus, Lambda::new(0.5)?)?
    );
    Ok(())
}
