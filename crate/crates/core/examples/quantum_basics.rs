//! States, observables and Born-rule sampling on one and two qubits.

use qkd_thermal::quantum::{
    expectation, measure_distribution, BasisKind, DensityMatrix, ObservableLabel, StateLabel,
};
use qkd_thermal::rng;

fn main() -> qkd_thermal::Result<()> {
    for label in StateLabel::ALL {
        let amps: Vec<String> = label
            .canonical_state()
            .amplitudes()
            .iter()
            .map(|a| format!("{a:.4}"))
            .collect();
        println!("|{label}⟩ = ({})", amps.join(", "));
    }

    let singlet = DensityMatrix::from_label(StateLabel::PsiMinus);
    let z_b3 = ObservableLabel::Z
        .observable()
        .tensor(&ObservableLabel::ZPlusX.observable())?;
    println!(
        "\n⟨ψ⁻| Z ⊗ (Z+X)/√2 |ψ⁻⟩ = {:.6}",
        expectation(&z_b3, &singlet)?
    );

    let phi = DensityMatrix::from_label(StateLabel::PhiPlus);
    let zz = measure_distribution(&phi, &[BasisKind::Z, BasisKind::Z])?;
    println!("φ⁺ in Z⊗Z: {:?}", zz.probs());

    let mut rng = rng::stream(1, rng::CHANNEL);
    let plus = measure_distribution(
        &DensityMatrix::from_label(StateLabel::Plus),
        &[BasisKind::Z],
    )?;
    let ones = (0..10_000).filter(|_| plus.sample(&mut rng) == 1).count();
    println!("|+⟩ measured in Z 10000 times: {ones} ones");
    Ok(())
}
