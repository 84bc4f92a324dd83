//! A guessing eavesdropper who knows the channel: her edge over ¼ under
//! Z/X BB84, and how the X/Y variant takes it away.

use qkd_thermal::analytics::{
    best_deterministic_guess, eve_brute_force, eve_monte_carlo, eve_success,
    sifted_outcome_distribution, EveStrategy,
};
use qkd_thermal::noise::{Lambda, RelaxationParams, DEFAULT_T1_NS};
use qkd_thermal::protocols::Bb84Variant;
use qkd_thermal::rng::SimRng;
use rand::SeedableRng;

fn main() -> qkd_thermal::Result<()> {
    let strategy = EveStrategy::z_bias();
    println!("strategy {}: {:?}\n", strategy.label(), strategy.guesses());
    println!(
        "{:>5} {:>9} {:>9} {:>9} {:>12}",
        "λ", "analytic", "enum", "MC", "best guess"
    );
    for l in [0.0, 0.2, 0.4, 0.8, 1.0] {
        let lambda = Lambda::new(l)?;
        let dist = sifted_outcome_distribution(Bb84Variant::ZX, lambda);
        let params = RelaxationParams::from_lambda(l, DEFAULT_T1_NS)?;
        let mc = eve_monte_carlo(&strategy, Bb84Variant::ZX, params, 50_000, 1)?;
        let (state, p) = best_deterministic_guess(&dist);
        println!(
            "{l:>5.1} {:>9.5} {:>9.5} {:>9.5} {:>6} {p:.3}",
            eve_success(&strategy, &dist)?,
            eve_brute_force(&strategy, Bb84Variant::ZX, lambda)?,
            mc.rate(),
            state.to_string()
        );
    }

    let mut rng = SimRng::seed_from_u64(0);
    let lambda = Lambda::new(0.7)?;
    let dist = sifted_outcome_distribution(Bb84Variant::XY, lambda);
    println!("\nX/Y variant at λ = 0.7:");
    for _ in 0..4 {
        let s = EveStrategy::random(Bb84Variant::XY, &mut rng);
        println!("  random strategy → {:.12}", eve_success(&s, &dist)?);
    }
    println!(
        "  Z-bias strategy → {}",
        eve_success(&strategy, &dist).unwrap_err()
    );
    Ok(())
}
