//! CHSH value of a decaying singlet and the resulting keep / post-process /
//! discard decision.

use qkd_thermal::analytics::chsh_psiminus;
use qkd_thermal::noise::{evolve, RelaxationParams, DEFAULT_T1_NS};
use qkd_thermal::protocols::{chsh_analytic, chsh_empirical, e91_run, ChshBand};
use qkd_thermal::quantum::StateLabel;

fn main() -> qkd_thermal::Result<()> {
    println!(
        "{:>10} {:>8} {:>9} {:>16} {:>13}",
        "t (ns)", "λ", "S", "S (MC)", "band"
    );
    for t in [0.0, 10_000.0, 30_000.0, 60_000.0, 200_000.0, 1_000_000.0] {
        let params = RelaxationParams::new(t, DEFAULT_T1_NS)?;
        let exact = chsh_analytic(&evolve(StateLabel::PsiMinus, params.lambda())?)?;
        assert!((exact.s_value - chsh_psiminus(params.lambda())).abs() < 1e-12);
        let est = chsh_empirical(&e91_run(90_000, StateLabel::PsiMinus, params, 9)?)?;
        println!(
            "{t:>10.0} {:>8.4} {:>9.5} {:>9.5} ± {:.3} {:>13}",
            params.lambda().value(),
            exact.s_value,
            est.s_value,
            est.std_error.unwrap_or(0.0),
            ChshBand::classify(exact.s_value, 1e-12)
        );
    }
    Ok(())
}
