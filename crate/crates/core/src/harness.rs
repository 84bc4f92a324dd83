//! Time-grid sweeps pairing closed-form values with Monte Carlo estimates.
//!
//! Each grid point gets its own seed (`seed ⊕ mix(index)`), so points can run
//! on any number of threads and still produce the same rows. Rows come out
//! ordered by grid point, then by quantity name.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::analytics::{self, eve::eve_monte_carlo, EveStrategy};
use crate::error::{Error, Result};
use crate::noise::{evolve, RelaxationParams, DEFAULT_T1_NS};
use crate::protocols::{chsh_analytic, chsh_empirical, e91_run, Bb84Source, Bb84Variant};
use crate::quantum::{measure_distribution, BasisKind, StateLabel};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepProtocol {
    Bb84Zx,
    Bb84Xy,
    E91PhiPlus,
    E91PsiPlus,
    ChshPsiMinus,
}

impl SweepProtocol {
    pub const ALL: [SweepProtocol; 5] = [
        SweepProtocol::Bb84Zx,
        SweepProtocol::Bb84Xy,
        SweepProtocol::E91PhiPlus,
        SweepProtocol::E91PsiPlus,
        SweepProtocol::ChshPsiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepProtocol::Bb84Zx => "bb84_zx",
            SweepProtocol::Bb84Xy => "bb84_xy",
            SweepProtocol::E91PhiPlus => "e91_phiplus",
            SweepProtocol::E91PsiPlus => "e91_psiplus",
            SweepProtocol::ChshPsiMinus => "chsh_psiminus",
        }
    }

    /// Quantity names recorded at every grid point, sorted.
    pub fn quantities(self) -> &'static [&'static str] {
        match self {
            SweepProtocol::Bb84Zx => &[
                "eve_z_bias",
                "outcome_0",
                "outcome_1",
                "outcome_minus",
                "outcome_plus",
                "p0_minus_in_z",
                "p0_plus_in_z",
                "p1_given_1",
                "pminus_given_minus",
                "pplus_given_plus",
                "success",
            ],
            SweepProtocol::Bb84Xy => &[
                "eve_x_bias",
                "outcome_minus",
                "outcome_minusi",
                "outcome_plus",
                "outcome_plusi",
                "pminus_given_minus",
                "pminusi_given_minusi",
                "pplus_given_plus",
                "pplusi_given_plusi",
                "success",
            ],
            SweepProtocol::E91PhiPlus | SweepProtocol::E91PsiPlus => {
                &["p00", "p01", "p10", "p11", "success"]
            }
            SweepProtocol::ChshPsiMinus => {
                &["chsh_s", "corr_a1b2", "corr_a1b3", "corr_a2b2", "corr_a2b3"]
            }
        }
    }
}

impl fmt::Display for SweepProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepProtocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig {
                field: "protocol",
                reason: format!(
                    "unknown protocol `{s}` (expected one of {})",
                    Self::ALL.map(|p| p.name()).join(", ")
                ),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub protocol: SweepProtocol,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub t1: f64,
    pub shots: usize,
    pub seed: u64,
    /// Quantities to keep; empty keeps all.
    pub observables: Vec<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            protocol: SweepProtocol::Bb84Zx,
            t_start: 0.0,
            t_end: 5.0 * DEFAULT_T1_NS,
            steps: 50,
            t1: DEFAULT_T1_NS,
            shots: 100_000,
            seed: 0,
            observables: Vec::new(),
        }
    }
}

impl SweepConfig {
    pub fn new(protocol: SweepProtocol) -> Self {
        Self {
            protocol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: String| Err(Error::InvalidConfig { field, reason });
        if !(self.t1 > 0.0 && self.t1.is_finite()) {
            return bad("t1", format!("must be positive, got {}", self.t1));
        }
        if !(self.t_start >= 0.0 && self.t_start.is_finite()) {
            return bad(
                "t_start",
                format!("must be non-negative, got {}", self.t_start),
            );
        }
        if !(self.t_end > self.t_start && self.t_end.is_finite()) {
            return bad(
                "t_end",
                format!("must exceed t_start ({}), got {}", self.t_start, self.t_end),
            );
        }
        if self.steps < 2 {
            return bad(
                "steps",
                format!("need at least 2 grid points, got {}", self.steps),
            );
        }
        if self.shots == 0 {
            return bad("shots", "need at least 1 shot per grid point".into());
        }
        let known = self.protocol.quantities();
        if let Some(q) = self
            .observables
            .iter()
            .find(|q| !known.contains(&q.as_str()))
        {
            return bad(
                "observables",
                format!(
                    "`{q}` is not recorded by {} (known: {})",
                    self.protocol,
                    known.join(", ")
                ),
            );
        }
        Ok(())
    }

    /// Uniformly spaced times, endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        let span = self.t_end - self.t_start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.t_end
                } else {
                    self.t_start + span * i as f64 / last
                }
            })
            .collect()
    }

    pub fn point_seed(&self, index: usize) -> u64 {
        self.seed ^ rng::mix(index as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantityKind {
    /// A probability estimated as hits/shots.
    Proportion,
    /// A mean of ±1 products, or a combination of such means.
    Correlation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub t_ns: f64,
    pub lambda: f64,
    pub quantity: &'static str,
    pub analytic: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub shots: usize,
    pub kind: QuantityKind,
}

impl SweepRow {
    fn proportion(quantity: &'static str, analytic: f64, hits: usize, shots: usize) -> Self {
        // a conditional rate with no trials is reported as 0/0 → 0 with zero shots
        let (p, se) = if shots == 0 {
            (0.0, 0.0)
        } else {
            let p = hits as f64 / shots as f64;
            (p, (p * (1.0 - p) / shots as f64).sqrt())
        };
        Self {
            t_ns: 0.0,
            lambda: 0.0,
            quantity,
            analytic,
            empirical: p,
            std_error: se,
            shots,
            kind: QuantityKind::Proportion,
        }
    }

    fn correlation(
        quantity: &'static str,
        analytic: f64,
        empirical: f64,
        std_error: f64,
        shots: usize,
    ) -> Self {
        Self {
            t_ns: 0.0,
            lambda: 0.0,
            quantity,
            analytic,
            empirical,
            std_error,
            shots,
            kind: QuantityKind::Correlation,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn quantity(&self, name: &str) -> impl Iterator<Item = &SweepRow> + '_ {
        let name = name.to_owned();
        self.rows.iter().filter(move |r| r.quantity == name)
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let grid = cfg.grid();
    let per_point: Vec<Vec<SweepRow>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| point_rows(cfg, i, t))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(per_point.iter().map(Vec::len).sum());
    for mut point in per_point {
        point.retain(|r| {
            cfg.observables.is_empty() || cfg.observables.iter().any(|q| q == r.quantity)
        });
        point.sort_by(|a, b| a.quantity.cmp(b.quantity));
        rows.extend(point);
    }
    Ok(SweepResult {
        config: cfg.clone(),
        rows,
    })
}

fn point_rows(cfg: &SweepConfig, index: usize, t: f64) -> Result<Vec<SweepRow>> {
    let params = RelaxationParams::new(t, cfg.t1)?;
    let seed = cfg.point_seed(index);
    let mut rows = match cfg.protocol {
        SweepProtocol::Bb84Zx => bb84_rows(Bb84Variant::ZX, params, cfg.shots, seed)?,
        SweepProtocol::Bb84Xy => bb84_rows(Bb84Variant::XY, params, cfg.shots, seed)?,
        SweepProtocol::E91PhiPlus => bell_zz_rows(StateLabel::PhiPlus, params, cfg.shots, seed)?,
        SweepProtocol::E91PsiPlus => bell_zz_rows(StateLabel::PsiPlus, params, cfg.shots, seed)?,
        SweepProtocol::ChshPsiMinus => chsh_rows(params, cfg.shots, seed)?,
    };
    for r in &mut rows {
        r.t_ns = t;
        r.lambda = params.lambda().value();
    }
    Ok(rows)
}

#[derive(Default, Clone, Copy)]
struct Tally {
    hits: usize,
    total: usize,
}

impl Tally {
    fn add(&mut self, hit: bool) {
        self.hits += usize::from(hit);
        self.total += 1;
    }
}

fn bb84_rows(
    variant: Bb84Variant,
    params: RelaxationParams,
    shots: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let lambda = params.lambda();
    let mut source = Bb84Source::new(variant, params, seed)?;
    let rounds = source.run_until_sifted(shots);
    let states = variant.states();

    let mut success = Tally::default();
    let mut survival = [Tally::default(); 4];
    let mut outcomes = [0usize; 4];
    let mut ground_in_z = [Tally::default(); 2];
    for r in &rounds {
        let slot = states
            .iter()
            .position(|s| *s == r.prepared)
            .expect("variant state");
        if r.sifted {
            success.add(r.is_success());
            survival[slot].add(r.is_success());
            outcomes[states
                .iter()
                .position(|s| *s == r.bob_outcome)
                .expect("variant state")] += 1;
        } else if variant == Bb84Variant::ZX && r.bob_basis == BasisKind::Z {
            ground_in_z[slot - 2].add(r.bob_outcome == StateLabel::S0);
        }
    }

    let mut rows = Vec::new();
    let success_analytic = match variant {
        Bb84Variant::ZX => analytics::bb84_success(lambda),
        Bb84Variant::XY => analytics::bb84_xy_success(lambda),
    };
    rows.push(SweepRow::proportion(
        "success",
        success_analytic,
        success.hits,
        success.total,
    ));

    let survival_names: [&'static str; 4] = match variant {
        Bb84Variant::ZX => [
            "p0_given_0",
            "p1_given_1",
            "pplus_given_plus",
            "pminus_given_minus",
        ],
        Bb84Variant::XY => [
            "pplus_given_plus",
            "pminus_given_minus",
            "pplusi_given_plusi",
            "pminusi_given_minusi",
        ],
    };
    let outcome_names: [&'static str; 4] = match variant {
        Bb84Variant::ZX => ["outcome_0", "outcome_1", "outcome_plus", "outcome_minus"],
        Bb84Variant::XY => [
            "outcome_plus",
            "outcome_minus",
            "outcome_plusi",
            "outcome_minusi",
        ],
    };
    let dist = analytics::sifted_outcome_distribution(variant, lambda);
    for (k, state) in states.into_iter().enumerate() {
        // |0⟩ never decays; its survival row would be constant and is not recorded
        if state != StateLabel::S0 {
            let analytic = analytics::bb84_state_survival(lambda, state).expect("BB84 state");
            rows.push(SweepRow::proportion(
                survival_names[k],
                analytic,
                survival[k].hits,
                survival[k].total,
            ));
        }
        let p = dist.get(state).expect("variant state");
        rows.push(SweepRow::proportion(
            outcome_names[k],
            p,
            outcomes[k],
            success.total,
        ));
    }

    if variant == Bb84Variant::ZX {
        let ground = analytics::z_ground_population(lambda);
        rows.push(SweepRow::proportion(
            "p0_plus_in_z",
            ground,
            ground_in_z[0].hits,
            ground_in_z[0].total,
        ));
        rows.push(SweepRow::proportion(
            "p0_minus_in_z",
            ground,
            ground_in_z[1].hits,
            ground_in_z[1].total,
        ));
    }

    let (name, strategy) = match variant {
        Bb84Variant::ZX => ("eve_z_bias", EveStrategy::z_bias()),
        Bb84Variant::XY => ("eve_x_bias", EveStrategy::x_bias()),
    };
    let analytic = analytics::eve_success(&strategy, &dist)?;
    let tally = eve_monte_carlo(&strategy, variant, params, shots, seed)?;
    rows.push(SweepRow::proportion(
        name,
        analytic,
        tally.hits,
        tally.rounds,
    ));
    Ok(rows)
}

fn bell_zz_rows(
    source: StateLabel,
    params: RelaxationParams,
    shots: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let lambda = params.lambda();
    let rho = evolve(source, lambda)?;
    let dist = measure_distribution(&rho, &[BasisKind::Z, BasisKind::Z])?;
    let mut nature = rng::stream(seed, rng::CHANNEL);
    let mut counts = [0usize; 4];
    for _ in 0..shots {
        counts[dist.sample(&mut nature)] += 1;
    }
    let (joint, success_analytic, success_hits) = match source {
        StateLabel::PhiPlus => (
            analytics::e91_phiplus_joint(lambda),
            analytics::e91_phiplus_success(lambda),
            counts[0] + counts[3],
        ),
        _ => (
            analytics::e91_psiplus_joint(lambda),
            analytics::e91_psiplus_success(lambda),
            counts[1] + counts[2],
        ),
    };
    let names = ["p00", "p01", "p10", "p11"];
    let mut rows: Vec<SweepRow> = (0..4)
        .map(|k| SweepRow::proportion(names[k], joint[k], counts[k], shots))
        .collect();
    rows.push(SweepRow::proportion(
        "success",
        success_analytic,
        success_hits,
        shots,
    ));
    Ok(rows)
}

fn chsh_rows(params: RelaxationParams, shots: usize, seed: u64) -> Result<Vec<SweepRow>> {
    let analytic = chsh_analytic(&evolve(StateLabel::PsiMinus, params.lambda())?)?;
    let tr = e91_run(shots, StateLabel::PsiMinus, params, seed)?;
    let empirical = chsh_empirical(&tr)?;
    let counts = empirical.counts.clone().unwrap_or_default();
    let mut rows = vec![SweepRow::correlation(
        "chsh_s",
        analytic.s_value,
        empirical.s_value,
        empirical.std_error.unwrap_or(0.0),
        empirical.total_count(),
    )];
    for (pair, &c_hat) in &empirical.correlations {
        let n = counts[pair];
        let name = match (pair.alice, pair.bob) {
            (1, 2) => "corr_a1b2",
            (1, 3) => "corr_a1b3",
            (2, 2) => "corr_a2b2",
            _ => "corr_a2b3",
        };
        let se = ((1.0 - c_hat * c_hat) / n as f64).sqrt();
        rows.push(SweepRow::correlation(
            name,
            analytic.correlations[pair],
            c_hat,
            se,
            n,
        ));
    }
    Ok(rows)
}

/// Below this expected count the normal approximation for a proportion is
/// not trusted, and the row is reported but left out of the verdict.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RowCheck {
    pub index: usize,
    pub quantity: &'static str,
    pub t_ns: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub z_threshold: f64,
    pub rows_checked: usize,
    pub max_z: f64,
    /// Rows with z above the threshold.
    pub failing: Vec<RowCheck>,
    /// Rows whose standard error is zero while the estimate disagrees with the analytic value.
    pub hard_failures: Vec<RowCheck>,
    /// Proportion rows with fewer than [`MIN_EXPECTED_COUNT`] expected hits or misses.
    pub underpowered: Vec<RowCheck>,
    /// Rows expected to exceed the threshold by chance alone: `rows · P(|N(0,1)| > z)`.
    pub expected_false_failures: f64,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.failing.is_empty() && self.hard_failures.is_empty()
    }
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} rows checked, max z = {:.3}, threshold {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.rows_checked,
            self.max_z,
            self.z_threshold
        )?;
        writeln!(
            f,
            "  multiple comparisons: {:.3} rows expected above threshold by chance",
            self.expected_false_failures
        )?;
        for r in &self.hard_failures {
            writeln!(
                f,
                "  hard failure: {} at t = {} ns (zero std error, estimate disagrees)",
                r.quantity, r.t_ns
            )?;
        }
        for r in &self.failing {
            writeln!(
                f,
                "  failing: {} at t = {} ns, z = {:.3}",
                r.quantity, r.t_ns, r.z
            )?;
        }
        if !self.underpowered.is_empty() {
            writeln!(
                f,
                "  {} underpowered rows excluded (expected count < {MIN_EXPECTED_COUNT})",
                self.underpowered.len()
            )?;
        }
        Ok(())
    }
}

/// Per-row z-scores `|empirical − analytic| / std_error` against a threshold.
pub fn compare(res: &SweepResult, z_threshold: f64) -> CompareReport {
    let mut report = CompareReport {
        z_threshold,
        rows_checked: 0,
        max_z: 0.0,
        failing: Vec::new(),
        hard_failures: Vec::new(),
        underpowered: Vec::new(),
        expected_false_failures: 0.0,
    };
    for (index, row) in res.rows.iter().enumerate() {
        let diff = (row.empirical - row.analytic).abs();
        let check = |z| RowCheck {
            index,
            quantity: row.quantity,
            t_ns: row.t_ns,
            z,
        };
        if row.kind == QuantityKind::Proportion {
            let n = row.shots as f64;
            let in_range = (0.0..=1.0).contains(&row.analytic);
            if in_range
                && row.analytic.min(1.0 - row.analytic) * n < MIN_EXPECTED_COUNT
                && diff > 1e-12
            {
                report.underpowered.push(check(f64::NAN));
                continue;
            }
        }
        report.rows_checked += 1;
        if row.std_error == 0.0 || !row.std_error.is_finite() {
            if diff > 1e-12 || !diff.is_finite() {
                report.hard_failures.push(check(f64::INFINITY));
            }
            continue;
        }
        let z = diff / row.std_error;
        report.max_z = report.max_z.max(z);
        if z > z_threshold {
            report.failing.push(check(z));
        }
    }
    report.expected_false_failures =
        report.rows_checked as f64 * erfc(z_threshold / std::f64::consts::SQRT_2);
    report
}
