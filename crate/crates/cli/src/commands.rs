//! One function per subcommand, each returning a serializable report.
//!
//! Plan numbers in every report are 1-based and follow the order in which
//! the user listed the locations.

use anyhow::{bail, Result};
use rdgame_core::entry::{fixed_cost_grid, optimal_variety, variety_sweep};
use rdgame_core::exante::{adoption_best_response, exante_prices, expected_expost_profit, spe_expected_costs};
use rdgame_core::expost::resolve_expost;
use rdgame_core::location::{deviation_scan, equilibrium_locations, foc_residuals};
use rdgame_core::oracle::{
    brute_force_variety, location_best_response_check, mc_expected_profits, price_best_response_check,
    quad_expected_losses, quad_expected_profit,
};
use rdgame_core::{
    Adoption, AdoptionSet, EntryMode, EntrySolution, IdealPoint, OracleMethod, OracleReport, PlanSpec,
    Profile, Scenario, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::output::{joined, num, opt_num, sig12, sig12_all, Render};

/// Maps 1-based input plan numbers to sorted positions.
fn sorted_positions(profile: &Profile, plans: &[usize]) -> Result<Vec<usize>> {
    plans
        .iter()
        .map(|&p| {
            if p == 0 || p > profile.len() {
                bail!("plan number {p} out of range 1..={}", profile.len());
            }
            Ok(profile.permutation().iter().position(|&q| q == p - 1).expect("permutation is complete"))
        })
        .collect()
}

/// 1-based input plan number of sorted position `k`.
fn plan_number(profile: &Profile, k: usize) -> usize {
    profile.permutation()[k] + 1
}

fn input_order(profile: &Profile, sorted: &[f64]) -> Vec<f64> {
    sig12_all(&profile.to_input_order(sorted))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqOutput {
    pub n: usize,
    pub locations: Vec<f64>,
    pub prices: Vec<f64>,
    pub profits: Vec<f64>,
    pub foc_residuals: Vec<f64>,
    pub max_deviation_gain: Vec<f64>,
    pub grid_resolution: usize,
}

pub fn eq(scenario: &Scenario) -> Result<EqOutput> {
    let n = match scenario.plans {
        PlanSpec::Count(n) => n,
        PlanSpec::Locations(_) => bail!("eq takes a plan count (--n), not explicit locations"),
    };
    let profile = equilibrium_locations::<f64>(n)?;
    let prices = exante_prices(&profile)?;
    let residuals = foc_residuals(&profile)?;
    let gains: Vec<f64> = deviation_scan(&profile, scenario.grid_resolution)?.into_iter().map(|s| s.max_gain).collect();
    Ok(EqOutput {
        n,
        locations: sig12_all(profile.locations()),
        profits: sig12_all(&prices),
        prices: sig12_all(&prices),
        foc_residuals: sig12_all(&residuals),
        max_deviation_gain: sig12_all(&gains),
        grid_resolution: scenario.grid_resolution,
    })
}

impl Render for EqOutput {
    fn summary(&self) -> Vec<(String, String)> {
        vec![("plans".into(), self.n.to_string()), ("grid".into(), self.grid_resolution.to_string())]
    }

    fn headers(&self) -> Vec<&'static str> {
        vec!["plan", "location", "price", "profit", "foc_residual", "max_deviation_gain"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| {
                // the FOC system has one equation per plan
                vec![
                    (i + 1).to_string(),
                    num(self.locations[i]),
                    num(self.prices[i]),
                    num(self.profits[i]),
                    num(self.foc_residuals[i]),
                    num(self.max_deviation_gain[i]),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpostOutput {
    pub locations: Vec<f64>,
    pub t: f64,
    pub held: Vec<usize>,
    pub purchased: Option<usize>,
    pub price_paid: f64,
    pub expost_prices: Vec<f64>,
    pub researcher_payoffs: Vec<f64>,
    pub exante_expenditure: f64,
    pub government_loss: f64,
    pub government_utility: f64,
}

pub fn expost(scenario: &Scenario, t: f64, held: &[usize], exante_expenditure: f64) -> Result<ExpostOutput> {
    let profile = scenario.profile()?;
    let ideal = IdealPoint::new(t)?;
    if !(exante_expenditure >= 0.0) {
        bail!("ex-ante expenditure must be nonnegative, got {exante_expenditure}");
    }
    let held_sorted = AdoptionSet::new(&sorted_positions(&profile, held)?, profile.len())?;
    let out = resolve_expost(&profile, &held_sorted, ideal, exante_expenditure, &scenario.prefs)?;
    let mut held_input: Vec<usize> = held.to_vec();
    held_input.sort_unstable();
    Ok(ExpostOutput {
        locations: input_order(&profile, profile.locations()),
        t: sig12(t),
        held: held_input,
        purchased: out.purchased.map(|k| plan_number(&profile, k)),
        price_paid: sig12(out.price_paid),
        expost_prices: input_order(&profile, &out.expost_prices),
        researcher_payoffs: input_order(&profile, &out.payoffs.researcher_payoffs),
        exante_expenditure: sig12(exante_expenditure),
        government_loss: sig12(out.government_loss),
        government_utility: sig12(out.payoffs.government_utility),
    })
}

impl Render for ExpostOutput {
    fn summary(&self) -> Vec<(String, String)> {
        vec![
            ("ideal point".into(), num(self.t)),
            ("purchased".into(), self.purchased.map_or_else(|| "none".into(), |p| format!("plan {p}"))),
            ("price paid".into(), num(self.price_paid)),
            ("government loss".into(), num(self.government_loss)),
            ("government utility".into(), num(self.government_utility)),
        ]
    }

    fn headers(&self) -> Vec<&'static str> {
        vec!["plan", "location", "held", "expost_price", "payoff", "purchased", "government_utility"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.locations.len())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    num(self.locations[i]),
                    self.held.contains(&(i + 1)).to_string(),
                    num(self.expost_prices[i]),
                    num(self.researcher_payoffs[i]),
                    (self.purchased == Some(i + 1)).to_string(),
                    num(self.government_utility),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeOutput {
    pub cost_adopt_all: f64,
    pub cost_adopt_none: f64,
    pub expected_utility_adopt_all: f64,
    pub expected_utility_adopt_none: f64,
    /// Reported equilibrium; the other one costs the same.
    pub canonical: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExanteOutput {
    pub locations: Vec<f64>,
    pub prices: Vec<f64>,
    pub expected_expost_profits: Vec<f64>,
    pub offers: Vec<f64>,
    pub adoption: Vec<Adoption>,
    pub spe: SpeOutput,
}

/// `offers` are in input order; `None` evaluates the equilibrium prices.
pub fn exante(scenario: &Scenario, offers: Option<&[f64]>) -> Result<ExanteOutput> {
    let profile = scenario.profile()?;
    let prices = exante_prices(&profile)?;
    let expected: Vec<f64> =
        (0..profile.len()).map(|i| expected_expost_profit(&profile, i)).collect::<rdgame_core::Result<_>>()?;
    let offers_sorted: Vec<f64> = match offers {
        None => prices.clone(),
        Some(o) => {
            if o.len() != profile.len() {
                bail!("expected {} offered prices, got {}", profile.len(), o.len());
            }
            profile.permutation().iter().map(|&p| o[p]).collect()
        }
    };
    let adoption = adoption_best_response(&profile, &offers_sorted, scenario.tolerance)?;
    let spe = spe_expected_costs(&profile, &scenario.prefs)?;
    Ok(ExanteOutput {
        locations: input_order(&profile, profile.locations()),
        prices: input_order(&profile, &prices),
        expected_expost_profits: input_order(&profile, &expected),
        offers: input_order(&profile, &offers_sorted),
        adoption: profile.to_input_order(&adoption),
        spe: SpeOutput {
            cost_adopt_all: sig12(spe.cost_adopt_all),
            cost_adopt_none: sig12(spe.cost_adopt_none),
            expected_utility_adopt_all: sig12(spe.expected_utility_adopt_all),
            expected_utility_adopt_none: sig12(spe.expected_utility_adopt_none),
            canonical: "adopt_all".into(),
        },
    })
}

fn adoption_label(a: Adoption) -> &'static str {
    match a {
        Adoption::Adopt => "adopt",
        Adoption::Reject => "reject",
        Adoption::Indifferent => "indifferent",
    }
}

impl Render for ExanteOutput {
    fn summary(&self) -> Vec<(String, String)> {
        vec![
            ("expected cost, adopt all".into(), num(self.spe.cost_adopt_all)),
            ("expected cost, adopt none".into(), num(self.spe.cost_adopt_none)),
            ("expected utility, adopt all".into(), num(self.spe.expected_utility_adopt_all)),
            ("expected utility, adopt none".into(), num(self.spe.expected_utility_adopt_none)),
            ("canonical equilibrium".into(), self.spe.canonical.clone()),
        ]
    }

    fn headers(&self) -> Vec<&'static str> {
        vec!["plan", "location", "exante_price", "expected_expost_profit", "offer", "adoption", "cost_adopt_all", "cost_adopt_none"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.locations.len())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    num(self.locations[i]),
                    num(self.prices[i]),
                    num(self.expected_expost_profits[i]),
                    num(self.offers[i]),
                    adoption_label(self.adoption[i]).into(),
                    num(self.spe.cost_adopt_all),
                    num(self.spe.cost_adopt_none),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryRow {
    pub fixed_cost: f64,
    pub mode: EntryMode,
    pub n_star: usize,
    pub alternate: Option<usize>,
    /// 1-based; absent when no plan enters.
    pub binding_plan: Option<usize>,
    pub net_profits: Vec<f64>,
}

impl From<EntrySolution> for EntryRow {
    fn from(s: EntrySolution) -> Self {
        Self {
            fixed_cost: sig12(s.fixed_cost),
            mode: s.mode,
            n_star: s.n_star,
            alternate: s.alternates,
            binding_plan: s.binding_index.map(|i| i + 1),
            net_profits: sig12_all(&s.net_profits),
        }
    }
}

fn mode_label(mode: EntryMode) -> &'static str {
    match mode {
        EntryMode::Paper => "paper",
        EntryMode::Computed => "computed",
    }
}

fn entry_cells(r: &EntryRow) -> Vec<String> {
    vec![
        num(r.fixed_cost),
        mode_label(r.mode).into(),
        r.n_star.to_string(),
        r.alternate.map_or_else(|| "-".into(), |a| a.to_string()),
        r.binding_plan.map_or_else(|| "-".into(), |b| b.to_string()),
        joined(&r.net_profits),
    ]
}

const ENTRY_HEADERS: [&str; 6] = ["fixed_cost", "mode", "n_star", "alternate", "binding_plan", "net_profits"];

pub fn entry(scenario: &Scenario, mode: EntryMode) -> Result<EntryRow> {
    Ok(optimal_variety(scenario.fixed_cost, mode)?.into())
}

impl Render for EntryRow {
    fn headers(&self) -> Vec<&'static str> {
        ENTRY_HEADERS.to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![entry_cells(self)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub rows: Vec<EntryRow>,
    /// Whether variety never rises along increasing fixed costs.
    pub nonincreasing: bool,
}

pub fn sweep(from: f64, to: f64, steps: usize, log_spacing: bool, mode: EntryMode) -> Result<SweepOutput> {
    let costs = fixed_cost_grid(from, to, steps, log_spacing)?;
    let rows: Vec<EntryRow> = variety_sweep(&costs, mode)?.into_iter().map(EntryRow::from).collect();
    let mut by_cost: Vec<(f64, usize)> = costs.iter().copied().zip(rows.iter().map(|r| r.n_star)).collect();
    by_cost.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite costs"));
    let nonincreasing = by_cost.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(SweepOutput { rows, nonincreasing })
}

impl Render for SweepOutput {
    fn summary(&self) -> Vec<(String, String)> {
        vec![("nonincreasing".into(), self.nonincreasing.to_string())]
    }

    fn headers(&self) -> Vec<&'static str> {
        ENTRY_HEADERS.to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(entry_cells).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub plan: usize,
    pub location: f64,
    pub status_quo: f64,
    pub best_location: f64,
    pub best_profit: f64,
    pub max_gain: f64,
    pub best_jump_profit: Option<f64>,
    pub best_edge_profit: Option<f64>,
    /// Same gain with every profit re-integrated by quadrature.
    pub quadrature_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditOutput {
    pub grid_resolution: usize,
    pub rows: Vec<AuditRow>,
}

pub fn audit(scenario: &Scenario) -> Result<AuditOutput> {
    let profile = scenario.profile()?;
    let scans = deviation_scan(&profile, scenario.grid_resolution)?;
    let mut rows: Vec<AuditRow> = scans
        .into_iter()
        .map(|s| {
            let twin = location_best_response_check(&profile, s.researcher, scenario.grid_resolution)?;
            Ok(AuditRow {
                plan: plan_number(&profile, s.researcher),
                location: sig12(profile.get(s.researcher)),
                status_quo: sig12(s.status_quo),
                best_location: sig12(s.best_location),
                best_profit: sig12(s.best_profit),
                max_gain: sig12(s.max_gain),
                best_jump_profit: s.best_jump_profit.map(sig12),
                best_edge_profit: s.best_edge_profit.map(sig12),
                quadrature_gain: sig12(twin.oracle_value),
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| r.plan);
    Ok(AuditOutput { grid_resolution: scenario.grid_resolution, rows })
}

impl Render for AuditOutput {
    fn summary(&self) -> Vec<(String, String)> {
        vec![("grid".into(), self.grid_resolution.to_string())]
    }

    fn headers(&self) -> Vec<&'static str> {
        vec![
            "plan",
            "location",
            "status_quo",
            "best_location",
            "best_profit",
            "max_gain",
            "best_jump_profit",
            "best_edge_profit",
            "quadrature_gain",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.plan.to_string(),
                    num(r.location),
                    num(r.status_quo),
                    num(r.best_location),
                    num(r.best_profit),
                    num(r.max_gain),
                    opt_num(r.best_jump_profit),
                    opt_num(r.best_edge_profit),
                    num(r.quadrature_gain),
                ]
            })
            .collect()
    }
}

/// Extra rows `verify` can add on request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExtraCheck {
    /// Compare the published equal-spacing profit constants (1/n^3 at the
    /// ends, 2/n^3 inside) with quadrature.
    #[value(name = "paper-eq16")]
    PublishedProfits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub locations: Vec<f64>,
    pub rows: Vec<OracleReport>,
    pub passed: bool,
}

const SIMPSON_PANELS: usize = 64;
const CLOSED_FORM_TOLERANCE: f64 = 1e-10;
const AUDIT_AGREEMENT: f64 = 1e-8;
const PRICE_STEP: f64 = 1e-4;
const PROBE_POINTS: [f64; 5] = [0.05, 0.3, 0.5, 0.7, 0.95];

fn rounded(mut r: OracleReport) -> OracleReport {
    r.closed_form_value = sig12(r.closed_form_value);
    r.oracle_value = sig12(r.oracle_value);
    r.abs_error = sig12(r.abs_error);
    r.stderr = r.stderr.map(sig12);
    r.tolerance = sig12(r.tolerance);
    r
}

fn role(n: usize, k: usize) -> &'static str {
    if k == 0 || k + 1 == n {
        "boundary"
    } else {
        "interior"
    }
}

pub fn verify(scenario: &Scenario, checks: &[ExtraCheck]) -> Result<VerifyOutput> {
    let profile = scenario.profile()?;
    let n = profile.len();
    let mut rows = Vec::new();

    let worst = foc_residuals(&profile)?.into_iter().fold(0.0f64, |m, r| m.max(r.abs()));
    rows.push(OracleReport::compare("first-order residual, max abs", 0.0, worst, OracleMethod::Exhaustive, n, 1e-12));

    let prices = exante_prices(&profile)?;
    for (k, &price) in prices.iter().enumerate() {
        let quad = quad_expected_profit(&profile, k, SIMPSON_PANELS)?;
        rows.push(OracleReport::compare(
            format!("{} expected profit, plan {}", role(n, k), plan_number(&profile, k)),
            price,
            quad,
            OracleMethod::Simpson,
            SIMPSON_PANELS,
            CLOSED_FORM_TOLERANCE,
        ));
    }

    for (k, (mean, se)) in mc_expected_profits(&profile, scenario.mc_samples, scenario.rng_seed)?.into_iter().enumerate() {
        let mut r = OracleReport::compare(
            format!("{} expected profit, plan {}", role(n, k), plan_number(&profile, k)),
            prices[k],
            mean,
            OracleMethod::MonteCarlo,
            scenario.mc_samples,
            4.0 * se,
        );
        r.stderr = Some(se);
        rows.push(r);
    }

    let spe = spe_expected_costs(&profile, &scenario.prefs)?;
    let (near, runner_up) = quad_expected_losses(&profile, SIMPSON_PANELS)?;
    let bill: f64 = prices.iter().sum();
    rows.push(OracleReport::compare(
        "expected cost, adopt all",
        spe.cost_adopt_all,
        bill + near,
        OracleMethod::Simpson,
        SIMPSON_PANELS,
        CLOSED_FORM_TOLERANCE,
    ));
    rows.push(OracleReport::compare(
        "expected cost, adopt none",
        spe.cost_adopt_none,
        runner_up,
        OracleMethod::Simpson,
        SIMPSON_PANELS,
        CLOSED_FORM_TOLERANCE,
    ));
    rows.push(OracleReport::compare(
        "equilibrium cost gap, adopt all vs adopt none",
        spe.cost_adopt_all,
        runner_up,
        OracleMethod::Simpson,
        SIMPSON_PANELS,
        CLOSED_FORM_TOLERANCE,
    ));

    for &t in &PROBE_POINTS {
        let mut r = price_best_response_check(&profile, &AdoptionSet::empty(), IdealPoint::new(t)?, PRICE_STEP)?;
        r.quantity = format!("ex-post price bracket at t = {t}");
        rows.push(r);
    }

    for k in 0..n {
        let mut r = location_best_response_check(&profile, k, scenario.grid_resolution)?;
        r.quantity = format!("max relocation gain, plan {}", plan_number(&profile, k));
        r.tolerance = AUDIT_AGREEMENT;
        // equilibrium condition: neither audit finds a gain above tolerance
        let mut eq_row = OracleReport::compare(
            format!("no profitable relocation, plan {}", plan_number(&profile, k)),
            0.0,
            r.oracle_value,
            OracleMethod::GridSearch,
            scenario.grid_resolution,
            scenario.tolerance,
        );
        eq_row.verdict = Verdict::from_check(r.closed_form_value <= scenario.tolerance && r.oracle_value <= scenario.tolerance);
        rows.push(r);
        rows.push(eq_row);
    }

    if scenario.fixed_cost > 0.0 {
        let n_max = (1.0 / scenario.fixed_cost).cbrt().ceil() as usize + 2;
        for mode in [EntryMode::Paper, EntryMode::Computed] {
            let closed = optimal_variety(scenario.fixed_cost, mode)?.n_star;
            let brute = brute_force_variety(scenario.fixed_cost, n_max, mode)?;
            rows.push(OracleReport::compare(
                format!("optimal variety ({} mode)", mode_label(mode)),
                closed as f64,
                brute as f64,
                OracleMethod::Exhaustive,
                n_max,
                0.0,
            ));
        }
    }

    for check in checks {
        match check {
            ExtraCheck::PublishedProfits => {
                let spaced = equilibrium_locations::<f64>(n)?;
                let n3 = (n * n * n) as f64;
                let boundary = quad_expected_profit(&spaced, 0, SIMPSON_PANELS)?;
                rows.push(OracleReport::compare(
                    "published boundary profit 1/n^3",
                    1.0 / n3,
                    boundary,
                    OracleMethod::Simpson,
                    SIMPSON_PANELS,
                    CLOSED_FORM_TOLERANCE,
                ));
                if n >= 3 {
                    let interior = quad_expected_profit(&spaced, 1, SIMPSON_PANELS)?;
                    let mut r = OracleReport::compare(
                        "published interior profit 2/n^3",
                        2.0 / n3,
                        interior,
                        OracleMethod::Simpson,
                        SIMPSON_PANELS,
                        CLOSED_FORM_TOLERANCE,
                    );
                    if r.verdict == Verdict::Fail {
                        r.verdict = Verdict::PaperConflict;
                    }
                    rows.push(r);
                }
            }
        }
    }

    let rows: Vec<OracleReport> = rows.into_iter().map(rounded).collect();
    let passed = rows.iter().all(|r| r.verdict != Verdict::Fail);
    Ok(VerifyOutput { locations: input_order(&profile, profile.locations()), rows, passed })
}

fn method_label(m: OracleMethod) -> &'static str {
    match m {
        OracleMethod::Simpson => "simpson",
        OracleMethod::MonteCarlo => "monte_carlo",
        OracleMethod::GridSearch => "grid_search",
        OracleMethod::Exhaustive => "exhaustive",
    }
}

impl Render for VerifyOutput {
    fn summary(&self) -> Vec<(String, String)> {
        let failed = self.rows.iter().filter(|r| r.verdict == Verdict::Fail).count();
        vec![
            ("checks".into(), self.rows.len().to_string()),
            ("failed".into(), failed.to_string()),
            ("result".into(), if self.passed { "pass" } else { "fail" }.into()),
        ]
    }

    fn headers(&self) -> Vec<&'static str> {
        vec!["quantity", "method", "closed_form", "oracle", "abs_error", "tolerance", "stderr", "samples", "verdict"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.quantity.clone(),
                    method_label(r.method).into(),
                    num(r.closed_form_value),
                    num(r.oracle_value),
                    num(r.abs_error),
                    num(r.tolerance),
                    opt_num(r.stderr),
                    r.samples_or_resolution.to_string(),
                    r.verdict.label().into(),
                ]
            })
            .collect()
    }
}
