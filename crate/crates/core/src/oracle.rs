//! Brute-force twins of the closed forms: composite Simpson quadrature,
//! seeded Monte Carlo, discretised best-response scans and an exhaustive
//! variety search.
//!
//! The integrand here is evaluated straight from the neighbour form
//! `max{0, min{(t - z_{i-1})^2, (t - z_{i+1})^2} - (t - z_i)^2}` and never
//! touches the antiderivatives or cubic price formulas it is meant to check.
//!
//! Monte Carlo draws come from ChaCha8 seeded with `seed_from_u64`, so a
//! given `(seed, samples)` pair reproduces bit-for-bit on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entry::EntryMode;
use crate::error::{GameError, Result};
use crate::expost::expost_profit;
use crate::location::deviation_scan;
use crate::model::{AdoptionSet, IdealPoint, LocationProfile, TIE_EPSILON};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Simpson,
    MonteCarlo,
    GridSearch,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    /// The oracle contradicts a published constant; informational, not a failure.
    #[serde(rename = "paper-conflict")]
    PaperConflict,
}

impl Verdict {
    pub fn from_check(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::PaperConflict => "paper-conflict",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub closed_form_value: f64,
    pub oracle_value: f64,
    pub abs_error: f64,
    pub method: OracleMethod,
    pub samples_or_resolution: usize,
    /// Present only for Monte Carlo rows.
    pub stderr: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl OracleReport {
    /// Row passing when `abs_error <= tolerance`.
    pub fn compare(
        quantity: impl Into<String>,
        closed_form_value: f64,
        oracle_value: f64,
        method: OracleMethod,
        samples_or_resolution: usize,
        tolerance: f64,
    ) -> Self {
        let abs_error = (closed_form_value - oracle_value).abs();
        Self {
            quantity: quantity.into(),
            closed_form_value,
            oracle_value,
            abs_error,
            method,
            samples_or_resolution,
            stderr: None,
            tolerance,
            verdict: Verdict::from_check(abs_error <= tolerance),
        }
    }
}

/// Ex-post profit of plan `i`, from its neighbours only.
fn neighbour_profit<T: Scalar>(z: &[T], i: usize, t: T) -> T {
    let own = (t - z[i]).square();
    let left = i.checked_sub(1).map(|k| (t - z[k]).square());
    let right = z.get(i + 1).map(|&r| (t - r).square());
    let rival = match (left, right) {
        (Some(a), Some(b)) => a.min_of(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return T::zero(),
    };
    (rival - own).max_of(T::zero())
}

/// Kinks of plan `i`'s profit curve, together with the ends of the line.
fn breakpoints<T: Scalar>(z: &[T], i: usize) -> Vec<T> {
    let half = T::half();
    let mut pts = vec![T::zero(), T::one()];
    if i > 0 {
        pts.push((z[i - 1] + z[i]) * half);
    }
    if i + 1 < z.len() {
        pts.push((z[i] + z[i + 1]) * half);
    }
    if i > 0 && i + 1 < z.len() {
        pts.push((z[i - 1] + z[i + 1]) * half);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
    pts.dedup();
    pts
}

/// Composite Simpson rule with `m` (even) panels on `[a, b]`.
pub fn simpson<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, m: usize) -> T {
    let h = (b - a) / T::from_count(m);
    let (two, four) = (T::from_count(2), T::from_count(4));
    let interior = (1..m).fold(T::zero(), |acc, k| {
        let w = if k % 2 == 1 { four } else { two };
        acc + w * f(a + h * T::from_count(k))
    });
    (f(a) + interior + f(b)) * h / T::from_count(3)
}

/// Expected ex-post profit by Simpson quadrature on each smooth piece.
pub fn quad_expected_profit<T: Scalar>(profile: &LocationProfile<T>, i: usize, subdivisions: usize) -> Result<T> {
    profile.check_index(i)?;
    if profile.len() < 2 {
        return Err(GameError::UnsupportedMonopoly(profile.len()));
    }
    if subdivisions < 2 || !subdivisions.is_multiple_of(2) {
        return Err(GameError::InvalidParameter(format!(
            "Simpson subdivisions must be even and at least 2, got {subdivisions}"
        )));
    }
    let z = profile.locations();
    let pts = breakpoints(z, i);
    Ok(pts
        .windows(2)
        .fold(T::zero(), |acc, w| acc + simpson(|t| neighbour_profit(z, i, t), w[0], w[1], subdivisions)))
}

/// `(E[min_i (t - z_i)^2], E[second-smallest (t - z_i)^2])` by Simpson
/// quadrature between every pairwise midpoint, where the ordering of
/// distances can change.
pub fn quad_expected_losses<T: Scalar>(profile: &LocationProfile<T>, subdivisions: usize) -> Result<(T, T)> {
    if profile.len() < 2 {
        return Err(GameError::UnsupportedMonopoly(profile.len()));
    }
    if subdivisions < 2 || !subdivisions.is_multiple_of(2) {
        return Err(GameError::InvalidParameter(format!(
            "Simpson subdivisions must be even and at least 2, got {subdivisions}"
        )));
    }
    let z = profile.locations();
    let mut pts = vec![T::zero(), T::one()];
    for j in 0..z.len() {
        for k in j + 1..z.len() {
            pts.push((z[j] + z[k]) * T::half());
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
    pts.dedup();
    let two_smallest = |t: T| {
        let mut d: Vec<T> = z.iter().map(|&zi| (t - zi).square()).collect();
        d.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
        (d[0], d[1])
    };
    let mut nearest = T::zero();
    let mut runner_up = T::zero();
    for w in pts.windows(2) {
        nearest = nearest + simpson(|t| two_smallest(t).0, w[0], w[1], subdivisions);
        runner_up = runner_up + simpson(|t| two_smallest(t).1, w[0], w[1], subdivisions);
    }
    Ok((nearest, runner_up))
}

/// Sample mean and standard error of plan `i`'s ex-post profit over
/// `samples` uniform ideal points.
pub fn mc_expected_profit(profile: &LocationProfile<f64>, i: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    profile.check_index(i)?;
    if samples < 1000 {
        return Err(GameError::InvalidParameter(format!("Monte Carlo needs at least 1000 samples, got {samples}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Welford running moments
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for k in 0..samples {
        let t = IdealPoint::new(rng.gen::<f64>()).expect("unit interval draw");
        let x = expost_profit(profile, i, t)?;
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let variance = m2 / (samples - 1) as f64;
    Ok((mean, (variance / samples as f64).sqrt()))
}

/// Monte Carlo estimates for every plan, each on its own stream
/// `seed ^ i`, so the result does not depend on scheduling.
pub fn mc_expected_profits(profile: &LocationProfile<f64>, samples: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    (0..profile.len())
        .into_par_iter()
        .map(|i| mc_expected_profit(profile, i, samples, seed ^ i as u64))
        .collect()
}

/// Scans the best-fitted plan's asking price on a grid and records the
/// highest price a utility-maximising government still accepts.
///
/// Options weighed at each price: buy the best-fitted plan at that price,
/// buy any other plan at zero, or buy nothing and live with the best held
/// plan. Without any held plan, buying nothing forfeits the baseline
/// utility, which is large enough that this never wins.
pub fn price_best_response_check(
    profile: &LocationProfile<f64>,
    held: &AdoptionSet,
    t: IdealPoint<f64>,
    price_step: f64,
) -> Result<OracleReport> {
    if profile.len() < 2 {
        return Err(GameError::UnsupportedMonopoly(profile.len()));
    }
    if !(price_step > 0.0 && price_step <= 0.01) {
        return Err(GameError::InvalidParameter(format!("price step must lie in (0, 0.01], got {price_step}")));
    }
    let z = profile.locations();
    let t = t.value();
    let loss = |k: usize| (t - z[k]).powi(2);
    let mut winner = 0;
    for k in 1..z.len() {
        if loss(k) < loss(winner) {
            winner = k;
        }
    }
    let held_loss = held.indices().iter().map(|&h| loss(h)).fold(f64::INFINITY, f64::min);
    let baseline = 2.0;
    let abstain = if held.is_empty() { 0.0 } else { baseline - held_loss };
    let free_rival = (0..z.len())
        .filter(|&k| k != winner)
        .map(|k| baseline - loss(k).min(held_loss))
        .fold(f64::NEG_INFINITY, f64::max);
    let best_alternative = abstain.max(free_rival);
    let buy_winner = |price: f64| baseline - loss(winner).min(held_loss) - price;

    let steps = (1.0 / price_step).ceil() as usize + 1;
    let mut supremum: Option<f64> = None;
    let mut gap = false;
    for k in 0..=steps {
        let price = k as f64 * price_step;
        if buy_winner(price) >= best_alternative {
            if supremum.is_some() && supremum != Some((k - 1) as f64 * price_step) {
                gap = true;
            }
            supremum = Some(price);
        }
    }
    let oracle_value = supremum.unwrap_or(0.0);
    let closed = if held.contains(winner) {
        0.0
    } else {
        crate::expost::expost_equilibrium_prices(profile, IdealPoint::new(t)?)?[winner]
    };
    let slack = 1e-12;
    let bracketed = oracle_value <= closed + slack && oracle_value >= closed - price_step - slack;
    let mut report = OracleReport::compare(
        format!("ex-post price of plan {}", winner + 1),
        closed,
        oracle_value,
        OracleMethod::GridSearch,
        steps + 1,
        price_step,
    );
    report.verdict = Verdict::from_check(bracketed && !gap);
    Ok(report)
}

/// Largest `n` in `2..=n_max` whose binding researcher breaks even, found by
/// scanning every count. Returns 0 when none does.
pub fn brute_force_variety(fixed_cost: f64, n_max: usize, mode: EntryMode) -> Result<usize> {
    if !(fixed_cost > 0.0) {
        return Err(GameError::NonpositiveFixedCost(fixed_cost));
    }
    let slack = 1e-12;
    let mut best = 0;
    for n in 2..=n_max {
        let binding = match mode {
            EntryMode::Paper => 1.0 / (n as f64).powi(3),
            EntryMode::Computed => {
                let raw: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
                let profile = LocationProfile::new(&raw)?;
                (0..n)
                    .map(|i| quad_expected_profit(&profile, i, 2))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(f64::INFINITY, f64::min)
            }
        };
        if binding >= fixed_cost - slack {
            best = n;
        }
    }
    Ok(best)
}

/// Quadrature twin of the deviation audit for researcher `l`: every profit
/// is re-integrated numerically at the deviated profile.
pub fn location_best_response_check(profile: &LocationProfile<f64>, l: usize, grid_resolution: usize) -> Result<OracleReport> {
    profile.check_index(l)?;
    let closed = deviation_scan(profile, grid_resolution)?[l].max_gain;
    let z = profile.locations();
    let others: Vec<f64> = z.iter().enumerate().filter(|&(k, _)| k != l).map(|(_, &v)| v).collect();
    let status_quo = quad_expected_profit(profile, l, 2)?;
    let mut best = f64::NEG_INFINITY;
    for k in 0..=grid_resolution {
        let candidate = k as f64 / grid_resolution as f64;
        best = best.max(quad_relocation_profit(&others, candidate)?);
    }
    Ok(OracleReport::compare(
        format!("max relocation gain of plan {}", l + 1),
        closed,
        best - status_quo,
        OracleMethod::GridSearch,
        grid_resolution,
        1e-8,
    ))
}

/// Profit at `candidate` among `others` by quadrature; zero on co-location.
pub fn quad_relocation_profit(others: &[f64], candidate: f64) -> Result<f64> {
    if others.iter().any(|&o| (o - candidate).abs() <= TIE_EPSILON) {
        return Ok(0.0);
    }
    let mut raw = others.to_vec();
    raw.push(candidate);
    let moved = LocationProfile::new(&raw)?;
    let idx = moved.permutation().iter().position(|&p| p == others.len()).expect("candidate present");
    quad_expected_profit(&moved, idx, 2)
}
