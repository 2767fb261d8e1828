//! Ex-ante price subgame. Each researcher asks exactly its expected ex-post
//! profit, which leaves the government indifferent between funding the plan
//! now and waiting; adopting everything and adopting nothing then cost the
//! same in expectation.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::model::{GovernmentPrefs, LocationProfile};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adoption {
    Adopt,
    Reject,
    Indifferent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExAnteSolution<T> {
    pub prices: Vec<T>,
    pub expected_expost_profits: Vec<T>,
    pub adoption: Vec<Adoption>,
}

/// Expected cost of the two canonical equilibria: buy every plan ex ante, or
/// buy nothing and purchase the best plan once the ideal point is known.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeComparison<T> {
    pub cost_adopt_all: T,
    pub cost_adopt_none: T,
    pub expected_utility_adopt_all: T,
    pub expected_utility_adopt_none: T,
}

/// `∫_x^y (t - a)^2 dt`.
fn sq_integral<T: Scalar>(a: T, x: T, y: T) -> T {
    ((y - a).cube() - (x - a).cube()) / T::from_count(3)
}

/// Market cell of plan `i`, the split point inside it where the runner-up
/// switches from the left to the right neighbour, and both neighbours.
struct Cell<T> {
    lo: T,
    split: T,
    hi: T,
    left: Option<T>,
    right: Option<T>,
}

fn cell<T: Scalar>(z: &[T], i: usize) -> Cell<T> {
    let half = T::half();
    let left = i.checked_sub(1).map(|k| z[k]);
    let right = z.get(i + 1).copied();
    let lo = left.map_or(T::zero(), |l| (l + z[i]) * half);
    let hi = right.map_or(T::one(), |r| (z[i] + r) * half);
    let split = match (left, right) {
        (Some(l), Some(r)) => (l + r) * half,
        (None, _) => lo,
        (_, None) => hi,
    };
    Cell { lo, split, hi, left, right }
}

/// `E[(t - z_second)^2]` restricted to plan `i`'s cell.
fn runner_up_loss_on_cell<T: Scalar>(c: &Cell<T>) -> T {
    let mut total = T::zero();
    if let Some(l) = c.left {
        total = total + sq_integral(l, c.lo, c.split);
    }
    if let Some(r) = c.right {
        total = total + sq_integral(r, c.split, c.hi);
    }
    total
}

/// Exact expected ex-post profit of plan `i` under a uniform ideal point,
/// by integrating each quadratic piece of the profit curve.
pub fn expected_expost_profit<T: Scalar>(profile: &LocationProfile<T>, i: usize) -> Result<T> {
    profile.check_index(i)?;
    profile.require_competition()?;
    let z = profile.locations();
    let c = cell(z, i);
    Ok(runner_up_loss_on_cell(&c) - sq_integral(z[i], c.lo, c.hi))
}

/// Cubic closed form for the ex-ante price of a plan at `z` given its
/// neighbours; a missing neighbour means the plan sits at that end of the line.
pub(crate) fn price_given_neighbours<T: Scalar>(left: Option<T>, z: T, right: Option<T>) -> T {
    let twelfth = T::ratio(1, 12);
    let four = T::from_count(4);
    let one = T::one();
    match (left, right) {
        (None, Some(r)) => twelfth * (four * r.cube() - (r - z).cube() - four * z.cube()),
        (Some(l), None) => twelfth * (four * (one - l).cube() - (z - l).cube() - four * (one - z).cube()),
        (Some(l), Some(r)) => twelfth * ((r - l).cube() - (r - z).cube() - (z - l).cube()),
        (None, None) => unreachable!("a lone plan has no ex-ante price"),
    }
}

/// Equilibrium ex-ante prices from the cubic closed forms.
pub fn exante_prices<T: Scalar>(profile: &LocationProfile<T>) -> Result<Vec<T>> {
    profile.require_competition()?;
    let z = profile.locations();
    Ok((0..z.len())
        .map(|i| price_given_neighbours(i.checked_sub(1).map(|k| z[k]), z[i], z.get(i + 1).copied()))
        .collect())
}

/// Classifies each offer against the plan's expected ex-post profit: a plan
/// is worth funding early only if it is cheaper than what it saves later.
pub fn adoption_best_response<T: Scalar>(profile: &LocationProfile<T>, offers: &[T], tolerance: T) -> Result<Vec<Adoption>> {
    if offers.len() != profile.len() {
        return Err(GameError::LengthMismatch { expected: profile.len(), got: offers.len() });
    }
    if let Some(p) = offers.iter().find(|p| **p < T::zero()) {
        return Err(GameError::NegativePrice(p.to_real()));
    }
    offers
        .iter()
        .enumerate()
        .map(|(i, &offer)| {
            let threshold = expected_expost_profit(profile, i)?;
            Ok(if offer < threshold - tolerance {
                Adoption::Adopt
            } else if offer > threshold + tolerance {
                Adoption::Reject
            } else {
                Adoption::Indifferent
            })
        })
        .collect()
}

/// Equilibrium prices together with the government's response to them.
pub fn solve_exante<T: Scalar>(profile: &LocationProfile<T>, tolerance: T) -> Result<ExAnteSolution<T>> {
    let prices = exante_prices(profile)?;
    let expected_expost_profits = (0..profile.len())
        .map(|i| expected_expost_profit(profile, i))
        .collect::<Result<Vec<_>>>()?;
    let adoption = adoption_best_response(profile, &prices, tolerance)?;
    Ok(ExAnteSolution { prices, expected_expost_profits, adoption })
}

/// `E[min_i (t - z_i)^2]`: expected mismatch when the best plan is always held.
pub fn expected_nearest_loss<T: Scalar>(profile: &LocationProfile<T>) -> T {
    let z = profile.locations();
    (0..z.len()).fold(T::zero(), |acc, i| {
        let c = cell(z, i);
        acc + sq_integral(z[i], c.lo, c.hi)
    })
}

/// `E[(t - z_second(t))^2]`: expected mismatch to the runner-up plan.
pub fn expected_runner_up_loss<T: Scalar>(profile: &LocationProfile<T>) -> Result<T> {
    profile.require_competition()?;
    let z = profile.locations();
    Ok((0..z.len()).fold(T::zero(), |acc, i| acc + runner_up_loss_on_cell(&cell(z, i))))
}

pub fn spe_expected_costs<T: Scalar>(profile: &LocationProfile<T>, prefs: &GovernmentPrefs<T>) -> Result<SpeComparison<T>> {
    let prices = exante_prices(profile)?;
    let bill = prices.iter().fold(T::zero(), |acc, &p| acc + p);
    let cost_adopt_all = bill + expected_nearest_loss(profile);
    let cost_adopt_none = expected_runner_up_loss(profile)?;
    let u = prefs.baseline_utility();
    Ok(SpeComparison {
        cost_adopt_all,
        cost_adopt_none,
        expected_utility_adopt_all: u - cost_adopt_all,
        expected_utility_adopt_none: u - cost_adopt_none,
    })
}
