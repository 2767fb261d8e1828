//! Ex-post price subgame: once the ideal point is known, the best-fitted
//! plan charges exactly the government's saving over the runner-up and
//! every other plan prices at zero.

use crate::error::Result;
use crate::model::{nearest_two, AdoptionSet, GovernmentPrefs, IdealPoint, LocationProfile, PayoffRecord};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ExPostOutcome<T> {
    /// Plan bought after the ideal point is revealed, if any.
    pub purchased: Option<usize>,
    pub price_paid: T,
    pub expost_prices: Vec<T>,
    /// Researcher entries hold ex-post revenue only; ex-ante payments are
    /// folded into the government's expenditure.
    pub payoffs: PayoffRecord<T>,
    /// Quadratic mismatch to the nearest plan.
    pub government_loss: T,
}

/// Winner's margin `(t - z_second)^2 - (t - z_first)^2`, clamped at zero.
fn winning_margin<T: Scalar>(profile: &LocationProfile<T>, t: IdealPoint<T>) -> (usize, T) {
    let (first, second) = nearest_two(profile, t);
    let second = second.expect("caller checked n >= 2");
    let tv = t.value();
    let margin = (tv - profile.get(second)).square() - (tv - profile.get(first)).square();
    (first, margin.max_of(T::zero()))
}

pub fn expost_equilibrium_prices<T: Scalar>(profile: &LocationProfile<T>, t: IdealPoint<T>) -> Result<Vec<T>> {
    profile.require_competition()?;
    let (winner, margin) = winning_margin(profile, t);
    let mut prices = vec![T::zero(); profile.len()];
    prices[winner] = margin;
    Ok(prices)
}

pub fn resolve_expost<T: Scalar>(
    profile: &LocationProfile<T>,
    held: &AdoptionSet,
    t: IdealPoint<T>,
    exante_expenditure: T,
    prefs: &GovernmentPrefs<T>,
) -> Result<ExPostOutcome<T>> {
    let expost_prices = expost_equilibrium_prices(profile, t)?;
    let (nearest, _) = nearest_two(profile, t);
    let government_loss = (t.value() - profile.get(nearest)).square();
    let mut researcher_payoffs = vec![T::zero(); profile.len()];
    let (purchased, price_paid) = if held.contains(nearest) {
        (None, T::zero())
    } else {
        let price = expost_prices[nearest];
        researcher_payoffs[nearest] = researcher_payoffs[nearest] + price;
        (Some(nearest), price)
    };
    let government_utility = prefs.baseline_utility() - government_loss - price_paid - exante_expenditure;
    Ok(ExPostOutcome {
        purchased,
        price_paid,
        expost_prices,
        payoffs: PayoffRecord { researcher_payoffs, government_utility },
        government_loss,
    })
}

/// Realized ex-post profit of plan `i` at ideal point `t`.
pub fn expost_profit<T: Scalar>(profile: &LocationProfile<T>, i: usize, t: IdealPoint<T>) -> Result<T> {
    profile.check_index(i)?;
    profile.require_competition()?;
    let (winner, margin) = winning_margin(profile, t);
    Ok(if winner == i { margin } else { T::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GameError;
    use crate::model::make_profile;
    use crate::scalar::Exact;
    use proptest::prelude::*;

    fn ex(num: i64, den: i64) -> Exact {
        Exact::ratio(num, den)
    }

    fn thirds() -> LocationProfile<Exact> {
        make_profile(&[ex(1, 6), ex(1, 2), ex(5, 6)]).unwrap()
    }

    fn ideal<T: Scalar>(t: T) -> IdealPoint<T> {
        IdealPoint::new(t).unwrap()
    }

    #[test]
    fn equilibrium_price_examples() {
        let p = make_profile(&[ex(1, 4), ex(3, 4)]).unwrap();
        assert_eq!(expost_equilibrium_prices(&p, ideal(ex(3, 10))).unwrap(), vec![ex(1, 5), ex(0, 1)]);
        assert_eq!(expost_equilibrium_prices(&p, ideal(ex(1, 2))).unwrap(), vec![ex(0, 1), ex(0, 1)]);
        assert_eq!(expost_equilibrium_prices(&thirds(), ideal(ex(1, 2))).unwrap(), vec![ex(0, 1), ex(1, 9), ex(0, 1)]);
    }

    #[test]
    fn monopoly_is_rejected() {
        let p = make_profile(&[0.5]).unwrap();
        assert_eq!(expost_equilibrium_prices(&p, ideal(0.1)), Err(GameError::UnsupportedMonopoly(1)));
        assert_eq!(expost_profit(&p, 0, ideal(0.1)), Err(GameError::UnsupportedMonopoly(1)));
    }

    #[test]
    fn resolve_examples() {
        let p = make_profile(&[ex(1, 4), ex(3, 4)]).unwrap();
        let prefs = GovernmentPrefs::new(ex(2, 1)).unwrap();

        let held = AdoptionSet::new(&[0], 2).unwrap();
        let out = resolve_expost(&p, &held, ideal(ex(1, 4)), ex(0, 1), &prefs).unwrap();
        assert_eq!(out.purchased, None);
        assert_eq!(out.price_paid, ex(0, 1));
        assert_eq!(out.payoffs.government_utility, ex(2, 1));

        let out = resolve_expost(&p, &AdoptionSet::empty(), ideal(ex(3, 10)), ex(0, 1), &prefs).unwrap();
        assert_eq!(out.purchased, Some(0));
        assert_eq!(out.price_paid, ex(1, 5));
        assert_eq!(out.payoffs.government_utility, ex(17975, 10000));
        assert_eq!(out.payoffs.researcher_payoffs, vec![ex(1, 5), ex(0, 1)]);

        let held = AdoptionSet::new(&[1], 2).unwrap();
        let out = resolve_expost(&p, &held, ideal(ex(3, 10)), ex(1, 10), &prefs).unwrap();
        assert_eq!(out.purchased, Some(0));
        assert_eq!(out.payoffs.government_utility, ex(16975, 10000));
        assert_eq!(out.government_loss, ex(1, 400));
    }

    #[test]
    fn profit_examples() {
        assert_eq!(expost_profit(&thirds(), 1, ideal(ex(1, 2))).unwrap(), ex(1, 9));
        assert_eq!(expost_profit(&thirds(), 1, ideal(ex(0, 1))).unwrap(), ex(0, 1));
        let p = make_profile(&[ex(1, 4), ex(3, 4)]).unwrap();
        assert_eq!(expost_profit(&p, 0, ideal(ex(3, 10))).unwrap(), ex(1, 5));
        assert_eq!(expost_profit(&p, 2, ideal(ex(3, 10))), Err(GameError::IndexOutOfRange { index: 2, n: 2 }));
    }

    #[test]
    fn boundary_support_of_first_plan() {
        // plan 1 sells on [0, (z1+z2)/2] and nowhere else
        let p = thirds();
        assert!(expost_profit(&p, 0, ideal(ex(0, 1))).unwrap() > ex(0, 1));
        assert_eq!(expost_profit(&p, 0, ideal(ex(1, 3))).unwrap(), ex(0, 1));
        assert_eq!(expost_profit(&p, 0, ideal(ex(1, 2))).unwrap(), ex(0, 1));
        assert_eq!(expost_profit(&p, 0, ideal(ex(0, 1))).unwrap(), ex(1, 2).square() - ex(1, 6).square());
    }

    fn profile_strategy() -> impl Strategy<Value = LocationProfile<f64>> {
        prop::collection::vec(0.0f64..=1.0, 2..10).prop_filter_map("distinct", |raw| make_profile(&raw).ok())
    }

    fn second_gap(z: &[f64], t: f64) -> f64 {
        let mut d: Vec<f64> = z.iter().map(|zi| (t - zi).abs()).collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d[1] * d[1] - d[0] * d[0]
    }

    proptest! {
        #[test]
        fn profits_are_nonnegative_and_sum_to_the_gap(p in profile_strategy(), t in 0.0f64..=1.0) {
            let tp = ideal(t);
            let profits: Vec<f64> = (0..p.len()).map(|i| expost_profit(&p, i, tp).unwrap()).collect();
            prop_assert!(profits.iter().all(|&x| x >= 0.0));
            prop_assert!(profits.iter().filter(|&&x| x > 0.0).count() <= 1);
            let total: f64 = profits.iter().sum();
            prop_assert!((total - second_gap(p.locations(), t)).abs() <= 1e-12);
        }

        #[test]
        fn buying_from_scratch_costs_the_runner_up_loss(p in profile_strategy(), t in 0.0f64..=1.0) {
            let tp = ideal(t);
            let out = resolve_expost(&p, &AdoptionSet::empty(), tp, 0.0, &GovernmentPrefs::default()).unwrap();
            let (_, second) = nearest_two(&p, tp);
            let runner_up = (t - p.get(second.unwrap())).powi(2);
            prop_assert!((out.government_loss + out.price_paid - runner_up).abs() <= 1e-12);
        }

        #[test]
        fn profit_is_continuous_in_t(p in profile_strategy(), t in 0.0f64..=0.999) {
            let h = 1e-7;
            for i in 0..p.len() {
                let a = expost_profit(&p, i, ideal(t)).unwrap();
                let b = expost_profit(&p, i, ideal(t + h)).unwrap();
                // slope of a quadratic gap on [0,1] is bounded by 4
                prop_assert!((a - b).abs() <= 4.0 * h + 1e-12);
            }
        }
    }
}
