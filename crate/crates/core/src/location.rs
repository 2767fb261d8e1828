//! Location stage: the equally spaced equilibrium, its first-order system,
//! and a grid audit of unilateral relocations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::exante::{exante_prices, price_given_neighbours};
use crate::model::{LocationProfile, TIE_EPSILON};
use crate::scalar::Scalar;

/// `z_i = (2i - 1) / 2n` for `i = 1..=n`.
pub fn equilibrium_locations<T: Scalar>(n: usize) -> Result<LocationProfile<T>> {
    if n == 0 {
        return Err(GameError::InvalidCount);
    }
    let den = 2 * n as i64;
    let raw: Vec<T> = (1..=n as i64).map(|i| T::ratio(2 * i - 1, den)).collect();
    LocationProfile::sorted(&raw)
}

/// Residuals of the first-order system
/// `z_2 = 3 z_1`, `z_{i+1} - 2 z_i + z_{i-1} = 0`, `3 z_n = z_{n-1} + 2`.
pub fn foc_residuals<T: Scalar>(profile: &LocationProfile<T>) -> Result<Vec<T>> {
    profile.require_competition()?;
    let z = profile.locations();
    let n = z.len();
    let three = T::from_count(3);
    let two = T::from_count(2);
    let mut out = Vec::with_capacity(n);
    out.push(z[1] - three * z[0]);
    out.extend((1..n - 1).map(|i| z[i + 1] - two * z[i] + z[i - 1]));
    out.push(three * z[n - 1] - z[n - 2] - two);
    Ok(out)
}

/// Ex-ante equilibrium profits at the equally spaced profile.
pub fn equilibrium_profit_vector<T: Scalar>(n: usize) -> Result<Vec<T>> {
    if n < 2 {
        return Err(GameError::UnsupportedMonopoly(n));
    }
    exante_prices(&equilibrium_locations::<T>(n)?)
}

/// Where a relocating plan lands relative to the remaining plans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationRegion {
    /// Between its own former neighbours.
    Home,
    /// Between two other plans, away from its former neighbours.
    Jump,
    /// Beyond the outermost remaining plan at an end it did not occupy.
    Edge,
}

/// Result of scanning one researcher's relocations.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationScan<T> {
    pub researcher: usize,
    pub status_quo: T,
    pub best_location: T,
    pub best_profit: T,
    /// `best_profit - status_quo`.
    pub max_gain: T,
    pub best_jump_profit: Option<T>,
    pub best_edge_profit: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport<T> {
    pub locations: LocationProfile<T>,
    pub prices: Vec<T>,
    pub profits: Vec<T>,
    pub foc_residuals: Vec<T>,
    pub max_deviation_gain: Vec<T>,
}

impl<T: Scalar> EquilibriumReport<T> {
    pub fn compute(profile: LocationProfile<T>, grid_resolution: usize) -> Result<Self> {
        let prices = exante_prices(&profile)?;
        let foc_residuals = foc_residuals(&profile)?;
        let max_deviation_gain = deviation_audit(&profile, grid_resolution)?;
        Ok(Self { profits: prices.clone(), prices, foc_residuals, max_deviation_gain, locations: profile })
    }
}

/// Region of insertion `slot` among the `n_others` remaining plans, for a
/// researcher who used to be at sorted position `l`.
fn classify(l: usize, slot: usize, n_others: usize) -> DeviationRegion {
    if slot == l {
        DeviationRegion::Home
    } else if slot == 0 || slot == n_others {
        DeviationRegion::Edge
    } else {
        DeviationRegion::Jump
    }
}

/// Profit of a plan placed at `candidate` among the sorted `others`, or
/// zero when it lands on an occupied spot.
fn landing_profit<T: Scalar>(others: &[T], candidate: T) -> (usize, T) {
    let eps = T::from_real(TIE_EPSILON);
    let slot = others.partition_point(|&o| o < candidate);
    let occupied = [slot.checked_sub(1), Some(slot)]
        .into_iter()
        .flatten()
        .filter_map(|s| others.get(s))
        .any(|&o| (o - candidate).abs() <= eps);
    if occupied {
        return (slot, T::zero());
    }
    let left = slot.checked_sub(1).map(|s| others[s]);
    (slot, price_given_neighbours(left, candidate, others.get(slot).copied()))
}

fn others_of<T: Scalar>(profile: &LocationProfile<T>, l: usize) -> Vec<T> {
    profile.locations().iter().enumerate().filter(|&(k, _)| k != l).map(|(_, &v)| v).collect()
}

/// Expected profit of researcher `l` after moving to `candidate`, with both
/// pricing stages re-solved at the new profile.
pub fn relocation_profit<T: Scalar>(profile: &LocationProfile<T>, l: usize, candidate: T) -> Result<T> {
    profile.require_competition()?;
    profile.check_index(l)?;
    Ok(landing_profit(&others_of(profile, l), candidate).1)
}

fn check_grid(grid_resolution: usize) -> Result<()> {
    if grid_resolution < 100 {
        return Err(GameError::InvalidParameter(format!(
            "grid resolution must be at least 100, got {grid_resolution}"
        )));
    }
    Ok(())
}

/// Scans every researcher's relocation to `k / grid_resolution`, re-solving
/// both pricing stages at the deviated profile. Landing on an occupied spot
/// earns nothing.
pub fn deviation_scan<T: Scalar>(profile: &LocationProfile<T>, grid_resolution: usize) -> Result<Vec<DeviationScan<T>>> {
    profile.require_competition()?;
    check_grid(grid_resolution)?;
    let status = exante_prices(profile)?;
    let n = profile.len();
    let scans = (0..n)
        .into_par_iter()
        .map(|l| {
            let others = others_of(profile, l);
            let mut best: Option<(T, T)> = None;
            let mut best_jump: Option<T> = None;
            let mut best_edge: Option<T> = None;
            for k in 0..=grid_resolution {
                let candidate = T::ratio(k as i64, grid_resolution as i64);
                let (slot, profit) = landing_profit(&others, candidate);
                if best.is_none_or(|(_, p)| profit > p) {
                    best = Some((candidate, profit));
                }
                let bucket = match classify(l, slot, others.len()) {
                    DeviationRegion::Home => continue,
                    DeviationRegion::Jump => &mut best_jump,
                    DeviationRegion::Edge => &mut best_edge,
                };
                if bucket.is_none_or(|p| profit > p) {
                    *bucket = Some(profit);
                }
            }
            let (best_location, best_profit) = best.expect("grid is nonempty");
            DeviationScan {
                researcher: l,
                status_quo: status[l],
                best_location,
                best_profit,
                max_gain: best_profit - status[l],
                best_jump_profit: best_jump,
                best_edge_profit: best_edge,
            }
        })
        .collect();
    Ok(scans)
}

/// Largest profit gain from relocating, one entry per researcher.
pub fn deviation_audit<T: Scalar>(profile: &LocationProfile<T>, grid_resolution: usize) -> Result<Vec<T>> {
    Ok(deviation_scan(profile, grid_resolution)?.into_iter().map(|s| s.max_gain).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_profile;
    use crate::scalar::Exact;

    fn ex(num: i64, den: i64) -> Exact {
        Exact::ratio(num, den)
    }

    #[test]
    fn equilibrium_location_examples() {
        assert_eq!(equilibrium_locations::<Exact>(1).unwrap().locations(), &[ex(1, 2)]);
        assert_eq!(equilibrium_locations::<Exact>(3).unwrap().locations(), &[ex(1, 6), ex(1, 2), ex(5, 6)]);
        assert_eq!(
            equilibrium_locations::<Exact>(4).unwrap().locations(),
            &[ex(1, 8), ex(3, 8), ex(5, 8), ex(7, 8)]
        );
        assert_eq!(equilibrium_locations::<f64>(0), Err(GameError::InvalidCount));
    }

    #[test]
    fn foc_examples() {
        let zero = ex(0, 1);
        assert_eq!(foc_residuals(&equilibrium_locations::<Exact>(3).unwrap()).unwrap(), vec![zero; 3]);
        assert_eq!(foc_residuals(&equilibrium_locations::<Exact>(2).unwrap()).unwrap(), vec![zero; 2]);
        let off = make_profile(&[ex(1, 5), ex(1, 2), ex(4, 5)]).unwrap();
        assert_eq!(foc_residuals(&off).unwrap(), vec![ex(-1, 10), zero, ex(-1, 10)]);
        assert!(foc_residuals(&equilibrium_locations::<f64>(1).unwrap()).is_err());
    }

    #[test]
    fn foc_vanishes_only_at_equal_spacing() {
        for n in 2..=50 {
            let r = foc_residuals(&equilibrium_locations::<Exact>(n).unwrap()).unwrap();
            assert!(r.iter().all(|v| *v == ex(0, 1)), "n = {n}");
        }
    }

    #[test]
    fn profit_vector_examples() {
        assert_eq!(equilibrium_profit_vector::<Exact>(2).unwrap(), vec![ex(1, 8); 2]);
        assert_eq!(equilibrium_profit_vector::<Exact>(3).unwrap(), vec![ex(1, 27), ex(1, 54), ex(1, 27)]);
        let ten = equilibrium_profit_vector::<Exact>(10).unwrap();
        assert_eq!(ten[0], ex(1, 1000));
        assert_eq!(ten[9], ex(1, 1000));
        assert!(ten[1..9].iter().all(|p| *p == ex(1, 2000)));
        assert!(equilibrium_profit_vector::<f64>(1).is_err());
    }

    #[test]
    fn reflection_symmetry() {
        let p = make_profile(&[0.05f64, 0.3, 0.42, 0.8]).unwrap();
        let mut mirrored = exante_prices(&p.reflected()).unwrap();
        mirrored.reverse();
        for (a, b) in exante_prices(&p).unwrap().iter().zip(&mirrored) {
            assert!((a - b).abs() < 1e-15);
        }
        for n in 2..=9 {
            let v = equilibrium_profit_vector::<Exact>(n).unwrap();
            let mut r = v.clone();
            r.reverse();
            assert_eq!(v, r);
            let z = equilibrium_locations::<Exact>(n).unwrap();
            assert_eq!(z.reflected().locations(), z.locations());
        }
    }

    #[test]
    fn audit_at_equilibrium_finds_no_gain() {
        let z = equilibrium_locations::<f64>(4).unwrap();
        let gains = deviation_audit(&z, 10_000).unwrap();
        assert!(gains.iter().all(|&g| g <= 1e-9), "{gains:?}");
    }

    #[test]
    fn audit_finds_gain_off_equilibrium() {
        let z = make_profile(&[0.1, 0.9]).unwrap();
        let gains = deviation_audit(&z, 10_000).unwrap();
        assert!(gains[0] > 0.0);
    }

    #[test]
    fn jump_and_edge_ceilings() {
        for n in 3..=6 {
            let z = equilibrium_locations::<f64>(n).unwrap();
            let n3 = (n * n * n) as f64;
            for scan in deviation_scan(&z, 12_000).unwrap() {
                if let Some(j) = scan.best_jump_profit {
                    assert!(j <= 1.0 / (12.0 * n3));
                    assert!((j - 1.0 / (16.0 * n3)).abs() < 1e-9);
                }
                if let Some(e) = scan.best_edge_profit {
                    assert!(e < scan.status_quo);
                    assert!(e <= 1.0 / (27.0 * n3) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn coincident_landing_earns_nothing() {
        let z = equilibrium_locations::<Exact>(2).unwrap();
        assert_eq!(relocation_profit(&z, 0, ex(3, 4)).unwrap(), ex(0, 1));
        assert_eq!(relocation_profit(&z, 0, ex(1, 4)).unwrap(), ex(1, 8));
        assert!(deviation_scan(&z, 99).is_err());
        assert!(relocation_profit(&z, 2, ex(1, 2)).is_err());
    }

    #[test]
    fn exact_audit_matches_float_audit() {
        let z = equilibrium_locations::<Exact>(3).unwrap();
        let exact = deviation_audit(&z, 300).unwrap();
        let float = deviation_audit(&equilibrium_locations::<f64>(3).unwrap(), 300).unwrap();
        for (a, b) in exact.iter().zip(&float) {
            assert!((a.to_real() - b).abs() < 1e-12);
            assert!(*a <= ex(0, 1));
        }
    }
}
