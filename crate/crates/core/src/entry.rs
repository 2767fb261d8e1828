//! Free entry under a fixed cost `F`: researchers enter while the binding
//! researcher still breaks even at the equally spaced equilibrium.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::location::equilibrium_profit_vector;
use crate::scalar::Scalar;

/// Relative slack for recognising `F = 1/k^3` exactly.
pub const EXACT_CUBE_TOLERANCE: f64 = 1e-9;
/// Absolute slack on the zero-profit comparison.
pub const ZERO_PROFIT_SLACK: f64 = 1e-12;

/// Which researcher's zero-profit condition pins down variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryMode {
    /// End researchers bind and earn `1/n^3`: `n* = floor(F^(-1/3))`.
    Paper,
    /// The researcher with the smallest evaluated equilibrium profit binds.
    Computed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntrySolution {
    pub fixed_cost: f64,
    pub mode: EntryMode,
    /// Zero when not even two plans can break even.
    pub n_star: usize,
    /// Second admissible count when the binding researcher exactly breaks even.
    pub alternates: Option<usize>,
    pub net_profits: Vec<f64>,
    /// 0-based index of the binding researcher at `n_star`.
    pub binding_index: Option<usize>,
}

pub fn net_profits<T: Scalar>(n: usize, fixed_cost: T) -> Result<Vec<T>> {
    if fixed_cost < T::zero() {
        return Err(GameError::InvalidParameter(format!("fixed cost must be nonnegative, got {}", fixed_cost.to_real())));
    }
    Ok(equilibrium_profit_vector::<T>(n)?.into_iter().map(|p| p - fixed_cost).collect())
}

fn check_cost(fixed_cost: f64) -> Result<()> {
    if fixed_cost > 0.0 && fixed_cost.is_finite() {
        Ok(())
    } else {
        Err(GameError::NonpositiveFixedCost(fixed_cost))
    }
}

/// Largest `n` with `n^3 F <= 1`, corrected for cube-root rounding.
fn floor_inverse_cube_root(fixed_cost: f64) -> usize {
    let mut n = (1.0 / fixed_cost).cbrt().floor().max(0.0) as usize;
    while ((n + 1) as f64).powi(3) * fixed_cost <= 1.0 {
        n += 1;
    }
    while n > 0 && (n as f64).powi(3) * fixed_cost > 1.0 {
        n -= 1;
    }
    n
}

/// `(index, value)` of the smallest entry. Entries within rounding of the
/// minimum count as tied and the lowest index wins.
fn argmin(values: &[f64]) -> (usize, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = 1e-9 * min.abs();
    let i = values.iter().position(|&v| v <= min + slack).expect("nonempty");
    (i, min)
}

fn paper_variety(fixed_cost: f64) -> (usize, Option<usize>) {
    let k = (1.0 / fixed_cost).cbrt().round();
    if k >= 1.0 && (k.powi(3) * fixed_cost - 1.0).abs() <= EXACT_CUBE_TOLERANCE {
        let k = k as usize;
        return if k >= 2 { (k, Some(k - 1)) } else { (0, None) };
    }
    let n = floor_inverse_cube_root(fixed_cost);
    (if n >= 2 { n } else { 0 }, None)
}

fn computed_variety(fixed_cost: f64) -> Result<(usize, Option<usize>)> {
    // min profit never exceeds the end researchers' 1/n^3
    let upper = floor_inverse_cube_root(fixed_cost) + 1;
    for n in (2..=upper.max(2)).rev() {
        let (_, min_profit) = argmin(&equilibrium_profit_vector::<f64>(n)?);
        if min_profit >= fixed_cost - ZERO_PROFIT_SLACK {
            let exact = (min_profit - fixed_cost).abs() <= ZERO_PROFIT_SLACK;
            return Ok((n, (exact && n > 2).then_some(n - 1)));
        }
    }
    Ok((0, None))
}

pub fn optimal_variety(fixed_cost: f64, mode: EntryMode) -> Result<EntrySolution> {
    check_cost(fixed_cost)?;
    let (n_star, alternates) = match mode {
        EntryMode::Paper => paper_variety(fixed_cost),
        EntryMode::Computed => computed_variety(fixed_cost)?,
    };
    let (net, binding_index) = if n_star >= 2 {
        let net = net_profits(n_star, fixed_cost)?;
        let binding = match mode {
            EntryMode::Paper => 0,
            EntryMode::Computed => argmin(&net).0,
        };
        (net, Some(binding))
    } else {
        (Vec::new(), None)
    };
    Ok(EntrySolution { fixed_cost, mode, n_star, alternates, net_profits: net, binding_index })
}

/// One solution per fixed cost, in input order.
pub fn variety_sweep(fixed_costs: &[f64], mode: EntryMode) -> Result<Vec<EntrySolution>> {
    fixed_costs.par_iter().map(|&f| optimal_variety(f, mode)).collect()
}

/// `steps` fixed costs from `from` to `to`, linearly or geometrically spaced.
pub fn fixed_cost_grid(from: f64, to: f64, steps: usize, log_spacing: bool) -> Result<Vec<f64>> {
    check_cost(from)?;
    check_cost(to)?;
    if steps == 0 {
        return Err(GameError::InvalidParameter("sweep needs at least one step".into()));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            let s = k as f64 / last;
            if log_spacing {
                (from.ln() + s * (to.ln() - from.ln())).exp()
            } else {
                from + s * (to - from)
            }
        })
        .collect())
}
