//! Domain types shared by the pricing, location and entry stages, plus the
//! nearest-plan geometry every stage builds on.
//!
//! Plan indices in the library are 0-based positions in the sorted profile.
//! The command-line front end converts to and from the 1-based numbering
//! users see.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::scalar::Scalar;

/// Two plans closer than this are treated as co-located.
pub const TIE_EPSILON: f64 = 1e-12;

/// Sorted plan characteristics on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationProfile<T> {
    locations: Vec<T>,
    // permutation[k] = input position of the k-th sorted plan
    permutation: Vec<usize>,
}

impl<T: Scalar> LocationProfile<T> {
    /// Sorts `raw`, remembering where each plan came from.
    pub fn new(raw: &[T]) -> Result<Self> {
        if raw.is_empty() {
            return Err(GameError::EmptyProfile);
        }
        for (position, &z) in raw.iter().enumerate() {
            if !(z >= T::zero() && z <= T::one()) {
                return Err(GameError::OutOfRange { position, value: z.to_real() });
            }
        }
        let mut permutation: Vec<usize> = (0..raw.len()).collect();
        // stable sort keeps the permutation deterministic
        permutation.sort_by(|&a, &b| raw[a].partial_cmp(&raw[b]).expect("locations are ordered"));
        let eps = T::from_real(TIE_EPSILON);
        for w in permutation.windows(2) {
            if raw[w[1]] - raw[w[0]] <= eps {
                let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(GameError::DegenerateTie { first, second });
            }
        }
        let locations = permutation.iter().map(|&k| raw[k]).collect();
        Ok(Self { locations, permutation })
    }

    /// Profile whose input order is already ascending.
    pub fn sorted(raw: &[T]) -> Result<Self> {
        let profile = Self::new(raw)?;
        debug_assert!(profile.permutation.iter().enumerate().all(|(k, &p)| k == p));
        Ok(profile)
    }

    pub fn locations(&self) -> &[T] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn get(&self, i: usize) -> T {
        self.locations[i]
    }

    /// `permutation()[k]` is the input position of sorted plan `k`.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Reorders per-plan values from sorted order back to input order.
    pub fn to_input_order<V: Clone>(&self, sorted_values: &[V]) -> Vec<V> {
        assert_eq!(sorted_values.len(), self.len());
        let mut out = sorted_values.to_vec();
        for (k, &p) in self.permutation.iter().enumerate() {
            out[p] = sorted_values[k].clone();
        }
        out
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(GameError::IndexOutOfRange { index: i, n: self.len() })
        }
    }

    pub(crate) fn require_competition(&self) -> Result<()> {
        if self.len() < 2 {
            Err(GameError::UnsupportedMonopoly(self.len()))
        } else {
            Ok(())
        }
    }

    /// Mirror image `z -> 1 - z`, re-sorted.
    pub fn reflected(&self) -> Self {
        let locations: Vec<T> = self.locations.iter().rev().map(|&z| T::one() - z).collect();
        let n = self.len();
        let permutation = self.permutation.iter().rev().copied().collect::<Vec<_>>();
        debug_assert_eq!(permutation.len(), n);
        Self { locations, permutation }
    }

    /// Converts every location to another scalar field.
    pub fn convert<U: Scalar>(&self) -> LocationProfile<U> {
        LocationProfile {
            locations: self.locations.iter().map(|z| U::from_real(z.to_real())).collect(),
            permutation: self.permutation.clone(),
        }
    }
}

/// Shorthand for [`LocationProfile::new`].
pub fn make_profile<T: Scalar>(raw: &[T]) -> Result<LocationProfile<T>> {
    LocationProfile::new(raw)
}

/// The government's realized ideal characteristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealPoint<T>(T);

impl<T: Scalar> IdealPoint<T> {
    pub fn new(t: T) -> Result<Self> {
        if t >= T::zero() && t <= T::one() {
            Ok(Self(t))
        } else {
            Err(GameError::IdealOutOfRange(t.to_real()))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Plans the government already holds (0-based sorted indices).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AdoptionSet {
    indices: Vec<usize>,
}

impl AdoptionSet {
    pub fn new(indices: &[usize], n: usize) -> Result<Self> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(GameError::DuplicateIndex(w[0]));
            }
        }
        if let Some(&bad) = sorted.iter().find(|&&i| i >= n) {
            return Err(GameError::IndexOutOfRange { index: bad, n });
        }
        Ok(Self { indices: sorted })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn all(n: usize) -> Self {
        Self { indices: (0..n).collect() }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Ex-ante and ex-post price vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceProfile<T> {
    pub exante: Vec<T>,
    pub expost: Vec<T>,
}

impl<T: Scalar> PriceProfile<T> {
    pub fn new(exante: Vec<T>, expost: Vec<T>, n: usize) -> Result<Self> {
        for v in [&exante, &expost] {
            if v.len() != n {
                return Err(GameError::LengthMismatch { expected: n, got: v.len() });
            }
            if let Some(p) = v.iter().find(|p| **p < T::zero()) {
                return Err(GameError::NegativePrice(p.to_real()));
            }
        }
        Ok(Self { exante, expost })
    }
}

/// Government's baseline utility `u`; large enough that some plan is
/// always worth buying.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GovernmentPrefs<T> {
    baseline_utility: T,
}

impl<T: Scalar> GovernmentPrefs<T> {
    pub fn new(baseline_utility: T) -> Result<Self> {
        if baseline_utility >= T::from_count(2) {
            Ok(Self { baseline_utility })
        } else {
            Err(GameError::InvalidParameter(format!(
                "baseline utility must be at least 2, got {}",
                baseline_utility.to_real()
            )))
        }
    }

    pub fn baseline_utility(&self) -> T {
        self.baseline_utility
    }
}

impl<T: Scalar> Default for GovernmentPrefs<T> {
    fn default() -> Self {
        Self { baseline_utility: T::from_count(2) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffRecord<T> {
    pub researcher_payoffs: Vec<T>,
    pub government_utility: T,
}

/// Which plans a run is about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanSpec {
    /// Equally spaced equilibrium profile with this many plans.
    Count(usize),
    /// Explicit characteristics, in input order.
    Locations(Vec<f64>),
}

/// Run parameters shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub plans: PlanSpec,
    pub fixed_cost: f64,
    pub prefs: GovernmentPrefs<f64>,
    pub tolerance: f64,
    pub grid_resolution: usize,
    pub mc_samples: usize,
    pub rng_seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            plans: PlanSpec::Count(3),
            fixed_cost: 0.0,
            prefs: GovernmentPrefs::default(),
            tolerance: 1e-9,
            grid_resolution: 10_000,
            mc_samples: 100_000,
            rng_seed: 0,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(GameError::InvalidParameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.grid_resolution < 100 {
            return Err(GameError::InvalidParameter(format!(
                "grid resolution must be at least 100, got {}",
                self.grid_resolution
            )));
        }
        if self.mc_samples < 1000 {
            return Err(GameError::InvalidParameter(format!(
                "Monte Carlo sample count must be at least 1000, got {}",
                self.mc_samples
            )));
        }
        if !(self.fixed_cost >= 0.0) {
            return Err(GameError::InvalidParameter(format!("fixed cost must be nonnegative, got {}", self.fixed_cost)));
        }
        match &self.plans {
            PlanSpec::Count(0) => Err(GameError::InvalidCount),
            PlanSpec::Count(_) => Ok(()),
            PlanSpec::Locations(raw) => LocationProfile::new(raw).map(|_| ()),
        }
    }

    /// Resolves the plan spec into a sorted profile.
    pub fn profile(&self) -> Result<LocationProfile<f64>> {
        match &self.plans {
            PlanSpec::Count(n) => crate::location::equilibrium_locations(*n),
            PlanSpec::Locations(raw) => LocationProfile::new(raw),
        }
    }
}

/// Closest and second-closest plans to `t`; ties go to the lower index and
/// `second` is `None` for a single plan.
pub fn nearest_two<T: Scalar>(profile: &LocationProfile<T>, t: IdealPoint<T>) -> (usize, Option<usize>) {
    let z = profile.locations();
    let t = t.value();
    let dist = |i: usize| (t - z[i]).abs();
    // first index with z >= t; the nearest plan is it or its left neighbour
    let right = z.partition_point(|&zi| zi < t);
    let first = if right == 0 {
        0
    } else if right == z.len() {
        z.len() - 1
    } else if dist(right) < dist(right - 1) {
        right
    } else {
        right - 1
    };
    let second = match (first.checked_sub(1), (first + 1 < z.len()).then_some(first + 1)) {
        (None, None) => None,
        (Some(l), None) => Some(l),
        (None, Some(r)) => Some(r),
        (Some(l), Some(r)) => Some(if dist(r) < dist(l) { r } else { l }),
    };
    (first, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use proptest::prelude::*;

    fn exhaustive(z: &[f64], t: f64) -> (usize, Option<usize>) {
        let mut first = 0;
        for i in 1..z.len() {
            if (t - z[i]).abs() < (t - z[first]).abs() {
                first = i;
            }
        }
        let mut second: Option<usize> = None;
        for j in 0..z.len() {
            if j == first {
                continue;
            }
            match second {
                Some(s) if (t - z[j]).abs() >= (t - z[s]).abs() => {}
                _ => second = Some(j),
            }
        }
        (first, second)
    }

    #[test]
    fn sorts_and_keeps_permutation() {
        let p = make_profile(&[0.75, 0.25]).unwrap();
        assert_eq!(p.locations(), &[0.25, 0.75]);
        assert_eq!(p.permutation(), &[1, 0]);
        assert_eq!(p.to_input_order(&["a", "b"]), vec!["b", "a"]);
    }

    #[test]
    fn singleton_profile() {
        let p = make_profile(&[0.5]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.locations(), &[0.5]);
    }

    #[test]
    fn rejects_coincident_plans() {
        assert_eq!(make_profile(&[0.3, 0.3]), Err(GameError::DegenerateTie { first: 0, second: 1 }));
        assert!(matches!(make_profile(&[0.3, 0.3 + 1e-13]), Err(GameError::DegenerateTie { .. })));
    }

    #[test]
    fn rejects_out_of_range_and_empty() {
        assert_eq!(make_profile(&[0.2, 1.5]), Err(GameError::OutOfRange { position: 1, value: 1.5 }));
        assert!(matches!(make_profile(&[f64::NAN]), Err(GameError::OutOfRange { .. })));
        assert_eq!(make_profile::<f64>(&[]), Err(GameError::EmptyProfile));
    }

    #[test]
    fn nearest_two_examples() {
        let p = make_profile(&[0.25, 0.75]).unwrap();
        assert_eq!(nearest_two(&p, IdealPoint::new(0.3).unwrap()), (0, Some(1)));
        assert_eq!(nearest_two(&p, IdealPoint::new(0.5).unwrap()), (0, Some(1)));

        let third = make_profile(&[Exact::ratio(1, 6), Exact::ratio(1, 2), Exact::ratio(5, 6)]).unwrap();
        assert_eq!(nearest_two(&third, IdealPoint::new(Exact::ratio(45, 100)).unwrap()), (1, Some(0)));

        let single = make_profile(&[0.5]).unwrap();
        assert_eq!(nearest_two(&single, IdealPoint::new(0.9).unwrap()), (0, None));
    }

    #[test]
    fn midpoint_tie_prefers_lower_neighbour() {
        let p = make_profile(&[0.2, 0.5, 0.8]).unwrap();
        assert_eq!(nearest_two(&p, IdealPoint::new(0.5).unwrap()), (1, Some(0)));
        assert_eq!(nearest_two(&p, IdealPoint::new(0.65).unwrap()), exhaustive(p.locations(), 0.65));
    }

    #[test]
    fn adoption_set_validation() {
        assert!(AdoptionSet::new(&[0, 2], 3).is_ok());
        assert_eq!(AdoptionSet::new(&[1, 1], 3), Err(GameError::DuplicateIndex(1)));
        assert_eq!(AdoptionSet::new(&[3], 3), Err(GameError::IndexOutOfRange { index: 3, n: 3 }));
    }

    #[test]
    fn prefs_and_prices_validation() {
        assert!(GovernmentPrefs::new(1.5).is_err());
        assert!(PriceProfile::new(vec![0.1, -0.1], vec![0.0, 0.0], 2).is_err());
        assert!(PriceProfile::new(vec![0.1], vec![0.0, 0.0], 2).is_err());
        assert!(IdealPoint::new(-0.01).is_err());
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::default().validate().is_ok());
        let bad = Scenario { grid_resolution: 99, ..Scenario::default() };
        assert!(bad.validate().is_err());
        let bad = Scenario { mc_samples: 999, ..Scenario::default() };
        assert!(bad.validate().is_err());
        let bad = Scenario { tolerance: 0.0, ..Scenario::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn nearest_two_matches_exhaustive_on_random_draws() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=8);
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let Ok(p) = make_profile(&raw) else { continue };
            let t: f64 = rng.gen();
            assert_eq!(nearest_two(&p, IdealPoint::new(t).unwrap()), exhaustive(p.locations(), t));
        }
    }

    proptest! {
        #[test]
        fn sorting_is_idempotent(raw in prop::collection::vec(0.0f64..=1.0, 1..12)) {
            if let Ok(p) = make_profile(&raw) {
                let again = make_profile(p.locations()).unwrap();
                prop_assert_eq!(again.locations(), p.locations());
                prop_assert!(p.locations().windows(2).all(|w| w[0] < w[1]));
            }
        }

        #[test]
        fn runner_up_is_a_neighbour(raw in prop::collection::vec(0.0f64..=1.0, 2..12), t in 0.0f64..=1.0) {
            if let Ok(p) = make_profile(&raw) {
                let (first, second) = nearest_two(&p, IdealPoint::new(t).unwrap());
                let second = second.unwrap();
                prop_assert!(second + 1 == first || second == first + 1);
            }
        }
    }
}
