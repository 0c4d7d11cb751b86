//! Co-circular configurations, mass orderings and the rotation-only
//! equivalence bookkeeping.
//!
//! A configuration stores one angle per body in cyclic (counterclockwise)
//! order; the canonical class representative rotates body 0 to angle zero.
//! Necklace orderings enumerate the distinct cyclic arrangements of the mass
//! values, with reflections kept as separate classes.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum cyclic angular gap excluding collisions, in radians.
pub const DEFAULT_GAP_MIN: f64 = 1e-6;

/// Strictly positive masses for the bodies on the circle, plus an optional
/// central mass for the central-mass variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMassVector", into = "RawMassVector")]
pub struct MassVector {
    m: Vec<f64>,
    central: Option<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawMassVector {
    m: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    central: Option<f64>,
}

impl TryFrom<RawMassVector> for MassVector {
    type Error = Error;
    fn try_from(raw: RawMassVector) -> Result<Self> {
        match raw.central {
            Some(c) => MassVector::with_central(raw.m, c),
            None => MassVector::new(raw.m),
        }
    }
}

impl From<MassVector> for RawMassVector {
    fn from(mv: MassVector) -> Self {
        RawMassVector {
            m: mv.m,
            central: mv.central,
        }
    }
}

impl MassVector {
    pub fn new(m: Vec<f64>) -> Result<Self> {
        Self::build(m, None)
    }

    pub fn with_central(m: Vec<f64>, central: f64) -> Result<Self> {
        Self::build(m, Some(central))
    }

    fn build(m: Vec<f64>, central: Option<f64>) -> Result<Self> {
        if m.len() < 2 {
            return Err(Error::TooFewBodies { n: m.len() });
        }
        for &value in m.iter().chain(central.iter()) {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidMass { value });
            }
        }
        Ok(MassVector { m, central })
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn circle_masses(&self) -> &[f64] {
        &self.m
    }

    pub fn central(&self) -> Option<f64> {
        self.central
    }

    pub fn get(&self, i: usize) -> f64 {
        self.m[i]
    }

    /// Total mass of the circle bodies only.
    pub fn circle_total(&self) -> f64 {
        self.m.iter().sum()
    }

    /// Total mass including the central body when present.
    pub fn total(&self) -> f64 {
        self.circle_total() + self.central.unwrap_or(0.0)
    }

    /// Same masses reordered by `perm` around the circle.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                reason: format!(
                    "permutation of length {} applied to {} masses",
                    perm.len(),
                    self.m.len()
                ),
            });
        }
        let m = perm.iter().map(|&i| self.m[i]).collect();
        Ok(MassVector {
            m,
            central: self.central,
        })
    }
}

/// Bodies on a circle of radius `r` at angles `alpha`, one per mass, listed
/// in counterclockwise cyclic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircularConfig", into = "RawCircularConfig")]
pub struct CircularConfig {
    r: f64,
    alpha: Vec<f64>,
    masses: MassVector,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawCircularConfig {
    r: f64,
    alpha: Vec<f64>,
    masses: MassVector,
}

impl TryFrom<RawCircularConfig> for CircularConfig {
    type Error = Error;
    fn try_from(raw: RawCircularConfig) -> Result<Self> {
        CircularConfig::new(raw.r, raw.alpha, raw.masses)
    }
}

impl From<CircularConfig> for RawCircularConfig {
    fn from(c: CircularConfig) -> Self {
        RawCircularConfig {
            r: c.r,
            alpha: c.alpha,
            masses: c.masses,
        }
    }
}

impl CircularConfig {
    pub fn new(r: f64, alpha: Vec<f64>, masses: MassVector) -> Result<Self> {
        Self::with_gap_min(r, alpha, masses, DEFAULT_GAP_MIN)
    }

    /// Construct with a custom collision-exclusion gap.
    pub fn with_gap_min(
        r: f64,
        alpha: Vec<f64>,
        masses: MassVector,
        gap_min: f64,
    ) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidRadius { r });
        }
        if alpha.len() != masses.n() {
            return Err(Error::DimensionMismatch {
                reason: format!("{} angles for {} masses", alpha.len(), masses.n()),
            });
        }
        for &a in &alpha {
            if !a.is_finite() || !(0.0..TAU).contains(&a) {
                return Err(Error::InvalidAngles {
                    reason: format!("angle {a} outside [0, 2pi)"),
                });
            }
        }
        let config = CircularConfig { r, alpha, masses };
        let gaps = config.cyclic_gaps();
        let total: f64 = gaps.iter().sum();
        if (total - TAU).abs() > 1e-9 {
            return Err(Error::InvalidAngles {
                reason: "angles are not in counterclockwise cyclic order".to_string(),
            });
        }
        let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_gap < gap_min {
            return Err(Error::CollisionGap {
                gap: min_gap,
                min: gap_min,
            });
        }
        Ok(config)
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn angles(&self) -> &[f64] {
        &self.alpha
    }

    pub fn masses(&self) -> &MassVector {
        &self.masses
    }

    /// Cyclic gap from body `i` to the next body counterclockwise.
    pub fn cyclic_gaps(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| (self.alpha[(i + 1) % n] - self.alpha[i]).rem_euclid(TAU))
            .collect()
    }

    pub fn min_cyclic_gap(&self) -> f64 {
        self.cyclic_gaps()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Planar position of body `i`.
    pub fn cartesian(&self, i: usize) -> Result<[f64; 2]> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok([self.r * self.alpha[i].cos(), self.r * self.alpha[i].sin()])
    }

    /// Straight-line distance between bodies `i` and `j`,
    /// `2 r sin(|alpha_i - alpha_j| / 2)`.
    pub fn chord(&self, i: usize, j: usize) -> Result<f64> {
        if i >= self.n() || j >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                n: self.n(),
            });
        }
        if i == j {
            return Err(Error::ChordSameBody { index: i });
        }
        Ok(2.0 * self.r * (0.5 * (self.alpha[i] - self.alpha[j]).abs()).sin())
    }

    /// Mass-weighted barycenter; the central mass sits at the origin.
    pub fn center_of_mass(&self) -> [f64; 2] {
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..self.n() {
            let q = [
                self.r * self.alpha[i].cos(),
                self.r * self.alpha[i].sin(),
            ];
            cx += self.masses.get(i) * q[0];
            cy += self.masses.get(i) * q[1];
        }
        let total = self.masses.total();
        [cx / total, cy / total]
    }

    /// Class representative under rotation: body 0 moved to angle zero.
    pub fn canonicalize(&self) -> CircularConfig {
        let theta = self.alpha[0];
        let alpha = self
            .alpha
            .iter()
            .map(|&a| {
                let mut shifted = (a - theta).rem_euclid(TAU);
                if shifted >= TAU {
                    shifted = 0.0;
                }
                shifted
            })
            .collect();
        CircularConfig {
            r: self.r,
            alpha,
            masses: self.masses.clone(),
        }
    }

    /// The same configuration rotated by `theta`; body labels are kept.
    pub fn rotated(&self, theta: f64) -> CircularConfig {
        let alpha = self
            .alpha
            .iter()
            .map(|&a| (a + theta).rem_euclid(TAU))
            .collect();
        CircularConfig {
            r: self.r,
            alpha,
            masses: self.masses.clone(),
        }
    }

    /// Replace the radius and angles, keeping masses; used by the solver.
    pub(crate) fn with_coordinates(&self, r: f64, alpha: Vec<f64>) -> Result<CircularConfig> {
        CircularConfig::new(r, alpha, self.masses.clone())
    }
}

/// Regular n-gon at radius `r`: angles `2 pi i / n`.
pub fn regular_ngon(r: f64, masses: MassVector) -> Result<CircularConfig> {
    let n = masses.n();
    let alpha = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    CircularConfig::new(r, alpha, masses)
}

/// One cyclic arrangement of the mass indices; the stored permutation is the
/// rotation whose mass-value sequence is lexicographically smallest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingId {
    perm: Vec<usize>,
}

impl OrderingId {
    pub fn identity(n: usize) -> Self {
        OrderingId {
            perm: (0..n).collect(),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Mass values around the circle in this ordering.
    pub fn values(&self, masses: &MassVector) -> Vec<f64> {
        self.perm.iter().map(|&i| masses.get(i)).collect()
    }
}

/// All distinct cyclic arrangements (necklaces) of the mass values.
/// Rotations are identified, reflections are not; repeated mass values are
/// deduplicated by exact value comparison.
pub fn enumerate_orderings(masses: &MassVector) -> Vec<OrderingId> {
    let n = masses.n();
    let values: Vec<f64> = masses.circle_masses().to_vec();
    let mut found: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
    let mut indices: Vec<usize> = (0..n).collect();
    permute(&mut indices, 0, &mut |perm| {
        let (key, representative) = canonical_rotation(perm, &values);
        found.entry(key).or_insert(representative);
    });
    found
        .into_values()
        .map(|perm| OrderingId { perm })
        .collect()
}

/// Lexicographically smallest rotation of `perm` by mass value, as a
/// bit-pattern key (positive floats order identically to their bits).
fn canonical_rotation(perm: &[usize], values: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let n = perm.len();
    let key_at = |shift: usize| -> Vec<u64> {
        (0..n)
            .map(|k| values[perm[(shift + k) % n]].to_bits())
            .collect()
    };
    let mut best_shift = 0;
    let mut best_key = key_at(0);
    for shift in 1..n {
        let key = key_at(shift);
        if key < best_key {
            best_key = key;
            best_shift = shift;
        }
    }
    let representative = (0..n).map(|k| perm[(best_shift + k) % n]).collect();
    (best_key, representative)
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equal_masses(n: usize) -> MassVector {
        MassVector::new(vec![1.0; n]).unwrap()
    }

    #[test]
    fn cartesian_positions() {
        let c = CircularConfig::new(
            1.0,
            vec![0.0, std::f64::consts::PI],
            equal_masses(2),
        )
        .unwrap();
        assert_eq!(c.cartesian(0).unwrap(), [1.0, 0.0]);
        let q = c.cartesian(1).unwrap();
        assert!((q[0] + 1.0).abs() < 1e-15 && q[1].abs() < 1e-15);
        assert!(c.cartesian(2).is_err());

        let c2 = CircularConfig::new(
            2.0,
            vec![0.0, std::f64::consts::FRAC_PI_2],
            equal_masses(2),
        )
        .unwrap();
        let q2 = c2.cartesian(1).unwrap();
        assert!(q2[0].abs() < 1e-15 && (q2[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn chord_values() {
        let c = CircularConfig::new(
            1.0,
            vec![0.0, std::f64::consts::PI],
            equal_masses(2),
        )
        .unwrap();
        assert!((c.chord(0, 1).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(c.chord(0, 0), Err(Error::ChordSameBody { .. })));

        let c3 = CircularConfig::new(
            1.0,
            vec![0.0, 2.0 * std::f64::consts::PI / 3.0, 4.0 * std::f64::consts::PI / 3.0],
            equal_masses(3),
        )
        .unwrap();
        assert!((c3.chord(0, 1).unwrap() - 3.0f64.sqrt()).abs() < 1e-14);
        assert!((c3.chord(0, 1).unwrap() - 1.7320508).abs() < 1e-7);
    }

    #[test]
    fn chord_matches_euclidean_distance() {
        let c = CircularConfig::new(
            1.7,
            vec![0.3, 1.1, 2.9, 4.0, 5.9],
            equal_masses(5),
        )
        .unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i == j {
                    continue;
                }
                let a = c.cartesian(i).unwrap();
                let b = c.cartesian(j).unwrap();
                let dist = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                assert!((c.chord(i, j).unwrap() - dist).abs() < 1e-12);
                assert_eq!(c.chord(i, j).unwrap(), c.chord(j, i).unwrap());
            }
        }
    }

    #[test]
    fn center_of_mass_cases() {
        let gon = regular_ngon(1.0, equal_masses(6)).unwrap();
        let com = gon.center_of_mass();
        assert!(com[0].abs() < 1e-12 && com[1].abs() < 1e-12);

        let two = CircularConfig::new(
            1.0,
            vec![0.0, std::f64::consts::PI],
            MassVector::new(vec![2.0, 1.0]).unwrap(),
        )
        .unwrap();
        let com2 = two.center_of_mass();
        assert!((com2[0] - 1.0 / 3.0).abs() < 1e-15 && com2[1].abs() < 1e-15);

        // Central mass sits at the origin and only rescales the total.
        let central = CircularConfig::new(
            1.0,
            vec![0.0, std::f64::consts::PI],
            MassVector::with_central(vec![2.0, 1.0], 3.0).unwrap(),
        )
        .unwrap();
        let com3 = central.center_of_mass();
        assert!((com3[0] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn canonicalize_rotates_first_body_to_zero() {
        let third = TAU / 3.0;
        let c = CircularConfig::new(
            1.0,
            vec![0.5, 0.5 + third, 0.5 + 2.0 * third],
            equal_masses(3),
        )
        .unwrap();
        let canon = c.canonicalize();
        assert_eq!(canon.angles()[0], 0.0);
        assert!((canon.angles()[1] - third).abs() < 1e-15);
        assert!((canon.angles()[2] - 2.0 * third).abs() < 1e-15);
        // Idempotent.
        assert_eq!(canon.canonicalize(), canon);
    }

    #[test]
    fn canonicalize_is_rotation_invariant() {
        let c = CircularConfig::new(
            1.3,
            vec![0.2, 1.4, 3.3, 5.1],
            MassVector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap(),
        )
        .unwrap();
        let canon = c.canonicalize();
        for k in 0..32 {
            let theta = 0.41 * k as f64;
            let rotated = c.rotated(theta).canonicalize();
            assert!((rotated.radius() - canon.radius()).abs() < 1e-12);
            for (a, b) in rotated.angles().iter().zip(canon.angles()) {
                assert!((a - b).abs() < 1e-12, "theta={theta}: {a} vs {b}");
            }
            assert_eq!(rotated.masses(), canon.masses());
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(CircularConfig::new(0.0, vec![0.0, 1.0], equal_masses(2)).is_err());
        assert!(CircularConfig::new(1.0, vec![0.0, 7.0], equal_masses(2)).is_err());
        assert!(matches!(
            CircularConfig::new(1.0, vec![0.0, 1e-9], equal_masses(2)),
            Err(Error::CollisionGap { .. })
        ));
        // Not a single counterclockwise sweep.
        assert!(CircularConfig::new(1.0, vec![0.0, 4.0, 2.0, 5.0], equal_masses(4)).is_err());
        assert!(MassVector::new(vec![1.0, -1.0]).is_err());
        assert!(MassVector::new(vec![1.0]).is_err());
    }

    #[test]
    fn regular_ngon_angles_and_chords() {
        let gon = regular_ngon(1.0, equal_masses(4)).unwrap();
        let expected = [0.0, TAU / 4.0, TAU / 2.0, 3.0 * TAU / 4.0];
        for (a, e) in gon.angles().iter().zip(expected) {
            assert!((a - e).abs() < 1e-15);
        }
        let side = 2.0 * (std::f64::consts::PI / 4.0).sin();
        for i in 0..4 {
            assert!((gon.chord(i, (i + 1) % 4).unwrap() - side).abs() < 1e-14);
        }

        let two = regular_ngon(1.0, equal_masses(2)).unwrap();
        assert!((two.angles()[1] - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn ordering_counts() {
        let m3 = MassVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(enumerate_orderings(&m3).len(), 2);

        let m4 = MassVector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(enumerate_orderings(&m4).len(), 6);

        let repeated = MassVector::new(vec![1.0, 1.0, 2.0]).unwrap();
        assert_eq!(enumerate_orderings(&repeated).len(), 1);
    }

    /// Burnside count of necklaces of a multiset under rotation.
    fn necklace_count(values: &[f64]) -> usize {
        let n = values.len();
        let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
        for &v in values {
            *counts.entry(v.to_bits()).or_insert(0) += 1;
        }
        let factorial = |k: usize| -> u128 { (1..=k as u128).product::<u128>().max(1) };
        let mut total: u128 = 0;
        for k in 0..n {
            let g = gcd(n, k); // gcd(n, 0) = n
            let period = n / g;
            if counts.values().all(|&c| c % period == 0) {
                let mut fixed = factorial(g);
                for &c in counts.values() {
                    fixed /= factorial(c / period);
                }
                total += fixed;
            }
        }
        (total / n as u128) as usize
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn ordering_counts_match_burnside() {
        let cases: Vec<Vec<f64>> = vec![
            vec![1.0, 2.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0, 3.0],
            vec![1.0, 1.0, 2.0],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 2.0, 3.0, 4.0],
            vec![1.0, 1.0, 2.0, 2.0],
            vec![1.0, 1.0, 1.0, 2.0],
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            vec![1.0, 1.0, 2.0, 2.0, 3.0],
            vec![1.0, 1.0, 1.0, 2.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
        ];
        for values in cases {
            let masses = MassVector::new(values.clone()).unwrap();
            let got = enumerate_orderings(&masses).len();
            let expected = necklace_count(&values);
            assert_eq!(got, expected, "necklace count mismatch for {values:?}");
        }
    }

    #[test]
    fn ordering_representative_is_minimal_rotation() {
        let masses = MassVector::new(vec![3.0, 1.0, 2.0, 1.0]).unwrap();
        for ordering in enumerate_orderings(&masses) {
            let vals = ordering.values(&masses);
            let n = vals.len();
            for shift in 1..n {
                let rotated: Vec<u64> = (0..n)
                    .map(|k| vals[(shift + k) % n].to_bits())
                    .collect();
                let base: Vec<u64> = vals.iter().map(|v| v.to_bits()).collect();
                assert!(base <= rotated, "representative not minimal for {vals:?}");
            }
        }
    }
}
