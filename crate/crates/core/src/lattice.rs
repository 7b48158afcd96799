//! Square-lattice geometry, bond-percolation sampling and the taxicab zone
//! decomposition around the central vertex.
//!
//! Vertices are indexed row-major, `v = y * side + x`. Bonds have open
//! boundaries: the `side * (side - 1)` horizontal bonds `(x, y)–(x+1, y)` come
//! first (index `y * (side - 1) + x`), followed by the vertical bonds
//! `(x, y)–(x, y+1)` (index `side * (side - 1) + y * side + x`).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmatrix::ComplexMatrix;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    side: usize,
}

impl LatticeSpec {
    pub fn new(side: usize) -> Result<Self> {
        if side < 2 {
            return Err(Error::Config(format!("lattice side must be at least 2, got {side}")));
        }
        Ok(Self { side })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Total vertex count `N = side²`.
    pub fn vertices(&self) -> usize {
        self.side * self.side
    }

    pub fn edges(&self) -> usize {
        2 * self.side * (self.side - 1)
    }

    pub fn origin(&self) -> (usize, usize) {
        (self.side / 2, self.side / 2)
    }

    pub fn origin_index(&self) -> usize {
        let (x, y) = self.origin();
        self.index(x, y)
    }

    /// Largest zone of the analytic model, `⌊√N / 2⌋`.
    pub fn max_zone(&self) -> usize {
        self.side / 2
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.side && y < self.side);
        y * self.side + x
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v % self.side, v / self.side)
    }

    /// Index of the bond from `(x, y)` to its `+1` neighbour along `axis`,
    /// or `None` when that neighbour lies outside the lattice.
    pub fn forward_edge(&self, x: usize, y: usize, axis: Axis) -> Option<usize> {
        let l = self.side;
        match axis {
            Axis::X if x + 1 < l => Some(y * (l - 1) + x),
            Axis::Y if y + 1 < l => Some(l * (l - 1) + y * l + x),
            _ => None,
        }
    }

    /// Endpoints of bond `e`.
    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let l = self.side;
        let horizontal = l * (l - 1);
        if e < horizontal {
            let (x, y) = (e % (l - 1), e / (l - 1));
            (self.index(x, y), self.index(x + 1, y))
        } else {
            let k = e - horizontal;
            let (x, y) = (k % l, k / l);
            (self.index(x, y), self.index(x, y + 1))
        }
    }
}

/// Which bonds are open during one step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeConfiguration {
    present: Vec<bool>,
}

impl EdgeConfiguration {
    pub fn new(lattice: &LatticeSpec, present: Vec<bool>) -> Result<Self> {
        if present.len() != lattice.edges() {
            return Err(Error::Shape(format!(
                "configuration has {} flags but the lattice has {} edges",
                present.len(),
                lattice.edges()
            )));
        }
        Ok(Self { present })
    }

    pub fn empty(lattice: &LatticeSpec) -> Self {
        Self { present: vec![false; lattice.edges()] }
    }

    pub fn full(lattice: &LatticeSpec) -> Self {
        Self { present: vec![true; lattice.edges()] }
    }

    /// Configuration number `bits` in the enumeration of all `2^E`
    /// configurations; bit `e` of `bits` is the flag of bond `e`.
    pub fn from_bits(lattice: &LatticeSpec, bits: u64) -> Result<Self> {
        let e = lattice.edges();
        if e > 63 {
            return Err(Error::TooLarge(format!("{e} edges cannot be enumerated")));
        }
        Ok(Self { present: (0..e).map(|i| bits >> i & 1 == 1).collect() })
    }

    pub fn edge_count(&self) -> usize {
        self.present.len()
    }

    pub fn present_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn is_present(&self, e: usize) -> bool {
        self.present[e]
    }

    pub fn flags(&self) -> &[bool] {
        &self.present
    }

    /// `λ^{|K|} (1-λ)^{E-|K|}`.
    pub fn probability(&self, lambda: f64) -> f64 {
        let k = self.present_count() as i32;
        let absent = self.edge_count() as i32 - k;
        lambda.powi(k) * (1.0 - lambda).powi(absent)
    }
}

/// Independent bond percolation with keep probability `lambda`, resampled every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationModel {
    lambda: f64,
    seed: u64,
}

impl PercolationModel {
    pub fn new(lambda: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::OutOfRange { what: "edge-keep probability", value: lambda });
        }
        Ok(Self { lambda, seed })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The configuration for `step`. A pure function of `(seed, step)`.
    pub fn sample(&self, lattice: &LatticeSpec, step: u64) -> EdgeConfiguration {
        let present = if self.lambda >= 1.0 {
            vec![true; lattice.edges()]
        } else if self.lambda <= 0.0 {
            vec![false; lattice.edges()]
        } else {
            let mut rng = rng::stream(self.seed, rng::Purpose::Percolation, step);
            (0..lattice.edges()).map(|_| rng.random::<f64>() < self.lambda).collect()
        };
        EdgeConfiguration { present }
    }
}

pub fn sample_configuration(model: &PercolationModel, lattice: &LatticeSpec, step: u64) -> EdgeConfiguration {
    model.sample(lattice, step)
}

/// Vertices grouped by taxicab distance from the origin. Zones extend to the
/// farthest vertex of the lattice so every vertex has a zone; zones up to
/// [`LatticeSpec::max_zone`] are the ones the analytic model uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneDecomposition {
    lattice: LatticeSpec,
    zone_of: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl ZoneDecomposition {
    pub fn new(lattice: &LatticeSpec) -> Self {
        let (x0, y0) = lattice.origin();
        let zone_of: Vec<usize> = (0..lattice.vertices())
            .map(|v| {
                let (x, y) = lattice.coords(v);
                x.abs_diff(x0) + y.abs_diff(y0)
            })
            .collect();
        let outermost = zone_of.iter().copied().max().unwrap_or(0);
        let mut members = vec![Vec::new(); outermost + 1];
        for (v, &m) in zone_of.iter().enumerate() {
            members[m].push(v);
        }
        Self { lattice: *lattice, zone_of, members }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn zone_of(&self, v: usize) -> usize {
        self.zone_of[v]
    }

    /// Largest taxicab distance present in the lattice.
    pub fn outermost_zone(&self) -> usize {
        self.members.len() - 1
    }

    pub fn zone_count(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, m: usize) -> &[usize] {
        self.members.get(m).map_or(&[], Vec::as_slice)
    }

    /// Number of lattice vertices in zone `m` (less than `4m` when the
    /// lattice truncates the zone).
    pub fn zone_size(&self, m: usize) -> usize {
        self.members(m).len()
    }

    /// `4m` for `m ≥ 1`, `1` for the origin.
    pub fn nominal_size(m: usize) -> usize {
        if m == 0 {
            1
        } else {
            4 * m
        }
    }

    pub fn is_complete(&self, m: usize) -> bool {
        self.zone_size(m) == Self::nominal_size(m)
    }

    pub fn projector(&self, m: usize) -> Result<ComplexMatrix> {
        if m > self.outermost_zone() {
            return Err(Error::OutOfRange { what: "zone index", value: m as f64 });
        }
        let n = self.lattice.vertices();
        let mut p = ComplexMatrix::zeros(n, n);
        for &v in &self.members[m] {
            p[(v, v)] = 1.0.into();
        }
        Ok(p)
    }

    /// Zone probabilities `P_m = Tr[(I ⊗ Π_m) ρ] / (4m)` (`P_0` without the
    /// divisor) from a position distribution.
    pub fn zone_probabilities(&self, position: &[f64]) -> Vec<f64> {
        assert_eq!(position.len(), self.lattice.vertices());
        let mut mass = vec![0.0; self.zone_count()];
        for (v, &p) in position.iter().enumerate() {
            mass[self.zone_of[v]] += p;
        }
        mass.iter().enumerate().map(|(m, w)| w / Self::nominal_size(m) as f64).collect()
    }

    /// `P_0 + Σ 4m P_m`.
    pub fn normalization(probabilities: &[f64]) -> f64 {
        probabilities.iter().enumerate().map(|(m, p)| Self::nominal_size(m) as f64 * p).sum()
    }
}

pub fn zone_decompose(lattice: &LatticeSpec) -> ZoneDecomposition {
    ZoneDecomposition::new(lattice)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_sizes() {
        let l = LatticeSpec::new(2).unwrap();
        assert_eq!((l.vertices(), l.edges()), (4, 4));
        let l = LatticeSpec::new(5).unwrap();
        assert_eq!((l.vertices(), l.origin()), (25, (2, 2)));
        let l = LatticeSpec::new(100).unwrap();
        assert_eq!((l.vertices(), l.max_zone()), (10_000, 50));
        assert!(matches!(LatticeSpec::new(1), Err(Error::Config(_))));
    }

    #[test]
    fn edge_indexing_is_a_bijection() {
        let l = LatticeSpec::new(4).unwrap();
        let mut seen = vec![false; l.edges()];
        for y in 0..4 {
            for x in 0..4 {
                for axis in [Axis::X, Axis::Y] {
                    if let Some(e) = l.forward_edge(x, y, axis) {
                        assert!(!seen[e]);
                        seen[e] = true;
                        let (a, b) = l.edge_endpoints(e);
                        assert_eq!(a, l.index(x, y));
                        let (bx, by) = l.coords(b);
                        assert_eq!(bx + by, x + y + 1);
                    }
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn extreme_lambdas() {
        let l = LatticeSpec::new(6).unwrap();
        let all = PercolationModel::new(1.0, 3).unwrap().sample(&l, 0);
        assert_eq!(all.present_count(), l.edges());
        let none = PercolationModel::new(0.0, 3).unwrap().sample(&l, 0);
        assert_eq!(none.present_count(), 0);
        assert!(PercolationModel::new(1.5, 0).is_err());
        assert!(PercolationModel::new(-0.1, 0).is_err());
    }

    #[test]
    fn sampling_is_reproducible_and_step_dependent() {
        let l = LatticeSpec::new(10).unwrap();
        let m = PercolationModel::new(0.5, 42).unwrap();
        assert_eq!(m.sample(&l, 7), m.sample(&l, 7));
        assert_ne!(m.sample(&l, 7), m.sample(&l, 8));
        let other = PercolationModel::new(0.5, 43).unwrap();
        assert_ne!(m.sample(&l, 7), other.sample(&l, 7));
    }

    #[test]
    fn configuration_probability() {
        let l = LatticeSpec::new(2).unwrap();
        let total: f64 = (0..16u64).map(|b| EdgeConfiguration::from_bits(&l, b).unwrap().probability(0.3)).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(EdgeConfiguration::new(&l, vec![true; 3]).is_err());
    }

    #[test]
    fn zone_examples() {
        let l = LatticeSpec::new(5).unwrap();
        let z = zone_decompose(&l);
        assert_eq!(z.zone_of(l.origin_index()), 0);
        assert_eq!(z.zone_size(0), 1);
        let mut zone1: Vec<(usize, usize)> = z.members(1).iter().map(|&v| l.coords(v)).collect();
        zone1.sort();
        assert_eq!(zone1, vec![(1, 2), (2, 1), (2, 3), (3, 2)]);
        assert_eq!(z.zone_size(2), 8);
        assert!(z.is_complete(2));
        assert_eq!(z.outermost_zone(), 4);
    }

    #[test]
    fn projectors() {
        let l = LatticeSpec::new(5).unwrap();
        let z = zone_decompose(&l);
        let p0 = z.projector(0).unwrap();
        assert_eq!(p0.trace().re, 1.0);
        let p1 = z.projector(1).unwrap();
        assert_eq!(p1.trace().re, 4.0);
        assert_eq!(&p1 * &p1, p1);
        assert_eq!((&p0 * &p1).norm(), 0.0);
        let mut sum = ComplexMatrix::zeros(25, 25);
        for m in 0..=l.max_zone() {
            sum = &sum + &z.projector(m).unwrap();
        }
        // Radius-2 ball covers 13 of 25 vertices.
        assert_eq!(sum.trace().re, 13.0);
        for m in l.max_zone() + 1..=z.outermost_zone() {
            sum = &sum + &z.projector(m).unwrap();
        }
        assert_eq!(sum, ComplexMatrix::identity(25));
        assert!(z.projector(5).is_err());
    }

    #[test]
    fn zone_probability_normalization() {
        let l = LatticeSpec::new(4).unwrap();
        let z = zone_decompose(&l);
        let uniform = vec![1.0 / 16.0; 16];
        let p = z.zone_probabilities(&uniform);
        assert!((ZoneDecomposition::normalization(&p) - 1.0).abs() < 1e-15);
    }
}
