//! Finite groupoid kernel: table representation, exhaustive axiom validation,
//! constructors and structural queries.
//!
//! Elements are dense ids `0..|G|`. Units are elements; `range` and `source`
//! map every element to a unit id. Multiplication is a dense partial table.

mod action;
mod constructors;
mod structure;
mod validate;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use action::{ActionViolation, GroupoidActionOnSet};
pub use structure::{
    check_homomorphism, find_isomorphism, imprimitivity_groupoid, is_bijection, orbit_structure,
    restriction, stabilizer_subgroupoid, structural_queries, Embedded, HomomorphismReport,
    ImprimitivityGroupoid, IsotropyFiber, OrbitStructure, Stabilizer, StructuralFlags,
};
pub(crate) use structure::{subgroupoid, unit_orbits};
pub use validate::{validate, AxiomViolation, StructuralError, ValidationReport};

pub type ElemId = usize;

const NONE: u32 = u32::MAX;

/// Raw, possibly invalid groupoid tables; the input format for [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidTable {
    pub names: Vec<String>,
    pub units: Vec<ElemId>,
    pub range: Vec<ElemId>,
    pub source: Vec<ElemId>,
    pub inverse: Vec<ElemId>,
    /// Triples `(a, b, ab)`.
    pub mult: Vec<(ElemId, ElemId, ElemId)>,
}

/// Scalar multiples of counting measure, one weight per unit (indexed by unit position).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarWeights {
    weights: Vec<f64>,
}

impl HaarWeights {
    pub fn counting(units: usize) -> Self {
        HaarWeights { weights: vec![1.0; units] }
    }

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!("Haar weight {w} is not strictly positive")));
        }
        Ok(HaarWeights { weights })
    }

    pub fn get(&self, unit_index: usize) -> f64 {
        self.weights[unit_index]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_counting(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }
}

/// A validated finite groupoid.
#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    names: Vec<String>,
    units: Vec<ElemId>,
    unit_index: Vec<u32>,
    range: Vec<ElemId>,
    source: Vec<ElemId>,
    inverse: Vec<ElemId>,
    mult: Vec<u32>,
    range_fibers: Vec<Vec<ElemId>>,
    source_fibers: Vec<Vec<ElemId>>,
    weights: HaarWeights,
    digest: String,
}

impl PartialEq for FiniteGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.digest == other.digest
    }
}

impl FiniteGroupoid {
    /// Validates `table` and builds the groupoid; the error carries the violation summary.
    pub fn from_table(table: &GroupoidTable) -> Result<Self> {
        let report = validate(table);
        if !report.is_valid() {
            return Err(Error::InvalidGroupoid(report.summary(5)));
        }
        let n = table.names.len();
        let mut mult = vec![NONE; n * n];
        for &(a, b, c) in &table.mult {
            mult[a * n + b] = c as u32;
        }
        Ok(Self::assemble(
            table.names.clone(),
            table.units.clone(),
            table.range.clone(),
            table.source.clone(),
            table.inverse.clone(),
            mult,
        ))
    }

    /// Builds from trusted parts (constructor output). `mult` is dense, `NONE` for undefined.
    pub(crate) fn assemble(
        names: Vec<String>,
        mut units: Vec<ElemId>,
        range: Vec<ElemId>,
        source: Vec<ElemId>,
        inverse: Vec<ElemId>,
        mult: Vec<u32>,
    ) -> Self {
        let n = names.len();
        units.sort_unstable();
        units.dedup();
        let mut unit_index = vec![NONE; n];
        for (i, &u) in units.iter().enumerate() {
            unit_index[u] = i as u32;
        }
        let mut range_fibers = vec![Vec::new(); units.len()];
        let mut source_fibers = vec![Vec::new(); units.len()];
        for g in 0..n {
            range_fibers[unit_index[range[g]] as usize].push(g);
            source_fibers[unit_index[source[g]] as usize].push(g);
        }
        let weights = HaarWeights::counting(units.len());
        let mut gpd = FiniteGroupoid {
            names,
            units,
            unit_index,
            range,
            source,
            inverse,
            mult,
            range_fibers,
            source_fibers,
            weights,
            digest: String::new(),
        };
        gpd.digest = gpd.compute_digest();
        gpd
    }

    fn compute_digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.len() as u64).to_le_bytes());
        for name in &self.names {
            h.update(name.as_bytes());
            h.update([0u8]);
        }
        for v in [&self.units, &self.range, &self.source, &self.inverse] {
            for &x in v.iter() {
                h.update((x as u64).to_le_bytes());
            }
        }
        for &x in &self.mult {
            h.update(x.to_le_bytes());
        }
        for &w in self.weights.as_slice() {
            h.update(w.to_bits().to_le_bytes());
        }
        hex::encode(&h.finalize()[..12])
    }

    /// Replaces the Haar weights. Weights must be positive and constant along orbits,
    /// otherwise the family fails left invariance.
    pub fn with_weights(mut self, weights: HaarWeights) -> Result<Self> {
        if weights.as_slice().len() != self.units.len() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} units",
                weights.as_slice().len(),
                self.units.len()
            )));
        }
        for g in 0..self.len() {
            let (wr, ws) = (weights.get(self.unit_pos(self.range[g])), weights.get(self.unit_pos(self.source[g])));
            if wr != ws {
                return Err(Error::InvalidParameter(format!(
                    "weights differ along arrow {}: {wr} vs {ws}",
                    self.names[g]
                )));
            }
        }
        self.weights = weights;
        self.digest = self.compute_digest();
        Ok(self)
    }

    pub fn table(&self) -> GroupoidTable {
        let n = self.len();
        let mut mult = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(c) = self.mul(a, b) {
                    mult.push((a, b, c));
                }
            }
        }
        GroupoidTable {
            names: self.names.clone(),
            units: self.units.clone(),
            range: self.range.clone(),
            source: self.source.clone(),
            inverse: self.inverse.clone(),
            mult,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<ElemId> {
        0..self.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, g: ElemId) -> &str {
        &self.names[g]
    }

    pub fn find(&self, name: &str) -> Option<ElemId> {
        self.names.iter().position(|n| n == name)
    }

    /// Unit element ids in increasing order.
    pub fn units(&self) -> &[ElemId] {
        &self.units
    }

    pub fn is_unit(&self, g: ElemId) -> bool {
        self.unit_index[g] != NONE
    }

    /// Position of a unit in [`Self::units`]. Panics if `u` is not a unit.
    pub fn unit_pos(&self, u: ElemId) -> usize {
        let i = self.unit_index[u];
        assert!(i != NONE, "element {u} is not a unit");
        i as usize
    }

    pub fn range(&self, g: ElemId) -> ElemId {
        self.range[g]
    }

    pub fn source(&self, g: ElemId) -> ElemId {
        self.source[g]
    }

    pub fn inverse(&self, g: ElemId) -> ElemId {
        self.inverse[g]
    }

    pub fn composable(&self, a: ElemId, b: ElemId) -> bool {
        self.source[a] == self.range[b]
    }

    pub fn mul(&self, a: ElemId, b: ElemId) -> Option<ElemId> {
        let c = self.mult[a * self.len() + b];
        (c != NONE).then_some(c as ElemId)
    }

    /// Product of a pair known to be composable.
    pub fn mul_unchecked(&self, a: ElemId, b: ElemId) -> ElemId {
        let c = self.mult[a * self.len() + b];
        debug_assert!(c != NONE, "({a},{b}) not composable");
        c as ElemId
    }

    /// `G^u`, the elements with range `u`.
    pub fn range_fiber(&self, u: ElemId) -> &[ElemId] {
        &self.range_fibers[self.unit_pos(u)]
    }

    /// `G_u`, the elements with source `u`.
    pub fn source_fiber(&self, u: ElemId) -> &[ElemId] {
        &self.source_fibers[self.unit_pos(u)]
    }

    /// Elements with range and source both equal to `u`, in id order.
    pub fn isotropy(&self, u: ElemId) -> Vec<ElemId> {
        self.range_fiber(u).iter().copied().filter(|&g| self.source[g] == u).collect()
    }

    pub fn weights(&self) -> &HaarWeights {
        &self.weights
    }

    /// Haar weight at unit `u`.
    pub fn weight(&self, u: ElemId) -> f64 {
        self.weights.get(self.unit_pos(u))
    }

    /// Short stable content hash, used to detect operands from different groupoids.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Human-readable description of the tables.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "|G| = {}, |G0| = {}", self.len(), self.units.len());
        for g in self.elements() {
            let _ = writeln!(
                s,
                "{}: r = {}, s = {}, inv = {}",
                self.names[g], self.names[self.range[g]], self.names[self.source[g]], self.names[self.inverse[g]]
            );
        }
        s
    }

    /// The same groupoid with elements renumbered: old id `g` becomes `perm[g]`.
    pub fn permuted(&self, perm: &[ElemId]) -> Result<Self> {
        let n = self.len();
        if !is_bijection(perm, n) {
            return Err(Error::InvalidParameter("relabelling is not a permutation".into()));
        }
        let mut names = vec![String::new(); n];
        let mut range = vec![0; n];
        let mut source = vec![0; n];
        let mut inverse = vec![0; n];
        let mut mult = vec![NONE; n * n];
        for g in 0..n {
            names[perm[g]] = self.names[g].clone();
            range[perm[g]] = perm[self.range[g]];
            source[perm[g]] = perm[self.source[g]];
            inverse[perm[g]] = perm[self.inverse[g]];
            for h in 0..n {
                if let Some(c) = self.mul(g, h) {
                    mult[perm[g] * n + perm[h]] = perm[c] as u32;
                }
            }
        }
        let units = self.units.iter().map(|&u| perm[u]).collect();
        Ok(Self::assemble(names, units, range, source, inverse, mult))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip() {
        let g = FiniteGroupoid::pair_groupoid(3).unwrap();
        let h = FiniteGroupoid::from_table(&g.table()).unwrap();
        assert_eq!(g, h);
        assert_eq!(g.digest(), h.digest());
    }

    #[test]
    fn weights_must_be_orbit_constant() {
        let g = FiniteGroupoid::pair_groupoid(2).unwrap();
        assert!(g.clone().with_weights(HaarWeights::new(vec![1.0, 2.0]).unwrap()).is_err());
        let g2 = g.clone().with_weights(HaarWeights::new(vec![2.0, 2.0]).unwrap()).unwrap();
        assert_ne!(g.digest(), g2.digest());
        assert!(HaarWeights::new(vec![0.0]).is_err());
        let c = FiniteGroupoid::cotrivial(2).unwrap();
        assert!(c.with_weights(HaarWeights::new(vec![1.0, 3.0]).unwrap()).is_ok());
    }

    #[test]
    fn permuted_copy_is_valid() {
        let g = FiniteGroupoid::pair_groupoid(2).unwrap();
        let p = g.permuted(&[3, 2, 1, 0]).unwrap();
        assert!(validate(&p.table()).is_valid());
        assert!(g.permuted(&[0, 0, 1, 2]).is_err());
    }
}
