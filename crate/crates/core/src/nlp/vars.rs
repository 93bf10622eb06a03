//! Flat decision-variable space: names, bounds, binary marks, and branching
//! classes. Builders register variables in a deterministic order; the index
//! into the flat vector is the variable's identity everywhere downstream.

use crate::Real;
use std::collections::BTreeMap;

/// Branching priority classes for binary variables, highest priority first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BinClass {
    Expansion,
    StorageStatus,
    PumpStatus,
    GeneratorStatus,
}

#[derive(Debug, Clone, Default)]
pub struct VariableSpace {
    names: Vec<String>,
    lo: Vec<Real>,
    hi: Vec<Real>,
    binary: Vec<Option<BinClass>>,
    /// Physically-informed start values; midpoint of the box by default,
    /// on-state for binaries.
    hint: Vec<Real>,
    by_name: BTreeMap<String, usize>,
}

impl VariableSpace {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn add(&mut self, name: String, lo: Real, hi: Real) -> usize {
        let mid = 0.5 * (lo + hi);
        self.add_inner(name, lo, hi, mid, None)
    }

    pub fn add_hinted(&mut self, name: String, lo: Real, hi: Real, hint: Real) -> usize {
        self.add_inner(name, lo, hi, hint.clamp(lo, hi), None)
    }

    pub fn add_binary(&mut self, name: String, class: BinClass) -> usize {
        self.add_inner(name, 0.0, 1.0, 1.0, Some(class))
    }

    fn add_inner(&mut self, name: String, lo: Real, hi: Real, hint: Real, bin: Option<BinClass>) -> usize {
        assert!(lo <= hi, "inconsistent bounds for {name}: [{lo}, {hi}]");
        assert!(lo.is_finite() && hi.is_finite(), "unbounded variable {name}");
        let idx = self.names.len();
        let prev = self.by_name.insert(name.clone(), idx);
        assert!(prev.is_none(), "duplicate variable name {name}");
        self.names.push(name);
        self.lo.push(lo);
        self.hi.push(hi);
        self.hint.push(hint);
        self.binary.push(bin);
        idx
    }

    pub fn hint(&self, i: usize) -> Real {
        self.hint[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn lo(&self) -> &[Real] {
        &self.lo
    }

    pub fn hi(&self) -> &[Real] {
        &self.hi
    }

    pub fn bounds(&self, i: usize) -> (Real, Real) {
        (self.lo[i], self.hi[i])
    }

    pub fn is_binary(&self, i: usize) -> bool {
        self.binary[i].is_some()
    }

    pub fn bin_class(&self, i: usize) -> Option<BinClass> {
        self.binary[i]
    }

    /// Indices of all binary variables, in registration order.
    pub fn binaries(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.binary[i].is_some()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Midpoint-of-bounds point, the default start for solvers.
    pub fn midpoint(&self) -> Vec<Real> {
        self.lo.iter().zip(&self.hi).map(|(&l, &h)| 0.5 * (l + h)).collect()
    }

    pub fn project(&self, x: &mut [Real]) {
        for i in 0..self.len() {
            x[i] = x[i].clamp(self.lo[i], self.hi[i]);
        }
    }

    pub fn max_bound_violation(&self, x: &[Real]) -> Real {
        (0..self.len())
            .map(|i| (self.lo[i] - x[i]).max(x[i] - self.hi[i]).max(0.0))
            .fold(0.0, Real::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registration_and_lookup() {
        let mut vs = VariableSpace::default();
        let a = vs.add("a".into(), -1.0, 1.0);
        let z = vs.add_binary("z".into(), BinClass::PumpStatus);
        assert_eq!(vs.len(), 2);
        assert_eq!(vs.index_of("a"), Some(a));
        assert!(vs.is_binary(z));
        assert_eq!(vs.bounds(z), (0.0, 1.0));
        assert_eq!(vs.binaries(), vec![z]);
    }

    #[test]
    #[should_panic(expected = "duplicate variable name")]
    fn duplicate_names_rejected() {
        let mut vs = VariableSpace::default();
        vs.add("x".into(), 0.0, 1.0);
        vs.add("x".into(), 0.0, 1.0);
    }
}
