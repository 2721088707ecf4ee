//! A solvable problem instance: a variable universe plus overlapping input
//! graphs whose variable sets jointly cover it.

use crate::error::{Error, Result};
use crate::graph::{bits, Universe, VarSet};
use crate::projection::InputGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    universe: Universe,
    inputs: Vec<InputGraph>,
}

impl Instance {
    /// The union of input variable sets must equal the universe. A
    /// disconnected overlap structure is allowed (query it with
    /// [`Instance::overlap_connected`]).
    pub fn new(universe: Universe, inputs: Vec<InputGraph>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidInstance("no input graphs".into()));
        }
        let n = universe.len();
        let mut union = VarSet::empty();
        for (t, input) in inputs.iter().enumerate() {
            if !input.vars().is_subset_of(universe.all_vars()) {
                return Err(Error::InvalidInstance(format!(
                    "input {t} references nodes outside the universe"
                )));
            }
            if input.vars().is_empty() {
                return Err(Error::InvalidInstance(format!("input {t} has no variables")));
            }
            union = union.union(input.vars());
        }
        if union != universe.all_vars() {
            let missing: Vec<&str> = union
                .complement(n)
                .iter()
                .map(|v| universe.name(v))
                .collect();
            return Err(Error::InvalidInstance(format!(
                "variables {missing:?} appear in no input graph"
            )));
        }
        Ok(Instance { universe, inputs })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn inputs(&self) -> &[InputGraph] {
        &self.inputs
    }

    pub fn n(&self) -> usize {
        self.universe.len()
    }

    /// True iff the inputs form a connected overlap structure: any two
    /// inputs are linked by a chain of inputs with pairwise-intersecting
    /// variable sets. Violations are a warning for callers, not an error.
    pub fn overlap_connected(&self) -> bool {
        let k = self.inputs.len();
        if k <= 1 {
            return true;
        }
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            for i in bits(frontier) {
                for j in 0..k {
                    if seen & (1 << j) == 0
                        && !self.inputs[i].vars().intersect(self.inputs[j].vars()).is_empty()
                    {
                        next |= 1 << j;
                    }
                }
            }
            seen |= next;
            frontier = next;
        }
        seen.count_ones() as usize == k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(ids: &[usize]) -> VarSet {
        VarSet::from_iter(ids.iter().copied())
    }

    #[test]
    fn union_must_cover_universe() {
        let u = Universe::new(vec!["X", "Y", "Z"]).unwrap();
        let g = InputGraph::new(vs(&[0, 1]), &[(0, 1)], &[]).unwrap();
        let err = Instance::new(u.clone(), vec![g.clone()]).unwrap_err();
        assert!(err.to_string().contains("Z"));
        let g2 = InputGraph::new(vs(&[1, 2]), &[], &[]).unwrap();
        assert!(Instance::new(u, vec![g, g2]).is_ok());
    }

    #[test]
    fn overlap_connectivity() {
        let u = Universe::new(vec!["A", "B", "C", "D"]).unwrap();
        let g1 = InputGraph::new(vs(&[0, 1]), &[], &[]).unwrap();
        let g2 = InputGraph::new(vs(&[2, 3]), &[], &[]).unwrap();
        let inst = Instance::new(u.clone(), vec![g1.clone(), g2.clone()]).unwrap();
        assert!(!inst.overlap_connected());

        let bridge = InputGraph::new(vs(&[1, 2]), &[], &[]).unwrap();
        let inst2 = Instance::new(u, vec![g1, g2, bridge]).unwrap();
        assert!(inst2.overlap_connected());
    }

    #[test]
    fn empty_inputs_rejected() {
        let u = Universe::new(vec!["X"]).unwrap();
        assert!(Instance::new(u, vec![]).is_err());
    }
}
