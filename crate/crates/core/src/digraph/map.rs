use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Digraph, DigraphError};

/// On-disk JSON form of a map: digraph references plus a label table.
/// How `source` and `target` are resolved is up to the caller.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub source: String,
    pub target: String,
    pub assignment: BTreeMap<String, String>,
}

/// A vertex assignment that sends every arrow to an arrow or an equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigraphMap {
    source: Arc<Digraph>,
    target: Arc<Digraph>,
    assignment: Vec<usize>,
}

impl DigraphMap {
    /// Validates and wraps an index assignment.
    pub fn new(
        source: Arc<Digraph>,
        target: Arc<Digraph>,
        assignment: Vec<usize>,
    ) -> Result<Self, DigraphError> {
        if assignment.len() != source.len() {
            let missing = source.labels().get(assignment.len()).cloned().unwrap_or_default();
            return Err(DigraphError::MissingAssignment(missing));
        }
        if let Some(&bad) = assignment.iter().find(|&&w| w >= target.len()) {
            return Err(DigraphError::IndexOutOfRange(bad));
        }
        if let Some((u, v)) = first_violation(&source, &target, &assignment) {
            return Err(DigraphError::NotAMap {
                from: source.label(u).to_string(),
                to: source.label(v).to_string(),
                image_from: target.label(assignment[u]).to_string(),
                image_to: target.label(assignment[v]).to_string(),
            });
        }
        Ok(DigraphMap { source, target, assignment })
    }

    /// Builds a map from a label-to-label table covering every source vertex.
    pub fn from_labels(
        source: Arc<Digraph>,
        target: Arc<Digraph>,
        table: &BTreeMap<String, String>,
    ) -> Result<Self, DigraphError> {
        for key in table.keys() {
            source.vertex(key)?;
        }
        let assignment = source
            .labels()
            .iter()
            .map(|l| {
                let image = table
                    .get(l)
                    .ok_or_else(|| DigraphError::MissingAssignment(l.clone()))?;
                target.vertex(image)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, assignment)
    }

    pub fn identity(g: Arc<Digraph>) -> Self {
        let assignment = (0..g.len()).collect();
        DigraphMap { source: g.clone(), target: g, assignment }
    }

    /// The constant map onto `w`.
    pub fn constant(source: Arc<Digraph>, target: Arc<Digraph>, w: usize) -> Self {
        let assignment = vec![w; source.len()];
        DigraphMap { source, target, assignment }
    }

    pub fn source(&self) -> &Arc<Digraph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Digraph> {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, v: usize) -> usize {
        self.assignment[v]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &DigraphMap) -> Result<DigraphMap, DigraphError> {
        if *self.target != *other.source {
            return Err(DigraphError::NotComposable);
        }
        Ok(DigraphMap {
            source: self.source.clone(),
            target: other.target.clone(),
            assignment: self.assignment.iter().map(|&v| other.assignment[v]).collect(),
        })
    }

    /// Image of a vertex set, sorted and deduplicated.
    pub fn image_of(&self, part: &[usize]) -> Vec<usize> {
        let mut img: Vec<usize> = part.iter().map(|&v| self.assignment[v]).collect();
        img.sort_unstable();
        img.dedup();
        img
    }

    /// Preimage of a vertex set, sorted.
    pub fn preimage_of(&self, part: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.target.len()];
        for &w in part {
            member[w] = true;
        }
        (0..self.source.len()).filter(|&v| member[self.assignment[v]]).collect()
    }

    /// Label table suitable for the JSON map format.
    pub fn label_table(&self) -> BTreeMap<String, String> {
        (0..self.source.len())
            .map(|v| {
                (
                    self.source.label(v).to_string(),
                    self.target.label(self.assignment[v]).to_string(),
                )
            })
            .collect()
    }
}

/// First source arrow whose image is neither an arrow nor an equality.
pub(crate) fn first_violation(
    source: &Digraph,
    target: &Digraph,
    assignment: &[usize],
) -> Option<(usize, usize)> {
    source
        .arrows()
        .find(|&(u, v)| !target.is_arrow(assignment[u], assignment[v]))
}

/// True when the assignment preserves arrows-or-equality.
pub fn is_digraph_map(source: &Digraph, target: &Digraph, assignment: &[usize]) -> bool {
    first_violation(source, target, assignment).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i1() -> Arc<Digraph> {
        Arc::new(Digraph::unlabelled(2, [(0, 1)]).unwrap())
    }

    #[test]
    fn rejects_reversed_arrow() {
        let err = DigraphMap::new(i1(), i1(), vec![1, 0]).unwrap_err();
        assert!(matches!(err, DigraphError::NotAMap { .. }));
        assert!(DigraphMap::new(i1(), i1(), vec![0, 0]).is_ok());
    }

    #[test]
    fn composition_and_tables() {
        let c3 = Arc::new(Digraph::cycle(3));
        let f = DigraphMap::new(i1(), c3.clone(), vec![2, 0]).unwrap();
        let rot = DigraphMap::new(c3.clone(), c3, vec![1, 2, 0]).unwrap();
        let g = f.then(&rot).unwrap();
        assert_eq!(g.assignment(), &[0, 1]);
        let back = DigraphMap::from_labels(g.source().clone(), g.target().clone(), &g.label_table()).unwrap();
        assert_eq!(back, g);
    }
}
