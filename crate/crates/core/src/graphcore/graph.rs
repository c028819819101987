use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeRole {
    Private,
    Utility,
    FeatureOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    /// Number of categories; valid codes are `1..=classes`, 0 is missing.
    pub classes: usize,
    pub role: AttributeRole,
}

/// Ordered categorical attributes with exactly one private attribute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    attributes: Vec<AttributeSpec>,
}

impl AttributeSchema {
    pub fn new(attributes: Vec<AttributeSpec>) -> Result<Self> {
        let private: Vec<_> = attributes
            .iter()
            .filter(|a| a.role == AttributeRole::Private)
            .collect();
        if private.len() != 1 {
            return Err(Error::Config(format!(
                "schema must declare exactly one private attribute, found {}",
                private.len()
            )));
        }
        if !attributes.iter().any(|a| a.role == AttributeRole::Utility) {
            return Err(Error::Config(
                "schema needs at least one utility attribute".into(),
            ));
        }
        for a in &attributes {
            if a.classes == 0 || (a.role != AttributeRole::FeatureOnly && a.classes < 2) {
                return Err(Error::Config(format!(
                    "attribute {} needs at least 2 classes, has {}",
                    a.name, a.classes
                )));
            }
        }
        for (i, a) in attributes.iter().enumerate() {
            if attributes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::Config(format!("duplicate attribute {}", a.name)));
            }
        }
        Ok(AttributeSchema { attributes })
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn get(&self, name: &str) -> Option<&AttributeSpec> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn private(&self) -> &AttributeSpec {
        self.attributes
            .iter()
            .find(|a| a.role == AttributeRole::Private)
            .expect("validated schema has a private attribute")
    }

    pub fn utilities(&self) -> impl Iterator<Item = &AttributeSpec> {
        self.attributes
            .iter()
            .filter(|a| a.role == AttributeRole::Utility)
    }
}

/// Undirected simple graph on dense node ids with categorical attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// One code column per schema attribute, in schema order.
    codes: Vec<Vec<u32>>,
    /// Original identifier of each dense node index.
    ids: Vec<u64>,
}

impl Graph {
    /// Builds a graph, dropping self-loops and duplicate edges.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        schema: &AttributeSchema,
        codes: Vec<Vec<u32>>,
    ) -> Result<Self> {
        if codes.len() != schema.attributes().len() {
            return Err(Error::Input(format!(
                "expected {} attribute columns, got {}",
                schema.attributes().len(),
                codes.len()
            )));
        }
        for (spec, col) in schema.attributes().iter().zip(&codes) {
            if col.len() != n {
                return Err(Error::Input(format!(
                    "attribute {} has {} values for {n} nodes",
                    spec.name,
                    col.len()
                )));
            }
            if let Some((node, &c)) = col
                .iter()
                .enumerate()
                .find(|(_, &c)| c as usize > spec.classes)
            {
                return Err(Error::Input(format!(
                    "attribute {} code {c} at node {node} exceeds {} classes",
                    spec.name, spec.classes
                )));
            }
        }
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u != v {
                list.push((u.min(v), u.max(v)));
            }
        }
        list.sort_unstable();
        list.dedup();
        Ok(Graph {
            n,
            edges: list,
            codes,
            ids: (0..n as u64).collect(),
        })
    }

    pub(crate) fn with_ids(mut self, ids: Vec<u64>) -> Self {
        assert_eq!(ids.len(), self.n);
        self.ids = ids;
        self
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    /// Codes of the `index`-th schema attribute.
    pub fn codes(&self, index: usize) -> &[u32] {
        &self.codes[index]
    }

    pub fn attribute(&self, schema: &AttributeSchema, name: &str) -> Option<&[u32]> {
        schema.position(name).map(|i| self.codes(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn spec(name: &str, classes: usize, role: AttributeRole) -> AttributeSpec {
        AttributeSpec {
            name: name.into(),
            classes,
            role,
        }
    }

    #[test]
    fn schema_validation() {
        use AttributeRole::*;
        assert!(AttributeSchema::new(vec![spec("p", 2, Private), spec("u", 3, Utility)]).is_ok());
        assert!(AttributeSchema::new(vec![spec("u", 3, Utility)]).is_err());
        assert!(AttributeSchema::new(vec![
            spec("p", 2, Private),
            spec("q", 2, Private),
            spec("u", 2, Utility)
        ])
        .is_err());
        assert!(AttributeSchema::new(vec![spec("p", 2, Private)]).is_err());
        assert!(AttributeSchema::new(vec![spec("p", 1, Private), spec("u", 2, Utility)]).is_err());
    }

    #[test]
    fn dedups_and_drops_loops() {
        use AttributeRole::*;
        let s = AttributeSchema::new(vec![spec("p", 2, Private), spec("u", 2, Utility)]).unwrap();
        let g = Graph::new(
            3,
            [(0, 1), (1, 0), (1, 1), (2, 1)],
            &s,
            vec![vec![1, 2, 0], vec![1, 1, 1]],
        )
        .unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(g.has_edge(2, 1) && !g.has_edge(0, 2));
        assert!(Graph::new(2, [(0, 1)], &s, vec![vec![3, 1], vec![1, 1]]).is_err());
        assert!(Graph::new(2, [(0, 5)], &s, vec![vec![1, 1], vec![1, 1]]).is_err());
    }
}
