//! Directed acyclic graphs over the endogenous variables.

use super::{ModelError, Violation};

/// A DAG over named variables. Edges are stored as index pairs, sorted, with
/// a topological order cached at construction, so equality is structural and
/// traversal is allocation-light.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    vars: Vec<String>,
    edges: Vec<(usize, usize)>,
    topo: Vec<usize>,
}

impl Dag {
    pub fn new<S: AsRef<str>>(vars: Vec<String>, edges: &[(S, S)]) -> Result<Dag, ModelError> {
        let mut violations = Vec::new();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                violations.push(Violation::new(
                    "dag-dup-var",
                    format!("variable {v}"),
                    "variable declared twice",
                ));
            }
        }
        let index = |name: &str| vars.iter().position(|v| v == name);
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            match (index(a), index(b)) {
                (Some(i), Some(j)) => {
                    if i == j {
                        violations.push(Violation::new(
                            "dag-self-loop",
                            format!("edge {a} -> {b}"),
                            "self-loops are not allowed",
                        ));
                    } else {
                        idx_edges.push((i, j));
                    }
                }
                _ => violations.push(Violation::new(
                    "dag-unknown-var",
                    format!("edge {a} -> {b}"),
                    "edge endpoint is not a declared variable",
                )),
            }
        }
        idx_edges.sort_unstable();
        for w in idx_edges.windows(2) {
            if w[0] == w[1] {
                violations.push(Violation::new(
                    "dag-dup-edge",
                    format!("edge {} -> {}", vars[w[0].0], vars[w[0].1]),
                    "edge declared twice",
                ));
            }
        }
        idx_edges.dedup();
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        match topological_order(vars.len(), &idx_edges) {
            Some(topo) => Ok(Dag {
                vars,
                edges: idx_edges,
                topo,
            }),
            None => Err(ModelError::invalid(Violation::new(
                "dag-cyclic",
                "edges",
                "edge relation contains a cycle",
            ))),
        }
    }

    /// The complete DAG with edges from every earlier variable to every later
    /// one, in the given declaration order.
    pub fn complete(vars: Vec<String>) -> Dag {
        let n = vars.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Dag {
            vars,
            edges,
            topo: (0..n).collect(),
        }
    }

    /// DAG with the given variables and no edges.
    pub fn empty(vars: Vec<String>) -> Dag {
        let n = vars.len();
        Dag {
            vars,
            edges: Vec::new(),
            topo: (0..n).collect(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges
            .iter()
            .map(|&(i, j)| (self.vars[i].as_str(), self.vars[j].as_str()))
    }

    pub fn edge_indices(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.edges.binary_search(&(parent, child)).is_ok()
    }

    /// Parent indices of variable `i`, ascending.
    pub fn parent_indices(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(_, j)| j == i)
            .map(|&(p, _)| p)
            .collect()
    }

    /// Parent names of `var` in declaration order.
    pub fn parents_of(&self, var: &str) -> Vec<&str> {
        match self.index_of(var) {
            Some(i) => self
                .parent_indices(i)
                .into_iter()
                .map(|p| self.vars[p].as_str())
                .collect(),
            None => Vec::new(),
        }
    }

    /// A cached topological order (variable indices, parents first).
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// True when every edge of `other` is an edge of `self` over the same
    /// variable list.
    pub fn is_supergraph_of(&self, other: &Dag) -> bool {
        self.vars == other.vars
            && other
                .edges
                .iter()
                .all(|e| self.edges.binary_search(e).is_ok())
    }
}

/// Kahn's algorithm, smallest index first for determinism.
fn topological_order(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut in_degree = vec![0usize; n];
    for &(_, j) in edges {
        in_degree[j] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| in_degree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&next) = ready.iter().min() {
        ready.retain(|&v| v != next);
        order.push(next);
        for &(i, j) in edges {
            if i == next {
                in_degree[j] -= 1;
                if in_degree[j] == 0 {
                    ready.push(j);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn complete_dag_edge_count() {
        let g = Dag::complete(names(&["X", "Y", "Z"]));
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.parents_of("Z"), vec!["X", "Y"]);
        let g2 = Dag::complete(names(&["X", "Y"]));
        assert_eq!(g2.edge_count(), 1);
        assert!(g2.has_edge(0, 1));
    }

    #[test]
    fn rejects_cycles_self_loops_duplicates() {
        let e = Dag::new(names(&["X", "Y"]), &[("X", "Y"), ("Y", "X")]).unwrap_err();
        assert!(matches!(e, ModelError::Invalid(v) if v[0].code == "dag-cyclic"));
        let e = Dag::new(names(&["X"]), &[("X", "X")]).unwrap_err();
        assert!(matches!(e, ModelError::Invalid(v) if v[0].code == "dag-self-loop"));
        let e = Dag::new(names(&["X", "Y"]), &[("X", "Y"), ("X", "Y")]).unwrap_err();
        assert!(matches!(e, ModelError::Invalid(v) if v[0].code == "dag-dup-edge"));
        let e = Dag::new(names(&["X"]), &[("X", "W")]).unwrap_err();
        assert!(matches!(e, ModelError::Invalid(v) if v[0].code == "dag-unknown-var"));
    }

    #[test]
    fn topological_order_respects_edges() {
        let g = Dag::new(names(&["A", "B", "C"]), &[("C", "A"), ("A", "B")]).unwrap();
        let topo = g.topological_order();
        let pos = |i: usize| topo.iter().position(|&v| v == i).unwrap();
        assert!(pos(2) < pos(0));
        assert!(pos(0) < pos(1));
    }

    #[test]
    fn supergraph_check() {
        let small = Dag::new(names(&["X", "Y", "Z"]), &[("X", "Y")]).unwrap();
        let big = Dag::complete(names(&["X", "Y", "Z"]));
        assert!(big.is_supergraph_of(&small));
        assert!(!small.is_supergraph_of(&big));
    }
}
