//! Discrete Bayesian networks over finite alphabets: DAG validation, CPT
//! checks, and joint-probability evaluation via the factored product
//! `P(X1..Xn) = prod_i P(Xi | parents(Xi))`.
//!
//! The exhaustive-enumeration posterior here is the slow, general route used
//! to cross-check the specialized inference in [`crate::predictor`].

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BayesError {
    #[error("bayes net structure error: {0}")]
    Structure(String),
    #[error("conditional probability table error: {0}")]
    Cpt(String),
    #[error("assignment error: {0}")]
    Assignment(String),
    #[error("missing CPT entry for node {node}, parent rank {rank}")]
    MissingEntry { node: usize, rank: usize },
}

/// One variable: a finite alphabet, parent set, and CPT with one row per
/// parent assignment (mixed-radix rank, first parent most significant).
#[derive(Debug, Clone)]
pub struct BayesNode {
    pub name: String,
    pub alphabet: Vec<String>,
    pub parents: Vec<usize>,
    pub cpt: Vec<Vec<f64>>,
}

/// A validated discrete Bayesian network.
#[derive(Debug, Clone)]
pub struct DiscreteBayesNet {
    nodes: Vec<BayesNode>,
}

const ROW_SUM_TOLERANCE: f64 = 1e-9;

impl DiscreteBayesNet {
    /// Validates acyclicity and CPT shape (every row a distribution summing
    /// to 1 within 1e-9) before accepting the nodes.
    pub fn new(nodes: Vec<BayesNode>) -> Result<Self, BayesError> {
        for (i, node) in nodes.iter().enumerate() {
            if node.alphabet.is_empty() {
                return Err(BayesError::Structure(format!(
                    "node {i} has an empty alphabet"
                )));
            }
            for &p in &node.parents {
                if p >= nodes.len() {
                    return Err(BayesError::Structure(format!(
                        "node {i} references unknown parent {p}"
                    )));
                }
            }
            let rows: usize = node
                .parents
                .iter()
                .map(|&p| nodes[p].alphabet.len())
                .product();
            if node.cpt.len() != rows {
                return Err(BayesError::Cpt(format!(
                    "node {i}: expected {rows} CPT rows, found {}",
                    node.cpt.len()
                )));
            }
            for (r, row) in node.cpt.iter().enumerate() {
                if row.len() != node.alphabet.len() {
                    return Err(BayesError::Cpt(format!(
                        "node {i} row {r}: expected {} entries, found {}",
                        node.alphabet.len(),
                        row.len()
                    )));
                }
                if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(BayesError::Cpt(format!(
                        "node {i} row {r}: probabilities must lie in [0, 1]"
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(BayesError::Cpt(format!(
                        "node {i} row {r}: entries sum to {sum}, not 1"
                    )));
                }
            }
        }
        check_acyclic(&nodes)?;
        Ok(DiscreteBayesNet { nodes })
    }

    pub fn nodes(&self) -> &[BayesNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Rank of a node's CPT row under a full assignment.
    fn parent_rank(&self, node: &BayesNode, assignment: &[usize]) -> usize {
        let mut rank = 0usize;
        for &p in &node.parents {
            rank = rank * self.nodes[p].alphabet.len() + assignment[p];
        }
        rank
    }

    /// The joint probability of a full assignment (one value index per node):
    /// the product over nodes of the CPT entry for the node's value given its
    /// parents' values.
    pub fn joint_probability(&self, assignment: &[usize]) -> Result<f64, BayesError> {
        if assignment.len() != self.nodes.len() {
            return Err(BayesError::Assignment(format!(
                "assignment covers {} nodes, net has {}",
                assignment.len(),
                self.nodes.len()
            )));
        }
        let mut product = 1.0;
        for (i, node) in self.nodes.iter().enumerate() {
            let value = assignment[i];
            if value >= node.alphabet.len() {
                return Err(BayesError::Assignment(format!(
                    "node {i} value index {value} out of range"
                )));
            }
            let rank = self.parent_rank(node, assignment);
            let row = node
                .cpt
                .get(rank)
                .ok_or(BayesError::MissingEntry { node: i, rank })?;
            let entry = *row
                .get(value)
                .ok_or(BayesError::MissingEntry { node: i, rank })?;
            product *= entry;
        }
        Ok(product)
    }

    /// Visits every full assignment of the net. Exponential; meant for the
    /// small nets used as verification oracles.
    pub fn for_each_assignment<F: FnMut(&[usize])>(&self, mut f: F) {
        let sizes: Vec<usize> = self.nodes.iter().map(|n| n.alphabet.len()).collect();
        let mut assignment = vec![0usize; sizes.len()];
        loop {
            f(&assignment);
            let mut i = sizes.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                assignment[i] += 1;
                if assignment[i] < sizes[i] {
                    break;
                }
                assignment[i] = 0;
            }
        }
    }

    /// Posterior distribution of `query` given fixed `evidence`, computed by
    /// brute-force enumeration of every completion of the hidden nodes.
    pub fn posterior_by_enumeration(
        &self,
        evidence: &[(usize, usize)],
        query: usize,
    ) -> Result<Vec<f64>, BayesError> {
        if query >= self.nodes.len() {
            return Err(BayesError::Assignment(format!(
                "unknown query node {query}"
            )));
        }
        for &(node, value) in evidence {
            if node >= self.nodes.len() || value >= self.nodes[node].alphabet.len() {
                return Err(BayesError::Assignment(format!(
                    "evidence ({node}, {value}) out of range"
                )));
            }
            if node == query {
                return Err(BayesError::Assignment(
                    "query node cannot carry evidence".into(),
                ));
            }
        }
        let mut weights = vec![0.0f64; self.nodes[query].alphabet.len()];
        let mut failure = None;
        self.for_each_assignment(|assignment| {
            if failure.is_some() {
                return;
            }
            if evidence.iter().any(|&(n, v)| assignment[n] != v) {
                return;
            }
            match self.joint_probability(assignment) {
                Ok(p) => weights[assignment[query]] += p,
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(BayesError::Assignment(
                "evidence has zero probability under the net".into(),
            ));
        }
        Ok(weights.into_iter().map(|w| w / total).collect())
    }
}

fn check_acyclic(nodes: &[BayesNode]) -> Result<(), BayesError> {
    // Colors: 0 unvisited, 1 on stack, 2 done. Edges run parent -> child, so
    // walking parents from each node finds any cycle just as well.
    let mut color = vec![0u8; nodes.len()];
    fn visit(i: usize, nodes: &[BayesNode], color: &mut [u8]) -> Result<(), BayesError> {
        match color[i] {
            1 => return Err(BayesError::Structure(format!("cycle through node {i}"))),
            2 => return Ok(()),
            _ => {}
        }
        color[i] = 1;
        for &p in &nodes[i].parents {
            visit(p, nodes, color)?;
        }
        color[i] = 2;
        Ok(())
    }
    for i in 0..nodes.len() {
        visit(i, nodes, &mut color)?;
    }
    Ok(())
}
