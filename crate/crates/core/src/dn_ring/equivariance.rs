use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Directed connection: cell `to` receives from cell `from` (1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub delay: f64,
    pub tag: String,
}

impl Edge {
    fn same_input(&self, other: &Edge) -> bool {
        self.tag == other.tag && self.delay == other.delay
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionList {
    pub n: usize,
    pub edges: Vec<Edge>,
}

/// Outcome of [`validate_equivariance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub pass: bool,
    /// `"(i)"` for a broken rotation orbit, `"(ii)"` for a missing reverse.
    pub condition: Option<String>,
    pub edge: Option<Edge>,
    pub message: String,
}

impl EquivarianceReport {
    fn fail(condition: &str, edge: Edge, message: String) -> Self {
        Self { pass: false, condition: Some(condition.into()), edge: Some(edge), message }
    }
}

type Inputs = Vec<(String, u64)>;

/// Checks the two conditions for a transitive D_n network:
///
/// * (i) cell `i` receives from cell `i + d` exactly what cell 1 receives
///   from cell `1 + d`, for every offset `d`;
/// * (ii) every connection has an identical reverse.
///
/// Delays are compared exactly. For (i) the reference input at each offset
/// is the one most cells agree on, so a single broken edge is reported as
/// itself even when it sits at cell 1.
pub fn validate_equivariance(conns: &ConnectionList) -> EquivarianceReport {
    let n = conns.n;
    if let Some(e) = conns.edges.iter().find(|e| !(1..=n).contains(&e.from) || !(1..=n).contains(&e.to)) {
        return EquivarianceReport::fail(
            "(i)",
            e.clone(),
            format!("edge {}→{} has a cell index outside 1..={n}", e.from, e.to),
        );
    }

    // inputs[d][cell] = sorted (tag, delay bits) received from offset d
    let mut inputs: Vec<Vec<Inputs>> = vec![vec![Vec::new(); n]; n];
    for e in &conns.edges {
        let d = (e.from + n - e.to) % n;
        inputs[d][e.to - 1].push((e.tag.clone(), e.delay.to_bits()));
    }
    for per_cell in &mut inputs {
        for list in per_cell.iter_mut() {
            list.sort();
        }
    }

    for (d, per_cell) in inputs.iter().enumerate() {
        let mut votes: BTreeMap<&Inputs, usize> = BTreeMap::new();
        for list in per_cell {
            *votes.entry(list).or_default() += 1;
        }
        let best = votes.values().copied().max().unwrap_or(0);
        // ties go to cell 1's inputs
        let consensus = if votes[&per_cell[0]] == best {
            &per_cell[0]
        } else {
            votes.iter().find(|(_, &c)| c == best).map(|(k, _)| *k).unwrap()
        };
        for (cell, list) in per_cell.iter().enumerate() {
            if list == consensus {
                continue;
            }
            let to = cell + 1;
            let from = (cell + d) % n + 1;
            let extra = list.iter().find(|x| !consensus.contains(x));
            let (edge, what) = match extra {
                Some((tag, bits)) => (
                    Edge { from, to, delay: f64::from_bits(*bits), tag: tag.clone() },
                    "receives an input the other cells lack",
                ),
                None => {
                    let (tag, bits) = consensus.iter().find(|x| !list.contains(x)).unwrap();
                    (
                        Edge { from, to, delay: f64::from_bits(*bits), tag: tag.clone() },
                        "is missing an input the other cells receive",
                    )
                }
            };
            return EquivarianceReport::fail(
                "(i)",
                edge.clone(),
                format!(
                    "cell {to} {what} from offset {d}: {} with delay {}",
                    edge.tag, edge.delay
                ),
            );
        }
    }

    for e in &conns.edges {
        let has_reverse = conns
            .edges
            .iter()
            .any(|r| r.from == e.to && r.to == e.from && r.same_input(e));
        if !has_reverse {
            return EquivarianceReport::fail(
                "(ii)",
                e.clone(),
                format!("edge {}→{} ({}) has no identical reverse", e.from, e.to, e.tag),
            );
        }
    }

    EquivarianceReport {
        pass: true,
        condition: None,
        edge: None,
        message: "rotation orbits and reverses are complete".into(),
    }
}
