use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// Limits on explored search nodes and wall-clock time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_secs: Option<f64>,
}

impl Budget {
    pub const DEFAULT_NODES: u64 = 100_000_000;

    pub fn nodes(max_nodes: u64) -> Self {
        Budget { max_nodes, max_secs: None }
    }

    pub fn unlimited() -> Self {
        Budget { max_nodes: u64::MAX, max_secs: None }
    }

    pub fn meter(&self) -> Meter {
        Meter {
            max_nodes: self.max_nodes,
            deadline: self.max_secs.map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0))),
            nodes: 0,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::nodes(Self::DEFAULT_NODES)
    }
}

/// Running node count against a [`Budget`].
#[derive(Debug)]
pub struct Meter {
    max_nodes: u64,
    deadline: Option<Instant>,
    nodes: u64,
}

impl Meter {
    /// Counts one node. Returns `false` once the budget is spent.
    #[inline]
    pub fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return false;
        }
        // Checking the clock on every node is measurable in tight loops.
        if self.nodes & 0xfff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.max_nodes = self.nodes;
                    return false;
                }
            }
        }
        true
    }

    pub fn exhausted(&self) -> bool {
        self.nodes > self.max_nodes
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }
}
