use serde::{Deserialize, Serialize};

/// Search and iteration limits. Exceeding any of them is reported as an
/// error, never as a truncated answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Longest greatest common prefix explored when removing incomplete response.
    pub gcp_depth: usize,
    /// Iterations of the image approximation before giving up.
    pub image_iterations: usize,
    /// Depth of the input tree explored by the preimage map.
    pub preimage_depth: usize,
    /// State cap for inverse construction by closure.
    pub inverse_states: usize,
    /// State cap for intermediate products while computing orders.
    pub order_states: usize,
    /// Longest prefix used in a viable combination piece.
    pub viable_depth: usize,
    /// Largest viable combination; `None` means `3(n-1)+1`.
    pub viable_size: Option<usize>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            gcp_depth: 64,
            image_iterations: 32,
            preimage_depth: 64,
            inverse_states: 10_000,
            order_states: 512,
            viable_depth: 3,
            viable_size: None,
        }
    }
}

impl Bounds {
    pub fn viable_size_for(&self, n: usize) -> usize {
        self.viable_size.unwrap_or(3 * (n - 1) + 1)
    }
}
