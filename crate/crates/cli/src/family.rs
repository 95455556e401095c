use serde::{Deserialize, Serialize};
use tricolor_core::graph::{
    blow_up, complete_multipartite, cycle, disjoint_union, perturb_almost_colorable,
};
use tricolor_core::{Graph, Result};

/// Named graph families the generator and the bench sweeps understand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `K_{size,...,size}` with `parts` parts.
    Multipartite { parts: usize, size: usize },
    /// `C_cycle` with every vertex replaced by `factor` copies.
    Blowup { cycle: usize, factor: usize },
    /// `copies` disjoint copies of `K_{size,...,size}`.
    Union {
        copies: usize,
        parts: usize,
        size: usize,
    },
    /// `K_{size,...,size}` rewired around a `delta` fraction of vertices.
    Perturbed {
        parts: usize,
        size: usize,
        #[serde(rename = "perturb_delta")]
        delta: f64,
        #[serde(rename = "graph_seed")]
        seed: u64,
    },
}

impl Family {
    pub fn build(&self) -> Result<Graph> {
        match *self {
            Family::Multipartite { parts, size } => complete_multipartite(parts, size),
            Family::Blowup { cycle: len, factor } => blow_up(&cycle(len)?, factor),
            Family::Union {
                copies,
                parts,
                size,
            } => {
                let g = complete_multipartite(parts, size)?;
                disjoint_union(&vec![g; copies])
            }
            Family::Perturbed {
                parts,
                size,
                delta,
                seed,
            } => perturb_almost_colorable(&complete_multipartite(parts, size)?, delta, seed),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Family::Multipartite { parts, size } => format!("multipartite({parts},{size})"),
            Family::Blowup { cycle, factor } => format!("blowup(C{cycle},{factor})"),
            Family::Union {
                copies,
                parts,
                size,
            } => format!("union({copies},{parts},{size})"),
            Family::Perturbed {
                parts,
                size,
                delta,
                seed,
            } => format!("perturbed({parts},{size},{delta},{seed})"),
        }
    }
}
