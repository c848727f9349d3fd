use serde::{Deserialize, Serialize};

/// How each per-layer RLS is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Implementation {
    /// Direct `O(M²)` gain and inverse-correlation update.
    Classic,
    /// Transversal dichotomous coordinate descent with `N_itr` iterations.
    Dcd,
}

/// Arithmetic operations per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct OpCounts {
    pub mult: u64,
    pub add: u64,
    pub div: u64,
}

impl std::ops::Add for OpCounts {
    type Output = OpCounts;

    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts {
            mult: self.mult + o.mult,
            add: self.add + o.add,
            div: self.div + o.div,
        }
    }
}

/// Published per-sample totals for one m-RLS iteration.
///
/// Classic: `6M² + (2L_max+5)M + 5L_max + 1` mult,
/// `6M² + (2L_max + L_opt − 2)M + 3L_max` add, `M` div.
/// DCD: `(2L_max+2)M + L_max` mult, `([2N_itr+4]L_max + L_opt + 2)M + 3L_max` add.
pub fn complexity_counts(
    taps: u64,
    layers_max: u64,
    l_opt: u64,
    implementation: Implementation,
    dcd_iterations: u64,
) -> OpCounts {
    let (m, l) = (taps, layers_max);
    match implementation {
        Implementation::Classic => OpCounts {
            mult: 6 * m * m + (2 * l + 5) * m + 5 * l + 1,
            add: 6 * m * m + (2 * l + l_opt - 2) * m + 3 * l,
            div: m,
        },
        Implementation::Dcd => OpCounts {
            mult: (2 * l + 2) * m + l,
            add: ((2 * dcd_iterations + 4) * l + l_opt + 2) * m + 3 * l,
            div: 0,
        },
    }
}
