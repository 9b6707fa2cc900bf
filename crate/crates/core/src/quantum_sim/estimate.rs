//! Plug-in information estimates from contingency counts.
//!
//! Bob and Eve average differently. Bob never sees the side-information
//! flags, so his conditional distribution is averaged over them before the
//! entropy is taken. Eve knows her flags, so her entropy is taken per flag
//! case and then averaged.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::infotheory::entropy_unchecked;

/// Counts of `(flags, sent symbol, received symbol)` triples.
///
/// Keys are kept ordered so that estimates are bit-reproducible.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: BTreeMap<(u32, u32, u32), u64>,
    total: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideInformation {
    /// Average conditionals over flags, then take the entropy (Bob).
    Ignored,
    /// Take the entropy per flag case, then average (Eve).
    Used,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoEstimate {
    /// `n - H(received | sent [, flags])` in bits per symbol.
    pub bits: f64,
    /// First-order (Miller–Madow) bias of the plug-in entropy, in bits.
    pub bias_bound: f64,
    pub samples: u64,
}

impl ContingencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, flags: u32, sent: u32, received: u32) {
        self.add(flags, sent, received, 1);
    }

    pub fn add(&mut self, flags: u32, sent: u32, received: u32, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry((flags, sent, received)).or_insert(0) += count;
        self.total += count;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn merge(&mut self, other: &ContingencyTable) {
        for (&(f, s, r), &c) in &other.counts {
            self.add(f, s, r, c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32, u32), u64)> + '_ {
        self.counts.iter().map(|(k, v)| (*k, *v))
    }
}

/// Estimated information, in bits per `n`-bit symbol, carried by the
/// received symbol about the sent one.
pub fn empirical_information(
    table: &ContingencyTable,
    n: u32,
    side: SideInformation,
) -> Result<InfoEstimate> {
    if table.total == 0 {
        return Err(validation("contingency table is empty"));
    }
    // Conditioning cell -> counts over received symbols.
    let mut cells: BTreeMap<(u32, u32), BTreeMap<u32, u64>> = BTreeMap::new();
    for (&(flags, sent, received), &c) in &table.counts {
        let key = match side {
            SideInformation::Ignored => (0, sent),
            SideInformation::Used => (flags, sent),
        };
        *cells.entry(key).or_default().entry(received).or_insert(0) += c;
    }

    let total = table.total as f64;
    let mut cond_entropy = 0.0;
    let mut bias = 0.0;
    for row in cells.values() {
        let row_total: u64 = row.values().sum();
        let rt = row_total as f64;
        let probs: Vec<f64> = row.values().map(|&c| c as f64 / rt).collect();
        cond_entropy += rt / total * entropy_unchecked(&probs);
        bias += (row.len() as f64 - 1.0) / (2.0 * total * LN_2);
    }
    Ok(InfoEstimate {
        bits: f64::from(n) - cond_entropy,
        bias_bound: bias,
        samples: table.total,
    })
}
