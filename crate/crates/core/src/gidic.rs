//! The generalized item dictionary: per-item sensitive/non-sensitive counts,
//! sensitive utility (RGISU) and sensitive-transaction lists, plus the
//! per-transaction counts and weights that order victim transactions.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use num_rational::Ratio;
use thiserror::Error;

use crate::io::NameMap;
use crate::model::{itemset_contains, ItemId, Itemset, QuantitativeDatabase, Taxonomy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GIDicError {
    #[error("itemset {0:?} is listed as both sensitive and non-sensitive")]
    Overlap(Vec<ItemId>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GIDicEntry {
    pub item: ItemId,
    pub sc: u32,
    pub nsc: u32,
    pub rgisu: u64,
    /// Sensitive transactions holding a leaf of the item, ascending.
    pub st_tids: Vec<u32>,
}

/// SC, NSC and Wt of one sensitive transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransactionWeight {
    pub sc: u32,
    pub nsc: u32,
}

impl TransactionWeight {
    pub fn wt(&self) -> Ratio<u64> {
        Ratio::new(self.sc as u64, self.nsc as u64 + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GIDic {
    entries: Vec<GIDicEntry>,
    weights: BTreeMap<u32, TransactionWeight>,
    st_order: Vec<u32>,
    /// For each sensitive itemset (input order), the tids that contain it.
    sensitive_tids: Vec<Vec<u32>>,
}

impl GIDic {
    pub fn entry(&self, item: ItemId) -> &GIDicEntry {
        &self.entries[item.index()]
    }

    pub fn entries(&self) -> &[GIDicEntry] {
        &self.entries
    }

    pub fn rgisu(&self, item: ItemId) -> u64 {
        self.entries[item.index()].rgisu
    }

    /// Weights of the sensitive transactions, keyed by tid.
    pub fn weights(&self) -> &BTreeMap<u32, TransactionWeight> {
        &self.weights
    }

    pub fn weight(&self, tid: u32) -> Option<TransactionWeight> {
        self.weights.get(&tid).copied()
    }

    /// Sensitive tids by descending Wt, ties by ascending tid.
    pub fn st_order(&self) -> &[u32] {
        &self.st_order
    }

    /// Tids containing the `k`-th sensitive itemset passed to [`build_gidic`].
    pub fn sensitive_tids(&self, k: usize) -> &[u32] {
        &self.sensitive_tids[k]
    }

    /// Tabular text dump: one row per item, then one row per sensitive transaction.
    pub fn dump(&self, names: &NameMap) -> String {
        let mut out = String::from("item\tSC\tNSC\tRGISU\ttransactions\n");
        for e in &self.entries {
            let tids: Vec<String> = e.st_tids.iter().map(|t| format!("T{t}")).collect();
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                names.name(e.item),
                e.sc,
                e.nsc,
                e.rgisu,
                tids.join(",")
            );
        }
        out.push_str("\ntid\tSC\tNSC\tWt\n");
        for &tid in &self.st_order {
            let w = self.weights[&tid];
            let wt = w.wt();
            let _ = writeln!(
                out,
                "T{tid}\t{}\t{}\t{:.2}",
                w.sc,
                w.nsc,
                *wt.numer() as f64 / *wt.denom() as f64
            );
        }
        out
    }
}

/// Tids of transactions containing at least one sensitive itemset.
pub fn sensitive_transactions(
    db: &QuantitativeDatabase,
    sensitive: &[Itemset],
    taxonomy: &Taxonomy,
) -> BTreeSet<u32> {
    db.transactions()
        .iter()
        .filter(|t| sensitive.iter().any(|s| itemset_contains(taxonomy, t, s)))
        .map(|t| t.tid())
        .collect()
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Items whose count an itemset bumps: every member with its ancestors and
/// descendants, each once.
fn closure(taxonomy: &Taxonomy, itemset: &Itemset) -> BTreeSet<ItemId> {
    let mut out = BTreeSet::new();
    for &m in itemset.members() {
        out.insert(m);
        out.extend(taxonomy.ancestors(m));
        out.extend(taxonomy.descendants(m).unwrap_or_default());
    }
    out
}

/// Tids whose transaction holds every member: intersection of the members'
/// sensitive-transaction lists.
fn containing_tids(entries: &[GIDicEntry], itemset: &Itemset) -> Vec<u32> {
    let mut members = itemset.members().iter();
    let Some(&first) = members.next() else {
        return Vec::new();
    };
    members.fold(entries[first.index()].st_tids.clone(), |acc, &m| {
        intersect(&acc, &entries[m.index()].st_tids)
    })
}

pub fn build_gidic(
    db: &QuantitativeDatabase,
    taxonomy: &Taxonomy,
    sensitive: &[Itemset],
    non_sensitive: &[Itemset],
) -> Result<GIDic, GIDicError> {
    let sens_set: HashSet<&Itemset> = sensitive.iter().collect();
    if let Some(s) = non_sensitive.iter().find(|s| sens_set.contains(s)) {
        return Err(GIDicError::Overlap(s.members().to_vec()));
    }

    let mut entries: Vec<GIDicEntry> = taxonomy
        .items()
        .map(|item| GIDicEntry {
            item,
            ..Default::default()
        })
        .collect();

    // One database scan: RGISU and sensitive-transaction lists.
    let mut acc = vec![0u64; taxonomy.len()];
    let mut touched = Vec::new();
    for t in db.transactions() {
        if !sensitive.iter().any(|s| itemset_contains(taxonomy, t, s)) {
            continue;
        }
        for &(v, q) in t.entries() {
            let u = q as u64 * db.profits().profit(v);
            for g in std::iter::once(v).chain(taxonomy.ancestors(v)) {
                if acc[g.index()] == 0 {
                    touched.push(g);
                }
                acc[g.index()] += u;
            }
        }
        for g in touched.drain(..) {
            let e = &mut entries[g.index()];
            e.rgisu += acc[g.index()];
            e.st_tids.push(t.tid());
            acc[g.index()] = 0;
        }
    }
    for e in &mut entries {
        e.st_tids.sort_unstable();
    }

    let mut weights: BTreeMap<u32, TransactionWeight> = BTreeMap::new();
    let mut sensitive_tids = Vec::with_capacity(sensitive.len());
    for s in sensitive {
        for g in closure(taxonomy, s) {
            entries[g.index()].sc += 1;
        }
        let tids = containing_tids(&entries, s);
        for &tid in &tids {
            weights
                .entry(tid)
                .or_insert(TransactionWeight { sc: 0, nsc: 0 })
                .sc += 1;
        }
        sensitive_tids.push(tids);
    }
    for ns in non_sensitive {
        for g in closure(taxonomy, ns) {
            entries[g.index()].nsc += 1;
        }
        for tid in containing_tids(&entries, ns) {
            if let Some(w) = weights.get_mut(&tid) {
                w.nsc += 1;
            }
        }
    }

    let mut st_order: Vec<u32> = weights.keys().copied().collect();
    st_order.sort_by(|a, b| weights[b].wt().cmp(&weights[a].wt()).then(a.cmp(b)));

    Ok(GIDic {
        entries,
        weights,
        st_order,
        sensitive_tids,
    })
}

/// Reference route for transaction SC/NSC: test every itemset against every
/// transaction. Returns (SC, NSC) for each sensitive transaction.
pub fn transaction_counts_by_rescan(
    db: &QuantitativeDatabase,
    taxonomy: &Taxonomy,
    sensitive: &[Itemset],
    non_sensitive: &[Itemset],
) -> BTreeMap<u32, TransactionWeight> {
    let mut out = BTreeMap::new();
    for t in db.transactions() {
        let sc = sensitive
            .iter()
            .filter(|s| itemset_contains(taxonomy, t, s))
            .count() as u32;
        if sc == 0 {
            continue;
        }
        let nsc = non_sensitive
            .iter()
            .filter(|s| itemset_contains(taxonomy, t, s))
            .count() as u32;
        out.insert(t.tid(), TransactionWeight { sc, nsc });
    }
    out
}
