//! Cross-level high-utility itemset mining.
//!
//! Depth-first extension over vertical utility lists. Items are visited in
//! (level, id) order so generalized items come before their descendants; an
//! extension never adds an ancestor or descendant of a prefix member. A prefix
//! is abandoned when its generalized transaction-weighted utility (the TU sum
//! of its supporting transactions) drops below `minutil`: members of an
//! ancestor-free itemset have disjoint leaf sets, so no extension can exceed it.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::model::{itemset_contains, ItemId, Itemset, QuantitativeDatabase, Taxonomy};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MiningStats {
    /// Joins performed.
    pub candidates: u64,
    /// Supported prefixes whose extensions were cut by the GWU bound.
    pub pruned: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningResult {
    pub itemsets: BTreeMap<Itemset, u64>,
    pub minutil: u64,
    pub stats: MiningStats,
}

impl MiningResult {
    pub fn len(&self) -> usize {
        self.itemsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.itemsets.is_empty()
    }

    pub fn contains(&self, itemset: &Itemset) -> bool {
        self.itemsets.contains_key(itemset)
    }

    pub fn utility(&self, itemset: &Itemset) -> Option<u64> {
        self.itemsets.get(itemset).copied()
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    tx: u32,
    utility: u64,
}

struct Search<'a> {
    taxonomy: &'a Taxonomy,
    tu: Vec<u64>,
    lists: Vec<Vec<Entry>>,
    minutil: u64,
}

/// Per-item utility lists: (transaction index, u(item, T)) for every
/// transaction where the item has a present leaf.
fn utility_lists(db: &QuantitativeDatabase, taxonomy: &Taxonomy) -> Vec<Vec<Entry>> {
    let n = taxonomy.len();
    let mut lists = vec![Vec::new(); n];
    let mut acc = vec![0u64; n];
    let mut touched = Vec::new();
    for (i, t) in db.transactions().iter().enumerate() {
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
            lists[g.index()].push(Entry {
                tx: i as u32,
                utility: acc[g.index()],
            });
            acc[g.index()] = 0;
        }
    }
    lists
}

fn join(a: &[Entry], b: &[Entry]) -> Vec<Entry> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].tx.cmp(&b[j].tx) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(Entry {
                    tx: a[i].tx,
                    utility: a[i].utility + b[j].utility,
                });
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl Search<'_> {
    fn sums(&self, list: &[Entry]) -> (u64, u64) {
        list.iter().fold((0, 0), |(u, w), e| {
            (u + e.utility, w + self.tu[e.tx as usize])
        })
    }

    fn visit(
        &self,
        prefix: &mut Vec<ItemId>,
        list: &[Entry],
        candidates: &[ItemId],
        out: &mut Vec<(Itemset, u64)>,
        stats: &mut MiningStats,
    ) {
        for (k, &item) in candidates.iter().enumerate() {
            stats.candidates += 1;
            let joined = join(list, &self.lists[item.index()]);
            if joined.is_empty() {
                continue;
            }
            self.step(prefix, item, &joined, &candidates[k + 1..], out, stats);
        }
    }

    fn step(
        &self,
        prefix: &mut Vec<ItemId>,
        item: ItemId,
        list: &[Entry],
        rest: &[ItemId],
        out: &mut Vec<(Itemset, u64)>,
        stats: &mut MiningStats,
    ) {
        let (utility, gwu) = self.sums(list);
        prefix.push(item);
        if utility >= self.minutil {
            let mut members = prefix.clone();
            members.sort_unstable();
            out.push((Itemset::from_sorted_unchecked(members), utility));
        }
        if gwu >= self.minutil {
            let next: Vec<ItemId> = rest
                .iter()
                .copied()
                .filter(|&c| !self.taxonomy.related(c, item))
                .collect();
            if !next.is_empty() {
                self.visit(prefix, list, &next, out, stats);
            }
        } else {
            stats.pruned += 1;
        }
        prefix.pop();
    }
}

/// Mines every itemset over the non-root taxonomy items whose utility is at
/// least `minutil`. Itemsets with empty support are never reported.
pub fn mine_clhuis(db: &QuantitativeDatabase, taxonomy: &Taxonomy, minutil: u64) -> MiningResult {
    let search = Search {
        taxonomy,
        tu: (0..db.len()).map(|i| db.tu_at(i)).collect(),
        lists: utility_lists(db, taxonomy),
        minutil,
    };

    let mut order: Vec<ItemId> = taxonomy
        .items()
        .filter(|&i| {
            let l = &search.lists[i.index()];
            !l.is_empty() && search.sums(l).1 >= minutil
        })
        .collect();
    order.sort_by_key(|&i| (taxonomy.level(i).unwrap_or(0), i));

    let parts: Vec<(Vec<(Itemset, u64)>, MiningStats)> = (0..order.len())
        .into_par_iter()
        .map(|k| {
            let item = order[k];
            let mut out = Vec::new();
            let mut stats = MiningStats {
                candidates: 1,
                pruned: 0,
            };
            let mut prefix = Vec::new();
            search.step(
                &mut prefix,
                item,
                &search.lists[item.index()],
                &order[k + 1..],
                &mut out,
                &mut stats,
            );
            (out, stats)
        })
        .collect();

    let mut itemsets = BTreeMap::new();
    let mut stats = MiningStats::default();
    for (out, s) in parts {
        stats.candidates += s.candidates;
        stats.pruned += s.pruned;
        for (set, u) in out {
            let prev = itemsets.insert(set, u);
            debug_assert!(prev.is_none(), "duplicate itemset emitted");
        }
    }
    MiningResult {
        itemsets,
        minutil,
        stats,
    }
}

/// Generalized transaction-weighted utility: TU summed over the
/// transactions that support `itemset`.
pub fn gwu(taxonomy: &Taxonomy, db: &QuantitativeDatabase, itemset: &Itemset) -> u64 {
    db.transactions()
        .iter()
        .enumerate()
        .filter(|(_, t)| itemset_contains(taxonomy, t, itemset))
        .map(|(i, _)| db.tu_at(i))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;
    use crate::model::itemset_utility;

    #[test]
    fn example_at_fifty() {
        let ex = worked_example();
        let r = mine_clhuis(&ex.db, &ex.taxonomy, 50);
        let expected = [
            (vec!["X"], 66),
            (vec!["X", "Z"], 85),
            (vec!["X", "e"], 55),
            (vec!["X", "d"], 62),
            (vec!["Z"], 69),
            (vec!["Z", "Y"], 70),
            (vec!["Z", "a"], 62),
            (vec!["e", "d"], 57),
            (vec!["X", "d", "e"], 52),
        ];
        assert_eq!(r.len(), 9);
        for (names, u) in expected {
            assert_eq!(r.utility(&ex.itemset(&names)), Some(u), "{names:?}");
        }
    }

    #[test]
    fn zero_threshold_reports_every_supported_itemset() {
        let ex = worked_example();
        let r = mine_clhuis(&ex.db, &ex.taxonomy, 0);
        for (set, &u) in &r.itemsets {
            assert!(u > 0);
            assert_eq!(itemset_utility(&ex.taxonomy, &ex.db, set), u);
        }
        // {f} only occurs in T6; {f, a} never co-occurs.
        assert!(r.contains(&ex.itemset(&["f"])));
        assert!(!r.contains(&ex.itemset(&["f", "a"])));
    }

    #[test]
    fn threshold_above_total_gives_nothing() {
        let ex = worked_example();
        assert!(mine_clhuis(&ex.db, &ex.taxonomy, ex.db.total_utility() + 1).is_empty());
    }

    #[test]
    fn gwu_values() {
        let ex = worked_example();
        // T1, T2, T3, T5, T7, T8: 9 + 21 + 31 + 9 + 13 + 15.
        assert_eq!(gwu(&ex.taxonomy, &ex.db, &ex.itemset(&["X"])), 98);
        assert_eq!(gwu(&ex.taxonomy, &ex.db, &ex.itemset(&["f"])), 21);
        let r = mine_clhuis(&ex.db, &ex.taxonomy, 50);
        for (set, &u) in &r.itemsets {
            assert!(gwu(&ex.taxonomy, &ex.db, set) >= u);
        }
    }
}
