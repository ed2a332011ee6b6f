//! Brute-force reference implementations used to cross-check the miner and
//! the sanitizer's bookkeeping. Everything here walks parent links directly
//! and enumerates exhaustively; it is meant for databases of a few dozen items.

use std::collections::BTreeMap;

use crate::model::{ItemId, Itemset, QuantitativeDatabase, Taxonomy, Transaction};

/// Walks parent links from `item` upwards.
pub fn is_ancestor_or_self(tax: &Taxonomy, anc: ItemId, mut item: ItemId) -> bool {
    loop {
        if item == anc {
            return true;
        }
        match tax.parent(item) {
            Some(p) => item = p,
            None => return false,
        }
    }
}

pub fn naive_item_utility(
    tax: &Taxonomy,
    db: &QuantitativeDatabase,
    g: ItemId,
    t: &Transaction,
) -> u64 {
    t.entries()
        .iter()
        .filter(|&&(v, _)| is_ancestor_or_self(tax, g, v))
        .map(|&(v, q)| q as u64 * db.profits().profit(v))
        .sum()
}

fn naive_present(tax: &Taxonomy, g: ItemId, t: &Transaction) -> bool {
    t.entries()
        .iter()
        .any(|&(v, _)| is_ancestor_or_self(tax, g, v))
}

pub fn naive_itemset_utility(
    tax: &Taxonomy,
    db: &QuantitativeDatabase,
    set: &[ItemId],
) -> (u64, usize) {
    let mut utility = 0;
    let mut support = 0;
    for t in db.transactions() {
        if set.iter().all(|&g| naive_present(tax, g, t)) {
            support += 1;
            utility += set
                .iter()
                .map(|&g| naive_item_utility(tax, db, g, t))
                .sum::<u64>();
        }
    }
    (utility, support)
}

/// Every ancestor-free subset of the taxonomy items with support and
/// utility at least `minutil`.
pub fn naive_clhuis(
    tax: &Taxonomy,
    db: &QuantitativeDatabase,
    minutil: u64,
) -> BTreeMap<Vec<ItemId>, u64> {
    let items: Vec<ItemId> = (0..tax.len() as u32).map(ItemId).collect();
    assert!(items.len() <= 20, "oracle is exponential");
    let mut out = BTreeMap::new();
    for mask in 1u32..(1 << items.len()) {
        let set: Vec<ItemId> = items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &g)| g)
            .collect();
        let related = set.iter().enumerate().any(|(i, &a)| {
            set[i + 1..]
                .iter()
                .any(|&b| is_ancestor_or_self(tax, a, b) || is_ancestor_or_self(tax, b, a))
        });
        if related {
            continue;
        }
        let (utility, support) = naive_itemset_utility(tax, db, &set);
        if support > 0 && utility >= minutil {
            out.insert(set, utility);
        }
    }
    out
}

pub fn as_id_map(itemsets: &BTreeMap<Itemset, u64>) -> BTreeMap<Vec<ItemId>, u64> {
    itemsets
        .iter()
        .map(|(s, &u)| (s.members().to_vec(), u))
        .collect()
}
