//! Seeded dataset generators: tiny instances for property tests and a
//! retail-shaped slice for benchmarking.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::select_random;
use crate::fixtures::Example;
use crate::io::NameMap;
use crate::miner::mine_clhuis;
use crate::model::{ItemId, Itemset, QuantitativeDatabase, Taxonomy, Transaction, UtilityTable};

/// Size limits for [`small_instance`].
#[derive(Debug, Clone, Copy)]
pub struct SmallParams {
    pub max_leaves: usize,
    pub max_generalized: usize,
    pub max_transactions: usize,
    pub max_quantity: u32,
    pub max_profit: u32,
}

impl Default for SmallParams {
    fn default() -> Self {
        Self {
            max_leaves: 8,
            max_generalized: 4,
            max_transactions: 12,
            max_quantity: 5,
            max_profit: 10,
        }
    }
}

/// Taxonomy item names: generalized nodes are `G0, G1, ...`, leaves `i0, i1, ...`.
/// Generalized nodes take the low ids.
fn build_names(generalized: usize, leaves: usize) -> NameMap {
    let mut names = NameMap::new();
    for g in 0..generalized {
        names.intern(&format!("G{g}"));
    }
    for l in 0..leaves {
        names.intern(&format!("i{l}"));
    }
    names
}

/// A random instance whose generalized items each cover at least one leaf.
pub fn small_instance(seed: u64, params: SmallParams) -> Example {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_leaves = rng.gen_range(2..=params.max_leaves.max(2));
    let n_gen = rng.gen_range(0..=params.max_generalized.min(n_leaves));
    let n = n_gen + n_leaves;

    let mut parent: Vec<Option<ItemId>> = vec![None; n];
    // A generalized node hangs under an earlier one or the root.
    for (g, slot) in parent.iter_mut().enumerate().take(n_gen).skip(1) {
        if rng.gen_bool(0.6) {
            *slot = Some(ItemId(rng.gen_range(0..g) as u32));
        }
    }
    // The first n_gen leaves pin one leaf under each generalized node.
    for l in 0..n_leaves {
        parent[n_gen + l] = if l < n_gen {
            Some(ItemId(l as u32))
        } else if n_gen > 0 && rng.gen_bool(0.7) {
            Some(ItemId(rng.gen_range(0..n_gen) as u32))
        } else {
            None
        };
    }
    let taxonomy = Taxonomy::from_parents(parent).expect("generated forest is acyclic");

    let leaves: Vec<ItemId> = (n_gen..n).map(|i| ItemId(i as u32)).collect();
    let mut profits = UtilityTable::new();
    for &l in &leaves {
        profits.set(l, rng.gen_range(1..=params.max_profit));
    }
    let n_tx = rng.gen_range(1..=params.max_transactions.max(1));
    let transactions = (0..n_tx)
        .map(|i| {
            let len = rng.gen_range(1..=leaves.len().min(5));
            let picked: Vec<ItemId> = leaves.choose_multiple(&mut rng, len).copied().collect();
            let entries = picked
                .into_iter()
                .map(|l| (l, rng.gen_range(1..=params.max_quantity)))
                .collect();
            Transaction::new(i as u32 + 1, entries).expect("distinct leaves")
        })
        .collect();
    let db = QuantitativeDatabase::new(transactions, profits).expect("every leaf has a profit");
    Example {
        taxonomy,
        db,
        names: build_names(n_gen, n_leaves),
    }
}

/// Shape of a retail-style dataset: a five-level product hierarchy with
/// generalized counts per level, leaves hung under the deepest level.
#[derive(Debug, Clone)]
pub struct RetailParams {
    pub transactions: usize,
    pub leaves: usize,
    /// Generalized nodes on each level, top first.
    pub levels: Vec<usize>,
    /// Transaction length is drawn uniformly from this range.
    pub min_len: usize,
    pub max_len: usize,
    pub max_quantity: u32,
    pub max_profit: u32,
}

impl Default for RetailParams {
    fn default() -> Self {
        Self {
            transactions: 5000,
            leaves: 1560,
            levels: vec![3, 10, 30, 59],
            min_len: 2,
            max_len: 7,
            max_quantity: 5,
            max_profit: 20,
        }
    }
}

pub fn retail_instance(seed: u64, params: &RetailParams) -> Example {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_gen: usize = params.levels.iter().sum();
    let n = n_gen + params.leaves;
    let mut parent: Vec<Option<ItemId>> = vec![None; n];

    // Level k node j hangs under level k-1 node j mod width(k-1), so every
    // node above the bottom level has a child.
    let mut start = 0;
    let mut prev: Option<(usize, usize)> = None;
    for &width in &params.levels {
        if let Some((ps, pw)) = prev {
            for j in 0..width {
                parent[start + j] = Some(ItemId((ps + j % pw) as u32));
            }
        }
        prev = Some((start, width));
        start += width;
    }
    if let Some((ps, pw)) = prev {
        for l in 0..params.leaves {
            let p = if l < pw { l } else { rng.gen_range(0..pw) };
            parent[n_gen + l] = Some(ItemId((ps + p) as u32));
        }
    }
    let taxonomy = Taxonomy::from_parents(parent).expect("generated forest is acyclic");

    let mut profits = UtilityTable::new();
    for l in 0..params.leaves {
        profits.set(
            ItemId((n_gen + l) as u32),
            rng.gen_range(1..=params.max_profit),
        );
    }
    // Popularity is skewed towards low leaf indices.
    let transactions = (0..params.transactions)
        .map(|i| {
            let len = rng
                .gen_range(params.min_len..=params.max_len)
                .min(params.leaves);
            let mut picked: Vec<usize> = Vec::with_capacity(len);
            while picked.len() < len {
                let x: f64 = rng.gen();
                let l = ((x * x) * params.leaves as f64) as usize;
                if !picked.contains(&l) {
                    picked.push(l);
                }
            }
            let entries = picked
                .into_iter()
                .map(|l| {
                    (
                        ItemId((n_gen + l) as u32),
                        rng.gen_range(1..=params.max_quantity),
                    )
                })
                .collect();
            Transaction::new(i as u32 + 1, entries).expect("distinct leaves")
        })
        .collect();
    let db = QuantitativeDatabase::new(transactions, profits).expect("every leaf has a profit");
    Example {
        taxonomy,
        db,
        names: build_names(n_gen, params.leaves),
    }
}

/// A hiding problem: database, threshold and sensitive itemsets.
pub struct HidingCase {
    pub ex: Example,
    pub minutil: u64,
    pub sensitive: Vec<Itemset>,
}

/// A small random instance with a threshold between 10% and 40% of the
/// database utility, plus 1–3 sensitive itemsets drawn from its CLHUIs.
/// `None` when nothing reaches the threshold.
pub fn hiding_case(seed: u64) -> Option<HidingCase> {
    let ex = small_instance(seed, SmallParams::default());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let total = ex.db.total_utility();
    let minutil = (total as f64 * rng.gen_range(0.1..0.4)).ceil().max(1.0) as u64;
    let mined = mine_clhuis(&ex.db, &ex.taxonomy, minutil);
    if mined.is_empty() {
        return None;
    }
    let k = rng.gen_range(1..=3usize).min(mined.len());
    let sensitive = select_random(&mined, k, seed).expect("k within range");
    Some(HidingCase {
        ex,
        minutil,
        sensitive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instances_respect_bounds() {
        let p = SmallParams::default();
        for seed in 0..200 {
            let ex = small_instance(seed, p);
            let gens: Vec<ItemId> = ex
                .taxonomy
                .items()
                .filter(|&i| ex.taxonomy.is_generalized(i))
                .collect();
            let leaves = ex.taxonomy.len() - gens.len();
            assert!(gens.len() <= 4 && leaves <= 8 && !ex.db.is_empty() && ex.db.len() <= 12);
            ex.db.validate(&ex.taxonomy).unwrap();
            assert_eq!(ex.names.len(), ex.taxonomy.len());
        }
    }

    #[test]
    fn small_instance_is_reproducible() {
        let a = small_instance(7, SmallParams::default());
        let b = small_instance(7, SmallParams::default());
        assert_eq!(a.db, b.db);
        assert_eq!(a.taxonomy, b.taxonomy);
    }

    #[test]
    fn retail_shape() {
        let params = RetailParams {
            transactions: 500,
            ..Default::default()
        };
        let ex = retail_instance(1, &params);
        assert_eq!(ex.taxonomy.len(), 1560 + 102);
        assert_eq!(ex.taxonomy.max_level(), 5);
        let gens = ex
            .taxonomy
            .items()
            .filter(|&i| ex.taxonomy.is_generalized(i))
            .count();
        assert_eq!(gens, 102);
        let avg = ex.db.transactions().iter().map(|t| t.len()).sum::<usize>() as f64 / 500.0;
        assert!((4.0..5.0).contains(&avg), "{avg}");
        ex.db.validate(&ex.taxonomy).unwrap();
    }
}
