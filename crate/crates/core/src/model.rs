//! Taxonomies, quantitative transaction databases, itemsets and the utility
//! arithmetic defined over them.
//!
//! Leaf items and generalized items share one dense id space. The taxonomy
//! root is virtual: it has no [`ItemId`] and never appears in an itemset.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown item id {0}")]
    UnknownItem(ItemId),
    #[error("item {0} is its own parent")]
    SelfParent(ItemId),
    #[error("taxonomy contains a cycle through item {0}")]
    Cycle(ItemId),
    #[error("itemset contains {ancestor} together with its descendant {descendant}")]
    AncestorDescendantPair {
        ancestor: ItemId,
        descendant: ItemId,
    },
    #[error("itemset is empty")]
    EmptyItemset,
    #[error("duplicate transaction id {0}")]
    DuplicateTid(u32),
    #[error("duplicate item {item} in transaction {tid}")]
    DuplicateItem { tid: u32, item: ItemId },
    #[error("non-positive quantity for item {item} in transaction {tid}")]
    NonPositiveQuantity { tid: u32, item: ItemId },
    #[error("item {item} in transaction {tid} has no unit profit")]
    MissingProfit { tid: u32, item: ItemId },
    #[error("generalized item {item} appears in transaction {tid}")]
    GeneralizedInTransaction { tid: u32, item: ItemId },
    #[error("unknown transaction id {0}")]
    UnknownTid(u32),
    #[error("item {item} is not present in transaction {tid}")]
    ItemNotInTransaction { tid: u32, item: ItemId },
    #[error("cannot reduce item {item} in transaction {tid} by {by}: quantity is {quantity}")]
    ReductionTooLarge {
        tid: u32,
        item: ItemId,
        quantity: u32,
        by: u32,
    },
}

/// Dense identifier of a leaf or generalized item.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A forest of items hanging below a virtual root.
///
/// Ancestor tests are answered in O(1) from pre/post-order stamps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    parent: Vec<Option<ItemId>>,
    children: Vec<Vec<ItemId>>,
    roots: Vec<ItemId>,
    level: Vec<u32>,
    enter: Vec<u32>,
    exit: Vec<u32>,
}

impl Taxonomy {
    /// Builds a taxonomy from a parent table indexed by item id. `None`
    /// places the item directly under the virtual root.
    pub fn from_parents(parent: Vec<Option<ItemId>>) -> Result<Self, ModelError> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (i, p) in parent.iter().enumerate() {
            let item = ItemId(i as u32);
            match p {
                None => roots.push(item),
                Some(p) if *p == item => return Err(ModelError::SelfParent(item)),
                Some(p) if p.index() >= n => return Err(ModelError::UnknownItem(*p)),
                Some(p) => children[p.index()].push(item),
            }
        }

        let mut level = vec![0u32; n];
        let mut enter = vec![0u32; n];
        let mut exit = vec![0u32; n];
        let mut seen = vec![false; n];
        let mut clock = 0u32;
        // Iterative DFS; (node, next child index).
        let mut stack: Vec<(ItemId, usize)> = Vec::new();
        for &r in &roots {
            level[r.index()] = 1;
            seen[r.index()] = true;
            enter[r.index()] = clock;
            clock += 1;
            stack.push((r, 0));
            while let Some((node, next)) = stack.last_mut() {
                let node = *node;
                if let Some(&child) = children[node.index()].get(*next) {
                    *next += 1;
                    seen[child.index()] = true;
                    level[child.index()] = level[node.index()] + 1;
                    enter[child.index()] = clock;
                    clock += 1;
                    stack.push((child, 0));
                } else {
                    exit[node.index()] = clock;
                    stack.pop();
                }
            }
        }
        // Anything not reachable from the root sits on a cycle.
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(ModelError::Cycle(ItemId(i as u32)));
        }

        Ok(Self {
            parent,
            children,
            roots,
            level,
            enter,
            exit,
        })
    }

    /// Every item sits directly under the root.
    pub fn flat(n: usize) -> Self {
        Self::from_parents(vec![None; n]).expect("flat taxonomy is always valid")
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        (0..self.parent.len() as u32).map(ItemId)
    }

    pub fn contains(&self, item: ItemId) -> bool {
        item.index() < self.parent.len()
    }

    fn check(&self, item: ItemId) -> Result<(), ModelError> {
        if self.contains(item) {
            Ok(())
        } else {
            Err(ModelError::UnknownItem(item))
        }
    }

    pub fn parent(&self, item: ItemId) -> Option<ItemId> {
        self.parent[item.index()]
    }

    pub fn children(&self, item: ItemId) -> &[ItemId] {
        &self.children[item.index()]
    }

    /// Items directly below the virtual root.
    pub fn roots(&self) -> &[ItemId] {
        &self.roots
    }

    pub fn is_leaf(&self, item: ItemId) -> bool {
        self.children[item.index()].is_empty()
    }

    pub fn is_generalized(&self, item: ItemId) -> bool {
        !self.is_leaf(item)
    }

    /// Edge count from the virtual root.
    pub fn level(&self, item: ItemId) -> Result<u32, ModelError> {
        self.check(item)?;
        Ok(self.level[item.index()])
    }

    pub fn max_level(&self) -> u32 {
        self.level.iter().copied().max().unwrap_or(0)
    }

    /// True when `ancestor` is `item` or lies on its path to the root.
    #[inline]
    pub fn is_ancestor_or_self(&self, ancestor: ItemId, item: ItemId) -> bool {
        let (a, d) = (ancestor.index(), item.index());
        self.enter[a] <= self.enter[d] && self.exit[d] <= self.exit[a]
    }

    /// True when one item is an ancestor of (or equal to) the other.
    #[inline]
    pub fn related(&self, a: ItemId, b: ItemId) -> bool {
        self.is_ancestor_or_self(a, b) || self.is_ancestor_or_self(b, a)
    }

    /// Strict ancestors, nearest first.
    pub fn ancestors(&self, item: ItemId) -> Ancestors<'_> {
        Ancestors {
            taxonomy: self,
            next: self.parent[item.index()],
        }
    }

    /// Strict descendants in pre-order.
    pub fn descendants(&self, item: ItemId) -> Result<Vec<ItemId>, ModelError> {
        self.check(item)?;
        let mut out = Vec::new();
        let mut stack: Vec<ItemId> = self.children(item).iter().rev().copied().collect();
        while let Some(node) = stack.pop() {
            out.push(node);
            stack.extend(self.children(node).iter().rev().copied());
        }
        Ok(out)
    }

    /// Leaf items reachable from `item`; a leaf is its own leaf set.
    pub fn leaves(&self, item: ItemId) -> Result<Vec<ItemId>, ModelError> {
        self.check(item)?;
        if self.is_leaf(item) {
            return Ok(vec![item]);
        }
        Ok(self
            .descendants(item)?
            .into_iter()
            .filter(|&d| self.is_leaf(d))
            .collect())
    }
}

pub struct Ancestors<'a> {
    taxonomy: &'a Taxonomy,
    next: Option<ItemId>,
}

impl Iterator for Ancestors<'_> {
    type Item = ItemId;

    fn next(&mut self) -> Option<ItemId> {
        let cur = self.next?;
        self.next = self.taxonomy.parent[cur.index()];
        Some(cur)
    }
}

/// Unit profit of each leaf item.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UtilityTable {
    profits: Vec<Option<u32>>,
}

impl UtilityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, item: ItemId, profit: u32) {
        if self.profits.len() <= item.index() {
            self.profits.resize(item.index() + 1, None);
        }
        self.profits[item.index()] = Some(profit);
    }

    pub fn get(&self, item: ItemId) -> Option<u32> {
        self.profits.get(item.index()).copied().flatten()
    }

    /// Profit of an item known to be present; zero otherwise.
    #[inline]
    pub fn profit(&self, item: ItemId) -> u64 {
        self.get(item).unwrap_or(0) as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, u32)> + '_ {
        self.profits
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (ItemId(i as u32), p)))
    }
}

/// One transaction: leaf items with strictly positive quantities, sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    tid: u32,
    entries: Vec<(ItemId, u32)>,
}

impl Transaction {
    pub fn new(tid: u32, mut entries: Vec<(ItemId, u32)>) -> Result<Self, ModelError> {
        entries.sort_by_key(|e| e.0);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ModelError::DuplicateItem { tid, item: w[0].0 });
            }
        }
        if let Some(&(item, _)) = entries.iter().find(|e| e.1 == 0) {
            return Err(ModelError::NonPositiveQuantity { tid, item });
        }
        Ok(Self { tid, entries })
    }

    pub fn tid(&self) -> u32 {
        self.tid
    }

    pub fn entries(&self) -> &[(ItemId, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn quantity(&self, item: ItemId) -> Option<u32> {
        self.entries
            .binary_search_by_key(&item, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn has(&self, item: ItemId) -> bool {
        self.quantity(item).is_some()
    }
}

/// Ordered transactions plus the unit-profit table, with a per-transaction
/// TU cache that every mutation keeps exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantitativeDatabase {
    transactions: Vec<Transaction>,
    profits: UtilityTable,
    tu: Vec<u64>,
    position: HashMap<u32, usize>,
}

impl QuantitativeDatabase {
    pub fn new(transactions: Vec<Transaction>, profits: UtilityTable) -> Result<Self, ModelError> {
        let mut position = HashMap::with_capacity(transactions.len());
        for (i, t) in transactions.iter().enumerate() {
            if position.insert(t.tid, i).is_some() {
                return Err(ModelError::DuplicateTid(t.tid));
            }
            for &(item, _) in &t.entries {
                if profits.get(item).is_none() {
                    return Err(ModelError::MissingProfit { tid: t.tid, item });
                }
            }
        }
        let tu = transactions
            .iter()
            .map(|t| {
                t.entries
                    .iter()
                    .map(|&(v, q)| q as u64 * profits.profit(v))
                    .sum()
            })
            .collect();
        Ok(Self {
            transactions,
            profits,
            tu,
            position,
        })
    }

    /// Checks that every transaction item is a leaf of `taxonomy`.
    pub fn validate(&self, taxonomy: &Taxonomy) -> Result<(), ModelError> {
        for t in &self.transactions {
            for &(item, _) in &t.entries {
                if !taxonomy.contains(item) {
                    return Err(ModelError::UnknownItem(item));
                }
                if taxonomy.is_generalized(item) {
                    return Err(ModelError::GeneralizedInTransaction { tid: t.tid, item });
                }
            }
        }
        Ok(())
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn profits(&self) -> &UtilityTable {
        &self.profits
    }

    pub fn position(&self, tid: u32) -> Option<usize> {
        self.position.get(&tid).copied()
    }

    pub fn get(&self, tid: u32) -> Option<&Transaction> {
        self.position(tid).map(|i| &self.transactions[i])
    }

    /// Cached transaction utility of the transaction at `index`.
    pub fn tu_at(&self, index: usize) -> u64 {
        self.tu[index]
    }

    pub fn total_utility(&self) -> u64 {
        self.tu.iter().sum()
    }

    /// u(v, T) for a leaf item.
    #[inline]
    pub fn leaf_utility(&self, item: ItemId, t: &Transaction) -> u64 {
        t.quantity(item)
            .map_or(0, |q| q as u64 * self.profits.profit(item))
    }

    /// Removes a leaf from a transaction; returns the removed quantity.
    pub fn remove_item(&mut self, tid: u32, item: ItemId) -> Result<u32, ModelError> {
        let i = self.position(tid).ok_or(ModelError::UnknownTid(tid))?;
        let t = &mut self.transactions[i];
        let k = t
            .entries
            .binary_search_by_key(&item, |e| e.0)
            .map_err(|_| ModelError::ItemNotInTransaction { tid, item })?;
        let (_, q) = t.entries.remove(k);
        self.tu[i] -= q as u64 * self.profits.profit(item);
        Ok(q)
    }

    /// Lowers the quantity of a leaf. The result must stay strictly positive.
    pub fn reduce_item(&mut self, tid: u32, item: ItemId, by: u32) -> Result<(), ModelError> {
        let i = self.position(tid).ok_or(ModelError::UnknownTid(tid))?;
        let t = &mut self.transactions[i];
        let k = t
            .entries
            .binary_search_by_key(&item, |e| e.0)
            .map_err(|_| ModelError::ItemNotInTransaction { tid, item })?;
        let quantity = t.entries[k].1;
        if by >= quantity {
            return Err(ModelError::ReductionTooLarge {
                tid,
                item,
                quantity,
                by,
            });
        }
        t.entries[k].1 -= by;
        self.tu[i] -= by as u64 * self.profits.profit(item);
        Ok(())
    }
}

/// A sorted set of items with no ancestor–descendant pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Itemset(Vec<ItemId>);

impl Itemset {
    pub fn new(mut members: Vec<ItemId>, taxonomy: &Taxonomy) -> Result<Self, ModelError> {
        if members.is_empty() {
            return Err(ModelError::EmptyItemset);
        }
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            taxonomy.check(m)?;
        }
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if taxonomy.is_ancestor_or_self(a, b) {
                    return Err(ModelError::AncestorDescendantPair {
                        ancestor: a,
                        descendant: b,
                    });
                }
                if taxonomy.is_ancestor_or_self(b, a) {
                    return Err(ModelError::AncestorDescendantPair {
                        ancestor: b,
                        descendant: a,
                    });
                }
            }
        }
        Ok(Self(members))
    }

    /// Caller guarantees sorted, duplicate-free, ancestor-free members.
    pub(crate) fn from_sorted_unchecked(members: Vec<ItemId>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Self(members)
    }

    pub fn members(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_item(&self, item: ItemId) -> bool {
        self.0.binary_search(&item).is_ok()
    }
}

/// u(g, T): utility of a leaf, or the summed utility of the present leaves
/// of a generalized item.
pub fn gen_item_utility(
    taxonomy: &Taxonomy,
    db: &QuantitativeDatabase,
    item: ItemId,
    t: &Transaction,
) -> u64 {
    if taxonomy.is_leaf(item) {
        return db.leaf_utility(item, t);
    }
    t.entries
        .iter()
        .filter(|&&(v, _)| taxonomy.is_ancestor_or_self(item, v))
        .map(|&(v, q)| q as u64 * db.profits.profit(v))
        .sum()
}

/// True when some leaf of `item` (or `item` itself) is present in `t`.
#[inline]
pub fn item_present(taxonomy: &Taxonomy, item: ItemId, t: &Transaction) -> bool {
    if taxonomy.is_leaf(item) {
        return t.has(item);
    }
    t.entries
        .iter()
        .any(|&(v, _)| taxonomy.is_ancestor_or_self(item, v))
}

pub fn itemset_contains(taxonomy: &Taxonomy, t: &Transaction, itemset: &Itemset) -> bool {
    itemset
        .members()
        .iter()
        .all(|&g| item_present(taxonomy, g, t))
}

/// u(P, T) if `t` supports `itemset`, otherwise `None`.
pub fn itemset_utility_in(
    taxonomy: &Taxonomy,
    db: &QuantitativeDatabase,
    itemset: &Itemset,
    t: &Transaction,
) -> Option<u64> {
    let mut total = 0;
    for &g in itemset.members() {
        let u = gen_item_utility(taxonomy, db, g, t);
        if u == 0 {
            return None;
        }
        total += u;
    }
    Some(total)
}

/// u(P) over the whole database.
pub fn itemset_utility(taxonomy: &Taxonomy, db: &QuantitativeDatabase, itemset: &Itemset) -> u64 {
    db.transactions()
        .iter()
        .filter_map(|t| itemset_utility_in(taxonomy, db, itemset, t))
        .sum()
}

pub fn transaction_utility(db: &QuantitativeDatabase, t: &Transaction) -> u64 {
    t.entries
        .iter()
        .map(|&(v, q)| q as u64 * db.profits.profit(v))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;

    #[test]
    fn leaves_descendants_levels() {
        let ex = worked_example();
        let (tax, id) = (&ex.taxonomy, |n: &str| ex.id(n));
        let sorted = |mut v: Vec<ItemId>| {
            v.sort();
            v
        };
        let set = |names: &[&str]| sorted(names.iter().map(|n| id(n)).collect());

        assert_eq!(sorted(tax.leaves(id("X")).unwrap()), set(&["a", "b", "c"]));
        assert_eq!(tax.leaves(id("a")).unwrap(), vec![id("a")]);
        assert_eq!(sorted(tax.leaves(id("Z")).unwrap()), set(&["d", "e"]));

        assert_eq!(
            sorted(tax.descendants(id("X")).unwrap()),
            set(&["Y", "a", "b", "c"])
        );
        assert!(tax.descendants(id("f")).unwrap().is_empty());
        assert_eq!(sorted(tax.descendants(id("Y")).unwrap()), set(&["a", "b"]));

        assert_eq!(tax.level(id("Y")).unwrap(), 2);
        assert_eq!(tax.level(id("X")).unwrap(), 1);
        assert_eq!(tax.level(id("a")).unwrap(), 3);
    }

    #[test]
    fn unknown_item_is_structural_error() {
        let ex = worked_example();
        let bogus = ItemId(999);
        assert_eq!(
            ex.taxonomy.leaves(bogus),
            Err(ModelError::UnknownItem(bogus))
        );
        assert_eq!(
            ex.taxonomy.descendants(bogus),
            Err(ModelError::UnknownItem(bogus))
        );
        assert_eq!(
            ex.taxonomy.level(bogus),
            Err(ModelError::UnknownItem(bogus))
        );
    }

    #[test]
    fn cycles_and_self_parents_rejected() {
        let p = vec![Some(ItemId(1)), Some(ItemId(0))];
        assert!(matches!(
            Taxonomy::from_parents(p),
            Err(ModelError::Cycle(_))
        ));
        let p = vec![Some(ItemId(0))];
        assert_eq!(
            Taxonomy::from_parents(p),
            Err(ModelError::SelfParent(ItemId(0)))
        );
    }

    #[test]
    fn item_utilities() {
        let ex = worked_example();
        let (tax, db) = (&ex.taxonomy, &ex.db);
        let t = |tid| db.get(tid).unwrap();
        assert_eq!(gen_item_utility(tax, db, ex.id("X"), t(5)), 6);
        assert_eq!(gen_item_utility(tax, db, ex.id("X"), t(4)), 0);
        assert_eq!(gen_item_utility(tax, db, ex.id("Z"), t(6)), 19);
    }

    #[test]
    fn containment() {
        let ex = worked_example();
        let (tax, db) = (&ex.taxonomy, &ex.db);
        let xd = ex.itemset(&["X", "d"]);
        let supp: Vec<u32> = db
            .transactions()
            .iter()
            .filter(|t| itemset_contains(tax, t, &xd))
            .map(|t| t.tid())
            .collect();
        assert_eq!(supp, vec![1, 2, 3, 5]);
        assert!(itemset_contains(tax, db.get(2).unwrap(), &xd));
        assert!(!itemset_contains(
            tax,
            db.get(7).unwrap(),
            &ex.itemset(&["Z", "Y"])
        ));
        let empty = Itemset::from_sorted_unchecked(vec![]);
        assert!(itemset_contains(tax, db.get(1).unwrap(), &empty));
    }

    #[test]
    fn itemset_utilities() {
        let ex = worked_example();
        let (tax, db) = (&ex.taxonomy, &ex.db);
        assert_eq!(itemset_utility(tax, db, &ex.itemset(&["X"])), 66);
        // T1 = {a, b, d} supports {Z, b} too: 4 + 11 + 4 + 10.
        assert_eq!(itemset_utility(tax, db, &ex.itemset(&["Z", "b"])), 29);
        assert_eq!(itemset_utility(tax, db, &ex.itemset(&["e", "d"])), 57);
    }

    #[test]
    fn transaction_utilities_match_table() {
        let ex = worked_example();
        let tus: Vec<u64> = (0..ex.db.len()).map(|i| ex.db.tu_at(i)).collect();
        // T3 = a:1 b:2 c:5 d:1 e:3 sums to 5 + 2 + 15 + 3 + 6 = 31.
        assert_eq!(tus, vec![9, 21, 31, 18, 9, 21, 13, 15]);
        assert_eq!(ex.db.total_utility(), 137);
        let empty = Transaction::new(99, vec![]).unwrap();
        assert_eq!(transaction_utility(&ex.db, &empty), 0);
    }

    #[test]
    fn itemset_rejects_ancestor_pairs() {
        let ex = worked_example();
        let err = Itemset::new(vec![ex.id("X"), ex.id("a")], &ex.taxonomy).unwrap_err();
        assert!(matches!(err, ModelError::AncestorDescendantPair { .. }));
        assert_eq!(
            Itemset::new(vec![], &ex.taxonomy),
            Err(ModelError::EmptyItemset)
        );
    }

    #[test]
    fn duplicate_items_and_zero_quantities_rejected() {
        assert!(matches!(
            Transaction::new(1, vec![(ItemId(0), 1), (ItemId(0), 2)]),
            Err(ModelError::DuplicateItem { .. })
        ));
        assert!(matches!(
            Transaction::new(1, vec![(ItemId(0), 0)]),
            Err(ModelError::NonPositiveQuantity { .. })
        ));
    }

    #[test]
    fn removal_lowers_tu_by_item_utility() {
        let mut ex = worked_example();
        let d = ex.id("d");
        let before = ex.db.tu_at(0);
        ex.db.remove_item(1, d).unwrap();
        assert_eq!(ex.db.tu_at(0), before - 3);
        assert_eq!(
            ex.db.tu_at(0),
            transaction_utility(&ex.db, &ex.db.transactions()[0])
        );
        ex.db.reduce_item(2, d, 1).unwrap();
        assert_eq!(ex.db.tu_at(1), 18);
        assert!(matches!(
            ex.db.reduce_item(2, d, 2),
            Err(ModelError::ReductionTooLarge { .. })
        ));
    }
}
