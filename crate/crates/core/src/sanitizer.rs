//! Sensitive itemset hiding by victim-item deletion and quantity reduction.
//!
//! The three strategies share one hiding engine and differ only in how the
//! victim item of each sensitive itemset is chosen and in which order the
//! victim's leaves are edited.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gidic::{build_gidic, GIDic, GIDicError};
use crate::io::NameMap;
use crate::miner::MiningResult;
use crate::model::{
    gen_item_utility, itemset_contains, itemset_utility, itemset_utility_in, ItemId, Itemset,
    ModelError, QuantitativeDatabase, Taxonomy,
};

#[derive(Debug, Error)]
pub enum SanitizeError {
    #[error("sensitive itemset {0:?} is not among the mined itemsets")]
    NotMined(Vec<ItemId>),
    #[error("sensitive itemset {itemset:?} has utility {utility} below minutil {minutil}")]
    BelowThreshold {
        itemset: Vec<ItemId>,
        utility: u64,
        minutil: u64,
    },
    #[error(
        "residual utility bookkeeping diverged for {itemset:?}: tracked {tracked}, actual {actual}"
    )]
    Inconsistent {
        itemset: Vec<ItemId>,
        tracked: u64,
        actual: u64,
    },
    #[error(
        "could not hide {itemset:?}: residual utility {residual} still reaches minutil {minutil}"
    )]
    HidingIncomplete {
        itemset: Vec<ItemId>,
        residual: u64,
        minutil: u64,
    },
    #[error(transparent)]
    GIDic(#[from] GIDicError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    MinRF,
    MaxRF,
    BestNSCF,
}

/// Order in which a victim's leaves are edited, by their RGISU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafOrder {
    Ascending,
    Descending,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::MinRF, Strategy::MaxRF, Strategy::BestNSCF];

    pub fn leaf_order(self) -> LeafOrder {
        match self {
            Strategy::MinRF | Strategy::BestNSCF => LeafOrder::Ascending,
            Strategy::MaxRF => LeafOrder::Descending,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::MinRF => "min-rf",
            Strategy::MaxRF => "max-rf",
            Strategy::BestNSCF => "best-nscf",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "min-rf" => Ok(Strategy::MinRF),
            "max-rf" => Ok(Strategy::MaxRF),
            "best-nscf" => Ok(Strategy::BestNSCF),
            other => Err(format!(
                "unknown strategy '{other}' (expected min-rf|max-rf|best-nscf)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditKind {
    Delete,
    Reduce,
}

/// One change to the database. `delta` is the quantity removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edit {
    pub tid: u32,
    pub item: ItemId,
    pub kind: EditKind,
    pub delta: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EditLog {
    pub edits: Vec<Edit>,
    pub modified: BTreeSet<u32>,
}

impl EditLog {
    fn push(&mut self, edit: Edit) {
        self.modified.insert(edit.tid);
        self.edits.push(edit);
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    /// Re-applies every edit to `db`.
    pub fn replay(&self, db: &mut QuantitativeDatabase) -> Result<(), ModelError> {
        for e in &self.edits {
            match e.kind {
                EditKind::Delete => {
                    db.remove_item(e.tid, e.item)?;
                }
                EditKind::Reduce => db.reduce_item(e.tid, e.item, e.delta)?,
            }
        }
        Ok(())
    }

    /// One `tid item kind delta` line per edit.
    pub fn render(&self, names: &NameMap) -> String {
        self.edits
            .iter()
            .map(|e| {
                let kind = match e.kind {
                    EditKind::Delete => "delete",
                    EditKind::Reduce => "reduce",
                };
                format!("{} {} {kind} {}\n", e.tid, names.name(e.item), e.delta)
            })
            .collect()
    }
}

/// One sensitive itemset scheduled for hiding with its victim item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HidingTask {
    /// Position of the itemset in the sensitive list.
    pub index: usize,
    pub itemset: Itemset,
    pub victim: ItemId,
}

pub fn select_victim(itemset: &Itemset, dic: &GIDic, strategy: Strategy) -> ItemId {
    let members = itemset.members();
    assert!(
        !members.is_empty(),
        "victim selection needs a nonempty itemset"
    );
    let e = |m: ItemId| dic.entry(m);
    match strategy {
        Strategy::MinRF => *members.iter().min_by_key(|&&m| (e(m).rgisu, m)).unwrap(),
        Strategy::MaxRF => *members
            .iter()
            .min_by_key(|&&m| (std::cmp::Reverse(e(m).rgisu), m))
            .unwrap(),
        Strategy::BestNSCF => {
            let dominates = |m: ItemId, ok: &dyn Fn(ItemId, ItemId) -> bool| {
                members.iter().all(|&o| o == m || ok(m, o))
            };
            let best = |m: ItemId, o: ItemId| e(m).nsc <= e(o).nsc && e(m).sc >= e(o).sc;
            let cheap = |m: ItemId, o: ItemId| e(m).nsc <= e(o).nsc && e(m).rgisu <= e(o).rgisu;
            members
                .iter()
                .copied()
                .find(|&m| dominates(m, &best))
                .or_else(|| members.iter().copied().find(|&m| dominates(m, &cheap)))
                .unwrap_or_else(|| {
                    *members
                        .iter()
                        .min_by_key(|&&m| (e(m).nsc, e(m).rgisu, m))
                        .unwrap()
                })
        }
    }
}

/// Tasks by descending victim RGISU; equal keys keep input order.
pub fn order_tasks(sensitive: &[Itemset], victims: &[ItemId], dic: &GIDic) -> Vec<HidingTask> {
    assert_eq!(
        sensitive.len(),
        victims.len(),
        "one victim per sensitive itemset"
    );
    let mut tasks: Vec<HidingTask> = sensitive
        .iter()
        .zip(victims)
        .enumerate()
        .map(|(index, (s, &victim))| HidingTask {
            index,
            itemset: s.clone(),
            victim,
        })
        .collect();
    tasks.sort_by_key(|t| std::cmp::Reverse(dic.rgisu(t.victim)));
    tasks
}

/// Mutable hiding state over a private copy of the database.
pub struct Sanitizer<'a> {
    taxonomy: &'a Taxonomy,
    dic: &'a GIDic,
    strategy: Strategy,
    minutil: u64,
    db: QuantitativeDatabase,
    sensitive: Vec<Itemset>,
    residual: Vec<u64>,
    by_tid: HashMap<u32, Vec<usize>>,
    log: EditLog,
    verify: bool,
}

impl<'a> Sanitizer<'a> {
    /// `dic` must have been built from `db` with `sensitive` in this order.
    pub fn new(
        db: QuantitativeDatabase,
        taxonomy: &'a Taxonomy,
        dic: &'a GIDic,
        sensitive: Vec<Itemset>,
        minutil: u64,
        strategy: Strategy,
    ) -> Self {
        let residual = sensitive
            .iter()
            .map(|s| itemset_utility(taxonomy, &db, s))
            .collect();
        let mut by_tid: HashMap<u32, Vec<usize>> = HashMap::new();
        for k in 0..sensitive.len() {
            for &tid in dic.sensitive_tids(k) {
                by_tid.entry(tid).or_default().push(k);
            }
        }
        Self {
            taxonomy,
            dic,
            strategy,
            minutil,
            db,
            sensitive,
            residual,
            by_tid,
            log: EditLog::default(),
            verify: false,
        }
    }

    /// Recompute every residual from scratch after each edit and fail on
    /// any divergence. Quadratic; meant for tests.
    pub fn verify_each_edit(mut self, on: bool) -> Self {
        self.verify = on;
        self
    }

    pub fn database(&self) -> &QuantitativeDatabase {
        &self.db
    }

    pub fn residual(&self, index: usize) -> u64 {
        self.residual[index]
    }

    pub fn log(&self) -> &EditLog {
        &self.log
    }

    pub fn into_parts(self) -> (QuantitativeDatabase, EditLog, Vec<u64>) {
        (self.db, self.log, self.residual)
    }

    fn victim_leaves(&self, victim: ItemId) -> Vec<ItemId> {
        let mut leaves = self
            .taxonomy
            .leaves(victim)
            .expect("victim is a taxonomy item");
        match self.strategy.leaf_order() {
            LeafOrder::Ascending => leaves.sort_by_key(|&l| (self.dic.rgisu(l), l)),
            LeafOrder::Descending => {
                leaves.sort_by_key(|&l| (std::cmp::Reverse(self.dic.rgisu(l)), l))
            }
        }
        leaves
    }

    /// Applies one edit and charges the utility it removes to every sensitive
    /// itemset in the transaction that holds `leaf` or one of its ancestors.
    fn apply(
        &mut self,
        tid: u32,
        leaf: ItemId,
        kind: EditKind,
        delta: u32,
    ) -> Result<(), SanitizeError> {
        let affected: Vec<(usize, u64)> = {
            let t = self.db.get(tid).ok_or(ModelError::UnknownTid(tid))?;
            self.by_tid
                .get(&tid)
                .into_iter()
                .flatten()
                .filter(|&&k| {
                    self.sensitive[k]
                        .members()
                        .iter()
                        .any(|&m| self.taxonomy.is_ancestor_or_self(m, leaf))
                })
                .filter_map(|&k| {
                    itemset_utility_in(self.taxonomy, &self.db, &self.sensitive[k], t)
                        .map(|u| (k, u))
                })
                .collect()
        };
        match kind {
            EditKind::Delete => {
                self.db.remove_item(tid, leaf)?;
            }
            EditKind::Reduce => self.db.reduce_item(tid, leaf, delta)?,
        }
        let t = self.db.get(tid).expect("tid checked above");
        for (k, before) in affected {
            let after =
                itemset_utility_in(self.taxonomy, &self.db, &self.sensitive[k], t).unwrap_or(0);
            self.residual[k] -= before - after;
        }
        self.log.push(Edit {
            tid,
            item: leaf,
            kind,
            delta,
        });

        if self.verify {
            for (k, s) in self.sensitive.iter().enumerate() {
                let actual = itemset_utility(self.taxonomy, &self.db, s);
                if actual != self.residual[k] {
                    return Err(SanitizeError::Inconsistent {
                        itemset: s.members().to_vec(),
                        tracked: self.residual[k],
                        actual,
                    });
                }
            }
        }
        Ok(())
    }

    /// Hides one sensitive itemset; returns the edits made for it.
    pub fn hide_one(&mut self, task: &HidingTask) -> Result<Vec<Edit>, SanitizeError> {
        let start = self.log.len();
        let k = task.index;
        let itemset = self.sensitive[k].clone();
        let mut diff = self.residual[k] as i64 - self.minutil as i64 + 1;
        if diff <= 0 {
            return Ok(Vec::new());
        }
        let leaves = self.victim_leaves(task.victim);

        for &tid in self.dic.st_order() {
            if diff <= 0 {
                break;
            }
            let t = self.db.get(tid).ok_or(ModelError::UnknownTid(tid))?;
            if !itemset_contains(self.taxonomy, t, &itemset) {
                continue;
            }
            for &leaf in &leaves {
                if diff <= 0 {
                    break;
                }
                let t = self.db.get(tid).expect("tid present");
                let Some(quantity) = t.quantity(leaf) else {
                    continue;
                };
                let profit = self.db.profits().profit(leaf);
                let leaf_utility = quantity as u64 * profit;
                if diff as u64 >= leaf_utility {
                    let victim_utility = gen_item_utility(self.taxonomy, &self.db, task.victim, t);
                    if leaf_utility == victim_utility {
                        let u = itemset_utility_in(self.taxonomy, &self.db, &itemset, t)
                            .expect("itemset contained in transaction");
                        diff -= u as i64;
                    } else {
                        diff -= leaf_utility as i64;
                    }
                    self.apply(tid, leaf, EditKind::Delete, quantity)?;
                } else {
                    let diu = (diff as u64).div_ceil(profit) as u32;
                    if diu >= quantity {
                        self.apply(tid, leaf, EditKind::Delete, quantity)?;
                    } else {
                        self.apply(tid, leaf, EditKind::Reduce, diu)?;
                    }
                    diff = 0;
                }
            }
        }

        if self.residual[k] >= self.minutil {
            let actual = itemset_utility(self.taxonomy, &self.db, &itemset);
            if actual != self.residual[k] {
                return Err(SanitizeError::Inconsistent {
                    itemset: itemset.members().to_vec(),
                    tracked: self.residual[k],
                    actual,
                });
            }
            return Err(SanitizeError::HidingIncomplete {
                itemset: itemset.members().to_vec(),
                residual: self.residual[k],
                minutil: self.minutil,
            });
        }
        Ok(self.log.edits[start..].to_vec())
    }
}

#[derive(Debug, Clone)]
pub struct SanitizeOutcome {
    pub database: QuantitativeDatabase,
    pub log: EditLog,
    pub dic: GIDic,
    pub tasks: Vec<HidingTask>,
    /// Tracked residual utility of each sensitive itemset, in input order.
    pub residuals: Vec<(Itemset, u64)>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SanitizeOptions {
    pub verify_each_edit: bool,
}

/// Hides every sensitive itemset of `clhuis` below `minutil`.
pub fn sanitize(
    db: &QuantitativeDatabase,
    taxonomy: &Taxonomy,
    minutil: u64,
    sensitive: &[Itemset],
    clhuis: &MiningResult,
    strategy: Strategy,
) -> Result<SanitizeOutcome, SanitizeError> {
    sanitize_with(
        db,
        taxonomy,
        minutil,
        sensitive,
        clhuis,
        strategy,
        SanitizeOptions::default(),
    )
}

pub fn sanitize_with(
    db: &QuantitativeDatabase,
    taxonomy: &Taxonomy,
    minutil: u64,
    sensitive: &[Itemset],
    clhuis: &MiningResult,
    strategy: Strategy,
    options: SanitizeOptions,
) -> Result<SanitizeOutcome, SanitizeError> {
    let mut seen = HashSet::new();
    let sensitive: Vec<Itemset> = sensitive
        .iter()
        .filter(|s| seen.insert(*s))
        .cloned()
        .collect();
    for s in &sensitive {
        if !clhuis.contains(s) {
            return Err(SanitizeError::NotMined(s.members().to_vec()));
        }
        let utility = itemset_utility(taxonomy, db, s);
        if utility < minutil {
            return Err(SanitizeError::BelowThreshold {
                itemset: s.members().to_vec(),
                utility,
                minutil,
            });
        }
    }
    let non_sensitive: Vec<Itemset> = clhuis
        .itemsets
        .keys()
        .filter(|s| !seen.contains(s))
        .cloned()
        .collect();

    let dic = build_gidic(db, taxonomy, &sensitive, &non_sensitive)?;
    let victims: Vec<ItemId> = sensitive
        .iter()
        .map(|s| select_victim(s, &dic, strategy))
        .collect();
    let tasks = order_tasks(&sensitive, &victims, &dic);

    let mut engine = Sanitizer::new(
        db.clone(),
        taxonomy,
        &dic,
        sensitive.clone(),
        minutil,
        strategy,
    )
    .verify_each_edit(options.verify_each_edit);
    for task in &tasks {
        engine.hide_one(task)?;
    }
    let (database, log, residual) = engine.into_parts();
    let residuals = sensitive.into_iter().zip(residual).collect();
    Ok(SanitizeOutcome {
        database,
        log,
        dic,
        tasks,
        residuals,
    })
}
