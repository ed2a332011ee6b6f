//! Text formats: transaction databases (utility or quantity flavour),
//! taxonomies, profit tables, itemset lists, edit logs and JSON reports.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    ItemId, Itemset, ModelError, QuantitativeDatabase, Taxonomy, Transaction, UtilityTable,
};
use crate::sanitizer::{Edit, EditKind, EditLog};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: ModelError },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// How per-item numbers in a transaction line are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// `items:TU:utilities`; unit profit is 1 so quantity equals utility.
    Utility,
    /// `items:quantities` plus a separate profit table.
    Quantity,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "utility" => Ok(Format::Utility),
            "quantity" => Ok(Format::Quantity),
            other => Err(format!(
                "unknown format '{other}' (expected utility|quantity)"
            )),
        }
    }
}

/// Bidirectional item-name ↔ id map. Names are opaque tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameMap {
    names: Vec<String>,
    ids: HashMap<String, ItemId>,
}

impl NameMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> ItemId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = ItemId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<ItemId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: ItemId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn render(&self, itemset: &Itemset) -> String {
        let names: Vec<&str> = itemset.members().iter().map(|&m| self.name(m)).collect();
        names.join(" ")
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with(['#', '%', '@']))
}

fn parse_positive(line: usize, tok: &str, what: &str) -> Result<u32, IoError> {
    let v: u64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))?;
    if v == 0 {
        return Err(parse_err(line, format!("non-positive {what} '{tok}'")));
    }
    u32::try_from(v).map_err(|_| parse_err(line, format!("{what} '{tok}' out of range")))
}

/// Parses transaction lines; tids count data lines from 1.
pub fn parse_transactions(
    text: &str,
    format: Format,
    names: &mut NameMap,
) -> Result<Vec<Transaction>, IoError> {
    let mut out = Vec::new();
    for (line, raw) in data_lines(text) {
        let parts: Vec<&str> = raw.split(':').collect();
        let (items, values, declared) = match (format, parts.as_slice()) {
            (Format::Utility, [items, tu, utils]) => {
                let tu: u64 = tu
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid transaction utility '{tu}'")))?;
                (*items, *utils, Some(tu))
            }
            (Format::Quantity, [items, qs]) => (*items, *qs, None),
            _ => {
                let want = match format {
                    Format::Utility => "items:TU:utilities",
                    Format::Quantity => "items:quantities",
                };
                return Err(parse_err(line, format!("expected '{want}'")));
            }
        };
        let items: Vec<&str> = items.split_whitespace().collect();
        let values: Vec<&str> = values.split_whitespace().collect();
        if items.len() != values.len() {
            return Err(parse_err(
                line,
                format!("{} items but {} values", items.len(), values.len()),
            ));
        }
        let mut entries = Vec::with_capacity(items.len());
        let mut sum = 0u64;
        for (name, v) in items.iter().zip(&values) {
            let q = parse_positive(line, v, "quantity")?;
            sum += q as u64;
            entries.push((names.intern(name), q));
        }
        if let Some(tu) = declared {
            if tu != sum {
                return Err(parse_err(
                    line,
                    format!("declared transaction utility {tu} but utilities sum to {sum}"),
                ));
            }
        }
        let tid = out.len() as u32 + 1;
        let t =
            Transaction::new(tid, entries).map_err(|source| IoError::Invalid { line, source })?;
        out.push(t);
    }
    Ok(out)
}

/// Child → parent links read from a taxonomy file.
#[derive(Debug, Clone, Default)]
pub struct TaxonomyLinks {
    parent: HashMap<ItemId, ItemId>,
}

impl TaxonomyLinks {
    /// Builds the taxonomy over `item_count` ids; unlinked items hang off the root.
    pub fn build(&self, item_count: usize) -> Result<Taxonomy, ModelError> {
        let mut parent = vec![None; item_count];
        for (&c, &p) in &self.parent {
            parent[c.index()] = Some(p);
        }
        Taxonomy::from_parents(parent)
    }
}

/// Parses `child,parent` lines.
pub fn parse_taxonomy(text: &str, names: &mut NameMap) -> Result<TaxonomyLinks, IoError> {
    let mut links = TaxonomyLinks::default();
    for (line, raw) in data_lines(text) {
        let (child, parent) = raw
            .split_once(',')
            .ok_or_else(|| parse_err(line, "expected 'child,parent'"))?;
        let (child, parent) = (child.trim(), parent.trim());
        if child.is_empty() || parent.is_empty() {
            return Err(parse_err(line, "expected 'child,parent'"));
        }
        if child == parent {
            return Err(parse_err(line, format!("item '{child}' is its own parent")));
        }
        let (c, p) = (names.intern(child), names.intern(parent));
        match links.parent.insert(c, p) {
            Some(prev) if prev != p => {
                return Err(parse_err(
                    line,
                    format!(
                        "item '{child}' has two parents: '{}' and '{parent}'",
                        names.name(prev)
                    ),
                ))
            }
            _ => {}
        }
    }
    Ok(links)
}

/// Parses `item,profit` lines.
pub fn parse_profits(text: &str, names: &mut NameMap) -> Result<UtilityTable, IoError> {
    let mut table = UtilityTable::new();
    for (line, raw) in data_lines(text) {
        let (item, profit) = raw
            .split_once(',')
            .ok_or_else(|| parse_err(line, "expected 'item,profit'"))?;
        let profit = parse_positive(line, profit.trim(), "unit profit")?;
        table.set(names.intern(item.trim()), profit);
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub database: QuantitativeDatabase,
    pub taxonomy: Taxonomy,
    pub names: NameMap,
}

/// Parses a complete dataset. A missing taxonomy gives a flat one.
pub fn load_bundle(
    transactions: &str,
    taxonomy: Option<&str>,
    profits: Option<&str>,
    format: Format,
) -> Result<DatasetBundle, IoError> {
    let mut names = NameMap::new();
    let links = match taxonomy {
        Some(t) => parse_taxonomy(t, &mut names)?,
        None => TaxonomyLinks::default(),
    };
    let table = match (format, profits) {
        (Format::Quantity, Some(p)) => Some(parse_profits(p, &mut names)?),
        (Format::Quantity, None) => {
            return Err(parse_err(0, "quantity format requires a profit table"));
        }
        (Format::Utility, _) => None,
    };
    let txs = parse_transactions(transactions, format, &mut names)?;
    let taxonomy = links.build(names.len())?;
    let table = table.unwrap_or_else(|| {
        let mut t = UtilityTable::new();
        for tx in &txs {
            for &(item, _) in tx.entries() {
                t.set(item, 1);
            }
        }
        t
    });
    let database = QuantitativeDatabase::new(txs, table)?;
    database.validate(&taxonomy)?;
    Ok(DatasetBundle {
        database,
        taxonomy,
        names,
    })
}

/// Serializes a database in the given format. Empty transactions are
/// omitted and utilities are recomputed.
pub fn write_transactions(db: &QuantitativeDatabase, names: &NameMap, format: Format) -> String {
    let mut out = String::new();
    for (i, t) in db.transactions().iter().enumerate() {
        if t.is_empty() {
            continue;
        }
        let items: Vec<&str> = t.entries().iter().map(|&(v, _)| names.name(v)).collect();
        out.push_str(&items.join(" "));
        out.push(':');
        match format {
            Format::Utility => {
                let utils: Vec<String> = t
                    .entries()
                    .iter()
                    .map(|&(v, q)| (q as u64 * db.profits().profit(v)).to_string())
                    .collect();
                let _ = write!(out, "{}:{}", db.tu_at(i), utils.join(" "));
            }
            Format::Quantity => {
                let qs: Vec<String> = t.entries().iter().map(|&(_, q)| q.to_string()).collect();
                out.push_str(&qs.join(" "));
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_profits(table: &UtilityTable, names: &NameMap) -> String {
    table
        .iter()
        .map(|(item, p)| format!("{},{p}\n", names.name(item)))
        .collect()
}

pub fn write_taxonomy(taxonomy: &Taxonomy, names: &NameMap) -> String {
    taxonomy
        .items()
        .filter_map(|c| {
            taxonomy
                .parent(c)
                .map(|p| format!("{},{}\n", names.name(c), names.name(p)))
        })
        .collect()
}

/// Parses `i1 i2 ... #UTIL: u` lines against known item names.
pub fn parse_itemsets(
    text: &str,
    names: &NameMap,
    taxonomy: &Taxonomy,
) -> Result<Vec<(Itemset, u64)>, IoError> {
    let mut out = Vec::new();
    for (line, raw) in data_lines(text) {
        let (items, util) = raw
            .split_once("#UTIL:")
            .ok_or_else(|| parse_err(line, "expected 'items #UTIL: utility'"))?;
        let util: u64 = util
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("invalid utility '{}'", util.trim())))?;
        let members = items
            .split_whitespace()
            .map(|n| {
                names
                    .get(n)
                    .ok_or_else(|| parse_err(line, format!("unknown item '{n}'")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let itemset =
            Itemset::new(members, taxonomy).map_err(|source| IoError::Invalid { line, source })?;
        out.push((itemset, util));
    }
    Ok(out)
}

/// Parses an itemset list where the `#UTIL:` suffix is optional.
pub fn parse_itemset_list(
    text: &str,
    names: &NameMap,
    taxonomy: &Taxonomy,
) -> Result<Vec<Itemset>, IoError> {
    let mut out = Vec::new();
    for (line, raw) in data_lines(text) {
        let items = raw.split_once("#UTIL:").map_or(raw, |(items, _)| items);
        let members = items
            .split_whitespace()
            .map(|n| {
                names
                    .get(n)
                    .ok_or_else(|| parse_err(line, format!("unknown item '{n}'")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(
            Itemset::new(members, taxonomy).map_err(|source| IoError::Invalid { line, source })?,
        );
    }
    Ok(out)
}

/// Reads `tid item delete|reduce delta` lines as written by [`EditLog::render`].
pub fn parse_edit_log(text: &str, names: &NameMap) -> Result<EditLog, IoError> {
    let mut log = EditLog::default();
    for (line, raw) in data_lines(text) {
        let [tid, item, kind, delta] = raw.split_whitespace().collect::<Vec<_>>()[..] else {
            return Err(parse_err(line, "expected 'tid item kind delta'"));
        };
        let tid: u32 = tid
            .parse()
            .map_err(|_| parse_err(line, format!("invalid tid '{tid}'")))?;
        let item = names
            .get(item)
            .ok_or_else(|| parse_err(line, format!("unknown item '{item}'")))?;
        let kind = match kind {
            "delete" => EditKind::Delete,
            "reduce" => EditKind::Reduce,
            k => return Err(parse_err(line, format!("unknown edit kind '{k}'"))),
        };
        let delta = parse_positive(line, delta, "delta")?;
        log.edits.push(Edit {
            tid,
            item,
            kind,
            delta,
        });
        log.modified.insert(tid);
    }
    Ok(log)
}

pub fn write_itemsets<'a>(
    itemsets: impl IntoIterator<Item = (&'a Itemset, &'a u64)>,
    names: &NameMap,
) -> String {
    itemsets
        .into_iter()
        .map(|(s, u)| format!("{} #UTIL: {u}\n", names.render(s)))
        .collect()
}

/// The JSON report of one sanitization run.
///
/// Metric keys are flat and fixed; the `*_exact` fields carry the same
/// values as reduced fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub hf: f64,
    pub mc: f64,
    pub ac: f64,
    pub ius: f64,
    pub dus: f64,
    pub tmr: f64,
    pub runtime_ms: f64,
    pub hf_exact: String,
    pub mc_exact: String,
    pub ac_exact: String,
    pub ius_exact: String,
    pub dus_exact: String,
    pub tmr_exact: String,
    pub minutil: u64,
    pub strategy: String,
    pub sensitive_count: usize,
    pub sensitive_seed: Option<u64>,
    pub clhuis_before: usize,
    pub clhuis_after: usize,
    pub modified_transactions: usize,
    pub edits: usize,
    pub residual_utilities: BTreeMap<String, u64>,
}
