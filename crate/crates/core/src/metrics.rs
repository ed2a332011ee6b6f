//! Side effects of a sanitization run, kept as exact fractions.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::model::{Itemset, QuantitativeDatabase};
use crate::sanitizer::EditLog;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("{0} is undefined: its denominator is zero")]
    Undefined(&'static str),
}

/// A ratio together with the counts that produce it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measure {
    pub numerator: u64,
    pub denominator: u64,
}

impl Measure {
    /// A zero denominator reads as 0.
    pub fn value(&self) -> Ratio<u64> {
        if self.denominator == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.numerator, self.denominator)
        }
    }

    pub fn as_f64(&self) -> f64 {
        let v = self.value();
        *v.numer() as f64 / *v.denom() as f64
    }

    fn defined(self, name: &'static str) -> Result<Self, MetricsError> {
        if self.denominator == 0 {
            Err(MetricsError::Undefined(name))
        } else {
            Ok(self)
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SanitizationReport {
    pub hf: Measure,
    pub mc: Measure,
    pub ac: Measure,
    pub ius: Measure,
    pub dus: Measure,
    pub tmr: Measure,
}

/// |SCLHUIs ∩ CLHUIs′| / |SCLHUIs|, 0 for no sensitive itemsets.
pub fn hiding_failure(sensitive: &[Itemset], after: &BTreeMap<Itemset, u64>) -> Measure {
    Measure {
        numerator: sensitive.iter().filter(|s| after.contains_key(*s)).count() as u64,
        denominator: sensitive.len() as u64,
    }
}

/// |NSCLHUIs − CLHUIs′| / |NSCLHUIs|, 0 for no non-sensitive itemsets.
pub fn missing_cost(non_sensitive: &[Itemset], after: &BTreeMap<Itemset, u64>) -> Measure {
    Measure {
        numerator: non_sensitive
            .iter()
            .filter(|s| !after.contains_key(*s))
            .count() as u64,
        denominator: non_sensitive.len() as u64,
    }
}

/// |CLHUIs′ − CLHUIs| / |CLHUIs′|, 0 when nothing is mined afterwards.
pub fn artificial_cost(before: &BTreeMap<Itemset, u64>, after: &BTreeMap<Itemset, u64>) -> Measure {
    Measure {
        numerator: after.keys().filter(|s| !before.contains_key(*s)).count() as u64,
        denominator: after.len() as u64,
    }
}

/// IUS, DUS and TMR. `before`/`after` carry utilities in the original and
/// sanitized databases respectively.
pub fn similarity_metrics(
    before: &BTreeMap<Itemset, u64>,
    after: &BTreeMap<Itemset, u64>,
    db_before: &QuantitativeDatabase,
    db_after: &QuantitativeDatabase,
    log: &EditLog,
) -> Result<(Measure, Measure, Measure), MetricsError> {
    let ius = Measure {
        numerator: after.values().sum(),
        denominator: before.values().sum(),
    }
    .defined("IUS")?;
    let dus = Measure {
        numerator: db_after.total_utility(),
        denominator: db_before.total_utility(),
    }
    .defined("DUS")?;
    let tmr = Measure {
        numerator: log.modified.len() as u64,
        denominator: db_before.len() as u64,
    }
    .defined("TMR")?;
    Ok((ius, dus, tmr))
}

/// All six side effects. Non-sensitive itemsets are `before` minus `sensitive`.
pub fn evaluate(
    sensitive: &[Itemset],
    before: &BTreeMap<Itemset, u64>,
    after: &BTreeMap<Itemset, u64>,
    db_before: &QuantitativeDatabase,
    db_after: &QuantitativeDatabase,
    log: &EditLog,
) -> Result<SanitizationReport, MetricsError> {
    let non_sensitive: Vec<Itemset> = before
        .keys()
        .filter(|s| !sensitive.contains(s))
        .cloned()
        .collect();
    let (ius, dus, tmr) = similarity_metrics(before, after, db_before, db_after, log)?;
    Ok(SanitizationReport {
        hf: hiding_failure(sensitive, after),
        mc: missing_cost(&non_sensitive, after),
        ac: artificial_cost(before, after),
        ius,
        dus,
        tmr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;
    use crate::model::{ItemId, Taxonomy};

    fn set(ids: &[u32]) -> Itemset {
        Itemset::new(ids.iter().map(|&i| ItemId(i)).collect(), &Taxonomy::flat(8)).unwrap()
    }

    fn map(sets: &[&[u32]]) -> BTreeMap<Itemset, u64> {
        sets.iter().map(|s| (set(s), 10)).collect()
    }

    #[test]
    fn hiding_failure_ratios() {
        let sens = vec![set(&[0]), set(&[1]), set(&[2, 3])];
        assert_eq!(
            hiding_failure(&sens, &map(&[&[5]])).value(),
            Ratio::from_integer(0)
        );
        assert_eq!(
            hiding_failure(&sens, &map(&[&[2, 3], &[5]])).value(),
            Ratio::new(1, 3)
        );
        let empty = hiding_failure(&[], &map(&[&[5]]));
        assert_eq!((empty.numerator, empty.denominator), (0, 0));
        assert_eq!(empty.value(), Ratio::from_integer(0));
    }

    #[test]
    fn missing_cost_ratios() {
        let ns = vec![set(&[0]), set(&[1]), set(&[2]), set(&[3]), set(&[4])];
        assert_eq!(
            missing_cost(&ns, &map(&[&[0], &[1], &[2], &[3], &[4]])).value(),
            Ratio::from_integer(0)
        );
        assert_eq!(
            missing_cost(&ns, &map(&[&[0], &[1], &[2]])).value(),
            Ratio::new(2, 5)
        );
        assert_eq!(missing_cost(&[], &map(&[])).value(), Ratio::from_integer(0));
    }

    #[test]
    fn artificial_cost_ratios() {
        let a = map(&[&[0]]);
        assert_eq!(artificial_cost(&a, &a).value(), Ratio::from_integer(0));
        assert_eq!(
            artificial_cost(&a, &map(&[&[0], &[1]])).value(),
            Ratio::new(1, 2)
        );
        assert_eq!(
            artificial_cost(&a, &map(&[])).value(),
            Ratio::from_integer(0)
        );
    }

    #[test]
    fn similarity_without_edits() {
        let ex = worked_example();
        let m = map(&[&[0], &[1]]);
        let (ius, dus, tmr) =
            similarity_metrics(&m, &m, &ex.db, &ex.db, &EditLog::default()).unwrap();
        assert_eq!(ius.value(), Ratio::from_integer(1));
        assert_eq!(dus.value(), Ratio::from_integer(1));
        assert_eq!(tmr.value(), Ratio::from_integer(0));
    }

    #[test]
    fn dus_after_one_deletion() {
        let ex = worked_example();
        let mut after = ex.db.clone();
        after.remove_item(1, ex.id("d")).unwrap();
        let m = map(&[&[0]]);
        let mut log = EditLog::default();
        log.modified.insert(1);
        let (_, dus, tmr) = similarity_metrics(&m, &m, &ex.db, &after, &log).unwrap();
        assert_eq!((dus.numerator, dus.denominator), (134, 137));
        assert_eq!(tmr.value(), Ratio::new(1, 8));
    }

    #[test]
    fn undefined_denominators() {
        let ex = worked_example();
        let empty = BTreeMap::new();
        let e = similarity_metrics(&empty, &empty, &ex.db, &ex.db, &EditLog::default());
        assert_eq!(e, Err(MetricsError::Undefined("IUS")));
        let db = crate::model::QuantitativeDatabase::new(vec![], Default::default()).unwrap();
        let m = map(&[&[0]]);
        let e = similarity_metrics(&m, &m, &db, &db, &EditLog::default());
        assert_eq!(e, Err(MetricsError::Undefined("DUS")));
    }
}
