//! The eight-transaction worked example with its three-level taxonomy,
//! used throughout the test suites and by `clhui example`.

use crate::io::{self, DatasetBundle, Format, NameMap};
use crate::model::{ItemId, Itemset, QuantitativeDatabase, Taxonomy};

pub const EXAMPLE_TRANSACTIONS: &str = "\
a b d:1 1 1
a d e:2 3 1
a b c d e:1 2 5 1 3
d e:4 3
a b d:1 1 1
d e f:5 2 2
a c:2 1
a b e:1 4 3
";

pub const EXAMPLE_PROFITS: &str = "\
a,5
b,1
c,3
d,3
e,2
f,1
";

pub const EXAMPLE_TAXONOMY: &str = "\
a,Y
b,Y
Y,X
c,X
d,Z
e,Z
";

pub const EXAMPLE_SENSITIVE: &str = "\
X d #UTIL: 62
Z Y #UTIL: 70
e d #UTIL: 57
";

/// The itemsets printed as the complete result at minutil 50. The quantities
/// above also make {X, d, e} (utility 52) qualify; it is absent here.
pub const EXAMPLE_PRINTED_CLHUIS: &str = "\
X #UTIL: 66
X Z #UTIL: 85
X e #UTIL: 55
X d #UTIL: 62
Z #UTIL: 69
Z Y #UTIL: 70
Z a #UTIL: 62
e d #UTIL: 57
";

pub const EXAMPLE_MINUTIL: u64 = 50;

#[derive(Debug, Clone)]
pub struct Example {
    pub taxonomy: Taxonomy,
    pub db: QuantitativeDatabase,
    pub names: NameMap,
}

impl Example {
    pub fn id(&self, name: &str) -> ItemId {
        self.names
            .get(name)
            .unwrap_or_else(|| panic!("no item named {name}"))
    }

    pub fn itemset(&self, names: &[&str]) -> Itemset {
        Itemset::new(names.iter().map(|n| self.id(n)).collect(), &self.taxonomy)
            .expect("valid example itemset")
    }

    /// The printed itemset list with its utilities.
    pub fn printed_clhuis(&self) -> Vec<(Itemset, u64)> {
        io::parse_itemsets(EXAMPLE_PRINTED_CLHUIS, &self.names, &self.taxonomy)
            .expect("valid itemsets")
    }

    /// Printed itemsets minus the sensitive ones.
    pub fn printed_non_sensitive(&self) -> Vec<Itemset> {
        let sens = self.sensitive();
        self.printed_clhuis()
            .into_iter()
            .map(|(s, _)| s)
            .filter(|s| !sens.contains(s))
            .collect()
    }

    pub fn sensitive(&self) -> Vec<Itemset> {
        vec![
            self.itemset(&["X", "d"]),
            self.itemset(&["Z", "Y"]),
            self.itemset(&["e", "d"]),
        ]
    }
}

impl From<DatasetBundle> for Example {
    fn from(b: DatasetBundle) -> Self {
        Self {
            taxonomy: b.taxonomy,
            db: b.database,
            names: b.names,
        }
    }
}

pub fn worked_example() -> Example {
    io::load_bundle(
        EXAMPLE_TRANSACTIONS,
        Some(EXAMPLE_TAXONOMY),
        Some(EXAMPLE_PROFITS),
        Format::Quantity,
    )
    .expect("example data parses")
    .into()
}
