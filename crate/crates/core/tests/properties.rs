use clhui::gidic::transaction_counts_by_rescan;
use clhui::io::{self, Format};
use clhui::metrics::artificial_cost;
use clhui::model::{gen_item_utility, itemset_utility};
use clhui::oracle::*;
use clhui::sanitizer::{sanitize_with, SanitizeOptions};
use clhui::synth::{hiding_case, HidingCase};
use clhui::synth::{small_instance, SmallParams};
use clhui::{build_gidic, mine_clhuis, Itemset, Strategy};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn generalized_utility_is_sum_over_children(seed in any::<u64>()) {
        let ex = small_instance(seed, SmallParams::default());
        for t in ex.db.transactions() {
            for g in ex.taxonomy.items() {
                let u = gen_item_utility(&ex.taxonomy, &ex.db, g, t);
                prop_assert_eq!(u, naive_item_utility(&ex.taxonomy, &ex.db, g, t));
                if ex.taxonomy.is_generalized(g) {
                    let parts: u64 = ex.taxonomy.children(g).iter()
                        .map(|&c| gen_item_utility(&ex.taxonomy, &ex.db, c, t))
                        .sum();
                    prop_assert_eq!(u, parts);
                }
            }
        }
    }

    #[test]
    fn miner_matches_enumeration(seed in any::<u64>(), frac in 0.0f64..0.6) {
        let ex = small_instance(seed, SmallParams::default());
        let minutil = (ex.db.total_utility() as f64 * frac) as u64;
        let mined = mine_clhuis(&ex.db, &ex.taxonomy, minutil);
        prop_assert_eq!(as_id_map(&mined.itemsets), naive_clhuis(&ex.taxonomy, &ex.db, minutil));
    }

    #[test]
    fn sanitizing_hides_without_side_effects(seed in any::<u64>()) {
        let Some(case) = hiding_case(seed) else { return Ok(()); };
        let HidingCase { ex, minutil, sensitive } = case;
        let before = mine_clhuis(&ex.db, &ex.taxonomy, minutil);
        for strategy in Strategy::ALL {
            let out = sanitize_with(&ex.db, &ex.taxonomy, minutil, &sensitive, &before, strategy,
                SanitizeOptions { verify_each_edit: true }).unwrap();
            // Tracked residuals agree with recomputation.
            for (s, r) in &out.residuals {
                prop_assert_eq!(*r, itemset_utility(&ex.taxonomy, &out.database, s));
                prop_assert!(*r < minutil);
            }
            let after = mine_clhuis(&out.database, &ex.taxonomy, minutil);
            for s in &sensitive {
                prop_assert!(!after.contains(s));
            }
            for (p, &u) in &before.itemsets {
                prop_assert!(itemset_utility(&ex.taxonomy, &out.database, p) <= u);
            }
            prop_assert!(after.itemsets.keys().all(|p| before.contains(p)));
            prop_assert_eq!(artificial_cost(&before.itemsets, &after.itemsets).numerator, 0);
            let mut replayed = ex.db.clone();
            out.log.replay(&mut replayed).unwrap();
            prop_assert_eq!(&replayed, &out.database);
            for t in out.database.transactions() {
                prop_assert!(t.entries().iter().all(|&(_, q)| q > 0));
            }
        }
    }

    #[test]
    fn dictionary_intersection_matches_rescan(seed in any::<u64>()) {
        let Some(HidingCase { ex, minutil, sensitive }) = hiding_case(seed) else { return Ok(()); };
        let mined = mine_clhuis(&ex.db, &ex.taxonomy, minutil);
        let ns: Vec<Itemset> = mined.itemsets.keys().filter(|s| !sensitive.contains(s)).cloned().collect();
        let dic = build_gidic(&ex.db, &ex.taxonomy, &sensitive, &ns).unwrap();
        prop_assert_eq!(dic.weights(), &transaction_counts_by_rescan(&ex.db, &ex.taxonomy, &sensitive, &ns));
        for (k, s) in sensitive.iter().enumerate() {
            let direct: Vec<u32> = ex.db.transactions().iter()
                .filter(|t| clhui::model::itemset_contains(&ex.taxonomy, t, s))
                .map(|t| t.tid())
                .collect();
            prop_assert_eq!(dic.sensitive_tids(k), &direct[..]);
        }
    }

    #[test]
    fn write_then_parse_is_identity(seed in any::<u64>()) {
        let ex = small_instance(seed, SmallParams::default());
        let tx = io::write_transactions(&ex.db, &ex.names, Format::Quantity);
        let tax = io::write_taxonomy(&ex.taxonomy, &ex.names);
        let profits = io::write_profits(ex.db.profits(), &ex.names);
        let b = io::load_bundle(&tx, Some(&tax), Some(&profits), Format::Quantity).unwrap();
        // Names may be interned in a different order; compare by name.
        prop_assert_eq!(b.database.len(), ex.db.len());
        prop_assert_eq!(b.database.total_utility(), ex.db.total_utility());
        let again = io::write_transactions(&b.database, &b.names, Format::Quantity);
        let again_tax = io::write_taxonomy(&b.taxonomy, &b.names);
        let reparsed = io::load_bundle(&again, Some(&again_tax), Some(&io::write_profits(b.database.profits(), &b.names)), Format::Quantity).unwrap();
        prop_assert_eq!(&reparsed.database, &b.database);
        prop_assert_eq!(&reparsed.taxonomy, &b.taxonomy);
        // Mining through either id space gives the same named itemsets.
        let render = |bundle_names: &clhui::NameMap, m: &clhui::MiningResult| {
            let mut v: Vec<(Vec<String>, u64)> = m.itemsets.iter().map(|(s, &u)| {
                let mut names: Vec<String> = s.members().iter().map(|&i| bundle_names.name(i).to_owned()).collect();
                names.sort();
                (names, u)
            }).collect();
            v.sort();
            v
        };
        let minutil = ex.db.total_utility() / 5;
        prop_assert_eq!(
            render(&ex.names, &mine_clhuis(&ex.db, &ex.taxonomy, minutil)),
            render(&b.names, &mine_clhuis(&b.database, &b.taxonomy, minutil))
        );
        let util = io::write_transactions(&ex.db, &ex.names, Format::Utility);
        let u = io::load_bundle(&util, Some(&tax), None, Format::Utility).unwrap();
        prop_assert_eq!(u.database.total_utility(), ex.db.total_utility());
    }
}
