//! Acceptance criteria for clhui. Each gating criterion returns a verdict
//! with a one-line detail; the desk-scale benchmark only reports.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use clap::Parser;
use clhui::cli::{
    self, experiment_csv, run_experiment, select_random, Cli, ExperimentConfig, SensitiveSweep,
};
use clhui::fixtures::{worked_example, EXAMPLE_MINUTIL};
use clhui::gidic::transaction_counts_by_rescan;
use clhui::metrics::{evaluate, MetricsError};
use clhui::model::{itemset_utility, ModelError};
use clhui::oracle::{as_id_map, naive_clhuis};
use clhui::sanitizer::{sanitize, EditKind, EditLog};
use clhui::synth::hiding_case;
use clhui::synth::{retail_instance, RetailParams};
use clhui::{
    build_gidic, mine_clhuis, ItemId, Itemset, QuantitativeDatabase, Strategy, Taxonomy,
    Transaction, UtilityTable,
};
use num_rational::Ratio;

pub type Verdict = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1_golden_mining() -> Verdict {
    let ex = worked_example();
    let start = Instant::now();
    let mined = mine_clhuis(&ex.db, &ex.taxonomy, EXAMPLE_MINUTIL);
    let elapsed = start.elapsed();
    let expected: BTreeMap<Itemset, u64> = ex.printed_clhuis().into_iter().collect();
    let missing: Vec<String> = expected
        .iter()
        .filter(|(s, u)| mined.utility(s) != Some(**u))
        .map(|(s, u)| format!("{{{}}}={u}", ex.names.render(s)))
        .collect();
    let extra: Vec<String> = mined
        .itemsets
        .iter()
        .filter(|(s, _)| !expected.contains_key(*s))
        .map(|(s, u)| format!("{{{}}}={u}", ex.names.render(s)))
        .collect();
    check(
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    )?;
    check(
        missing.is_empty() && extra.is_empty(),
        format!(
            "{} itemsets; missing [{}], extra [{}]",
            mined.len(),
            missing.join(" "),
            extra.join(" ")
        ),
    )?;
    Ok(format!("8 itemsets in {elapsed:?}"))
}

fn c2_golden_dictionary() -> Verdict {
    let ex = worked_example();
    let dic = build_gidic(
        &ex.db,
        &ex.taxonomy,
        &ex.sensitive(),
        &ex.printed_non_sensitive(),
    )
    .map_err(|e| e.to_string())?;
    let items = [
        ("a", 2, 4, 30),
        ("b", 2, 3, 8),
        ("c", 1, 3, 15),
        ("d", 3, 3, 45),
        ("e", 2, 4, 24),
        ("f", 0, 0, 2),
        ("X", 2, 4, 53),
        ("Y", 2, 4, 38),
        ("Z", 3, 4, 69),
    ];
    for (name, sc, nsc, rgisu) in items {
        let e = dic.entry(ex.id(name));
        check(
            (e.sc, e.nsc, e.rgisu) == (sc, nsc, rgisu),
            format!("item {name}: got {} {} {}", e.sc, e.nsc, e.rgisu),
        )?;
    }
    let txs = [
        (1, 2, 4, (2, 5)),
        (2, 3, 5, (1, 2)),
        (3, 3, 5, (1, 2)),
        (4, 1, 1, (1, 2)),
        (5, 2, 4, (2, 5)),
        (6, 1, 1, (1, 2)),
        (8, 1, 5, (1, 6)),
    ];
    check(
        dic.weights().len() == txs.len(),
        "sensitive transaction count",
    )?;
    for (tid, sc, nsc, (n, d)) in txs {
        let w = dic.weight(tid).ok_or(format!("T{tid} missing"))?;
        check(
            (w.sc, w.nsc) == (sc, nsc) && w.wt() == Ratio::new(n, d),
            format!("T{tid}: got {} {} {}", w.sc, w.nsc, w.wt()),
        )?;
    }
    check(
        dic.st_order() == [2, 3, 4, 6, 1, 5, 8],
        format!("st_order {:?}", dic.st_order()),
    )?;
    let dump = dic.dump(&ex.names);
    check(
        dump.contains("Y\t2\t4\t38\t") && dump.contains("T8\t1\t5\t0.17"),
        "dump rows",
    )?;
    Ok("9 item rows, 7 transaction rows, st_order [2,3,4,6,1,5,8]".into())
}

struct HidingRun {
    label: String,
    db: QuantitativeDatabase,
    taxonomy: Taxonomy,
    minutil: u64,
    sensitive: Vec<Itemset>,
}

fn hiding_suite() -> Vec<HidingRun> {
    let ex = worked_example();
    let mut runs = vec![HidingRun {
        label: "example".into(),
        db: ex.db.clone(),
        taxonomy: ex.taxonomy.clone(),
        minutil: EXAMPLE_MINUTIL,
        sensitive: ex.sensitive(),
    }];
    let mut seed = 0;
    while runs.len() < 101 {
        if let Some(c) = hiding_case(seed) {
            runs.push(HidingRun {
                label: format!("seed {seed}"),
                db: c.ex.db,
                taxonomy: c.ex.taxonomy,
                minutil: c.minutil,
                sensitive: c.sensitive,
            });
        }
        seed += 1;
    }
    runs
}

/// Runs every strategy over the suite; `inspect` sees before/after mining.
fn over_suite(
    mut inspect: impl FnMut(
        &HidingRun,
        Strategy,
        &clhui::MiningResult,
        &clhui::MiningResult,
        &QuantitativeDatabase,
        &EditLog,
    ) -> Result<(), String>,
) -> Result<(usize, Duration), String> {
    let start = Instant::now();
    let mut n = 0;
    for run in hiding_suite() {
        let before = mine_clhuis(&run.db, &run.taxonomy, run.minutil);
        for strategy in Strategy::ALL {
            let out = sanitize(
                &run.db,
                &run.taxonomy,
                run.minutil,
                &run.sensitive,
                &before,
                strategy,
            )
            .map_err(|e| format!("{} {strategy}: {e}", run.label))?;
            let after = mine_clhuis(&out.database, &run.taxonomy, run.minutil);
            inspect(&run, strategy, &before, &after, &out.database, &out.log)?;
            n += 1;
        }
    }
    Ok((n, start.elapsed()))
}

fn c3_hiding() -> Verdict {
    let (n, elapsed) = over_suite(|run, strategy, before, after, db_after, log| {
        let r = evaluate(
            &run.sensitive,
            &before.itemsets,
            &after.itemsets,
            &run.db,
            db_after,
            log,
        )
        .map_err(|e| e.to_string())?;
        check(
            r.hf.numerator == 0,
            format!("{} {strategy}: HF = {}", run.label, r.hf),
        )
    })?;
    check(
        elapsed < Duration::from_secs(30),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("HF = 0 on {n} runs in {elapsed:?}"))
}

fn c4_no_artificial_itemsets() -> Verdict {
    let (n, _) = over_suite(|run, strategy, before, after, db_after, log| {
        let r = evaluate(
            &run.sensitive,
            &before.itemsets,
            &after.itemsets,
            &run.db,
            db_after,
            log,
        )
        .map_err(|e| e.to_string())?;
        check(
            r.ac.numerator == 0,
            format!("{} {strategy}: AC = {}", run.label, r.ac),
        )?;
        check(
            after.itemsets.keys().all(|p| before.contains(p)),
            format!("{} {strategy}: new itemset", run.label),
        )?;
        for (p, &u) in &before.itemsets {
            let now = itemset_utility(&run.taxonomy, db_after, p);
            check(
                now <= u,
                format!(
                    "{} {strategy}: utility of {p:?} rose {u} -> {now}",
                    run.label
                ),
            )?;
        }
        Ok(())
    })?;
    Ok(format!("AC = 0 and utilities non-increasing on {n} runs"))
}

fn c5_oracle() -> Verdict {
    let start = Instant::now();
    for seed in 0..100u64 {
        let ex = clhui::synth::small_instance(1000 + seed, Default::default());
        let minutil = ex.db.total_utility() * (seed % 5) / 10;
        let mined = mine_clhuis(&ex.db, &ex.taxonomy, minutil);
        let oracle = naive_clhuis(&ex.taxonomy, &ex.db, minutil);
        check(
            as_id_map(&mined.itemsets) == oracle,
            format!(
                "seed {seed} minutil {minutil}: miner {} vs oracle {}",
                mined.len(),
                oracle.len()
            ),
        )?;
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(60),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("100 instances agree in {elapsed:?}"))
}

fn c6_metrics() -> Verdict {
    let flat = Taxonomy::flat(6);
    let set = |ids: &[u32]| Itemset::new(ids.iter().map(|&i| ItemId(i)).collect(), &flat).unwrap();
    let mut profits = UtilityTable::new();
    for i in 0..6 {
        profits.set(ItemId(i), 1);
    }
    let tx = |tid, e: &[(u32, u32)]| {
        Transaction::new(tid, e.iter().map(|&(i, q)| (ItemId(i), q)).collect()).unwrap()
    };
    // D: 4 transactions, utility 10 + 6 + 3 + 1 = 20. D': T1 loses 4, T3 loses 2.
    let db = QuantitativeDatabase::new(
        vec![
            tx(1, &[(0, 4), (1, 6)]),
            tx(2, &[(2, 6)]),
            tx(3, &[(3, 3)]),
            tx(4, &[(4, 1)]),
        ],
        profits.clone(),
    )
    .unwrap();
    let db_after = QuantitativeDatabase::new(
        vec![
            tx(1, &[(1, 6)]),
            tx(2, &[(2, 6)]),
            tx(3, &[(3, 1)]),
            tx(4, &[(4, 1)]),
        ],
        profits,
    )
    .unwrap();
    let mut log = EditLog::default();
    log.modified.extend([1, 3]);
    // Before: {0}:40 {1}:30 {2}:20 {0,1}:10 (sensitive {0}, {0,1}); after: {1}:25 {5}:5.
    let before: BTreeMap<Itemset, u64> = [
        (set(&[0]), 40),
        (set(&[1]), 30),
        (set(&[2]), 20),
        (set(&[0, 1]), 10),
    ]
    .into();
    let after: BTreeMap<Itemset, u64> = [(set(&[1]), 25), (set(&[5]), 5)].into();
    let sensitive = vec![set(&[0]), set(&[0, 1])];
    let r =
        evaluate(&sensitive, &before, &after, &db, &db_after, &log).map_err(|e| e.to_string())?;
    let got = [
        r.hf.value(),
        r.mc.value(),
        r.ac.value(),
        r.ius.value(),
        r.dus.value(),
        r.tmr.value(),
    ];
    // DUS: D' utility 6 + 6 + 1 + 1 = 14 of 20.
    let want = [
        Ratio::new(0, 1),
        Ratio::new(1, 2),
        Ratio::new(1, 2),
        Ratio::new(30, 100),
        Ratio::new(14, 20),
        Ratio::new(2, 4),
    ];
    check(got == want, format!("got {got:?}"))?;

    // Sensitive {1} still present: HF 1/1.
    let r =
        evaluate(&[set(&[1])], &before, &after, &db, &db_after, &log).map_err(|e| e.to_string())?;
    check(r.hf.value() == Ratio::from_integer(1), "HF with survivor")?;
    // Empty denominators: no sensitive, no non-sensitive, nothing after.
    let only: BTreeMap<Itemset, u64> = [(set(&[0]), 7)].into();
    let r = evaluate(&[set(&[0])], &only, &BTreeMap::new(), &db, &db_after, &log)
        .map_err(|e| e.to_string())?;
    check(
        r.mc.denominator == 0 && r.mc.value() == Ratio::from_integer(0),
        "MC over empty NSCLHUIs",
    )?;
    check(
        r.ac.denominator == 0 && r.ac.value() == Ratio::from_integer(0),
        "AC over empty CLHUIs'",
    )?;
    check(
        r.ius.value() == Ratio::from_integer(0),
        "IUS with nothing left",
    )?;
    let r =
        evaluate(&[], &only, &only, &db, &db, &EditLog::default()).map_err(|e| e.to_string())?;
    check(
        r.hf.denominator == 0 && r.hf.value() == Ratio::from_integer(0),
        "HF over empty SCLHUIs",
    )?;
    let e = evaluate(
        &[],
        &BTreeMap::new(),
        &BTreeMap::new(),
        &db,
        &db,
        &EditLog::default(),
    );
    check(
        e == Err(MetricsError::Undefined("IUS")),
        "IUS undefined without CLHUIs",
    )?;
    let empty = QuantitativeDatabase::new(vec![], UtilityTable::new()).unwrap();
    let e = evaluate(&[], &only, &only, &empty, &empty, &EditLog::default());
    check(
        e == Err(MetricsError::Undefined("DUS")),
        "DUS undefined on empty database",
    )?;
    Ok("six metrics and zero-denominator conventions exact".into())
}

fn c7_reduction() -> Verdict {
    // x (p=3), y (p=1); T1 = x:4 y:5 gives u({x,y}) = 17. Max-RF picks x
    // (RGISU 12) as victim, so diff stays below u(x,T1).
    let flat = Taxonomy::flat(2);
    let (x, y) = (ItemId(0), ItemId(1));
    let mut profits = UtilityTable::new();
    profits.set(x, 3);
    profits.set(y, 1);
    let db = QuantitativeDatabase::new(
        vec![
            Transaction::new(1, vec![(x, 4), (y, 5)]).unwrap(),
            Transaction::new(2, vec![(x, 1)]).unwrap(),
        ],
        profits,
    )
    .map_err(|e: ModelError| e.to_string())?;
    let target = Itemset::new(vec![x, y], &flat).unwrap();
    // minutil 15: diff 3, diu 1. minutil 14: diff 4, diu ceil(4/3) = 2.
    for (minutil, diu, left) in [(15u64, 1u32, 3u32), (14, 2, 2)] {
        let before = mine_clhuis(&db, &flat, minutil);
        let out = sanitize(
            &db,
            &flat,
            minutil,
            std::slice::from_ref(&target),
            &before,
            Strategy::MaxRF,
        )
        .map_err(|e| e.to_string())?;
        check(
            out.log.edits.len() == 1,
            format!("minutil {minutil}: {} edits", out.log.edits.len()),
        )?;
        let e = out.log.edits[0];
        check(
            e.kind == EditKind::Reduce && e.item == x && e.delta == diu,
            format!("minutil {minutil}: edit {e:?}"),
        )?;
        check(
            out.database.get(1).unwrap().quantity(x) == Some(left),
            "remaining quantity",
        )?;
        let residual = itemset_utility(&flat, &out.database, &target);
        check(
            residual < minutil,
            format!("residual {residual} >= {minutil}"),
        )?;
    }
    // On the worked example at minutil 56 {e,d} loses one unit of e in T4.
    let ex = worked_example();
    let ed = ex.itemset(&["e", "d"]);
    let before = mine_clhuis(&ex.db, &ex.taxonomy, 56);
    let out = sanitize(
        &ex.db,
        &ex.taxonomy,
        56,
        std::slice::from_ref(&ed),
        &before,
        Strategy::MinRF,
    )
    .map_err(|e| e.to_string())?;
    let e = out.log.edits.first().ok_or("no edit")?;
    check(
        (e.tid, e.kind, e.delta) == (4, EditKind::Reduce, 1),
        format!("example edit {e:?}"),
    )?;
    check(
        itemset_utility(&ex.taxonomy, &out.database, &ed) == 55,
        "example residual",
    )?;
    Ok("diu = ceil(diff/p) with positive remainder in 3 cases".into())
}

fn strip_runtime(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = header.iter().position(|h| *h == "runtime_ms");
    std::iter::once(header.join(","))
        .chain(lines.map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| Some(*i) != col)
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        }))
        .collect::<Vec<_>>()
        .join("\n")
}

fn c8_determinism() -> Verdict {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let path = |f: &str| dir.join(f).to_string_lossy().into_owned();
    let invoke = |args: Vec<String>| -> Result<(), String> {
        let cli = Cli::try_parse_from(args).map_err(|e| e.to_string())?;
        cli::run(cli).map_err(|e| e.to_string())
    };
    invoke(vec![
        "clhui".into(),
        "example".into(),
        "--out".into(),
        path(""),
    ])?;
    let run = |out: &str| -> Result<String, String> {
        let mut args: Vec<String> = ["clhui", "experiment", "--transactions"]
            .map(String::from)
            .to_vec();
        args.push(path("transactions.txt"));
        args.extend([
            "--taxonomy".into(),
            path("taxonomy.txt"),
            "--profits".into(),
            path("profits.txt"),
        ]);
        args.extend(
            [
                "--format",
                "quantity",
                "--minutil",
                "45,50,60",
                "--sensitive-random",
                "1,2,3",
                "--seed",
                "1,2,3",
                "--strategy",
                "all",
                "--parallel",
                "--out",
            ]
            .map(String::from),
        );
        args.push(path(out));
        invoke(args)?;
        std::fs::read_to_string(dir.join(out).join("experiment.csv")).map_err(|e| e.to_string())
    };
    let (a, b) = (run("first")?, run("second")?);
    check(
        strip_runtime(&a) == strip_runtime(&b),
        "CSV differs between runs",
    )?;
    let rows = a.lines().count() - 1;
    check(rows == 3 * 3 * 3 * 3, format!("{rows} rows"))?;

    // Same check in-process on a random instance.
    let c = hiding_case(3).ok_or("no case")?;
    let bundle = clhui::DatasetBundle {
        database: c.ex.db,
        taxonomy: c.ex.taxonomy,
        names: c.ex.names,
    };
    let config = ExperimentConfig {
        dataset: "seed3".into(),
        minutils: vec![c.minutil],
        sensitive: SensitiveSweep::Random {
            counts: vec![1],
            seeds: vec![5, 6],
        },
        strategies: Strategy::ALL.to_vec(),
        parallel: true,
    };
    let x = experiment_csv(&run_experiment(&bundle, &config)).map_err(|e| e.to_string())?;
    let y = experiment_csv(&run_experiment(&bundle, &config)).map_err(|e| e.to_string())?;
    check(
        strip_runtime(&x) == strip_runtime(&y),
        "in-process CSV differs",
    )?;
    Ok(format!("{rows} CSV rows identical across two runs"))
}

pub fn benchmark() -> String {
    let ex = retail_instance(2024, &RetailParams::default());
    let minutil = 30_000;
    let start = Instant::now();
    let mined = mine_clhuis(&ex.db, &ex.taxonomy, minutil);
    let mine_time = start.elapsed();
    let k = 5.min(mined.len());
    let sensitive = match select_random(&mined, k, 7) {
        Ok(s) => s,
        Err(e) => return format!("no sensitive itemsets: {e}"),
    };
    let mut parts = vec![format!(
        "{} CLHUIs at minutil {minutil} mined in {mine_time:.2?}",
        mined.len()
    )];
    for strategy in Strategy::ALL {
        let start = Instant::now();
        let r = sanitize(&ex.db, &ex.taxonomy, minutil, &sensitive, &mined, strategy);
        let t = start.elapsed();
        let status = match r {
            Ok(out) => format!("{} edits", out.log.len()),
            Err(e) => format!("error {e}"),
        };
        parts.push(format!(
            "{strategy} {t:.2?} ({status}, {})",
            if t < Duration::from_secs(10) {
                "< 10 s"
            } else {
                ">= 10 s"
            }
        ));
    }
    let ns: Vec<Itemset> = mined
        .itemsets
        .keys()
        .filter(|s| !sensitive.contains(s))
        .cloned()
        .collect();
    let start = Instant::now();
    let dic = build_gidic(&ex.db, &ex.taxonomy, &sensitive, &ns).expect("disjoint");
    let with_dic = start.elapsed();
    let start = Instant::now();
    let rescan = transaction_counts_by_rescan(&ex.db, &ex.taxonomy, &sensitive, &ns);
    let rescan_time = start.elapsed();
    let agree = dic.weights() == &rescan;
    parts.push(format!(
        "GI-dic build {with_dic:.2?} vs rescan of transaction counts {rescan_time:.2?} (agree: {agree}, dictionary {})",
        if with_dic <= rescan_time { "not slower" } else { "slower" }
    ));
    parts.join("; ")
}

pub struct Criterion {
    pub id: &'static str,
    pub name: &'static str,
    pub run: fn() -> Verdict,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: "1",
            name: "golden mining",
            run: c1_golden_mining,
        },
        Criterion {
            id: "2",
            name: "golden GI-dic",
            run: c2_golden_dictionary,
        },
        Criterion {
            id: "3",
            name: "hiding property",
            run: c3_hiding,
        },
        Criterion {
            id: "4",
            name: "no artificial itemsets, monotone utilities",
            run: c4_no_artificial_itemsets,
        },
        Criterion {
            id: "5",
            name: "miner equals enumeration oracle",
            run: c5_oracle,
        },
        Criterion {
            id: "6",
            name: "metric arithmetic",
            run: c6_metrics,
        },
        Criterion {
            id: "7",
            name: "quantity reduction branch",
            run: c7_reduction,
        },
        Criterion {
            id: "8",
            name: "experiment determinism",
            run: c8_determinism,
        },
    ]
}
