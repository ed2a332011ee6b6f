//! One PASS/FAIL line per criterion; exits nonzero if any gating criterion fails.

fn main() {
    let all = clhui_acceptance::criteria();
    let mut failed = 0;
    for c in &all {
        match (c.run)() {
            Ok(detail) => println!("criterion {} PASS {}: {detail}", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {}: {detail}", c.id, c.name);
            }
        }
    }
    println!(
        "criterion 9 INFO desk-scale benchmark: {}",
        clhui_acceptance::benchmark()
    );
    println!(
        "{} of {} gating criteria passed",
        all.len() - failed,
        all.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
