//! The bucket assignment functions side by side: `γ(x)` on a few points and
//! the expected bucket sizes they induce in one partition.
//!
//! cargo run --example assignment_functions -- [lambda] [partition size]

use pbhash::analysis::expected_bucket_sizes;
use pbhash::assignment::{bucket_count, default_epsilon};
use pbhash::{AssignmentSpec, AssignmentTable};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let lambda: f64 = args.get(1).map_or(8.0, |s| s.parse().expect("lambda"));
    let p: f64 = args.get(2).map_or(2500.0, |s| s.parse().expect("partition size"));
    let eps = default_epsilon(lambda, p);
    let buckets = bucket_count(p, lambda);
    println!("λ = {lambda}, P = {p}, B = {buckets}, ε = {eps:.4}\n");

    let specs = [
        ("uniform", AssignmentSpec::uniform()),
        ("skew", AssignmentSpec::skew()),
        ("beta-star", AssignmentSpec::beta_star()),
        ("beta-eps", AssignmentSpec::beta_eps(eps)),
    ];
    let xs = [0.1, 0.25, 0.5, 0.75, 0.9, 0.99];
    print!("{:<10}", "γ(x)");
    for x in xs {
        print!("{x:>8}");
    }
    println!("{:>12}{:>10}{:>10}", "largest λ_i", "λ_B/2", "λ_B");
    for (name, spec) in specs {
        let table = AssignmentTable::tabulate(spec).expect("table");
        print!("{name:<10}");
        for x in xs {
            print!("{:>8.4}", table.eval(x).unwrap());
        }
        match expected_bucket_sizes(&table, p, buckets) {
            Ok(sizes) => println!("{:>12.2}{:>10.2}{:>10.4}", sizes[0], sizes[buckets / 2], sizes[buckets - 1]),
            // skew has flat pieces and no unique inverse
            Err(e) => println!("{:>32}", format!("({e})")),
        }
    }
    println!("\nβ_ε caps the largest expected size near λ/ε = {:.1}", lambda / eps);
}
