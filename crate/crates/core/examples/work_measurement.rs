//! Search work of each assignment function at a few values of λ, written as
//! CSV to stdout.
//!
//! cargo run --release --example work_measurement -- [n] [lambda,...]

use pbhash::analysis::{measure_work, write_csv};
use pbhash::{gen_keys, AssignmentKind, BuildConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(50_000, |s| s.parse().expect("n"));
    let lambdas: Vec<f64> = args
        .get(2)
        .map_or("3,5,7", String::as_str)
        .split(',')
        .map(|s| s.parse().expect("lambda"))
        .collect();
    let keys = gen_keys(n, 4);

    let configs: Vec<BuildConfig> = lambdas
        .iter()
        .flat_map(|&l| {
            [AssignmentKind::Uniform, AssignmentKind::Skew, AssignmentKind::BetaEps]
                .map(|k| BuildConfig::new(l, 2500.0).with_assignment(k))
        })
        .collect();
    let reports = measure_work(&keys, &configs).expect("build");
    write_csv(&reports, std::io::stdout()).expect("write");

    for r in reports.iter().filter(|r| r.assignment == "beta-eps") {
        let e = r.partition_estimate();
        eprintln!("λ = {}: β_ε {:.1} ± {:.1} trials/key over partitions", r.lambda, e.mean, e.std_error);
    }
}
