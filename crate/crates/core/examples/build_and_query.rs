//! Builds a function over random strings and checks it.
//!
//! cargo run --release --example build_and_query -- [n] [lambda] [encoder]

use std::time::Instant;

use pbhash::{gen_keys, verify_bijection, BuildConfig, Mphf, SeedEncoding};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(100_000, |s| s.parse().expect("n"));
    let lambda: f64 = args.get(2).map_or(8.0, |s| s.parse().expect("lambda"));
    let encoding: SeedEncoding = args.get(3).map_or(SeedEncoding::InterleavedRice, |s| s.parse().expect("encoder"));

    let keys = gen_keys(n, 42);
    let config = BuildConfig::new(lambda, 2500.0).with_encoding(encoding);

    let start = Instant::now();
    let build = Mphf::build_detailed(&keys, &config).expect("build");
    let secs = start.elapsed().as_secs_f64();
    let f = &build.mphf;

    println!("n = {n}, λ = {lambda}, {encoding}");
    println!("built in {secs:.2} s ({:.0} ns/key), {:.1} trials/key", secs * 1e9 / n as f64, build.trial_count() as f64 / n as f64);
    println!("{:.4} bits/key", f.bits_per_key());
    assert!(verify_bijection(f, &keys));
    println!("all {n} keys map to distinct values in [0, {n})");

    let key = keys.get(0);
    println!("{:?} -> {}", String::from_utf8_lossy(key), f.query(key));
}
