//! One build, stored under every seed encoding: interleaved Rice, interleaved
//! Compact, a single mono encoder, and the mixed split with the first `t`
//! encoders Compact.
//!
//! cargo run --release --example encoder_sweep -- [n] [lambda]

use pbhash::{gen_keys, BuildConfig, Mphf, SeedEncoding};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(200_000, |s| s.parse().expect("n"));
    let lambda: f64 = args.get(2).map_or(6.0, |s| s.parse().expect("lambda"));

    let keys = gen_keys(n, 7);
    let f = Mphf::build(&keys, &BuildConfig::new(lambda, 2500.0)).expect("build");
    let b = f.buckets();

    println!("n = {n}, λ = {lambda}, B = {b}");
    for enc in [SeedEncoding::InterleavedRice, SeedEncoding::InterleavedCompact, SeedEncoding::MonoRice, SeedEncoding::MonoCompact] {
        println!("{:>10}  {:.4} bits/key", enc.to_string(), f.with_encoding(enc).bits_per_key());
    }
    println!("mixed sweep:");
    for step in 0..=8 {
        let t = b * step / 8;
        let g = f.with_encoding(SeedEncoding::Mixed(t));
        println!("  t = {t:>4}  {:.4} bits/key", g.bits_per_key());
    }
}
