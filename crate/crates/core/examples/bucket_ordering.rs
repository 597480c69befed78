//! Buckets are searched largest first. Among buckets of equal size, taking the
//! one with the smaller expected size (larger index) first gives smaller seeds.
//!
//! cargo run --release --example bucket_ordering -- [n] [lambda]

use pbhash::{gen_keys, BucketOrder, BuildConfig, Mphf};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(200_000, |s| s.parse().expect("n"));
    let lambda: f64 = args.get(2).map_or(6.0, |s| s.parse().expect("lambda"));
    let keys = gen_keys(n, 3);

    for order in [BucketOrder::IncreasingExpectedSize, BucketOrder::DecreasingExpectedSize] {
        let config = BuildConfig::new(lambda, 2500.0).with_order(order);
        let build = Mphf::build_detailed(&keys, &config).expect("build");
        println!(
            "{order:?}: {:.4} bits/key, {:.1} trials/key",
            build.mphf.bits_per_key(),
            build.trial_count() as f64 / n as f64
        );
    }
}
