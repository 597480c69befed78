//! The analytic side: placement cost bounds, the restart chain and its
//! simulation, the exchange inequality behind largest-first ordering, and
//! Elias-δ sizes of real seeds against the `log₂ e` floor.
//!
//! cargo run --release --example cost_model

use pbhash::analysis::{
    chain_simulate, chain_work, cost_bounds, coupon_work, elias_delta_bits, exchange_check, ChainSpec, CostQuery,
};
use pbhash::{gen_keys, BuildConfig, Mphf};

fn main() {
    println!("expected seeds to place a bucket of size s into n = 2500 slots at load α");
    for (s, alpha) in [(1, 0.5), (8, 0.0), (8, 0.5), (20, 0.2), (3, 0.95)] {
        let (lo, hi) = cost_bounds(CostQuery { s, alpha, n: 2500 }).unwrap();
        println!("  s = {s:>2}, α = {alpha:.2}: [{lo:.1}, {hi:.1}]");
    }
    println!("singletons placed last by seed search: {:.0} evaluations for 300 of them\n", coupon_work(300, 2500));

    let spec = ChainSpec::new(vec![0.9, 0.8, 0.6, 0.5]).unwrap();
    let est = chain_simulate(&spec, 200_000, 1);
    println!(
        "chain {:?}: formula {:.3}, simulated {:.3} ± {:.3}",
        spec.probs(),
        chain_work(&spec),
        est.mean,
        est.std_error
    );
    let decreasing = [0.95, 0.9, 0.7, 0.6, 0.3];
    println!("exchange inequality on {decreasing:?} at i = 1: {}\n", exchange_check(&decreasing, 1).unwrap());

    let keys = gen_keys(200_000, 8);
    for lambda in [3.0, 5.0, 7.0] {
        let b = Mphf::build_detailed(&keys, &BuildConfig::new(lambda, 2500.0)).unwrap();
        let seeds: Vec<u64> = b.partitions.iter().flat_map(|p| p.seeds.iter().copied()).collect();
        println!(
            "λ = {lambda}: Elias-δ {:.3} bits/key, stored {:.3} bits/key (floor {:.3})",
            elias_delta_bits(&seeds) as f64 / keys.len() as f64,
            b.mphf.bits_per_key(),
            std::f64::consts::LOG2_E
        );
    }
}
