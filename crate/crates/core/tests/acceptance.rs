//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::cell::OnceCell;
use std::time::Instant;

use pbhash::analysis::{chain_simulate, chain_work, elias_delta_bits, expected_bucket_sizes, exchange_check, ChainSpec};
use pbhash::assignment::{bucket_count, default_epsilon};
use pbhash::bits::BitVec;
use pbhash::builder::{build_partition, search_bucket, search_singleton_fast, BucketOrder, DEFAULT_SEED_CAP};
use pbhash::hashing::{normalized_hash, position_hash};
use pbhash::keys::KeySet;
use pbhash::mphf::Build;
use pbhash::{
    gen_keys, AssignmentKind, AssignmentSpec, AssignmentTable, BuildConfig, KeyCorpus, MasterHash, Mphf, SeedEncoding,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LOG2_E: f64 = std::f64::consts::LOG2_E;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Corpora and builds shared between criteria.
#[derive(Default)]
struct Shared {
    keys_5m: OnceCell<KeyCorpus>,
    build_5m_45: OnceCell<Mphf>,
    keys_2m: OnceCell<KeyCorpus>,
    build_2m_8: OnceCell<Build>,
}

impl Shared {
    fn keys_5m(&self) -> &KeyCorpus {
        self.keys_5m.get_or_init(|| gen_keys(5_000_000, 51))
    }

    fn build_5m_45(&self) -> &Mphf {
        self.build_5m_45
            .get_or_init(|| Mphf::build(self.keys_5m(), &BuildConfig::new(4.5, 2500.0)).expect("build"))
    }

    fn keys_2m(&self) -> &KeyCorpus {
        self.keys_2m.get_or_init(|| gen_keys(2_000_000, 21))
    }

    fn build_2m_8(&self) -> &Build {
        self.build_2m_8
            .get_or_init(|| Mphf::build_detailed(self.keys_2m(), &BuildConfig::new(8.0, 2500.0)).expect("build"))
    }
}

/// Query results over `keys` form a permutation of `[0, n)`.
fn is_permutation<K: KeySet + ?Sized>(f: &Mphf, keys: &K) -> bool {
    let n = keys.len();
    let mut hit = vec![false; n];
    for i in 0..n {
        let v = f.query(keys.key(i)) as usize;
        if v >= n || hit[v] {
            return false;
        }
        hit[v] = true;
    }
    hit.iter().all(|&h| h)
}

fn perfection(sh: &Shared) -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, seed) in [(1_000usize, 1u64), (100_000, 2), (1_000_000, 3)] {
        let keys = gen_keys(n, seed);
        let f = Mphf::build(&keys, &BuildConfig::default()).expect("build");
        let good = is_permutation(&f, &keys);
        ok &= good;
        parts.push(format!("n={n} λ=8 {}", if good { "ok" } else { "BROKEN" }));
    }
    let f = sh.build_5m_45();
    let good = is_permutation(f, sh.keys_5m());
    ok &= good;
    parts.push(format!("n=5000000 λ=4.5 {}", if good { "ok" } else { "BROKEN" }));
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 120.0, format!("{}; {secs:.1}s (limit 120s)", parts.join(", ")))
}

fn space(sh: &Shared) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut check = |label: &str, f: &Mphf, limit: f64| {
        let bpk = f.bits_per_key();
        let good = bpk <= limit && is_permutation(f, sh.keys_5m());
        ok &= good;
        parts.push(format!("{label} {bpk:.4} (≤ {limit})"));
    };
    check("IC-R λ=4.5", sh.build_5m_45(), 2.21);
    let f = Mphf::build(sh.keys_5m(), &BuildConfig::new(6.5, 2500.0)).expect("build");
    check("IC-R λ=6.5", &f, 1.95);
    drop(f);
    let cfg = BuildConfig::new(3.9, 2500.0).with_encoding(SeedEncoding::InterleavedCompact);
    let f = Mphf::build(sh.keys_5m(), &cfg).expect("build");
    check("IC-C λ=3.9", &f, 3.30);
    outcome(ok, parts.join(", "))
}

fn interleaved_gain(sh: &Shared) -> Outcome {
    let ic = &sh.build_2m_8().mphf;
    let mono = ic.with_encoding(SeedEncoding::MonoRice);
    let same = ic.raw_seeds() == mono.raw_seeds();
    let (a, b) = (ic.bits_per_key(), mono.bits_per_key());
    outcome(
        same && b - a >= 0.03,
        format!("n=2000000 λ=8: IC-R {a:.4}, mono-R {b:.4}, saving {:.4} (≥ 0.03)", b - a),
    )
}

fn ordering_gain(sh: &Shared) -> Outcome {
    let inc = sh.build_2m_8().mphf.bits_per_key();
    let cfg = BuildConfig::new(8.0, 2500.0).with_order(BucketOrder::DecreasingExpectedSize);
    let dec = Mphf::build(sh.keys_2m(), &cfg).expect("build").bits_per_key();
    outcome(
        dec - inc >= 0.01,
        format!("n=2000000 λ=8: increasing {inc:.4}, decreasing {dec:.4}, gain {:.4} (≥ 0.01)", dec - inc),
    )
}

/// Mean and standard error of per-partition trials/key.
fn trials_per_key(build: &Build) -> (f64, f64) {
    let xs: Vec<f64> = build
        .partitions
        .iter()
        .map(|p| p.trial_count as f64 / p.bucket_sizes.iter().map(|&s| s as f64).sum::<f64>())
        .collect();
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn assignment_ordering(_: &Shared) -> Outcome {
    let keys = gen_keys(125_000, 5);
    let est: Vec<(f64, f64)> = [AssignmentKind::BetaEps, AssignmentKind::Skew, AssignmentKind::Uniform]
        .into_iter()
        .map(|kind| {
            let cfg = BuildConfig::new(8.0, 2500.0).with_assignment(kind);
            trials_per_key(&Mphf::build_detailed(&keys, &cfg).expect("build"))
        })
        .collect();
    let z = |lo: (f64, f64), hi: (f64, f64)| (hi.0 - lo.0) / lo.1.hypot(hi.1);
    let (z1, z2) = (z(est[0], est[1]), z(est[1], est[2]));
    outcome(
        z1 > 3.0 && z2 > 3.0,
        format!(
            "50 partitions: β_ε {:.0}±{:.0}, skew {:.0}±{:.0}, uniform {:.0}±{:.0}; gaps {z1:.1}σ and {z2:.1}σ (> 3σ)",
            est[0].0, est[0].1, est[1].0, est[1].1, est[2].0, est[2].1
        ),
    )
}

fn chain_oracle(_: &Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut misses = 0;
    for t in 0..100 {
        let k = rng.random_range(1..=6);
        let probs: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..0.99)).collect();
        let spec = ChainSpec::new(probs).unwrap();
        let est = chain_simulate(&spec, 20_000, 1000 + t);
        let z = (est.mean - chain_work(&spec)).abs() / est.std_error;
        worst = worst.max(z);
        misses += (z > 3.0) as u32;
    }
    let mut exchange_ok = 0;
    for _ in 0..1000 {
        let k = rng.random_range(3..=12);
        let mut probs: Vec<f64> = Vec::with_capacity(k);
        while probs.len() < k {
            let p = rng.random_range(0.01..0.99);
            if !probs.contains(&p) {
                probs.push(p);
            }
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        let i = rng.random_range(1..=(k - 1) / 2);
        exchange_ok += exchange_check(&probs, i).unwrap() as u32;
    }
    outcome(
        misses == 0 && exchange_ok == 1000,
        format!("{misses}/100 specs beyond 3 SE (worst {worst:.2}); exchange inequality holds on {exchange_ok}/1000"),
    )
}

fn size_cap(_: &Shared) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for lambda in [4.0, 8.0, 16.0] {
        let eps = default_epsilon(lambda, 2500.0);
        let table = AssignmentTable::tabulate(AssignmentSpec::beta_eps(eps)).unwrap();
        let sizes = expected_bucket_sizes(&table, 2500.0, bucket_count(2500.0, lambda)).unwrap();
        let max = sizes.iter().cloned().fold(0.0, f64::max);
        let cap = lambda / eps + lambda;
        let monotone = sizes.windows(2).all(|w| w[1] <= w[0]);
        ok &= max <= cap && monotone;
        parts.push(format!("λ={lambda}: max {max:.1} (cap {cap:.1}){}", if monotone { "" } else { " NOT monotone" }));
    }
    outcome(ok, parts.join(", "))
}

fn elias_trend(sh: &Shared) -> Outcome {
    let per_key = |b: &Build| {
        let seeds: Vec<u64> = b.partitions.iter().flat_map(|p| p.seeds.iter().copied()).collect();
        elias_delta_bits(&seeds) as f64 / b.mphf.n() as f64
    };
    let hi = per_key(sh.build_2m_8());
    let lo = per_key(&Mphf::build_detailed(sh.keys_2m(), &BuildConfig::new(4.0, 2500.0)).expect("build"));
    outcome(
        hi < lo && hi > LOG2_E && lo > LOG2_E,
        format!("λ=4 {lo:.4}, λ=8 {hi:.4} bits/key (floor {LOG2_E:.3})"),
    )
}

/// Smallest `p` whose positions for `keys` are distinct and free.
fn brute_force_seed(keys: &[MasterHash], m: u64, occupied: &[bool]) -> u64 {
    (0u64..)
        .find(|&p| {
            let mut seen = occupied.to_vec();
            keys.iter().all(|&h| {
                let pos = ((position_hash(h, p / m, m) + p % m) % m) as usize;
                !std::mem::replace(&mut seen[pos], true)
            })
        })
        .unwrap()
}

fn random_hashes(rng: &mut ChaCha8Rng, m: usize) -> Vec<MasterHash> {
    let mut v: Vec<MasterHash> = Vec::with_capacity(m);
    while v.len() < m {
        let h = MasterHash { hi: rng.random(), lo: rng.random() };
        if v.iter().all(|o| o.lo != h.lo) {
            v.push(h);
        }
    }
    v
}

fn seed_minimality(_: &Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    let mut checked = 0;
    for _ in 0..100 {
        let m = rng.random_range(1..=64usize);
        let lambda = rng.random_range(1.0..3.0);
        let keys = random_hashes(&mut rng, m);
        let cfg = BuildConfig::new(lambda, m as f64);
        let table = cfg.table().unwrap();
        let buckets = bucket_count(m as f64, lambda);
        let built = build_partition(&keys, &cfg, &table).expect("partition");

        let mut groups: Vec<Vec<MasterHash>> = vec![Vec::new(); buckets];
        for &h in &keys {
            groups[table.bucket_for_hash(normalized_hash(h), buckets) - 1].push(h);
        }
        let mut order: Vec<usize> = (0..buckets).filter(|&i| !groups[i].is_empty()).collect();
        order.sort_by(|&a, &b| groups[b].len().cmp(&groups[a].len()).then(b.cmp(&a)));
        let mut occupied = vec![false; m];
        for (g, &seed) in groups.iter().zip(&built.seeds) {
            if g.is_empty() {
                mismatches += (seed != 0) as u32;
            }
        }
        for i in order {
            let p = brute_force_seed(&groups[i], m as u64, &occupied);
            checked += 1;
            mismatches += (p != built.seeds[i]) as u32;
            for &h in &groups[i] {
                occupied[((position_hash(h, p / m as u64, m as u64) + p % m as u64) % m as u64) as usize] = true;
            }
        }
    }

    let mut fast_mismatches = 0;
    for _ in 0..10_000 {
        let m = rng.random_range(1..=200usize);
        let density = rng.random_range(0.0..1.0);
        let mut a = BitVec::zeros(m);
        for i in 0..m {
            a.set(i, rng.random_bool(density));
        }
        let free = rng.random_range(0..m);
        a.set(free, false);
        let mut b = a.clone();
        let key = MasterHash { hi: rng.random(), lo: rng.random() };
        let fast = search_singleton_fast(key, m as u64, &mut a);
        let slow = search_bucket(&[key], m as u64, &mut b, DEFAULT_SEED_CAP).expect("search");
        fast_mismatches += (fast != slow || a != b) as u32;
    }
    outcome(
        mismatches == 0 && fast_mismatches == 0,
        format!(
            "{checked} buckets, {mismatches} seeds differ from brute force; fast path differs on {fast_mismatches}/10000 states"
        ),
    )
}

fn serialization(_: &Shared) -> Outcome {
    let keys = gen_keys(100_000, 10);
    let base = Mphf::build(&keys, &BuildConfig::new(6.0, 2500.0)).expect("build");
    let half = base.buckets() / 2;
    let mut failures = Vec::new();
    for enc in [
        SeedEncoding::InterleavedRice,
        SeedEncoding::InterleavedCompact,
        SeedEncoding::Mixed(half),
        SeedEncoding::MonoRice,
        SeedEncoding::MonoCompact,
    ] {
        let f = base.with_encoding(enc);
        let bytes = f.to_bytes();
        match Mphf::from_bytes(&bytes) {
            Ok(g) => {
                if !(0..keys.len()).all(|i| g.query(keys.key(i)) == f.query(keys.key(i))) {
                    failures.push(format!("{enc}: queries differ"));
                }
                if g.to_bytes() != bytes {
                    failures.push(format!("{enc}: bytes not stable"));
                }
            }
            Err(e) => failures.push(format!("{enc}: {e}")),
        }
    }

    let mut shuffled: Vec<&[u8]> = keys.iter().collect();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    let bytes = base.to_bytes();
    if Mphf::build(&shuffled, &BuildConfig::new(6.0, 2500.0)).expect("build").to_bytes() != bytes {
        failures.push("input order changes bytes".into());
    }

    let mut accepted = 0;
    for len in 0..bytes.len() {
        accepted += Mphf::from_bytes(&bytes[..len]).is_ok() as u32;
    }
    let mut longer = bytes.clone();
    longer.push(0);
    accepted += Mphf::from_bytes(&longer).is_ok() as u32;
    for pos in 0..bytes.len() {
        let mut damaged = bytes.clone();
        damaged[pos] ^= 1 << (pos % 8);
        accepted += Mphf::from_bytes(&damaged).is_ok() as u32;
    }
    if accepted > 0 {
        failures.push(format!("{accepted} damaged inputs accepted"));
    }
    let detail = if failures.is_empty() {
        format!("5 encodings round-trip; {} truncations and {} bit flips rejected", bytes.len() + 1, bytes.len())
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

type Criterion = (&'static str, fn(&Shared) -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("perfection", perfection),
        ("space at desk scale", space),
        ("interleaved coding gain", interleaved_gain),
        ("secondary ordering gain", ordering_gain),
        ("assignment function ordering", assignment_ordering),
        ("chain model oracle", chain_oracle),
        ("expected size cap", size_cap),
        ("Elias-delta trend", elias_trend),
        ("seed minimality", seed_minimality),
        ("serialization", serialization),
    ];
    let shared = Shared::default();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run(&shared);
        failed += !o.pass as u32;
        println!(
            "{} {:>2} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} passed", criteria.len() as u32 - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
