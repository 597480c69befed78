//! Writes a function to disk, loads it back and shows that damaged files are
//! refused.
//!
//! cargo run --release --example serialization -- [n] [path]

use pbhash::{gen_keys, verify_bijection, BuildConfig, Mphf};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(100_000, |s| s.parse().expect("n"));
    let path = args
        .get(2)
        .map_or_else(|| std::env::temp_dir().join("pbhash-example.phob"), Into::into);
    let keys = gen_keys(n, 5);

    let f = Mphf::build(&keys, &BuildConfig::new(6.0, 2500.0))?;
    f.save(&path)?;
    let bytes = std::fs::read(&path)?;
    println!("{} keys -> {} bytes in {}", n, bytes.len(), path.display());
    println!("in-memory size {:.4} bits/key (file adds a 16 byte header)", f.bits_per_key());

    let g = Mphf::load(&path)?;
    assert!(verify_bijection(&g, &keys));
    assert_eq!(g.to_bytes(), bytes);
    println!("loaded copy is a bijection and re-serializes to the same bytes");

    let mut flipped = bytes.clone();
    flipped[bytes.len() / 2] ^= 0x10;
    println!("bit flip:   {}", Mphf::from_bytes(&flipped).unwrap_err());
    println!("truncation: {}", Mphf::from_bytes(&bytes[..bytes.len() - 3]).unwrap_err());
    std::fs::remove_file(&path)?;
    Ok(())
}
