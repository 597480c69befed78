//! Minimal perfect hashing by partitioned bucket placement.
//!
//! Keys are hashed into small partitions of expected size `P`. Inside each
//! partition they are spread over `B = P/λ` buckets by an assignment function
//! that makes early buckets large and late buckets small, and every bucket gets
//! the smallest seed that places its keys onto free slots. Seeds are stored
//! with one encoder per bucket index across all partitions.
//!
//! ```
//! use pbhash::{BuildConfig, Mphf};
//!
//! let keys = vec!["apple", "banana", "cherry"];
//! let f = Mphf::build(&keys, &BuildConfig::default()).unwrap();
//! let mut out: Vec<u64> = keys.iter().map(|k| f.query(k.as_bytes())).collect();
//! out.sort();
//! assert_eq!(out, vec![0, 1, 2]);
//! ```

pub mod analysis;
pub mod assignment;
pub mod bench;
pub mod bits;
pub mod builder;
pub mod encoders;
pub mod error;
pub mod hashing;
pub mod keys;
pub mod mphf;
pub mod partition;
pub mod serial;

pub use assignment::{AssignmentKind, AssignmentSpec, AssignmentTable};
pub use builder::{BucketOrder, BuildConfig};
pub use encoders::SeedEncoding;
pub use error::{Error, Result};
pub use hashing::{master_hash, GlobalSeed, MasterHash};
pub use keys::{gen_keys, KeyCorpus, KeySet};
pub use mphf::{verify_bijection, Build, Mphf};
