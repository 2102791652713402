use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SelectError;

pub type SelectionRng = ChaCha8Rng;

/// FNV-1a, 64 bit.
pub fn fnv1a64(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// The generator used for one domain: seeded with `seed ^ fnv1a64(domain)`.
pub fn domain_rng(seed: u64, domain: &str) -> SelectionRng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(domain))
}

/// Uniform `k`-subset by partial Fisher–Yates over the ids sorted
/// lexicographically; returned in drawing order.
pub fn seeded_pick<S: AsRef<str>>(
    ids: &[S],
    k: usize,
    rng: &mut SelectionRng,
) -> Result<Vec<String>, SelectError> {
    if k > ids.len() {
        return Err(SelectError::KTooLarge { k, len: ids.len() });
    }
    let mut pool: Vec<&str> = ids.iter().map(AsRef::as_ref).collect();
    pool.sort_unstable();
    let n = pool.len() as u64;
    for i in 0..k {
        let j = i + rng.gen_range(0..n - i as u64) as usize;
        pool.swap(i, j);
    }
    Ok(pool[..k].iter().map(|s| s.to_string()).collect())
}
