//! Brute-force check of the eigenvalue bound for `Delta = BB* - B*B` against
//! every pairing of the spectra of `BB*` and `-B*B`.
//!
//! cargo run --release --example drury -- [d] [trials]

use negmono::{matcore, permlemma};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> negmono::Result<()> {
    let mut args = std::env::args().skip(1);
    let d = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut min = f64::INFINITY;
    for _ in 0..trials {
        let b = matcore::random_gaussian(d, d, &mut rng);
        let r = permlemma::drury_numeric_check(&b)?;
        min = min.min(r.slack / r.rhs);
    }
    println!("d = {d}, {trials} trials, smallest relative slack {min:.4e}");
    Ok(())
}
