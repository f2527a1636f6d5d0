//! Walks through the interlacing argument for a random `d x d` matrix `B`.
//!
//! cargo run --example special_case -- [d]

use negmono::matcore;
use negmono::specialcase::{self, Step};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> negmono::Result<()> {
    let d = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = matcore::random_gaussian(d, d, &mut rng);

    let trace = specialcase::interlacing_trace(&b)?;
    println!(
        "Z = [[B, 0], [0, -B*]] ({0}x{0}), spectrum of Delta_-: {1:.4?}",
        2 * d,
        trace.mu
    );
    for step in [Step::A, Step::B, Step::C, Step::D, Step::E, Step::F] {
        let r = trace.step(step);
        println!(
            "step {}: slack {:>10.3e} holds {}",
            step.letter(),
            r.slack,
            r.holds
        );
    }
    let (tr_plus, tr_minus) = specialcase::sqrt_delta_traces(&b)?;
    println!("tr sqrt(Delta_+) = {tr_plus:.6}, tr sqrt(Delta_-) = {tr_minus:.6}");
    for r in [
        specialcase::check_ineqid(&b)?,
        specialcase::check_ineqid1(&b)?,
    ] {
        println!("{}: {:.6} <= {:.6}", r.name, r.lhs, r.rhs);
    }
    println!(
        "||U B U - B*||_max = {:.2e}",
        specialcase::unitary_residual(&b, &trace.u)?
    );
    Ok(())
}
