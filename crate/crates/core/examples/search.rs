//! Random search with local descent for the smallest slack of a target inequality.
//!
//! cargo run --release --example search -- [target] [trials]

use negmono::search::{self, SearchConfig, Target};

fn main() -> negmono::Result<()> {
    let mut args = std::env::args().skip(1);
    let target: Target = args.next().unwrap_or_else(|| "ineq4".into()).parse()?;
    let mut cfg = SearchConfig::new(target);
    cfg.trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    cfg.local_steps = 20;
    cfg.seed = 2024;

    let res = search::run_search(&cfg)?;
    println!(
        "{target} ({}): min slack {:.6e} at trial {}, {} violations in {} trials",
        if target.is_proven() {
            "proven"
        } else {
            "conjectured"
        },
        res.min_slack,
        res.trial_index,
        res.violations,
        res.trials
    );
    println!("replayed slack {:.6e}", res.replay()?);
    let (_, report) = search::run_trial(&cfg, res.trial_index)?;
    println!(
        "re-run trial {}: slack {:.6e}",
        res.trial_index, report.slack
    );
    Ok(())
}
