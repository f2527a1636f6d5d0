//! Chain decomposition of a permutation and the commutative bound over all of `S_d`.
//!
//! cargo run --release --example perm_lemma

use negmono::permlemma::{self, Permutation, SpectrumVector};

fn main() -> negmono::Result<()> {
    let pi = Permutation::from_one_based(&[2, 3, 1, 5, 4, 6])?;
    let chains = permlemma::ma_chains(&pi);
    println!("pi = {:?}", pi.to_one_based());
    println!("maximal ascending chains: {:?}", chains.to_one_based());
    println!(
        "non-terminal elements: {:?}",
        chains
            .non_terminal()
            .iter()
            .map(|i| i + 1)
            .collect::<Vec<_>>()
    );

    let mu = SpectrumVector::sorted(vec![0.3, 0.25, 0.2, 0.12, 0.08, 0.05])?;
    let r = permlemma::check_commutative(&mu, &pi)?;
    println!("lhs^2 = {:.6} <= (d/2) sum mu = {:.6}", r.lhs, r.rhs);
    println!(
        "chain split: {:.6}",
        permlemma::chain_split_sum(&mu, &chains)
    );
    for chain in &chains.chains {
        let c = permlemma::chain_bound(&mu, chain)?;
        println!(
            "  chain {:?}: slack {:.4e}",
            chain.iter().map(|i| i + 1).collect::<Vec<_>>(),
            c.slack
        );
    }

    let sweep = permlemma::sweep_commutative(&mu)?;
    println!(
        "all {} permutations of S_{}: worst slack {:.4e} at {:?}, violations {}",
        sweep.count,
        sweep.d,
        sweep.worst_slack,
        sweep.arg_worst.to_one_based(),
        sweep.violations
    );
    Ok(())
}
