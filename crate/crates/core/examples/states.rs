//! Random three-party pure state: marginals, partial transpose and negativities.
//!
//! cargo run --example states -- [seed]

use negmono::matcore::{self, negativity};
use negmono::qstate::{self, Dims, TripartiteState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> negmono::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = Dims::new(2, 2, 3)?;
    let psi = TripartiteState::random(dims, &mut rng);

    let rho = qstate::density(&psi);
    let rho_ab = qstate::partial_trace_c(&rho, dims)?;
    let rho_ac = qstate::partial_trace_b(&rho, dims)?;
    let dims_ab = Dims::new(dims.a, dims.b, 1)?;
    let dims_ac = Dims::new(dims.a, dims.c, 1)?;

    println!("dims {dims}, seed {seed}");
    println!("tr rho_AB = {:.12}", matcore::trace_re(&rho_ab));
    println!("N(A|BC) = {:.6}", qstate::negativity_abc(&psi)?);
    println!(
        "N(A|B)  = {:.6}",
        negativity(&qstate::partial_transpose_a(&rho_ab, dims_ab)?)?
    );
    println!(
        "N(A|C)  = {:.6}",
        negativity(&qstate::partial_transpose_a(&rho_ac, dims_ac)?)?
    );

    // In the orthogonalizing basis the columns of the coefficient matrix are orthogonal.
    let u = qstate::orthogonalizing_basis(&psi)?;
    let rotated = psi.rotate_a(&u)?;
    let a = qstate::amat(&qstate::coeff_matrices(&rotated));
    let gram = a.adjoint() * &a;
    let off = matcore::max_abs(&(&gram - matcore::diagonal_part(&gram)));
    println!("max off-diagonal of A*A after rotation: {off:.2e}");
    println!("{}", serde_json::to_string(&psi.to_json()).unwrap());
    Ok(())
}
