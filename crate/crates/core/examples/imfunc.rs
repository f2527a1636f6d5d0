//! Sup-norm error of the scaled approximation `h_s` and the level-set pairing.
//!
//! cargo run --release --example imfunc

use negmono::imfunc::{self, IMParams};

fn main() -> negmono::Result<()> {
    let params = IMParams::default();
    println!(
        "h(0) = {:.10}",
        imfunc::h(0.0, params.theta, params.quad_tol)?
    );
    println!("{:>8} {:>12} {:>10}", "s", "sup error", "argmax");
    for row in imfunc::sup_error_table(&params, &[1.0, 10.0, 100.0, 1000.0])? {
        println!("{:>8} {:>12.6e} {:>10.4}", row.s, row.sup_error, row.argmax);
    }

    let pairs = imfunc::im_pair_check(params.theta, 8, 1e-12)?;
    for p in &pairs.pairs {
        println!(
            "g = {:.4}: t1 = {:>8.4}, t2 = {:>8.4}, g'(t1) + g'(t2) = {:.4e}",
            p.level, p.t1, p.t2, p.derivative_sum
        );
    }
    println!(
        "min derivative sum {:.4e}, holds {}",
        pairs.min_derivative_sum, pairs.holds
    );
    let r = imfunc::lower_bound_gap(4.0, params.theta)?;
    println!("at x = 4: g - 1/(2 sqrt x) = {:.6} >= {:.6}", r.rhs, r.lhs);
    Ok(())
}
