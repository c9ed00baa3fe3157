//! Counts of fast sub-intervals and the variance bound behind the limsup set.

use fastpoints::limsup::{absorption_holds, dimension_condition, variance_report};

fn main() -> fastpoints::Result<()> {
    let (m, n, a) = (6u32, 12u32, 0.4);
    let r = variance_report(3, 100, m, n, a, 0.0)?;
    println!("p_n = {:.3e} (analytic {:.3e})", r.pooled.p_n_hat, r.pooled.p_n_analytic);
    println!("mean M_n = {:.4} ± {:.4}, oracle {:.4}", r.mean_hat, r.mean_stderr, r.mean_oracle);
    println!("variance {:.4} vs bound {:.4}: holds {}", r.pooled.var_hat, r.pooled.var_bound, r.bound_holds());

    // Needs m large enough for the epsilon margin to beat the modulus term.
    for level in [32, 128, 512] {
        println!("absorption at level {level}: {}", absorption_holds(level, a, 0.5, 1.5));
    }

    let n_range: Vec<u32> = (20..=400).step_by(20).collect();
    for gamma in [0.5, 0.9] {
        let d = dimension_condition(gamma, a, 0.0, &n_range)?;
        println!("gamma {gamma}: {}", d.verdict.as_str());
    }
    Ok(())
}
