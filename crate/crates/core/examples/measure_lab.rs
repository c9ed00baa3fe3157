//! Frostman-type measures and the second-moment functional J.

use fastpoints::drift::DriftSpec;
use fastpoints::measure::{
    a_eta, cantor_natural_measure, energy, expected_j, j_mu_estimate, paley_zygmund_check, s_h, s_tilde_h,
    select_sign_set,
};

fn main() -> fastpoints::Result<()> {
    let mu = cantor_natural_measure(0.25, 6)?;
    println!("{}: {} atoms", mu.label(), mu.len());

    let levels: Vec<u32> = (2..=10).collect();
    let a = a_eta(&mu, 0.5, &levels, 10)?;
    println!("A_0.5 = {a:.4}");
    for e in [0.3, 0.45, 0.6] {
        println!("energy at exponent {e}: {:.4}", energy(&mu, e)?);
    }
    let h = 2f64.powi(-6);
    println!("S_h = {:.4}, S~_h = {:.4}", s_h(&mu, h)?, s_tilde_h(&mu, h)?);

    let f = DriftSpec::cantor(0.25, 20)?;
    let h = 2f64.powi(-8);
    let sel = select_sign_set(&f, h, &mu);
    println!("sign set {:?} carries mass {:.3}", sel.choice, sel.selected_mass());

    let level = 14;
    let est = j_mu_estimate(5, 2000, level, &mu, h, 0.3, &f)?;
    let exact = expected_j(&mu, level, h, 0.3, &f)?;
    println!("E J = {:.3e} ± {:.1e} (exact {exact:.3e})", est.ej, est.stderr_ej);
    let pz = paley_zygmund_check(&est);
    println!("P(J>0) = {:.4}, PZ margin {:.4} ± {:.4}", est.p_positive, pz.margin, pz.stderr);
    Ok(())
}
