//! Drift functions and the Hölder diagnostics used to choose them.

use fastpoints::drift::{
    cantor_components, holder_coefficient, loud_sup_bound, reverse_holder_witness, sign_set_indicator, DriftSpec,
};

fn main() -> fastpoints::Result<()> {
    let gamma = 1.0 / 9.0;
    let cantor = DriftSpec::cantor(gamma, 20)?;
    let loud = DriftSpec::loud(0.5, 2, 8)?;
    let linear = DriftSpec::linear(3.0)?;

    println!("{:>6} {:>10} {:>10} {:>10}", "t", "cantor", "loud", "linear");
    // Odd denominators: the loud function vanishes at dyadic points.
    for i in 0..=7 {
        let t = i as f64 / 7.0;
        println!("{t:>6.3} {:>10.5} {:>10.5} {:>10.5}", cantor.eval(t), loud.eval(t), linear.eval(t));
    }

    let comps = cantor_components(gamma, 3)?;
    println!("generation 3: {} intervals, total length {:.5}", comps.len(), comps.total_length());

    // A Cantor function with ratio gamma is Hölder of order ln2/ln(1/gamma).
    let theta = 2f64.ln() / (1.0 / gamma).ln();
    println!("cantor Hölder-{theta:.3} coefficient: {:.4}", holder_coefficient(&cantor, theta, 14)?);
    println!("loud sup bound: {:.4}", loud_sup_bound(0.5, 2, 8));

    let w = reverse_holder_witness(&loud, 0.55, 0.1, 0.3, 2f64.powi(-4), 18)?;
    println!("loud witness at t=0.3: {w:?}");

    println!("sign set of cantor at t=0.1, h=1/64: {:?}", sign_set_indicator(&cantor, 1.0 / 64.0, 0.1));
    Ok(())
}
