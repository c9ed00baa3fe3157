//! Brownian and fractional Brownian paths on the dyadic grid over [0,2].

use fastpoints::fbm::sample_fbm;
use fastpoints::path::{flip_sign, modulus_coefficient, refine_bridge, sample_bm};
use fastpoints::textio::{path_from_text, path_to_text};

fn main() -> fastpoints::Result<()> {
    let b = sample_bm(42, 10)?;
    println!("bm: level {} with {} points, B(1) = {:.4}", b.level(), b.values().len(), b.values()[1 << 10]);

    // One more level by Brownian bridge; the coarse points stay put.
    let fine = refine_bridge(&b, 7)?;
    assert_eq!(fine.restrict(10)?, b.values());
    println!("refined to level {}", fine.level());

    let flipped = flip_sign(&b, true)?;
    println!("flipped B(1) = {:.4}", flipped.values()[1 << 10]);

    println!("modulus coefficient above 2^-6: {:.3}", modulus_coefficient(&b, 2f64.powi(-6))?);

    for h in [0.3, 0.5, 0.8] {
        let x = sample_fbm(42, h, 10)?;
        println!("fbm H={h}: X(1) = {:.4} via {:?}", x.values()[1 << 10], x.fbm_method().unwrap());
    }

    let text = path_to_text(&b);
    assert_eq!(path_from_text(&text)?.values(), b.values());
    println!("text round trip: {} lines", text.lines().count());
    Ok(())
}
