//! Detecting fast, steep and near-zero intervals on one path.

use fastpoints::detector::{
    count, default_zero_constant, expected_l_count, intersect_flags, l_flags, sup_flags, zero_near_flags,
};
use fastpoints::path::sample_bm;
use fastpoints::textio::{flags_from_rle, flags_to_rle};

fn main() -> fastpoints::Result<()> {
    let (m, a) = (14u32, 0.5);
    let b = sample_bm(2024, m + 3)?;

    let l = l_flags(&b, m, a, 0.0)?;
    println!("L flags at level {m}: {} (expected {:.1})", count(&l), expected_l_count(m, a, 0.0));

    let sup = sup_flags(&b, m, a)?;
    let c = default_zero_constant(1.0);
    let zero = zero_near_flags(&b, m, c)?;
    let both = intersect_flags(&sup, &zero)?;
    println!("sup {}  near-zero {}  both {}", count(&sup), count(&zero), count(&both));

    let rle = flags_to_rle(&both);
    // RLE keeps the bits and the kind, not the detector parameters.
    assert!(flags_from_rle(&rle)?.iter().eq(both.iter()));
    println!("{} RLE lines; first few:", rle.lines().count());
    for line in rle.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
