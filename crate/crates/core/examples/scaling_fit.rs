//! Box-counting exponent of the fast set against the closed form.

use fastpoints::detector::{count, l_flags};
use fastpoints::ensemble::{map_paths, mean_stderr};
use fastpoints::path::sample_bm;
use fastpoints::scaling::{dim_cantor, dim_fast, dim_fast_cantor_drift, dim_fbm_cantor_drift, fit_exponent, Correction};

fn main() -> fastpoints::Result<()> {
    let a = 0.5;
    let levels: Vec<u32> = (8..=14).collect();
    let mut means = Vec::new();
    for &m in &levels {
        let counts = map_paths(1, 200, |_, s| Ok(count(&l_flags(&sample_bm(s, m)?, m, a, 0.0)?) as f64))?;
        let (mean, se) = mean_stderr(&counts);
        println!("level {m:>2}: {mean:>9.2} ± {se:.2}");
        means.push(mean);
    }
    let fit = fit_exponent(&levels, &means, Correction::SqrtLog)?;
    println!("slope {:.4} ± {:.4}, dim_fast {:.4}", fit.slope, fit.stderr, dim_fast(a)?.value);

    let gamma = 1.0 / 9.0;
    println!("dim cantor {:.4}", dim_cantor(gamma)?.value);
    println!("dim fast with cantor drift {:.4}", dim_fast_cantor_drift(a, gamma)?.value);
    println!("fbm H=0.7, alpha=0.9: {:?}", dim_fbm_cantor_drift(a, 0.9, 0.7)?);
    Ok(())
}
