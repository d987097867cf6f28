//! The three private medians on one sample.

use dpslr::dp_median::{exp_mech_median, smooth_sens_median, widened_exp_mech_median, MedianMechParams, OutputRange, SmoothSensParams};
use dpslr::RandomSeed;
use rand::Rng;

fn main() -> dpslr::Result<()> {
    let mut rng = RandomSeed::new(3).rng();
    let z: Vec<f64> = (0..501).map(|_| 0.4 + 0.1 * (rng.random::<f64>() - 0.5)).collect();
    let range = OutputRange::new(-0.5, 1.5)?;

    for eps in [0.1, 1.0, 10.0] {
        let exp = exp_mech_median(&z, &MedianMechParams::new(eps, range), &mut rng)?;
        let wide = widened_exp_mech_median(&z, &MedianMechParams::widened(eps, range, 0.01), &mut rng)?;
        let smooth = smooth_sens_median(&z, &SmoothSensParams::new(eps, 1, range), &mut rng)?;
        println!("eps {eps:>4}: exp {exp:.4}  widened {wide:.4}  smooth {smooth:.4}");
    }
    Ok(())
}
