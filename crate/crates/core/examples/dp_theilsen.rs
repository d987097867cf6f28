//! Private Theil-Sen with each median mechanism and two matching counts.

use dpslr::datagen::{gen_synthetic, SyntheticSpec};
use dpslr::dp_median::OutputRange;
use dpslr::dp_regression::{dp_theilsen, MedianVariant, TheilSenParams};
use dpslr::estimators::ols_fit;
use dpslr::RandomSeed;

fn main() -> dpslr::Result<()> {
    let data = gen_synthetic(&SyntheticSpec { n: 300, ..Default::default() }, &mut RandomSeed::new(11).rng())?;
    let ols = ols_fit(&data.dataset)?.predictions();
    println!("ols       p25 {:.4} p75 {:.4}", ols.p25, ols.p75);
    let range = OutputRange::new(-0.5, 1.5)?;
    let mut rng = RandomSeed::new(12).rng();
    for variant in [MedianVariant::Exp, MedianVariant::Wide { theta: 0.01 }, MedianVariant::Smooth { dof: 3, beta: 0.5 }] {
        for k in [Some(1), None] {
            let r = dp_theilsen(&data.dataset, 1.0, &TheilSenParams::new(k, variant, range), &mut rng)?;
            println!("{:<6} k={:<7} p25 {:.4} p75 {:.4}", variant.name(), format!("{k:?}"), r.value.p25, r.value.p75);
        }
    }
    Ok(())
}
