//! A simulated state of census tracts, the maximum-observed-sensitivity
//! baseline, and a private estimator on the same tracts.

use dpslr::datagen::{gen_oi_family, OiFamilySpec};
use dpslr::dp_median::OutputRange;
use dpslr::dp_regression::{dp_theilsen, mos_release, MedianVariant, MosOutcome, TheilSenParams};
use dpslr::RandomSeed;

fn main() -> dpslr::Result<()> {
    let spec = OiFamilySpec { tracts: 20, ..Default::default() };
    let family = gen_oi_family(&spec, RandomSeed::new(4))?;
    println!("state median parent rank {:.3}", family.state_median().unwrap_or(f64::NAN));

    let mut rng = RandomSeed::new(5).rng();
    let mos = mos_release(&family, 16.0, &mut rng)?;
    println!("mos = ({:.4}, {:.4}) [{}]", mos.value.mos.0, mos.value.mos.1, mos.spends[0].mechanism);
    let params = TheilSenParams::new(None, MedianVariant::Exp, OutputRange::default());
    for ((id, d), (_, out)) in family.tracts.iter().zip(&mos.value.tracts).take(8) {
        let ts = dp_theilsen(d, 16.0, &params, &mut rng)?.value;
        let mos = match out {
            MosOutcome::Released(p) => format!("{:.3}", p.p25),
            MosOutcome::Suppressed => "suppressed".into(),
        };
        println!("{id:<16} n={:<4} mos p25 {mos:<10} dp theil-sen p25 {:.3}", d.len(), ts.p25);
    }
    Ok(())
}
