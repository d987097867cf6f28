//! Synthetic data with known truth, written to CSV and read back.

use dpslr::datagen::{gen_synthetic, read_dataset_csv, write_dataset_csv, SyntheticSpec};
use dpslr::RandomSeed;

fn main() -> dpslr::Result<()> {
    let spec = SyntheticSpec { n: 50, sigma_x2: 0.1, ..Default::default() };
    let data = gen_synthetic(&spec, &mut RandomSeed::new(8).rng())?;
    println!("truth {:?}, {:.1}% of points clipped", data.truth, 100.0 * data.clipped_fraction);
    for w in &data.warnings {
        println!("warning: {w}");
    }

    let mut buf = Vec::new();
    write_dataset_csv(&mut buf, &data.dataset)?;
    let back = read_dataset_csv(buf.as_slice(), true)?;
    assert_eq!(back.len(), data.dataset.len());
    println!("{}", String::from_utf8_lossy(&buf).lines().take(4).collect::<Vec<_>>().join("\n"));

    let bad = "x,y\n0.1,0.2\n0.3,1.7\n";
    println!("strict: {}", read_dataset_csv(bad.as_bytes(), true).unwrap_err());
    println!("lenient: {:?}", read_dataset_csv(bad.as_bytes(), false)?.points()[1]);
    Ok(())
}
