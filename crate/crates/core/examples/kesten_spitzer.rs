//! Moving between finite measures on `[0, 1)` and scale-invariant `Λ`.

use bgw_qsd::verify::{ks_convert, ks_invert, UnitMeasure};

fn main() -> bgw_qsd::Result<()> {
    let m: f64 = 0.4;
    let l = ks_convert(&UnitMeasure::uniform(), (1.0 / m).ln(), m)?;
    println!("uniform, c = log(1/m): density {:?} (dx/x)", l.density());
    let l = ks_convert(&UnitMeasure::dirac(0.25), 2.0, m)?;
    println!("dirac at 0.25, c = 2: atoms {:?}", l.atom_list());
    let mu = UnitMeasure { atoms: vec![(0.1, 0.5)], density: vec![0.25, 0.75] };
    let (back, c) = ks_invert(&ks_convert(&mu, 3.0, m)?)?;
    println!("roundtrip: c = {c}, atoms {:?}, density {:?}", back.atoms, back.density);
    Ok(())
}
