//! Truncated power series: products, composition, `exp`, `ln` and powers.

use bgw_qsd::TruncatedSeries;

fn main() -> bgw_qsd::Result<()> {
    let k = 8;
    let one_minus_z = TruncatedSeries::from_coeffs(&[1.0, -1.0], k)?;
    println!("sqrt(1 - z)  = {:?}", one_minus_z.powf(0.5)?.coeffs());
    println!("log(1 - z)   = {:?}", one_minus_z.ln()?.coeffs());
    let z = TruncatedSeries::from_coeffs(&[0.0, 1.0], k)?;
    println!("exp(z)       = {:?}", z.exp().coeffs());
    let f = TruncatedSeries::from_coeffs(&[0.5, 0.5], k)?;
    let g = TruncatedSeries::from_coeffs(&[0.25, 0.5, 0.25], k)?;
    println!("(1+z)^2/4 * (1+z)/2 = {:?}", (&f * &g).coeffs());
    Ok(())
}
