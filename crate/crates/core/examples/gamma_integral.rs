//! `∫ (e^{-ax} - e^{-x}) x^{-alpha} dx/x = Γ(-alpha)(a^alpha - 1)` by band
//! integration over the scale-invariant measure `dx/x`.

use bgw_qsd::selfsimilar::gamma_integral_check;

fn main() -> bgw_qsd::Result<()> {
    println!("{:>5} {:>6} {:>22} {:>22} {:>9}", "a", "alpha", "quadrature", "closed form", "rel err");
    for alpha in [-1.0, -0.5, 0.0, 0.3, 0.7] {
        for a in [0.25, 0.5, 0.9] {
            let c = gamma_integral_check(a, alpha, 1e-12)?;
            println!("{a:>5} {alpha:>6} {:>22.15e} {:>22.15e} {:>9.1e}", c.numeric, c.closed_form, c.rel_error);
        }
    }
    Ok(())
}
