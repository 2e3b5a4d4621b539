//! Simulation checks of quasi-stationarity: one step from a QSD, and the
//! conditioned law of `Z_n` from a single ancestor.

use bgw_qsd::construct::{closed_form_measure, ClosedFormKind};
use bgw_qsd::montecarlo::{quasi_stationarity_test, yaglom_mc};
use bgw_qsd::OffspringDistribution;

fn main() -> bgw_qsd::Result<()> {
    let dist = OffspringDistribution::geometric(0.25)?;
    let nu = closed_form_measure(&dist, 0.5, ClosedFormKind::QsdPower, 4096)?;
    let r = quasi_stationarity_test(&dist, &nu.nu, 128, 500_000, 7)?;
    println!("QSD one step: TV {:.4} (noise {:.4})", r.tv_distance, r.tv_noise);
    let r = quasi_stationarity_test(&dist, &[0.1; 10], 10, 500_000, 7)?;
    println!("uniform on 1..10 one step: TV {:.4}", r.tv_distance);
    let r = yaglom_mc(&dist, 4, 10_000_000, 7)?;
    println!(
        "Z_4 | Z_4 > 0: TV {:.4}, survival {:.5} vs p_4 = {:.5}",
        r.tv_distance,
        r.note("survival_fraction").unwrap_or(f64::NAN),
        r.note("p_n").unwrap_or(f64::NAN)
    );
    Ok(())
}
