//! Partial sums of Joffe's series `sum_n prod_{k<=n} (1 - η(q_k))`; the
//! Q-process is recurrent iff the series diverges.

use bgw_qsd::verify::joffe_partial_sums;
use bgw_qsd::OffspringDistribution;

fn main() -> bgw_qsd::Result<()> {
    let laws = [
        ("pure death", OffspringDistribution::pure_death(0.5)?),
        ("geometric", OffspringDistribution::geometric(0.25)?),
        ("two children", OffspringDistribution::from_pmf(&[0.6, 0.0, 0.4])?),
    ];
    for (name, dist) in &laws {
        let s = joffe_partial_sums(dist, 1000);
        println!("{name:>12}: S_10 = {:.4}, S_100 = {:.4}, S_1000 = {:.4}", s[9], s[99], s[999]);
    }
    Ok(())
}
