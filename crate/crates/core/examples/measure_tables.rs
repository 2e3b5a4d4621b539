//! Writes a measure table with its JSON header and reads it back exactly.

use bgw_qsd::construct::{closed_form_measure, ClosedFormKind};
use bgw_qsd::io::{read_measure_csv, write_measure_csv};
use bgw_qsd::OffspringDistribution;

fn main() -> bgw_qsd::Result<()> {
    let dist = OffspringDistribution::geometric(0.25)?;
    let nu = closed_form_measure(&dist, 0.0, ClosedFormKind::Log, 6)?;
    let mut buf = Vec::new();
    write_measure_csv(&mut buf, &nu)?;
    print!("{}", String::from_utf8_lossy(&buf));
    let back = read_measure_csv(buf.as_slice())?;
    println!("identical after reading back: {}", back == nu);
    Ok(())
}
