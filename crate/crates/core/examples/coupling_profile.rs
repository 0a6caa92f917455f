//! Coupling-field amplitude and phase along the medium for a reference point.
//!
//! `cargo run --release --example coupling_profile [band] [od]`

use diamond_qfc::coupling::coupling_profile;
use diamond_qfc::table::{interpolated_controls, Column};
use diamond_qfc::{build_scheme, Band, OperatingPoint};

fn main() -> diamond_qfc::Result<()> {
    let mut args = std::env::args().skip(1);
    let band: Band = args.next().map_or(Ok(Band::C1529), |s| s.parse())?;
    let od: f64 = args.next().map_or(600.0, |s| s.parse().expect("od"));

    let scheme = build_scheme(band);
    let controls = interpolated_controls(band, Column::Unbounded, od);
    let point = OperatingPoint::new(&scheme, od, controls)?;
    let prof = coupling_profile(&point, 11)?;
    println!("{band} OD {od}, alpha_c = {:.1}", point.scales.alpha_c);
    println!("{:>6} {:>10} {:>10} {:>12}", "zeta", "|Wc|", "arg Wc", "|Wc|^2");
    for k in 0..prof.zeta.len() {
        let w = prof.omega[k];
        println!(
            "{:>6.2} {:>10.4} {:>10.4} {:>12.4}",
            prof.zeta[k],
            w.norm(),
            w.arg(),
            prof.intensity[k]
        );
    }
    Ok(())
}
