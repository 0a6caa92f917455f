//! Forward evaluation of the reference operating points with all three
//! propagators.
//!
//! `cargo run --release --example transfer_matrix`

use std::time::Instant;

use diamond_qfc::table::REFERENCE_POINTS;
use diamond_qfc::{
    build_scheme, conversion_metrics, transfer_matrix, Method, OperatingPoint, PropagationControls,
};

fn main() -> diamond_qfc::Result<()> {
    let controls = PropagationControls::default();
    println!(
        "{:>6} {:>9} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "band", "column", "OD", "listed", "exact", "magnus1", "magnus2", "eta_u", "ms"
    );
    for r in &REFERENCE_POINTS {
        let scheme = build_scheme(r.band);
        let point = OperatingPoint::new(&scheme, r.od, r.controls)?;
        let start = Instant::now();
        let exact = transfer_matrix(&point, Method::ExactSliced, &controls)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let m1 = transfer_matrix(&point, Method::Magnus1, &controls)?;
        let m2 = transfer_matrix(&point, Method::Magnus2, &controls)?;
        let e = conversion_metrics(&exact);
        println!(
            "{:>6} {:>9} {:>6} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.1}",
            r.band.to_string(),
            format!("{:?}", r.column),
            r.od,
            r.eta_d,
            e.eta_d,
            conversion_metrics(&m1).eta_d,
            conversion_metrics(&m2).eta_d,
            e.eta_u,
            ms
        );
    }
    Ok(())
}
