//! Warm-started optimization along an OD grid, with the table values for
//! comparison.
//!
//! `cargo run --release --example od_sweep [band] [capped|unbounded] [budget]`

use diamond_qfc::optimizer::{sweep_od_seeded, BoundsMode, OptProblem};
use diamond_qfc::table::{interpolated_controls, reference_points, Column};
use diamond_qfc::{build_scheme, Band};

fn main() -> diamond_qfc::Result<()> {
    let mut args = std::env::args().skip(1);
    let band: Band = args.next().map_or(Ok(Band::E1367), |s| s.parse())?;
    let bounds: BoundsMode = args.next().map_or(Ok(BoundsMode::Capped), |s| s.parse())?;
    let budget: usize = args.next().map_or(4_000, |s| s.parse().expect("budget"));

    let column = match bounds {
        BoundsMode::Capped => Column::Bounded,
        BoundsMode::Unbounded => Column::Unbounded,
    };
    let rows: Vec<_> = reference_points(band, column).collect();
    let grid: Vec<f64> = rows.iter().map(|r| r.od).collect();

    let mut template = OptProblem::new(&build_scheme(band), 0.0, bounds);
    template.budget = budget;
    template.sampler_seed = 11;
    let results = sweep_od_seeded(&template, &grid, |od| {
        vec![interpolated_controls(band, column, od)]
    })?;

    println!("{band} {bounds}, budget {budget} per OD");
    println!("{:>6} {:>8} {:>8} {:>8}", "OD", "table", "found", "evals");
    for (r, row) in results.iter().zip(&rows) {
        println!("{:>6} {:>8.4} {:>8.4} {:>8}", r.od, row.eta_d, r.eta_d, r.evals);
    }
    Ok(())
}
