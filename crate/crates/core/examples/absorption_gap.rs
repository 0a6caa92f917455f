//! Efficiency lost to coupling-field absorption: the absorbing model is
//! compared with the constant-field model, both at the absorbing optimum
//! and with each model optimized on its own.
//!
//! `cargo run --release --example absorption_gap [band] [od] [budget]`

use diamond_qfc::optimizer::{absorption_gap, BoundsMode, OptProblem};
use diamond_qfc::table::{interpolated_controls, Column};
use diamond_qfc::{build_scheme, Band};

fn main() -> diamond_qfc::Result<()> {
    let mut args = std::env::args().skip(1);
    let band: Band = args.next().map_or(Ok(Band::C1529), |s| s.parse())?;
    let od: f64 = args.next().map_or(700.0, |s| s.parse().expect("od"));
    let budget: usize = args.next().map_or(6_000, |s| s.parse().expect("budget"));

    let seed = interpolated_controls(band, Column::Unbounded, od);
    let mut problem =
        OptProblem::new(&build_scheme(band), od, BoundsMode::Unbounded).with_seeds(vec![seed]);
    problem.budget = budget;
    problem.sampler_seed = 7;
    let g = absorption_gap(&problem)?;

    println!("{band} OD {od}");
    println!("  absorbing optimum          eta_d = {:.4}  {:?}", g.absorbing.eta_d, g.absorbing.best);
    println!("  constant field, same point eta_d = {:.4}", g.constant_at_absorbing);
    println!("  constant-field optimum     eta_d = {:.4}  {:?}", g.constant.eta_d, g.constant.best);
    println!(
        "  gap between optima {:+.2} pp, at the absorbing point {:+.2} pp",
        100.0 * g.gap(),
        100.0 * g.gap_same_point()
    );
    Ok(())
}
