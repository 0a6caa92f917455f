//! Output quadrature variances versus efficiency for a single photon and a
//! 6 dB squeezed coherent input.
//!
//! `cargo run --release --example variances`

use diamond_qfc::state::{output_variances, squeezing_r_from_db, ChannelCoeff, InputSpec};
use num_complex::Complex64 as C64;

fn main() -> diamond_qfc::Result<()> {
    let fock = InputSpec::Fock(1);
    let squeezed = InputSpec::SqueezedCoherent {
        alpha: C64::new(1.0, 0.0),
        r: squeezing_r_from_db(6.0),
        phi: 0.0,
    };
    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10} {:>8}",
        "eta", "fock varX", "fock varY", "sq varX", "sq varY", "sq dB"
    );
    for k in 0..=10 {
        let eta = k as f64 / 10.0;
        let c = ChannelCoeff::from_eta(eta)?;
        let f = output_variances(&fock, c, true)?;
        let s = output_variances(&squeezed, c, true)?;
        // squeezing relative to the vacuum standard deviation ½
        let db = -10.0 * (s.var_x.sqrt() / 0.5).log10();
        println!(
            "{eta:>5.1} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {db:>8.3}",
            f.var_x, f.var_y, s.var_x, s.var_y
        );
    }
    Ok(())
}
