//! Single-rail, path and polarization qubits through conversion, and a
//! GHZ state through the N-mode product channel.
//!
//! `cargo run --release --example qubit_channels`

use diamond_qfc::qubit::{
    n_qubit_channel, path_channel, polarization_channel, single_rail_channel, Encoding,
    NQubitState,
};
use diamond_qfc::state::ChannelCoeff;
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

fn show(label: &str, m: &Matrix2<C64>) {
    println!(
        "{label:<24} [[{:.4}, {:.4}], [{:.4}, {:.4}]]",
        m[(0, 0)].re,
        m[(0, 1)],
        m[(1, 0)],
        m[(1, 1)].re
    );
}

fn main() -> diamond_qfc::Result<()> {
    let plus = Matrix2::from_element(C64::new(0.5, 0.0));
    let raw = ChannelCoeff::new(C64::from_polar(0.8, 0.6))?;

    show("single-rail, corrected", &single_rail_channel(&plus, raw, true).rho);
    show("single-rail, raw phase", &single_rail_channel(&plus, raw, false).rho);

    let d = ChannelCoeff::from_eta(1.0)?;
    let u = ChannelCoeff::from_eta(0.25)?;
    let path = path_channel(&plus, d, u, true);
    show("path (1.0, 0.25)", &path.logical);
    println!("{:<24} {:.4}", "  vacuum", path.vacuum);

    let pol = polarization_channel(&plus, u, u, true);
    show("polarization (0.25, 0.25)", &pol.logical);

    let mut ghz = DMatrix::<C64>::zeros(8, 8);
    for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
        ghz[(i, j)] = C64::new(0.5, 0.0);
    }
    let k = ChannelCoeff::from_eta(0.8)?;
    let out = n_qubit_channel(&NQubitState::new(ghz, Encoding::SingleRail)?, &[k, k, k], true)?;
    println!(
        "GHZ-3 at eta 0.8: <000|r|111> = {:.5}, <111|r|111> = {:.5}, <000|r|000> = {:.5}",
        out.rho[(0, 7)].re,
        out.rho[(7, 7)].re,
        out.rho[(0, 0)].re
    );
    Ok(())
}
